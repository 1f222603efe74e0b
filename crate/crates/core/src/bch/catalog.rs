use super::code::{dimension_for, CodeParams};

/// Every narrow-sense primitive BCH code of length `2^m - 1` with
/// `k >= 1`, each listed once with its largest designed `t`.
pub fn narrow_sense_codes(m: u32) -> Vec<CodeParams> {
    let n = (1usize << m) - 1;
    let mut out: Vec<CodeParams> = Vec::new();
    for t in 1..n.div_ceil(2) {
        let k = dimension_for(m, t);
        if k == 0 {
            break;
        }
        match out.last_mut() {
            Some(last) if last.k == k => last.t = t,
            _ => out.push(CodeParams::new(n, k, t)),
        }
    }
    out
}

/// Codes of length 63 and 127 plus BCH(15,7,2).
pub fn default_catalog() -> Vec<CodeParams> {
    let mut out = vec![CodeParams::new(15, 7, 2)];
    out.extend(narrow_sense_codes(6));
    out.extend(narrow_sense_codes(7));
    out
}
