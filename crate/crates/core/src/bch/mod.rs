//! Binary BCH codes over GF(2^m) in syndrome form.

mod catalog;
mod code;
mod decode;
mod field;
mod poly;

pub use catalog::{default_catalog, narrow_sense_codes};
pub use code::{dimension_for, extension_degree, generator_polynomial, BchCode, CodeParams, SyndromeBlock, MAX_M, MIN_M};
pub use decode::{DecodeFailure, DecodeOutcome};
pub use field::{primitive_polynomial, GaloisField, PRIMITIVE_POLYNOMIALS};
pub use poly::{cyclotomic_coset, degree as poly_degree, minimal_polynomial};
