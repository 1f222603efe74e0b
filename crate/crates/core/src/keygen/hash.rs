use blake2::digest::consts::U16;
use blake2::{Blake2s, Digest};

/// Output length of [`hash128`] in bytes.
pub const HASH_BYTES: usize = 16;

/// BLAKE2s with a 16-byte digest (unkeyed, output length parameter 16).
pub fn hash128(data: &[u8]) -> [u8; HASH_BYTES] {
    Blake2s::<U16>::digest(data).into()
}
