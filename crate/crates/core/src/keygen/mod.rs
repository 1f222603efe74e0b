//! Key generation: hashing, helper data and the protocol itself.

mod hash;
mod helper;
mod protocol;

pub use hash::{hash128, HASH_BYTES};
pub use helper::{HelperData, HELPER_MAGIC, HELPER_VERSION};
pub use protocol::{
    fe_enroll, fe_reproduce, read_challenge, reference_bits, response_bits_needed, server_recover,
    server_recover_ordered, tag_input, token_generate, AttemptOrder, RecoveryResult, SecretKey, TokenOutput,
};
