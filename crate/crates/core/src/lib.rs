//! Lightweight SRAM PUF key generation.
//!
//! The crate covers the whole path from raw power-up measurements to a
//! 128-bit key shared between a constrained token and a server:
//!
//! - [`puf`]: simulated SRAM cells, measurement datasets, quality metrics.
//! - [`enrollment`]: majority voting, preselection and multi-reference
//!   enrollment records.
//! - [`bch`]: binary BCH codes with syndrome-form helper data.
//! - [`keygen`]: the reverse fuzzy extractor (token `Gen`, server `Rep`
//!   over several references) and the classic fuzzy extractor.
//! - [`analytics`]: failure-rate formulas, code planning, Monte Carlo
//!   validation, entropy accounting and debiasing.

pub mod analytics;
pub mod bch;
pub mod bits;
pub mod config;
pub mod enrollment;
mod error;
pub mod keygen;
pub mod puf;
pub mod rng;

pub use bch::{BchCode, CodeParams, SyndromeBlock};
pub use bits::BitVector;
pub use enrollment::{EnrollmentPlan, EnrollmentRecord, ReferenceResponse};
pub use error::{Error, Result};
pub use keygen::{HelperData, RecoveryResult, SecretKey, TokenOutput};
pub use puf::{CellModel, Condition, PufDataset};
