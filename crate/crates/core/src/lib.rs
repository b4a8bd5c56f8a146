pub mod error;
pub mod chaos;
pub mod convert;
pub mod exact;
pub mod exec;
pub mod fmt;
pub mod hermite;
pub mod identities;
pub mod tensor;
pub mod wick;

pub use error::{ChaosError, Result};
