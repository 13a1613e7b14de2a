pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod fast;
pub mod floor_sum;
pub mod published;
pub mod rational;
pub mod scan;
pub mod sieve;
pub mod verify;

pub use error::{Error, Result};
