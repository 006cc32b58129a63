pub mod analysis;
pub mod annulus;
pub mod boundary;
pub mod curves;
pub mod disc;
pub mod error;
pub mod newton;

pub use error::{Error, Result};
