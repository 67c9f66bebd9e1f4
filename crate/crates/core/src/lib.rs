pub mod bessel;
pub mod diskspec;
pub mod error;
pub mod grid;
pub mod rearrange;
pub mod varsolve;

pub use error::{Error, Result};
