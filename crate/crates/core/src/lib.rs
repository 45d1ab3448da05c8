pub mod certify;
pub mod error;
pub mod measures;
pub mod optimize;
pub mod par;
pub mod sweep;
pub mod tensor;
pub mod tol;
pub mod upb;

pub use error::{Error, Result};
