pub mod cli;
pub mod correlation;
pub mod entanglement;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod quadrature;
pub mod response;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
