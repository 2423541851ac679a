//! Bergman geometry of bounded symmetric domains and Bloch-space composition operators.

pub mod bloch;
pub mod cli;
pub mod domains;
pub mod estimator;
pub mod error;
pub mod expr;
pub mod isometry;
pub mod linalg;
pub mod maps;
pub mod rotation;
pub mod spectrum;

pub use error::{LabError, Result};
