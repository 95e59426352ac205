pub mod arith;
pub mod entropy;
pub mod error;
pub mod integrate;
pub mod measure;
pub mod pathology;
pub mod report;
pub mod selftest;
pub mod shift;
pub mod transform;

pub use error::{Error, Result};
