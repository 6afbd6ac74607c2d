pub mod cli;
pub mod error;
pub mod euclid;
pub mod giraud;
pub mod jet;
pub mod mass;
pub mod parametrix;
pub mod quad;
pub mod report;
pub mod torus;

pub use error::{Error, Result};
