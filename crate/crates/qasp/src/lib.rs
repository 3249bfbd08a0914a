//! Quantified answer set programs with weak constraints.

pub mod bench;
pub mod error;
pub mod ground;
pub mod quantsem;
pub mod rewrite;
pub mod solve;
pub mod syntax;

pub use error::{Error, Result};
