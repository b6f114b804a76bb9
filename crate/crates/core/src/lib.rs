pub mod catalog;
pub mod diagnostics;
pub mod domains;
pub mod error;
pub mod invert;
pub mod methods;
pub mod numerics;
pub mod queueing;
pub mod tame;

pub use error::{Error, Result};
