//! Finite presheaves over the tree category and minimal fibrations.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod glue;
pub mod homotopy;
pub mod minimize;
pub mod presheaf;
pub mod site;

pub use error::{DendroError, Result};
