//! Command-line front end, field grammar and file formats for `fracheat-core`.

pub use fracheat_core;

pub mod cli;
pub mod grammar;
pub mod io;
