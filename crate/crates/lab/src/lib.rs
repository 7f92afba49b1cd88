//! File formats, battery directories, figure tables and the command-line
//! front end for `cellsort-core`.

pub mod battery;
pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod summary;
pub mod trace;

pub use error::LabError;
