//! Command-line front end for the `oprange` library.

pub mod app;
pub mod commands;
pub mod error;
pub mod io;
pub mod report;

pub use app::{run, Outcome};
