//! Command-line front end and HTTP service for the combocopy library.

pub mod commands;
pub mod server;

pub use commands::{run, Cli};
