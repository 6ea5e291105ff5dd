//! Reading instance files and running checks on them from the command line.

pub mod commands;
pub mod document;

pub use commands::{run, Command, Format, Options, Outcome, EXIT_INPUT, EXIT_VALID, EXIT_VIOLATION};
pub use document::{parse_instance, serialize, DocumentError, InstanceDocument};
