//! File formats, rendering and subcommands behind the `kitemorph` binary.

pub mod commands;
pub mod formats;
pub mod render;

pub use commands::{run, Cli, Command, EXIT_FAIL, EXIT_OK, EXIT_PARSE};
