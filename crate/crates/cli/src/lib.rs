//! Library side of the `cytower` binary: subcommands and the verification suite.

pub mod checks;
pub mod commands;
pub mod sample;
