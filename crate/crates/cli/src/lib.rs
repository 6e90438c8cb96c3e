//! The `holevo` command line: argument parsing into a [`RunConfig`] and its
//! execution. Exit status is 0 on success, 2 when a search command found a
//! violation or gap, 1 on error.

pub mod commands;
pub mod config;

pub use commands::{execute, run, Fmt, Outcome, Report};
pub use config::{parse_args, ChannelConfig, ChannelSource, Command, ParseError, RunConfig, SearchKind};
