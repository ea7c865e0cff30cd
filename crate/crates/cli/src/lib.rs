//! Command-line front end: operator registry, acceptance suite and commands.

pub mod commands;
pub mod registry;
pub mod suite;
