//! Command-line front end: experiment configs, the four computations and
//! their CSV/JSON output.

pub mod commands;
pub mod config;
pub mod output;
