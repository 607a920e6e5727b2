//! File formats and the command-line front end for `entspread-core`.

pub mod cli;
pub mod io;
pub mod output;
