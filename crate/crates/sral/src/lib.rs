//! File formats, reports and the acceptance suite around `sral-core`, plus
//! the implementation of the `sral` command-line tool.

pub mod commands;
pub mod io;
pub mod report;
pub mod verify;
