//! File formats, configuration, the parallel pipeline driver and the timing
//! harness behind the `pcma` command.

pub mod config;
pub mod io;
pub mod run;
pub mod tables;
