//! Fan-file I/O and the commands of the `manin` binary.

pub mod commands;
pub mod fanfile;
