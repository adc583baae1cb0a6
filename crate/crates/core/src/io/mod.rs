//! Configuration files, binary field files, initial data, reports and the
//! command-line front end.

pub mod cli;
pub mod config;
pub mod field_file;
pub mod initial;
pub mod report;
