//! Command-line front end and acceptance suites for `strip-broadcast`.

pub mod commands;
pub mod suites;
