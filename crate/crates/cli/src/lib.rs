//! Command implementations behind the `fbpme` binary.

pub mod analyze;
pub mod config;
pub mod init;
pub mod output;
pub mod run;
pub mod sweep;
pub mod verify;
