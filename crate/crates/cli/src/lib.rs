//! Library surface of the `mfrn` command-line front end; the binary in
//! `main.rs` is a thin argument-parsing wrapper over these modules.

pub mod config;
pub mod predict;
pub mod simulate;
pub mod sweep;
pub mod verify;
