//! Command-line and HTTP front ends for the `monocat` engine.

pub mod commands;
pub mod server;
