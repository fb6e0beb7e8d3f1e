//! File formats, output emission and configuration loading for the
//! `insitu` simulator. The command-line front end lives in `main.rs`.

pub mod config;
pub mod emit;
pub mod formats;

pub use emit::{emit, emit_bench};
