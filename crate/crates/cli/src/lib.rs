//! Command-line driver for `dgo-core`: single optimizations with trace
//! files, timing reports (scaling with dimension, speedup with workers) and
//! the XOR training comparison.

pub mod bench;
pub mod cli;
pub mod optimize;
pub mod output;
pub mod reference;
pub mod setup;
pub mod xor;

pub use cli::Cli;
