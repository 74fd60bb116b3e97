//! File formats, spectral caching, a threaded executor and the command-line front end for
//! [`sectorial_core`].

pub mod cache;
pub mod cli;
pub mod error;
pub mod exec;
pub mod io;
pub mod opspec;
pub mod report;
pub mod selftest;

pub use error::CliError;
