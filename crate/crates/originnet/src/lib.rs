//! File formats, parallel sweeps and the `originnet` command line on top of
//! [`originnet_core`].

pub mod cli;
pub mod error;
pub mod io;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
