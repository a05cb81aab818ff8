//! File formats, experiment tables and simulation runs built on
//! [`ifibf_core`].

mod error;

pub mod cases;
pub mod experiments;
pub mod formats;
pub mod montecarlo;
pub mod report;
pub mod simulate;

pub use error::{Error, Result};
