//! Filter-bank task-related component analysis for decoding movement intention
//! from pre-movement EEG epochs.

pub mod classify;
pub mod data;
pub mod error;
pub mod featsel;
pub mod filterbank;
pub mod onset;
pub mod pipeline;
pub mod strca;
pub mod synth;

pub use error::{Error, Result};
