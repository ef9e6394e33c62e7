//! Performance analysis of a cascaded multiwire power-line / multiple-LED
//! visible-light link joined by a decode-and-forward relay.

pub mod cascade;
pub mod cli;
pub mod error;
pub mod mc;
mod optim;
pub mod plc;
pub mod rng;
pub mod specfun;
pub mod vlc;

pub use error::{Error, Result};
