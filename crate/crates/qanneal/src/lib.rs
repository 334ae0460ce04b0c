//! Control schedules for driving quantum critical points in finite time and
//! the exact dynamics used to score them.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod manybody;
pub mod models;
pub mod optimize;
pub mod ode;
pub mod schedules;
pub mod specfun;

pub use error::{Error, Result};
