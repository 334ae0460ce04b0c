//! Explicit adaptive integration, terminal-value shooting for autonomous
//! second-order schedule equations, and shape-preserving interpolation.

mod interp;
mod rk;
mod shoot;

pub use interp::MonotoneCubic;
pub use rk::{integrate_fixed, integrate_ivp, IvpOptions, IvpSolution};
pub use shoot::{shoot_terminal, ShootingProblem, ShootingResult};
