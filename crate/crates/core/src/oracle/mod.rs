//! Reference evaluators that share no code path with the engine.

mod highprec;
mod montecarlo;

pub use highprec::{newton_highprec, newton_highprec_ext, Extended};
pub use montecarlo::{hg_monte_carlo, simplex_sample, Estimate};
