//! Divided differences of the exponential function.
//!
//! * [`ddcore`]: stable evaluation of `e^{t[x_0..x_q]}` over real multisets,
//!   including confluent nodes, plus incremental tables.
//! * [`oracle`]: independent reference evaluators (Hermite–Genocchi Monte
//!   Carlo, extended-precision confluent Newton tables).
//! * [`bounds`]: mean/variance sandwich bounds, incomplete gamma, large-`n`
//!   asymptotics.
//! * [`inequalities`]: log-submodularity, supermodularity and the four-point
//!   inequality as computable margins.
//! * [`identities`]: residual evaluators for closed-form identities.

pub mod bounds;
pub mod ddcore;
mod error;
pub mod identities;
pub mod inequalities;
mod nodes;
pub mod oracle;
mod scaled;

pub use ddcore::{
    dd_append, dd_exp, dd_exp_factorial, dd_exp_flat, dd_exp_prefixes, shift_normalize, DDTable,
};
pub use error::{DdError, Result};
pub use nodes::NodeMultiset;
pub use scaled::ScaledValue;
