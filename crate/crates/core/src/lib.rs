//! Monotone submodular multiple knapsack (SMKP) solver.
//!
//! The pipeline enumerates small partial assignments, reduces the rest of each instance to
//! leveled blocks of bins, relaxes those blocks into a two-constraint-per-block polytope,
//! runs continuous greedy on the multilinear extension and rounds the fractional point back
//! into bins. Exact and greedy solvers are included for comparison.

pub mod baseline;
pub mod block;
pub mod checks;
pub mod error;
pub mod exact;
pub mod generate;
pub mod greedy;
pub mod instance;
pub mod io;
pub mod multilinear;
pub mod numeric;
pub mod oracle;
pub mod pipeline;
pub mod rounding;
pub mod structuring;

pub use error::{Result, SmkpError};
pub use instance::{Assignment, Bin, Item, RestrictedInstance, SmkpInstance};
pub use oracle::{LiftedOracle, ObjectiveKind, ObjectiveOracle, ResidualOracle, SetFunction};
