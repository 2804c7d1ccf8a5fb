//! Energy-efficiency maximizing hybrid precoding for multi-user mmWave downlinks.
//!
//! The crate is organized around the processing chain of one experiment:
//!
//! - [`model`]: shared domain types, SINR / rate / power / energy-efficiency
//!   evaluation and feasibility checks.
//! - [`channel`]: seeded Saleh-Valenzuela channel generation with a planar
//!   transmit array and ABG path loss.
//! - [`qcqp`]: small dense convex QCQP solver used for the precoder subproblems.
//! - [`wsrp`]: the reweighted weighted-MMSE solver for the subtractive
//!   rate-minus-priced-power problem at a fixed energy price.
//! - [`dinkelbach`]: the outer fractional-programming loop that maximizes the
//!   system energy efficiency.
//! - [`baselines`]: fully-digital upper bound, hybrid reconstruction from a
//!   digital precoder, and the greedy switch-off heuristic.
//! - [`harness`]: configuration parsing, seeded Monte-Carlo sweeps and CSV output.
//! - [`oracles`]: brute-force reference computations used to cross-check the solvers.
//!
//! All powers are carried in mW. Rates are in nats/s/Hz and energy
//! efficiencies in nats/Hz/W unless a name says otherwise.

pub mod baselines;
pub mod channel;
pub mod dinkelbach;
mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod oracles;
pub mod qcqp;
pub mod wsrp;

pub use error::{Error, Result};
pub use model::{
    ChannelMatrix, HybridPrecoder, MappingMatrix, PowerParams, SystemDims, Tolerances,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;
