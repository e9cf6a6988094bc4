//! Optimal M-type approximation of discrete probability distributions.
//!
//! An M-type distribution has every mass equal to `c_i / M` for nonnegative
//! integers `c_i` summing to `M`. This crate finds the M-type approximation of
//! a target `t` that minimizes one of
//!
//! - variational distance `‖p - t‖₁`,
//! - `D(p‖t)` or `D(t‖p)` (natural log),
//! - `χ²(p‖t)` or `χ²(t‖p)`,
//!
//! all through the same greedy allocator ([`greedy`]). Around it sit the
//! reverse I-projection onto `{p : p_i ≥ 1/M}` with the resulting error bounds
//! ([`projection`]), row-wise quantization of Markov transition matrices
//! ([`markov`]) and an exhaustive oracle for small instances ([`oracle`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below are what most callers want.
//!
//! ```
//! use mtype::{quantize, CostKind, Target64};
//!
//! let t = Target64::new(vec![0.719, 0.145, 0.088, 0.048], false).unwrap();
//! let p = quantize(&t, 50, CostKind::KlTargetFirst).unwrap();
//! assert_eq!(p.counts(), &[37, 7, 4, 2]);
//! ```

pub mod cost;
pub mod error;
pub mod greedy;
pub mod markov;
pub mod oracle;
pub mod projection;
pub mod scalar;
pub mod types;

pub use cost::{delta, evaluate, evaluate_counts, kl_divergence, prealloc, quantize, CostInstance};
pub use error::{Error, Result};
pub use greedy::{greedy_allocate, selection_trace, AllocationResult, DeltaSource, DeltaTable, TraceStep};
pub use markov::{
    divergence_rate, graph_preserved, quantize_markov, stationary_distribution, MarkovModel,
    QuantizedMarkov,
};
pub use oracle::{agreement_suite, brute_force, AgreementReport, OracleResult};
pub use projection::{
    bound_report, bound_sweep, log_nu_check, projection_bound, pythagorean_check,
    reverse_i_projection, reverse_pinsker_check, vd_bound, BoundReport, ProjectionResult, Sides,
    VdBound,
};
pub use scalar::Scalar;
pub use types::{entropy, validate_target, CostKind, MTypeApprox, Preallocation, TargetDistribution};

pub type Target64 = TargetDistribution<f64>;
pub type Target32 = TargetDistribution<f32>;
pub type Markov64 = MarkovModel<f64>;
pub type Markov32 = MarkovModel<f32>;
pub type Projection64 = ProjectionResult<f64>;
pub type Projection32 = ProjectionResult<f32>;
pub type BoundReport64 = BoundReport<f64>;
pub type Allocation64 = AllocationResult<f64>;
pub type Oracle64 = OracleResult<f64>;
