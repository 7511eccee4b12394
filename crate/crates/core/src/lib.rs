//! Majorant-based fixed-point certification.
//!
//! For an operator `A` satisfying `|Ax1 - Ax2| <= k(r) |x1 - x2|` on balls of
//! radius `r` around a center `x0`, the scalar majorants
//! `a_+-(r) = a +- int_0^r k` with `a = |Ax0 - x0|` locate the fixed point in
//! a ring `r_* <= |x* - x0| <= r*`, certify uniqueness up to `r**`, and bound
//! the error of every successive approximation.
//!
//! * [`modulus`]: the moduli `k(r)` and their exact primitives.
//! * [`majorant`]: radii `r_*`, `r*`, `r**`, `r_cr` and the zone report.
//! * [`iteration`]: certified successive approximations on concrete operators.
//! * [`discretize`]: grids, quadrature, discrete norms, Zaanen-norm estimates.
//! * [`zoo`]: multilinear, Hammerstein, Urysohn and composition operators.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discretize;
pub mod error;
pub mod iteration;
pub mod majorant;
pub mod modulus;
pub mod zoo;

pub use error::{GridError, IterationError, MajorantError, ModulusError, ViolationKind, ZooError};
pub use iteration::{
    certify_trace, check_admissible_start, iterate, Certification, IterationTrace, OperatorHandle,
    StateNorm, StepRecord, StoppingRule, TraceStatus,
};
pub use majorant::{
    analyze, eval_majorants, find_r_cr, find_r_double_star, find_r_lower_star, find_r_star,
    scalar_sequence, Interval, MajorantProfile, ZoneReport,
};
pub use modulus::{LipschitzModulus, PowerTerm};
