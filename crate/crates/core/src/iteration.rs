//! Successive approximations `xi_{n+1} = A xi_n` run in lockstep with the
//! scalar majorant sequences
//!
//! ```text
//! r_{n+1}   = a_+(r_n),    r_0   = 0
//! rho_{n+1} = a_+(rho_n),  rho_0 = |xi_0 - x0|
//! ```
//!
//! which yield the certified bounds
//!
//! ```text
//! |x* - xi_n|         <= r* + rho_n - 2 r_n
//! |xi_{n+1} - xi_n|   <= rho_{n+1} + rho_n - 2 r_n
//! ```
//!
//! Iteration stops once the first bound drops below the requested tolerance,
//! which is computable without knowing `x*`. An observed step larger than its
//! bound means the supplied modulus does not majorize the operator.

use std::fmt;
use std::sync::Arc;

use crate::error::{IterationError, MajorantError, ViolationKind};
use crate::majorant::{analyze, MajorantProfile, ZoneReport, DEFAULT_TOL};
use crate::modulus::LipschitzModulus;

/// Relative slack applied to every certified bound.
pub const REL_SLACK: f64 = 1e-9;
/// Absolute slack applied to every certified bound.
pub const ABS_SLACK: f64 = 1e-12;

/// `observed <= bound` up to floating-point slack.
pub fn within_bound(observed: f64, bound: f64) -> bool {
    observed <= bound + REL_SLACK * bound.abs() + ABS_SLACK
}

/// Norm of the ambient space, evaluated on finite-dimensional states.
#[derive(Debug, Clone, PartialEq)]
pub enum StateNorm {
    /// Euclidean norm; the absolute value in one dimension.
    Euclidean,
    /// Maximum modulus over components (sup norm on grid samples).
    Max,
    /// `(sum_i w_i |x_i|^p)^{1/p}`, a quadrature surrogate of the L_p norm.
    WeightedLp { weights: Vec<f64>, p: f64 },
}

impl StateNorm {
    pub fn norm(&self, x: &[f64]) -> f64 {
        match self {
            StateNorm::Euclidean => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            StateNorm::Max => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            StateNorm::WeightedLp { weights, p } => weights
                .iter()
                .zip(x)
                .map(|(w, v)| w * v.abs().powf(*p))
                .sum::<f64>()
                .powf(1.0 / p),
        }
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.norm(&d)
    }

    /// A vector of norm one with all components equal and positive.
    pub fn unit_constant(&self, dim: usize) -> Vec<f64> {
        let ones = vec![1.0; dim];
        let n = self.norm(&ones);
        ones.into_iter().map(|v| v / n).collect()
    }
}

pub type ApplyFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A concrete operator `A` on `B[x0, R]` with its majorant profile.
#[derive(Clone)]
pub struct OperatorHandle {
    apply: ApplyFn,
    center: Vec<f64>,
    norm: StateNorm,
    profile: MajorantProfile,
}

impl fmt::Debug for OperatorHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorHandle")
            .field("dim", &self.center.len())
            .field("norm", &self.norm)
            .field("profile", &self.profile)
            .finish()
    }
}

impl OperatorHandle {
    /// Builds a handle. When `a` is `None` it is derived as `|A x0 - x0|`;
    /// a supplied `a` may not undercut that value.
    pub fn new(
        apply: ApplyFn,
        center: Vec<f64>,
        norm: StateNorm,
        modulus: LipschitzModulus,
        radius: f64,
        a: Option<f64>,
    ) -> Result<Self, IterationError> {
        let image = apply(&center);
        if image.len() != center.len() {
            return Err(IterationError::Dimension {
                expected: center.len(),
                got: image.len(),
            });
        }
        let computed = norm.distance(&image, &center);
        let a = match a {
            None => computed,
            Some(s) if within_bound(computed, s) => s,
            Some(s) => {
                return Err(IterationError::InconsistentOffset {
                    supplied: s,
                    computed,
                })
            }
        };
        let profile = MajorantProfile::new(a, modulus, radius)?;
        Ok(OperatorHandle {
            apply,
            center,
            norm,
            profile,
        })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.apply)(x)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn norm(&self) -> &StateNorm {
        &self.norm
    }

    pub fn profile(&self) -> &MajorantProfile {
        &self.profile
    }

    /// The same operator with its modulus replaced.
    pub fn with_modulus(&self, modulus: LipschitzModulus) -> Result<Self, MajorantError> {
        Ok(OperatorHandle {
            profile: MajorantProfile::new(self.profile.a(), modulus, self.profile.radius())?,
            ..self.clone()
        })
    }

    /// The same operator re-centered at `center`; `a` is re-derived.
    pub fn with_center(&self, center: Vec<f64>) -> Result<Self, IterationError> {
        if center.len() != self.center.len() {
            return Err(IterationError::Dimension {
                expected: self.center.len(),
                got: center.len(),
            });
        }
        Self::new(
            self.apply.clone(),
            center,
            self.norm.clone(),
            self.profile.modulus().clone(),
            self.profile.radius(),
            None,
        )
    }

    /// `x0 + offset * u` with `u` the positive constant unit vector.
    pub fn start_at_offset(&self, offset: f64) -> Vec<f64> {
        let u = self.norm.unit_constant(self.dim());
        self.center.iter().zip(u).map(|(c, v)| c + offset * v).collect()
    }
}

/// When to stop iterating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    pub bound_tol: f64,
    pub max_steps: usize,
}

impl StoppingRule {
    pub fn new(bound_tol: f64, max_steps: usize) -> Result<Self, IterationError> {
        if !(bound_tol > 0.0) || !bound_tol.is_finite() {
            return Err(IterationError::Rule(format!("bound_tol {bound_tol} must be positive")));
        }
        if max_steps < 1 {
            return Err(IterationError::Rule("max_steps must be at least 1".into()));
        }
        Ok(StoppingRule {
            bound_tol,
            max_steps,
        })
    }
}

/// One step `xi_n -> xi_{n+1}` with the scalar sequences and bounds at `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    /// `|xi_{n+1} - xi_n|`
    pub step_norm: f64,
    pub r_n: f64,
    pub rho_n: f64,
    pub r_next: f64,
    pub rho_next: f64,
    /// `r* + rho_n - 2 r_n`, bound on `|x* - xi_n|`
    pub apriori_bound: f64,
    /// `rho_{n+1} + rho_n - 2 r_n`, bound on `step_norm`
    pub step_bound: f64,
    /// `r* - r_n`, bound on `|x* - x_n|` for the iteration started at `x0`
    pub center_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStatus {
    Converged,
    MaxSteps,
    BoundViolated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub r_star: f64,
    pub steps: Vec<StepRecord>,
    /// `xi_0, ..., xi_N`
    pub iterates: Vec<Vec<f64>>,
    pub final_r: f64,
    pub final_rho: f64,
    /// `r* + rho_N - 2 r_N` for the returned iterate.
    pub final_bound: f64,
    pub status: TraceStatus,
}

impl IterationTrace {
    pub fn last(&self) -> &[f64] {
        self.iterates.last().expect("trace holds xi_0")
    }
}

/// Can iteration start at distance `rho0` from the center?
///
/// Admissible starts lie in `B[x0, r*]` or in the uniqueness annulus, whose
/// outer sphere belongs to it only when `r**` is closed.
pub fn check_admissible_start(report: &ZoneReport, rho0: f64) -> bool {
    let (Some(r_star), Some(r2)) = (report.r_star, report.r_double_star) else {
        return false;
    };
    if !(rho0 >= 0.0) {
        return false;
    }
    if rho0 <= r_star {
        return true;
    }
    if report.r_double_star_closed {
        rho0 <= r2
    } else {
        rho0 < r2
    }
}

/// Runs the certified successive approximations from `xi0`.
pub fn iterate(
    op: &OperatorHandle,
    xi0: &[f64],
    rule: StoppingRule,
) -> Result<(Vec<f64>, IterationTrace), IterationError> {
    if xi0.len() != op.dim() {
        return Err(IterationError::Dimension {
            expected: op.dim(),
            got: xi0.len(),
        });
    }
    let profile = op.profile();
    let report = analyze(profile, DEFAULT_TOL)?;
    report.require_existence()?;
    let r_star = report.r_star.expect("certified report has r*");
    let rho0 = op.norm.distance(xi0, &op.center);
    if !check_admissible_start(&report, rho0) {
        return Err(IterationError::InadmissibleStart { rho0 });
    }

    let mut trace = IterationTrace {
        r_star,
        steps: Vec::new(),
        iterates: vec![xi0.to_vec()],
        final_r: 0.0,
        final_rho: rho0,
        final_bound: r_star + rho0,
        status: TraceStatus::MaxSteps,
    };
    let mut xi = xi0.to_vec();
    let (mut r, mut rho) = (0.0_f64, rho0);
    for n in 0.. {
        let bound = (r_star + rho - 2.0 * r).max(0.0);
        trace.final_r = r;
        trace.final_rho = rho;
        trace.final_bound = bound;
        if bound <= rule.bound_tol {
            trace.status = TraceStatus::Converged;
            break;
        }
        if n == rule.max_steps {
            trace.status = TraceStatus::MaxSteps;
            break;
        }
        let next = op.apply(&xi);
        let step_norm = op.norm.distance(&next, &xi);
        let r_next = profile.a_plus(r);
        let rho_next = profile.a_plus(rho);
        let step_bound = rho_next + rho - 2.0 * r;
        trace.steps.push(StepRecord {
            n,
            step_norm,
            r_n: r,
            rho_n: rho,
            r_next,
            rho_next,
            apriori_bound: bound,
            step_bound,
            center_bound: r_star - r,
        });
        let escape = op.norm.distance(&next, &op.center);
        trace.iterates.push(next.clone());
        let violation = if !within_bound(step_norm, step_bound) {
            Some((ViolationKind::StepBound, step_norm, step_bound))
        } else if !within_bound(escape, rho_next) {
            Some((ViolationKind::BallEscape, escape, rho_next))
        } else {
            None
        };
        if let Some((kind, observed, bound)) = violation {
            trace.status = TraceStatus::BoundViolated;
            trace.final_r = r_next;
            trace.final_rho = rho_next;
            trace.final_bound = r_star + rho_next - 2.0 * r_next;
            return Err(IterationError::BoundViolation {
                step: n,
                kind,
                observed,
                bound,
                trace: Box::new(trace),
            });
        }
        xi = next;
        r = r_next;
        rho = rho_next;
    }
    Ok((xi, trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// `|xi_{n+1} - xi_n| <= rho_{n+1} + rho_n - 2 r_n`
    Step,
    /// `|x_ref - xi_n| <= r* + rho_n - 2 r_n`
    Apriori,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub n: usize,
    pub kind: CheckKind,
    pub observed: f64,
    pub bound: f64,
    pub passed: bool,
}

impl BoundCheck {
    fn new(n: usize, kind: CheckKind, observed: f64, bound: f64) -> Self {
        BoundCheck {
            n,
            kind,
            observed,
            bound,
            passed: within_bound(observed, bound),
        }
    }

    /// `observed - bound`; positive when the bound is exceeded.
    pub fn slack(&self) -> f64 {
        self.observed - self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub checks: Vec<BoundCheck>,
    pub passed: bool,
    /// Largest `observed - bound` over all checks.
    pub worst_slack: f64,
    pub first_failure: Option<BoundCheck>,
}

/// Re-checks every bound recorded in `trace`, and against `x_ref` when given.
pub fn certify_trace(trace: &IterationTrace, x_ref: Option<&[f64]>, norm: &StateNorm) -> Certification {
    let mut checks = Vec::new();
    for s in &trace.steps {
        let step_bound = s.rho_next + s.rho_n - 2.0 * s.r_n;
        checks.push(BoundCheck::new(s.n, CheckKind::Step, s.step_norm, step_bound));
    }
    if let Some(x_ref) = x_ref {
        for (n, xi) in trace.iterates.iter().enumerate() {
            let (r, rho) = match trace.steps.get(n) {
                Some(s) => (s.r_n, s.rho_n),
                None => (trace.final_r, trace.final_rho),
            };
            let bound = trace.r_star + rho - 2.0 * r;
            checks.push(BoundCheck::new(n, CheckKind::Apriori, norm.distance(x_ref, xi), bound));
        }
    }
    let worst_slack = checks
        .iter()
        .map(BoundCheck::slack)
        .fold(f64::NEG_INFINITY, f64::max);
    let first_failure = checks
        .iter()
        .filter(|c| !c.passed)
        .min_by_key(|c| c.n)
        .copied();
    Certification {
        passed: first_failure.is_none(),
        checks,
        worst_slack,
        first_failure,
    }
}
