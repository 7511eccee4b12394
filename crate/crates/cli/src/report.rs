//! Serializable documents emitted by the subcommands.

use serde::Serialize;

use majfix_core::iteration::{Certification, CheckKind};
use majfix_core::majorant::GapWitness;
use majfix_core::{Interval, IterationTrace, StepRecord, TraceStatus, ViolationKind, ZoneReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalDoc {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub empty: bool,
}

impl From<&Interval> for IntervalDoc {
    fn from(i: &Interval) -> Self {
        IntervalDoc {
            lo: i.lo,
            hi: i.hi,
            lo_closed: i.lo_closed,
            hi_closed: i.hi_closed,
            empty: i.is_empty(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessDoc {
    pub min_gap: f64,
    pub argmin: f64,
}

impl From<&GapWitness> for WitnessDoc {
    fn from(w: &GapWitness) -> Self {
        WitnessDoc {
            min_gap: w.min_gap,
            argmin: w.argmin,
        }
    }
}

/// `a` against the critical offset `a_cr` of an m-linear problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalDoc {
    pub norm: f64,
    pub degree: usize,
    pub a: f64,
    pub a_cr: f64,
    pub below_critical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeDoc {
    pub kind: String,
    pub a: f64,
    pub radius: f64,
    pub r_lower: Option<f64>,
    pub r_star: Option<f64>,
    pub r_cr: Option<f64>,
    pub r_double_star: Option<f64>,
    pub r_double_star_closed: bool,
    pub r_double_star_degenerate: bool,
    pub e_zone: IntervalDoc,
    pub u_zone: IntervalDoc,
    pub bc_zone: IntervalDoc,
    pub existence_certified: bool,
    pub no_existence: Option<WitnessDoc>,
    pub critical: Option<CriticalDoc>,
}

impl AnalyzeDoc {
    pub fn new(kind: &str, r: &ZoneReport, critical: Option<CriticalDoc>) -> Self {
        AnalyzeDoc {
            kind: kind.to_string(),
            a: r.a,
            radius: r.radius,
            r_lower: r.r_lower,
            r_star: r.r_star,
            r_cr: r.r_cr,
            r_double_star: r.r_double_star,
            r_double_star_closed: r.r_double_star_closed,
            r_double_star_degenerate: r.r_double_star_degenerate,
            e_zone: (&r.e_zone).into(),
            u_zone: (&r.u_zone).into(),
            bc_zone: (&r.bc_zone).into(),
            existence_certified: r.existence_certified,
            no_existence: r.no_existence.as_ref().map(Into::into),
            critical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDoc {
    pub n: usize,
    pub step_norm: f64,
    pub r_n: f64,
    pub rho_n: f64,
    pub apriori_bound: f64,
    pub step_bound: f64,
}

impl From<&StepRecord> for StepDoc {
    fn from(s: &StepRecord) -> Self {
        StepDoc {
            n: s.n,
            step_norm: s.step_norm,
            r_n: s.r_n,
            rho_n: s.rho_n,
            apriori_bound: s.apriori_bound,
            step_bound: s.step_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationDoc {
    pub step: usize,
    pub kind: &'static str,
    pub observed: f64,
    pub bound: f64,
}

impl ViolationDoc {
    pub fn new(step: usize, kind: ViolationKind, observed: f64, bound: f64) -> Self {
        let kind = match kind {
            ViolationKind::StepBound => "step_bound",
            ViolationKind::BallEscape => "ball_escape",
        };
        ViolationDoc {
            step,
            kind,
            observed,
            bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationDoc {
    pub passed: bool,
    pub checks: usize,
    pub worst_slack: f64,
    pub first_failure: Option<String>,
}

impl From<&Certification> for CertificationDoc {
    fn from(c: &Certification) -> Self {
        CertificationDoc {
            passed: c.passed,
            checks: c.checks.len(),
            worst_slack: c.worst_slack,
            first_failure: c.first_failure.as_ref().map(|f| {
                let kind = match f.kind {
                    CheckKind::Step => "step",
                    CheckKind::Apriori => "apriori",
                };
                format!("{kind} check at n = {}: {} > {}", f.n, f.observed, f.bound)
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveDoc {
    pub kind: String,
    pub status: &'static str,
    pub r_star: Option<f64>,
    pub start_offset: f64,
    pub steps: Vec<StepDoc>,
    pub final_bound: Option<f64>,
    pub solution: Vec<f64>,
    pub solution_norm: Option<f64>,
    pub certification: Option<CertificationDoc>,
    pub violation: Option<ViolationDoc>,
    pub no_existence: Option<WitnessDoc>,
}

impl SolveDoc {
    pub fn from_trace(kind: &str, offset: f64, trace: &IterationTrace, solution_norm: f64) -> Self {
        let status = match trace.status {
            TraceStatus::Converged => "converged",
            TraceStatus::MaxSteps => "max_steps",
            TraceStatus::BoundViolated => "bound_violated",
        };
        SolveDoc {
            kind: kind.to_string(),
            status,
            r_star: Some(trace.r_star),
            start_offset: offset,
            steps: trace.steps.iter().map(Into::into).collect(),
            final_bound: Some(trace.final_bound),
            solution: trace.last().to_vec(),
            solution_norm: Some(solution_norm),
            certification: None,
            violation: None,
            no_existence: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareDoc {
    pub kind: String,
    pub r_star: Option<f64>,
    pub r_cr: Option<f64>,
    pub r_double_star: Option<f64>,
    pub bc_zone: IntervalDoc,
    pub u_zone: IntervalDoc,
    pub e_zone: IntervalDoc,
    pub banach_applicable: bool,
    pub majorization_strictly_wider: bool,
    pub zones_coincide: bool,
}
