use thiserror::Error;

use crate::iteration::IterationTrace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModulusError {
    #[error("modulus value {value} is negative or not finite")]
    Negative { value: f64 },
    #[error("power exponent {exponent} must be finite and nonnegative")]
    BadExponent { exponent: f64 },
    #[error("{abscissae} abscissae but {ordinates} ordinates")]
    LengthMismatch { abscissae: usize, ordinates: usize },
    #[error("a tabulated modulus needs at least two nodes, got {0}")]
    TooFewNodes(usize),
    #[error("tabulated modulus must start at r = 0, starts at {0}")]
    BadStart(f64),
    #[error("abscissae must increase strictly (violated at {at})")]
    AbscissaeNotIncreasing { at: f64 },
    #[error("modulus decreases at r = {at}")]
    Decreasing { at: f64 },
    #[error("exponent {exponent} outside the admissible range [{min}, {max}]")]
    ExponentRange { exponent: f64, min: f64, max: f64 },
    #[error("empty candidate set")]
    EmptyPairs,
    #[error("invalid exponent parameters: {0}")]
    BadParameters(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MajorantError {
    #[error("offset a = {0} must be finite and nonnegative")]
    BadOffset(f64),
    #[error("radius R = {0} must be finite and positive")]
    BadRadius(f64),
    #[error("tabulated modulus ends at {table_end}, before the radius {radius}")]
    ModulusTooShort { table_end: f64, radius: f64 },
    #[error("r = {r} lies outside [0, {radius}]")]
    Domain { r: f64, radius: f64 },
    #[error("tolerance {0} must be positive")]
    BadTolerance(f64),
    #[error("a_+(r) > r on all of [0, R]: minimum gap {min_gap} at r = {argmin}")]
    NoExistence { min_gap: f64, argmin: f64 },
    #[error("a_-(r) = r has no root in [0, R]")]
    NoLowerRoot,
    #[error("{0} is not a fixed point of a_+ in [0, R]")]
    InvalidRStar(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("interval [{a}, {b}] is empty or not finite")]
    BadInterval { a: f64, b: f64 },
    #[error("{rule} rule cannot use {n} nodes")]
    BadNodeCount { rule: &'static str, n: usize },
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("norm exponent p = {0} must be at least 1")]
    BadExponent(f64),
    #[error("kernel table entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("kernel csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZooError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degree m = {0} must be at least 2")]
    Degree(usize),
    #[error("kernel table does not match the solve grid")]
    GridMismatch,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Modulus(#[from] ModulusError),
    #[error(transparent)]
    Majorant(#[from] MajorantError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Why an observed iterate broke a certified bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `|xi_{n+1} - xi_n| > rho_{n+1} + rho_n - 2 r_n`
    StepBound,
    /// `|xi_{n+1} - x0| > rho_{n+1}`
    BallEscape,
}

#[derive(Debug, Clone, Error)]
pub enum IterationError {
    #[error("start at distance {rho0} is outside B[x0, r*] and the uniqueness annulus")]
    InadmissibleStart { rho0: f64 },
    #[error(transparent)]
    Majorant(#[from] MajorantError),
    #[error("step {step}: observed {observed} exceeds bound {bound} ({kind:?}); the modulus is not valid for this operator")]
    BoundViolation {
        step: usize,
        kind: ViolationKind,
        observed: f64,
        bound: f64,
        trace: Box<IterationTrace>,
    },
    #[error("state has dimension {got}, operator expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid stopping rule: {0}")]
    Rule(String),
    #[error("supplied offset a = {supplied} is below |Ax0 - x0| = {computed}")]
    InconsistentOffset { supplied: f64, computed: f64 },
}
