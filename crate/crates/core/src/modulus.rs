//! Radius-dependent Lipschitz moduli `k(r)`.
//!
//! An operator `A` on the ball `B[x0, R]` satisfies a variable Lipschitz
//! condition with modulus `k` when `|Ax1 - Ax2| <= k(r) |x1 - x2|` for all
//! `x1, x2` within distance `r` of the center. Every modulus here is
//! nonnegative and nondecreasing; constructors reject anything else, since
//! the critical radius and the majorant analysis depend on monotonicity.
//!
//! Each variant carries its exact primitive `K(r) = int_0^r k(t) dt`, so the
//! scalar root finders never see quadrature noise.

use crate::error::ModulusError;

/// One term `coefficient * r^exponent` of a power-sum modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

impl PowerTerm {
    pub fn new(coefficient: f64, exponent: f64) -> Self {
        PowerTerm { coefficient, exponent }
    }

    fn eval(&self, r: f64) -> f64 {
        if self.coefficient == 0.0 {
            return 0.0;
        }
        self.coefficient * r.powf(self.exponent)
    }

    fn primitive(&self, r: f64) -> f64 {
        if self.coefficient == 0.0 {
            return 0.0;
        }
        let e = self.exponent + 1.0;
        self.coefficient * r.powf(e) / e
    }
}

/// Piecewise-linear modulus through `(t_i, y_i)`, flat beyond the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    abscissae: Vec<f64>,
    ordinates: Vec<f64>,
    // cumulative integral at each node
    cumulative: Vec<f64>,
}

impl Tabulated {
    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    /// Largest abscissa; the modulus is defined on `[0, end()]`.
    pub fn end(&self) -> f64 {
        *self.abscissae.last().expect("nonempty table")
    }

    fn segment(&self, r: f64) -> usize {
        // index i with t_i <= r < t_{i+1}
        match self
            .abscissae
            .binary_search_by(|t| t.partial_cmp(&r).expect("finite abscissae"))
        {
            Ok(i) => i.min(self.abscissae.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.abscissae.len() - 2),
        }
    }

    fn eval(&self, r: f64) -> f64 {
        if r >= self.end() {
            return *self.ordinates.last().unwrap();
        }
        let i = self.segment(r);
        let (t0, t1) = (self.abscissae[i], self.abscissae[i + 1]);
        let (y0, y1) = (self.ordinates[i], self.ordinates[i + 1]);
        y0 + (y1 - y0) * (r - t0) / (t1 - t0)
    }

    fn primitive(&self, r: f64) -> f64 {
        let last = self.abscissae.len() - 1;
        if r >= self.end() {
            return self.cumulative[last] + self.ordinates[last] * (r - self.end());
        }
        let i = self.segment(r);
        let (t0, t1) = (self.abscissae[i], self.abscissae[i + 1]);
        let (y0, y1) = (self.ordinates[i], self.ordinates[i + 1]);
        let d = r - t0;
        let slope = (y1 - y0) / (t1 - t0);
        self.cumulative[i] + y0 * d + 0.5 * slope * d * d
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Constant(f64),
    PowerSum(Vec<PowerTerm>),
    Tabulated(Tabulated),
}

/// A validated nonnegative, nondecreasing modulus `k(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzModulus {
    repr: Repr,
}

/// Borrowed view of the modulus representation.
#[derive(Debug, Clone, Copy)]
pub enum ModulusKind<'a> {
    Constant(f64),
    PowerSum(&'a [PowerTerm]),
    Tabulated(&'a Tabulated),
}

impl LipschitzModulus {
    /// Classical contraction constant `k(r) = q`.
    pub fn constant(q: f64) -> Result<Self, ModulusError> {
        if !q.is_finite() || q < 0.0 {
            return Err(ModulusError::Negative { value: q });
        }
        Ok(LipschitzModulus {
            repr: Repr::Constant(q),
        })
    }

    /// `k(r) = sum_i c_i r^{p_i}` with `c_i >= 0`, `p_i >= 0`.
    pub fn power_sum(terms: Vec<PowerTerm>) -> Result<Self, ModulusError> {
        for term in &terms {
            if !term.coefficient.is_finite() || term.coefficient < 0.0 {
                return Err(ModulusError::Negative {
                    value: term.coefficient,
                });
            }
            if !term.exponent.is_finite() || term.exponent < 0.0 {
                return Err(ModulusError::BadExponent {
                    exponent: term.exponent,
                });
            }
        }
        Ok(LipschitzModulus {
            repr: Repr::PowerSum(terms),
        })
    }

    /// Linear interpolation through `(abscissae[i], ordinates[i])`.
    ///
    /// Abscissae must start at 0 and increase strictly; ordinates must be
    /// nonnegative and nondecreasing.
    pub fn tabulated(abscissae: Vec<f64>, ordinates: Vec<f64>) -> Result<Self, ModulusError> {
        if abscissae.len() != ordinates.len() {
            return Err(ModulusError::LengthMismatch {
                abscissae: abscissae.len(),
                ordinates: ordinates.len(),
            });
        }
        if abscissae.len() < 2 {
            return Err(ModulusError::TooFewNodes(abscissae.len()));
        }
        if abscissae[0] != 0.0 {
            return Err(ModulusError::BadStart(abscissae[0]));
        }
        for w in abscissae.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(ModulusError::AbscissaeNotIncreasing { at: w[1] });
            }
        }
        for (i, y) in ordinates.iter().enumerate() {
            if !y.is_finite() || *y < 0.0 {
                return Err(ModulusError::Negative { value: *y });
            }
            if i > 0 && *y < ordinates[i - 1] {
                return Err(ModulusError::Decreasing { at: abscissae[i] });
            }
        }
        let mut cumulative = Vec::with_capacity(abscissae.len());
        cumulative.push(0.0);
        for i in 1..abscissae.len() {
            let h = abscissae[i] - abscissae[i - 1];
            let prev = cumulative[i - 1];
            cumulative.push(prev + 0.5 * h * (ordinates[i] + ordinates[i - 1]));
        }
        Ok(LipschitzModulus {
            repr: Repr::Tabulated(Tabulated {
                abscissae,
                ordinates,
                cumulative,
            }),
        })
    }

    /// Tabulates `f` on `nodes` (which must start at 0), rejecting samples
    /// that decrease. Used for moduli that only exist through quadrature.
    pub fn sampled<F>(nodes: Vec<f64>, f: F) -> Result<Self, ModulusError>
    where
        F: Fn(f64) -> f64,
    {
        let ordinates: Vec<f64> = nodes.iter().map(|&r| f(r)).collect();
        if let Some(first) = ordinates.first() {
            if ordinates.iter().all(|y| y == first) {
                return Self::constant(*first);
            }
        }
        Self::tabulated(nodes, ordinates)
    }

    /// Tabulates a nondecreasing `f` from above.
    ///
    /// Midpoints of all segments are probed: when none rises above its chord
    /// (as for convex or linear `f`) the plain interpolant is kept. Otherwise
    /// each node carries the sample at the next node, which dominates any
    /// nondecreasing `f` at the cost of one node of lag. Decreases within
    /// rounding (relative `1e-12`) are flattened; larger ones are rejected.
    pub fn sampled_upper<F>(nodes: Vec<f64>, f: F) -> Result<Self, ModulusError>
    where
        F: Fn(f64) -> f64,
    {
        let round = |v: f64| 1e-12 * v.abs().max(1.0);
        let mut values: Vec<f64> = nodes.iter().map(|&r| f(r)).collect();
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(ModulusError::Negative { value: *v });
        }
        for i in 1..values.len() {
            let prev = values[i - 1];
            if values[i] < prev - round(prev) {
                return Err(ModulusError::Decreasing { at: nodes[i] });
            }
            values[i] = values[i].max(prev);
        }
        let below_chords = nodes.windows(2).zip(values.windows(2)).all(|(r, v)| {
            let mid = f(0.5 * (r[0] + r[1]));
            mid.is_finite() && mid <= 0.5 * (v[0] + v[1]) + round(v[1])
        });
        let ordinates: Vec<f64> = if below_chords {
            values
        } else {
            (0..values.len())
                .map(|i| values[(i + 1).min(values.len() - 1)])
                .collect()
        };
        if let Some(first) = ordinates.first() {
            if ordinates.iter().all(|y| y == first) {
                return Self::constant(*first);
            }
        }
        Self::tabulated(nodes, ordinates)
    }

    /// `sum_j weight_j * k_j(r)`.
    ///
    /// Constant and power-sum inputs combine exactly into a power sum; any
    /// tabulated input forces a tabulated result on the union of breakpoints
    /// plus `extra_nodes` uniform nodes on `[0, radius]`.
    pub fn weighted_sum(
        parts: &[(f64, &LipschitzModulus)],
        radius: f64,
        extra_nodes: usize,
    ) -> Result<Self, ModulusError> {
        for (w, _) in parts {
            if !w.is_finite() || *w < 0.0 {
                return Err(ModulusError::Negative { value: *w });
            }
        }
        let any_table = parts
            .iter()
            .any(|(_, m)| matches!(m.repr, Repr::Tabulated(_)));
        if !any_table {
            let mut terms = Vec::new();
            for (w, m) in parts {
                match &m.repr {
                    Repr::Constant(q) => terms.push(PowerTerm::new(w * q, 0.0)),
                    Repr::PowerSum(ts) => terms.extend(
                        ts.iter()
                            .map(|t| PowerTerm::new(w * t.coefficient, t.exponent)),
                    ),
                    Repr::Tabulated(_) => unreachable!(),
                }
            }
            let terms: Vec<PowerTerm> = terms.into_iter().filter(|t| t.coefficient != 0.0).collect();
            if terms.iter().all(|t| t.exponent == 0.0) {
                return Self::constant(terms.iter().map(|t| t.coefficient).sum());
            }
            return Self::power_sum(terms);
        }
        let mut nodes = uniform_nodes(radius, extra_nodes.max(2));
        for (_, m) in parts {
            if let Repr::Tabulated(t) = &m.repr {
                nodes.extend(t.abscissae.iter().copied().filter(|&x| x <= radius));
            }
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.dedup();
        Self::sampled(nodes, |r| parts.iter().map(|(w, m)| w * m.eval(r)).sum())
    }

    pub fn kind(&self) -> ModulusKind<'_> {
        match &self.repr {
            Repr::Constant(q) => ModulusKind::Constant(*q),
            Repr::PowerSum(t) => ModulusKind::PowerSum(t),
            Repr::Tabulated(t) => ModulusKind::Tabulated(t),
        }
    }

    /// The radius up to which the modulus is defined, if bounded.
    pub fn domain_end(&self) -> Option<f64> {
        match &self.repr {
            Repr::Tabulated(t) => Some(t.end()),
            _ => None,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.repr {
            Repr::Constant(q) => *q,
            Repr::PowerSum(terms) => terms.iter().map(|t| t.eval(r)).sum(),
            Repr::Tabulated(t) => t.eval(r),
        }
    }

    /// Exact primitive `K(r) = int_0^r k(t) dt`.
    pub fn primitive(&self, r: f64) -> f64 {
        match &self.repr {
            Repr::Constant(q) => q * r,
            Repr::PowerSum(terms) => terms.iter().map(|t| t.primitive(r)).sum(),
            Repr::Tabulated(t) => t.primitive(r),
        }
    }

    /// Smallest `r` in `[0, radius]` with `k(r) >= level`, if any.
    pub fn first_reaching(&self, level: f64, radius: f64) -> Option<f64> {
        if self.eval(radius) < level {
            return None;
        }
        if self.eval(0.0) >= level {
            return Some(0.0);
        }
        if let Repr::Tabulated(t) = &self.repr {
            // exact crossing on the first segment that reaches the level
            for i in 1..t.abscissae.len() {
                if t.ordinates[i] >= level {
                    let (t0, t1) = (t.abscissae[i - 1], t.abscissae[i]);
                    let (y0, y1) = (t.ordinates[i - 1], t.ordinates[i]);
                    let r = t0 + (level - y0) * (t1 - t0) / (y1 - y0);
                    return Some(r.min(radius));
                }
            }
        }
        let (mut lo, mut hi) = (0.0_f64, radius);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) >= level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

/// `count` equally spaced nodes on `[0, radius]`, endpoints exact.
pub fn uniform_nodes(radius: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let last = count - 1;
    (0..count)
        .map(|i| {
            if i == last {
                radius
            } else {
                radius * i as f64 / last as f64
            }
        })
        .collect()
}
