//! Scalar analysis of the majorant functions `a_+(r) = a + K(r)` and
//! `a_-(r) = a - K(r)`.
//!
//! Because `k` is nondecreasing, the gap `g(r) = a_+(r) - r` is convex with
//! `g'(r) = k(r) - 1`. It decreases up to the critical radius `r_cr` (where
//! `k` first reaches 1) and increases after it. Every radius below is located
//! by bisection on a bracket on which `g` is monotone, so "smallest root" and
//! "supremum of the sublevel set" hold structurally, and the tangency case is
//! resolved at `r_cr` where it is well conditioned.

use crate::error::MajorantError;
use crate::modulus::LipschitzModulus;

/// Default tolerance for scalar radii.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 400;

/// `(a, k, R)`: offset `a = |Ax0 - x0|`, modulus and ball radius.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantProfile {
    a: f64,
    modulus: LipschitzModulus,
    radius: f64,
}

impl MajorantProfile {
    pub fn new(a: f64, modulus: LipschitzModulus, radius: f64) -> Result<Self, MajorantError> {
        if !a.is_finite() || a < 0.0 {
            return Err(MajorantError::BadOffset(a));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(MajorantError::BadRadius(radius));
        }
        if let Some(end) = modulus.domain_end() {
            if end < radius {
                return Err(MajorantError::ModulusTooShort {
                    table_end: end,
                    radius,
                });
            }
        }
        Ok(MajorantProfile { a, modulus, radius })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn modulus(&self) -> &LipschitzModulus {
        &self.modulus
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Same modulus and radius with a different offset.
    pub fn with_offset(&self, a: f64) -> Result<Self, MajorantError> {
        Self::new(a, self.modulus.clone(), self.radius)
    }

    pub fn primitive(&self, r: f64) -> f64 {
        self.modulus.primitive(r)
    }

    /// `a_+(r)` without a domain check.
    pub fn a_plus(&self, r: f64) -> f64 {
        self.a + self.modulus.primitive(r)
    }

    /// `a_-(r)` without a domain check.
    pub fn a_minus(&self, r: f64) -> f64 {
        self.a - self.modulus.primitive(r)
    }

    fn gap(&self, r: f64) -> f64 {
        self.a_plus(r) - r
    }

    // rounding level of g(r); below it the sign of g carries no information
    fn gap_noise(&self, r: f64) -> f64 {
        8.0 * f64::EPSILON * (self.a + self.modulus.primitive(r) + r)
    }

    fn check_domain(&self, r: f64) -> Result<(), MajorantError> {
        if !(0.0..=self.radius).contains(&r) {
            return Err(MajorantError::Domain {
                r,
                radius: self.radius,
            });
        }
        Ok(())
    }
}

fn check_tol(tol: f64) -> Result<(), MajorantError> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(MajorantError::BadTolerance(tol));
    }
    Ok(())
}

/// Bisection for the boundary of a monotone predicate on `[lo, hi]`:
/// `left(lo)` holds, `left(hi)` does not; returns the final right end.
fn bisect<P: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, tol: f64, left: P) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol * 0.1 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if left(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `(a_+(r), a_-(r))` for `r` in `[0, R]`.
pub fn eval_majorants(profile: &MajorantProfile, r: f64) -> Result<(f64, f64), MajorantError> {
    profile.check_domain(r)?;
    Ok((profile.a_plus(r), profile.a_minus(r)))
}

/// Smallest root of `k(r) >= 1` in `[0, R]`; `None` when `k(R) < 1`.
pub fn find_r_cr(profile: &MajorantProfile, tol: f64) -> Result<Option<f64>, MajorantError> {
    check_tol(tol)?;
    Ok(profile.modulus.first_reaching(1.0, profile.radius))
}

/// Where the convex gap attains its minimum over `[0, R]`.
fn gap_argmin(profile: &MajorantProfile) -> f64 {
    profile
        .modulus
        .first_reaching(1.0, profile.radius)
        .unwrap_or(profile.radius)
}

/// Smallest fixed point `r*` of `a_+` in `[0, R]`.
///
/// Fails with [`MajorantError::NoExistence`] carrying the minimum of
/// `a_+(r) - r` and its location when `a_+` stays above the bisectrix.
pub fn find_r_star(profile: &MajorantProfile, tol: f64) -> Result<f64, MajorantError> {
    check_tol(tol)?;
    if profile.a == 0.0 {
        return Ok(0.0);
    }
    let m = gap_argmin(profile);
    let g_min = profile.gap(m);
    if g_min.abs() <= profile.gap_noise(m) {
        // tangency: the minimum touches the bisectrix
        return Ok(m);
    }
    if g_min > 0.0 {
        return Err(MajorantError::NoExistence {
            min_gap: g_min,
            argmin: m,
        });
    }
    // g(0) = a > 0, g(m) < 0, g decreasing on [0, m]
    Ok(bisect(0.0, m, tol, |r| profile.gap(r) > 0.0))
}

/// Smallest fixed point `r_*` of `a_-`.
///
/// `a_-(r) - r` is strictly decreasing, so the root is unique and is
/// bracketed by `[0, min(a, R)]` whenever `a <= R`.
pub fn find_r_lower_star(profile: &MajorantProfile, tol: f64) -> Result<f64, MajorantError> {
    check_tol(tol)?;
    if profile.a == 0.0 {
        return Ok(0.0);
    }
    let hi = profile.a.min(profile.radius);
    let h = |r: f64| profile.a_minus(r) - r;
    if h(hi) > 0.0 {
        return Err(MajorantError::NoLowerRoot);
    }
    Ok(bisect(0.0, hi, tol, |r| h(r) > 0.0))
}

/// Result of the outer-radius search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterRadius {
    /// `r** = sup { r in (r*, R] : a_+(r) < r }`, or `r*` when that set is empty.
    pub r: f64,
    /// `a_+(R) < R`: the uniqueness annulus includes the sphere of radius `r**`.
    pub closed: bool,
    /// The sup set is empty (tangency); `r` was set to `r*`.
    pub degenerate: bool,
}

/// Locates `r**` given a previously computed `r*`.
pub fn find_r_double_star(
    profile: &MajorantProfile,
    r_star: f64,
    tol: f64,
) -> Result<OuterRadius, MajorantError> {
    check_tol(tol)?;
    if !(0.0..=profile.radius).contains(&r_star) {
        return Err(MajorantError::InvalidRStar(r_star));
    }
    let slack = (1.0 + profile.modulus.eval(profile.radius)) * tol + profile.gap_noise(r_star);
    if profile.gap(r_star).abs() > slack {
        return Err(MajorantError::InvalidRStar(r_star));
    }
    let radius = profile.radius;
    let closed = profile.a_plus(radius) < radius;
    if closed {
        return Ok(OuterRadius {
            r: radius,
            closed,
            degenerate: false,
        });
    }
    // g is nondecreasing on [m, R]; its negative part there ends at r**
    let m = gap_argmin(profile).max(r_star);
    let g_m = profile.gap(m);
    if g_m >= -profile.gap_noise(m) {
        return Ok(OuterRadius {
            r: r_star,
            closed,
            degenerate: true,
        });
    }
    let r = bisect(m, radius, tol, |r| profile.gap(r) < 0.0);
    Ok(OuterRadius {
        r,
        closed,
        degenerate: false,
    })
}

/// An interval of radii with explicit endpoint openness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn closed_open(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: true,
            hi_closed: false,
        }
    }

    pub fn empty() -> Self {
        Interval {
            lo: 0.0,
            hi: 0.0,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, r: f64) -> bool {
        let above = if self.lo_closed { r >= self.lo } else { r > self.lo };
        let below = if self.hi_closed { r <= self.hi } else { r < self.hi };
        above && below
    }
}

/// Location of the minimum of `a_+(r) - r`, reported when no fixed point exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapWitness {
    pub min_gap: f64,
    pub argmin: f64,
}

/// Radii and zones certified for one profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneReport {
    pub a: f64,
    pub radius: f64,
    pub r_lower: Option<f64>,
    pub r_star: Option<f64>,
    pub r_double_star: Option<f64>,
    pub r_double_star_closed: bool,
    pub r_double_star_degenerate: bool,
    pub r_cr: Option<f64>,
    /// Radii where the contraction-mapping argument applies.
    pub bc_zone: Interval,
    /// Radii of balls in which the fixed point is unique.
    pub u_zone: Interval,
    /// The ring `[r_*, r*]` containing the fixed point.
    pub e_zone: Interval,
    pub existence_certified: bool,
    pub no_existence: Option<GapWitness>,
}

impl ZoneReport {
    /// Turns an uncertified report back into the [`MajorantError::NoExistence`] error.
    pub fn require_existence(&self) -> Result<&Self, MajorantError> {
        match self.no_existence {
            Some(w) if !self.existence_certified => Err(MajorantError::NoExistence {
                min_gap: w.min_gap,
                argmin: w.argmin,
            }),
            _ => Ok(self),
        }
    }
}

/// Runs all radius finders and assembles the zone picture.
///
/// A missing fixed point of `a_+` is not an error here: the report comes back
/// with `existence_certified == false` and the gap witness filled in.
pub fn analyze(profile: &MajorantProfile, tol: f64) -> Result<ZoneReport, MajorantError> {
    check_tol(tol)?;
    let r_cr = find_r_cr(profile, tol)?;
    let r_lower = find_r_lower_star(profile, tol).ok();
    let mut report = ZoneReport {
        a: profile.a,
        radius: profile.radius,
        r_lower,
        r_star: None,
        r_double_star: None,
        r_double_star_closed: false,
        r_double_star_degenerate: false,
        r_cr,
        bc_zone: Interval::empty(),
        u_zone: Interval::empty(),
        e_zone: Interval::empty(),
        existence_certified: false,
        no_existence: None,
    };
    let r_star = match find_r_star(profile, tol) {
        Ok(r) => r,
        Err(MajorantError::NoExistence { min_gap, argmin }) => {
            report.no_existence = Some(GapWitness { min_gap, argmin });
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let outer = find_r_double_star(profile, r_star, tol)?;
    report.existence_certified = true;
    report.r_star = Some(r_star);
    report.r_double_star = Some(outer.r);
    report.r_double_star_closed = outer.closed;
    report.r_double_star_degenerate = outer.degenerate;
    report.e_zone = Interval::closed(r_lower.unwrap_or(0.0), r_star);
    report.u_zone = Interval {
        lo: 0.0,
        hi: outer.r,
        lo_closed: true,
        hi_closed: outer.closed,
    };
    report.bc_zone = match r_cr {
        Some(cr) if cr <= r_star => Interval::empty(),
        Some(cr) if cr < outer.r || !outer.closed => Interval::closed_open(r_star, cr.min(outer.r)),
        _ => Interval {
            lo: r_star,
            hi: outer.r,
            lo_closed: true,
            hi_closed: outer.closed,
        },
    };
    Ok(report)
}

/// `[s_0 = start, s_1 = a_+(s_0), ..., s_n]`.
pub fn scalar_sequence(
    profile: &MajorantProfile,
    start: f64,
    n: usize,
) -> Result<Vec<f64>, MajorantError> {
    profile.check_domain(start)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(start);
    let mut s = start;
    for _ in 0..n {
        s = profile.a_plus(s);
        profile.check_domain(s)?;
        out.push(s);
    }
    Ok(out)
}
