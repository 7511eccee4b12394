//! Moduli of integral operators on `L_p` whose kernels grow like powers.

use super::{check_radius, RADIUS_NODES};
use crate::error::{ModulusError, ZooError};
use crate::modulus::{uniform_nodes, LipschitzModulus, PowerTerm};

use super::LipschitzPairSet;

fn check_terms(terms: &[PowerTerm], max: f64) -> Result<(), ZooError> {
    for t in terms {
        if !(t.coefficient >= 0.0) || !t.coefficient.is_finite() {
            return Err(ModulusError::Negative { value: t.coefficient }.into());
        }
        if !(t.exponent >= 0.0 && t.exponent <= max) {
            return Err(ModulusError::ExponentRange {
                exponent: t.exponent,
                min: 0.0,
                max,
            }
            .into());
        }
    }
    Ok(())
}

fn check_p(p: f64) -> Result<(), ZooError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(ZooError::Parameter(format!("p = {p} must exceed 1")));
    }
    Ok(())
}

fn eval_terms(terms: &[PowerTerm], r: f64) -> f64 {
    terms
        .iter()
        .map(|t| if t.exponent == 0.0 { t.coefficient } else { t.coefficient * r.powf(t.exponent) })
        .sum()
}

/// Urysohn kernel on `L_p` with
/// `|dK| <= (sum a_j r^theta_j) |du| + (sum b_k r^vartheta_k) |dv|`.
/// Coefficients are the Zaanen norms of `a_j` and `b_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerGrowthModulusSpec {
    pub p: f64,
    /// `(|a_j|, theta_j)` with `0 <= theta_j <= p - 1`.
    pub u_terms: Vec<PowerTerm>,
    /// `(|b_k|, vartheta_k)` with `0 <= vartheta_k <= p`.
    pub v_terms: Vec<PowerTerm>,
}

/// `k(r) = sum |a_j| r^theta_j + sum |b_k| r^vartheta_k`.
pub fn build_power_modulus(spec: &PowerGrowthModulusSpec) -> Result<LipschitzModulus, ZooError> {
    check_p(spec.p)?;
    check_terms(&spec.u_terms, spec.p - 1.0)?;
    check_terms(&spec.v_terms, spec.p)?;
    let zero = LipschitzModulus::constant(0.0)?;
    let terms: Vec<PowerTerm> = spec
        .u_terms
        .iter()
        .chain(&spec.v_terms)
        .copied()
        .filter(|t| t.coefficient > 0.0)
        .collect();
    if terms.is_empty() {
        return Ok(zero);
    }
    if terms.iter().all(|t| t.exponent == 0.0) {
        return Ok(LipschitzModulus::constant(terms.iter().map(|t| t.coefficient).sum())?);
    }
    Ok(LipschitzModulus::power_sum(terms)?)
}

/// Composite operator `F(x, Bx)` from `L_p` with `B: L_p -> L_q`, `q >= p`:
/// `|dF| <= c |du| + (mu(t) + nu rho^((q-p)/p)) |dv|`,
/// `|K(t,s,u)| <= sum a_j |u|^theta_j`, `|dK| <= sum b_k r^vartheta_k |du|`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionLpModulusSpec {
    pub p: f64,
    pub q: f64,
    pub c: f64,
    /// `(|mu|_{L_{qp/(q-p)}}, nu)` candidates.
    pub pairs: LipschitzPairSet,
    /// `(|a_j|, theta_j)` with `0 <= theta_j <= p`.
    pub a_terms: Vec<PowerTerm>,
    /// `(|b_k|, vartheta_k)` with `0 <= vartheta_k <= p - 1`.
    pub b_terms: Vec<PowerTerm>,
}

/// `k(r) = c + inf (mu + nu S(r)^((q-p)/p)) B(r)` with
/// `S(r) = sum |a_j| r^theta_j`, `B(r) = sum |b_k| r^vartheta_k`.
///
/// Closed form when the infimum is attained by a pure-`mu` pair or the power
/// factor is constant; otherwise tabulated on `[0, radius]` from above.
pub fn build_composition_lp_modulus(
    spec: &CompositionLpModulusSpec,
    radius: f64,
) -> Result<LipschitzModulus, ZooError> {
    check_p(spec.p)?;
    if !(spec.q >= spec.p) || !spec.q.is_finite() {
        return Err(ZooError::Parameter(format!("q = {} must be at least p = {}", spec.q, spec.p)));
    }
    if !(spec.c >= 0.0) || !spec.c.is_finite() {
        return Err(ModulusError::Negative { value: spec.c }.into());
    }
    check_terms(&spec.a_terms, spec.p)?;
    check_terms(&spec.b_terms, spec.p - 1.0)?;
    check_radius(radius)?;
    let gamma = (spec.q - spec.p) / spec.p;
    let s_constant = gamma == 0.0 || spec.a_terms.iter().all(|t| t.exponent == 0.0);
    let pairs = spec.pairs.pairs();
    let factor = |r: f64| {
        let s = eval_terms(&spec.a_terms, r);
        let sg = if gamma == 0.0 { 1.0 } else { s.powf(gamma) };
        pairs.iter().map(|(mu, nu)| mu + nu * sg).fold(f64::INFINITY, f64::min)
    };
    if s_constant || pairs.iter().all(|(_, nu)| *nu == 0.0) {
        // the infimum is a constant f0, so k = c + f0 B(r)
        let f0 = factor(0.0).min(factor(1.0));
        let mut terms = vec![PowerTerm::new(spec.c, 0.0)];
        terms.extend(
            spec.b_terms
                .iter()
                .map(|t| PowerTerm::new(f0 * t.coefficient, t.exponent)),
        );
        terms.retain(|t| t.coefficient > 0.0);
        if terms.iter().all(|t| t.exponent == 0.0) {
            return Ok(LipschitzModulus::constant(terms.iter().map(|t| t.coefficient).sum())?);
        }
        return Ok(LipschitzModulus::power_sum(terms)?);
    }
    Ok(LipschitzModulus::sampled_upper(uniform_nodes(radius, RADIUS_NODES), |r| {
        spec.c + factor(r) * eval_terms(&spec.b_terms, r)
    })?)
}
