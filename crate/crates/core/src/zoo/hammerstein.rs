//! Hammerstein equations `x(t) = lambda sum_j int z_j(t,s) h_j(s, x(s)) ds + f(t)`.

use std::sync::Arc;

use super::{check_center, check_radius, shift_modulus, to_zoo, ScalarFn, RADIUS_NODES};
use crate::discretize::{zaanen_norm_estimate, Grid, KernelTable};
use crate::error::ZooError;
use crate::iteration::{OperatorHandle, StateNorm};
use crate::modulus::{uniform_nodes, LipschitzModulus, PowerTerm};

/// Safety factor applied to sampled Zaanen norms, which are lower estimates.
pub const ZAANEN_SAFETY: f64 = 1.05;

/// One kernel/nonlinearity pair with the modulus `w` of the nonlinearity:
/// `|h(u1) - h(u2)| <= w(r) |u1 - u2|` for `|u1|, |u2| <= r`.
#[derive(Clone)]
pub struct HammersteinTerm {
    pub kernel: KernelTable,
    pub nonlinearity: ScalarFn,
    pub modulus: LipschitzModulus,
}

#[derive(Clone)]
pub struct HammersteinSpec {
    pub lambda: f64,
    pub terms: Vec<HammersteinTerm>,
    /// Forcing `f` sampled on the solve grid.
    pub forcing: Vec<f64>,
    pub center: Option<Vec<f64>>,
}

impl std::fmt::Debug for HammersteinSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HammersteinSpec")
            .field("lambda", &self.lambda)
            .field("terms", &self.terms.len())
            .field("forcing", &self.forcing.len())
            .finish()
    }
}

impl HammersteinSpec {
    fn validate(&self, grid: &Grid) -> Result<(), ZooError> {
        if !self.lambda.is_finite() {
            return Err(ZooError::Parameter("lambda must be finite".into()));
        }
        if self.terms.is_empty() {
            return Err(ZooError::Parameter("at least one term is required".into()));
        }
        for term in &self.terms {
            if term.kernel.rows() != grid || term.kernel.cols() != grid {
                return Err(ZooError::GridMismatch);
            }
        }
        if self.forcing.len() != grid.len() {
            return Err(ZooError::Dimension(format!(
                "forcing has {} samples, grid has {}",
                self.forcing.len(),
                grid.len()
            )));
        }
        Ok(())
    }

    fn apply_fn(&self, grid: &Grid) -> crate::iteration::ApplyFn {
        let weights = grid.weights().to_vec();
        let lambda = self.lambda;
        let forcing = self.forcing.clone();
        let terms: Vec<(KernelTable, ScalarFn)> = self
            .terms
            .iter()
            .map(|t| (t.kernel.clone(), t.nonlinearity.clone()))
            .collect();
        Arc::new(move |x: &[f64]| {
            let mut out = forcing.clone();
            for (kernel, h) in &terms {
                let hx: Vec<f64> = x.iter().zip(&weights).map(|(v, w)| w * h(*v)).collect();
                for (i, o) in out.iter_mut().enumerate() {
                    let s: f64 = kernel.row(i).iter().zip(&hx).map(|(z, v)| z * v).sum();
                    *o += lambda * s;
                }
            }
            out
        })
    }
}

/// Handle on `C[a, b]` (sup norm over the grid) with
/// `k(r) = |lambda| sum_j |Z_j| w_j(r)`, where `|Z_j|` is the sup row norm.
pub fn build_hammerstein_c(
    spec: &HammersteinSpec,
    grid: &Grid,
    radius: f64,
) -> Result<OperatorHandle, ZooError> {
    spec.validate(grid)?;
    check_radius(radius)?;
    let center = check_center(&spec.center, grid.len())?;
    let shift = StateNorm::Max.norm(&center);
    let norms: Vec<f64> = spec
        .terms
        .iter()
        .map(|t| spec.lambda.abs() * t.kernel.sup_row_norm())
        .collect();
    let parts: Vec<(f64, &LipschitzModulus)> =
        norms.iter().copied().zip(spec.terms.iter().map(|t| &t.modulus)).collect();
    let k = LipschitzModulus::weighted_sum(&parts, radius + shift, RADIUS_NODES)?;
    let k = shift_modulus(k, shift, radius)?;
    OperatorHandle::new(spec.apply_fn(grid), center, StateNorm::Max, k, radius, None).map_err(to_zoo)
}

/// Superposition moduli `|h(s,u1) - h(s,u2)| <= (xi(s) + eta |u|^e) |u1 - u2|`
/// given as `(|xi|_{L_p/(p-q)}, eta)` pairs; the infimum over pairs is used.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzPairSet {
    pairs: Vec<(f64, f64)>,
}

impl LipschitzPairSet {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self, ZooError> {
        if pairs.is_empty() {
            return Err(ZooError::Parameter("pair set is empty".into()));
        }
        for &(xi, eta) in &pairs {
            if !(xi >= 0.0 && eta >= 0.0) || !xi.is_finite() || !eta.is_finite() {
                return Err(ZooError::Parameter(format!("pair ({xi}, {eta}) must be nonnegative")));
            }
        }
        Ok(LipschitzPairSet { pairs })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }
}

/// Modulus of the superposition operator `u -> h(s, u(s))` from `L_p` to `L_q`
/// on an interval of `length`:
/// `k(r) = inf (c xi + eta r^((p-q)/q))` with `c = length^((p-q)/(p q))`.
///
/// Exact for a single pair, a dominating pair or `p = q`; otherwise the lower
/// envelope is tabulated on `[0, radius]` including all pairwise crossings.
pub fn build_superposition_modulus(
    pairs: &LipschitzPairSet,
    p: f64,
    q: f64,
    length: f64,
    radius: f64,
) -> Result<LipschitzModulus, ZooError> {
    if !(p > 1.0) || !p.is_finite() || !(q > 0.0) || q > p {
        return Err(ZooError::Parameter(format!("need p > 1 and 0 < q <= p, got p = {p}, q = {q}")));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(ZooError::Parameter(format!("interval length {length} must be positive")));
    }
    check_radius(radius)?;
    let e = (p - q) / q;
    let c = length.powf((p - q) / (p * q));
    let curves: Vec<(f64, f64)> = pairs.pairs.iter().map(|&(xi, eta)| (c * xi, eta)).collect();
    if e == 0.0 {
        let q = curves.iter().map(|(a, b)| a + b).fold(f64::INFINITY, f64::min);
        return Ok(LipschitzModulus::constant(q)?);
    }
    let dominating = curves
        .iter()
        .find(|(a, b)| curves.iter().all(|(a2, b2)| a <= a2 && b <= b2));
    if let Some(&(alpha, eta)) = dominating {
        return Ok(closed_form(alpha, eta, e)?);
    }
    let mut nodes = uniform_nodes(radius, 1025);
    for (i, &(a1, b1)) in curves.iter().enumerate() {
        for &(a2, b2) in &curves[i + 1..] {
            if b1 != b2 {
                let t = (a2 - a1) / (b1 - b2);
                if t > 0.0 {
                    let r = t.powf(1.0 / e);
                    if r < radius {
                        nodes.push(r);
                    }
                }
            }
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup();
    let envelope = |r: f64| {
        curves
            .iter()
            .map(|(a, b)| a + b * r.powf(e))
            .fold(f64::INFINITY, f64::min)
    };
    // between crossings the envelope follows one curve; chords of convex
    // curves lie above them, concave ones need the upper sampling
    if e >= 1.0 {
        Ok(LipschitzModulus::sampled(nodes, envelope)?)
    } else {
        Ok(LipschitzModulus::sampled_upper(nodes, envelope)?)
    }
}

fn closed_form(alpha: f64, eta: f64, e: f64) -> Result<LipschitzModulus, crate::error::ModulusError> {
    if eta == 0.0 {
        return LipschitzModulus::constant(alpha);
    }
    let mut terms = vec![PowerTerm::new(eta, e)];
    if alpha > 0.0 {
        terms.insert(0, PowerTerm::new(alpha, 0.0));
    }
    LipschitzModulus::power_sum(terms)
}

/// Zaanen norms `|z_j|_{Z(q_j, p')}` for every term, inflated by
/// [`ZAANEN_SAFETY`].
pub fn estimate_zaanen_norms(
    spec: &HammersteinSpec,
    inner_exponents: &[f64],
    p: f64,
    iters: usize,
) -> Result<Vec<f64>, ZooError> {
    if inner_exponents.len() != spec.terms.len() {
        return Err(ZooError::Dimension(format!(
            "{} exponents for {} terms",
            inner_exponents.len(),
            spec.terms.len()
        )));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(ZooError::Parameter(format!("p = {p} must exceed 1")));
    }
    let p_conj = p / (p - 1.0);
    spec.terms
        .iter()
        .zip(inner_exponents)
        .map(|(t, &q)| {
            Ok(ZAANEN_SAFETY * zaanen_norm_estimate(&t.kernel, q, p_conj, iters)?.value)
        })
        .collect()
}

/// Handle on `L_p[a, b]` (weighted discrete norm) with
/// `k(r) = |lambda| sum_j zaanen_j h_j(r)`, where `h_j` is the modulus of the
/// superposition operator of term `j` from `L_p` to `L_{q_j}`.
pub fn build_hammerstein_lp(
    spec: &HammersteinSpec,
    superposition_moduli: &[LipschitzModulus],
    zaanen_norms: &[f64],
    p: f64,
    grid: &Grid,
    radius: f64,
) -> Result<OperatorHandle, ZooError> {
    spec.validate(grid)?;
    check_radius(radius)?;
    if superposition_moduli.len() != spec.terms.len() || zaanen_norms.len() != spec.terms.len() {
        return Err(ZooError::Dimension("one modulus and one Zaanen norm per term".into()));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(ZooError::Parameter(format!("p = {p} must be at least 1")));
    }
    if zaanen_norms.iter().any(|z| !(*z >= 0.0) || !z.is_finite()) {
        return Err(ZooError::Parameter("Zaanen norms must be nonnegative".into()));
    }
    let norm = StateNorm::WeightedLp {
        weights: grid.weights().to_vec(),
        p,
    };
    let center = check_center(&spec.center, grid.len())?;
    let shift = norm.norm(&center);
    let parts: Vec<(f64, &LipschitzModulus)> = zaanen_norms
        .iter()
        .map(|z| spec.lambda.abs() * z)
        .zip(superposition_moduli)
        .collect();
    let k = LipschitzModulus::weighted_sum(&parts, radius + shift, RADIUS_NODES)?;
    let k = shift_modulus(k, shift, radius)?;
    OperatorHandle::new(spec.apply_fn(grid), center, norm, k, radius, None).map_err(to_zoo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::QuadratureRule;
    use crate::majorant::{analyze, find_r_star};
    use crate::modulus::ModulusKind;
    use approx::assert_relative_eq;

    fn separable(n: usize) -> (HammersteinSpec, Grid) {
        let grid = Grid::new(0.0, 1.0, n, QuadratureRule::Simpson).unwrap();
        let kernel = KernelTable::from_fn(&grid, &grid, |t, s| t * s).unwrap();
        let term = HammersteinTerm {
            kernel,
            nonlinearity: Arc::new(|x| x * x),
            modulus: LipschitzModulus::power_sum(vec![PowerTerm::new(2.0, 1.0)]).unwrap(),
        };
        let spec = HammersteinSpec {
            lambda: 0.1,
            terms: vec![term],
            forcing: grid.sample(|t| t),
            center: None,
        };
        (spec, grid)
    }

    #[test]
    fn separable_kernel_profile() {
        let (spec, grid) = separable(201);
        let op = build_hammerstein_c(&spec, &grid, 3.0).unwrap();
        // |Z| = max_t int t s ds = 1/2, so k(r) = 0.1 * 0.5 * 2r
        assert_relative_eq!(op.profile().modulus().eval(1.0), 0.1, epsilon = 1e-14);
        assert_relative_eq!(op.profile().a(), 1.0, epsilon = 1e-14);
        // 1 + r^2/20 = r
        let exact = (1.0 - 0.8_f64.sqrt()) / 0.1;
        assert_relative_eq!(find_r_star(op.profile(), 1e-12).unwrap(), exact, epsilon = 1e-10);
        assert_relative_eq!(exact, 1.055_728_090_000_841, epsilon = 1e-14);
    }

    #[test]
    fn separable_fixed_point_matches_scalar_reduction() {
        // x(t) = t (1 + 0.1 c) with c = int s x(s)^2 ds = (1 + 0.1 c)^2 / 4
        let (spec, grid) = separable(201);
        let op = build_hammerstein_c(&spec, &grid, 3.0).unwrap();
        // 1 + 0.1 c solves b = 1 + b^2 / 40, smaller root
        let c = 1.0263340389897237_f64;
        let mut x = grid.sample(|t| c * t);
        let ax = op.apply(&x);
        for (a, b) in ax.iter().zip(&x) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
        x.iter_mut().for_each(|v| *v *= 1.01);
        assert!(op.norm().distance(&op.apply(&x), &x) > 1e-4);
    }

    #[test]
    fn grid_mismatch() {
        let (spec, _) = separable(11);
        let other = Grid::new(0.0, 1.0, 13, QuadratureRule::Simpson).unwrap();
        assert!(matches!(build_hammerstein_c(&spec, &other, 1.0), Err(ZooError::GridMismatch)));
    }

    #[test]
    fn superposition_single_pair_is_exact() {
        let pairs = LipschitzPairSet::new(vec![(0.0, 2.0)]).unwrap();
        let k = build_superposition_modulus(&pairs, 2.0, 1.0, 1.0, 3.0).unwrap();
        assert!(matches!(k.kind(), ModulusKind::PowerSum(_)));
        assert_relative_eq!(k.eval(1.5), 3.0, epsilon = 1e-15);
        let k = build_superposition_modulus(&pairs, 2.0, 2.0, 1.0, 3.0).unwrap();
        assert_eq!(k.eval(1.0), 2.0);
    }

    #[test]
    fn superposition_envelope_with_crossing() {
        // 1 + 0 r  vs  0 + 1 r on [0, 1], p = 2, q = 1: cross at r = 1
        let pairs = LipschitzPairSet::new(vec![(1.0, 0.0), (0.0, 1.0)]).unwrap();
        let k = build_superposition_modulus(&pairs, 2.0, 1.0, 1.0, 3.0).unwrap();
        assert!(matches!(k.kind(), ModulusKind::Tabulated(_)));
        assert_relative_eq!(k.eval(0.5), 0.5, epsilon = 1e-14);
        assert_relative_eq!(k.eval(1.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(k.eval(2.5), 1.0, epsilon = 1e-14);
        // length factor 4^(1/2) = 2 scales xi
        let k = build_superposition_modulus(&pairs, 2.0, 1.0, 4.0, 3.0).unwrap();
        assert_relative_eq!(k.eval(3.0), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn superposition_rejects_bad_exponents() {
        let pairs = LipschitzPairSet::new(vec![(0.0, 1.0)]).unwrap();
        assert!(build_superposition_modulus(&pairs, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(build_superposition_modulus(&pairs, 2.0, 3.0, 1.0, 1.0).is_err());
        assert!(LipschitzPairSet::new(vec![]).is_err());
        assert!(LipschitzPairSet::new(vec![(-1.0, 0.0)]).is_err());
    }

    #[test]
    fn lp_handle_uses_zaanen_norm() {
        let (spec, grid) = separable(101);
        let pairs = LipschitzPairSet::new(vec![(0.0, 2.0)]).unwrap();
        let h = build_superposition_modulus(&pairs, 2.0, 1.0, 1.0, 2.0).unwrap();
        // |t s|_{Z(1, 2)} = sup_s s * |t|_{L_2} = 1/sqrt(3)
        let z = 1.0 / 3.0_f64.sqrt();
        let op = build_hammerstein_lp(&spec, &[h], &[z], 2.0, &grid, 2.0).unwrap();
        assert_relative_eq!(op.profile().a(), z, epsilon = 1e-12);
        assert_relative_eq!(op.profile().modulus().eval(1.0), 0.2 * z, epsilon = 1e-12);
        let est = estimate_zaanen_norms(&spec, &[1.0], 2.0, 50).unwrap();
        assert_relative_eq!(est[0], ZAANEN_SAFETY * z, epsilon = 1e-6);
        assert!(analyze(op.profile(), 1e-12).unwrap().existence_certified);
    }
}
