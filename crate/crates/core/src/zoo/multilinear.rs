//! `x = eta + T(x, ..., x)` with an m-linear map `T` on `R^d`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_center, check_radius, shift_modulus, to_zoo};
use crate::error::ZooError;
use crate::iteration::{OperatorHandle, StateNorm};
use crate::modulus::{LipschitzModulus, PowerTerm};

/// Inflation applied to a sampled multilinear norm.
pub const NORM_SAFETY: f64 = 1.1;

#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearSpec {
    pub dim: usize,
    pub degree: usize,
    /// Row-major tensor `T[i, j_1, ..., j_m]`, `d^(m+1)` entries.
    pub coefficients: Vec<f64>,
    pub eta: Vec<f64>,
    /// Operator norm `C` of `T`; estimated when absent.
    pub norm: Option<f64>,
    pub center: Option<Vec<f64>>,
    pub seed: u64,
}

impl MultilinearSpec {
    fn validate(&self) -> Result<(), ZooError> {
        if self.degree < 2 {
            return Err(ZooError::Degree(self.degree));
        }
        if self.dim == 0 {
            return Err(ZooError::Dimension("dimension must be positive".into()));
        }
        let expected = self
            .dim
            .checked_pow(self.degree as u32 + 1)
            .ok_or_else(|| ZooError::Dimension("tensor too large".into()))?;
        if self.coefficients.len() != expected {
            return Err(ZooError::Dimension(format!(
                "{} coefficients, expected d^(m+1) = {expected}",
                self.coefficients.len()
            )));
        }
        if self.eta.len() != self.dim {
            return Err(ZooError::Dimension(format!(
                "eta has {} entries, expected {}",
                self.eta.len(),
                self.dim
            )));
        }
        if self.coefficients.iter().chain(&self.eta).any(|v| !v.is_finite()) {
            return Err(ZooError::Parameter("non-finite coefficient".into()));
        }
        if let Some(c) = self.norm {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(ZooError::Parameter(format!("norm C = {c} must be nonnegative")));
            }
        }
        Ok(())
    }
}

/// `T(v_1, ..., v_m)` with the slot `skip` left open and contracted against
/// `w` on the output index instead. With `skip == None` returns `T(v_1..v_m)`.
fn contract(
    coefficients: &[f64],
    d: usize,
    m: usize,
    vectors: &[&[f64]],
    open: Option<(usize, &[f64])>,
) -> Vec<f64> {
    let mut out = vec![0.0; d];
    let mut idx = vec![0usize; m + 1];
    for &c in coefficients {
        if c != 0.0 {
            let mut prod = c;
            for k in 0..m {
                if open.map(|(s, _)| s) != Some(k) {
                    prod *= vectors[k][idx[k + 1]];
                }
            }
            match open {
                None => out[idx[0]] += prod,
                Some((s, w)) => out[idx[s + 1]] += prod * w[idx[0]],
            }
        }
        // odometer over (i, j_1, ..., j_m), last index fastest
        for pos in (0..=m).rev() {
            idx[pos] += 1;
            if idx[pos] < d {
                break;
            }
            idx[pos] = 0;
        }
    }
    out
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Lower estimate of `sup |T(u_1, ..., u_m)|` over Euclidean unit vectors:
/// seeded random starts, each refined by alternating (higher-order power)
/// updates of one slot at a time. Exact for `d = 1`.
pub fn estimate_multilinear_norm(spec: &MultilinearSpec, starts: usize, sweeps: usize) -> f64 {
    let (d, m) = (spec.dim, spec.degree);
    if d == 1 {
        return spec.coefficients[0].abs();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut best = 0.0_f64;
    for _ in 0..starts.max(1) {
        let mut us: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let mut u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                normalize(&mut u);
                u
            })
            .collect();
        let mut value = 0.0;
        for _ in 0..sweeps {
            for k in 0..m {
                let refs: Vec<&[f64]> = us.iter().map(Vec::as_slice).collect();
                let mut w = contract(&spec.coefficients, d, m, &refs, None);
                if normalize(&mut w) == 0.0 {
                    break;
                }
                let mut g = contract(&spec.coefficients, d, m, &refs, Some((k, &w)));
                if normalize(&mut g) == 0.0 {
                    continue;
                }
                us[k] = g;
            }
            let refs: Vec<&[f64]> = us.iter().map(Vec::as_slice).collect();
            let mut t = contract(&spec.coefficients, d, m, &refs, None);
            value = normalize(&mut t);
        }
        best = best.max(value);
    }
    best
}

/// The constant `C` used in the modulus: the supplied norm, `|T|` for
/// `d = 1`, or the inflated sampled estimate.
pub fn effective_norm(spec: &MultilinearSpec) -> Result<f64, ZooError> {
    spec.validate()?;
    Ok(match spec.norm {
        Some(c) => c,
        None if spec.dim == 1 => spec.coefficients[0].abs(),
        None => NORM_SAFETY * estimate_multilinear_norm(spec, 64, 30),
    })
}

/// Handle for `A x = eta + T(x, ..., x)` with `k(r) = C m r^(m-1)`.
pub fn build_multilinear(spec: &MultilinearSpec, radius: f64) -> Result<OperatorHandle, ZooError> {
    spec.validate()?;
    check_radius(radius)?;
    let (d, m) = (spec.dim, spec.degree);
    let c = effective_norm(spec)?;
    let center = check_center(&spec.center, d)?;
    let shift = StateNorm::Euclidean.norm(&center);
    let k = LipschitzModulus::power_sum(vec![PowerTerm::new(c * m as f64, (m - 1) as f64)])?;
    let k = shift_modulus(k, shift, radius)?;
    let coefficients = spec.coefficients.clone();
    let eta = spec.eta.clone();
    let apply = Arc::new(move |x: &[f64]| {
        let refs: Vec<&[f64]> = (0..m).map(|_| x).collect();
        let t = contract(&coefficients, d, m, &refs, None);
        t.iter().zip(&eta).map(|(a, b)| a + b).collect::<Vec<f64>>()
    });
    OperatorHandle::new(apply, center, StateNorm::Euclidean, k, radius, None).map_err(to_zoo)
}

/// Largest offset `a = |eta|` for which `a + C r^m = r` has a root:
/// `a_cr = (1 / (C m))^(1/(m-1)) (m-1)/m`.
pub fn lr_critical_a(c: f64, m: usize) -> Result<f64, ZooError> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(ZooError::Parameter(format!("C = {c} must be positive")));
    }
    if m < 2 {
        return Err(ZooError::Degree(m));
    }
    let mf = m as f64;
    Ok((1.0 / (c * mf)).powf(1.0 / (mf - 1.0)) * (mf - 1.0) / mf)
}
