//! Composite equations `x(t) = F(t, x(t), int K(t, s, x(s)) ds)`.

use std::sync::Arc;

use super::{check_center, check_radius, to_zoo, Fn3, RADIUS_NODES};
use crate::discretize::Grid;
use crate::error::ZooError;
use crate::iteration::{OperatorHandle, StateNorm};
use crate::modulus::{uniform_nodes, LipschitzModulus};

/// Outer map `F(t, u, v)` with moduli `l(t, r, rho)`, `m(t, r, rho)` and inner
/// kernel `K(t, s, u)` with envelope `|K| <= n0(t, s, r)` and modulus
/// `n(t, s, r)`, all for `|u| <= r`, `|v| <= rho`.
#[derive(Clone)]
pub struct CompositionSpec {
    pub outer: Fn3,
    pub l: Fn3,
    pub m: Fn3,
    pub inner: Fn3,
    pub n0: Fn3,
    pub n: Fn3,
    pub center: Option<Vec<f64>>,
}

impl std::fmt::Debug for CompositionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompositionSpec").field("center", &self.center).finish()
    }
}

/// Handle on `C[a, b]` with
/// `k(r) = max_i (l(t_i, r, rho_i) + m(t_i, r, rho_i) int n(t_i, s, r) ds)`,
/// `rho_i = int n0(t_i, s, r) ds`, tabulated on [`RADIUS_NODES`] nodes.
pub fn build_composition_c(
    spec: &CompositionSpec,
    grid: &Grid,
    radius: f64,
) -> Result<OperatorHandle, ZooError> {
    check_radius(radius)?;
    let center = check_center(&spec.center, grid.len())?;
    let shift = StateNorm::Max.norm(&center);
    let (nodes, weights) = (grid.nodes().to_vec(), grid.weights().to_vec());
    let integrate = |f: &Fn3, t: f64, r: f64| -> f64 {
        nodes.iter().zip(&weights).map(|(&s, w)| w * f(t, s, r)).sum()
    };
    let raw = |r: f64| {
        nodes
            .iter()
            .map(|&t| {
                let rho = integrate(&spec.n0, t, r);
                (spec.l)(t, r, rho) + (spec.m)(t, r, rho) * integrate(&spec.n, t, r)
            })
            .fold(0.0, f64::max)
    };
    let k = LipschitzModulus::sampled_upper(uniform_nodes(radius, RADIUS_NODES), |r| raw(r + shift))?;
    let (outer, inner) = (spec.outer.clone(), spec.inner.clone());
    let apply = Arc::new(move |x: &[f64]| {
        nodes
            .iter()
            .zip(x)
            .map(|(&t, &xt)| {
                let v: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .zip(x)
                    .map(|((&s, w), &xs)| w * inner(t, s, xs))
                    .sum();
                outer(t, xt, v)
            })
            .collect::<Vec<f64>>()
    });
    OperatorHandle::new(apply, center, StateNorm::Max, k, radius, None).map_err(to_zoo)
}
