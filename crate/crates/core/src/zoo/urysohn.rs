//! Urysohn equations `x(t) = int K(t, s, x(s), x(t)) ds`.

use super::{check_center, check_radius, to_zoo, Fn3, Fn4, RADIUS_NODES};
use crate::discretize::Grid;
use crate::error::ZooError;
use crate::iteration::{OperatorHandle, StateNorm};
use crate::modulus::{uniform_nodes, LipschitzModulus};
use std::sync::Arc;

/// Kernel `K(t, s, u, v)` with moduli in `u` and `v`:
/// `|K(t,s,u1,v1) - K(t,s,u2,v2)| <= l(t,s,r) |u1-u2| + m(t,s,r) |v1-v2|`
/// for `|u_i|, |v_i| <= r`.
#[derive(Clone)]
pub struct UrysohnSpec {
    pub kernel: Fn4,
    pub l: Fn3,
    pub m: Fn3,
    pub center: Option<Vec<f64>>,
}

impl std::fmt::Debug for UrysohnSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UrysohnSpec").field("center", &self.center).finish()
    }
}

/// Handle on `C[a, b]` with `k(r) = max_i sum_l w_l (l + m)(t_i, s_l, r)`,
/// tabulated on [`RADIUS_NODES`] radius nodes.
pub fn build_urysohn_c(spec: &UrysohnSpec, grid: &Grid, radius: f64) -> Result<OperatorHandle, ZooError> {
    check_radius(radius)?;
    let center = check_center(&spec.center, grid.len())?;
    let shift = StateNorm::Max.norm(&center);
    let (nodes, weights) = (grid.nodes().to_vec(), grid.weights().to_vec());
    let (l, m) = (spec.l.clone(), spec.m.clone());
    let raw = |r: f64| {
        nodes
            .iter()
            .map(|&t| {
                nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&s, w)| w * (l(t, s, r) + m(t, s, r)))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    };
    let k = LipschitzModulus::sampled_upper(uniform_nodes(radius, RADIUS_NODES), |r| raw(r + shift))?;
    let kernel = spec.kernel.clone();
    let apply = Arc::new(move |x: &[f64]| {
        nodes
            .iter()
            .zip(x)
            .map(|(&t, &xt)| {
                nodes
                    .iter()
                    .zip(&weights)
                    .zip(x)
                    .map(|((&s, w), &xs)| w * kernel(t, s, xs, xt))
                    .sum()
            })
            .collect::<Vec<f64>>()
    });
    OperatorHandle::new(apply, center, StateNorm::Max, k, radius, None).map_err(to_zoo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::QuadratureRule;
    use crate::majorant::find_r_star;
    use crate::modulus::ModulusKind;
    use approx::assert_relative_eq;

    fn grid() -> Grid {
        Grid::new(0.0, 1.0, 41, QuadratureRule::Simpson).unwrap()
    }

    #[test]
    fn constant_moduli() {
        let spec = UrysohnSpec {
            kernel: Arc::new(|_, _, u, v| 0.1 * u + 0.2 * v),
            l: Arc::new(|_, _, _| 0.1),
            m: Arc::new(|_, _, _| 0.1),
            center: None,
        };
        let g = Grid::new(0.0, 2.0, 21, QuadratureRule::Simpson).unwrap();
        let op = build_urysohn_c(&spec, &g, 1.0).unwrap();
        assert!(matches!(op.profile().modulus().kind(), ModulusKind::Constant(_)));
        assert_relative_eq!(op.profile().modulus().eval(0.5), 0.4, epsilon = 1e-14);
    }

    #[test]
    fn kernel_free_of_state() {
        let spec = UrysohnSpec {
            kernel: Arc::new(|t, s, _, _| t * s),
            l: Arc::new(|_, _, _| 0.0),
            m: Arc::new(|_, _, _| 0.0),
            center: None,
        };
        let g = grid();
        let op = build_urysohn_c(&spec, &g, 1.0).unwrap();
        assert_eq!(op.profile().modulus().eval(1.0), 0.0);
        let x = op.apply(&vec![0.0; g.len()]);
        assert_relative_eq!(x[g.len() - 1], 0.5, epsilon = 1e-14);
        assert_eq!(op.apply(&vec![3.0; g.len()]), x);
    }

    #[test]
    fn quadratic_kernel_modulus_is_dominated_and_tight() {
        let spec = UrysohnSpec {
            kernel: Arc::new(|t, s, u, v| 0.1 * s * u * u + 0.05 * v + t),
            l: Arc::new(|_, s, r| 0.2 * s * r),
            m: Arc::new(|_, _, _| 0.05),
            center: None,
        };
        let op = build_urysohn_c(&spec, &grid(), 2.0).unwrap();
        let k = op.profile().modulus();
        let h = 2.0 / (RADIUS_NODES - 1) as f64;
        for r in [0.0, 0.3, 1.0, 1.7] {
            let exact = 0.1 * r + 0.05;
            assert!(k.eval(r) >= exact - 1e-14);
            assert!(k.eval(r) <= exact + 0.1 * h + 1e-12);
        }
        // 1 + 0.05 r + 0.05 r^2 = r, perturbed by at most one radius node
        let exact = (0.95 - (0.95f64 * 0.95 - 0.2).sqrt()) / 0.1;
        let r_star = find_r_star(op.profile(), 1e-12).unwrap();
        assert!(r_star >= exact && r_star - exact < 1e-3, "{r_star} vs {exact}");
    }

    #[test]
    fn decreasing_modulus_is_rejected() {
        let spec = UrysohnSpec {
            kernel: Arc::new(|_, _, u, _| u),
            l: Arc::new(|_, _, r| 1.0 - 0.5 * r),
            m: Arc::new(|_, _, _| 0.0),
            center: None,
        };
        assert!(matches!(build_urysohn_c(&spec, &grid(), 1.0), Err(ZooError::Modulus(_))));
    }
}
