//! Operator families with known Lipschitz moduli, packaged as
//! [`OperatorHandle`](crate::iteration::OperatorHandle)s.
//!
//! Integral operators are discretized by the Nyström method: every
//! `int_a^b ... ds` becomes a quadrature sum over the solve grid, so the
//! state vector holds the samples `x(t_i)`.
//!
//! Moduli are stated for balls around the origin. When a handle is centered
//! elsewhere, `|x - x0| <= r` only gives `|x| <= r + |x0|`, so the modulus is
//! shifted to `k(r + |x0|)`.

use std::sync::Arc;

use crate::error::ZooError;
use crate::iteration::{OperatorHandle, StateNorm};
use crate::majorant::MajorantProfile;
use crate::modulus::{uniform_nodes, LipschitzModulus};

mod composition;
mod hammerstein;
mod multilinear;
mod power;
mod urysohn;

pub use composition::{build_composition_c, CompositionSpec};
pub use hammerstein::{
    build_hammerstein_c, build_hammerstein_lp, build_superposition_modulus, estimate_zaanen_norms,
    HammersteinSpec, HammersteinTerm, LipschitzPairSet, ZAANEN_SAFETY,
};
pub use multilinear::{
    build_multilinear, effective_norm, estimate_multilinear_norm, lr_critical_a, MultilinearSpec,
    NORM_SAFETY,
};
pub use power::{
    build_composition_lp_modulus, build_power_modulus, CompositionLpModulusSpec,
    PowerGrowthModulusSpec,
};
pub use urysohn::{build_urysohn_c, UrysohnSpec};

/// Radius nodes used when a modulus is only available through sampling.
pub const RADIUS_NODES: usize = 257;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// `(t, s) -> value`
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// `(t, s, r) -> value` or `(t, u, v) -> value`
pub type Fn3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
/// `(t, s, u, v) -> value`
pub type Fn4 = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;

/// `k(r + shift)` on `[0, radius]`; the identity when `shift == 0`.
pub(crate) fn shift_modulus(
    k: LipschitzModulus,
    shift: f64,
    radius: f64,
) -> Result<LipschitzModulus, ZooError> {
    if shift == 0.0 {
        return Ok(k);
    }
    if let crate::modulus::ModulusKind::Constant(_) = k.kind() {
        return Ok(k);
    }
    if let Some(end) = k.domain_end() {
        if end < radius + shift {
            return Err(ZooError::Parameter(format!(
                "modulus table ends at {end}, shifted ball needs {}",
                radius + shift
            )));
        }
    }
    Ok(LipschitzModulus::sampled_upper(uniform_nodes(radius, RADIUS_NODES), |r| {
        k.eval(r + shift)
    })?)
}

/// The scalar map `x -> a + K(|x|)`, which coincides with its own majorant
/// `a_+` on the nonnegative axis; every certified bound is attained by it.
pub fn self_majorizing(profile: &MajorantProfile) -> Result<OperatorHandle, ZooError> {
    let p = profile.clone();
    let apply = Arc::new(move |x: &[f64]| vec![p.a() + p.primitive(x[0].abs())]);
    OperatorHandle::new(
        apply,
        vec![0.0],
        StateNorm::Euclidean,
        profile.modulus().clone(),
        profile.radius(),
        None,
    )
    .map_err(to_zoo)
}

pub(crate) fn check_center(center: &Option<Vec<f64>>, dim: usize) -> Result<Vec<f64>, ZooError> {
    match center {
        Some(c) if c.len() != dim => Err(ZooError::Dimension(format!(
            "center has {} entries, expected {dim}",
            c.len()
        ))),
        Some(c) => Ok(c.clone()),
        None => Ok(vec![0.0; dim]),
    }
}

pub(crate) fn check_radius(radius: f64) -> Result<(), ZooError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(ZooError::Parameter(format!("radius {radius} must be positive")));
    }
    Ok(())
}

pub(crate) fn to_zoo(e: crate::error::IterationError) -> ZooError {
    match e {
        crate::error::IterationError::Majorant(m) => ZooError::Majorant(m),
        other => ZooError::Parameter(other.to_string()),
    }
}
