//! Built-in functions selectable by name from a config.

use std::f64::consts::PI;
use std::sync::Arc;

use majfix_core::zoo::{CompositionSpec, Fn2, ScalarFn, UrysohnSpec};
use majfix_core::{LipschitzModulus, PowerTerm};

use crate::error::CliError;

pub const KERNELS: &[&str] = &["product", "one", "exp_product", "min"];
pub const NONLINEARITIES: &[&str] = &["square", "cube", "sin", "atan", "identity", "zero"];
pub const FUNCTIONS: &[&str] = &["zero", "one", "identity", "sin_pi"];
pub const URYSOHN: &[&str] = &["quadratic", "affine"];
pub const COMPOSITION: &[&str] = &["linear_quadratic"];

fn unknown(what: &str, name: &str, known: &[&str]) -> CliError {
    CliError::Config(format!("unknown {what} {name:?}; known: {}", known.join(", ")))
}

pub fn kernel(name: &str) -> Result<Fn2, CliError> {
    Ok(match name {
        "product" => Arc::new(|t, s| t * s),
        "one" => Arc::new(|_, _| 1.0),
        "exp_product" => Arc::new(|t, s| (t * s).exp()),
        "min" => Arc::new(|t: f64, s: f64| t.min(s)),
        _ => return Err(unknown("kernel", name, KERNELS)),
    })
}

/// A scalar nonlinearity with its modulus `w(r)` on `|u| <= r`.
pub fn nonlinearity(name: &str) -> Result<(ScalarFn, LipschitzModulus), CliError> {
    let power = |c: f64, e: f64| LipschitzModulus::power_sum(vec![PowerTerm::new(c, e)]);
    let (f, w): (ScalarFn, _) = match name {
        "square" => (Arc::new(|x| x * x), power(2.0, 1.0)),
        "cube" => (Arc::new(|x| x * x * x), power(3.0, 2.0)),
        "sin" => (Arc::new(f64::sin), LipschitzModulus::constant(1.0)),
        "atan" => (Arc::new(f64::atan), LipschitzModulus::constant(1.0)),
        "identity" => (Arc::new(|x| x), LipschitzModulus::constant(1.0)),
        "zero" => (Arc::new(|_| 0.0), LipschitzModulus::constant(0.0)),
        _ => return Err(unknown("nonlinearity", name, NONLINEARITIES)),
    };
    Ok((f, w?))
}

pub fn function(name: &str) -> Result<fn(f64) -> f64, CliError> {
    Ok(match name {
        "zero" => |_| 0.0,
        "one" => |_| 1.0,
        "identity" => |t| t,
        "sin_pi" => |t| (PI * t).sin(),
        _ => return Err(unknown("function", name, FUNCTIONS)),
    })
}

pub fn urysohn(name: &str, center: Option<Vec<f64>>) -> Result<UrysohnSpec, CliError> {
    Ok(match name {
        // K = 0.1 s u^2 + 0.05 v + t
        "quadratic" => UrysohnSpec {
            kernel: Arc::new(|t, s, u, v| 0.1 * s * u * u + 0.05 * v + t),
            l: Arc::new(|_, s, r| 0.2 * s * r),
            m: Arc::new(|_, _, _| 0.05),
            center,
        },
        // K = 0.3 t s u + 0.2 v + 1
        "affine" => UrysohnSpec {
            kernel: Arc::new(|t, s, u, v| 0.3 * t * s * u + 0.2 * v + 1.0),
            l: Arc::new(|t, s, _| 0.3 * t * s),
            m: Arc::new(|_, _, _| 0.2),
            center,
        },
        _ => return Err(unknown("urysohn demo", name, URYSOHN)),
    })
}

pub fn composition(name: &str, center: Option<Vec<f64>>) -> Result<CompositionSpec, CliError> {
    Ok(match name {
        // F = 0.5 u + 0.25 v + 0.2, K = s u^2
        "linear_quadratic" => CompositionSpec {
            outer: Arc::new(|_, u, v| 0.5 * u + 0.25 * v + 0.2),
            l: Arc::new(|_, _, _| 0.5),
            m: Arc::new(|_, _, _| 0.25),
            inner: Arc::new(|_, s, u| s * u * u),
            n0: Arc::new(|_, s, r| s * r * r),
            n: Arc::new(|_, s, r| 2.0 * s * r),
            center,
        },
        _ => return Err(unknown("composition demo", name, COMPOSITION)),
    })
}

/// Piecewise-linear interpolant through `(x_i, y_i)`, constant outside, with
/// its largest slope as a global Lipschitz constant.
pub fn table_nonlinearity(x: Vec<f64>, y: Vec<f64>) -> (ScalarFn, f64) {
    let slope = x
        .windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| ((ys[1] - ys[0]) / (xs[1] - xs[0])).abs())
        .fold(0.0, f64::max);
    let f = Arc::new(move |u: f64| {
        let n = x.len();
        if u <= x[0] {
            return y[0];
        }
        if u >= x[n - 1] {
            return y[n - 1];
        }
        let i = x.partition_point(|&xi| xi <= u) - 1;
        let t = (u - x[i]) / (x[i + 1] - x[i]);
        y[i] + t * (y[i + 1] - y[i])
    });
    (f, slope)
}
