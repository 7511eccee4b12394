//! Grids, composite Newton-Cotes quadrature, discrete norms and the
//! Zaanen-norm estimator for sampled kernels.

use crate::error::GridError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Trapezoid,
    Simpson,
}

impl QuadratureRule {
    pub fn name(&self) -> &'static str {
        match self {
            QuadratureRule::Trapezoid => "trapezoid",
            QuadratureRule::Simpson => "simpson",
        }
    }
}

/// Uniform nodes on `[a, b]` with composite quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: QuadratureRule,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize, rule: QuadratureRule) -> Result<Self, GridError> {
        if !a.is_finite() || !b.is_finite() || !(b > a) {
            return Err(GridError::BadInterval { a, b });
        }
        let ok = match rule {
            QuadratureRule::Trapezoid => n >= 2,
            QuadratureRule::Simpson => n >= 3 && n % 2 == 1,
        };
        if !ok {
            return Err(GridError::BadNodeCount {
                rule: rule.name(),
                n,
            });
        }
        let last = n - 1;
        let h = (b - a) / last as f64;
        let nodes: Vec<f64> = (0..n)
            .map(|i| if i == last { b } else { a + (b - a) * i as f64 / last as f64 })
            .collect();
        let weights: Vec<f64> = match rule {
            QuadratureRule::Trapezoid => (0..n)
                .map(|i| if i == 0 || i == last { 0.5 * h } else { h })
                .collect(),
            QuadratureRule::Simpson => (0..n)
                .map(|i| {
                    if i == 0 || i == last {
                        h / 3.0
                    } else if i % 2 == 1 {
                        4.0 * h / 3.0
                    } else {
                        2.0 * h / 3.0
                    }
                })
                .collect(),
        };
        Ok(Grid {
            a,
            b,
            nodes,
            weights,
            rule,
        })
    }

    /// Simpson when `n` is odd, trapezoid otherwise.
    pub fn with_default_rule(a: f64, b: f64, n: usize) -> Result<Self, GridError> {
        let rule = if n % 2 == 1 && n >= 3 {
            QuadratureRule::Simpson
        } else {
            QuadratureRule::Trapezoid
        };
        Self::new(a, b, n, rule)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&t| f(t)).collect()
    }

    fn check_len(&self, got: usize) -> Result<(), GridError> {
        if got != self.len() {
            return Err(GridError::LengthMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }
}

/// `sum_l w_l f_l`.
pub fn quadrature_integrate(grid: &Grid, samples: &[f64]) -> Result<f64, GridError> {
    grid.check_len(samples.len())?;
    Ok(grid.weights.iter().zip(samples).map(|(w, f)| w * f).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Sup,
    Lp(f64),
}

/// Discrete sup norm or quadrature `L_p` norm of grid samples.
pub fn lp_norm(grid: &Grid, samples: &[f64], p: NormKind) -> Result<f64, GridError> {
    grid.check_len(samples.len())?;
    match p {
        NormKind::Sup => Ok(samples.iter().fold(0.0, |m, v| m.max(v.abs()))),
        NormKind::Lp(p) => {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(GridError::BadExponent(p));
            }
            Ok(weighted_norm(&grid.weights, samples, p))
        }
    }
}

fn weighted_norm(weights: &[f64], samples: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    weights
        .iter()
        .zip(samples)
        .map(|(w, v)| w * v.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Samples `z(t_i, s_l)` on a product grid, stored row-major in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    rows: Grid,
    cols: Grid,
    values: Vec<f64>,
}

impl KernelTable {
    pub fn new(rows: Grid, cols: Grid, values: Vec<f64>) -> Result<Self, GridError> {
        let expected = rows.len() * cols.len();
        if values.len() != expected {
            return Err(GridError::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite {
                row: i / cols.len(),
                col: i % cols.len(),
            });
        }
        Ok(KernelTable { rows, cols, values })
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(rows: &Grid, cols: &Grid, f: F) -> Result<Self, GridError> {
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for &t in rows.nodes() {
            for &s in cols.nodes() {
                values.push(f(t, s));
            }
        }
        Self::new(rows.clone(), cols.clone(), values)
    }

    /// Parses a kernel sampled on uniform nodes.
    ///
    /// Two layouts are accepted:
    ///
    /// * triples: a header `t,s,value` followed by one line per sample;
    /// * dense: a header whose first cell is a label (e.g. `t\s`) followed by
    ///   the `s` nodes, then one line per `t` node with its samples.
    ///
    /// Nodes must be uniformly spaced. The quadrature rule is `rule` when given,
    /// else Simpson for odd node counts and trapezoid for even ones.
    pub fn from_csv(text: &str, rule: Option<QuadratureRule>) -> Result<Self, GridError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| GridError::Csv("empty input".into()))?;
        let cells: Vec<&str> = header.split(',').map(str::trim).collect();
        let body: Vec<&str> = lines.collect();
        let is_triples = cells.len() == 3
            && cells[0].eq_ignore_ascii_case("t")
            && cells[1].eq_ignore_ascii_case("s");
        let (t_nodes, s_nodes, values) = if is_triples {
            parse_triples(&body)?
        } else {
            parse_dense(&cells, &body)?
        };
        let rows = grid_from_nodes(&t_nodes, rule)?;
        let cols = grid_from_nodes(&s_nodes, rule)?;
        Self::new(rows, cols, values)
    }

    pub fn rows(&self) -> &Grid {
        &self.rows
    }

    pub fn cols(&self) -> &Grid {
        &self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, l: usize) -> f64 {
        self.values[i * self.cols.len() + l]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.cols.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// `max_i sum_l w_l |z(t_i, s_l)|`, the norm of the integral operator on C.
    pub fn sup_row_norm(&self) -> f64 {
        let w = self.cols.weights();
        (0..self.rows.len())
            .map(|i| self.row(i).iter().zip(w).map(|(z, w)| w * z.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn parse_f64(cell: &str) -> Result<f64, GridError> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| GridError::Csv(format!("not a number: {cell:?}")))?;
    if !v.is_finite() {
        return Err(GridError::Csv(format!("not finite: {cell:?}")));
    }
    Ok(v)
}

/// Row nodes, column nodes and row-major values.
type Samples = (Vec<f64>, Vec<f64>, Vec<f64>);

fn parse_triples(body: &[&str]) -> Result<Samples, GridError> {
    let mut triples = Vec::with_capacity(body.len());
    for line in body {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 {
            return Err(GridError::Csv(format!("expected 3 cells in {line:?}")));
        }
        triples.push((parse_f64(cells[0])?, parse_f64(cells[1])?, parse_f64(cells[2])?));
    }
    let mut t: Vec<f64> = triples.iter().map(|x| x.0).collect();
    let mut s: Vec<f64> = triples.iter().map(|x| x.1).collect();
    t.sort_by(f64::total_cmp);
    t.dedup();
    s.sort_by(f64::total_cmp);
    s.dedup();
    if t.len().checked_mul(s.len()) != Some(triples.len()) {
        return Err(GridError::Csv(format!(
            "{} samples do not fill a {}x{} product grid",
            triples.len(),
            t.len(),
            s.len()
        )));
    }
    let mut values = vec![f64::NAN; t.len() * s.len()];
    for (ti, si, v) in triples {
        let i = t.binary_search_by(|x| x.total_cmp(&ti)).unwrap();
        let l = s.binary_search_by(|x| x.total_cmp(&si)).unwrap();
        let slot = &mut values[i * s.len() + l];
        if !slot.is_nan() {
            return Err(GridError::Csv(format!("duplicate sample at ({ti}, {si})")));
        }
        *slot = v;
    }
    Ok((t, s, values))
}

fn parse_dense(header: &[&str], body: &[&str]) -> Result<Samples, GridError> {
    if header.len() < 2 {
        return Err(GridError::Csv("dense header needs a label and s nodes".into()));
    }
    let s = header[1..].iter().map(|c| parse_f64(c)).collect::<Result<Vec<_>, _>>()?;
    let mut t = Vec::with_capacity(body.len());
    let mut values = Vec::with_capacity(body.len() * s.len());
    for line in body {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != s.len() + 1 {
            return Err(GridError::Csv(format!(
                "expected {} cells, got {} in {line:?}",
                s.len() + 1,
                cells.len()
            )));
        }
        t.push(parse_f64(cells[0])?);
        for c in &cells[1..] {
            values.push(parse_f64(c)?);
        }
    }
    Ok((t, s, values))
}

fn grid_from_nodes(nodes: &[f64], rule: Option<QuadratureRule>) -> Result<Grid, GridError> {
    if nodes.len() < 2 {
        return Err(GridError::Csv(format!("need at least 2 nodes, got {}", nodes.len())));
    }
    let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
    let grid = match rule {
        Some(rule) => Grid::new(a, b, nodes.len(), rule)?,
        None => Grid::with_default_rule(a, b, nodes.len())?,
    };
    let h = grid.length() / (nodes.len() - 1) as f64;
    for (x, y) in nodes.iter().zip(grid.nodes()) {
        if (x - y).abs() > 1e-9 * h.max(1.0) {
            return Err(GridError::Csv(format!("node {x} is not on a uniform grid")));
        }
    }
    Ok(grid)
}

/// Alternating-maximization estimate of the Zaanen norm
/// `sup { int int |z(t,s) x(s) y(t)| ds dt : |x|_{L_alpha} <= 1, |y|_{L_beta} <= 1 }`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZaanenEstimate {
    /// Final objective; a lower bound of the discrete norm.
    pub value: f64,
    /// Objective after each half-sweep.
    pub history: Vec<f64>,
    /// Extremal `x` on the `s` grid.
    pub x: Vec<f64>,
    /// Extremal `y` on the `t` grid.
    pub y: Vec<f64>,
}

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Maximizes `sum_l w_l v_l g_l` over `|v|_{L_p(w)} <= 1` for `g >= 0`;
/// returns the Hölder extremal and the optimal value `|g|_{L_p'(w)}`.
fn holder_extremal(weights: &[f64], g: &[f64], p: f64) -> (Vec<f64>, f64) {
    let q = conjugate(p);
    let value = weighted_norm(weights, g, q);
    if value == 0.0 {
        return (vec![0.0; g.len()], 0.0);
    }
    if p.is_infinite() {
        return (vec![1.0; g.len()], value);
    }
    if p == 1.0 {
        // all mass on the largest entry
        let (l, _) = g
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if *v > best.1 { (i, *v) } else { best });
        let mut v = vec![0.0; g.len()];
        v[l] = 1.0 / weights[l];
        return (v, value);
    }
    let v = g
        .iter()
        .map(|gi| (gi / value).powf(q - 1.0))
        .collect();
    (v, value)
}

/// Estimates `|z|_{Z(alpha, beta)}` by alternating Hölder-extremal updates.
///
/// Starts from `y` constant, so each half-sweep can only raise the objective.
/// `alpha` and `beta` may equal 1 (the conjugate is then the sup norm).
pub fn zaanen_norm_estimate(
    kernel: &KernelTable,
    alpha: f64,
    beta: f64,
    iters: usize,
) -> Result<ZaanenEstimate, GridError> {
    for p in [alpha, beta] {
        if !(p >= 1.0) || p.is_nan() {
            return Err(GridError::BadExponent(p));
        }
    }
    let (tw, sw) = (kernel.rows.weights(), kernel.cols.weights());
    let (nt, ns) = (kernel.rows.len(), kernel.cols.len());
    let abs: Vec<f64> = kernel.values.iter().map(|v| v.abs()).collect();

    let y_norm = weighted_norm(tw, &vec![1.0; nt], beta);
    let mut y = vec![1.0 / y_norm; nt];
    let mut x = vec![0.0; ns];
    let mut history = Vec::with_capacity(2 * iters);
    let mut value = 0.0_f64;
    for _ in 0..iters.max(1) {
        // g_l = sum_i w_i |z_il| y_i
        let mut g = vec![0.0; ns];
        for i in 0..nt {
            let c = tw[i] * y[i];
            if c == 0.0 {
                continue;
            }
            for (gl, z) in g.iter_mut().zip(&abs[i * ns..(i + 1) * ns]) {
                *gl += c * z;
            }
        }
        let (nx, vx) = holder_extremal(sw, &g, alpha);
        x = nx;
        value = value.max(vx);
        history.push(value);
        // h_i = sum_l w_l |z_il| x_l
        let h: Vec<f64> = (0..nt)
            .map(|i| {
                abs[i * ns..(i + 1) * ns]
                    .iter()
                    .zip(sw)
                    .zip(&x)
                    .map(|((z, w), xl)| z * w * xl)
                    .sum()
            })
            .collect();
        let (ny, vy) = holder_extremal(tw, &h, beta);
        y = ny;
        value = value.max(vy);
        history.push(value);
        if value == 0.0 {
            break;
        }
    }
    Ok(ZaanenEstimate {
        value,
        history,
        x,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadrature_examples() {
        let g = Grid::new(0.0, 1.0, 2, QuadratureRule::Trapezoid).unwrap();
        assert_eq!(quadrature_integrate(&g, &g.sample(|s| s)).unwrap(), 0.5);
        let g = Grid::new(0.0, 1.0, 3, QuadratureRule::Simpson).unwrap();
        assert_relative_eq!(quadrature_integrate(&g, &g.sample(|s| s.powi(3))).unwrap(), 0.25, epsilon = 1e-15);
        let g = Grid::new(0.0, 1.0, 101, QuadratureRule::Trapezoid).unwrap();
        let v = quadrature_integrate(&g, &g.sample(f64::exp)).unwrap();
        // trapezoid error (b-a) h^2 max|f''| / 12 = e / 120000
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 2e-5);
        assert!(quadrature_integrate(&g, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn norm_examples() {
        let g = Grid::new(0.0, 1.0, 101, QuadratureRule::Simpson).unwrap();
        assert_relative_eq!(lp_norm(&g, &vec![1.0; 101], NormKind::Lp(2.0)).unwrap(), 1.0, epsilon = 1e-14);
        let t = g.sample(|t| t);
        assert_relative_eq!(lp_norm(&g, &t, NormKind::Lp(2.0)).unwrap(), 1.0 / 3f64.sqrt(), epsilon = 1e-10);
        assert_eq!(lp_norm(&g, &t, NormKind::Sup).unwrap(), 1.0);
        assert!(lp_norm(&g, &t, NormKind::Lp(0.5)).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 1.0, 4, QuadratureRule::Simpson).is_err());
        assert!(Grid::new(0.0, 1.0, 1, QuadratureRule::Trapezoid).is_err());
        assert!(Grid::new(1.0, 0.0, 5, QuadratureRule::Trapezoid).is_err());
        assert!(Grid::new(0.0, f64::INFINITY, 5, QuadratureRule::Trapezoid).is_err());
        let g = Grid::new(-1.0, 2.0, 7, QuadratureRule::Simpson).unwrap();
        assert_eq!(g.nodes()[0], -1.0);
        assert_eq!(g.nodes()[6], 2.0);
    }

    #[test]
    fn weights_sum_to_length() {
        for n in [3, 5, 11, 101, 201, 257, 1001] {
            for rule in [QuadratureRule::Simpson, QuadratureRule::Trapezoid] {
                let g = Grid::new(0.0, 1.0, n, rule).unwrap();
                let s: f64 = g.weights().iter().sum();
                assert!((s - 1.0).abs() <= 4.0 * f64::EPSILON, "{rule:?} n={n}: {s}");
            }
        }
    }

    #[test]
    fn zaanen_rank_one() {
        let g = Grid::new(0.0, 1.0, 101, QuadratureRule::Simpson).unwrap();
        let one = KernelTable::from_fn(&g, &g, |_, _| 1.0).unwrap();
        let est = zaanen_norm_estimate(&one, 2.0, 2.0, 50).unwrap();
        assert_relative_eq!(est.value, 1.0, max_relative = 1e-2);
        let ts = KernelTable::from_fn(&g, &g, |t, s| t * s).unwrap();
        let est = zaanen_norm_estimate(&ts, 2.0, 2.0, 50).unwrap();
        assert_relative_eq!(est.value, 1.0 / 3.0, max_relative = 1e-2);
        assert!(est.history.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn zaanen_zero_and_l1() {
        let g = Grid::new(0.0, 1.0, 21, QuadratureRule::Simpson).unwrap();
        let zero = KernelTable::from_fn(&g, &g, |_, _| 0.0).unwrap();
        assert_eq!(zaanen_norm_estimate(&zero, 2.0, 2.0, 5).unwrap().value, 0.0);
        // alpha = 1: sup_s |t s|_{L_2} = 1/sqrt(3)
        let ts = KernelTable::from_fn(&g, &g, |t, s| t * s).unwrap();
        let est = zaanen_norm_estimate(&ts, 1.0, 2.0, 10).unwrap();
        assert_relative_eq!(est.value, 1.0 / 3f64.sqrt(), max_relative = 1e-12);
        assert!(zaanen_norm_estimate(&ts, 0.5, 2.0, 10).is_err());
    }

    #[test]
    fn kernel_csv_layouts() {
        let triples = "t,s,value\n0,0,0\n0,1,0\n1,0,0\n1,1,1\n0.5,0,0\n0.5,0.5,0.25\n0.5,1,0.5\n0,0.5,0\n1,0.5,0.5\n";
        let k = KernelTable::from_csv(triples, None).unwrap();
        assert_eq!(k.rows().len(), 3);
        assert_eq!(k.rows().rule(), QuadratureRule::Simpson);
        assert_eq!(k.get(1, 2), 0.5);
        let dense = "t\\s,0,0.5,1\n0,0,0,0\n0.5,0,0.25,0.5\n1,0,0.5,1\n";
        let d = KernelTable::from_csv(dense, None).unwrap();
        assert_eq!(d, k);
    }

    #[test]
    fn kernel_csv_errors() {
        assert!(KernelTable::from_csv("", None).is_err());
        assert!(KernelTable::from_csv("t,s,value\n0,0,1\n1,0,1\n0,1,1\n", None).is_err());
        assert!(KernelTable::from_csv("t,s,value\n0,0,1\n0,0,1\n1,0,1\n1,1,1\n0,1,1\n", None).is_err());
        assert!(KernelTable::from_csv("x,0,1\n0,1\n1,1,1\n", None).is_err());
        assert!(KernelTable::from_csv("x,0,0.1,1\n0,1,1,1\n1,1,1,1\n", None).is_err());
        assert!(KernelTable::from_csv("x,0,1\n0,nan,1\n1,1,1\n", None).is_err());
    }
}
