//! The four subcommands as library functions.

use majfix_core::majorant::DEFAULT_TOL;
use majfix_core::zoo::lr_critical_a;
use majfix_core::{
    analyze, certify_trace, eval_majorants, iterate, Interval, IterationError, MajorantError,
    MajorantProfile, StoppingRule, ZoneReport,
};

use crate::build::Problem;
use crate::error::{CliError, EXIT_OK, EXIT_VIOLATION};
use crate::report::{
    AnalyzeDoc, CertificationDoc, CompareDoc, CriticalDoc, SolveDoc, ViolationDoc,
};

pub const DEFAULT_BOUND_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_STEPS: usize = 10_000;
pub const DEFAULT_SAMPLES: usize = 201;

/// Command-line values that take precedence over the config's `[settings]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub bound_tol: Option<f64>,
    pub max_steps: Option<usize>,
    pub start_offset: Option<f64>,
    pub samples: Option<usize>,
}

impl Overrides {
    fn check(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(v) if !(v.is_finite() && v > 0.0) => {
                Err(CliError::Config(format!("--{name} must be positive, got {v}")))
            }
            _ => Ok(()),
        };
        positive("tol", self.tol)?;
        positive("bound-tol", self.bound_tol)?;
        if let Some(o) = self.start_offset {
            if !(o.is_finite() && o >= 0.0) {
                return Err(CliError::Config(format!("--start-offset must be nonnegative, got {o}")));
            }
        }
        if self.max_steps == Some(0) {
            return Err(CliError::Config("--max-steps must be at least 1".into()));
        }
        if matches!(self.samples, Some(n) if n < 2) {
            return Err(CliError::Config("--samples must be at least 2".into()));
        }
        Ok(())
    }
}

fn tol(p: &Problem, o: &Overrides) -> f64 {
    o.tol.or(p.settings.tol).unwrap_or(DEFAULT_TOL)
}

fn report(p: &Problem, o: &Overrides) -> Result<ZoneReport, CliError> {
    o.check()?;
    Ok(analyze(p.profile(), tol(p, o))?)
}

fn critical(p: &Problem) -> Result<Option<CriticalDoc>, CliError> {
    let Some((c, m)) = p.multilinear else {
        return Ok(None);
    };
    let a = p.profile().a();
    if m < 2 || c == 0.0 {
        return Ok(None);
    }
    let a_cr = lr_critical_a(c, m)?;
    Ok(Some(CriticalDoc {
        norm: c,
        degree: m,
        a,
        a_cr,
        below_critical: a <= a_cr,
    }))
}

pub fn run_analyze(p: &Problem, o: &Overrides) -> Result<AnalyzeDoc, CliError> {
    let r = report(p, o)?;
    Ok(AnalyzeDoc::new(p.kind, &r, critical(p)?))
}

/// A solve document together with the exit code it calls for.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub doc: SolveDoc,
    pub exit_code: i32,
}

pub fn run_solve(p: &Problem, o: &Overrides) -> Result<SolveOutcome, CliError> {
    let r = report(p, o)?;
    let offset = o.start_offset.or(p.settings.start_offset).unwrap_or(0.0);
    if let Some(w) = &r.no_existence {
        let doc = SolveDoc {
            kind: p.kind.to_string(),
            status: "no_existence",
            r_star: None,
            start_offset: offset,
            steps: Vec::new(),
            final_bound: None,
            solution: Vec::new(),
            solution_norm: None,
            certification: None,
            violation: None,
            no_existence: Some(w.into()),
        };
        return Ok(SolveOutcome {
            doc,
            exit_code: EXIT_OK,
        });
    }
    let rule = StoppingRule::new(
        o.bound_tol.or(p.settings.bound_tol).unwrap_or(DEFAULT_BOUND_TOL),
        o.max_steps.or(p.settings.max_steps).unwrap_or(DEFAULT_MAX_STEPS),
    )?;
    let h = &p.handle;
    let xi0 = h.start_at_offset(offset);
    match iterate(h, &xi0, rule) {
        Ok((x, trace)) => {
            let mut doc = SolveDoc::from_trace(p.kind, offset, &trace, h.norm().norm(&x));
            doc.certification = Some(CertificationDoc::from(&certify_trace(&trace, None, h.norm())));
            Ok(SolveOutcome {
                doc,
                exit_code: EXIT_OK,
            })
        }
        Err(IterationError::BoundViolation {
            step,
            kind,
            observed,
            bound,
            trace,
        }) => {
            let norm = h.norm().norm(trace.last());
            let mut doc = SolveDoc::from_trace(p.kind, offset, &trace, norm);
            doc.violation = Some(ViolationDoc::new(step, kind, observed, bound));
            Ok(SolveOutcome {
                doc,
                exit_code: EXIT_VIOLATION,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Is `outer` strictly wider than `inner` at the upper end?
fn wider_above(outer: &Interval, inner: &Interval) -> bool {
    if outer.is_empty() {
        return false;
    }
    if inner.is_empty() {
        return true;
    }
    outer.hi > inner.hi || (outer.hi == inner.hi && outer.hi_closed && !inner.hi_closed)
}

pub fn run_compare(p: &Problem, o: &Overrides) -> Result<CompareDoc, CliError> {
    let r = report(p, o)?;
    // Both zones reach the same outer radius with the same closure.
    let coincide = !r.u_zone.is_empty()
        && !r.bc_zone.is_empty()
        && r.u_zone.hi == r.bc_zone.hi
        && r.u_zone.hi_closed == r.bc_zone.hi_closed;
    Ok(CompareDoc {
        kind: p.kind.to_string(),
        r_star: r.r_star,
        r_cr: r.r_cr,
        r_double_star: r.r_double_star,
        bc_zone: (&r.bc_zone).into(),
        u_zone: (&r.u_zone).into(),
        e_zone: (&r.e_zone).into(),
        banach_applicable: !r.bc_zone.is_empty(),
        majorization_strictly_wider: wider_above(&r.u_zone, &r.bc_zone),
        zones_coincide: coincide,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub r: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub bisectrix: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub name: String,
    pub value: f64,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    pub label: String,
    pub a: f64,
    pub r: f64,
    pub a_plus: f64,
}

/// Plot data: the majorant curves, the radius markers and, for multilinear
/// problems, `a_+` for offsets below, at and above the critical one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZonesData {
    pub curve: Vec<CurveRow>,
    pub markers: Vec<Marker>,
    pub family: Vec<FamilyRow>,
}

pub const CURVE_HEADER: [&str; 4] = ["r", "a_plus", "a_minus", "bisectrix"];
pub const MARKER_HEADER: [&str; 3] = ["name", "value", "closure"];
pub const FAMILY_HEADER: [&str; 4] = ["label", "a", "r", "a_plus"];

fn sample_points(radius: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if i + 1 == n {
            radius
        } else {
            radius * i as f64 / (n - 1) as f64
        }
    })
}

fn curve(profile: &MajorantProfile, n: usize) -> Result<Vec<CurveRow>, MajorantError> {
    sample_points(profile.radius(), n)
        .map(|r| {
            let (a_plus, a_minus) = eval_majorants(profile, r)?;
            Ok(CurveRow {
                r,
                a_plus,
                a_minus,
                bisectrix: r,
            })
        })
        .collect()
}

pub fn run_zones(p: &Problem, o: &Overrides) -> Result<ZonesData, CliError> {
    let r = report(p, o)?;
    let n = o.samples.or(p.settings.samples).unwrap_or(DEFAULT_SAMPLES);
    let profile = p.profile();
    let mut markers = Vec::new();
    let mut mark = |name: &str, value: Option<f64>, closed: bool| {
        if let Some(value) = value {
            markers.push(Marker {
                name: name.to_string(),
                value,
                closed,
            });
        }
    };
    mark("r_lower", r.r_lower, true);
    mark("r_star", r.r_star, true);
    mark("r_cr", r.r_cr, false);
    mark("r_double_star", r.r_double_star, r.r_double_star_closed);
    mark("radius", Some(r.radius), true);

    let mut family = Vec::new();
    if let Some(c) = critical(p)? {
        let offsets = [0.0, 0.5 * c.a_cr, c.a_cr, 1.5 * c.a_cr];
        for (i, a) in offsets.into_iter().enumerate() {
            let member = profile.with_offset(a)?;
            for row in curve(&member, n)? {
                family.push(FamilyRow {
                    label: format!("a{i}"),
                    a,
                    r: row.r,
                    a_plus: row.a_plus,
                });
            }
        }
    }
    Ok(ZonesData {
        curve: curve(profile, n)?,
        markers,
        family,
    })
}

fn csv_text<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("ascii output")
}

impl ZonesData {
    pub fn curve_csv(&self) -> String {
        csv_text(
            CURVE_HEADER,
            self.curve.iter().map(|c| {
                [c.r, c.a_plus, c.a_minus, c.bisectrix].map(|v| format!("{v}"))
            }),
        )
    }

    pub fn markers_csv(&self) -> String {
        csv_text(
            MARKER_HEADER,
            self.markers.iter().map(|m| {
                let closure = if m.closed { "closed" } else { "open" };
                [m.name.clone(), format!("{}", m.value), closure.to_string()]
            }),
        )
    }

    pub fn family_csv(&self) -> String {
        csv_text(
            FAMILY_HEADER,
            self.family.iter().map(|f| {
                [f.label.clone(), format!("{}", f.a), format!("{}", f.r), format!("{}", f.a_plus)]
            }),
        )
    }

    /// All tables in one text, separated by blank lines.
    pub fn combined(&self) -> String {
        let mut out = format!("{}\n{}", self.curve_csv(), self.markers_csv());
        if !self.family.is_empty() {
            out.push('\n');
            out.push_str(&self.family_csv());
        }
        out
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64, CliError> {
    field
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: {field:?} is not a number")))
}

/// Reads back any mix of the tables written by [`ZonesData`], each starting
/// with its header line and separated by blank lines.
pub fn parse_zones(text: &str) -> Result<ZonesData, CliError> {
    let mut data = ZonesData::default();
    let mut header: Option<Vec<String>> = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            header = None;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let Some(h) = &header else {
            let known = [&CURVE_HEADER[..], &MARKER_HEADER[..], &FAMILY_HEADER[..]];
            if !known.iter().any(|k| k == &fields.as_slice()) {
                return Err(CliError::Config(format!("line {lineno}: unknown table header {line:?}")));
            }
            header = Some(fields.iter().map(|f| f.to_string()).collect());
            continue;
        };
        if fields.len() != h.len() {
            return Err(CliError::Config(format!(
                "line {lineno}: expected {} fields, found {}",
                h.len(),
                fields.len()
            )));
        }
        match h[0].as_str() {
            "r" => data.curve.push(CurveRow {
                r: parse_f64(fields[0], lineno)?,
                a_plus: parse_f64(fields[1], lineno)?,
                a_minus: parse_f64(fields[2], lineno)?,
                bisectrix: parse_f64(fields[3], lineno)?,
            }),
            "name" => data.markers.push(Marker {
                name: fields[0].to_string(),
                value: parse_f64(fields[1], lineno)?,
                closed: match fields[2] {
                    "closed" => true,
                    "open" => false,
                    other => {
                        return Err(CliError::Config(format!("line {lineno}: closure {other:?}")))
                    }
                },
            }),
            _ => data.family.push(FamilyRow {
                label: fields[0].to_string(),
                a: parse_f64(fields[1], lineno)?,
                r: parse_f64(fields[2], lineno)?,
                a_plus: parse_f64(fields[3], lineno)?,
            }),
        }
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::load_preset;

    fn preset(name: &str) -> Problem {
        load_preset(name).unwrap()
    }

    #[test]
    fn quadratic_analyze_document() {
        let doc = run_analyze(&preset("quadratic"), &Overrides::default()).unwrap();
        // r^2 + r - 0.1875 = 0
        assert!((doc.r_lower.unwrap() - (-1.0 + 1.75_f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((doc.r_star.unwrap() - 0.25).abs() < 1e-12);
        assert!((doc.r_cr.unwrap() - 0.5).abs() < 1e-12);
        assert!((doc.r_double_star.unwrap() - 0.75).abs() < 1e-12);
        assert!(!doc.r_double_star_closed);
        assert!(doc.existence_certified);
    }

    #[test]
    fn multilinear_above_critical_is_a_certificate() {
        let doc = run_analyze(&preset("lr_no_existence"), &Overrides::default()).unwrap();
        assert!(!doc.existence_certified);
        let c = doc.critical.unwrap();
        assert_eq!(c.a_cr, 0.25);
        assert!(!c.below_critical);
        let w = doc.no_existence.unwrap();
        assert!((w.min_gap - 0.25).abs() < 1e-9);
    }

    #[test]
    fn zero_offset_solves_in_zero_steps() {
        let out = run_solve(&preset("zero_offset"), &Overrides::default()).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        assert!(out.doc.steps.is_empty());
        assert_eq!(out.doc.solution, vec![0.0]);
    }

    #[test]
    fn quadratic_steps_match_the_scalar_sequence() {
        let out = run_solve(&preset("quadratic"), &Overrides::default()).unwrap();
        assert_eq!(out.doc.status, "converged");
        for s in &out.doc.steps {
            let r_next = 0.1875 + s.r_n * s.r_n;
            assert!((s.step_norm - (r_next - s.r_n)).abs() <= 1e-15);
        }
        assert!(out.doc.certification.unwrap().passed);
    }

    #[test]
    fn halved_modulus_is_reported_with_exit_four() {
        let out = run_solve(&preset("halved"), &Overrides::default()).unwrap();
        assert_eq!(out.exit_code, EXIT_VIOLATION);
        let v = out.doc.violation.unwrap();
        assert_eq!(v.step, 1);
        assert_eq!(v.kind, "step_bound");
    }

    #[test]
    fn inadmissible_start_is_an_error() {
        let o = Overrides {
            start_offset: Some(0.9),
            ..Overrides::default()
        };
        let err = run_solve(&preset("quadratic"), &o).unwrap_err();
        assert!(matches!(err, CliError::InadmissibleStart { .. }));
    }

    #[test]
    fn compare_verdicts() {
        let t = run_compare(&preset("tangency"), &Overrides::default()).unwrap();
        assert!(!t.banach_applicable);
        assert!(t.majorization_strictly_wider);
        let b = run_compare(&preset("banach"), &Overrides::default()).unwrap();
        assert!(b.banach_applicable);
        assert!(b.zones_coincide);
        assert!(!b.majorization_strictly_wider);
        let z = run_compare(&preset("zero_offset"), &Overrides::default()).unwrap();
        assert!(z.banach_applicable);
    }

    #[test]
    fn zones_table_and_round_trip() {
        let o = Overrides {
            samples: Some(101),
            ..Overrides::default()
        };
        let z = run_zones(&preset("quadratic"), &o).unwrap();
        assert_eq!(z.curve.len(), 101);
        let mid = z.curve.iter().find(|c| c.r == 0.5).unwrap();
        assert_eq!(mid.a_plus, 0.4375);
        assert_eq!(parse_zones(&z.combined()).unwrap(), z);

        let t = run_zones(&preset("tangency"), &o).unwrap();
        for name in ["r_star", "r_cr", "r_double_star"] {
            let m = t.markers.iter().find(|m| m.name == name).unwrap();
            assert!((m.value - 0.5).abs() < 1e-9, "{name} = {}", m.value);
        }
    }

    #[test]
    fn multilinear_zones_carry_the_family() {
        let z = run_zones(&preset("lr_quadratic"), &Overrides::default()).unwrap();
        let labels: std::collections::BTreeSet<_> = z.family.iter().map(|f| f.label.as_str()).collect();
        assert_eq!(labels.len(), 4);
        assert_eq!(parse_zones(&z.combined()).unwrap(), z);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_zones("x,y\n1,2\n").is_err());
        assert!(parse_zones("r,a_plus,a_minus,bisectrix\n1,2,3\n").is_err());
        assert!(parse_zones("name,value,closure\nr_star,1,ajar\n").is_err());
    }

    #[test]
    fn overrides_are_checked() {
        let o = Overrides {
            tol: Some(-1.0),
            ..Overrides::default()
        };
        assert!(matches!(
            run_analyze(&preset("quadratic"), &o),
            Err(CliError::Config(_))
        ));
    }
}
