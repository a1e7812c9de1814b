//! Identity checks, their execution and reporting.

mod geometry;
mod manifold;
mod registry;

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::chart::Point;
use crate::error::{Error, Result};
use crate::expr::Tape;

pub use geometry::{Geometry, TENSOR_NAMES};
pub use manifold::{
    random_manifold, ManifoldSpec, ParsedSpec, RandomManifoldConfig, MAX_GENERATION_ATTEMPTS,
};
pub use registry::{find, registry, CheckConfig, IdentityCheck, Pair, Procedure, ANCHORS};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_POINTS: usize = 50;

/// Sampling and acceptance settings for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            points: DEFAULT_POINTS,
            seed: 0,
            tol: DEFAULT_TOLERANCE,
        }
    }
}

/// Disagreement between two sides over a set of points.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Residual {
    /// `max |L − R|`.
    pub max_abs: f64,
    /// `max |L − R| / (1 + max(|L|, |R|))`, all maxima over every component
    /// and point.
    pub max_rel: f64,
}

impl Residual {
    fn worst(self, other: Residual) -> Residual {
        Residual {
            max_abs: self.max_abs.max(other.max_abs),
            max_rel: self.max_rel.max(other.max_rel),
        }
    }
}

/// Evaluation failure at a specific point.
#[derive(Debug)]
pub struct Inconclusive {
    pub point: Vec<f64>,
    pub source: Error,
}

/// Compares both sides of `pair` at every point.
pub fn residual(pair: &Pair, points: &[Point]) -> Result<Residual, Inconclusive> {
    let (lhs, rhs) = (&pair.lhs, &pair.rhs);
    if lhs.dim() != rhs.dim() || lhs.valence() != rhs.valence() {
        return Err(Inconclusive {
            point: Vec::new(),
            source: Error::Shape(format!(
                "{}: sides have valence {:?} and {:?}",
                pair.label,
                lhs.valence(),
                rhs.valence()
            )),
        });
    }
    let count = lhs.components().len();
    let roots: Vec<_> = lhs.components().iter().chain(rhs.components()).cloned().collect();
    let tape = Tape::compile(&roots);
    let (mut diff, mut mag) = (0.0_f64, 0.0_f64);
    for p in points {
        let values = match tape.evaluate(p) {
            Ok(v) => v,
            Err(_) => {
                // Re-evaluate per side to name the failing component.
                let source = lhs
                    .evaluate(p)
                    .and_then(|_| rhs.evaluate(p))
                    .err()
                    .unwrap_or_else(|| Error::Shape("evaluation failed".into()));
                return Err(Inconclusive {
                    point: p.to_vec(),
                    source,
                });
            }
        };
        let (l, r) = values.split_at(count);
        for (a, b) in l.iter().zip(r) {
            diff = diff.max((a - b).abs());
            mag = mag.max(a.abs()).max(b.abs());
        }
    }
    if diff.is_nan() || mag.is_nan() {
        diff = f64::INFINITY;
    }
    Ok(Residual {
        max_abs: diff,
        max_rel: diff / (1.0 + mag),
    })
}

/// Per-pair detail kept alongside a report entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub label: String,
    pub residual: Residual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEntry {
    pub name: String,
    pub anchor: String,
    pub max_abs_err: Option<f64>,
    pub max_rel_err: Option<f64>,
    pub points: usize,
    pub pass: bool,
    /// Residual of the second side of a co-vanishing check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner_rel_err: Option<f64>,
    /// Set when the check could not be evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub pairs: Vec<PairResult>,
}

impl ReportEntry {
    fn inconclusive(check: &IdentityCheck, points: usize, message: String) -> Self {
        ReportEntry {
            name: check.name.to_string(),
            anchor: check.anchor.to_string(),
            max_abs_err: None,
            max_rel_err: None,
            points,
            pass: false,
            partner_rel_err: None,
            error: Some(message),
            pairs: Vec::new(),
        }
    }
}

fn measure(pairs: &[Pair], points: &[Point]) -> Result<Vec<PairResult>, String> {
    pairs
        .iter()
        .map(|pair| {
            residual(pair, points)
                .map(|residual| PairResult {
                    label: pair.label.clone(),
                    residual,
                })
                .map_err(|e| format!("inconclusive at {:?} in {}: {}", e.point, pair.label, e.source))
        })
        .collect()
}

/// Evaluates one check on `geo` at `opts.points` sampled points.
pub fn run_check(check: &IdentityCheck, geo: &Geometry, cfg: &CheckConfig, opts: &RunOptions) -> ReportEntry {
    let points = geo.chart.sample_points(opts.points, opts.seed);
    let built = match check.procedure {
        Procedure::Identity(build) => build(geo, cfg).map(|pairs| (pairs, false)),
        Procedure::CoVanishing(build) => build(geo, cfg).map(|pairs| (pairs.to_vec(), true)),
    };
    let (pairs, covanishing) = match built {
        Ok(b) => b,
        Err(e) => return ReportEntry::inconclusive(check, opts.points, e.to_string()),
    };
    let results = match measure(&pairs, &points) {
        Ok(r) => r,
        Err(message) => return ReportEntry::inconclusive(check, opts.points, message),
    };
    let (main, partner, pass) = if covanishing {
        let (a, b) = (results[0].residual, results[1].residual);
        let pass = (a.max_rel <= opts.tol) == (b.max_rel <= opts.tol);
        (a, Some(b.max_rel), pass)
    } else {
        let worst = results.iter().fold(Residual::default(), |acc, r| acc.worst(r.residual));
        (worst, None, worst.max_rel <= opts.tol)
    };
    ReportEntry {
        name: check.name.to_string(),
        anchor: check.anchor.to_string(),
        max_abs_err: Some(main.max_abs),
        max_rel_err: Some(main.max_rel),
        points: opts.points,
        pass,
        partner_rel_err: partner,
        error: None,
        pairs: results,
    }
}

/// Runs `checks` concurrently; entries come back in input order.
pub fn run_checks(checks: &[IdentityCheck], geo: &Geometry, cfg: &CheckConfig, opts: &RunOptions) -> Vec<ReportEntry> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(checks.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<ReportEntry>>> = Mutex::new(vec![None; checks.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(check) = checks.get(i) else { break };
                let entry = run_check(check, geo, cfg, opts);
                slots.lock().expect("report slots")[i] = Some(entry);
            });
        }
    });
    slots
        .into_inner()
        .expect("report slots")
        .into_iter()
        .map(|e| e.expect("every check ran"))
        .collect()
}

/// Runs the whole registry.
pub fn run_suite(geo: &Geometry, cfg: &CheckConfig, opts: &RunOptions) -> Vec<ReportEntry> {
    run_checks(&registry(), geo, cfg, opts)
}

/// Metadata printed with a full suite report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteMeta {
    pub seed: u64,
    pub dimension: usize,
    pub spec_hash: String,
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
}

#[derive(Serialize)]
struct Document<'a> {
    checks: &'a [ReportEntry],
    suite: &'a SuiteMeta,
}

fn fmt_err(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"))
}

/// Renders reports. JSON without `meta` is a bare array; with `meta` it is
/// `{"checks": [...], "suite": {...}}`.
pub fn emit_report(reports: &[ReportEntry], format: ReportFormat, meta: Option<&SuiteMeta>) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = match meta {
                Some(suite) => serde_json::to_string_pretty(&Document { checks: reports, suite }),
                None => serde_json::to_string_pretty(reports),
            }
            .expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::Table => {
            let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0).max("check".len());
            let mut s = format!(
                "{:<width$}  {:<6}  {:>10}  {:>10}  {:>6}  anchor\n",
                "check", "status", "max_abs", "max_rel", "points"
            );
            for r in reports {
                let status = match (&r.error, r.pass) {
                    (Some(_), _) => "INCONC",
                    (None, true) => "pass",
                    (None, false) => "FAIL",
                };
                writeln!(
                    s,
                    "{:<width$}  {:<6}  {:>10}  {:>10}  {:>6}  {}",
                    r.name,
                    status,
                    fmt_err(r.max_abs_err),
                    fmt_err(r.max_rel_err),
                    r.points,
                    r.anchor
                )
                .unwrap();
                if let Some(e) = &r.error {
                    writeln!(s, "{:width$}  {e}", "").unwrap();
                }
            }
            if let Some(m) = meta {
                let passed = reports.iter().filter(|r| r.pass).count();
                writeln!(
                    s,
                    "\n{passed}/{} passed  seed={} dimension={} spec_hash={}",
                    reports.len(),
                    m.seed,
                    m.dimension,
                    m.spec_hash
                )
                .unwrap();
                if let Some(ms) = m.elapsed_ms {
                    writeln!(s, "elapsed {ms} ms").unwrap();
                }
            }
            s
        }
    }
}
