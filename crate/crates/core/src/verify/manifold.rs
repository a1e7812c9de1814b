//! Manifold spec files and the seeded random-manifold generator.

use std::fmt::Write as _;
use std::path::Path;

use rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chart::{unit_interval, Chart, TensorField};
use crate::error::{Error, Result};

/// On-disk description of `(M, G, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub dimension: usize,
    pub coordinates: Vec<String>,
    #[serde(rename = "G")]
    pub big_g: Vec<Vec<String>>,
    pub pi: Vec<String>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub sample_box: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Parsed fields of a spec, before any derived object is built.
#[derive(Debug, Clone)]
pub struct ParsedSpec {
    pub chart: Chart,
    /// `G`, valence (0,2).
    pub big_g: TensorField,
    /// `π`, valence (0,1).
    pub pi: TensorField,
}

impl ManifoldSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    /// Hex SHA-256 of the compact JSON serialization.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("spec serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn parse(&self) -> Result<ParsedSpec> {
        let n = self.dimension;
        if self.coordinates.len() != n {
            return Err(Error::Shape(format!(
                "dimension {n} but {} coordinate names",
                self.coordinates.len()
            )));
        }
        if self.big_g.len() != n || self.big_g.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("G must be a {n}×{n} matrix")));
        }
        if self.pi.len() != n {
            return Err(Error::Shape(format!("pi must have {n} components, got {}", self.pi.len())));
        }
        let chart = match &self.sample_box {
            None => Chart::new(self.coordinates.clone())?,
            Some(b) => {
                if b.len() != n {
                    return Err(Error::Shape(format!("box must have {n} intervals, got {}", b.len())));
                }
                Chart::with_box(self.coordinates.clone(), b.iter().map(|&[lo, hi]| (lo, hi)).collect())?
            }
        };
        let parse = |text: &str, context: String| {
            chart.parse(text).map_err(|source| Error::Parse { context, source })
        };
        let mut rows = Vec::with_capacity(n);
        for (i, row) in self.big_g.iter().enumerate() {
            let mut parsed = Vec::with_capacity(n);
            for (j, text) in row.iter().enumerate() {
                parsed.push(parse(text, format!("G[{}][{}]", i + 1, j + 1))?);
            }
            rows.push(parsed);
        }
        let big_g = TensorField::from_matrix(rows)?;
        let pi = self
            .pi
            .iter()
            .enumerate()
            .map(|(i, text)| parse(text, format!("pi[{}]", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let pi = TensorField::from_components(n, 0, 1, pi)?;
        Ok(ParsedSpec { chart, big_g, pi })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Parameters of [`random_manifold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomManifoldConfig {
    pub seed: u64,
    pub dimension: usize,
    /// Amplitude `ε` of the perturbation of `g` and of `F`.
    pub epsilon: f64,
    /// Maximal total degree of the polynomial entries.
    pub degree: u32,
    /// Adds one `sin` term to every entry of `S` and `K`.
    pub trig: bool,
}

impl RandomManifoldConfig {
    pub fn new(seed: u64, dimension: usize) -> Self {
        RandomManifoldConfig {
            seed,
            dimension,
            epsilon: 0.1,
            degree: 2,
            trig: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.dimension) {
            return Err(Error::Config(format!("dimension must be 2..=4, got {}", self.dimension)));
        }
        if !(0.0..0.5).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon must lie in [0, 0.5), got {}", self.epsilon)));
        }
        Ok(())
    }
}

pub const MAX_GENERATION_ATTEMPTS: usize = 10;

/// Exponent vectors of total degree `≤ d`, ordered by degree and then
/// lexicographically from the last variable.
fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=d {
        rec(n, total, &mut Vec::new(), &mut out);
    }
    out
}

fn coefficient(rng: &mut SplitMix64) -> f64 {
    2.0 * unit_interval(rng) - 1.0
}

fn term(c: f64, exps: &[u32], names: &[String]) -> String {
    let mut s = format!("({c})");
    for (name, &e) in names.iter().zip(exps) {
        match e {
            0 => {}
            1 => write!(s, "*{name}").unwrap(),
            _ => write!(s, "*{name}^{e}").unwrap(),
        }
    }
    s
}

/// Random polynomial in the chart coordinates, every coefficient drawn from
/// `[−1, 1]` and multiplied by `scale`.
fn polynomial(rng: &mut SplitMix64, names: &[String], monos: &[Vec<u32>], trig: bool, scale: f64) -> String {
    let mut terms: Vec<String> = monos
        .iter()
        .map(|m| term(scale * coefficient(rng), m, names))
        .collect();
    if trig {
        let c = scale * coefficient(rng);
        let k = (unit_interval(rng) * names.len() as f64) as usize;
        terms.push(format!("({c})*sin({})", names[k.min(names.len() - 1)]));
    }
    terms.join(" + ")
}

/// `G = I + ε S + ε K` with `S` symmetric and `K` antisymmetric polynomial
/// matrices whose entries are bounded by 1 on `[−1, 1]^n`, plus a random
/// polynomial `π`. Deterministic in `cfg`.
#[allow(clippy::needless_range_loop)]
pub fn random_manifold(cfg: &RandomManifoldConfig) -> Result<ManifoldSpec> {
    cfg.validate()?;
    let n = cfg.dimension;
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let monos = monomials(n, cfg.degree);
    let count = monos.len() + usize::from(cfg.trig);
    let bounded = cfg.epsilon / count as f64;
    let mut rng = SplitMix64::seed_from_u64(cfg.seed);

    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let mut big_g = vec![vec![String::new(); n]; n];
        for i in 0..n {
            let s = polynomial(&mut rng, &names, &monos, cfg.trig, bounded);
            big_g[i][i] = format!("1 + {s}");
            for j in i + 1..n {
                let s = polynomial(&mut rng, &names, &monos, cfg.trig, bounded);
                let k = polynomial(&mut rng, &names, &monos, cfg.trig, bounded);
                big_g[i][j] = format!("{s} + {k}");
                big_g[j][i] = format!("{s} - ({k})");
            }
        }
        let pi = (0..n)
            .map(|_| polynomial(&mut rng, &names, &monos, false, 1.0))
            .collect();
        let spec = ManifoldSpec {
            dimension: n,
            coordinates: names.clone(),
            big_g,
            pi,
            sample_box: None,
            note: Some(format!(
                "random: seed={} dim={} eps={} degree={} trig={}",
                cfg.seed, n, cfg.epsilon, cfg.degree, cfg.trig
            )),
        };
        let parsed = spec.parse()?;
        match crate::chart::split_metric(&parsed.big_g, &parsed.chart) {
            Ok(_) => return Ok(spec),
            Err(Error::Degenerate { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation {
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}
