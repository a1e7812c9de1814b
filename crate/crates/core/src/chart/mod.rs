//! Charts, sample points and the tensor fields living on them.

mod metric;
mod tensor;

use std::collections::HashSet;
use std::ops::Deref;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::expr::{self, Expr, FUNCTION_NAMES};

pub use metric::{
    compute_a, compute_p, metric_inverse_at, split_metric, GeneralizedMetric, GeneratorField,
    StructureField, DEGENERACY_EPS,
};
pub use tensor::{multi_indices, tensor_eval, NumTensor, TensorField};

/// Number of points in the validation sample set.
pub const STANDARD_SAMPLE_COUNT: usize = 50;
/// Seed of the validation sample set.
pub const STANDARD_SAMPLE_SEED: u64 = 0;
/// Fraction of each box edge trimmed from both faces before sampling.
pub const SAMPLE_MARGIN: f64 = 0.1;

/// A single coordinate patch: named coordinates over an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    names: Vec<String>,
    bounds: Vec<(f64, f64)>,
}

impl Chart {
    /// Chart over the default box `[-1, 1]^n`.
    pub fn new(names: Vec<String>) -> Result<Self> {
        let n = names.len();
        Self::with_box(names, vec![(-1.0, 1.0); n])
    }

    pub fn with_box(names: Vec<String>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if names.len() < 2 {
            return Err(Error::InvalidChart(format!(
                "dimension must be at least 2, got {}",
                names.len()
            )));
        }
        if bounds.len() != names.len() {
            return Err(Error::InvalidChart(format!(
                "{} coordinates but {} box intervals",
                names.len(),
                bounds.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            let valid = name
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::InvalidChart(format!("`{name}` is not an identifier")));
            }
            if FUNCTION_NAMES.contains(&name.as_str()) {
                return Err(Error::InvalidChart(format!("`{name}` is a reserved function name")));
            }
            if !seen.insert(name) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{name}`")));
            }
        }
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidChart(format!("empty or infinite interval [{lo}, {hi}]")));
            }
        }
        Ok(Chart { names, bounds })
    }

    /// Chart with coordinates `x1, ..., xn` over `[-1, 1]^n`.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::new((1..=dim).map(|i| format!("x{i}")).collect())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Parses an expression against this chart's coordinate names.
    pub fn parse(&self, text: &str) -> std::result::Result<Expr, expr::ParseError> {
        expr::parse(text, &self.names)
    }

    /// Uniform points in the box shrunk by [`SAMPLE_MARGIN`] from every face,
    /// drawn from a SplitMix64 stream seeded with `seed`.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = SplitMix64::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let coords = self
                    .bounds
                    .iter()
                    .map(|&(lo, hi)| {
                        let w = hi - lo;
                        lo + SAMPLE_MARGIN * w + unit_interval(&mut rng) * (1.0 - 2.0 * SAMPLE_MARGIN) * w
                    })
                    .collect();
                Point(coords)
            })
            .collect()
    }

    pub fn standard_samples(&self) -> Vec<Point> {
        self.sample_points(STANDARD_SAMPLE_COUNT, STANDARD_SAMPLE_SEED)
    }
}

/// Uniform double in `[0, 1)` from the top 53 bits of one `u64` draw.
pub fn unit_interval(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Chart coordinates of a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Shape(format!("non-finite point {coords:?}")));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_names() {
        assert!(Chart::new(vec!["x".into()]).is_err());
        assert!(Chart::new(vec!["x".into(), "x".into()]).is_err());
        assert!(Chart::new(vec!["x".into(), "sin".into()]).is_err());
        assert!(Chart::new(vec!["x".into(), "2y".into()]).is_err());
        assert!(Chart::with_box(vec!["x".into(), "y".into()], vec![(0.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn samples_stay_inside_the_shrunk_box() {
        let chart = Chart::with_box(vec!["u".into(), "v".into()], vec![(0.0, 10.0), (-2.0, 2.0)]).unwrap();
        for p in chart.sample_points(200, 7) {
            assert!((1.0..=9.0).contains(&p[0]));
            assert!((-1.6..=1.6).contains(&p[1]));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let chart = Chart::standard(3).unwrap();
        assert_eq!(chart.sample_points(10, 42), chart.sample_points(10, 42));
        assert_ne!(chart.sample_points(10, 42), chart.sample_points(10, 43));
    }

    #[test]
    fn point_rejects_non_finite() {
        assert!(Point::new(vec![0.0, f64::NAN]).is_err());
    }
}
