//! The split `G = g + F`, the structure tensor `A` and the generator `P`.
//!
//! `A` is stored `[k][i]` and defined by `F_{ij} = A^k_i g_{kj}`. The inverse
//! metric is built symbolically from the adjugate, `g^{jk} = C_{kj} / det g`,
//! so `A`, `P` and everything downstream stay differentiable; for a constant
//! `g` the folding constructors collapse all of it to constants.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{Chart, TensorField};
use crate::error::{Error, Result};
use crate::expr::Expr;

/// Smallest accepted `|det g|` at a sample point.
pub const DEGENERACY_EPS: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct GeneralizedMetric {
    /// The non-symmetric metric `G`.
    pub big_g: TensorField,
    /// Symmetric part.
    pub g: TensorField,
    /// Skew-symmetric part.
    pub f: TensorField,
    /// `g^{ij}`, valence (2,0).
    pub g_inv: TensorField,
    pub det_g: Expr,
}

impl GeneralizedMetric {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }
}

#[derive(Debug, Clone)]
pub struct StructureField {
    /// `A^k_i`, valence (1,1).
    pub a: TensorField,
}

impl StructureField {
    /// `A²`, i.e. `(A²)^k_i = A^k_m A^m_i`.
    pub fn squared(&self) -> TensorField {
        self.a.with_endomorphism_on_upper(0, &self.a)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorField {
    /// The 1-form `π`, valence (0,1).
    pub pi: TensorField,
    /// Its `g`-dual vector field `P`, valence (1,0).
    pub p: TensorField,
}

/// Splits `G` into `g = (G + Gᵀ)/2` and `F = (G − Gᵀ)/2` and checks that `g`
/// is non-degenerate on the chart's standard sample set.
pub fn split_metric(big_g: &TensorField, chart: &Chart) -> Result<GeneralizedMetric> {
    if big_g.valence() != (0, 2) {
        return Err(Error::Shape(format!(
            "generalized metric must have valence (0,2), got {:?}",
            big_g.valence()
        )));
    }
    let n = big_g.dim();
    if n != chart.dim() {
        return Err(Error::Shape(format!(
            "metric has dimension {n}, chart has {}",
            chart.dim()
        )));
    }
    // Build each unordered pair once so g is symmetric and F antisymmetric
    // node-for-node.
    let mut sym = vec![vec![Expr::zero(); n]; n];
    let mut skew = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        sym[i][i] = big_g.at(&[i, i]).clone();
        for j in i + 1..n {
            let (gij, gji) = (big_g.at(&[i, j]), big_g.at(&[j, i]));
            let (s, k) = if gij == gji {
                (gij.clone(), Expr::zero())
            } else {
                (0.5 * (gij + gji), 0.5 * (gij - gji))
            };
            sym[i][j] = s.clone();
            sym[j][i] = s;
            skew[j][i] = -&k;
            skew[i][j] = k;
        }
    }
    let (det_g, g_inv_rows) = symbolic_inverse(&sym);
    let m = GeneralizedMetric {
        big_g: big_g.clone(),
        g: TensorField::from_matrix(sym)?,
        f: TensorField::from_matrix(skew)?,
        g_inv: TensorField::from_components(n, 2, 0, g_inv_rows.into_iter().flatten().collect())?,
        det_g,
    };
    check_nondegenerate(&m, chart)?;
    Ok(m)
}

fn check_nondegenerate(m: &GeneralizedMetric, chart: &Chart) -> Result<()> {
    let tape = crate::expr::Tape::compile(std::slice::from_ref(&m.det_g));
    for p in chart.standard_samples() {
        let det = tape.evaluate(&p).map_err(|source| Error::Domain {
            index: vec![],
            source,
        })?[0];
        if det.is_nan() || det.abs() <= DEGENERACY_EPS {
            return Err(Error::Degenerate {
                point: p.to_vec(),
                det,
            });
        }
    }
    Ok(())
}

/// Determinant and inverse `[j][k] = C_{kj} / det` of a symbolic matrix.
fn symbolic_inverse(m: &[Vec<Expr>]) -> (Expr, Vec<Vec<Expr>>) {
    let n = m.len();
    let full: Vec<usize> = (0..n).collect();
    let det = determinant(m, &full, &full);
    let inv = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let rows: Vec<usize> = full.iter().copied().filter(|&r| r != k).collect();
                    let cols: Vec<usize> = full.iter().copied().filter(|&c| c != j).collect();
                    let minor = determinant(m, &rows, &cols);
                    let cof = if (j + k) % 2 == 0 { minor } else { -minor };
                    cof / &det
                })
                .collect()
        })
        .collect();
    (det, inv)
}

/// Laplace expansion along the first selected row, memoized on the
/// remaining column set.
fn determinant(m: &[Vec<Expr>], rows: &[usize], cols: &[usize]) -> Expr {
    fn rec(
        m: &[Vec<Expr>],
        rows: &[usize],
        cols: &[usize],
        mask: u64,
        memo: &mut HashMap<u64, Expr>,
    ) -> Expr {
        let depth = mask.count_ones() as usize;
        if depth == cols.len() {
            return Expr::one();
        }
        if let Some(e) = memo.get(&mask) {
            return e.clone();
        }
        let row = rows[depth];
        let mut acc = Expr::zero();
        let mut sign = 1.0;
        for (ci, &c) in cols.iter().enumerate() {
            if mask & (1 << ci) != 0 {
                continue;
            }
            let entry = &m[row][c];
            if !entry.is_zero() {
                let sub = rec(m, rows, cols, mask | (1 << ci), memo);
                let term = entry * sub;
                acc = if sign > 0.0 { acc + term } else { acc - term };
            }
            sign = -sign;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    rec(m, rows, cols, 0, &mut HashMap::new())
}

/// Numeric `g^{ij}(p)`.
pub fn metric_inverse_at(g: &TensorField, p: &[f64]) -> Result<DMatrix<f64>> {
    let n = g.dim();
    let values = g.evaluate(p)?;
    let mat = DMatrix::from_row_slice(n, n, &values.data);
    let det = mat.determinant();
    if det.is_nan() || det.abs() <= DEGENERACY_EPS {
        return Err(Error::Degenerate {
            point: p.to_vec(),
            det,
        });
    }
    mat.try_inverse().ok_or(Error::Degenerate {
        point: p.to_vec(),
        det,
    })
}

/// `A^k_i = F_{ij} g^{jk}`.
pub fn compute_a(m: &GeneralizedMetric) -> StructureField {
    let n = m.dim();
    let a = TensorField::from_fn(n, 1, 1, |idx| {
        let (k, i) = (idx[0], idx[1]);
        Expr::sum((0..n).map(|j| m.f.at(&[i, j]) * m.g_inv.at(&[j, k])))
    });
    StructureField { a }
}

/// `P^i = g^{ij} π_j`.
pub fn compute_p(m: &GeneralizedMetric, pi: &TensorField) -> Result<GeneratorField> {
    if pi.valence() != (0, 1) || pi.dim() != m.dim() {
        return Err(Error::Shape(format!(
            "generator must be a (0,1) field in dimension {}, got {:?} in dimension {}",
            m.dim(),
            pi.valence(),
            pi.dim()
        )));
    }
    let n = m.dim();
    let p = TensorField::from_fn(n, 1, 0, |idx| {
        Expr::sum((0..n).map(|j| m.g_inv.at(&[idx[0], j]) * pi.at(&[j])))
    });
    Ok(GeneratorField { pi: pi.clone(), p })
}
