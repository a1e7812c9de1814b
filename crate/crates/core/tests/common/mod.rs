//! Shared fixtures and a purely numeric reference implementation.
//!
//! The oracle evaluates `G` and `π` pointwise and builds every derived
//! quantity with nalgebra and central differences, so it shares nothing with
//! the symbolic engine beyond reading the input fields.

#![allow(dead_code)]

use nalgebra::DMatrix;
use qsnm_core::chart::{Chart, TensorField};
use qsnm_core::connection::ConnectionCoefficients;
use qsnm_core::expr::{Expr, Tape};
use qsnm_core::verify::{random_manifold, Geometry, ManifoldSpec, RandomManifoldConfig};

pub fn e1_spec() -> ManifoldSpec {
    ManifoldSpec {
        dimension: 2,
        coordinates: vec!["x".into(), "y".into()],
        big_g: vec![vec!["1".into(), "1".into()], vec!["-1".into(), "1".into()]],
        pi: vec!["1".into(), "0".into()],
        sample_box: None,
        note: Some("E1".into()),
    }
}

pub fn e1_geometry() -> Geometry {
    Geometry::from_spec(&e1_spec()).expect("E1 builds")
}

pub fn random_spec(seed: u64, dim: usize) -> ManifoldSpec {
    random_manifold(&RandomManifoldConfig::new(seed, dim)).expect("random manifold")
}

pub fn random_geometry(seed: u64, dim: usize) -> Geometry {
    Geometry::from_spec(&random_spec(seed, dim)).expect("random geometry builds")
}

/// `geo` with `delta` added to one flat component of `L¹`.
pub fn perturbed(geo: &Geometry, flat: usize, delta: f64) -> Geometry {
    let mut comps = geo.l1.coeffs.components().to_vec();
    comps[flat] = comps[flat].clone() + Expr::constant(delta);
    let n = geo.dim();
    let t = TensorField::from_components(n, 1, 2, comps).expect("same shape");
    let l1 = ConnectionCoefficients::new(t, geo.l1.provenance).expect("valence (1,2)");
    geo.with_connection(l1).expect("same dimension")
}

/// Pointwise numeric model of `(G, π)`.
pub struct Oracle {
    dim: usize,
    big_g: Tape,
    pi: Tape,
}

pub const FD_STEP: f64 = 1e-5;
const NESTED_STEP: f64 = 1e-4;

/// Rank-3 array `[a][b][c]`.
pub type Arr3 = Vec<Vec<Vec<f64>>>;
/// Rank-4 array `[a][b][c][d]`.
pub type Arr4 = Vec<Vec<Vec<Vec<f64>>>>;

fn shifted(p: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[k] += h;
    q
}

impl Oracle {
    pub fn new(spec: &ManifoldSpec) -> Self {
        let parsed = spec.parse().expect("spec parses");
        Oracle {
            dim: spec.dimension,
            big_g: Tape::compile(parsed.big_g.components()),
            pi: Tape::compile(parsed.pi.components()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn big_g_at(&self, p: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_row_slice(n, n, &self.big_g.evaluate(p).expect("G evaluates"))
    }

    pub fn g(&self, p: &[f64]) -> DMatrix<f64> {
        let gg = self.big_g_at(p);
        (&gg + gg.transpose()) * 0.5
    }

    pub fn f(&self, p: &[f64]) -> DMatrix<f64> {
        let gg = self.big_g_at(p);
        (&gg - gg.transpose()) * 0.5
    }

    pub fn pi(&self, p: &[f64]) -> Vec<f64> {
        self.pi.evaluate(p).expect("pi evaluates")
    }

    /// `A` as a matrix `[k][i]` with `F_{ij} = A^k_i g_{kj}`.
    pub fn a(&self, p: &[f64]) -> DMatrix<f64> {
        let g_inv = self.g(p).try_inverse().expect("g invertible");
        (g_inv * self.f(p).transpose()).into_owned()
    }

    /// `∂_k g_{ij}` stored `[k][i][j]`.
    pub fn dg(&self, p: &[f64], h: f64) -> Arr3 {
        (0..self.dim)
            .map(|k| {
                let d = (self.g(&shifted(p, k, h)) - self.g(&shifted(p, k, -h))) / (2.0 * h);
                (0..self.dim).map(|i| (0..self.dim).map(|j| d[(i, j)]).collect()).collect()
            })
            .collect()
    }

    /// `∂_k F_{ij}` stored `[k][i][j]`.
    pub fn df(&self, p: &[f64]) -> Arr3 {
        let h = FD_STEP;
        (0..self.dim)
            .map(|k| {
                let d = (self.f(&shifted(p, k, h)) - self.f(&shifted(p, k, -h))) / (2.0 * h);
                (0..self.dim).map(|i| (0..self.dim).map(|j| d[(i, j)]).collect()).collect()
            })
            .collect()
    }

    /// `∂_m A^k_i` stored `[m][k][i]`.
    pub fn da(&self, p: &[f64]) -> Arr3 {
        let h = FD_STEP;
        (0..self.dim)
            .map(|m| {
                let d = (self.a(&shifted(p, m, h)) - self.a(&shifted(p, m, -h))) / (2.0 * h);
                (0..self.dim).map(|k| (0..self.dim).map(|i| d[(k, i)]).collect()).collect()
            })
            .collect()
    }

    fn christoffel_with_step(&self, p: &[f64], h: f64) -> Arr3 {
        let n = self.dim;
        let g_inv = self.g(p).try_inverse().expect("g invertible");
        let dg = self.dg(p, h);
        let mut out = vec![vec![vec![0.0; n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[k][i][j] = 0.5
                        * (0..n)
                            .map(|l| g_inv[(k, l)] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]))
                            .sum::<f64>();
                }
            }
        }
        out
    }

    /// Levi-Civita symbols `Γ^k_{ij}` from the Koszul formula.
    pub fn christoffel(&self, p: &[f64]) -> Arr3 {
        self.christoffel_with_step(p, FD_STEP)
    }

    fn family_with_step(&self, p: &[f64], a: f64, b: f64, h: f64) -> Arr3 {
        let n = self.dim;
        let mut l = self.christoffel_with_step(p, h);
        let am = self.a(p);
        let pi = self.pi(p);
        for (k, lk) in l.iter_mut().enumerate() {
            for (i, lki) in lk.iter_mut().enumerate() {
                for (j, v) in lki.iter_mut().enumerate() {
                    *v += a * pi[j] * am[(k, i)] + b * pi[i] * am[(k, j)];
                }
            }
        }
        debug_assert_eq!(l.len(), n);
        l
    }

    /// `∇_{∂i}∂j = Γ^k_{ij}∂k + a π_j A∂i + b π_i A∂j`, stored `[k][i][j]`.
    pub fn family(&self, p: &[f64], a: f64, b: f64) -> Arr3 {
        self.family_with_step(p, a, b, FD_STEP)
    }

    pub fn l1(&self, p: &[f64]) -> Arr3 {
        self.family(p, 0.5, -0.5)
    }

    pub fn l2(&self, p: &[f64]) -> Arr3 {
        let l1 = self.l1(p);
        let n = self.dim;
        (0..n)
            .map(|k| (0..n).map(|i| (0..n).map(|j| l1[k][j][i]).collect()).collect())
            .collect()
    }

    /// `T^k_{ij} = L^k_{ij} − L^k_{ji}`.
    pub fn torsion(l: &Arr3) -> Arr3 {
        let n = l.len();
        (0..n)
            .map(|k| (0..n).map(|i| (0..n).map(|j| l[k][i][j] - l[k][j][i]).collect()).collect())
            .collect()
    }

    /// `(∇_i g)_{jk}` of `L¹`, stored `[i][j][k]`.
    pub fn nabla1_g(&self, p: &[f64]) -> Arr3 {
        let n = self.dim;
        let g = self.g(p);
        let dg = self.dg(p, FD_STEP);
        let l = self.l1(p);
        let mut out = vec![vec![vec![0.0; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let corr: f64 = (0..n).map(|m| l[m][i][j] * g[(m, k)] + l[m][i][k] * g[(j, m)]).sum();
                    out[i][j][k] = dg[i][j][k] - corr;
                }
            }
        }
        out
    }

    /// `R^l_{ijk}` of the connection `conn(p)`, with `∂L` by nested differences.
    pub fn curvature(&self, p: &[f64], conn: impl Fn(&Oracle, &[f64], f64) -> Arr3) -> Arr4 {
        let n = self.dim;
        let h = NESTED_STEP;
        let l = conn(self, p, h);
        let dl: Vec<Arr3> = (0..n)
            .map(|m| {
                let (up, down) = (conn(self, &shifted(p, m, h), h), conn(self, &shifted(p, m, -h), h));
                (0..n)
                    .map(|a| {
                        (0..n)
                            .map(|b| (0..n).map(|c| (up[a][b][c] - down[a][b][c]) / (2.0 * h)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for (li, rl) in r.iter_mut().enumerate() {
            for (i, rli) in rl.iter_mut().enumerate() {
                for (j, rlij) in rli.iter_mut().enumerate() {
                    for (k, v) in rlij.iter_mut().enumerate() {
                        let quad: f64 = (0..n)
                            .map(|m| l[li][i][m] * l[m][j][k] - l[li][j][m] * l[m][i][k])
                            .sum();
                        *v = dl[i][li][j][k] - dl[j][li][i][k] + quad;
                    }
                }
            }
        }
        r
    }

    pub fn curvature_levi_civita(&self, p: &[f64]) -> Arr4 {
        self.curvature(p, |o, q, h| o.christoffel_with_step(q, h))
    }

    pub fn curvature_l1(&self, p: &[f64]) -> Arr4 {
        self.curvature(p, |o, q, h| o.family_with_step(q, 0.5, -0.5, h))
    }

    /// Classical Nijenhuis tensor `N^k_{ij}`.
    pub fn nijenhuis(&self, p: &[f64]) -> Arr3 {
        let n = self.dim;
        let a = self.a(p);
        let da = self.da(p);
        let mut out = vec![vec![vec![0.0; n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[k][i][j] = (0..n)
                        .map(|m| {
                            a[(m, i)] * da[m][k][j] - a[(m, j)] * da[m][k][i]
                                - a[(k, m)] * (da[i][m][j] - da[j][m][i])
                        })
                        .sum();
                }
            }
        }
        out
    }

    /// `dF_{ijk} = ∂_i F_{jk} + ∂_j F_{ki} + ∂_k F_{ij}`.
    pub fn exterior_f(&self, p: &[f64]) -> Arr3 {
        let n = self.dim;
        let d = self.df(p);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| d[i][j][k] + d[j][k][i] + d[k][i][j]).collect())
                    .collect()
            })
            .collect()
    }
}

pub fn flatten3(a: &Arr3) -> Vec<f64> {
    a.iter().flatten().flatten().copied().collect()
}

pub fn flatten4(a: &Arr4) -> Vec<f64> {
    a.iter().flatten().flatten().flatten().copied().collect()
}

/// `max|x − y| / (1 + max(|x|, |y|))` over paired entries.
pub fn rel_err(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "length mismatch");
    let diff = x.iter().zip(y).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let mag = x.iter().chain(y).fold(0.0_f64, |m, v| m.max(v.abs()));
    diff / (1.0 + mag)
}

/// Worst relative error between an engine tensor and an oracle at `points`.
pub fn engine_vs_oracle(
    engine: &TensorField,
    points: &[Vec<f64>],
    oracle: impl Fn(&[f64]) -> Vec<f64>,
) -> f64 {
    let tape = Tape::compile(engine.components());
    points
        .iter()
        .map(|p| rel_err(&tape.evaluate(p).expect("engine evaluates"), &oracle(p)))
        .fold(0.0, f64::max)
}

pub fn sample(chart: &Chart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    chart.sample_points(count, seed).iter().map(|p| p.coords().to_vec()).collect()
}
