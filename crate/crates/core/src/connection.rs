//! Linear connections on the chart and the covariant-derivative engine.
//!
//! Coefficients follow `∇_{∂_i} ∂_j = L^k_{ij} ∂_k` and are stored `[k][i][j]`.
//! Every `∇`-tensor produced here, by the engine or by a closed form, puts
//! the direction index in the first lower slot: `(∇T)[..][i, j..]` is
//! `(∇_{∂_i} T)(∂_j, ..)`. Lie brackets of coordinate fields vanish, which
//! is what lets the dual connection be a plain index transposition.

use crate::chart::{GeneralizedMetric, GeneratorField, StructureField, TensorField};
use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    LeviCivita,
    QsFamily,
    Dual,
    SymmetricPart,
    Reconstructed,
    /// Supplied from outside, e.g. a deliberately perturbed connection.
    External,
}

#[derive(Debug, Clone)]
pub struct ConnectionCoefficients {
    /// `L^k_{ij}`, valence (1,2).
    pub coeffs: TensorField,
    pub provenance: Provenance,
}

impl ConnectionCoefficients {
    pub fn new(coeffs: TensorField, provenance: Provenance) -> Result<Self> {
        if coeffs.valence() != (1, 2) {
            return Err(Error::Shape(format!(
                "connection coefficients must have valence (1,2), got {:?}",
                coeffs.valence()
            )));
        }
        Ok(ConnectionCoefficients { coeffs, provenance })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    /// `L^k_{ij}`.
    pub fn at(&self, k: usize, i: usize, j: usize) -> &Expr {
        self.coeffs.at(&[k, i, j])
    }
}

/// Coefficients of the family `∇ᵍ_X Y + a π(Y) A X + b π(X) A Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QsFamilyParams {
    pub a: f64,
    pub b: f64,
}

impl QsFamilyParams {
    pub const CANONICAL: QsFamilyParams = QsFamilyParams { a: 0.5, b: -0.5 };

    pub fn new(a: f64, b: f64) -> Self {
        QsFamilyParams { a, b }
    }

    /// The torsion carries the factor `a − b`.
    pub fn has_torsion(&self) -> bool {
        self.a != self.b
    }
}

impl Default for QsFamilyParams {
    fn default() -> Self {
        Self::CANONICAL
    }
}

/// Torsion in both valences: `T^k_{ij}` and `T_{ijk} = g_{kl} T^l_{ij}`.
#[derive(Debug, Clone)]
pub struct TorsionField {
    pub t12: TensorField,
    pub t03: TensorField,
}

/// Levi-Civita connection of `g`:
/// `Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`.
pub fn christoffel(m: &GeneralizedMetric) -> ConnectionCoefficients {
    let n = m.dim();
    let dg = m.g.partial(); // [l][i][j] = ∂_l g_ij
    let d = |l: usize, i: usize, j: usize| dg.at(&[l, i, j]);
    let mut lower = vec![Expr::zero(); n * n * n];
    for i in 0..n {
        for j in i..n {
            for l in 0..n {
                let v = 0.5 * (d(i, j, l) + d(j, i, l) - d(l, i, j));
                lower[(i * n + j) * n + l] = v.clone();
                lower[(j * n + i) * n + l] = v;
            }
        }
    }
    let coeffs = TensorField::from_fn(n, 1, 2, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let (i, j) = (i.min(j), i.max(j));
        Expr::sum((0..n).map(|l| m.g_inv.at(&[k, l]) * &lower[(i * n + j) * n + l]))
    });
    // Mirror so the two orders share nodes exactly.
    let coeffs = TensorField::from_fn(n, 1, 2, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        coeffs.at(&[k, i.min(j), i.max(j)]).clone()
    });
    ConnectionCoefficients {
        coeffs,
        provenance: Provenance::LeviCivita,
    }
}

/// `L^k_{ij} = Γ^k_{ij} + a π_j A^k_i + b π_i A^k_j`.
pub fn qs_connection(
    lc: &ConnectionCoefficients,
    gen: &GeneratorField,
    a: &StructureField,
    params: QsFamilyParams,
) -> ConnectionCoefficients {
    let pi = |i: usize| gen.pi.at(&[i]);
    let am = |k: usize, i: usize| a.a.at(&[k, i]);
    let coeffs = TensorField::from_fn(lc.dim(), 1, 2, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        lc.at(k, i, j) + params.a * (pi(j) * am(k, i)) + params.b * (pi(i) * am(k, j))
    });
    ConnectionCoefficients {
        coeffs,
        provenance: Provenance::QsFamily,
    }
}

/// `∇²_X Y = ∇_Y X + [X, Y]`, which on coordinate fields is `L²^k_{ij} = L^k_{ji}`.
pub fn dual_connection(l: &ConnectionCoefficients) -> ConnectionCoefficients {
    ConnectionCoefficients {
        coeffs: l.coeffs.swapped(1, 2),
        provenance: Provenance::Dual,
    }
}

/// `L⁰ = ½ (L1 + L2)`.
pub fn symmetric_part_connection(
    l1: &ConnectionCoefficients,
    l2: &ConnectionCoefficients,
) -> ConnectionCoefficients {
    ConnectionCoefficients {
        coeffs: l1.coeffs.zip_with(&l2.coeffs, |a, b| 0.5 * (a + b)),
        provenance: Provenance::SymmetricPart,
    }
}

pub fn torsion(l: &ConnectionCoefficients, m: &GeneralizedMetric) -> TorsionField {
    let t12 = l.coeffs.minus(&l.coeffs.swapped(1, 2));
    let t03 = lower_first_upper(&t12, &m.g);
    TorsionField { t12, t03 }
}

/// `(a − b)(π(Y)AX − π(X)AY)`, the torsion of the family in closed form,
/// stored `[k][i][j]`.
pub fn qs_torsion_closed(gen: &GeneratorField, a: &StructureField, params: QsFamilyParams) -> TensorField {
    let c = params.a - params.b;
    TensorField::from_fn(a.a.dim(), 1, 2, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        c * (gen.pi.at(&[j]) * a.a.at(&[k, i]) - gen.pi.at(&[i]) * a.a.at(&[k, j]))
    })
}

/// `T(X,Y,Z) = π(Y)F(X,Z) − π(X)F(Y,Z)` for the canonical connection.
pub fn qs_torsion03_closed(gen: &GeneratorField, m: &GeneralizedMetric) -> TensorField {
    TensorField::from_fn(m.dim(), 0, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        gen.pi.at(&[j]) * m.f.at(&[i, k]) - gen.pi.at(&[i]) * m.f.at(&[j, k])
    })
}

/// `(1,2) → (0,3)`: `T_{ijk} = g_{kl} T^l_{ij}`.
pub fn lower_first_upper(t: &TensorField, g: &TensorField) -> TensorField {
    let n = t.dim();
    TensorField::from_fn(n, 0, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        Expr::sum((0..n).map(|l| g.at(&[k, l]) * t.at(&[l, i, j])))
    })
}

/// Generic covariant derivative of an `(r,s)` field, giving `(r, s+1)` with
/// the direction in the first lower slot:
/// `(∇_i T)^{k..}_{j..} = ∂_i T + Σ_upper L^k_{im} T^{m..} − Σ_lower L^m_{ij} T_{m..}`.
pub fn covariant_derivative(l: &ConnectionCoefficients, t: &TensorField) -> TensorField {
    let n = t.dim();
    let (r, s) = t.valence();
    let dt = t.partial();
    let mut src = vec![0; r + s];
    TensorField::from_fn(n, r, s + 1, |idx| {
        let dir = idx[r];
        let mut terms = vec![dt.at(idx).clone()];
        src[..r].copy_from_slice(&idx[..r]);
        src[r..].copy_from_slice(&idx[r + 1..]);
        for slot in 0..r + s {
            let original = src[slot];
            for m in 0..n {
                src[slot] = m;
                let coeff = if slot < r {
                    l.at(original, dir, m)
                } else {
                    l.at(m, dir, original)
                };
                if coeff.is_zero() {
                    continue;
                }
                let term = coeff * t.at(&src);
                terms.push(if slot < r { term } else { -term });
            }
            src[slot] = original;
        }
        Expr::sum(terms)
    })
}

/// Precomputed pieces shared by the closed-form derivatives.
struct Pieces<'a> {
    n: usize,
    pi: &'a TensorField,
    a: &'a TensorField,
    a2: TensorField,
    f: &'a TensorField,
    /// `g(A∂_x, A∂_y)`.
    gaa: TensorField,
    /// `π(A∂_x)`.
    pi_a: TensorField,
}

impl<'a> Pieces<'a> {
    fn new(gen: &'a GeneratorField, a: &'a StructureField, m: &'a GeneralizedMetric) -> Self {
        let gaa = m.g.with_endomorphism_on_lower(0, &a.a).with_endomorphism_on_lower(1, &a.a);
        Pieces {
            n: m.dim(),
            pi: &gen.pi,
            a: &a.a,
            a2: a.squared(),
            f: &m.f,
            gaa,
            pi_a: gen.pi.with_endomorphism_on_lower(0, &a.a),
        }
    }

    fn pi(&self, i: usize) -> &Expr {
        self.pi.at(&[i])
    }

    fn pi_a(&self, i: usize) -> &Expr {
        self.pi_a.at(&[i])
    }
}

// Closed forms, with `sign` = +1 for ∇¹ and −1 for its dual ∇².

fn nabla_g_closed(p: &Pieces, sign: f64) -> TensorField {
    TensorField::from_fn(p.n, 0, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        -0.5 * sign * (p.pi(j) * p.f.at(&[i, k]) + p.pi(k) * p.f.at(&[i, j]))
    })
}

fn nabla_f_closed(p: &Pieces, nabla_g_f: &TensorField, sign: f64) -> TensorField {
    TensorField::from_fn(p.n, 0, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        nabla_g_f.at(idx)
            + 0.5 * sign * (p.pi(j) * p.gaa.at(&[i, k]) - p.pi(k) * p.gaa.at(&[i, j]))
    })
}

fn nabla_big_g_closed(p: &Pieces, nabla_g_f: &TensorField, sign: f64) -> TensorField {
    TensorField::from_fn(p.n, 0, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        let y_part = p.pi(j) * (p.gaa.at(&[i, k]) - p.f.at(&[i, k]));
        let z_part = p.pi(k) * (p.gaa.at(&[i, j]) + p.f.at(&[i, j]));
        nabla_g_f.at(idx) + 0.5 * sign * (y_part - z_part)
    })
}

fn nabla_a_closed(p: &Pieces, nabla_g_a: &TensorField, sign: f64) -> TensorField {
    TensorField::from_fn(p.n, 1, 2, |idx| {
        let (l, i, j) = (idx[0], idx[1], idx[2]);
        nabla_g_a.at(idx)
            + 0.5 * sign * (p.pi_a(j) * p.a.at(&[l, i]) - p.pi(j) * p.a2.at(&[l, i]))
    })
}

fn nabla_pi_closed(p: &Pieces, nabla_g_pi: &TensorField, sign: f64) -> TensorField {
    TensorField::from_fn(p.n, 0, 2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        nabla_g_pi.at(idx) + 0.5 * sign * (p.pi(i) * p.pi_a(j) - p.pi_a(i) * p.pi(j))
    })
}

/// `(∇¹_X g)(Y,Z) = −½ (π(Y) F(X,Z) + π(Z) F(X,Y))`.
pub fn nabla1_g_closed(gen: &GeneratorField, a: &StructureField, m: &GeneralizedMetric) -> TensorField {
    nabla_g_closed(&Pieces::new(gen, a, m), 1.0)
}

/// `(∇¹_X F)(Y,Z) = (∇ᵍ_X F)(Y,Z) + ½ (π(Y) g(AX,AZ) − π(Z) g(AX,AY))`.
pub fn nabla1_f_closed(
    gen: &GeneratorField,
    a: &StructureField,
    m: &GeneralizedMetric,
    lc: &ConnectionCoefficients,
) -> TensorField {
    nabla_f_closed(&Pieces::new(gen, a, m), &covariant_derivative(lc, &m.f), 1.0)
}

/// `(∇¹_X G)(Y,Z) = (∇ᵍ_X F)(Y,Z) + ½ (π(Y)(g(AX,AZ) − F(X,Z)) − π(Z)(g(AX,AY) + F(X,Y)))`.
pub fn nabla1_big_g_closed(
    gen: &GeneratorField,
    a: &StructureField,
    m: &GeneralizedMetric,
    lc: &ConnectionCoefficients,
) -> TensorField {
    nabla_big_g_closed(&Pieces::new(gen, a, m), &covariant_derivative(lc, &m.f), 1.0)
}

/// `(∇¹_X A) Y = (∇ᵍ_X A) Y + ½ (π(AY) AX − π(Y) A²X)`, stored `[l][i][j]`.
pub fn nabla1_a_closed(
    gen: &GeneratorField,
    a: &StructureField,
    m: &GeneralizedMetric,
    lc: &ConnectionCoefficients,
) -> TensorField {
    nabla_a_closed(&Pieces::new(gen, a, m), &covariant_derivative(lc, &a.a), 1.0)
}

/// `(∇¹_X π)(Y) = (∇ᵍ_X π)(Y) + ½ π(X) π(AY) − ½ π(AX) π(Y)`.
pub fn nabla1_pi_closed(
    gen: &GeneratorField,
    a: &StructureField,
    m: &GeneralizedMetric,
    lc: &ConnectionCoefficients,
) -> TensorField {
    nabla_pi_closed(&Pieces::new(gen, a, m), &covariant_derivative(lc, &gen.pi), 1.0)
}

/// Closed forms for the dual connection: every correction changes sign.
#[derive(Debug, Clone)]
pub struct Nabla2Relations {
    pub g: TensorField,
    pub f: TensorField,
    pub big_g: TensorField,
    pub a: TensorField,
}

pub fn nabla2_relations(
    gen: &GeneratorField,
    a: &StructureField,
    m: &GeneralizedMetric,
    lc: &ConnectionCoefficients,
) -> Nabla2Relations {
    let p = Pieces::new(gen, a, m);
    let nabla_g_f = covariant_derivative(lc, &m.f);
    Nabla2Relations {
        g: nabla_g_closed(&p, -1.0),
        f: nabla_f_closed(&p, &nabla_g_f, -1.0),
        big_g: nabla_big_g_closed(&p, &nabla_g_f, -1.0),
        a: nabla_a_closed(&p, &covariant_derivative(lc, &a.a), -1.0),
    }
}

/// Rebuilds a connection from its torsion and `∇g`:
/// `g(∇_X Y, Z) = g(∇ᵍ_X Y, Z) + ½ (T(X,Y,Z) + T(Z,X,Y) − T(Y,Z,X))
///   − ½ ((∇_X g)(Y,Z) + (∇_Y g)(Z,X) − (∇_Z g)(Y,X))`,
/// then raises the last index with `g⁻¹`.
pub fn reconstruct_connection(
    t: &TorsionField,
    nabla_g: &TensorField,
    m: &GeneralizedMetric,
    lc: &ConnectionCoefficients,
) -> Result<ConnectionCoefficients> {
    let n = m.dim();
    if t.t03.valence() != (0, 3) || nabla_g.valence() != (0, 3) || t.t03.dim() != n || nabla_g.dim() != n {
        return Err(Error::Shape(
            "reconstruction needs (0,3) torsion and (0,3) ∇g on the metric's chart".into(),
        ));
    }
    let tt = |i: usize, j: usize, k: usize| t.t03.at(&[i, j, k]);
    let ng = |i: usize, j: usize, k: usize| nabla_g.at(&[i, j, k]);
    let h = TensorField::from_fn(n, 0, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        0.5 * (tt(i, j, k) + tt(k, i, j) - tt(j, k, i)) - 0.5 * (ng(i, j, k) + ng(j, k, i) - ng(k, j, i))
    });
    let coeffs = TensorField::from_fn(n, 1, 2, |idx| {
        let (l, i, j) = (idx[0], idx[1], idx[2]);
        lc.at(l, i, j) + Expr::sum((0..n).map(|k| m.g_inv.at(&[l, k]) * h.at(&[i, j, k])))
    });
    ConnectionCoefficients::new(coeffs, Provenance::Reconstructed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{compute_a, compute_p, split_metric, Chart};

    struct Fixture {
        m: GeneralizedMetric,
        gen: GeneratorField,
        a: StructureField,
        lc: ConnectionCoefficients,
    }

    fn fixture(names: &[&str], rows: &[&[&str]], pi: &[&str]) -> Fixture {
        let chart = Chart::new(names.iter().map(|s| s.to_string()).collect()).unwrap();
        let big_g = TensorField::from_matrix(
            rows.iter()
                .map(|r| r.iter().map(|s| chart.parse(s).unwrap()).collect())
                .collect(),
        )
        .unwrap();
        let m = split_metric(&big_g, &chart).unwrap();
        let pi = TensorField::from_components(
            chart.dim(),
            0,
            1,
            pi.iter().map(|s| chart.parse(s).unwrap()).collect(),
        )
        .unwrap();
        let gen = compute_p(&m, &pi).unwrap();
        let a = compute_a(&m);
        let lc = christoffel(&m);
        Fixture { m, gen, a, lc }
    }

    fn e1() -> Fixture {
        fixture(&["x", "y"], &[&["1", "1"], &["-1", "1"]], &["1", "0"])
    }

    fn num(t: &TensorField, p: &[f64]) -> Vec<f64> {
        t.evaluate(p).unwrap().data
    }

    fn at(t: &TensorField, idx: &[usize]) -> f64 {
        t.at(idx).evaluate(&[0.0, 0.0]).unwrap()
    }

    #[test]
    fn flat_metric_has_vanishing_christoffels() {
        let f = fixture(&["x", "y"], &[&["1", "0"], &["0", "1"]], &["0", "0"]);
        assert!(f.lc.coeffs.components().iter().all(Expr::is_zero));
    }

    #[test]
    fn polar_type_christoffels() {
        let f = fixture(&["u", "v"], &[&["1", "0"], &["0", "u^2"]], &["0", "0"]);
        let p = [1.5, 0.3];
        let g = num(&f.lc.coeffs, &p);
        // [k][i][j], 0-based
        let want = [0.0, 0.0, 0.0, -1.5, 0.0, 1.0 / 1.5, 1.0 / 1.5, 0.0];
        for (got, want) in g.iter().zip(want) {
            assert!((got - want).abs() < 1e-14, "{g:?}");
        }
    }

    #[test]
    fn christoffels_match_finite_difference_koszul_oracle() {
        // g = diag(1 + u², 1): Γ^1_11 = u / (1 + u²).
        let f = fixture(&["u", "v"], &[&["1 + u^2", "0"], &["0", "1"]], &["0", "0"]);
        let p = [1.5, -0.2];
        let h = 1e-5;
        let g11 = |u: f64| 1.0 + u * u;
        let dg11 = (g11(p[0] + h) - g11(p[0] - h)) / (2.0 * h);
        let oracle = 0.5 * dg11 / g11(p[0]);
        let got = f.lc.at(0, 0, 0).evaluate(&p).unwrap();
        assert!((got - oracle).abs() < 1e-6);
        let rest: f64 = num(&f.lc.coeffs, &p)[1..].iter().map(|v| v.abs()).sum();
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn e1_connection_coefficients() {
        let f = e1();
        let l1 = qs_connection(&f.lc, &f.gen, &f.a, QsFamilyParams::CANONICAL);
        // L¹^1_12 = ½, L¹^1_21 = −½, everything else 0.
        let vals = num(&l1.coeffs, &[0.0, 0.0]);
        let mut want = vec![0.0; 8];
        want[1] = 0.5;
        want[2] = -0.5;
        assert_eq!(vals, want);

        let l2 = dual_connection(&l1);
        assert_eq!(at(&l2.coeffs, &[0, 0, 1]), -0.5);
        assert_eq!(at(&l2.coeffs, &[0, 1, 0]), 0.5);
        let l0 = symmetric_part_connection(&l1, &l2);
        assert!(num(&l0.coeffs, &[0.0, 0.0]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn vanishing_generator_gives_levi_civita() {
        let f = fixture(&["x", "y"], &[&["1 + x^2", "y"], &["-y", "2"]], &["0", "0"]);
        for params in [QsFamilyParams::CANONICAL, QsFamilyParams::new(3.0, 1.0)] {
            let l = qs_connection(&f.lc, &f.gen, &f.a, params);
            assert_eq!(l.coeffs, f.lc.coeffs);
        }
    }

    #[test]
    fn dual_is_an_involution() {
        let f = fixture(&["x", "y"], &[&["2", "x*y"], &["-x*y", "1 + y^2"]], &["x", "1"]);
        let l1 = qs_connection(&f.lc, &f.gen, &f.a, QsFamilyParams::CANONICAL);
        assert_eq!(dual_connection(&dual_connection(&l1)).coeffs, l1.coeffs);
        assert_eq!(dual_connection(&f.lc).coeffs, f.lc.coeffs);
        let l0 = symmetric_part_connection(&l1, &l1);
        let p = [0.2, -0.4];
        for (a, b) in num(&l0.coeffs, &p).iter().zip(num(&l1.coeffs, &p)) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn e1_torsion() {
        let f = e1();
        let l1 = qs_connection(&f.lc, &f.gen, &f.a, QsFamilyParams::CANONICAL);
        let t = torsion(&l1, &f.m);
        assert_eq!(at(&t.t12, &[0, 0, 1]), 1.0);
        assert_eq!(at(&t.t12, &[1, 0, 1]), 0.0);
        assert_eq!(at(&t.t03, &[0, 1, 0]), 1.0);
        assert!(torsion(&f.lc, &f.m).t12.components().iter().all(Expr::is_zero));
        let same = qs_connection(&f.lc, &f.gen, &f.a, QsFamilyParams::new(1.0, 1.0));
        assert!(!QsFamilyParams::new(1.0, 1.0).has_torsion());
        assert!(num(&torsion(&same, &f.m).t12, &[0.0, 0.0]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn e1_covariant_derivatives() {
        let f = e1();
        let l1 = qs_connection(&f.lc, &f.gen, &f.a, QsFamilyParams::CANONICAL);
        let ng = covariant_derivative(&l1, &f.m.g);
        assert_eq!(at(&ng, &[0, 0, 1]), -0.5);
        let closed = nabla1_g_closed(&f.gen, &f.a, &f.m);
        assert_eq!(at(&closed, &[0, 0, 1]), -0.5);
        assert_eq!(num(&ng, &[0.0, 0.0]), num(&closed, &[0.0, 0.0]));

        let nf = nabla1_f_closed(&f.gen, &f.a, &f.m, &f.lc);
        assert_eq!(at(&nf, &[0, 0, 1]), 0.0);
        assert_eq!(at(&nf, &[1, 0, 1]), 0.5);

        let nbig = nabla1_big_g_closed(&f.gen, &f.a, &f.m, &f.lc);
        assert_eq!(at(&nbig, &[0, 0, 1]), -0.5);

        let na = nabla1_a_closed(&f.gen, &f.a, &f.m, &f.lc);
        // (∇¹_{∂1} A)∂1 = ½∂1; (∇¹_{∂1} A)∂2 = −½∂2
        assert_eq!(at(&na, &[0, 0, 0]), 0.5);
        assert_eq!(at(&na, &[1, 0, 0]), 0.0);
        assert_eq!(at(&na, &[1, 0, 1]), -0.5);
        assert_eq!(at(&na, &[0, 0, 1]), 0.0);

        let npi = nabla1_pi_closed(&f.gen, &f.a, &f.m, &f.lc);
        assert_eq!(at(&npi, &[0, 1]), -0.5);
        assert_eq!(at(&npi, &[0, 0]), 0.0);

        let rel = nabla2_relations(&f.gen, &f.a, &f.m, &f.lc);
        assert_eq!(at(&rel.g, &[0, 0, 1]), 0.5);
    }

    #[test]
    fn closed_forms_with_vanishing_generator() {
        let f = fixture(&["x", "y"], &[&["1 + x^2", "x*y"], &["-x*y", "2"]], &["0", "0"]);
        let nabla_g_f = covariant_derivative(&f.lc, &f.m.f);
        let p = [0.3, 0.1];
        assert!(nabla1_g_closed(&f.gen, &f.a, &f.m).components().iter().all(Expr::is_zero));
        assert_eq!(num(&nabla1_f_closed(&f.gen, &f.a, &f.m, &f.lc), &p), num(&nabla_g_f, &p));
        assert_eq!(num(&nabla1_big_g_closed(&f.gen, &f.a, &f.m, &f.lc), &p), num(&nabla_g_f, &p));
        let rel = nabla2_relations(&f.gen, &f.a, &f.m, &f.lc);
        assert_eq!(num(&rel.a, &p), num(&covariant_derivative(&f.lc, &f.a.a), &p));
    }

    #[test]
    fn big_g_closed_form_is_the_sum_of_the_parts() {
        let f = fixture(&["x", "y", "z"], &[
            &["1 + 0.1*x*y", "0.3*z", "0.2"],
            &["-0.1*z", "1", "0.1*x^2"],
            &["0.1", "-0.2*x", "1 + 0.1*sin(y)"],
        ], &["x", "y*z", "1"]);
        let sum = nabla1_g_closed(&f.gen, &f.a, &f.m).plus(&nabla1_f_closed(&f.gen, &f.a, &f.m, &f.lc));
        let direct = nabla1_big_g_closed(&f.gen, &f.a, &f.m, &f.lc);
        let p = [0.3, -0.2, 0.5];
        for (a, b) in num(&sum, &p).iter().zip(num(&direct, &p)) {
            assert!((a - b).abs() < 1e-14);
        }
        let n1 = nabla1_g_closed(&f.gen, &f.a, &f.m);
        let n2 = nabla2_relations(&f.gen, &f.a, &f.m, &f.lc).g;
        assert!(num(&n1.plus(&n2), &p).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn levi_civita_is_metric() {
        let f = fixture(&["u", "v"], &[&["1", "0"], &["0", "u^2"]], &["0", "0"]);
        let d = covariant_derivative(&f.lc, &f.m.g);
        assert!(num(&d, &[1.3, 0.2]).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn reconstruction_returns_levi_civita_without_torsion() {
        let f = fixture(&["x", "y"], &[&["1 + x^2", "0"], &["0", "1 + y^2"]], &["0", "0"]);
        let zero = TorsionField {
            t12: TensorField::zeros(2, 1, 2),
            t03: TensorField::zeros(2, 0, 3),
        };
        let l = reconstruct_connection(&zero, &TensorField::zeros(2, 0, 3), &f.m, &f.lc).unwrap();
        assert_eq!(l.coeffs, f.lc.coeffs);
        assert!(reconstruct_connection(&zero, &TensorField::zeros(2, 0, 2), &f.m, &f.lc).is_err());
    }

    #[test]
    fn e1_reconstruction_round_trip() {
        let f = e1();
        let l1 = qs_connection(&f.lc, &f.gen, &f.a, QsFamilyParams::CANONICAL);
        let t = TorsionField {
            t12: TensorField::zeros(2, 1, 2),
            t03: torsion(&l1, &f.m).t03,
        };
        let ng = nabla1_g_closed(&f.gen, &f.a, &f.m);
        let back = reconstruct_connection(&t, &ng, &f.m, &f.lc).unwrap();
        for (a, b) in num(&back.coeffs, &[0.0, 0.0]).iter().zip(num(&l1.coeffs, &[0.0, 0.0])) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}
