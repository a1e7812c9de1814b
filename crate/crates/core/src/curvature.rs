//! Curvature tensors, their closed forms and the auxiliary tensors.
//!
//! Components follow `R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l`, stored `[l][i][j][k]`.
//! Operator definitions are evaluated on coordinate frames, so every term
//! with a Lie bracket drops out.

use crate::chart::{GeneralizedMetric, GeneratorField, StructureField, TensorField};
use crate::connection::{covariant_derivative, ConnectionCoefficients};
use crate::error::{Error, Result};
use crate::expr::Expr;

/// Which curvature tensor a field holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurvatureTag {
    LeviCivita,
    R0,
    R1,
    R2,
    R3,
    R4,
    R5,
}

#[derive(Debug, Clone)]
pub struct CurvatureField {
    /// Valence (1,3), `[l][i][j][k]`.
    pub tensor: TensorField,
    pub tag: CurvatureTag,
}

/// Kinds of curvature built from two connections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedKind {
    Three,
    Four,
    Five,
}

impl MixedKind {
    fn tag(self) -> CurvatureTag {
        match self {
            MixedKind::Three => CurvatureTag::R3,
            MixedKind::Four => CurvatureTag::R4,
            MixedKind::Five => CurvatureTag::R5,
        }
    }
}

/// `R^l_{ijk} = ∂_i L^l_{jk} − ∂_j L^l_{ik} + L^l_{im} L^m_{jk} − L^l_{jm} L^m_{ik}`.
pub fn curvature_standard(l: &ConnectionCoefficients, tag: CurvatureTag) -> CurvatureField {
    let n = l.dim();
    let dl = l.coeffs.partial(); // [l][d][i][j]
    let tensor = TensorField::from_fn(n, 1, 3, |idx| {
        let (o, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        let mut terms = vec![dl.at(&[o, i, j, k]).clone(), -dl.at(&[o, j, i, k])];
        for m in 0..n {
            terms.push(l.at(o, i, m) * l.at(m, j, k));
            terms.push(-(l.at(o, j, m) * l.at(m, i, k)));
        }
        Expr::sum(terms)
    });
    CurvatureField { tensor, tag }
}

/// Curvatures of kinds 3, 4 and 5 from the operator displays, with `l1` the
/// connection and `l2` its dual.
pub fn curvature_mixed(
    l1: &ConnectionCoefficients,
    l2: &ConnectionCoefficients,
    kind: MixedKind,
) -> CurvatureField {
    let n = l1.dim();
    let d1 = l1.coeffs.partial();
    let d2 = l2.coeffs.partial();
    let a = |o, i, j| l1.at(o, i, j);
    let b = |o, i, j| l2.at(o, i, j);
    let tensor = TensorField::from_fn(n, 1, 3, |idx| {
        let (o, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        let mut terms = Vec::new();
        match kind {
            MixedKind::Three | MixedKind::Four => {
                // ∇²_X ∇¹_Y Z − ∇¹_Y ∇²_X Z
                terms.push(d1.at(&[o, i, j, k]).clone());
                terms.push(-d2.at(&[o, j, i, k]));
                for m in 0..n {
                    terms.push(b(o, i, m) * a(m, j, k));
                    terms.push(-(a(o, j, m) * b(m, i, k)));
                    if kind == MixedKind::Three {
                        // + ∇²_{∇¹_Y X} Z − ∇¹_{∇²_X Y} Z
                        terms.push(a(m, j, i) * b(o, m, k));
                        terms.push(-(b(m, i, j) * a(o, m, k)));
                    } else {
                        // + ∇²_{∇²_Y X} Z − ∇¹_{∇¹_X Y} Z
                        terms.push(b(m, j, i) * b(o, m, k));
                        terms.push(-(a(m, i, j) * a(o, m, k)));
                    }
                }
            }
            MixedKind::Five => {
                // ∇¹_X∇¹_Y Z − ∇²_Y∇¹_X Z + ∇²_X∇²_Y Z − ∇¹_Y∇²_X Z
                terms.push(d1.at(&[o, i, j, k]) - d1.at(&[o, j, i, k]));
                terms.push(d2.at(&[o, i, j, k]) - d2.at(&[o, j, i, k]));
                for m in 0..n {
                    terms.push(a(m, j, k) * a(o, i, m));
                    terms.push(-(a(m, i, k) * b(o, j, m)));
                    terms.push(b(m, j, k) * b(o, i, m));
                    terms.push(-(b(m, i, k) * a(o, j, m)));
                }
            }
        }
        let sum = Expr::sum(terms);
        if kind == MixedKind::Five {
            0.5 * sum
        } else {
            sum
        }
    });
    CurvatureField {
        tensor,
        tag: kind.tag(),
    }
}

/// The tensors the curvature closed forms are written in, plus the
/// building blocks they share.
#[derive(Debug, Clone)]
pub struct AuxTensors {
    pub alpha1: TensorField,
    pub alpha2: TensorField,
    pub beta1: TensorField,
    /// `[l][i][j]`: `γ(∂_i, ∂_j)`.
    pub gamma1: TensorField,
    pub gamma2: TensorField,
    pub delta1: TensorField,
    /// `(∇ᵍ_{∂_i} π)(∂_j)`.
    pub nabla_g_pi: TensorField,
    /// `((∇ᵍ_{∂_i} A) ∂_j)^l`, stored `[l][i][j]`.
    pub nabla_g_a: TensorField,
    pub a: TensorField,
    pub a2: TensorField,
    pub pi: TensorField,
    /// `π(A∂_i)`.
    pub pi_a: TensorField,
}

impl AuxTensors {
    fn pi(&self, i: usize) -> &Expr {
        self.pi.at(&[i])
    }
    fn pi_a(&self, i: usize) -> &Expr {
        self.pi_a.at(&[i])
    }
    fn a(&self, l: usize, i: usize) -> &Expr {
        self.a.at(&[l, i])
    }
    fn a2(&self, l: usize, i: usize) -> &Expr {
        self.a2.at(&[l, i])
    }
    fn ngpi(&self, i: usize, j: usize) -> &Expr {
        self.nabla_g_pi.at(&[i, j])
    }
    fn nga(&self, l: usize, i: usize, j: usize) -> &Expr {
        self.nabla_g_a.at(&[l, i, j])
    }

    fn dim(&self) -> usize {
        self.pi.dim()
    }
}

pub fn aux_tensors(
    gen: &GeneratorField,
    a: &StructureField,
    _m: &GeneralizedMetric,
    lc: &ConnectionCoefficients,
) -> AuxTensors {
    let n = lc.dim();
    let nabla_g_pi = covariant_derivative(lc, &gen.pi);
    let nabla_g_a = covariant_derivative(lc, &a.a);
    let a2 = a.squared();
    let pi_a = gen.pi.with_endomorphism_on_lower(0, &a.a);
    let pi = |i: usize| gen.pi.at(&[i]);
    let pa = |i: usize| pi_a.at(&[i]);
    let alpha = |sign: f64| {
        TensorField::from_fn(n, 0, 2, |idx| {
            let (i, j) = (idx[0], idx[1]);
            nabla_g_pi.at(idx) + 0.5 * sign * (pi(i) * pa(j) - pa(i) * pi(j))
        })
    };
    let gamma = |sign: f64| {
        TensorField::from_fn(n, 1, 2, |idx| {
            let (l, i, j) = (idx[0], idx[1], idx[2]);
            nabla_g_a.at(idx) - 0.5 * sign * (pi(j) * a2.at(&[l, i]))
        })
    };
    AuxTensors {
        alpha1: alpha(1.0),
        alpha2: alpha(-1.0),
        beta1: nabla_g_pi.minus(&nabla_g_pi.swapped(0, 1)),
        gamma1: gamma(1.0),
        gamma2: gamma(-1.0),
        delta1: nabla_g_a.minus(&nabla_g_a.swapped(1, 2)),
        nabla_g_pi,
        nabla_g_a,
        a: a.a.clone(),
        a2,
        pi: gen.pi.clone(),
        pi_a,
    }
}

/// `R^θ` rebuilt from `Rᵍ` and the auxiliary tensors, for `θ = 1..=5`.
pub fn curvature_closed_forms(
    aux: &AuxTensors,
    r_g: &CurvatureField,
    theta: u8,
) -> Result<CurvatureField> {
    let n = aux.dim();
    let al1 = |i, j| aux.alpha1.at(&[i, j]);
    let al2 = |i, j| aux.alpha2.at(&[i, j]);
    let be1 = |i, j| aux.beta1.at(&[i, j]);
    let ga1 = |l, i, j| aux.gamma1.at(&[l, i, j]);
    let ga2 = |l, i, j| aux.gamma2.at(&[l, i, j]);
    let de1 = |l, i, j| aux.delta1.at(&[l, i, j]);
    let (pi, pa, a, a2) = (
        |i| aux.pi(i),
        |i| aux.pi_a(i),
        |l, i| aux.a(l, i),
        |l, i| aux.a2(l, i),
    );

    let correction = |o: usize, i: usize, j: usize, k: usize| -> Expr {
        match theta {
            1 => 0.5
                * (al1(i, k) * a(o, j) - al1(j, k) * a(o, i) - be1(i, j) * a(o, k)
                    - ga1(o, i, k) * pi(j)
                    + ga1(o, j, k) * pi(i)
                    + de1(o, i, j) * pi(k)),
            2 => -0.5
                * (al2(i, k) * a(o, j) - al2(j, k) * a(o, i) - be1(i, j) * a(o, k)
                    - ga2(o, i, k) * pi(j)
                    + ga2(o, j, k) * pi(i)
                    + de1(o, i, j) * pi(k)),
            3 | 4 => {
                let mixed = if theta == 3 {
                    al2(i, j) + al1(j, i)
                } else {
                    al1(i, j) + al2(j, i)
                };
                let base = 0.5
                    * (al2(i, k) * a(o, j) + al1(j, k) * a(o, i) - mixed * a(o, k)
                        - ga1(o, i, k) * pi(j)
                        - ga1(o, j, k) * pi(i)
                        + (de1(o, i, j) + 2.0 * ga1(o, j, i)) * pi(k));
                if theta == 3 {
                    base
                } else {
                    base - pi(k) * (pi(j) * a2(o, i) - pi(i) * a2(o, j))
                }
            }
            _ => {
                let first = pi(i) * (pi(j) * a2(o, k) - pa(k) * a(o, j));
                let second = pi(j) * (pi(i) * a2(o, k) - pa(k) * a(o, i));
                let third = pi(k)
                    * (pi(i) * a2(o, j) + pi(j) * a2(o, i) - pa(i) * a(o, j) - pa(j) * a(o, i));
                0.25 * (first + second - third)
            }
        }
    };

    let tag = match theta {
        1 => CurvatureTag::R1,
        2 => CurvatureTag::R2,
        3 => CurvatureTag::R3,
        4 => CurvatureTag::R4,
        5 => CurvatureTag::R5,
        _ => return Err(Error::Config(format!("closed forms exist for θ = 1..=5, got {theta}"))),
    };
    let tensor = TensorField::from_fn(n, 1, 3, |idx| {
        let (o, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        r_g.tensor.at(idx) + correction(o, i, j, k)
    });
    Ok(CurvatureField { tensor, tag })
}

/// `M(X,Y)Z = α(X,Z)AY − γ(X,Z)π(Y) − (∇ᵍ_X π)(Y)AZ + π(Z)(∇ᵍ_X A)Y`,
/// with `(α¹, γ¹)` for `which = 1` and `(α², γ²)` for `which = 2`.
pub fn m_tensor(aux: &AuxTensors, which: u8) -> Result<TensorField> {
    let (alpha, gamma) = match which {
        1 => (&aux.alpha1, &aux.gamma1),
        2 => (&aux.alpha2, &aux.gamma2),
        _ => return Err(Error::Config(format!("M tensor index must be 1 or 2, got {which}"))),
    };
    Ok(TensorField::from_fn(aux.dim(), 1, 3, |idx| {
        let (o, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        alpha.at(&[i, k]) * aux.a(o, j) - gamma.at(&[o, i, k]) * aux.pi(j)
            - aux.ngpi(i, j) * aux.a(o, k)
            + aux.pi(k) * aux.nga(o, i, j)
    }))
}

/// `V(X,Y)Z = π(X)(∇ᵍ_Y A)Z + π(Z)(∇ᵍ_X A)Y + (∇ᵍ_X π)(Z)AY − (∇ᵍ_X π)(Y)AZ`.
pub fn v_tensor(aux: &AuxTensors) -> TensorField {
    TensorField::from_fn(aux.dim(), 1, 3, |idx| {
        let (o, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        aux.pi(i) * aux.nga(o, j, k) + aux.pi(k) * aux.nga(o, i, j) + aux.ngpi(i, k) * aux.a(o, j)
            - aux.ngpi(i, j) * aux.a(o, k)
    })
}

/// Right-hand side of `R(X,Y)Z + R(Y,X)Z` for `R³` and `R⁴`.
pub fn skew_defect_34(aux: &AuxTensors) -> TensorField {
    TensorField::from_fn(aux.dim(), 1, 3, |idx| {
        let (o, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        aux.ngpi(j, k) * aux.a(o, i) + aux.ngpi(i, k) * aux.a(o, j)
            - (aux.ngpi(i, j) + aux.ngpi(j, i)) * aux.a(o, k)
            - aux.pi(i) * aux.nga(o, j, k)
            - aux.pi(j) * aux.nga(o, i, k)
            + aux.pi(k) * (aux.nga(o, i, j) + aux.nga(o, j, i))
    })
}

/// Right-hand side of `R⁵(X,Y)Z + R⁵(Y,X)Z`.
pub fn skew_defect_5(aux: &AuxTensors) -> TensorField {
    TensorField::from_fn(aux.dim(), 1, 3, |idx| {
        let (o, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        let (pi, pa) = (|i| aux.pi(i), |i| aux.pi_a(i));
        let first = pi(i) * (pi(j) * aux.a2(o, k) - pa(k) * aux.a(o, j));
        let second = pi(j) * (pi(i) * aux.a2(o, k) - pa(k) * aux.a(o, i));
        let third = pi(k)
            * (pi(i) * aux.a2(o, j) + pi(j) * aux.a2(o, i) - pa(i) * aux.a(o, j) - pa(j) * aux.a(o, i));
        0.5 * (first + second - third)
    })
}

/// Right-hand sides of the first Bianchi identities `σ R^θ(X,Y)Z` for
/// `θ = 1..=5`; `θ = 4, 5` give zero.
pub fn bianchi_rhs(aux: &AuxTensors, theta: u8) -> Result<TensorField> {
    let n = aux.dim();
    let q = |i: usize, j: usize| aux.pi(i) * aux.pi_a(j) - aux.pi_a(i) * aux.pi(j);
    let summand = match theta {
        1 | 2 => {
            let s = if theta == 1 { 1.0 } else { -1.0 };
            TensorField::from_fn(n, 1, 3, |idx| {
                let (o, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
                let derivative = aux.pi(i) * (aux.nga(o, j, k) - aux.nga(o, k, j))
                    - (aux.ngpi(i, j) - aux.ngpi(j, i)) * aux.a(o, k);
                s * derivative - 0.5 * (q(i, j) * aux.a(o, k))
            })
        }
        3 => TensorField::from_fn(n, 1, 3, |idx| {
            let (o, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            q(i, j) * aux.a(o, k)
        }),
        4 | 5 => return Ok(TensorField::zeros(n, 1, 3)),
        _ => return Err(Error::Config(format!("Bianchi identities exist for θ = 1..=5, got {theta}"))),
    };
    summand.cyclic_sum([1, 2, 3])
}

/// Classical Nijenhuis tensor of `A`, `[k][i][j]`:
/// `N^k_{ij} = A^m_i ∂_m A^k_j − A^m_j ∂_m A^k_i − A^k_m ∂_i A^m_j + A^k_m ∂_j A^m_i`.
pub fn nijenhuis_classical(a: &StructureField) -> TensorField {
    let n = a.a.dim();
    let da = a.a.partial(); // [k][d][i]
    let am = |k: usize, i: usize| a.a.at(&[k, i]);
    let d = |k: usize, dir: usize, i: usize| da.at(&[k, dir, i]);
    TensorField::from_fn(n, 1, 2, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        Expr::sum((0..n).map(|m| {
            am(m, i) * d(k, m, j) - am(m, j) * d(k, m, i) - am(k, m) * d(m, i, j) + am(k, m) * d(m, j, i)
        }))
    })
}

/// `N¹(X,Y) = (∇_{AX} A)Y − (∇_{AY} A)X − A(∇_X A)Y + A(∇_Y A)X`, from a
/// `∇A` stored `[l][i][j]` with the direction in slot 1.
pub fn n1_tensor(a: &StructureField, nabla_a: &TensorField) -> TensorField {
    let along_a = nabla_a.with_endomorphism_on_lower(1, &a.a);
    let a_of = nabla_a.with_endomorphism_on_upper(0, &a.a);
    TensorField::from_fn(a.a.dim(), 1, 2, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        along_a.at(&[k, i, j]) - along_a.at(&[k, j, i]) - a_of.at(&[k, i, j]) + a_of.at(&[k, j, i])
    })
}

/// The combination `−T(AX,AY) − A²T(X,Y) + AT(AX,Y) + AT(X,AY)` of a (1,2)
/// torsion, `[k][i][j]`.
pub fn torsion_combination(t12: &TensorField, a: &StructureField) -> TensorField {
    let a2 = a.squared();
    let t_aa = t12.with_endomorphism_on_lower(1, &a.a).with_endomorphism_on_lower(2, &a.a);
    let a2_t = t12.with_endomorphism_on_upper(0, &a2);
    let a_t_ax = t12.with_endomorphism_on_lower(1, &a.a).with_endomorphism_on_upper(0, &a.a);
    let a_t_ay = t12.with_endomorphism_on_lower(2, &a.a).with_endomorphism_on_upper(0, &a.a);
    TensorField::from_fn(t12.dim(), 1, 2, |idx| {
        -t_aa.at(idx) - a2_t.at(idx) + a_t_ax.at(idx) + a_t_ay.at(idx)
    })
}

/// Totally antisymmetric (0,3) field from the `i < j < k` components of `t`:
/// repeated indices give an exact zero, permutations a sign.
fn alternating_from_sorted(t: &TensorField) -> TensorField {
    TensorField::from_fn(t.dim(), 0, 3, |idx| {
        let mut sorted = [idx[0], idx[1], idx[2]];
        let mut odd = false;
        for pass in 0..2 {
            for i in 0..2 - pass {
                if sorted[i] > sorted[i + 1] {
                    sorted.swap(i, i + 1);
                    odd = !odd;
                }
            }
        }
        if sorted[0] == sorted[1] || sorted[1] == sorted[2] {
            Expr::zero()
        } else if odd {
            -t.at(&sorted)
        } else {
            t.at(&sorted).clone()
        }
    })
}

/// `dF_{ijk} = ∂_i F_{jk} + ∂_j F_{ki} + ∂_k F_{ij}` for antisymmetric `F`.
/// The result is stored as an alternating form, so it vanishes identically in
/// dimension 2.
pub fn exterior_derivative_f(f: &TensorField) -> Result<TensorField> {
    if f.valence() != (0, 2) {
        return Err(Error::Shape(format!("dF needs a (0,2) field, got {:?}", f.valence())));
    }
    Ok(alternating_from_sorted(&f.partial().cyclic_sum([0, 1, 2])?))
}

/// `d^∇F(X,Y,Z) = (∇_X F)(Y,Z) + (∇_Y F)(Z,X) + (∇_Z F)(X,Y)` for antisymmetric
/// `F`, stored as an alternating form.
pub fn d_connection_f(l: &ConnectionCoefficients, f: &TensorField) -> Result<TensorField> {
    if f.valence() != (0, 2) {
        return Err(Error::Shape(format!("d^∇F needs a (0,2) field, got {:?}", f.valence())));
    }
    Ok(alternating_from_sorted(&covariant_derivative(l, f).cyclic_sum([0, 1, 2])?))
}
