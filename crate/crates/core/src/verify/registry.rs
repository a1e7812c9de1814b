//! The catalogue of identity checks.

use crate::chart::TensorField;
use crate::connection::{
    covariant_derivative, nabla1_a_closed, nabla1_big_g_closed, nabla1_f_closed, nabla1_g_closed,
    nabla1_pi_closed, nabla2_relations, qs_connection, qs_torsion03_closed, qs_torsion_closed,
    reconstruct_connection, torsion, QsFamilyParams, TorsionField,
};
use crate::curvature::{
    bianchi_rhs, curvature_closed_forms, d_connection_f, exterior_derivative_f, m_tensor,
    n1_tensor, nijenhuis_classical, skew_defect_34, skew_defect_5, torsion_combination, v_tensor,
};
use crate::error::Result;
use crate::expr::Expr;

use super::geometry::Geometry;

/// Every anchor a check may cite. Each is a verbatim fragment of the
/// source text of the corresponding statement.
pub const ANCHORS: &[&str] = &[
    "whose torsion tensor is given with",
    "and which satisfies",
    "For covariant derivative of skew-symmetric part",
    "we obtain the covariant derivative of generalized metric",
    "we obtain the covariant derivative of tensor $A$",
    "For covariant derivative of 1-form",
    "is also non-metric and satisfies the following relations",
    "coincides with Levi-Civita connection",
    "denote the cyclic sum with respect",
    "coincides with that of skew-symmetric part",
    "of the skew symmetric part $F$ of tensor $G$ is given by",
    "the exterior derivative $\\mathrm{d}F$ of the skew symmetric part",
    "Nijenhuis tensor $N$ coincides with",
    "Since for torsion tensor",
    "coincides with Riemannian curvature tensor",
    "can be expressed by the following relation",
    "If we define (1,3) tensor",
    "skew-symmetric properties of curvature tensors",
    "we will obtain the first Bianchi identities",
    "is conjugate symmetric connection if and only if",
    "uniquely determined by the following formula",
    "where $a$ and $b$ are different real numbers",
];

/// Knobs that change what a check builds.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    /// `(a, b)` pairs tried by `general_family_torsion`.
    pub family_params: Vec<QsFamilyParams>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            family_params: vec![
                QsFamilyParams::new(1.0, 0.0),
                QsFamilyParams::new(0.0, -1.0),
                QsFamilyParams::new(2.0, 0.5),
            ],
        }
    }
}

/// One side-by-side comparison.
#[derive(Debug, Clone)]
pub struct Pair {
    pub label: String,
    pub lhs: TensorField,
    pub rhs: TensorField,
}

impl Pair {
    pub fn new(label: impl Into<String>, lhs: TensorField, rhs: TensorField) -> Self {
        Pair {
            label: label.into(),
            lhs,
            rhs,
        }
    }

    fn vanishes(label: impl Into<String>, lhs: TensorField) -> Self {
        let (u, l) = lhs.valence();
        let rhs = TensorField::zeros(lhs.dim(), u, l);
        Self::new(label, lhs, rhs)
    }
}

type Build = fn(&Geometry, &CheckConfig) -> Result<Vec<Pair>>;
type BuildPair = fn(&Geometry, &CheckConfig) -> Result<[Pair; 2]>;

#[derive(Clone, Copy)]
pub enum Procedure {
    /// Passes when every pair agrees within tolerance.
    Identity(Build),
    /// Passes when both pairs agree or both disagree.
    CoVanishing(BuildPair),
}

impl std::fmt::Debug for Procedure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Procedure::Identity(_) => "Identity",
            Procedure::CoVanishing(_) => "CoVanishing",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub anchor: &'static str,
    /// Objects the check reads.
    pub inputs: &'static [&'static str],
    pub procedure: Procedure,
}

macro_rules! check {
    ($name:literal, $anchor:expr, [$($input:literal),*], $kind:ident($f:expr)) => {
        IdentityCheck {
            name: $name,
            anchor: ANCHORS[$anchor],
            inputs: &[$($input),*],
            procedure: Procedure::$kind($f),
        }
    };
}

/// All checks in their fixed order.
pub fn registry() -> Vec<IdentityCheck> {
    vec![
        check!("torsion_matches", 0, ["L1", "pi", "A", "F"], Identity(torsion_matches)),
        check!("nabla1_g_closed", 1, ["L1", "g", "pi", "F"], Identity(nabla1_g)),
        check!("nabla1_F_closed", 2, ["L1", "Gamma", "F", "pi", "A"], Identity(nabla1_f)),
        check!("nabla1_G_closed", 3, ["L1", "Gamma", "G", "pi", "A"], Identity(nabla1_big_g)),
        check!("nabla1_A_closed", 4, ["L1", "Gamma", "A", "pi"], Identity(nabla1_a)),
        check!("nabla1_pi_closed", 5, ["L1", "Gamma", "pi", "A"], Identity(nabla1_pi)),
        check!("nabla2_relations", 6, ["L2", "Gamma", "g", "F", "G", "A", "pi"], Identity(nabla2)),
        check!("nabla0_equals_LC", 7, ["L0", "Gamma"], Identity(nabla0)),
        check!("torsion_identities", 8, ["T", "pi", "A", "F"], Identity(torsion_identities)),
        check!("d1F_equals_dF", 9, ["L1", "F"], Identity(d1f_equals_df)),
        check!("covder_F_identity", 10, ["L1", "Gamma", "T", "g", "F", "A"], Identity(covder_f_identity)),
        check!("exterior_derivative_identity", 11, ["L1", "T", "F", "A"], Identity(exterior_derivative_identity)),
        check!("nijenhuis_N_equals_N1", 12, ["L1", "A", "T"], Identity(nijenhuis)),
        check!("torsion_combination_zero", 13, ["T", "A"], Identity(torsion_combination_zero)),
        check!("R0_equals_Rg", 14, ["L0", "Gamma"], Identity(r0_equals_rg)),
        check!("curvature_closed_forms", 15, ["L1", "L2", "Gamma", "pi", "A"], Identity(closed_forms)),
        check!("m_tensor_forms", 16, ["L1", "L2", "Gamma", "pi", "A"], Identity(m_forms)),
        check!("skew_symmetry", 17, ["L1", "L2", "Gamma", "pi", "A"], Identity(skew_symmetry)),
        check!("bianchi_R4_R5", 18, ["L1", "L2"], Identity(bianchi_r4_r5)),
        check!("bianchi_R1_R2_R3", 18, ["L1", "L2", "Gamma", "pi", "A"], Identity(bianchi_r1_r2_r3)),
        check!("conjugate_symmetry", 19, ["L1", "L2", "Gamma", "pi", "A"], CoVanishing(conjugate_symmetry)),
        check!("reconstruction_round_trip", 20, ["L1", "Gamma", "T", "g"], Identity(reconstruction)),
        check!("general_family_torsion", 21, ["Gamma", "pi", "A"], Identity(general_family)),
    ]
}

pub fn find(name: &str) -> Option<IdentityCheck> {
    registry().into_iter().find(|c| c.name == name)
}

fn torsion_matches(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    let t = geo.torsion1();
    Ok(vec![
        Pair::new("T(X,Y)", t.t12.clone(), qs_torsion_closed(&geo.gen, &geo.a, QsFamilyParams::CANONICAL)),
        Pair::new("T(X,Y,Z)", t.t03.clone(), qs_torsion03_closed(&geo.gen, &geo.metric)),
    ])
}

fn nabla1_g(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![Pair::new(
        "∇¹g",
        covariant_derivative(&geo.l1, &geo.metric.g),
        nabla1_g_closed(&geo.gen, &geo.a, &geo.metric),
    )])
}

fn nabla1_f(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![Pair::new(
        "∇¹F",
        covariant_derivative(&geo.l1, &geo.metric.f),
        nabla1_f_closed(&geo.gen, &geo.a, &geo.metric, &geo.lc),
    )])
}

fn nabla1_big_g(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![Pair::new(
        "∇¹G",
        covariant_derivative(&geo.l1, &geo.metric.big_g),
        nabla1_big_g_closed(&geo.gen, &geo.a, &geo.metric, &geo.lc),
    )])
}

fn nabla1_a(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![Pair::new(
        "∇¹A",
        covariant_derivative(&geo.l1, &geo.a.a),
        nabla1_a_closed(&geo.gen, &geo.a, &geo.metric, &geo.lc),
    )])
}

fn nabla1_pi(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![Pair::new(
        "∇¹π",
        covariant_derivative(&geo.l1, &geo.gen.pi),
        nabla1_pi_closed(&geo.gen, &geo.a, &geo.metric, &geo.lc),
    )])
}

fn nabla2(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    let rel = nabla2_relations(&geo.gen, &geo.a, &geo.metric, &geo.lc);
    let d = |t: &TensorField| covariant_derivative(&geo.l2, t);
    Ok(vec![
        Pair::new("∇²g", d(&geo.metric.g), rel.g),
        Pair::new("∇²F", d(&geo.metric.f), rel.f),
        Pair::new("∇²G", d(&geo.metric.big_g), rel.big_g),
        Pair::new("∇²A", d(&geo.a.a), rel.a),
    ])
}

fn nabla0(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![Pair::new("L⁰", geo.l0.coeffs.clone(), geo.lc.coeffs.clone())])
}

/// `π(X) · t(Y, Z)` as a (0,3) field.
fn pi_times(geo: &Geometry, t: &TensorField) -> TensorField {
    TensorField::from_fn(geo.dim(), 0, 3, |idx| geo.gen.pi.at(&[idx[0]]) * t.at(&[idx[1], idx[2]]))
}

fn torsion_identities(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    let n = geo.dim();
    let a = &geo.a.a;
    let TorsionField { t12, t03 } = geo.torsion1();
    let aux = geo.aux();
    let f = &geo.metric.f;
    let cyc03 = |t: &TensorField| t.cyclic_sum([0, 1, 2]);
    let cyc13 = |t: &TensorField| t.cyclic_sum([1, 2, 3]);

    let first = Pair::new(
        "σT(X,Y,Z) = −2σπ(X)F(Y,Z)",
        cyc03(t03)?,
        cyc03(&pi_times(geo, f))?.scaled(-2.0),
    );

    let f_aa = f.with_endomorphism_on_lower(0, a).with_endomorphism_on_lower(1, a);
    let t_ax_az = t03.with_endomorphism_on_lower(0, a).with_endomorphism_on_lower(2, a);
    let t_ay_az = t03.with_endomorphism_on_lower(1, a).with_endomorphism_on_lower(2, a);
    let second = Pair::new(
        "2σπ(X)F(AY,AZ) = −σ(T(AX,Y,AZ) + T(X,AY,AZ))",
        cyc03(&pi_times(geo, &f_aa))?.scaled(2.0),
        cyc03(&t_ax_az.plus(&t_ay_az))?.scaled(-1.0),
    );

    // T(T(X,Y),Z), stored [l][i][j][k]
    let tt = TensorField::from_fn(n, 1, 3, |idx| {
        let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        Expr::sum((0..n).map(|m| t12.at(&[l, m, k]) * t12.at(&[m, i, j])))
    });
    let sigma_tt = cyc13(&tt)?;
    let pi_form = TensorField::from_fn(n, 1, 3, |idx| {
        let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        aux.pi.at(&[i])
            * (aux.pi_a.at(&[j]) * a.at(&[l, k]) - aux.pi_a.at(&[k]) * a.at(&[l, j]))
    });
    let pi_a_t = TensorField::from_fn(n, 1, 3, |idx| {
        let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        aux.pi_a.at(&[i]) * t12.at(&[l, j, k])
    });
    let third = Pair::new("σT(T(X,Y),Z) = σπ(X)(π(AY)AZ − π(AZ)AY)", sigma_tt.clone(), cyc13(&pi_form)?);
    let third_b = Pair::new("σT(T(X,Y),Z) = σπ(AX)T(Y,Z)", sigma_tt, cyc13(&pi_a_t)?);

    let fourth = Pair::vanishes("σT(X,Y,AZ) = 0", cyc03(&t03.with_endomorphism_on_lower(2, a))?);
    let fifth = Pair::vanishes(
        "σT(AX,AY,Z) = 0",
        cyc03(&t03.with_endomorphism_on_lower(0, a).with_endomorphism_on_lower(1, a))?,
    );
    Ok(vec![first, second, third, third_b, fourth, fifth])
}

fn d1f_equals_df(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![Pair::new(
        "d¹F = dF",
        d_connection_f(&geo.l1, &geo.metric.f)?,
        exterior_derivative_f(&geo.metric.f)?,
    )])
}

fn covder_f_identity(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    let a = &geo.a.a;
    let t = &geo.torsion1().t03;
    let ng = covariant_derivative(&geo.l1, &geo.metric.g);
    let ngf = covariant_derivative(&geo.lc, &geo.metric.f);
    let t_a0 = t.with_endomorphism_on_lower(0, a);
    let t_a1 = t.with_endomorphism_on_lower(1, a);
    let t_a2 = t.with_endomorphism_on_lower(2, a);
    let ng_a0 = ng.with_endomorphism_on_lower(0, a);
    let ng_a1 = ng.with_endomorphism_on_lower(1, a);
    let ng_a2 = ng.with_endomorphism_on_lower(2, a);
    let rhs = TensorField::from_fn(geo.dim(), 0, 3, |idx| {
        let (x, y, z) = (idx[0], idx[1], idx[2]);
        let torsion_terms = t_a2.at(&[x, y, z]) + t_a2.at(&[z, x, y]) + t_a0.at(&[z, x, y])
            + t_a0.at(&[z, y, x])
            + t_a1.at(&[x, y, z])
            + t_a1.at(&[z, y, x]);
        let metric_terms = ng_a1.at(&[x, y, z]) - ng_a2.at(&[x, y, z]) - ng_a1.at(&[y, z, x])
            + ng_a1.at(&[z, y, x])
            + ng_a0.at(&[z, y, x])
            - ng_a0.at(&[y, z, x]);
        ngf.at(idx) + 0.5 * (torsion_terms + metric_terms)
    });
    Ok(vec![Pair::new("∇¹F from T and ∇¹g", covariant_derivative(&geo.l1, &geo.metric.f), rhs)])
}

fn exterior_derivative_identity(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    let t_az = geo.torsion1().t03.with_endomorphism_on_lower(2, &geo.a.a);
    let rhs = d_connection_f(&geo.l1, &geo.metric.f)?.minus(&t_az.cyclic_sum([0, 1, 2])?);
    Ok(vec![Pair::new("dF = −σT(X,Y,AZ) + d¹F", exterior_derivative_f(&geo.metric.f)?, rhs)])
}

fn nijenhuis(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    let n = nijenhuis_classical(&geo.a);
    let n1 = n1_tensor(&geo.a, &covariant_derivative(&geo.l1, &geo.a.a));
    let with_torsion = n1.plus(&torsion_combination(&geo.torsion1().t12, &geo.a));
    Ok(vec![
        Pair::new("N = N¹", n.clone(), n1),
        Pair::new("N = N¹ + torsion terms", n, with_torsion),
    ])
}

fn torsion_combination_zero(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![Pair::vanishes(
        "−T(AX,AY) − A²T(X,Y) + AT(AX,Y) + AT(X,AY) = 0",
        torsion_combination(&geo.torsion1().t12, &geo.a),
    )])
}

fn r0_equals_rg(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![Pair::new("R⁰ = Rᵍ", geo.curvature(0).tensor.clone(), geo.r_g().tensor.clone())])
}

fn closed_forms(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    (1..=5)
        .map(|theta| {
            let closed = curvature_closed_forms(geo.aux(), geo.r_g(), theta)?;
            Ok(Pair::new(
                format!("R{theta}"),
                geo.curvature(theta).tensor.clone(),
                closed.tensor,
            ))
        })
        .collect()
}

/// `T(X,Y)Z − T(Y,X)Z` for a (1,3) field.
fn antisym(t: &TensorField) -> TensorField {
    t.minus(&t.swapped(1, 2))
}

fn symm(t: &TensorField) -> TensorField {
    t.plus(&t.swapped(1, 2))
}

fn m_forms(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    let rg = &geo.r_g().tensor;
    let m1 = m_tensor(geo.aux(), 1)?;
    let m2 = m_tensor(geo.aux(), 2)?;
    Ok(vec![
        Pair::new("R¹ − Rᵍ = ½(M¹ − M¹∘swap)", geo.curvature(1).tensor.minus(rg), antisym(&m1).scaled(0.5)),
        Pair::new("R² − Rᵍ = −½(M² − M²∘swap)", geo.curvature(2).tensor.minus(rg), antisym(&m2).scaled(-0.5)),
    ])
}

fn skew_symmetry(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    let r = |theta: u8| &geo.curvature(theta).tensor;
    let d34 = skew_defect_34(geo.aux());
    Ok(vec![
        Pair::vanishes("R¹(X,Y)Z + R¹(Y,X)Z = 0", symm(r(1))),
        Pair::vanishes("R²(X,Y)Z + R²(Y,X)Z = 0", symm(r(2))),
        Pair::new("R³ skew defect", symm(r(3)), d34.clone()),
        Pair::new("R⁴ skew defect", symm(r(4)), d34),
        Pair::new("R⁵ skew defect", symm(r(5)), skew_defect_5(geo.aux())),
        Pair::new("R⁵(X,Y)Z − R⁵(Y,X)Z = 2Rᵍ", antisym(r(5)), geo.r_g().tensor.scaled(2.0)),
    ])
}

fn bianchi_r4_r5(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    Ok(vec![
        Pair::vanishes("σR⁴ = 0", geo.curvature(4).tensor.cyclic_sum([1, 2, 3])?),
        Pair::vanishes("σR⁵ = 0", geo.curvature(5).tensor.cyclic_sum([1, 2, 3])?),
    ])
}

fn bianchi_r1_r2_r3(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    (1..=3)
        .map(|theta| {
            Ok(Pair::new(
                format!("σR{theta}"),
                geo.curvature(theta).tensor.cyclic_sum([1, 2, 3])?,
                bianchi_rhs(geo.aux(), theta)?,
            ))
        })
        .collect()
}

fn conjugate_symmetry(geo: &Geometry, _: &CheckConfig) -> Result<[Pair; 2]> {
    let v = v_tensor(geo.aux());
    Ok([
        Pair::new("R¹ = R²", geo.curvature(1).tensor.clone(), geo.curvature(2).tensor.clone()),
        Pair::new("V = V∘swap", v.clone(), v.swapped(1, 2)),
    ])
}

fn reconstruction(geo: &Geometry, _: &CheckConfig) -> Result<Vec<Pair>> {
    let closed = TorsionField {
        t12: qs_torsion_closed(&geo.gen, &geo.a, QsFamilyParams::CANONICAL),
        t03: qs_torsion03_closed(&geo.gen, &geo.metric),
    };
    let closed_ng = nabla1_g_closed(&geo.gen, &geo.a, &geo.metric);
    let from_closed = reconstruct_connection(&closed, &closed_ng, &geo.metric, &geo.lc)?;
    let engine_ng = covariant_derivative(&geo.l1, &geo.metric.g);
    let from_engine = reconstruct_connection(geo.torsion1(), &engine_ng, &geo.metric, &geo.lc)?;
    Ok(vec![
        Pair::new("L¹ from closed T and ∇¹g", geo.l1.coeffs.clone(), from_closed.coeffs),
        Pair::new("L¹ from its own T and ∇¹g", geo.l1.coeffs.clone(), from_engine.coeffs),
    ])
}

fn general_family(geo: &Geometry, cfg: &CheckConfig) -> Result<Vec<Pair>> {
    let mut pairs = Vec::new();
    for &params in &cfg.family_params {
        let l = qs_connection(&geo.lc, &geo.gen, &geo.a, params);
        pairs.push(Pair::new(
            format!("a={} b={}", params.a, params.b),
            torsion(&l, &geo.metric).t12,
            qs_torsion_closed(&geo.gen, &geo.a, params),
        ));
    }
    let same = QsFamilyParams::new(1.0, 1.0);
    let l = qs_connection(&geo.lc, &geo.gen, &geo.a, same);
    pairs.push(Pair::vanishes("a=b gives no torsion", torsion(&l, &geo.metric).t12));
    Ok(pairs)
}
