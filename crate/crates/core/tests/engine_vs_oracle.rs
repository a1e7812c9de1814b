//! Symbolic engine against the numeric reference model and hand-computed values.

mod common;

use common::*;
use qsnm_core::verify::Geometry;

const POINTS: usize = 6;

/// `(seed, dim)`, the engine, the oracle and sample points.
type Case = ((u64, usize), Geometry, Oracle, Vec<Vec<f64>>);

fn cases() -> Vec<Case> {
    [(1, 2), (2, 3), (3, 4), (11, 3)]
        .into_iter()
        .map(|(seed, dim)| {
            let spec = random_spec(seed, dim);
            let geo = Geometry::from_spec(&spec).unwrap();
            let pts = sample(&geo.chart, POINTS, seed + 100);
            ((seed, dim), geo, Oracle::new(&spec), pts)
        })
        .collect()
}

#[test]
fn connections_match_oracle() {
    for (case, geo, oracle, pts) in cases() {
        let gamma = engine_vs_oracle(&geo.lc.coeffs, &pts, |p| flatten3(&oracle.christoffel(p)));
        let l1 = engine_vs_oracle(&geo.l1.coeffs, &pts, |p| flatten3(&oracle.l1(p)));
        let l2 = engine_vs_oracle(&geo.l2.coeffs, &pts, |p| flatten3(&oracle.l2(p)));
        let l0 = engine_vs_oracle(&geo.l0.coeffs, &pts, |p| flatten3(&oracle.christoffel(p)));
        for (name, err) in [("Gamma", gamma), ("L1", l1), ("L2", l2), ("L0", l0)] {
            assert!(err < 1e-8, "{case:?} {name}: {err:e}");
        }
    }
}

#[test]
fn torsion_and_nonmetricity_match_oracle() {
    for (case, geo, oracle, pts) in cases() {
        let t = engine_vs_oracle(&geo.torsion1().t12, &pts, |p| flatten3(&Oracle::torsion(&oracle.l1(p))));
        let ng = engine_vs_oracle(&geo.tensor("T").unwrap(), &pts, |p| {
            flatten3(&Oracle::torsion(&oracle.l1(p)))
        });
        assert!(t < 1e-8 && ng < 1e-8, "{case:?}: torsion {t:e} {ng:e}");
        let nabla_g = qsnm_core::connection::covariant_derivative(&geo.l1, &geo.metric.g);
        let err = engine_vs_oracle(&nabla_g, &pts, |p| flatten3(&oracle.nabla1_g(p)));
        assert!(err < 1e-8, "{case:?}: nabla1 g {err:e}");
    }
}

#[test]
fn curvatures_match_oracle() {
    for (case, geo, oracle, pts) in cases() {
        let rg = engine_vs_oracle(&geo.r_g().tensor, &pts, |p| flatten4(&oracle.curvature_levi_civita(p)));
        let r1 = engine_vs_oracle(&geo.curvature(1).tensor, &pts, |p| flatten4(&oracle.curvature_l1(p)));
        let r2 = engine_vs_oracle(&geo.curvature(2).tensor, &pts, |p| {
            flatten4(&oracle.curvature(p, |o, q, _| {
                let l1 = o.l1(q);
                let n = l1.len();
                (0..n)
                    .map(|k| (0..n).map(|i| (0..n).map(|j| l1[k][j][i]).collect()).collect())
                    .collect()
            }))
        });
        for (name, err) in [("R_g", rg), ("R1", r1), ("R2", r2)] {
            assert!(err < 1e-6, "{case:?} {name}: {err:e}");
        }
    }
}

#[test]
fn nijenhuis_and_exterior_derivative_match_oracle() {
    for (case, geo, oracle, pts) in cases() {
        let n = engine_vs_oracle(&geo.tensor("N").unwrap(), &pts, |p| flatten3(&oracle.nijenhuis(p)));
        let df = engine_vs_oracle(&geo.tensor("dF").unwrap(), &pts, |p| flatten3(&oracle.exterior_f(p)));
        assert!(n < 1e-8, "{case:?} N: {n:e}");
        assert!(df < 1e-8, "{case:?} dF: {df:e}");
    }
}

#[test]
fn e1_values() {
    let geo = e1_geometry();
    let p = [0.0, 0.0];
    let at = |name: &str, idx: &[usize]| geo.tensor(name).unwrap().evaluate(&p).unwrap().at(idx);
    assert_eq!(at("A", &[0, 1]), -1.0);
    assert_eq!(at("A", &[1, 0]), 1.0);
    assert_eq!(at("L1", &[0, 0, 1]), 0.5);
    assert_eq!(at("L1", &[0, 1, 0]), -0.5);
    assert_eq!(at("L2", &[0, 0, 1]), -0.5);
    assert_eq!(at("T", &[0, 0, 1]), 1.0);
    let cases: [(&str, [usize; 4], f64); 10] = [
        ("R1", [0, 0, 1, 1], 0.25),
        ("R1", [0, 1, 0, 1], -0.25),
        ("R2", [0, 0, 1, 1], 0.25),
        ("R3", [0, 0, 1, 1], 0.25),
        ("R4", [0, 0, 1, 1], -0.75),
        ("R4", [0, 1, 0, 1], 0.75),
        ("R5", [0, 0, 1, 1], -0.25),
        ("R5", [0, 1, 0, 1], -0.25),
        ("R5", [0, 1, 1, 0], 0.5),
        ("R0", [0, 0, 1, 1], 0.0),
    ];
    for (name, idx, want) in cases {
        let got = at(name, &idx);
        assert!((got - want).abs() < 1e-14, "{name}{idx:?} = {got}, want {want}");
    }
    let m1 = |idx: &[usize]| at("M1", idx);
    let via_m1 = at("R_g", &[0, 0, 1, 1]) + 0.5 * (m1(&[0, 0, 1, 1]) - m1(&[0, 1, 0, 1]));
    assert!((via_m1 - 0.25).abs() < 1e-14, "{via_m1}");
    assert_eq!(m1(&[0, 1, 0, 1]), 0.0);
    assert_eq!(geo.tensor("V").unwrap().evaluate(&p).unwrap().max_abs(), 0.0);
    assert_eq!(geo.tensor("N").unwrap().evaluate(&p).unwrap().max_abs(), 0.0);
}

#[test]
fn e1_values_are_position_independent() {
    let geo = e1_geometry();
    let r5 = geo.curvature(5).tensor.clone();
    for p in sample(&geo.chart, 5, 9) {
        assert!((r5.evaluate(&p).unwrap().at(&[0, 0, 1, 1]) + 0.25).abs() < 1e-14);
    }
}
