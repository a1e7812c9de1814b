use std::sync::OnceLock;

use crate::chart::{
    compute_a, compute_p, split_metric, Chart, GeneralizedMetric, GeneratorField, StructureField,
    TensorField,
};
use crate::connection::{
    christoffel, covariant_derivative, dual_connection, qs_connection, symmetric_part_connection,
    torsion, ConnectionCoefficients, QsFamilyParams, TorsionField,
};
use crate::curvature::{
    aux_tensors, curvature_mixed, curvature_standard, d_connection_f, exterior_derivative_f,
    m_tensor, n1_tensor, nijenhuis_classical, v_tensor, AuxTensors, CurvatureField, CurvatureTag,
    MixedKind,
};
use crate::error::{Error, Result};

use super::manifold::ManifoldSpec;

/// Names accepted by [`Geometry::tensor`].
pub const TENSOR_NAMES: &[&str] = &[
    "g", "F", "G", "A", "pi", "P", "Gamma", "L1", "L2", "L0", "T", "R_g", "R0", "R1", "R2", "R3",
    "R4", "R5", "alpha1", "alpha2", "beta1", "gamma1", "gamma2", "delta1", "M1", "M2", "V", "N",
    "N1", "dF", "d1F",
];

/// Every object the checks need, built once and shared. `l1` is the
/// connection under test; `l2` and `l0` are derived from it, so replacing
/// `l1` propagates to every engine-side quantity.
#[derive(Debug)]
pub struct Geometry {
    pub chart: Chart,
    pub metric: GeneralizedMetric,
    pub gen: GeneratorField,
    pub a: StructureField,
    pub lc: ConnectionCoefficients,
    pub l1: ConnectionCoefficients,
    pub l2: ConnectionCoefficients,
    pub l0: ConnectionCoefficients,
    torsion1: OnceLock<TorsionField>,
    aux: OnceLock<AuxTensors>,
    r_g: OnceLock<CurvatureField>,
    curvatures: [OnceLock<CurvatureField>; 6],
}

impl Geometry {
    pub fn new(chart: Chart, big_g: &TensorField, pi: &TensorField) -> Result<Self> {
        let metric = split_metric(big_g, &chart)?;
        let gen = compute_p(&metric, pi)?;
        let a = compute_a(&metric);
        let lc = christoffel(&metric);
        let l1 = qs_connection(&lc, &gen, &a, QsFamilyParams::CANONICAL);
        Ok(Self::assemble(chart, metric, gen, a, lc, l1))
    }

    pub fn from_spec(spec: &ManifoldSpec) -> Result<Self> {
        let parsed = spec.parse()?;
        Self::new(parsed.chart, &parsed.big_g, &parsed.pi)
    }

    fn assemble(
        chart: Chart,
        metric: GeneralizedMetric,
        gen: GeneratorField,
        a: StructureField,
        lc: ConnectionCoefficients,
        l1: ConnectionCoefficients,
    ) -> Self {
        let l2 = dual_connection(&l1);
        let l0 = symmetric_part_connection(&l1, &l2);
        Geometry {
            chart,
            metric,
            gen,
            a,
            lc,
            l1,
            l2,
            l0,
            torsion1: OnceLock::new(),
            aux: OnceLock::new(),
            r_g: OnceLock::new(),
            curvatures: Default::default(),
        }
    }

    /// Same manifold with a different connection under test.
    pub fn with_connection(&self, l1: ConnectionCoefficients) -> Result<Self> {
        if l1.dim() != self.chart.dim() {
            return Err(Error::Shape(format!(
                "connection of dimension {} on a chart of dimension {}",
                l1.dim(),
                self.chart.dim()
            )));
        }
        Ok(Self::assemble(
            self.chart.clone(),
            self.metric.clone(),
            self.gen.clone(),
            self.a.clone(),
            self.lc.clone(),
            l1,
        ))
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Torsion of `l1`.
    pub fn torsion1(&self) -> &TorsionField {
        self.torsion1.get_or_init(|| torsion(&self.l1, &self.metric))
    }

    /// Auxiliary tensors; they depend on `g`, `π` and `A` only.
    pub fn aux(&self) -> &AuxTensors {
        self.aux
            .get_or_init(|| aux_tensors(&self.gen, &self.a, &self.metric, &self.lc))
    }

    pub fn r_g(&self) -> &CurvatureField {
        self.r_g
            .get_or_init(|| curvature_standard(&self.lc, CurvatureTag::LeviCivita))
    }

    /// Operator-defined `R^θ` for `θ = 0..=5`.
    pub fn curvature(&self, theta: u8) -> &CurvatureField {
        let slot = &self.curvatures[usize::from(theta)];
        slot.get_or_init(|| match theta {
            0 => curvature_standard(&self.l0, CurvatureTag::R0),
            1 => curvature_standard(&self.l1, CurvatureTag::R1),
            2 => curvature_standard(&self.l2, CurvatureTag::R2),
            3 => curvature_mixed(&self.l1, &self.l2, MixedKind::Three),
            4 => curvature_mixed(&self.l1, &self.l2, MixedKind::Four),
            _ => curvature_mixed(&self.l1, &self.l2, MixedKind::Five),
        })
    }

    /// Looks up a named object; see [`TENSOR_NAMES`].
    pub fn tensor(&self, name: &str) -> Result<TensorField> {
        let t = match name {
            "g" => self.metric.g.clone(),
            "F" => self.metric.f.clone(),
            "G" => self.metric.big_g.clone(),
            "A" => self.a.a.clone(),
            "pi" => self.gen.pi.clone(),
            "P" => self.gen.p.clone(),
            "Gamma" => self.lc.coeffs.clone(),
            "L1" => self.l1.coeffs.clone(),
            "L2" => self.l2.coeffs.clone(),
            "L0" => self.l0.coeffs.clone(),
            "T" => self.torsion1().t12.clone(),
            "R_g" => self.r_g().tensor.clone(),
            "R0" | "R1" | "R2" | "R3" | "R4" | "R5" => {
                let theta = name.as_bytes()[1] - b'0';
                self.curvature(theta).tensor.clone()
            }
            "alpha1" => self.aux().alpha1.clone(),
            "alpha2" => self.aux().alpha2.clone(),
            "beta1" => self.aux().beta1.clone(),
            "gamma1" => self.aux().gamma1.clone(),
            "gamma2" => self.aux().gamma2.clone(),
            "delta1" => self.aux().delta1.clone(),
            "M1" => m_tensor(self.aux(), 1)?,
            "M2" => m_tensor(self.aux(), 2)?,
            "V" => v_tensor(self.aux()),
            "N" => nijenhuis_classical(&self.a),
            "N1" => n1_tensor(&self.a, &covariant_derivative(&self.l1, &self.a.a)),
            "dF" => exterior_derivative_f(&self.metric.f)?,
            "d1F" => d_connection_f(&self.l1, &self.metric.f)?,
            _ => return Err(Error::UnknownTensor(name.to_string())),
        };
        Ok(t)
    }
}
