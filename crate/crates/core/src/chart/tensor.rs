//! Tensor fields as flat arrays of expressions, and their numeric images.
//!
//! Slots are ordered `[upper..., lower...]`, row-major, so a `(1,2)` field
//! `T` stores `T^k_{ij}` at `k*n*n + i*n + j`.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};

/// Iterates all multi-indices of the given rank over `0..dim`, in storage order.
pub fn multi_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |flat| decode(flat, dim, rank))
}

fn decode(mut flat: usize, dim: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in (0..rank).rev() {
        idx[slot] = flat % dim;
        flat /= dim;
    }
    idx
}

#[derive(Clone, PartialEq)]
pub struct TensorField {
    dim: usize,
    upper: usize,
    lower: usize,
    comps: Vec<Expr>,
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorField")
            .field("dim", &self.dim)
            .field("valence", &(self.upper, self.lower))
            .finish_non_exhaustive()
    }
}

impl TensorField {
    pub fn from_fn(
        dim: usize,
        upper: usize,
        lower: usize,
        mut f: impl FnMut(&[usize]) -> Expr,
    ) -> Self {
        let comps = multi_indices(dim, upper + lower).map(|i| f(&i)).collect();
        TensorField {
            dim,
            upper,
            lower,
            comps,
        }
    }

    pub fn zeros(dim: usize, upper: usize, lower: usize) -> Self {
        Self::from_fn(dim, upper, lower, |_| Expr::zero())
    }

    pub fn from_components(dim: usize, upper: usize, lower: usize, comps: Vec<Expr>) -> Result<Self> {
        let want = dim.pow((upper + lower) as u32);
        if comps.len() != want {
            return Err(Error::Shape(format!(
                "valence ({upper},{lower}) in dimension {dim} needs {want} components, got {}",
                comps.len()
            )));
        }
        Ok(TensorField {
            dim,
            upper,
            lower,
            comps,
        })
    }

    /// A `(0,2)` field from a row-major matrix of expressions.
    pub fn from_matrix(rows: Vec<Vec<Expr>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("matrix is not square".into()));
        }
        Self::from_components(n, 0, 2, rows.into_iter().flatten().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn at(&self, idx: &[usize]) -> &Expr {
        &self.comps[self.flat_index(idx)]
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        decode(flat, self.dim, self.rank())
    }

    fn same_shape(&self, other: &TensorField) {
        assert_eq!(
            (self.dim, self.upper, self.lower),
            (other.dim, other.upper, other.lower),
            "tensor shape mismatch"
        );
    }

    pub fn map(&self, f: impl FnMut(&Expr) -> Expr) -> Self {
        self.with_components(self.comps.iter().map(f).collect())
    }

    fn with_components(&self, comps: Vec<Expr>) -> Self {
        TensorField {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            comps,
        }
    }

    pub fn zip_with(&self, other: &TensorField, mut f: impl FnMut(&Expr, &Expr) -> Expr) -> Self {
        self.same_shape(other);
        self.with_components(self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect())
    }

    pub fn plus(&self, other: &TensorField) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn minus(&self, other: &TensorField) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|a| c * a)
    }

    /// Reorders slots: output slot `s` reads input slot `perm[s]`. The
    /// permutation must keep upper slots among upper slots.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank());
        assert!(
            perm[..self.upper].iter().all(|&p| p < self.upper),
            "permutation mixes upper and lower slots"
        );
        let mut src = vec![0; self.rank()];
        Self::from_fn(self.dim, self.upper, self.lower, |idx| {
            for (s, &p) in perm.iter().enumerate() {
                src[p] = idx[s];
            }
            self.at(&src).clone()
        })
    }

    /// Exchanges two slots (absolute positions).
    pub fn swapped(&self, a: usize, b: usize) -> Self {
        let mut perm: Vec<usize> = (0..self.rank()).collect();
        perm.swap(a, b);
        self.permuted(&perm)
    }

    /// Feeds `A X` instead of `X` into lower slot `slot` (absolute position):
    /// `T(..., A∂_i, ...) = A^m_i T(..., ∂_m, ...)`.
    pub fn with_endomorphism_on_lower(&self, slot: usize, a: &TensorField) -> Self {
        assert_eq!(a.valence(), (1, 1));
        assert!(slot >= self.upper && slot < self.rank());
        let mut src = vec![0; self.rank()];
        Self::from_fn(self.dim, self.upper, self.lower, |idx| {
            src.copy_from_slice(idx);
            Expr::sum((0..self.dim).map(|m| {
                src[slot] = m;
                a.at(&[m, idx[slot]]) * self.at(&src)
            }))
        })
    }

    /// Applies `A` to the vector value in upper slot `slot`:
    /// `(A T)^k = A^k_m T^m`.
    pub fn with_endomorphism_on_upper(&self, slot: usize, a: &TensorField) -> Self {
        assert_eq!(a.valence(), (1, 1));
        assert!(slot < self.upper);
        let mut src = vec![0; self.rank()];
        Self::from_fn(self.dim, self.upper, self.lower, |idx| {
            src.copy_from_slice(idx);
            Expr::sum((0..self.dim).map(|m| {
                src[slot] = m;
                a.at(&[idx[slot], m]) * self.at(&src)
            }))
        })
    }

    /// Cyclic sum over three slots of the same variance:
    /// `σ T(X,Y,Z) = T(X,Y,Z) + T(Y,Z,X) + T(Z,X,Y)`.
    pub fn cyclic_sum(&self, slots: [usize; 3]) -> Result<Self> {
        let [a, b, c] = slots;
        if a == b || b == c || a == c || slots.iter().any(|&s| s >= self.rank()) {
            return Err(Error::Shape(format!("invalid cyclic slots {slots:?}")));
        }
        let is_upper = |s: usize| s < self.upper;
        if is_upper(a) != is_upper(b) || is_upper(b) != is_upper(c) {
            return Err(Error::SlotVariance { slots });
        }
        let mut src = vec![0; self.rank()];
        Ok(Self::from_fn(self.dim, self.upper, self.lower, |idx| {
            let (x, y, z) = (idx[a], idx[b], idx[c]);
            src.copy_from_slice(idx);
            let mut term = |p: usize, q: usize, r: usize| {
                src[a] = p;
                src[b] = q;
                src[c] = r;
                self.at(&src).clone()
            };
            term(x, y, z) + term(y, z, x) + term(z, x, y)
        }))
    }

    /// Componentwise partial derivatives, direction index prepended as the
    /// first lower slot: `out[k..][i, j..] = ∂_i T[k..][j..]`.
    pub fn partial(&self) -> Self {
        let n = self.dim;
        let mut src = vec![0; self.rank()];
        Self::from_fn(n, self.upper, self.lower + 1, |idx| {
            let dir = idx[self.upper];
            src[..self.upper].copy_from_slice(&idx[..self.upper]);
            src[self.upper..].copy_from_slice(&idx[self.upper + 1..]);
            self.at(&src).differentiate(dir)
        })
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<NumTensor> {
        let tape = Tape::compile(&self.comps);
        let data = tape.evaluate(point).map_err(|e| self.locate_error(point, e))?;
        Ok(NumTensor {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            data,
        })
    }

    // The shared tape only knows the failing node; find the first component
    // that actually fails to report its multi-index.
    fn locate_error(&self, point: &[f64], source: crate::expr::DomainError) -> Error {
        for (flat, c) in self.comps.iter().enumerate() {
            if let Err(e) = c.evaluate(point) {
                return Error::Domain {
                    index: self.multi_index(flat),
                    source: e,
                };
            }
        }
        Error::Domain {
            index: Vec::new(),
            source,
        }
    }
}

/// Evaluates every component of the field at `p`.
pub fn tensor_eval(t: &TensorField, p: &[f64]) -> Result<NumTensor> {
    t.evaluate(p)
}

/// Numeric values of a tensor field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct NumTensor {
    pub dim: usize,
    pub upper: usize,
    pub lower: usize,
    pub data: Vec<f64>,
}

impl NumTensor {
    pub fn at(&self, idx: &[usize]) -> f64 {
        let flat = idx.iter().fold(0, |acc, &i| acc * self.dim + i);
        self.data[flat]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }
}
