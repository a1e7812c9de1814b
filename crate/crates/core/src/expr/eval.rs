use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::{Expr, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainErrorKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
}

impl fmt::Display for DomainErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainErrorKind::DivisionByZero => "division by zero",
            DomainErrorKind::LogOfNonPositive => "ln of non-positive value",
            DomainErrorKind::SqrtOfNegative => "sqrt of negative value",
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("{kind} in `{node}` (argument {argument})")]
pub struct DomainError {
    pub kind: DomainErrorKind,
    /// Printed form of the offending node, truncated.
    pub node: String,
    pub argument: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    Const(u64),
    Coord(usize),
    Neg(u32),
    Add(u32, u32),
    Sub(u32, u32),
    Mul(u32, u32),
    Div(u32, u32),
    Pow(u32, i32),
    Sin(u32),
    Cos(u32),
    Exp(u32),
    Ln(u32),
    Sqrt(u32),
}

/// A set of expressions flattened into a straight-line program.
///
/// Shared nodes are evaluated once, and structurally identical subtrees are
/// merged at compile time. A tape is immutable and can be evaluated from many
/// threads.
#[derive(Clone)]
pub struct Tape {
    ops: Vec<Op>,
    // The node each slot came from, for error messages.
    origin: Vec<Expr>,
    roots: Vec<u32>,
    dimension: usize,
}

const NODE_PREVIEW: usize = 96;

impl Tape {
    pub fn compile(roots: &[Expr]) -> Tape {
        let mut builder = Builder::default();
        let roots = roots.iter().map(|e| builder.slot(e)).collect();
        Tape {
            dimension: builder.dimension,
            ops: builder.ops,
            origin: builder.origin,
            roots,
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// One past the largest coordinate index referenced by any root.
    pub fn min_dimension(&self) -> usize {
        self.dimension
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<Vec<f64>, DomainError> {
        let mut scratch = Vec::with_capacity(self.ops.len());
        self.evaluate_into(point, &mut scratch)?;
        Ok(self.roots.iter().map(|&r| scratch[r as usize]).collect())
    }

    fn evaluate_into(&self, point: &[f64], v: &mut Vec<f64>) -> Result<(), DomainError> {
        assert!(
            point.len() >= self.dimension,
            "point has {} coordinates, expressions need {}",
            point.len(),
            self.dimension
        );
        v.clear();
        for (slot, op) in self.ops.iter().enumerate() {
            let at = |i: u32| v[i as usize];
            let fail = |kind, argument| DomainError {
                kind,
                node: preview(&self.origin[slot]),
                argument,
            };
            let value = match *op {
                Op::Const(bits) => f64::from_bits(bits),
                Op::Coord(i) => point[i],
                Op::Neg(a) => -at(a),
                Op::Add(a, b) => at(a) + at(b),
                Op::Sub(a, b) => at(a) - at(b),
                Op::Mul(a, b) => at(a) * at(b),
                Op::Div(a, b) => {
                    let d = at(b);
                    if d == 0.0 {
                        return Err(fail(DomainErrorKind::DivisionByZero, d));
                    }
                    at(a) / d
                }
                Op::Pow(a, k) => {
                    let base = at(a);
                    if base == 0.0 && k < 0 {
                        return Err(fail(DomainErrorKind::DivisionByZero, base));
                    }
                    base.powi(k)
                }
                Op::Sin(a) => at(a).sin(),
                Op::Cos(a) => at(a).cos(),
                Op::Exp(a) => at(a).exp(),
                Op::Ln(a) => {
                    let x = at(a);
                    if x <= 0.0 {
                        return Err(fail(DomainErrorKind::LogOfNonPositive, x));
                    }
                    x.ln()
                }
                Op::Sqrt(a) => {
                    let x = at(a);
                    if x < 0.0 {
                        return Err(fail(DomainErrorKind::SqrtOfNegative, x));
                    }
                    x.sqrt()
                }
            };
            v.push(value);
        }
        Ok(())
    }
}

fn preview(e: &Expr) -> String {
    let mut s = e.to_string();
    if s.len() > NODE_PREVIEW {
        let mut cut = NODE_PREVIEW;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push_str("...");
    }
    s
}

#[derive(Default)]
struct Builder {
    ops: Vec<Op>,
    origin: Vec<Expr>,
    by_node: HashMap<usize, u32>,
    by_op: HashMap<Op, u32>,
    dimension: usize,
    // Keeps visited nodes alive so their addresses stay unique.
    keep: Vec<Expr>,
}

impl Builder {
    fn slot(&mut self, e: &Expr) -> u32 {
        if let Some(&s) = self.by_node.get(&e.id()) {
            return s;
        }
        // Iterative post-order so deep sums do not exhaust the stack.
        let mut stack: Vec<(Expr, bool)> = vec![(e.clone(), false)];
        while let Some((node, expanded)) = stack.pop() {
            if self.by_node.contains_key(&node.id()) {
                continue;
            }
            if !expanded {
                stack.push((node.clone(), true));
                for c in node.children() {
                    if !self.by_node.contains_key(&c.id()) {
                        stack.push((c.clone(), false));
                    }
                }
                continue;
            }
            let s = |x: &Expr| self.by_node[&x.id()];
            let op = match node.kind() {
                Kind::Constant(c) => Op::Const(c.to_bits()),
                Kind::Coordinate(i) => {
                    self.dimension = self.dimension.max(i + 1);
                    Op::Coord(*i)
                }
                Kind::Negate(a) => Op::Neg(s(a)),
                Kind::Add(a, b) => Op::Add(s(a), s(b)),
                Kind::Sub(a, b) => Op::Sub(s(a), s(b)),
                Kind::Mul(a, b) => Op::Mul(s(a), s(b)),
                Kind::Div(a, b) => Op::Div(s(a), s(b)),
                Kind::Pow(a, k) => Op::Pow(s(a), *k),
                Kind::Sin(a) => Op::Sin(s(a)),
                Kind::Cos(a) => Op::Cos(s(a)),
                Kind::Exp(a) => Op::Exp(s(a)),
                Kind::Ln(a) => Op::Ln(s(a)),
                Kind::Sqrt(a) => Op::Sqrt(s(a)),
            };
            let slot = match self.by_op.get(&op) {
                Some(&existing) => existing,
                None => {
                    let slot = self.ops.len() as u32;
                    self.ops.push(op);
                    self.origin.push(node.clone());
                    self.by_op.insert(op, slot);
                    slot
                }
            };
            self.by_node.insert(node.id(), slot);
            self.keep.push(node);
        }
        self.by_node[&e.id()]
    }
}
