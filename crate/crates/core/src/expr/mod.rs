//! Closed-form scalar expressions over chart coordinates.
//!
//! An [`Expr`] is an immutable, reference-counted tree. Subtrees are shared
//! freely, so large derived objects (inverse metrics, connection
//! coefficients, curvature components) form a DAG rather than a tree. Every
//! node carries its own derivative memo, which makes repeated partial
//! differentiation of shared subexpressions cheap and keeps the public API
//! purely functional.
//!
//! The operator overloads (`+`, `-`, `*`, `/`, unary `-`) and the
//! `sin`/`cos`/... methods build nodes through folding constructors that apply
//! the same local rules as [`simplify`]. Use [`Expr::from_kind`] to build a
//! node verbatim.

mod diff;
mod eval;
mod parse;
mod simplify;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

pub use eval::{DomainError, DomainErrorKind, Tape};
pub use parse::{parse, ParseError, FUNCTION_NAMES};
pub use simplify::simplify;

/// Node kinds. Children are themselves [`Expr`] handles.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Constant(f64),
    /// 0-based chart coordinate.
    Coordinate(usize),
    Negate(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    /// Integer exponents only; general powers are written `exp(b*ln(a))`.
    Pow(Expr, i32),
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
    Ln(Expr),
    Sqrt(Expr),
}

struct Node {
    kind: Kind,
    // (coordinate, derivative) pairs; never references the node itself.
    derivatives: Mutex<Vec<(usize, Expr)>>,
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn from_kind(kind: Kind) -> Self {
        Expr(Arc::new(Node {
            kind,
            derivatives: Mutex::new(Vec::new()),
        }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn constant(value: f64) -> Self {
        Self::from_kind(Kind::Constant(value))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn coord(index: usize) -> Self {
        Self::from_kind(Kind::Coordinate(index))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.kind() {
            Kind::Constant(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_constant() == Some(1.0)
    }

    /// True when two handles point at the same node.
    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coordinate(&self) -> Option<usize> {
        let mut best = None;
        let mut stack = vec![self.clone()];
        let mut seen = std::collections::HashSet::new();
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            if let Kind::Coordinate(i) = e.kind() {
                best = Some(best.map_or(*i, |b: usize| b.max(*i)));
            }
            stack.extend(e.children().into_iter().cloned());
        }
        best
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.kind() {
            Kind::Constant(_) | Kind::Coordinate(_) => vec![],
            Kind::Negate(a)
            | Kind::Pow(a, _)
            | Kind::Sin(a)
            | Kind::Cos(a)
            | Kind::Exp(a)
            | Kind::Ln(a)
            | Kind::Sqrt(a) => vec![a],
            Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => vec![a, b],
        }
    }

    /// Evaluates at a point. Compiles a throwaway [`Tape`]; prefer a shared
    /// tape when evaluating many expressions or many points.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64, DomainError> {
        let tape = Tape::compile(std::slice::from_ref(self));
        Ok(tape.evaluate(point)?[0])
    }

    pub fn sin(&self) -> Expr {
        match self.as_constant() {
            Some(c) => Expr::constant(c.sin()),
            None => Expr::from_kind(Kind::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_constant() {
            Some(c) => Expr::constant(c.cos()),
            None => Expr::from_kind(Kind::Cos(self.clone())),
        }
    }

    pub fn exp(&self) -> Expr {
        match self.as_constant() {
            Some(c) => Expr::constant(c.exp()),
            None => Expr::from_kind(Kind::Exp(self.clone())),
        }
    }

    pub fn ln(&self) -> Expr {
        match self.as_constant() {
            Some(c) if c > 0.0 => Expr::constant(c.ln()),
            _ => Expr::from_kind(Kind::Ln(self.clone())),
        }
    }

    pub fn sqrt(&self) -> Expr {
        match self.as_constant() {
            Some(c) if c >= 0.0 => Expr::constant(c.sqrt()),
            _ => Expr::from_kind(Kind::Sqrt(self.clone())),
        }
    }

    pub fn powi(&self, exponent: i32) -> Expr {
        simplify::fold(Kind::Pow(self.clone(), exponent))
    }

    /// Sum of an arbitrary number of terms, skipping structural zeros.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), |acc, t| acc + t)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other) || self.kind() == other.kind()
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self.kind(), f)
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Self {
        Expr::constant(value)
    }
}

/// Canonical printer: fully parenthesized, coordinates written `x0, x1, ...`
/// unless names are supplied through [`Expr::display_with`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, &|i, f| write!(f, "x{i}"), f)
    }
}

pub struct Named<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names;
        write_expr(
            self.expr,
            &|i, f| match names.get(i) {
                Some(n) => f.write_str(n),
                None => write!(f, "x{i}"),
            },
            f,
        )
    }
}

impl Expr {
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> Named<'a> {
        Named { expr: self, names }
    }
}

fn write_constant(c: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // `{:?}` is the shortest representation that round-trips.
    if c < 0.0 || (c == 0.0 && c.is_sign_negative()) {
        write!(f, "(-{:?})", -c)
    } else {
        write!(f, "{c:?}")
    }
}

fn write_expr(
    e: &Expr,
    coord: &dyn Fn(usize, &mut fmt::Formatter<'_>) -> fmt::Result,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let binary = |op: &str, a: &Expr, b: &Expr, f: &mut fmt::Formatter<'_>| {
        f.write_str("(")?;
        write_expr(a, coord, f)?;
        write!(f, " {op} ")?;
        write_expr(b, coord, f)?;
        f.write_str(")")
    };
    let call = |name: &str, a: &Expr, f: &mut fmt::Formatter<'_>| {
        write!(f, "{name}(")?;
        write_expr(a, coord, f)?;
        f.write_str(")")
    };
    match e.kind() {
        Kind::Constant(c) => write_constant(*c, f),
        Kind::Coordinate(i) => coord(*i, f),
        Kind::Negate(a) => {
            f.write_str("(-")?;
            write_expr(a, coord, f)?;
            f.write_str(")")
        }
        Kind::Add(a, b) => binary("+", a, b, f),
        Kind::Sub(a, b) => binary("-", a, b, f),
        Kind::Mul(a, b) => binary("*", a, b, f),
        Kind::Div(a, b) => binary("/", a, b, f),
        Kind::Pow(a, k) => {
            f.write_str("(")?;
            write_expr(a, coord, f)?;
            write!(f, "^{k})")
        }
        Kind::Sin(a) => call("sin", a, f),
        Kind::Cos(a) => call("cos", a, f),
        Kind::Exp(a) => call("exp", a, f),
        Kind::Ln(a) => call("ln", a, f),
        Kind::Sqrt(a) => call("sqrt", a, f),
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $kind:ident) => {
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                simplify::fold(Kind::$kind(self, rhs))
            }
        }
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                simplify::fold(Kind::$kind(self.clone(), rhs.clone()))
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                simplify::fold(Kind::$kind(self, rhs.clone()))
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                simplify::fold(Kind::$kind(self.clone(), rhs))
            }
        }
        impl $trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                simplify::fold(Kind::$kind(self, Expr::constant(rhs)))
            }
        }
        impl $trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                simplify::fold(Kind::$kind(self.clone(), Expr::constant(rhs)))
            }
        }
        impl $trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                simplify::fold(Kind::$kind(Expr::constant(self), rhs))
            }
        }
        impl $trait<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                simplify::fold(Kind::$kind(Expr::constant(self), rhs.clone()))
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);
binary_op!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        simplify::fold(Kind::Negate(self))
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        simplify::fold(Kind::Negate(self.clone()))
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printer_is_fully_parenthesized() {
        let x = Expr::coord(0);
        let y = Expr::coord(1);
        let e = Expr::from_kind(Kind::Add(
            Expr::from_kind(Kind::Pow(x, 2)),
            Expr::from_kind(Kind::Sin(y)),
        ));
        assert_eq!(e.to_string(), "((x0^2) + sin(x1))");
        let names = vec!["u".to_string(), "v".to_string()];
        assert_eq!(e.display_with(&names).to_string(), "((u^2) + sin(v))");
    }

    #[test]
    fn negative_constants_print_with_parens() {
        assert_eq!(Expr::constant(-1.5).to_string(), "(-1.5)");
        assert_eq!(Expr::constant(2.0).to_string(), "2.0");
    }

    #[test]
    fn operators_fold_identities() {
        let x = Expr::coord(0);
        assert!((&x * 0.0).is_zero());
        assert!((&x * 1.0).ptr_eq(&x));
        assert!((&x + 0.0).ptr_eq(&x));
        assert_eq!((Expr::constant(2.0) * Expr::constant(3.0)).as_constant(), Some(6.0));
    }

    #[test]
    fn max_coordinate_walks_the_dag() {
        let e = Expr::coord(2) * Expr::coord(0).sin();
        assert_eq!(e.max_coordinate(), Some(2));
        assert_eq!(Expr::constant(1.0).max_coordinate(), None);
    }
}
