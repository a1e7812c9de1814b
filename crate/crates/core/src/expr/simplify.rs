use std::collections::HashMap;

use super::{Expr, Kind};

/// Light, value-preserving rewrite: constant folding, `x+0`, `x*0`, `x*1`,
/// `x^1`, `x^0` (with `0^0 = 1`) and double negation. Nothing else.
pub fn simplify(e: &Expr) -> Expr {
    let mut memo = HashMap::new();
    simplify_rec(e, &mut memo)
}

fn simplify_rec(e: &Expr, memo: &mut HashMap<usize, Expr>) -> Expr {
    if let Some(done) = memo.get(&e.id()) {
        return done.clone();
    }
    let mut s = |a: &Expr| simplify_rec(a, memo);
    let out = match e.kind() {
        Kind::Constant(_) | Kind::Coordinate(_) => e.clone(),
        Kind::Negate(a) => fold(Kind::Negate(s(a))),
        Kind::Add(a, b) => {
            let (a, b) = (s(a), s(b));
            fold(Kind::Add(a, b))
        }
        Kind::Sub(a, b) => {
            let (a, b) = (s(a), s(b));
            fold(Kind::Sub(a, b))
        }
        Kind::Mul(a, b) => {
            let (a, b) = (s(a), s(b));
            fold(Kind::Mul(a, b))
        }
        Kind::Div(a, b) => {
            let (a, b) = (s(a), s(b));
            fold(Kind::Div(a, b))
        }
        Kind::Pow(a, k) => fold(Kind::Pow(s(a), *k)),
        Kind::Sin(a) => s(a).sin(),
        Kind::Cos(a) => s(a).cos(),
        Kind::Exp(a) => s(a).exp(),
        Kind::Ln(a) => s(a).ln(),
        Kind::Sqrt(a) => s(a).sqrt(),
    };
    memo.insert(e.id(), out.clone());
    out
}

/// Builds one node, applying the local rules to its (already built)
/// children. Folding never hides a domain error: `c/0`, `0^-k`, `ln(c<=0)`
/// and `sqrt(c<0)` stay symbolic.
pub(crate) fn fold(kind: Kind) -> Expr {
    match kind {
        Kind::Negate(a) => match a.kind() {
            Kind::Constant(c) => Expr::constant(-c),
            Kind::Negate(inner) => inner.clone(),
            _ => Expr::from_kind(Kind::Negate(a)),
        },
        Kind::Add(a, b) => match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => Expr::from_kind(Kind::Add(a, b)),
        },
        Kind::Sub(a, b) => match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expr::constant(x - y),
            (Some(0.0), _) => fold(Kind::Negate(b)),
            (_, Some(0.0)) => a,
            _ => Expr::from_kind(Kind::Sub(a, b)),
        },
        Kind::Mul(a, b) => match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expr::constant(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::zero(),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            _ => Expr::from_kind(Kind::Mul(a, b)),
        },
        Kind::Div(a, b) => match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::constant(x / y),
            (_, Some(1.0)) => a,
            _ => Expr::from_kind(Kind::Div(a, b)),
        },
        Kind::Pow(a, k) => {
            if k == 0 {
                return Expr::one();
            }
            if k == 1 {
                return a;
            }
            match a.as_constant() {
                Some(c) if !(c == 0.0 && k < 0) => Expr::constant(c.powi(k)),
                _ => Expr::from_kind(Kind::Pow(a, k)),
            }
        }
        Kind::Sin(a) => a.sin(),
        Kind::Cos(a) => a.cos(),
        Kind::Exp(a) => a.exp(),
        Kind::Ln(a) => a.ln(),
        Kind::Sqrt(a) => a.sqrt(),
        leaf @ (Kind::Constant(_) | Kind::Coordinate(_)) => Expr::from_kind(leaf),
    }
}
