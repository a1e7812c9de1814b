use super::{Expr, Kind};

impl Expr {
    /// Exact partial derivative with respect to coordinate `coord`.
    ///
    /// Results are memoized on the node, so differentiating a DAG with shared
    /// subexpressions visits each distinct node once per coordinate.
    pub fn differentiate(&self, coord: usize) -> Expr {
        if let Some(hit) = self.cached_derivative(coord) {
            return hit;
        }
        let d = |e: &Expr| e.differentiate(coord);
        let out = match self.kind() {
            Kind::Constant(_) => Expr::zero(),
            Kind::Coordinate(i) => {
                if *i == coord {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Kind::Negate(a) => -d(a),
            Kind::Add(a, b) => d(a) + d(b),
            Kind::Sub(a, b) => d(a) - d(b),
            Kind::Mul(a, b) => a * d(b) + d(a) * b,
            Kind::Div(a, b) => {
                let (da, db) = (d(a), d(b));
                if db.is_zero() {
                    da / b
                } else {
                    (da * b - a * db) / b.powi(2)
                }
            }
            Kind::Pow(a, k) => (*k as f64) * a.powi(k - 1) * d(a),
            Kind::Sin(a) => a.cos() * d(a),
            Kind::Cos(a) => -(a.sin() * d(a)),
            // A fresh node rather than `self`: the memo must not point back
            // at its owner.
            Kind::Exp(a) => a.exp() * d(a),
            Kind::Ln(a) => d(a) / a,
            Kind::Sqrt(a) => d(a) / (2.0 * a.sqrt()),
        };
        self.store_derivative(coord, out)
    }

    fn cached_derivative(&self, coord: usize) -> Option<Expr> {
        let memo = self.0.derivatives.lock().unwrap_or_else(|p| p.into_inner());
        memo.iter().find(|(c, _)| *c == coord).map(|(_, e)| e.clone())
    }

    fn store_derivative(&self, coord: usize, value: Expr) -> Expr {
        let mut memo = self.0.derivatives.lock().unwrap_or_else(|p| p.into_inner());
        if let Some((_, existing)) = memo.iter().find(|(c, _)| *c == coord) {
            return existing.clone();
        }
        memo.push((coord, value.clone()));
        value
    }
}
