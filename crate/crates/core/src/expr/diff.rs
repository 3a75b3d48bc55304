use rug::Rational;

use super::Expr;

impl Expr {
    /// Symbolic d/dx. Identities such as `0 + e`, `1 * e` and `0 * e` are
    /// folded as the result is built; nothing else is simplified.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Pi => Expr::int(0),
            Expr::Var => Expr::int(1),
            Expr::Neg(a) => Expr::neg(a.derivative()),
            Expr::Add(a, b) => Expr::add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => Expr::sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => {
                let da = a.derivative();
                let db = b.derivative();
                if !b.depends_on_x() {
                    return Expr::div(da, (**b).clone());
                }
                Expr::div(
                    Expr::sub(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db)),
                    Expr::pow((**b).clone(), Expr::int(2)),
                )
            }
            Expr::Pow(base, exp) => {
                // exponents are free of x
                let lowered = match exp.as_rational() {
                    Some(q) => Expr::constant(q - Rational::from(1)),
                    None => Expr::sub((**exp).clone(), Expr::int(1)),
                };
                Expr::mul(
                    Expr::mul((**exp).clone(), Expr::pow((**base).clone(), lowered)),
                    base.derivative(),
                )
            }
            Expr::Sin(a) => Expr::mul(Expr::cos((**a).clone()), a.derivative()),
            Expr::Cos(a) => Expr::neg(Expr::mul(Expr::sin((**a).clone()), a.derivative())),
            Expr::Sqrt(a) => Expr::div(
                a.derivative(),
                Expr::mul(Expr::int(2), Expr::sqrt((**a).clone())),
            ),
        }
    }
}
