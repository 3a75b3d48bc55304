#![allow(dead_code)]

use proptest::prelude::*;
use quad_core::associate::{associate_value, bracket, check_assumption_a, DEFAULT_SAMPLES};
use quad_core::{
    composite_table_values, CompanionPair, Expr, Integrand, Interval, Precision, Real, Rule,
};
use rug::Rational;

pub const P: Precision = Precision::DOUBLE;

pub fn real(v: f64, prec: Precision) -> Real {
    Real::from_f64(v, prec)
}

/// Non-negative constants with terminating decimal expansions, so printed
/// trees parse back to the same nodes.
fn leaf_const() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i64..=6).prop_map(Expr::int),
        (1i64..=40).prop_map(|n| Expr::Const(Rational::from((n, 4)))),
    ]
}

/// Polynomial expression trees paired with their degree in `x`.
pub fn poly_tree() -> impl Strategy<Value = (Expr, u32)> {
    let leaf = prop_oneof![leaf_const().prop_map(|c| (c, 0)), Just((Expr::Var, 1))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|((a, da), (b, db))| (Expr::Add(Box::new(a), Box::new(b)), da.max(db))),
            (inner.clone(), inner.clone())
                .prop_map(|((a, da), (b, db))| (Expr::Sub(Box::new(a), Box::new(b)), da.max(db))),
            (inner.clone(), inner.clone())
                .prop_map(|((a, da), (b, db))| (Expr::Mul(Box::new(a), Box::new(b)), da + db)),
            inner.clone().prop_map(|(a, d)| (Expr::Neg(Box::new(a)), d)),
            (inner, 0i64..=3).prop_map(|((a, d), k)| (
                Expr::Pow(Box::new(a), Box::new(Expr::int(k))),
                d * k as u32
            )),
        ]
    })
    .prop_filter("degree at most 6", |(_, d)| *d <= 6)
}

/// Polynomial trees wrapped in the transcendental functions, staying away
/// from the square-root branch point.
pub fn smooth_tree() -> impl Strategy<Value = Expr> {
    (poly_tree(), 0u8..4).prop_map(|((e, _), wrap)| match wrap {
        0 => e,
        1 => Expr::Sin(Box::new(e)),
        2 => Expr::Cos(Box::new(e)),
        _ => Expr::Sqrt(Box::new(Expr::Add(
            Box::new(Expr::int(1)),
            Box::new(Expr::Mul(Box::new(e.clone()), Box::new(e))),
        ))),
    })
}

/// Dense polynomial with small rational coefficients.
#[derive(Clone, Debug)]
pub struct Poly {
    pub coeffs: Vec<Rational>,
    pub a: Rational,
    pub b: Rational,
}

impl Poly {
    pub fn expr(&self) -> Expr {
        self.coeffs
            .iter()
            .enumerate()
            .fold(Expr::int(0), |acc, (k, c)| {
                let mono = Expr::mul(
                    Expr::constant(c.clone()),
                    Expr::pow(Expr::Var, Expr::int(k as i64)),
                );
                Expr::add(acc, mono)
            })
    }

    /// Exact integral over `[a, b]`.
    pub fn integral(&self) -> Rational {
        let mut total = Rational::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            let k1 = k as u32 + 1;
            let pb = pow_q(&self.b, k1);
            let pa = pow_q(&self.a, k1);
            total += (c * (pb - pa)) / Rational::from(k1);
        }
        total
    }

    pub fn integrand(&self) -> Integrand {
        Integrand::new(
            self.expr(),
            Expr::constant(self.a.clone()),
            Expr::constant(self.b.clone()),
        )
        .unwrap()
        .with_reference(Expr::constant(self.integral()))
        .unwrap()
    }
}

pub fn pow_q(q: &Rational, k: u32) -> Rational {
    (0..k).fold(Rational::from(1), |acc, _| acc * q)
}

pub fn poly() -> impl Strategy<Value = Poly> {
    let coeff = (-20i64..=20, 1i64..=4).prop_map(|(n, d)| Rational::from((n, d)));
    (prop::collection::vec(coeff, 1..=7), -8i64..=8, 1i64..=8).prop_map(|(coeffs, a4, w4)| Poly {
        coeffs,
        a: Rational::from((a4, 4)),
        b: Rational::from((a4 + w4, 4)),
    })
}

pub fn eval_f64(e: &Expr, x: f64) -> f64 {
    e.eval(&real(x, P), P).unwrap().to_f64()
}

/// Symbolic first derivative against a central difference with `h = 1e-5`.
pub fn check_derivative(e: &Expr, x: f64) -> Result<(), String> {
    let h = 1e-5;
    let d = e.derivative();
    let sym = eval_f64(&d, x);
    let fd = (eval_f64(e, x + h) - eval_f64(e, x - h)) / (2.0 * h);
    if (sym - fd).abs() <= 1e-5 * (1.0 + sym.abs()) {
        Ok(())
    } else {
        Err(format!("{e}: symbolic {sym} vs difference {fd} at {x}"))
    }
}

/// For each pair on each panel count: the associate lies in the bracket,
/// and the exact integral does too whenever the sign check certifies it.
pub fn check_containment(p: &Poly, panels: &[usize]) -> Result<(), String> {
    let prec = Precision::EXTENDED;
    let f = p.integrand();
    let iv = f.interval(prec).map_err(|e| e.to_string())?;
    let exact = Real::from_rational(&p.integral(), prec.with_guard(32));
    for pair in CompanionPair::ALL {
        let verdict = check_assumption_a(&f, pair.derivative_order(), &iv, DEFAULT_SAMPLES, prec)
            .map_err(|e| e.to_string())?;
        for &n in panels {
            let rules = [pair.positive(), pair.negative()];
            let v = composite_table_values(&f, &iv, &rules, n, prec).map_err(|e| e.to_string())?;
            let (x, y) = (&v[&pair.positive()], &v[&pair.negative()]);
            let br = bracket(x, y);
            let assoc = associate_value(x, y, pair.weights());
            if !br.contains(&assoc) {
                return Err(format!("{pair} n={n}: associate {assoc} outside {br}"));
            }
            if verdict.certifies() && !within_rounding(&br, &exact, &magnitude(&f, &iv, prec)) {
                return Err(format!(
                    "{pair} n={n} ({verdict}): integral {exact} outside {br}"
                ));
            }
        }
    }
    Ok(())
}

/// `(b - a) max |f|` over a coarse grid; bounds the panel sums.
pub fn magnitude(f: &Integrand, iv: &Interval, prec: Precision) -> Real {
    let steps = 64;
    let mut biggest = Real::zero(prec);
    for k in 0..=steps {
        let x = iv.a() + &(iv.width() * Real::from_i64(k, prec) / Real::from_i64(steps, prec));
        if let Ok(v) = f.eval(&x, prec) {
            biggest = biggest.max(&v.abs()).clone();
        }
    }
    iv.width() * biggest
}

/// Bracket widened by a rounding allowance far below any real violation.
fn within_rounding(br: &quad_core::Bracket, v: &Real, scale: &Real) -> bool {
    let prec = br.lo().precision();
    let unit = Real::from_i64(1, prec) / Real::from_i64(2, prec).powi(prec.bits() as i32 - 24);
    let slack = unit * (scale.clone() + Real::from_i64(1, prec));
    let lo = br.lo() - &slack;
    let hi = br.hi() + &slack;
    lo <= *v && *v <= hi
}

/// Composite S against `(2 M + T) / 3` assembled from composite M and T.
pub fn check_commutation(f: &Integrand, n: usize, prec: Precision) -> Result<(), String> {
    let iv = f.interval(prec).map_err(|e| e.to_string())?;
    let v = composite_table_values(f, &iv, &[Rule::M, Rule::T, Rule::S], n, prec)
        .map_err(|e| e.to_string())?;
    let two = Real::from_i64(2, prec);
    let three = Real::from_i64(3, prec);
    let mean = (&two * &v[&Rule::M] + v[&Rule::T].clone()) / three;
    let s = &v[&Rule::S];
    let scale = magnitude(f, &iv, prec);
    let tol = Real::from_i64(16, prec) * scale.ulp();
    if (s - &mean).abs() <= tol || s == &mean {
        Ok(())
    } else {
        Err(format!("n={n}: S={s} vs (2M+T)/3={mean}"))
    }
}

/// Simple rule on `x^k` over `[0, 1]` against `1 / (k + 1)`.
pub fn check_monomial(rule: Rule, k: u32, prec: Precision) -> Result<(), String> {
    let text = format!("x^{k}");
    let f = Integrand::parse(&text, "0", "1").map_err(|e| e.to_string())?;
    let iv = f.interval(prec).map_err(|e| e.to_string())?;
    let v = quad_core::eval_simple(rule, &f, &iv, prec).map_err(|e| e.to_string())?;
    let exact = Real::from_rational(&Rational::from((1, k + 1)), prec);
    let rel = ((&v - &exact) / exact.clone()).abs();
    let tol = Real::from_i64(1, prec) / Real::from_i64(2, prec).powi(prec.bits() as i32 - 8);
    if rel <= tol {
        Ok(())
    } else {
        Err(format!("{rule} on x^{k}: {v}"))
    }
}

/// Direct Simpson formula against the weighted-mean evaluation.
pub fn check_simpson_identity(f: &Integrand, prec: Precision) -> Result<(), String> {
    let iv: Interval = f.interval(prec).map_err(|e| e.to_string())?;
    let s = quad_core::eval_simple(Rule::S, f, &iv, prec).map_err(|e| e.to_string())?;
    let fa = f.eval(iv.a(), prec).map_err(|e| e.to_string())?;
    let fb = f.eval(iv.b(), prec).map_err(|e| e.to_string())?;
    let fm = f.eval(&iv.midpoint(), prec).map_err(|e| e.to_string())?;
    let direct = iv.width() / Real::from_i64(6, prec)
        * (fa.clone() + Real::from_i64(4, prec) * fm.clone() + fb.clone());
    let scale = iv.width() * (fa.abs() + fm.abs() + fb.abs());
    let tol = Real::from_i64(16, prec) * scale.ulp();
    if (&s - &direct).abs() <= tol {
        Ok(())
    } else {
        Err(format!("S={s} vs direct {direct}"))
    }
}

/// The exact-rational probe never reports less than the metadata degree.
pub fn rational_degree_ok(rule: Rule) -> bool {
    quad_core::degree_probe(rule, 8)
        .degree
        .is_some_and(|d| d >= rule.meta().degree)
}
