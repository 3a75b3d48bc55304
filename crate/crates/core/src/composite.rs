//! Composite rules over `n` uniform panels.
//!
//! Panel `i` is `[a + i h, a + (i + 1) h]` with `h = (b - a) / n`. Nodes are
//! indexed in half steps, `x_k = a + k (h / 2)` for `k < 2n` and `x_2n = b`,
//! so shared endpoints are evaluated once. Panel values are accumulated with
//! compensated summation in panel order, which makes results independent of
//! everything but the inputs and the precision.

use crate::error::Error;
use crate::expr::DomainError;
use crate::integrand::{Integrand, Interval};
use crate::real::{CompensatedSum, Precision, Real};
use crate::rules::{panel_values, Needs, Rule, RuleMap, Samples};

/// One composite evaluation.
#[derive(Clone, Copy, Debug)]
pub struct CompositeRequest<'a> {
    pub rule: Rule,
    pub integrand: &'a Integrand,
    pub interval: &'a Interval,
    pub panels: usize,
    pub precision: Precision,
}

struct Grid<'a> {
    a: Real,
    b: Real,
    half: Real,
    panels: usize,
    f: &'a Integrand,
    prec: Precision,
}

impl<'a> Grid<'a> {
    fn new(f: &'a Integrand, iv: &Interval, panels: usize, prec: Precision) -> Result<Self, Error> {
        if panels == 0 {
            return Err(Error::InvalidPanels);
        }
        let a = iv.a().to_precision(prec);
        let b = iv.b().to_precision(prec);
        let h = (&b - &a) / Real::from_i64(panels as i64, prec);
        let half = h / Real::from_i64(2, prec);
        Ok(Grid {
            a,
            b,
            half,
            panels,
            f,
            prec,
        })
    }

    fn width(&self) -> Real {
        &self.half * &Real::from_i64(2, self.prec)
    }

    fn node(&self, k: usize) -> Real {
        if k == 2 * self.panels {
            self.b.clone()
        } else {
            &self.a + &(Real::from_i64(k as i64, self.prec) * &self.half)
        }
    }

    fn sample(&self, panel: usize, k: usize, order: usize) -> Result<Real, Error> {
        let x = self.node(k);
        self.f
            .eval_derivative(order, &x, self.prec)
            .map_err(|source: DomainError| Error::Panel {
                panel,
                node: x.to_string(),
                source,
            })
    }
}

/// Composite values of every rule in `rules`, sharing node evaluations.
pub fn composite_table_values(
    f: &Integrand,
    iv: &Interval,
    rules: &[Rule],
    panels: usize,
    prec: Precision,
) -> Result<RuleMap<Real>, Error> {
    let grid = Grid::new(f, iv, panels, prec)?;
    let needs = Needs::of(rules);
    let width = grid.width();
    let mut sums: RuleMap<CompensatedSum> = rules
        .iter()
        .map(|&r| (r, CompensatedSum::new(prec)))
        .collect();
    let mut carried: Option<Real> = None;

    for i in 0..panels {
        let left = match (needs.left, carried.take()) {
            (false, _) => None,
            (true, Some(v)) => Some(v),
            (true, None) => Some(grid.sample(i, 2 * i, 0)?),
        };
        let right = if needs.right {
            Some(grid.sample(i, 2 * i + 2, 0)?)
        } else {
            None
        };
        let mid = if needs.mid {
            Some(grid.sample(i, 2 * i + 1, 0)?)
        } else {
            None
        };
        let curvature = if needs.curvature {
            Some(grid.sample(i, 2 * i + 1, 2)?)
        } else {
            None
        };
        if needs.left {
            carried = right.clone();
        }
        let samples = Samples {
            width: width.clone(),
            left,
            right,
            mid,
            curvature,
        };
        for (rule, value) in panel_values(rules, &samples) {
            if let Some(acc) = sums.get_mut(&rule) {
                acc.add(&value);
            }
        }
    }
    Ok(sums.into_iter().map(|(r, s)| (r, s.total())).collect())
}

/// Sum of the simple rule over all panels.
pub fn composite_eval(req: &CompositeRequest<'_>) -> Result<Real, Error> {
    let mut values = composite_table_values(
        req.integrand,
        req.interval,
        &[req.rule],
        req.panels,
        req.precision,
    )?;
    Ok(values.remove(&req.rule).expect("requested rule is present"))
}
