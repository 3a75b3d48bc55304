//! Workloads shared by the benchmarks.

use quad_core::{composite_table_values, Builtin, Integrand, Precision, Real, Rule};

/// Composite values of `rules` on a built-in example.
pub fn sweep(example: Builtin, rules: &[Rule], panels: usize, prec: Precision) -> Real {
    let f = example.integrand();
    let iv = f.interval(prec).expect("built-in interval");
    let values =
        composite_table_values(&f, &iv, rules, panels, prec).expect("built-ins are regular");
    values.into_values().next().expect("at least one rule")
}

/// Integrand whose derivative cache is warm up to `order`.
pub fn warmed(example: Builtin, order: usize) -> Integrand {
    let f = example.integrand();
    let _ = f.derivative(order);
    f
}
