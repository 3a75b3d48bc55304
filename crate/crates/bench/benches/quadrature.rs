use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quad_bench::{sweep, warmed};
use quad_core::analysis::{convergence_table, Reference};
use quad_core::expr::parse;
use quad_core::{degree_probe, Builtin, Precision, Rule};
use std::hint::black_box;

fn composite(c: &mut Criterion) {
    let mut group = c.benchmark_group("composite_1024");
    for bits in [53u32, 128, 256] {
        let prec = Precision::new(bits).unwrap();
        for rule in [Rule::M, Rule::S, Rule::T2] {
            group.bench_with_input(BenchmarkId::new(rule.name(), bits), &prec, |b, &prec| {
                b.iter(|| sweep(Builtin::Atan2, black_box(&[rule]), 1024, prec))
            });
        }
    }
    group.finish();
}

fn table(c: &mut Criterion) {
    let f = warmed(Builtin::Asin6, 4);
    let prec = Precision::EXTENDED;
    let reference = Reference::for_integrand(&f, prec).unwrap();
    let panels: Vec<usize> = (0..=10).map(|k| 1 << k).collect();
    c.bench_function("table_asin6_1..1024_128bit", |b| {
        b.iter(|| convergence_table(&f, &Rule::ALL, black_box(&panels), &reference, prec).unwrap())
    });
}

fn symbolic(c: &mut Criterion) {
    c.bench_function("parse_and_second_derivative", |b| {
        b.iter(|| {
            parse(black_box("6/sqrt(1-x^2) + 2*sin(x)^2"))
                .unwrap()
                .nth_derivative(2)
        })
    });
    c.bench_function("degree_probe_all", |b| {
        b.iter(|| Rule::ALL.map(|r| degree_probe(r, black_box(8))))
    });
}

criterion_group!(benches, composite, table, symbolic);
criterion_main!(benches);
