use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tangenta_bench::{curve, tractrix, CURVES};
use tangenta_core::{certify_area, parse, quadratrix, simulate_device};

fn certify(c: &mut Criterion) {
    let mut g = c.benchmark_group("certify_area");
    for text in CURVES {
        let y = curve(text);
        for tol in [1e-6, 1e-10] {
            g.bench_with_input(BenchmarkId::new(text, tol), &tol, |b, &tol| {
                b.iter(|| certify_area(black_box(&y), 0.0, 2.0, tol).unwrap())
            });
        }
    }
    g.finish();
}

fn table(c: &mut Criterion) {
    let y = curve(CURVES[1]);
    c.bench_function("quadratrix/65 nodes", |b| {
        b.iter(|| quadratrix(black_box(&y), 1.0, 65, 1e-9).unwrap())
    });
}

fn device(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate_device");
    for step in [1e-3, 1e-4] {
        let (cam, cfg) = tractrix(step);
        g.bench_with_input(BenchmarkId::new("tractrix", step), &step, |b, _| {
            b.iter(|| simulate_device(black_box(&cam), &cfg).unwrap())
        });
    }
    g.finish();
}

fn symbolic(c: &mut Criterion) {
    let text = "sqrt(1 + x^3)*exp(-x/2) + ln(2 + sin(x)^2)/(1 + x^2)";
    c.bench_function("parse", |b| b.iter(|| parse(black_box(text)).unwrap()));
    let e = parse(text).unwrap();
    c.bench_function("differentiate", |b| b.iter(|| black_box(&e).differentiate("x")));
    c.bench_function("differentiate twice", |b| {
        b.iter(|| black_box(&e).differentiate("x").differentiate("x"))
    });
}

criterion_group!(benches, certify, table, device, symbolic);
criterion_main!(benches);
