use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use scheffers::chron::{draw_rng, integrate_cascade, random_controls, ControlFamily};
use scheffers::hall::{main_series_fixpoint, main_series_hall, z_series};
use scheffers::riccati::{riccati_series, wei_norman_path};
use scheffers::shuffle::{clear_memo, shuffle_words};
use scheffers::Word;

fn shuffle(c: &mut Criterion) {
    let x: Word = "abcab".parse().unwrap();
    let y: Word = "cbacb".parse().unwrap();
    c.bench_function("shuffle_words 5x5 cold", |b| {
        b.iter(|| {
            clear_memo();
            black_box(shuffle_words(black_box(x), black_box(y)))
        })
    });
    let s = main_series_fixpoint(8);
    c.bench_function("shuffle_exp of 2S degree 8", |b| {
        b.iter(|| black_box(s.scale(&2.into()).shuffle_exp().unwrap()))
    });
}

fn main_series(c: &mut Criterion) {
    let mut group = c.benchmark_group("main series");
    group.sample_size(10);
    for degree in [6, 8, 10] {
        group.bench_with_input(BenchmarkId::new("fixpoint", degree), &degree, |b, &d| {
            b.iter(|| main_series_fixpoint(d))
        });
        group.bench_with_input(BenchmarkId::new("hall", degree), &degree, |b, &d| {
            b.iter(|| main_series_hall(d))
        });
    }
    group.finish();
}

fn cascade(c: &mut Criterion) {
    let controls = random_controls(&mut draw_rng(1, 0), 0.5, 1.0, ControlFamily::Mixed);
    let mut group = c.benchmark_group("cascade");
    group.sample_size(10);
    for degree in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::new("all words", degree), &degree, |b, &d| {
            b.iter(|| integrate_cascade(&controls, d, 1000).unwrap())
        });
    }
    z_series(8);
    group.bench_function("wei-norman path degree 8", |b| {
        b.iter(|| wei_norman_path(&controls, 8, 1000).unwrap())
    });
    group.bench_function("riccati series degree 8", |b| {
        b.iter(|| riccati_series(&controls, 0.5, 8, 1000).unwrap())
    });
    group.finish();
}

criterion_group!(benches, shuffle, main_series, cascade);
criterion_main!(benches);
