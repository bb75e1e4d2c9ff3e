use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gapfactor::par::Mode;
use gapfactor::tables::{catenary_table, lengths_table};
use gapfactor::verify::{run_suite, VerifyConfig};
use gapfactor::{CoeffField, Group, GroupElement, MonoidSpec};

fn modes() -> Vec<Mode> {
    if Mode::available() {
        vec![Mode::Sequential, Mode::Parallel]
    } else {
        vec![Mode::Sequential]
    }
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for (id, name) in [(3u8, "envelope"), (4, "gadgets")] {
        for mode in modes() {
            let cfg = VerifyConfig {
                mode,
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(name, format!("{mode:?}")), &cfg, |b, cfg| {
                b.iter(|| black_box(run_suite(id, cfg)))
            });
        }
    }
    group.finish();
}

fn tables(c: &mut Criterion) {
    let spec = MonoidSpec::one_gap(Group::Rationals);
    let (from, to) = (GroupElement::integer(1), GroupElement::integer(12));
    let mut group = c.benchmark_group("table");
    group.sample_size(10);
    for mode in modes() {
        let id = format!("{mode:?}");
        group.bench_function(BenchmarkId::new("lengths q=6", &id), |b| {
            b.iter(|| black_box(lengths_table(&spec, CoeffField::Rationals, &from, &to, 6, mode).unwrap()))
        });
        group.bench_function(BenchmarkId::new("catenary q=2", &id), |b| {
            b.iter(|| black_box(catenary_table(&spec, CoeffField::Rationals, &from, &to, 2, mode).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, suites, tables);
criterion_main!(benches);
