//! Sequential against parallel execution of the two bulk workloads.

use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use galspec::arith::Rat;
use galspec::family::Family;
use galspec::par::Exec;
use galspec::survey::{census, identify};

fn family(name: &str) -> Family {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../manifests").join(format!("{name}.json"));
    Family::load(path).unwrap()
}

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_census(c: &mut Criterion) {
    let mut g = c.benchmark_group("census");
    g.sample_size(10);
    for name in ["x2mt", "x3mt"] {
        let fam = family(name);
        let s0 = Rat::from_integer(0.into());
        for (label, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(label, name), &exec, |b, &exec| {
                b.iter(|| census(&fam, &s0, -100..=100, 97, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn bench_identify(c: &mut Criterion) {
    let mut g = c.benchmark_group("identify");
    g.sample_size(10);
    let fam = family("psl32");
    let s0 = Rat::from_integer(1.into());
    for (label, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(label, "psl32"), &exec, |b, &exec| {
            b.iter(|| identify(&fam, &s0, 300, 0, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_census, bench_identify);
criterion_main!(benches);
