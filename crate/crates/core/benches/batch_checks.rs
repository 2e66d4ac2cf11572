use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vertframe::geobundle::BundleChart;
use vertframe::par::Exec;
use vertframe::suite::{run_check, SuiteParams};

fn batch(c: &mut Criterion) {
    let mut g = c.benchmark_group("batch_checks");
    g.sample_size(10);
    for check in ["lvy-closure", "pullback"] {
        for (label, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
            let mut p = SuiteParams::new(BundleChart::new(2, 2).unwrap(), 20_240_601);
            p.samples = Some(16);
            p.exec = exec;
            g.bench_with_input(BenchmarkId::new(check, label), &p, |b, p| b.iter(|| assert!(run_check(p, check).passed)));
        }
    }
    g.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
