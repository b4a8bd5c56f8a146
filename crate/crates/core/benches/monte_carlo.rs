use chaos_core::exec::Execution;
use chaos_core::fmt::{estimate, gen_block_kernel};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const SAMPLES: usize = 20_000;

fn block_estimates(c: &mut Criterion) {
    let mut group = c.benchmark_group("block_estimate");
    group.sample_size(10);
    group.throughput(Throughput::Elements(SAMPLES as u64));
    for k in [4u64, 64] {
        let var = gen_block_kernel(1, 2, k).expect("valid block kernel");
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, k), &var, |b, var| {
                b.iter(|| estimate(var, SAMPLES, 1, exec).expect("estimate runs"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, block_estimates);
criterion_main!(benches);
