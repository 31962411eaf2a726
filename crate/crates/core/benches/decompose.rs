use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gentleflow::flows::{decompose_bundle, decompose_bundle_seq, indicator};
use gentleflow::trails::{enumerate_routes, self_compatible};
use gentleflow::{fixtures, Flow, FringedQuiver};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Sum of `k / (i + 2)` times the i-th self-compatible route, for a dense flow.
fn dense_flow(q: &FringedQuiver, bound: usize) -> Flow {
    let routes: Vec<_> = enumerate_routes(q, bound).into_iter().filter(|t| self_compatible(q, t)).collect();
    let mut f = Flow::zero(q);
    for (i, t) in routes.iter().enumerate() {
        let c = BigRational::new(BigInt::from(i as i64 % 5 + 1), BigInt::from(i as i64 + 2));
        f = f.add_scaled(&indicator(q, t), &c);
    }
    f
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose_bundle");
    for (name, q, bound) in [
        ("shard", fixtures::shard(), 12),
        ("double-kronecker", fixtures::double_kronecker(), 12),
        ("triple-kronecker", fixtures::triple_kronecker(), 10),
    ] {
        let f = dense_flow(&q, bound);
        g.bench_with_input(BenchmarkId::new("par", name), &f, |b, f| b.iter(|| decompose_bundle(&q, f).unwrap()));
        g.bench_with_input(BenchmarkId::new("seq", name), &f, |b, f| b.iter(|| decompose_bundle_seq(&q, f).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
