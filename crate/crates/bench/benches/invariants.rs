use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use torsio_core::complex::{invariant_closed, PlanOptions};
use torsio_core::geometry::random_placement;
use torsio_core::gluing::check_gluing;
use torsio_core::gluing::fixtures::ball_pair;
use torsio_core::grassmann::{generating_invariant, kernel_trace};
use torsio_core::triangulation::{builtin, ManifoldName};
use torsio_core::verify::random_kernel;

fn closed(c: &mut Criterion) {
  let mut g = c.benchmark_group("invariant_closed");
  for name in [ManifoldName::S3, ManifoldName::S2xS1] {
    let t = builtin(name);
    let p = random_placement(&t, 1).unwrap();
    g.bench_function(name.as_str(), |b| b.iter(|| invariant_closed(black_box(&t), black_box(&p)).unwrap()));
  }
  g.finish();
}

fn generating(c: &mut Criterion) {
  let mut g = c.benchmark_group("generating_invariant");
  g.sample_size(20);
  for name in [ManifoldName::B3, ManifoldName::S2xI, ManifoldName::SolidTorus] {
    let t = builtin(name);
    let p = random_placement(&t, 1).unwrap();
    let opts = PlanOptions::default();
    g.bench_function(name.as_str(), |b| b.iter(|| generating_invariant(black_box(&t), black_box(&p), &opts).unwrap()));
  }
  g.finish();
}

fn trace(c: &mut Criterion) {
  let mut g = c.benchmark_group("kernel_trace");
  let mut rng = ChaCha8Rng::seed_from_u64(3);
  for n in 1..=3 {
    let k = random_kernel(&mut rng, n).unwrap();
    g.bench_with_input(BenchmarkId::from_parameter(n), &k, |b, k| b.iter(|| kernel_trace(black_box(k), n).unwrap()));
  }
  g.finish();
}

fn gluing(c: &mut Criterion) {
  let f = ball_pair(1).unwrap();
  let mut g = c.benchmark_group("check_gluing");
  g.sample_size(20);
  g.bench_function("ball_pair", |b| b.iter(|| check_gluing(&f.m1, &f.p1, &f.m2, &f.p2, &f.map).unwrap()));
  g.finish();
}

criterion_group!(benches, closed, generating, trace, gluing);
criterion_main!(benches);
