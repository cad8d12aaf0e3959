use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use mwgan_core::geometry::{self, random, GeometryTag};

fn bench_maps(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for tag in [GeometryTag::HsvProduct, GeometryTag::Sphere2, GeometryTag::Spd3] {
        let name = format!("{tag:?}").to_lowercase();
        let mut pairs = || {
            let y = random::random_point(tag, &mut rng);
            let x = random::random_point(tag, &mut rng);
            (y, x)
        };
        let (y0, x0) = pairs();
        let v0 = geometry::log(&y0, &x0).unwrap();

        c.bench_function(&format!("log/{name}"), |b| {
            b.iter_batched(
                &mut pairs,
                |(y, x)| black_box(geometry::log(&y, &x).unwrap()),
                BatchSize::SmallInput,
            )
        });
        c.bench_function(&format!("exp/{name}"), |b| {
            b.iter(|| black_box(geometry::exp(black_box(&y0), black_box(&v0)).unwrap()))
        });
        c.bench_function(&format!("distance/{name}"), |b| {
            b.iter(|| black_box(geometry::distance(black_box(&x0), black_box(&y0)).unwrap()))
        });
    }
}

criterion_group!(benches, bench_maps);
criterion_main!(benches);
