use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use mwgan_core::autograd::{grad, Tape, Tensor};
use mwgan_core::gan::{critic_loss, sample_latent, sample_ts, Mlp};

fn bench_autograd(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let critic = Mlp::init(&[3, 128, 128, 1], 0.2, &mut rng).unwrap();

    for batch in [16usize, 64] {
        let x = sample_latent(&mut rng, batch, 3);
        let real = sample_latent(&mut rng, batch, 3);
        let fake = sample_latent(&mut rng, batch, 3);
        let ts = sample_ts(&mut rng, batch);

        c.bench_function(&format!("mlp_forward/b{batch}"), |b| {
            b.iter(|| black_box(critic.forward_tensor(black_box(&x)).unwrap()))
        });

        c.bench_function(&format!("forward_backward/b{batch}"), |b| {
            b.iter(|| {
                let tape = Tape::new();
                let params = critic.params_as_leaves(&tape);
                let xv = tape.constant(x.clone());
                let out = critic.forward(&xv, &params).unwrap();
                let loss = out.mean_all();
                let grads: Vec<Tensor> = grad(&loss, &params, false)
                    .unwrap()
                    .iter()
                    .map(|g| g.value())
                    .collect();
                black_box(grads)
            })
        });

        c.bench_function(&format!("critic_loss_double_backprop/b{batch}"), |b| {
            b.iter(|| {
                let tape = Tape::new();
                let params = critic.params_as_leaves(&tape);
                let parts =
                    critic_loss(&tape, &critic, &params, &real, &fake, &ts, 10.0).unwrap();
                let grads: Vec<Tensor> = grad(&parts.total, &params, false)
                    .unwrap()
                    .iter()
                    .map(|g| g.value())
                    .collect();
                black_box(grads)
            })
        });
    }
}

criterion_group!(benches, bench_autograd);
criterion_main!(benches);
