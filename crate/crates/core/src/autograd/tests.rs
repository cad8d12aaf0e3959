use super::*;
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_tensor(shape: Vec<usize>, r: &mut ChaCha8Rng) -> Tensor {
    let len = shape.iter().product();
    Tensor::new(shape, (0..len).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

#[test]
fn matmul_identity() {
    let tape = Tape::new();
    let a = tape.leaf(Tensor::matrix(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap());
    let id = tape.constant(Tensor::matrix(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap());
    let out = a.matmul(&id).unwrap();
    assert_eq!(out.value().data, vec![1.0, 2.0, 3.0, 4.0]);
}

#[test]
fn l2_norm_of_scaled_one_hot() {
    let tape = Tape::new();
    let x = tape.leaf(Tensor::matrix(1, 4, vec![0.0, 3.0, 0.0, 0.0]).unwrap());
    let n = x.l2_norm_rows().unwrap();
    assert!((n.value().data[0] - 3.0).abs() < 1e-9);
}

#[test]
fn simple_derivatives() {
    // d/dx x^2 at 3 -> 6
    let tape = Tape::new();
    let x = tape.leaf(Tensor::scalar(3.0));
    let y = x.square().sum_all();
    let g = grad(&y, &[x], false).unwrap();
    assert!((g[0].value().data[0] - 6.0).abs() < 1e-12);
}

#[test]
fn second_derivative_of_cube() {
    // d^2/dx^2 x^3 at 2 -> 12 via grad-of-grad
    let tape = Tape::new();
    let x = tape.leaf(Tensor::scalar(2.0));
    let y = x.square().mul(&x).unwrap().sum_all();
    let g = grad(&y, &[x.clone()], true).unwrap();
    let gg = grad(&g[0].sum_all(), &[x], true).unwrap();
    assert!((gg[0].value().data[0] - 12.0).abs() < 1e-10);
}

#[test]
fn hessian_vector_product_of_quadratic() {
    // f(x) = sum(x^2): grad = 2x, grad of (grad . v) = 2v exactly
    let mut r = rng(3);
    let tape = Tape::new();
    let x0 = rand_tensor(vec![1, 5], &mut r);
    let v0 = rand_tensor(vec![1, 5], &mut r);
    let x = tape.leaf(x0);
    let v = tape.constant(v0.clone());
    let f = x.square().sum_all();
    let g = grad(&f, &[x.clone()], true).unwrap();
    let gv = g[0].mul(&v).unwrap().sum_all();
    let hv = grad(&gv, &[x], true).unwrap();
    for (h, ve) in hv[0].value().data.iter().zip(&v0.data) {
        assert!((h - 2.0 * ve).abs() < 1e-10);
    }
}

#[test]
fn linearity_of_grad() {
    let mut r = rng(5);
    let x0 = rand_tensor(vec![2, 3], &mut r);
    let (a, b) = (1.7, -0.4);
    let run = |which: u8| -> Vec<f64> {
        let tape = Tape::new();
        let x = tape.leaf(x0.clone());
        let f = x.tanh().sum_all();
        let g = x.square().sum_all();
        let out = match which {
            0 => f.scalar_mul(a).add(&g.scalar_mul(b)).unwrap(),
            1 => f,
            _ => g,
        };
        grad(&out, &[x], false).unwrap()[0].value().data
    };
    let combined = run(0);
    let gf = run(1);
    let gg = run(2);
    for i in 0..combined.len() {
        assert!((combined[i] - (a * gf[i] + b * gg[i])).abs() < 1e-12);
    }
}

#[test]
fn unreached_input_gets_zero_gradient() {
    let tape = Tape::new();
    let x = tape.leaf(Tensor::scalar(1.0));
    let unused = tape.leaf(Tensor::matrix(2, 2, vec![1.0; 4]).unwrap());
    let y = x.square().sum_all();
    let g = grad(&y, &[unused], false).unwrap();
    assert_eq!(g[0].value().data, vec![0.0; 4]);
}

#[test]
fn determinism_bit_identical() {
    let mut r = rng(7);
    let x0 = rand_tensor(vec![3, 3], &mut r);
    let w0 = rand_tensor(vec![3, 2], &mut r);
    let run = || -> Vec<f64> {
        let tape = Tape::new();
        let x = tape.leaf(x0.clone());
        let w = tape.leaf(w0.clone());
        let out = x.matmul(&w).unwrap().tanh().square().sum_all();
        let g = grad(&out, &[w], false).unwrap();
        g[0].value().data
    };
    assert_eq!(run(), run());
}

#[test]
fn every_primitive_passes_finite_differences() {
    let mut r = rng(11);
    type Case = (&'static str, Vec<Vec<usize>>, fn(&Tape, &[Value]) -> Result<Value>);
    let cases: Vec<Case> = vec![
        ("matmul", vec![vec![3, 4], vec![4, 2]], |_t, v| {
            Ok(v[0].matmul(&v[1])?.square().sum_all())
        }),
        ("add", vec![vec![2, 3], vec![2, 3]], |_t, v| {
            Ok(v[0].add(&v[1])?.square().sum_all())
        }),
        ("bias_add", vec![vec![3, 4], vec![4]], |_t, v| {
            Ok(v[0].bias_add(&v[1])?.square().sum_all())
        }),
        ("sub", vec![vec![2, 3], vec![2, 3]], |_t, v| {
            Ok(v[0].sub(&v[1])?.square().sum_all())
        }),
        ("scalar_mul", vec![vec![2, 2]], |_t, v| {
            Ok(v[0].scalar_mul(2.5).square().sum_all())
        }),
        ("mul", vec![vec![2, 3], vec![2, 3]], |_t, v| {
            Ok(v[0].mul(&v[1])?.sum_all())
        }),
        ("leaky_relu", vec![vec![3, 3]], |_t, v| {
            Ok(v[0].leaky_relu(0.2).square().sum_all())
        }),
        ("tanh", vec![vec![2, 3]], |_t, v| Ok(v[0].tanh().square().sum_all())),
        ("square", vec![vec![2, 3]], |_t, v| Ok(v[0].square().sum_all())),
        ("sqrt", vec![vec![2, 2]], |_t, v| {
            // keep arguments positive
            Ok(v[0].square().add_scalar(0.5).sqrt().sum_all())
        }),
        ("sum_mean", vec![vec![3, 2]], |_t, v| {
            Ok(v[0].mean_all().add(&v[0].sum_all())?.sum_all())
        }),
        ("sum_axis0", vec![vec![3, 2]], |_t, v| {
            Ok(v[0].sum_axis0()?.square().sum_all())
        }),
        ("sum_axis1", vec![vec![3, 2]], |_t, v| {
            Ok(v[0].sum_axis1()?.square().sum_all())
        }),
        ("l2_norm_rows", vec![vec![3, 4]], |_t, v| {
            Ok(v[0].l2_norm_rows()?.sum_all())
        }),
        ("concat_slice", vec![vec![2, 3], vec![2, 3]], |_t, v| {
            let c = v[0].concat_rows(&v[1])?;
            Ok(c.slice_rows(1, 2)?.square().sum_all())
        }),
        ("transpose", vec![vec![2, 4]], |_t, v| {
            Ok(v[0].transpose()?.square().sum_all())
        }),
    ];
    for (name, shapes, f) in cases {
        let inputs: Vec<Tensor> = shapes.iter().map(|s| rand_tensor(s.clone(), &mut r)).collect();
        let report = gradient_check(f, &inputs, 1e-5, 1e-6).unwrap();
        assert!(
            report.pass,
            "{name}: rel err {} abs err {}",
            report.max_rel_error, report.max_abs_error
        );
    }
}

#[test]
fn gradient_check_linear_is_machine_precision() {
    let mut r = rng(13);
    let x = rand_tensor(vec![2, 3], &mut r);
    let report = gradient_check(|_t, v| Ok(v[0].scalar_mul(3.0).sum_all()), &[x], 1e-5, 1e-9).unwrap();
    assert!(report.pass);
    assert!(report.max_abs_error < 1e-9);
}

#[test]
fn gradient_check_two_layer_mlp() {
    let mut r = rng(17);
    let x = rand_tensor(vec![4, 3], &mut r);
    let w1 = rand_tensor(vec![3, 8], &mut r);
    let b1 = rand_tensor(vec![8], &mut r);
    let w2 = rand_tensor(vec![8, 1], &mut r);
    let report = gradient_check(
        |_t, v| {
            let h = v[0].matmul(&v[1])?.bias_add(&v[2])?.leaky_relu(0.2);
            Ok(h.matmul(&v[3])?.mean_all())
        },
        &[x, w1, b1, w2],
        1e-5,
        1e-5,
    )
    .unwrap();
    assert!(report.pass, "rel err {}", report.max_rel_error);
}

#[test]
fn broken_backward_rule_is_caught() {
    // negative control: a "gradient" computed with the wrong sign must fail
    let mut r = rng(19);
    let x0 = rand_tensor(vec![2, 2], &mut r);
    let tape = Tape::new();
    let x = tape.leaf(x0.clone());
    let out = x.square().sum_all();
    let g = grad(&out, &[x], false).unwrap();
    let wrong: Vec<f64> = g[0].value().data.iter().map(|v| -v).collect();
    // finite differences of the same function
    let step = 1e-5;
    for idx in 0..x0.len() {
        let eval = |delta: f64| {
            let t = Tape::new();
            let mut perturbed = x0.clone();
            perturbed.data[idx] += delta;
            t.leaf(perturbed).square().sum_all().scalar_value()
        };
        let fd = (eval(step) - eval(-step)) / (2.0 * step);
        let rel = (wrong[idx] - fd).abs() / fd.abs().max(1.0);
        assert!(rel > 1e-3, "sign flip should be detected");
    }
}

#[test]
fn shape_mismatch_reports_both_shapes() {
    let tape = Tape::new();
    let a = tape.leaf(Tensor::matrix(2, 3, vec![0.0; 6]).unwrap());
    let b = tape.leaf(Tensor::matrix(2, 2, vec![0.0; 4]).unwrap());
    match a.matmul(&b) {
        Err(crate::Error::ShapeMismatch { left, right, .. }) => {
            assert_eq!(left, vec![2, 3]);
            assert_eq!(right, vec![2, 2]);
        }
        other => panic!("expected shape mismatch, got {other:?}"),
    }
}
