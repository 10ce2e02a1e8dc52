use ndarray::{array, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_batch(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| r.random_range(-1.0..1.0))
}

#[test]
fn identity_network_passes_input_through() {
    let eye = Array2::eye(3);
    let mut net = Mlp::new(3, vec![Layer::Dense { weight: eye, bias: Array1::zeros(3) }]).unwrap();
    let x = array![[1.0, -2.0, 3.5], [0.0, 4.0, -1.0]];
    let (y, _) = net.forward(&x, Mode::Train, &mut rng(0)).unwrap();
    assert_eq!(y, x);
}

#[test]
fn leaky_relu_of_minus_one() {
    let net = Mlp::new(1, vec![Layer::Activation(Activation::LeakyRelu(0.2))]).unwrap();
    assert_eq!(net.predict(&array![[-1.0], [2.0]]).unwrap(), array![[-0.2], [2.0]]);
}

#[test]
fn shape_mismatch_names_the_layer() {
    let mut r = rng(1);
    let err = Mlp::new(4, vec![Layer::dense(4, 3, &mut r), Layer::dense(5, 2, &mut r)]).unwrap_err();
    assert!(matches!(err, NnError::ShapeMismatch { layer: 1, kind: "dense", expected: 5, got: 3 }));
    let net = Mlp::new(4, vec![Layer::dense(4, 3, &mut r)]).unwrap();
    assert!(matches!(net.predict(&Array2::zeros((2, 7))), Err(NnError::ShapeMismatch { got: 7, .. })));
}

#[test]
fn dropout_keeps_sixty_percent_scaled() {
    let mut net = Mlp::new(100, vec![Layer::Dropout { prob: 0.4 }]).unwrap();
    let x = Array2::ones((200, 100));
    let (y, _) = net.forward(&x, Mode::Train, &mut rng(2)).unwrap();
    let kept = y.iter().filter(|&&v| v != 0.0).count() as f64 / y.len() as f64;
    assert!((kept - 0.6).abs() < 0.05, "{kept}");
    assert!(y.iter().all(|&v| v == 0.0 || (v - 1.0 / 0.6).abs() < 1e-12));
    assert_eq!(net.predict(&x).unwrap(), x);
}

#[test]
fn bce_examples() {
    let t = array![[1.0], [0.0], [1.0]];
    assert!(bce_loss(&t, &t).0 < 1e-6);
    let (l, _) = bce_loss(&array![[0.5]], &array![[1.0]]);
    assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn bce_matches_direct_summation() {
    let mut r = rng(3);
    let p: Array2<f64> = Array2::from_shape_fn((64, 1), |_| r.random_range(0.01..0.99));
    let t: Array2<f64> = Array2::from_shape_fn((64, 1), |_| if r.random::<bool>() { 1.0 } else { 0.0 });
    let mut sum = 0.0;
    for i in 0..64 {
        let (pi, ti) = (p[[i, 0]], t[[i, 0]]);
        sum += if ti == 1.0 { -pi.ln() } else { -(1.0 - pi).ln() };
    }
    assert!((bce_loss(&p, &t).0 - sum / 64.0).abs() < 1e-12);
}

#[test]
fn bce_clamps_extremes() {
    let (l, g) = bce_loss(&array![[0.0], [1.0]], &array![[1.0], [0.0]]);
    assert!(l.is_finite() && g.iter().all(|v| v.is_finite()));
}

fn small_net(r: &mut ChaCha8Rng) -> Mlp {
    let mut layers = vec![
        Layer::dense(4, 5, r),
        Layer::batch_norm(5, 0.8, 1e-3),
        Layer::Activation(Activation::LeakyRelu(0.2)),
        Layer::Dropout { prob: 0.4 },
        Layer::dense(5, 3, r),
        Layer::Activation(Activation::Tanh),
        Layer::dense(3, 1, r),
        Layer::Activation(Activation::Sigmoid),
    ];
    if let Layer::BatchNorm { gamma, beta, running_mean, running_var, .. } = &mut layers[1] {
        gamma.mapv_inplace(|_| r.random_range(0.5..1.5));
        beta.mapv_inplace(|_| r.random_range(-0.5..0.5));
        running_mean.mapv_inplace(|_| r.random_range(-0.5..0.5));
        running_var.mapv_inplace(|_| r.random_range(0.5..2.0));
    }
    Mlp::new(4, layers).unwrap()
}

#[test]
fn zero_upstream_gives_zero_gradients() {
    let mut r = rng(4);
    let net = small_net(&mut r);
    let x = random_batch(&mut r, 6, 4);
    let (y, cache) = net.forward_eval(&x).unwrap();
    let (g, dx) = net.backward(&cache, &Array2::zeros(y.raw_dim())).unwrap();
    assert!(g.is_zero());
    assert!(dx.iter().all(|&v| v == 0.0));
}

#[test]
fn linear_weight_gradient_is_xt_g() {
    let mut r = rng(5);
    let net = Mlp::new(3, vec![Layer::dense(3, 2, &mut r)]).unwrap();
    let x = random_batch(&mut r, 8, 3);
    let up = random_batch(&mut r, 8, 2) / 8.0;
    let (_, cache) = net.forward_eval(&x).unwrap();
    let (g, _) = net.backward(&cache, &up).unwrap();
    let expected = x.t().dot(&up);
    for (a, b) in g.0[0].iter().zip(expected.iter()) {
        assert!((a - b).abs() < 1e-14);
    }
    let bias: Vec<f64> = (0..2).map(|j| up.column(j).sum()).collect();
    assert_eq!(g.0[1].len(), 2);
    for (a, b) in g.0[1].iter().zip(&bias) {
        assert!((a - b).abs() < 1e-14);
    }
}

/// Central differences of `sum(output * weights)` over every parameter.
fn finite_difference_check(net: &Mlp, x: &Array2<f64>, weights: &Array2<f64>, train_seed: Option<u64>) {
    let objective = |n: &Mlp| -> f64 {
        let y = match train_seed {
            None => n.predict(x).unwrap(),
            Some(s) => n.clone().forward(x, Mode::Train, &mut rng(s)).unwrap().0,
        };
        (&y * weights).sum()
    };
    let cache = match train_seed {
        None => net.forward_eval(x).unwrap().1,
        Some(s) => net.clone().forward(x, Mode::Train, &mut rng(s)).unwrap().1,
    };
    let (grads, _) = net.backward(&cache, weights).unwrap();
    let h = 1e-4;
    for (pi, g) in grads.0.iter().enumerate() {
        for j in 0..g.len() {
            let mut plus = net.clone();
            plus.update_params(|i, p| {
                if i == pi {
                    p[j] += h
                }
            });
            let mut minus = net.clone();
            minus.update_params(|i, p| {
                if i == pi {
                    p[j] -= h
                }
            });
            let numeric = (objective(&plus) - objective(&minus)) / (2.0 * h);
            let err = (numeric - g[j]).abs();
            let scale = numeric.abs().max(g[j].abs());
            assert!(err <= 1e-4 * scale || err < 1e-9, "param {pi}[{j}]: analytic {} numeric {numeric}", g[j]);
        }
    }
}

#[test]
fn gradients_match_finite_differences_in_eval_mode() {
    for seed in 0..3 {
        let mut r = rng(10 + seed);
        let net = small_net(&mut r);
        let x = random_batch(&mut r, 7, 4);
        let w = random_batch(&mut r, 7, 1);
        finite_difference_check(&net, &x, &w, None);
    }
}

#[test]
fn gradients_match_finite_differences_in_train_mode() {
    // fixed dropout masks (same seed) and batch statistics are both differentiable
    let mut r = rng(20);
    let net = small_net(&mut r);
    let x = random_batch(&mut r, 9, 4);
    let w = random_batch(&mut r, 9, 1);
    finite_difference_check(&net, &x, &w, Some(99));
}

#[test]
fn batchnorm_train_output_is_standardized() {
    let mut net = Mlp::new(3, vec![Layer::batch_norm(3, 0.8, 1e-3)]).unwrap();
    let mut r = rng(6);
    let x = random_batch(&mut r, 50, 3) * 4.0 + 2.0;
    let (y, _) = net.forward(&x, Mode::Train, &mut r).unwrap();
    for col in y.columns() {
        let mean = col.mean().unwrap();
        let var = col.mapv(|v| (v - mean).powi(2)).mean().unwrap();
        assert!(mean.abs() < 1e-6);
        assert!((var - 1.0).abs() < 1e-3, "{var}");
    }
    if let Layer::BatchNorm { running_mean, .. } = &net.layers()[0] {
        let batch_mean = column_mean(&x);
        for (rm, bm) in running_mean.iter().zip(batch_mean.iter()) {
            assert!((rm - 0.2 * bm).abs() < 1e-12);
        }
    }
}

#[test]
fn eval_forward_consumes_no_randomness() {
    let mut r = rng(7);
    let mut net = small_net(&mut r);
    let x = random_batch(&mut r, 5, 4);
    let mut a = rng(42);
    let before = a.clone();
    let (y1, _) = net.forward(&x, Mode::Eval, &mut a).unwrap();
    assert_eq!(a, before);
    assert_eq!(y1, net.predict(&x).unwrap());
}

#[test]
fn stale_cache_is_rejected() {
    let mut r = rng(8);
    let mut net = small_net(&mut r);
    let x = random_batch(&mut r, 5, 4);
    let (y, cache) = net.forward_eval(&x).unwrap();
    let mut adam = Adam::new(AdamConfig::default(), &net);
    let (g, _) = net.backward(&cache, &Array2::ones(y.raw_dim())).unwrap();
    adam.step(&mut net, &g).unwrap();
    assert!(matches!(net.backward(&cache, &Array2::ones(y.raw_dim())), Err(NnError::StaleCache { .. })));
}

#[test]
fn adam_examples() {
    let cfg = AdamConfig::default();
    let mut p = vec![1.0, -2.0];
    let (mut m, mut v) = (vec![0.0; 2], vec![0.0; 2]);
    adam_update(&cfg, 1, &mut p, &[0.0, 0.0], &mut m, &mut v);
    assert_eq!(p, vec![1.0, -2.0]);

    for g in [3.0, -0.01] {
        let mut p = [0.5];
        let (mut m, mut v) = ([0.0], [0.0]);
        adam_update(&cfg, 1, &mut p, &[g], &mut m, &mut v);
        assert!((p[0] - 0.5 + 2e-4 * g.signum()).abs() < 1e-9);
    }
}

#[test]
fn adam_is_odd_in_the_gradient() {
    let cfg = AdamConfig::default();
    let g = [0.3, -1.7, 2e-3];
    let (mut a, mut b) = ([0.0; 3], [0.0; 3]);
    let (mut ma, mut va, mut mb, mut vb) = ([0.0; 3], [0.0; 3], [0.0; 3], [0.0; 3]);
    adam_update(&cfg, 1, &mut a, &g, &mut ma, &mut va);
    adam_update(&cfg, 1, &mut b, &g.map(|x: f64| -x), &mut mb, &mut vb);
    for k in 0..3 {
        assert_eq!(a[k], -b[k]);
    }
}

#[test]
fn text_round_trip_is_exact() {
    let mut r = rng(9);
    let mut net = small_net(&mut r);
    net.forward(&random_batch(&mut r, 8, 4), Mode::Train, &mut r).unwrap();
    let back = Mlp::from_text(&net.to_text()).unwrap();
    assert_eq!(back.layers(), net.layers());
    assert!(matches!(Mlp::from_text("mlp-params v9\n"), Err(NnError::Parse { line: 1, .. })));
}
