use ganaug::cgan::CganConfig;
use ganaug::nn::{Mlp, Mode};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn batch(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| r.random_range(-1.0..1.0))
}

/// Largest relative mismatch between backprop and central differences of
/// `sum(output * weights)` in eval mode, over every parameter, and how many
/// parameters needed a smaller step.
fn worst_relative_error(net: &Mlp, x: &Array2<f64>, weights: &Array2<f64>) -> (f64, usize) {
    let objective = |n: &Mlp| (&n.predict(x).unwrap() * weights).sum();
    let (_, cache) = net.forward_eval(x).unwrap();
    let (grads, _) = net.backward(&cache, weights).unwrap();
    let mut probe = net.clone();
    let mut numeric = |pi: usize, j: usize, h: f64| {
        probe.update_params(|i, p| {
            if i == pi {
                p[j] += h
            }
        });
        let plus = objective(&probe);
        probe.update_params(|i, p| {
            if i == pi {
                p[j] -= 2.0 * h
            }
        });
        let minus = objective(&probe);
        probe.update_params(|i, p| {
            if i == pi {
                p[j] += h
            }
        });
        (plus - minus) / (2.0 * h)
    };
    let relative = |numeric: f64, analytic: f64| {
        let err = (numeric - analytic).abs();
        let scale = numeric.abs().max(analytic.abs());
        // gradients that are zero up to rounding only need to agree absolutely
        if scale < 1e-7 {
            if err < 1e-9 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            err / scale
        }
    };
    let (mut worst, mut rechecked) = (0.0f64, 0);
    for (pi, g) in grads.0.iter().enumerate() {
        for (j, &analytic) in g.iter().enumerate() {
            let mut rel = relative(numeric(pi, j, 1e-5), analytic);
            if rel > 1e-4 {
                // a leaky ReLU input within the step of zero bends the secant
                rechecked += 1;
                rel = relative(numeric(pi, j, 1e-7), analytic);
            }
            worst = worst.max(rel);
        }
    }
    (worst, rechecked)
}

/// Networks with running statistics moved away from their initial values.
fn warmed(mut net: Mlp, r: &mut ChaCha8Rng) -> Mlp {
    for _ in 0..3 {
        let x = batch(r, 16, net.input_width()).mapv(|v| 2.0 * v + 0.3);
        net.forward(&x, Mode::Train, r).unwrap();
    }
    net
}

#[test]
fn both_architectures_match_finite_differences() {
    let cfg = CganConfig::default();
    for seed in 0..4 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = warmed(cfg.build_generator(&mut r).unwrap(), &mut r);
        let d = warmed(cfg.build_discriminator(&mut r).unwrap(), &mut r);
        for net in [g, d] {
            let x = batch(&mut r, 3, net.input_width());
            let w = batch(&mut r, 3, net.output_width());
            let (worst, rechecked) = worst_relative_error(&net, &x, &w);
            assert!(worst <= 1e-4, "seed {seed}: {worst}");
            assert!(rechecked <= 2, "seed {seed}: {rechecked} parameters needed a smaller step");
        }
    }
}
