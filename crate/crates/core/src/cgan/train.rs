use ndarray::{concatenate, s, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{CganConfig, CganError, LABEL_COUNT};
use crate::district::FIELD_COUNT;
use crate::nn::{bce_loss, Adam, Mlp, Mode};

/// Normalized training rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingData {
    /// `rows × 10`.
    pub features: Array2<f64>,
    /// `rows × 3`.
    pub labels: Array2<f64>,
}

impl TrainingData {
    pub fn rows(&self) -> usize {
        self.features.nrows()
    }
}

/// Losses and accuracies of one training iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    /// Mean of the real-batch and generated-batch losses.
    pub d_loss: f64,
    pub d_loss_real: f64,
    pub d_loss_fake: f64,
    pub g_loss: f64,
    /// Fraction of real rows scored above 0.5.
    pub acc_real: f64,
    /// Fraction of generated rows scored below 0.5.
    pub acc_fake: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSnapshot {
    pub stats: IterationStats,
    pub generator: Mlp,
    pub discriminator: Mlp,
}

/// Forward/backward passes performed, by network and purpose.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PassCounts {
    pub discriminator_real: usize,
    pub discriminator_fake: usize,
    pub generator: usize,
}

#[derive(Clone, Debug)]
pub struct TrainingRun {
    pub generator: Mlp,
    pub discriminator: Mlp,
    pub history: Vec<IterationStats>,
    pub snapshots: Vec<TrainingSnapshot>,
    pub passes: PassCounts,
}

fn accuracy(scores: &Array2<f64>, real: bool) -> f64 {
    let hits = scores.iter().filter(|&&p| if real { p > 0.5 } else { p < 0.5 }).count();
    hits as f64 / scores.len() as f64
}

fn gather(m: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    m.select(Axis(0), rows)
}

fn join(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    concatenate(Axis(1), &[a.view(), b.view()]).expect("equal row counts")
}

/// Adversarial training for `iterations` steps.
///
/// Each iteration samples a batch of rows with replacement and then:
///
/// 1. generates a batch from those rows' labels with the generator in eval
///    mode;
/// 2. updates the discriminator on the real batch (target 1), then on the
///    generated batch (target 0);
/// 3. updates the generator through the discriminator with target 1, on
///    labels drawn from random training rows.
///
/// Snapshots are taken every `snapshot_interval` iterations and after the
/// last one. All randomness comes from `rng`.
pub fn train(
    cfg: &CganConfig,
    data: &TrainingData,
    iterations: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TrainingRun, CganError> {
    cfg.validate()?;
    let n = data.rows();
    let batch = cfg.batch_size;
    if n < batch {
        return Err(CganError::NotEnoughRows { rows: n, batch });
    }
    let mut generator = cfg.build_generator(rng)?;
    let mut discriminator = cfg.build_discriminator(rng)?;
    let mut g_opt = Adam::new(cfg.adam, &generator);
    let mut d_opt = Adam::new(cfg.adam, &discriminator);
    let ones = Array2::<f64>::ones((batch, 1));
    let zeros = Array2::<f64>::zeros((batch, 1));

    let mut history = Vec::with_capacity(iterations);
    let mut snapshots = Vec::new();
    let mut passes = PassCounts::default();

    for iteration in 1..=iterations {
        let rows: Vec<usize> = (0..batch).map(|_| rng.random_range(0..n)).collect();
        let real = gather(&data.features, &rows);
        let labels = gather(&data.labels, &rows);
        let noise = Array2::from_shape_fn((batch, cfg.latent_dim), |_| rng.sample::<f64, _>(StandardNormal));

        let fake = generator.predict(&join(&noise, &labels))?;

        let (scores, cache) = discriminator.forward(&join(&real, &labels), Mode::Train, rng)?;
        let (d_loss_real, grad) = bce_loss(&scores, &ones);
        let acc_real = accuracy(&scores, true);
        let (g, _) = discriminator.backward(&cache, &grad)?;
        d_opt.step(&mut discriminator, &g)?;
        passes.discriminator_real += 1;

        let (scores, cache) = discriminator.forward(&join(&fake, &labels), Mode::Train, rng)?;
        let (d_loss_fake, grad) = bce_loss(&scores, &zeros);
        let acc_fake = accuracy(&scores, false);
        let (g, _) = discriminator.backward(&cache, &grad)?;
        d_opt.step(&mut discriminator, &g)?;
        passes.discriminator_fake += 1;

        let sampled: Vec<usize> = (0..batch).map(|_| rng.random_range(0..n)).collect();
        let sampled_labels = gather(&data.labels, &sampled);
        let (generated, g_cache) = generator.forward(&join(&noise, &sampled_labels), Mode::Train, rng)?;
        let (scores, d_cache) = discriminator.forward(&join(&generated, &sampled_labels), Mode::Train, rng)?;
        let (g_loss, grad) = bce_loss(&scores, &ones);
        let (_, d_input_grad) = discriminator.backward(&d_cache, &grad)?;
        let feature_grad = d_input_grad.slice(s![.., ..FIELD_COUNT]).to_owned();
        let (g, _) = generator.backward(&g_cache, &feature_grad)?;
        g_opt.step(&mut generator, &g)?;
        passes.generator += 1;

        let d_loss = 0.5 * (d_loss_real + d_loss_fake);
        if !(d_loss.is_finite() && g_loss.is_finite()) {
            return Err(CganError::NonFinite { iteration, d_loss, g_loss });
        }
        let stats = IterationStats { iteration, d_loss, d_loss_real, d_loss_fake, g_loss, acc_real, acc_fake };
        history.push(stats);
        if iteration % cfg.snapshot_interval == 0 || iteration == iterations {
            snapshots.push(TrainingSnapshot {
                stats,
                generator: generator.clone(),
                discriminator: discriminator.clone(),
            });
        }
        if iteration % 100 == 0 {
            log::debug!("iteration {iteration}: d_loss {d_loss:.4} g_loss {g_loss:.4} acc {acc_real:.2}/{acc_fake:.2}");
        }
    }
    debug_assert_eq!(LABEL_COUNT, data.labels.ncols());
    Ok(TrainingRun { generator, discriminator, history, snapshots, passes })
}

/// Iterations for a run of `epochs` passes over `rows` rows.
pub fn epochs_to_iterations(rows: usize, batch_size: usize, epochs: usize) -> usize {
    rows.div_ceil(batch_size) * epochs
}

/// Seeded generator for one training run.
pub fn run_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_data(rows: usize, seed: u64) -> TrainingData {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TrainingData {
            features: Array2::from_shape_fn((rows, FIELD_COUNT), |_| rng.random_range(-1.0..1.0)),
            labels: Array2::from_shape_fn((rows, LABEL_COUNT), |_| rng.random_range(-1.0..1.0)),
        }
    }

    #[test]
    fn zero_iterations_returns_untrained_networks() {
        let cfg = CganConfig::default();
        let run = train(&cfg, &toy_data(64, 1), 0, &mut run_rng(3, 0)).unwrap();
        assert!(run.snapshots.is_empty() && run.history.is_empty());
        let mut again = run_rng(3, 0);
        assert_eq!(run.generator, cfg.build_generator(&mut again).unwrap());
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let err = train(&CganConfig::default(), &toy_data(10, 1), 5, &mut run_rng(0, 0)).unwrap_err();
        assert!(matches!(err, CganError::NotEnoughRows { rows: 10, batch: 64 }));
    }

    #[test]
    fn pass_accounting_and_snapshot_schedule() {
        let cfg = CganConfig { snapshot_interval: 4, ..CganConfig::default() };
        let run = train(&cfg, &toy_data(80, 2), 10, &mut run_rng(5, 1)).unwrap();
        assert_eq!(run.passes, PassCounts { discriminator_real: 10, discriminator_fake: 10, generator: 10 });
        let at: Vec<usize> = run.snapshots.iter().map(|s| s.stats.iteration).collect();
        assert_eq!(at, vec![4, 8, 10]);
        assert_eq!(run.history.len(), 10);
        for h in &run.history {
            assert!((0.0..=1.0).contains(&h.acc_real) && (0.0..=1.0).contains(&h.acc_fake));
        }
    }

    #[test]
    fn training_is_reproducible() {
        let cfg = CganConfig::default();
        let data = toy_data(70, 3);
        let a = train(&cfg, &data, 6, &mut run_rng(8, 2)).unwrap();
        let b = train(&cfg, &data, 6, &mut run_rng(8, 2)).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.generator, b.generator);
    }

    #[test]
    fn epoch_conversion() {
        assert_eq!(epochs_to_iterations(7989, 64, 155), 125 * 155);
        assert_eq!(epochs_to_iterations(64, 64, 10), 10);
    }
}
