//! Small fully-connected networks with exact reverse-mode gradients.
//!
//! Layers are applied in sequence to row-major batches (`batch × width`).
//! Dropout is inverted (kept units are scaled by `1 / (1 − p)` at train time)
//! and batch normalization uses the biased batch variance.

mod adam;
mod io;
mod layers;
mod loss;

pub use adam::{adam_update, Adam, AdamConfig};
pub use layers::{Activation, Layer};
pub use loss::bce_loss;

use ndarray::{Array1, Array2, Axis};
use rand::RngCore;
use thiserror::Error;

use layers::LayerCache;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("layer {layer} ({kind}): expected width {expected}, got {got}")]
    ShapeMismatch { layer: usize, kind: &'static str, expected: usize, got: usize },
    #[error("cache is stale: produced by parameter version {cache}, network is at {network}")]
    StaleCache { cache: u64, network: u64 },
    #[error("gradient list does not match the network's parameters")]
    GradientShape,
    #[error("invalid layer configuration: {0}")]
    InvalidLayer(String),
    #[error("parameter file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("parameter file i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Dropout active, batch statistics used and folded into running stats.
    Train,
    /// No dropout, running statistics used; consumes no randomness.
    Eval,
}

/// Activations recorded by a forward pass.
#[derive(Clone, Debug)]
pub struct Cache {
    version: u64,
    entries: Vec<LayerCache>,
}

/// Gradients in parameter order: per dense layer weight then bias, per
/// batch-norm layer scale then shift, each flattened row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients(pub Vec<Vec<f64>>);

impl Gradients {
    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|&g| g == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    input_width: usize,
    layers: Vec<Layer>,
    /// Bumped on every parameter change so stale caches are detected.
    version: u64,
}

impl Mlp {
    pub fn new(input_width: usize, layers: Vec<Layer>) -> Result<Self, NnError> {
        let mut width = input_width;
        for (i, layer) in layers.iter().enumerate() {
            layer.check()?;
            width = layer.output_width(i, width)?;
        }
        Ok(Self { input_width, layers, version: 0 })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        let mut width = self.input_width;
        for (i, layer) in self.layers.iter().enumerate() {
            width = layer.output_width(i, width).expect("validated at construction");
        }
        width
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    /// Trainable parameters in gradient order.
    pub fn params(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    fn params_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers.iter_mut().flat_map(|l| l.params_mut()).collect()
    }

    /// Applies `f` to every trainable parameter slice and marks existing
    /// caches stale.
    pub fn update_params(&mut self, mut f: impl FnMut(usize, &mut [f64])) {
        for (i, p) in self.params_mut().into_iter().enumerate() {
            f(i, p);
        }
        self.version += 1;
    }

    pub fn forward(
        &mut self,
        x: &Array2<f64>,
        mode: Mode,
        rng: &mut dyn RngCore,
    ) -> Result<(Array2<f64>, Cache), NnError> {
        self.check_input(x)?;
        let mut out = x.clone();
        let mut entries = Vec::with_capacity(self.layers.len());
        for layer in self.layers.iter_mut() {
            let (next, cache) = layer.forward(out, mode, Some(&mut *rng));
            out = next;
            entries.push(cache);
        }
        Ok((out, Cache { version: self.version, entries }))
    }

    /// Eval-mode forward that keeps a cache for [`Mlp::backward`].
    pub fn forward_eval(&self, x: &Array2<f64>) -> Result<(Array2<f64>, Cache), NnError> {
        self.check_input(x)?;
        let mut out = x.clone();
        let mut entries = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let (next, cache) = layer.forward_eval(out);
            out = next;
            entries.push(cache);
        }
        Ok((out, Cache { version: self.version, entries }))
    }

    /// Eval-mode output without a cache. Safe to call concurrently.
    pub fn predict(&self, x: &Array2<f64>) -> Result<Array2<f64>, NnError> {
        Ok(self.forward_eval(x)?.0)
    }

    /// Gradients of the parameters and of the input, given the gradient of a
    /// scalar loss with respect to the output.
    pub fn backward(&self, cache: &Cache, grad_out: &Array2<f64>) -> Result<(Gradients, Array2<f64>), NnError> {
        if cache.version != self.version || cache.entries.len() != self.layers.len() {
            return Err(NnError::StaleCache { cache: cache.version, network: self.version });
        }
        let mut grad = grad_out.clone();
        let mut per_layer: Vec<Vec<Vec<f64>>> = Vec::with_capacity(self.layers.len());
        for (layer, entry) in self.layers.iter().zip(&cache.entries).rev() {
            let (g, params) = layer.backward(entry, grad);
            grad = g;
            per_layer.push(params);
        }
        per_layer.reverse();
        Ok((Gradients(per_layer.into_iter().flatten().collect()), grad))
    }

    fn check_input(&self, x: &Array2<f64>) -> Result<(), NnError> {
        if x.ncols() != self.input_width {
            return Err(NnError::ShapeMismatch {
                layer: 0,
                kind: self.layers.first().map_or("input", |l| l.kind()),
                expected: self.input_width,
                got: x.ncols(),
            });
        }
        Ok(())
    }
}

/// Column means of a batch.
pub(crate) fn column_mean(x: &Array2<f64>) -> Array1<f64> {
    x.mean_axis(Axis(0)).expect("non-empty batch")
}

#[cfg(test)]
mod tests;
