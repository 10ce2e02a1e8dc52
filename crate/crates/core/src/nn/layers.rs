use ndarray::{Array1, Array2, Axis};
use rand::{Rng, RngCore};

use super::{column_mean, Mode, NnError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Activation {
    LeakyRelu(f64),
    Tanh,
    Sigmoid,
    Identity,
}

impl Activation {
    fn apply(self, v: f64) -> f64 {
        match self {
            Activation::LeakyRelu(a) => {
                if v > 0.0 {
                    v
                } else {
                    a * v
                }
            }
            Activation::Tanh => v.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-v).exp()),
            Activation::Identity => v,
        }
    }

    /// Derivative given the pre-activation `x` and the output `y`.
    fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::LeakyRelu(a) => {
                if x > 0.0 {
                    1.0
                } else {
                    a
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Layer {
    Dense {
        /// `inputs × outputs`.
        weight: Array2<f64>,
        bias: Array1<f64>,
    },
    BatchNorm {
        gamma: Array1<f64>,
        beta: Array1<f64>,
        running_mean: Array1<f64>,
        running_var: Array1<f64>,
        momentum: f64,
        eps: f64,
    },
    Activation(Activation),
    Dropout {
        prob: f64,
    },
}

#[derive(Clone, Debug)]
pub(crate) enum LayerCache {
    Dense { input: Array2<f64> },
    BatchNorm { x_hat: Array2<f64>, inv_std: Array1<f64>, batch_stats: bool },
    Activation { input: Array2<f64>, output: Array2<f64> },
    Dropout { mask: Option<Array2<f64>> },
}

impl Layer {
    /// Dense layer with Glorot-uniform weights and zero bias.
    pub fn dense<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let weight = Array2::from_shape_fn((inputs, outputs), |_| rng.random_range(-limit..limit));
        Layer::Dense { weight, bias: Array1::zeros(outputs) }
    }

    pub fn batch_norm(width: usize, momentum: f64, eps: f64) -> Self {
        Layer::BatchNorm {
            gamma: Array1::ones(width),
            beta: Array1::zeros(width),
            running_mean: Array1::zeros(width),
            running_var: Array1::ones(width),
            momentum,
            eps,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Layer::Dense { .. } => "dense",
            Layer::BatchNorm { .. } => "batchnorm",
            Layer::Activation(_) => "activation",
            Layer::Dropout { .. } => "dropout",
        }
    }

    pub(crate) fn check(&self) -> Result<(), NnError> {
        let bad = |m: String| Err(NnError::InvalidLayer(m));
        match self {
            Layer::Dense { weight, bias } if weight.ncols() != bias.len() => {
                bad(format!("dense bias length {} vs {} outputs", bias.len(), weight.ncols()))
            }
            Layer::BatchNorm { gamma, beta, running_mean, running_var, momentum, eps } => {
                let w = gamma.len();
                if beta.len() != w || running_mean.len() != w || running_var.len() != w {
                    return bad("batchnorm vectors differ in length".into());
                }
                if !(0.0 < *momentum && *momentum < 1.0) || *eps <= 0.0 {
                    return bad(format!("batchnorm momentum {momentum} / eps {eps}"));
                }
                if running_var.iter().any(|&v| v <= 0.0) {
                    return bad("batchnorm running variance must be positive".into());
                }
                Ok(())
            }
            Layer::Activation(Activation::LeakyRelu(a)) if !(0.0 < *a && *a < 1.0) => {
                bad(format!("leaky relu alpha {a}"))
            }
            Layer::Dropout { prob } if !(0.0..1.0).contains(prob) => bad(format!("dropout probability {prob}")),
            _ => Ok(()),
        }
    }

    pub(crate) fn output_width(&self, index: usize, input: usize) -> Result<usize, NnError> {
        let expected = match self {
            Layer::Dense { weight, .. } => weight.nrows(),
            Layer::BatchNorm { gamma, .. } => gamma.len(),
            _ => input,
        };
        if expected != input {
            return Err(NnError::ShapeMismatch { layer: index, kind: self.kind(), expected, got: input });
        }
        Ok(match self {
            Layer::Dense { weight, .. } => weight.ncols(),
            _ => input,
        })
    }

    pub(crate) fn params(&self) -> Vec<&[f64]> {
        match self {
            Layer::Dense { weight, bias } => vec![slice(weight), slice1(bias)],
            Layer::BatchNorm { gamma, beta, .. } => vec![slice1(gamma), slice1(beta)],
            _ => Vec::new(),
        }
    }

    pub(crate) fn params_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            Layer::Dense { weight, bias } => {
                vec![weight.as_slice_mut().expect("standard layout"), bias.as_slice_mut().expect("standard layout")]
            }
            Layer::BatchNorm { gamma, beta, .. } => {
                vec![gamma.as_slice_mut().expect("standard layout"), beta.as_slice_mut().expect("standard layout")]
            }
            _ => Vec::new(),
        }
    }

    pub(crate) fn forward(
        &mut self,
        x: Array2<f64>,
        mode: Mode,
        rng: Option<&mut dyn RngCore>,
    ) -> (Array2<f64>, LayerCache) {
        if mode == Mode::Eval {
            return self.forward_eval(x);
        }
        match self {
            Layer::BatchNorm { gamma, beta, running_mean, running_var, momentum, eps } => {
                let mean = column_mean(&x);
                let centered = &x - &mean;
                let var = column_mean(&centered.mapv(|v| v * v));
                let inv_std = var.mapv(|v| 1.0 / (v + *eps).sqrt());
                let x_hat = &centered * &inv_std;
                let out = &x_hat * &*gamma + &*beta;
                let m = *momentum;
                running_mean.zip_mut_with(&mean, |r, &b| *r = m * *r + (1.0 - m) * b);
                running_var.zip_mut_with(&var, |r, &b| *r = m * *r + (1.0 - m) * b);
                (out, LayerCache::BatchNorm { x_hat, inv_std, batch_stats: true })
            }
            Layer::Dropout { prob } if *prob > 0.0 => {
                let rng = rng.expect("train mode needs randomness");
                let keep = 1.0 - *prob;
                let p = *prob;
                let mask =
                    Array2::from_shape_fn(x.raw_dim(), |_| if rng.random::<f64>() >= p { 1.0 / keep } else { 0.0 });
                (&x * &mask, LayerCache::Dropout { mask: Some(mask) })
            }
            _ => self.forward_eval(x),
        }
    }

    pub(crate) fn forward_eval(&self, x: Array2<f64>) -> (Array2<f64>, LayerCache) {
        match self {
            Layer::Dense { weight, bias } => {
                let out = x.dot(weight) + bias;
                (out, LayerCache::Dense { input: x })
            }
            Layer::BatchNorm { gamma, beta, running_mean, running_var, eps, .. } => {
                let inv_std = running_var.mapv(|v| 1.0 / (v + eps).sqrt());
                let x_hat = (&x - running_mean) * &inv_std;
                let out = &x_hat * gamma + beta;
                (out, LayerCache::BatchNorm { x_hat, inv_std, batch_stats: false })
            }
            Layer::Activation(a) => {
                let a = *a;
                let out = x.mapv(|v| a.apply(v));
                (out.clone(), LayerCache::Activation { input: x, output: out })
            }
            Layer::Dropout { .. } => (x, LayerCache::Dropout { mask: None }),
        }
    }

    /// Returns the input gradient and this layer's parameter gradients.
    pub(crate) fn backward(&self, cache: &LayerCache, grad: Array2<f64>) -> (Array2<f64>, Vec<Vec<f64>>) {
        match (self, cache) {
            (Layer::Dense { weight, .. }, LayerCache::Dense { input }) => {
                let dw = input.t().dot(&grad);
                let db = grad.sum_axis(Axis(0));
                let dx = grad.dot(&weight.t());
                (dx, vec![dw.iter().copied().collect(), db.to_vec()])
            }
            (Layer::BatchNorm { gamma, .. }, LayerCache::BatchNorm { x_hat, inv_std, batch_stats }) => {
                let dgamma = (&grad * x_hat).sum_axis(Axis(0));
                let dbeta = grad.sum_axis(Axis(0));
                let dx_hat = &grad * gamma;
                let dx = if *batch_stats {
                    let n = grad.nrows() as f64;
                    let sum = dx_hat.sum_axis(Axis(0));
                    let dot = (&dx_hat * x_hat).sum_axis(Axis(0));
                    ((&dx_hat * n - &sum - x_hat * &dot) * inv_std) / n
                } else {
                    dx_hat * inv_std
                };
                (dx, vec![dgamma.to_vec(), dbeta.to_vec()])
            }
            (Layer::Activation(a), LayerCache::Activation { input, output }) => {
                let mut dx = grad;
                ndarray::Zip::from(&mut dx).and(input).and(output).for_each(|g, &x, &y| *g *= a.derivative(x, y));
                (dx, Vec::new())
            }
            (Layer::Dropout { .. }, LayerCache::Dropout { mask }) => match mask {
                Some(m) => (grad * m, Vec::new()),
                None => (grad, Vec::new()),
            },
            _ => unreachable!("cache entries are produced by the same layer"),
        }
    }
}

fn slice(a: &Array2<f64>) -> &[f64] {
    a.as_slice().expect("standard layout")
}

fn slice1(a: &Array1<f64>) -> &[f64] {
    a.as_slice().expect("standard layout")
}
