//! Versioned text record of a network: a header line, then one line per
//! layer descriptor followed by its row-major value lines.
//!
//! ```text
//! mlp-params v1
//! input 6
//! layers 2
//! dense 6 4
//! <24 weights>
//! <4 biases>
//! activation tanh
//! ```

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{Activation, Layer, Mlp, NnError};

const HEADER: &str = "mlp-params v1";

fn join(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{v:?}").unwrap();
    }
    s
}

impl Mlp {
    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER}\ninput {}\nlayers {}\n", self.input_width, self.layers.len());
        for layer in &self.layers {
            match layer {
                Layer::Dense { weight, bias } => {
                    let w: Vec<f64> = weight.iter().copied().collect();
                    writeln!(out, "dense {} {}", weight.nrows(), weight.ncols()).unwrap();
                    writeln!(out, "{}", join(&w)).unwrap();
                    writeln!(out, "{}", join(&bias.to_vec())).unwrap();
                }
                Layer::BatchNorm { gamma, beta, running_mean, running_var, momentum, eps } => {
                    writeln!(out, "batchnorm {} {momentum:?} {eps:?}", gamma.len()).unwrap();
                    for v in [gamma, beta, running_mean, running_var] {
                        writeln!(out, "{}", join(&v.to_vec())).unwrap();
                    }
                }
                Layer::Activation(a) => match a {
                    Activation::LeakyRelu(alpha) => writeln!(out, "activation leaky_relu {alpha:?}").unwrap(),
                    Activation::Tanh => writeln!(out, "activation tanh").unwrap(),
                    Activation::Sigmoid => writeln!(out, "activation sigmoid").unwrap(),
                    Activation::Identity => writeln!(out, "activation identity").unwrap(),
                },
                Layer::Dropout { prob } => writeln!(out, "dropout {prob:?}").unwrap(),
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, NnError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next =
            |what: &str| lines.next().ok_or_else(|| NnError::Parse { line: 0, message: format!("missing {what}") });
        let (n, header) = next("header")?;
        if header != HEADER {
            return Err(NnError::Parse { line: n, message: format!("unsupported header {header:?}") });
        }
        let input = keyword_usize(next("input line")?, "input")?;
        let count = keyword_usize(next("layer count")?, "layers")?;
        let mut layers = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, line) = next("layer descriptor")?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = |m: &str| NnError::Parse { line: n, message: m.to_string() };
            let layer = match parts.as_slice() {
                ["dense", rows, cols] => {
                    let rows: usize = rows.parse().map_err(|_| bad("dense rows"))?;
                    let cols: usize = cols.parse().map_err(|_| bad("dense cols"))?;
                    let w = values(next("dense weights")?, rows * cols)?;
                    let b = values(next("dense bias")?, cols)?;
                    Layer::Dense {
                        weight: Array2::from_shape_vec((rows, cols), w).expect("length checked"),
                        bias: Array1::from(b),
                    }
                }
                ["batchnorm", width, momentum, eps] => {
                    let width: usize = width.parse().map_err(|_| bad("batchnorm width"))?;
                    let momentum: f64 = momentum.parse().map_err(|_| bad("batchnorm momentum"))?;
                    let eps: f64 = eps.parse().map_err(|_| bad("batchnorm eps"))?;
                    let mut v = Vec::with_capacity(4);
                    for what in ["gamma", "beta", "running mean", "running variance"] {
                        v.push(Array1::from(values(next(what)?, width)?));
                    }
                    let running_var = v.pop().unwrap();
                    let running_mean = v.pop().unwrap();
                    let beta = v.pop().unwrap();
                    let gamma = v.pop().unwrap();
                    Layer::BatchNorm { gamma, beta, running_mean, running_var, momentum, eps }
                }
                ["activation", "leaky_relu", alpha] => {
                    Layer::Activation(Activation::LeakyRelu(alpha.parse().map_err(|_| bad("alpha"))?))
                }
                ["activation", "tanh"] => Layer::Activation(Activation::Tanh),
                ["activation", "sigmoid"] => Layer::Activation(Activation::Sigmoid),
                ["activation", "identity"] => Layer::Activation(Activation::Identity),
                ["dropout", prob] => Layer::Dropout { prob: prob.parse().map_err(|_| bad("dropout"))? },
                _ => return Err(bad(&format!("unknown layer {line:?}"))),
            };
            layers.push(layer);
        }
        Mlp::new(input, layers)
    }

    pub fn save(&self, path: &Path) -> Result<(), NnError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NnError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn keyword_usize((n, line): (usize, &str), key: &str) -> Result<usize, NnError> {
    line.strip_prefix(key)
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| NnError::Parse { line: n, message: format!("expected `{key} <count>`") })
}

fn values((n, line): (usize, &str), expected: usize) -> Result<Vec<f64>, NnError> {
    let v: Vec<f64> = line
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| NnError::Parse { line: n, message: e.to_string() })?;
    if v.len() != expected {
        return Err(NnError::Parse { line: n, message: format!("expected {expected} values, found {}", v.len()) });
    }
    Ok(v)
}
