use serde::{Deserialize, Serialize};

use super::{Gradients, Mlp, NnError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { learning_rate: 2e-4, beta1: 0.5, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// One bias-corrected Adam step over a flat parameter slice. `t` counts
/// steps from 1.
pub fn adam_update(cfg: &AdamConfig, t: u64, params: &mut [f64], grads: &[f64], m: &mut [f64], v: &mut [f64]) {
    let c1 = 1.0 - cfg.beta1.powi(t as i32);
    let c2 = 1.0 - cfg.beta2.powi(t as i32);
    for i in 0..params.len() {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grads[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        let m_hat = m[i] / c1;
        let v_hat = v[i] / c2;
        params[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
    }
}

/// Adam state for one network.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam {
    pub config: AdamConfig,
    t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(config: AdamConfig, net: &Mlp) -> Self {
        let zeros: Vec<Vec<f64>> = net.params().iter().map(|p| vec![0.0; p.len()]).collect();
        Self { config, t: 0, m: zeros.clone(), v: zeros }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, net: &mut Mlp, grads: &Gradients) -> Result<(), NnError> {
        if grads.0.len() != self.m.len() || grads.0.iter().zip(&self.m).any(|(g, m)| g.len() != m.len()) {
            return Err(NnError::GradientShape);
        }
        self.t += 1;
        let t = self.t;
        let cfg = self.config;
        let (ms, vs) = (&mut self.m, &mut self.v);
        net.update_params(|i, p| adam_update(&cfg, t, p, &grads.0[i], &mut ms[i], &mut vs[i]));
        Ok(())
    }
}
