//! AdamW with decoupled weight decay.

use serde::{Deserialize, Serialize};

use super::network::{Gradients, QNetwork};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamWConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        Self { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8, weight_decay: 1e-4 }
    }
}

#[derive(Clone, Debug)]
pub struct AdamW {
    pub config: AdamWConfig,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamW {
    pub fn new(config: AdamWConfig, param_count: usize) -> Self {
        Self { config, t: 0, m: vec![0.0; param_count], v: vec![0.0; param_count] }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// `p ← p·(1 − lr·wd)`, then the bias-corrected Adam step.
    pub fn step(&mut self, net: &mut QNetwork, grads: &Gradients) {
        let c = self.config;
        let g = grads.flatten();
        let mut p = net.parameters();
        assert_eq!(g.len(), p.len());
        assert_eq!(self.m.len(), p.len(), "optimizer built for another network");
        self.t += 1;
        let t = self.t as i32;
        let bc1 = 1.0 - c.beta1.powi(t);
        let bc2 = 1.0 - c.beta2.powi(t);
        let decay = 1.0 - c.lr * c.weight_decay;
        for i in 0..p.len() {
            p[i] *= decay;
            self.m[i] = c.beta1 * self.m[i] + (1.0 - c.beta1) * g[i];
            self.v[i] = c.beta2 * self.v[i] + (1.0 - c.beta2) * g[i] * g[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            p[i] -= c.lr * m_hat / (v_hat.sqrt() + c.eps);
        }
        net.set_parameters(&p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_pure_decay() {
        let mut net = QNetwork::zeros(&[2, 1]);
        net.set_parameters(&[0.5, -3.0, 1.25]);
        let grads = Gradients { layers: QNetwork::zeros(&[2, 1]).layers().to_vec() };
        let cfg = AdamWConfig { lr: 0.01, weight_decay: 0.1, ..AdamWConfig::default() };
        let mut opt = AdamW::new(cfg, 3);
        opt.step(&mut net, &grads);
        let k = 1.0 - 0.01 * 0.1;
        assert_eq!(net.parameters(), vec![0.5 * k, -3.0 * k, 1.25 * k]);
    }
}
