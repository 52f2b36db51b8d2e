//! Adam with bias-corrected moment estimates, over named parameter blocks.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment accumulators, one pair per parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
    step: u64,
}

impl AdamState {
    /// Fresh state for blocks of the given lengths.
    pub fn new(block_lens: &[usize]) -> Self {
        Self {
            first: block_lens.iter().map(|&n| vec![0.0; n]).collect(),
            second: block_lens.iter().map(|&n| vec![0.0; n]).collect(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn first_moment(&self, block: usize) -> &[f64] {
        &self.first[block]
    }

    pub fn second_moment(&self, block: usize) -> &[f64] {
        &self.second[block]
    }
}

/// One Adam update of every block. `grads[i]` pairs a block name (used in
/// diagnostics) with the gradient of `params[i]`.
///
/// All gradients are checked before any parameter moves, so a non-finite
/// gradient leaves both parameters and state untouched.
pub fn adam_step(
    params: &mut [&mut [f64]],
    grads: &[(&'static str, &[f64])],
    state: &mut AdamState,
    cfg: &AdamConfig,
) -> Result<()> {
    assert_eq!(params.len(), grads.len(), "parameter/gradient block count");
    assert_eq!(params.len(), state.first.len(), "parameter/state block count");
    for (i, (name, g)) in grads.iter().enumerate() {
        assert_eq!(params[i].len(), g.len(), "shape of block `{name}`");
        if let Some(index) = g.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteGradient { block: name, index });
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let bias1 = 1.0 - cfg.beta1.powi(t);
    let bias2 = 1.0 - cfg.beta2.powi(t);
    for (i, block) in params.iter_mut().enumerate() {
        let g = grads[i].1;
        let m = &mut state.first[i];
        let v = &mut state.second[i];
        for j in 0..block.len() {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            let m_hat = m[j] / bias1;
            let v_hat = v[j] / bias2;
            block[j] -= cfg.alpha * m_hat / (v_hat.sqrt() + cfg.eps);
        }
    }
    Ok(())
}
