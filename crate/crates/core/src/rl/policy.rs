use super::nn::{Cache, Mlp};
use serde::{Deserialize, Serialize};

const LOG_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Diagonal Gaussian policy: an MLP produces the mean, a free vector holds
/// the per-joint log standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolicy {
    pub net: Mlp,
    pub params: Vec<f64>,
    pub log_std: Vec<f64>,
}

impl GaussianPolicy {
    pub fn mean(&self, features: &[f64]) -> Vec<f64> {
        self.net.forward(&self.params, features)
    }

    pub fn mean_cached(&self, features: &[f64]) -> (Vec<f64>, Cache) {
        self.net.forward_cached(&self.params, features)
    }

    pub fn num_params(&self) -> usize {
        self.params.len() + self.log_std.len()
    }

    /// Flat view: network parameters followed by log-std.
    pub fn flat(&self) -> Vec<f64> {
        let mut v = self.params.clone();
        v.extend_from_slice(&self.log_std);
        v
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let n = self.params.len();
        self.params.copy_from_slice(&flat[..n]);
        self.log_std.copy_from_slice(&flat[n..]);
    }
}

pub fn gaussian_log_prob(mean: &[f64], log_std: &[f64], action: &[f64]) -> f64 {
    mean.iter()
        .zip(log_std)
        .zip(action)
        .map(|((m, ls), a)| {
            let z = (a - m) / ls.exp();
            -0.5 * z * z - ls - LOG_SQRT_2PI
        })
        .sum()
}

/// d log p / d mean and d log p / d log_std.
pub fn gaussian_log_prob_grads(mean: &[f64], log_std: &[f64], action: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut d_mean = Vec::with_capacity(mean.len());
    let mut d_log_std = Vec::with_capacity(mean.len());
    for ((m, ls), a) in mean.iter().zip(log_std).zip(action) {
        let var = (2.0 * ls).exp();
        let diff = a - m;
        d_mean.push(diff / var);
        d_log_std.push(diff * diff / var - 1.0);
    }
    (d_mean, d_log_std)
}

/// One sample of the clipped surrogate objective and its derivative with
/// respect to the new log-probability.
pub fn clipped_surrogate(log_prob: f64, old_log_prob: f64, advantage: f64, clip: f64) -> (f64, f64) {
    let ratio = (log_prob - old_log_prob).exp();
    let clipped = ratio.clamp(1.0 - clip, 1.0 + clip);
    let unclipped_obj = ratio * advantage;
    let clipped_obj = clipped * advantage;
    if unclipped_obj <= clipped_obj {
        (unclipped_obj, unclipped_obj)
    } else {
        (clipped_obj, 0.0)
    }
}
