//! Cross-entropy method: a diagonal Gaussian over policy parameters is
//! sampled, candidates are scored by deterministic rollouts on every target,
//! and the distribution is re-fit to the elite fraction.

use super::env::{env_reset_exact, env_step};
use super::policy::GaussianPolicy;
use super::ppo::init_policy;
use super::spec::RlSpec;
use super::train::{CurvePoint, RawRun};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, PartialEq)]
pub struct CemConfig {
    pub hidden: Vec<usize>,
    pub population: usize,
    pub elite_fraction: f64,
    pub init_std: f64,
    /// Added to the re-fit standard deviation so the search never collapses.
    pub std_floor: f64,
}

impl Default for CemConfig {
    fn default() -> Self {
        Self { hidden: vec![16], population: 40, elite_fraction: 0.2, init_std: 0.5, std_floor: 0.01 }
    }
}

/// Return and final distance of one deterministic episode.
fn rollout(policy: &GaussianPolicy, spec: &RlSpec, target: usize) -> (f64, f64) {
    let reach = spec.total_reach();
    let (mut state, mut obs) = env_reset_exact(spec, target);
    let mut total = 0.0;
    loop {
        let action = policy.mean(&obs.features(reach));
        let step = env_step(&state, &action, spec);
        total += step.reward;
        state = step.state;
        obs = step.observation;
        if step.done.is_some() {
            return (total, obs.distance);
        }
    }
}

/// Mean return and mean final distance over all targets.
fn fitness(policy: &GaussianPolicy, spec: &RlSpec) -> (f64, f64) {
    let k = spec.targets.len() as f64;
    let (r, d) =
        (0..spec.targets.len()).map(|t| rollout(policy, spec, t)).fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    (r / k, d / k)
}

/// `spec.episodes` counts generations; the curve holds one row per
/// generation, scoring the re-fit mean.
pub(crate) fn train_cem(spec: &RlSpec, cfg: &CemConfig) -> RawRun {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut policy = init_policy(spec.links.len(), &cfg.hidden, 0.1f64.ln(), &mut rng);
    let dim = policy.params.len();
    let mut mean = policy.params.clone();
    let mut std = vec![cfg.init_std; dim];
    let n_elite = ((cfg.population as f64 * cfg.elite_fraction).round() as usize).clamp(1, cfg.population);
    let mut curve = Vec::with_capacity(spec.episodes);
    let mut candidate = policy.clone();
    for generation in 0..spec.episodes {
        let mut scored: Vec<(f64, Vec<f64>)> = (0..cfg.population)
            .map(|_| {
                let params: Vec<f64> =
                    mean.iter().zip(&std).map(|(m, s)| m + s * rng.sample::<f64, _>(StandardNormal)).collect();
                candidate.params.copy_from_slice(&params);
                (fitness(&candidate, spec).0, params)
            })
            .collect();
        if scored.iter().any(|(f, _)| !f.is_finite()) {
            policy.params = mean;
            return RawRun { curve, policy, failure: Some("training diverged: non-finite fitness".into()) };
        }
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        let elites = &scored[..n_elite];
        for i in 0..dim {
            let m = elites.iter().map(|(_, p)| p[i]).sum::<f64>() / n_elite as f64;
            let v = elites.iter().map(|(_, p)| (p[i] - m).powi(2)).sum::<f64>() / n_elite as f64;
            mean[i] = m;
            std[i] = v.sqrt() + cfg.std_floor;
        }
        policy.params.copy_from_slice(&mean);
        let (total_reward, final_distance) = fitness(&policy, spec);
        curve.push(CurvePoint { episode: generation, total_reward, final_distance });
    }
    RawRun { curve, policy, failure: None }
}
