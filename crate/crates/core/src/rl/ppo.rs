//! PPO-clip with a Gaussian policy, GAE advantages and a learned value
//! baseline. After every update the deterministic policy is scored on all
//! targets and the best snapshot is the one returned.

use super::env::{env_reset, env_step, Observation, Terminal};
use super::nn::{Adam, Mlp};
use super::policy::{clipped_surrogate, gaussian_log_prob, gaussian_log_prob_grads, GaussianPolicy};
use super::spec::RlSpec;
use super::train::{evaluate, CurvePoint, RawRun};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, PartialEq)]
pub struct PpoConfig {
    pub hidden: Vec<usize>,
    pub gamma: f64,
    pub lambda: f64,
    pub clip: f64,
    pub policy_lr: f64,
    pub value_lr: f64,
    pub epochs: usize,
    pub minibatch: usize,
    pub episodes_per_update: usize,
    pub init_log_std: f64,
    /// Bounds applied to the learned log-std after every optimizer step.
    pub log_std_range: (f64, f64),
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            policy_lr: 1e-3,
            value_lr: 1e-3,
            epochs: 20,
            minibatch: 32,
            episodes_per_update: 4,
            init_log_std: 0.5f64.ln(),
            hidden: vec![32, 32],
            gamma: 0.99,
            lambda: 0.95,
            clip: 0.2,
            log_std_range: (-3.0, 1.0),
        }
    }
}

/// One sample of the surrogate objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateSample {
    pub features: Vec<f64>,
    pub action: Vec<f64>,
    pub advantage: f64,
    pub old_log_prob: f64,
}

/// Mean clipped-surrogate objective over `batch` and its gradient with
/// respect to the policy's flat parameters (network weights, then log-std).
pub fn surrogate_and_grad(policy: &GaussianPolicy, batch: &[SurrogateSample], clip: f64) -> (f64, Vec<f64>) {
    let n_net = policy.params.len();
    let mut grad = vec![0.0; policy.num_params()];
    let mut total = 0.0;
    let scale = 1.0 / batch.len() as f64;
    for s in batch {
        let (mean, cache) = policy.mean_cached(&s.features);
        let lp = gaussian_log_prob(&mean, &policy.log_std, &s.action);
        let (obj, d_lp) = clipped_surrogate(lp, s.old_log_prob, s.advantage, clip);
        total += obj;
        if d_lp == 0.0 {
            continue;
        }
        let (d_mean, d_log_std) = gaussian_log_prob_grads(&mean, &policy.log_std, &s.action);
        let g_out: Vec<f64> = d_mean.iter().map(|d| d * d_lp * scale).collect();
        policy.net.backward(&policy.params, &cache, &g_out, &mut grad[..n_net]);
        for (g, d) in grad[n_net..].iter_mut().zip(&d_log_std) {
            *g += d * d_lp * scale;
        }
    }
    (total * scale, grad)
}

/// Largest relative difference between the analytic surrogate gradient and
/// central finite differences with step `1e-5`.
///
/// Relative error is `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn gradient_check(policy: &GaussianPolicy, batch: &[SurrogateSample], clip: f64) -> f64 {
    assert!(!batch.is_empty(), "gradient check needs a non-empty batch");
    const H: f64 = 1e-5;
    let (_, analytic) = surrogate_and_grad(policy, batch, clip);
    let base = policy.flat();
    let mut probe = policy.clone();
    let mut worst: f64 = 0.0;
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + H;
        probe.set_flat(&p);
        let up = surrogate_and_grad(&probe, batch, clip).0;
        p[i] = base[i] - H;
        probe.set_flat(&p);
        let down = surrogate_and_grad(&probe, batch, clip).0;
        let numeric = (up - down) / (2.0 * H);
        let a = analytic[i];
        let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(err);
    }
    worst
}

pub fn init_policy<R: Rng>(n_links: usize, hidden: &[usize], init_log_std: f64, rng: &mut R) -> GaussianPolicy {
    let mut sizes = vec![Observation::dim(n_links)];
    sizes.extend_from_slice(hidden);
    sizes.push(n_links);
    let net = Mlp::new(sizes);
    let params = net.init(rng, 0.01);
    GaussianPolicy { net, params, log_std: vec![init_log_std; n_links] }
}

struct Sample {
    features: Vec<f64>,
    action: Vec<f64>,
    log_prob: f64,
    advantage: f64,
    target_value: f64,
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

pub(crate) fn train_ppo(spec: &RlSpec, cfg: &PpoConfig) -> RawRun {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.links.len();
    let reach = spec.total_reach();
    let mut policy = init_policy(n, &cfg.hidden, cfg.init_log_std, &mut rng);
    let mut value_sizes = vec![Observation::dim(n)];
    value_sizes.extend_from_slice(&cfg.hidden);
    value_sizes.push(1);
    let value_net = Mlp::new(value_sizes);
    let mut value_params = value_net.init(&mut rng, 1.0);
    let mut policy_opt = Adam::new(policy.num_params(), cfg.policy_lr);
    let mut value_opt = Adam::new(value_params.len(), cfg.value_lr);
    // keeps value targets of order one
    let w = &spec.reward_weights;
    let v_scale = w.distance * reach / (1.0 - cfg.gamma) * 0.1 + w.success_bonus;

    let mut curve = Vec::with_capacity(spec.episodes);
    let mut best: Option<(CheckpointScore, GaussianPolicy)> = None;
    let mut episode = 0;
    while episode < spec.episodes {
        let mut batch: Vec<Sample> = Vec::new();
        let in_batch = cfg.episodes_per_update.min(spec.episodes - episode);
        for _ in 0..in_batch {
            let target = episode % spec.targets.len();
            let (mut state, mut obs) = env_reset(spec, target, &mut rng);
            let mut feats = Vec::new();
            let mut rewards = Vec::new();
            let mut total_reward = 0.0;
            let terminal;
            loop {
                let f = obs.features(reach);
                let mean = policy.mean(&f);
                let action: Vec<f64> = mean
                    .iter()
                    .zip(&policy.log_std)
                    .map(|(m, ls)| m + ls.exp() * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let log_prob = gaussian_log_prob(&mean, &policy.log_std, &action);
                let step = env_step(&state, &action, spec);
                total_reward += step.reward;
                rewards.push(step.reward);
                feats.push(f.clone());
                batch.push(Sample { features: f, action, log_prob, advantage: 0.0, target_value: 0.0 });
                state = step.state;
                obs = step.observation;
                if let Some(t) = step.done {
                    terminal = t;
                    break;
                }
            }
            curve.push(CurvePoint { episode, total_reward, final_distance: obs.distance });
            episode += 1;

            // GAE over this episode; a timeout bootstraps from the last state
            let values: Vec<f64> = feats.iter().map(|f| value_net.forward(&value_params, f)[0] * v_scale).collect();
            let last_value = match terminal {
                Terminal::Success => 0.0,
                Terminal::Timeout => value_net.forward(&value_params, &obs.features(reach))[0] * v_scale,
            };
            let len = rewards.len();
            let start = batch.len() - len;
            let mut gae = 0.0;
            for t in (0..len).rev() {
                let next_v = if t + 1 < len { values[t + 1] } else { last_value };
                let delta = rewards[t] + cfg.gamma * next_v - values[t];
                gae = delta + cfg.gamma * cfg.lambda * gae;
                batch[start + t].advantage = gae;
                batch[start + t].target_value = (gae + values[t]) / v_scale;
            }
        }

        // normalized advantages
        let m = batch.len() as f64;
        let mean_adv = batch.iter().map(|s| s.advantage).sum::<f64>() / m;
        let var = batch.iter().map(|s| (s.advantage - mean_adv).powi(2)).sum::<f64>() / m;
        let std_adv = var.sqrt().max(1e-8);
        let samples: Vec<SurrogateSample> = batch
            .iter()
            .map(|s| SurrogateSample {
                features: s.features.clone(),
                action: s.action.clone(),
                advantage: (s.advantage - mean_adv) / std_adv,
                old_log_prob: s.log_prob,
            })
            .collect();

        let mut order: Vec<usize> = (0..batch.len()).collect();
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(cfg.minibatch) {
                let mb: Vec<SurrogateSample> = chunk.iter().map(|&i| samples[i].clone()).collect();
                let (objective, grad) = surrogate_and_grad(&policy, &mb, cfg.clip);
                if !objective.is_finite() || !all_finite(&grad) {
                    return diverged(curve, policy, "policy objective became non-finite");
                }
                let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
                let mut flat = policy.flat();
                policy_opt.step(&mut flat, &neg);
                policy.set_flat(&flat);
                for ls in policy.log_std.iter_mut() {
                    *ls = ls.clamp(cfg.log_std_range.0, cfg.log_std_range.1);
                }

                let mut vgrad = vec![0.0; value_params.len()];
                let mut vloss = 0.0;
                let scale = 1.0 / chunk.len() as f64;
                for &i in chunk {
                    let (v, cache) = value_net.forward_cached(&value_params, &batch[i].features);
                    let err = v[0] - batch[i].target_value;
                    vloss += 0.5 * err * err * scale;
                    value_net.backward(&value_params, &cache, &[err * scale], &mut vgrad);
                }
                if !vloss.is_finite() || !all_finite(&vgrad) {
                    return diverged(curve, policy, "value loss became non-finite");
                }
                value_opt.step(&mut value_params, &vgrad);
            }
        }
        if !all_finite(&policy.params) || !all_finite(&value_params) {
            return diverged(curve, policy, "parameters became non-finite");
        }
        let score = checkpoint_score(&policy, spec);
        if best.as_ref().is_none_or(|(s, _)| score.better_than(s)) {
            best = Some((score, policy.clone()));
        }
    }
    let policy = best.map(|(_, p)| p).unwrap_or(policy);
    RawRun { curve, policy, failure: None }
}

/// Deterministic quality of a policy snapshot: targets reached, then mean
/// final distance.
struct CheckpointScore {
    successes: usize,
    mean_distance: f64,
}

impl CheckpointScore {
    fn better_than(&self, other: &CheckpointScore) -> bool {
        self.successes > other.successes
            || (self.successes == other.successes && self.mean_distance < other.mean_distance)
    }
}

fn checkpoint_score(policy: &GaussianPolicy, spec: &RlSpec) -> CheckpointScore {
    let mut successes = 0;
    let mut total = 0.0;
    for target in 0..spec.targets.len() {
        let traj = evaluate(policy, spec, target);
        successes += usize::from(traj.terminal == Terminal::Success);
        total += traj.final_distance();
    }
    CheckpointScore { successes, mean_distance: total / spec.targets.len() as f64 }
}

fn diverged(curve: Vec<CurvePoint>, policy: GaussianPolicy, why: &str) -> RawRun {
    RawRun { curve, policy, failure: Some(format!("training diverged: {why}")) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_batch<R: Rng>(policy: &GaussianPolicy, n: usize, rng: &mut R) -> Vec<SurrogateSample> {
        (0..n)
            .map(|_| {
                let features: Vec<f64> = (0..policy.net.input_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let mean = policy.mean(&features);
                let action: Vec<f64> = mean.iter().map(|m| m + rng.random_range(-1.0..1.0)).collect();
                let lp = gaussian_log_prob(&mean, &policy.log_std, &action);
                SurrogateSample {
                    features,
                    action,
                    advantage: rng.random_range(-2.0..2.0),
                    old_log_prob: lp + rng.random_range(-0.5..0.5),
                }
            })
            .collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let policy = init_policy(2, &[6, 5], -0.4, &mut rng);
        let mut policy = policy;
        policy.params = policy.net.init(&mut rng, 1.0);
        let batch = random_batch(&policy, 16, &mut rng);
        let err = gradient_check(&policy, &batch, 0.2);
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn zero_advantage_gives_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let policy = init_policy(3, &[4], 0.0, &mut rng);
        let mut batch = random_batch(&policy, 8, &mut rng);
        batch.iter_mut().for_each(|s| s.advantage = 0.0);
        let (obj, grad) = surrogate_and_grad(&policy, &batch, 0.2);
        assert_eq!(obj, 0.0);
        assert!(grad.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn single_parameter_linear_policy() {
        let net = Mlp::without_bias(vec![1, 1]);
        let policy = GaussianPolicy { net, params: vec![0.7], log_std: vec![-0.2] };
        let batch = vec![SurrogateSample { features: vec![1.3], action: vec![0.5], advantage: 1.5, old_log_prob: 0.0 }];
        // closed form: d/dw of ratio * A where mean = w * x
        let mean: f64 = 0.7 * 1.3;
        let var = (-0.4f64).exp();
        let lp = gaussian_log_prob(&[mean], &[-0.2], &[0.5]);
        let ratio = lp.exp();
        let expected = ratio * 1.5 * (0.5 - mean) / var * 1.3;
        let (_, grad) = surrogate_and_grad(&policy, &batch, 10.0);
        assert!((grad[0] - expected).abs() < 1e-12);
        assert!(gradient_check(&policy, &batch, 10.0) < 1e-8);
    }
}
