//! Native reinforcement-learning engine: a goal-conditioned planar reaching
//! environment with PPO and cross-entropy-method trainers.

pub mod cem;
pub mod env;
pub mod export;
pub mod nn;
pub mod policy;
pub mod ppo;
pub mod spec;
pub mod train;

pub use env::{env_reset, env_reset_exact, env_step, EnvState, Observation, Step, Terminal};
pub use policy::GaussianPolicy;
pub use spec::{
    parse_rlspec, RewardWeights, RlSpec, RlSpecError, DEFAULT_ACTION_LIMIT, DEFAULT_DT, DEFAULT_EPISODES,
    DEFAULT_EPSILON, DEFAULT_MAX_STEPS, DEFAULT_SEED,
};
pub use train::{evaluate, train, CurvePoint, TrainingResult, Trajectory, TrajectoryStep};
