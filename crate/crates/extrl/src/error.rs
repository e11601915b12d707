//! Library error type.

use thiserror::Error;

/// Everything that can go wrong when building factories, running
/// interactions, or producing benchmark tables.
#[derive(Debug, Error)]
pub enum ExtrlError {
    #[error("unknown agent spec '{0}'")]
    UnknownAgent(String),

    #[error("unknown environment '{0}'")]
    UnknownEnv(String),

    #[error("environment '{0}' is not adaptable and cannot be combined with a control task")]
    NotAdaptable(String),

    #[error("agent kind '{0}' has no learning rate")]
    NoLearningRate(&'static str),

    #[error("{what} token {value} is outside the declared space of {count}")]
    SpaceMismatch { what: &'static str, value: u32, count: u32 },

    #[error("agent factory declares spaces ({agent_obs} obs, {agent_actions} actions) but environment '{env}' uses ({env_obs}, {env_actions})")]
    SpaceDisagreement {
        env: String,
        agent_obs: u32,
        agent_actions: u32,
        env_obs: u32,
        env_actions: u32,
    },

    #[error("non-finite reward emitted at step {step}")]
    NonFiniteReward { step: u64 },

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("reverse_history replays the whole run every step (quadratic cost): {steps} steps exceeds the {cap}-step cap; pass --allow-quadratic to run anyway")]
    QuadraticCap { steps: u64, cap: u64 },

    #[error("environment '{0}' has no episode structure; learning curves need a control task")]
    NonEpisodic(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("reading config: {0}")]
    Config(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}
