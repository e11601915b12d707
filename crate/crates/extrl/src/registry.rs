//! String names for agents and environments, as used by the CLI and
//! benchmark configs.
//!
//! Agent specs:
//!
//! * `constant` / `constant(<k>)` — always take action `k` (default 0)
//! * `constant_never_push` / `constant_always_push` — aliases for
//!   `constant(0)` / `constant(1)`
//! * `random` — uniform over actions
//! * `q` / `q(lr=…,eps=…,gamma=…)` — tabular Q-learning, any subset of
//!   learning rate, exploration, discount
//! * `phantom_deviant` — the history-sensitive probe agent
//! * `rc(<inner>)` / `rc(<inner>;y=<k>)` — reality-check wrapper, with an
//!   optional fixed fallback action `y`
//!
//! Environment names: the nine extended environments by their stable
//! names, `cartpole` for the bare control task, and `cartpole*<env>` for
//! a combination with any adaptable extended environment.

use crate::agents::AgentFactory;
use crate::combine::check_adaptable;
use crate::envs::{EnvFactory, EnvKind};
use crate::error::ExtrlError;
use crate::reality_check::rc_wrap;
use crate::types::{ActionId, AgentConfig};

/// Window length used by the `limited_memory` registry name.
pub const LIMITED_MEMORY_WINDOW: usize = 10;

/// Phantom history used by the `false_memories` registry name: one
/// fabricated rewarding step for action 1, enough to flip a fresh
/// learner's argmax.
pub fn default_phantom() -> Vec<crate::types::TrainStep> {
    vec![crate::types::TrainStep::new(0, 1, 1.0, 0)]
}

/// Stable environment names accepted by [`parse_env`].
pub fn env_names() -> Vec<&'static str> {
    vec![
        "ignore_rewards",
        "tempting_button",
        "reverse_history",
        "incentivize_learning_rate",
        "self_recognition",
        "limited_memory",
        "false_memories",
        "adversarial_predictor",
        "prop3_fixture",
        "cartpole",
    ]
}

/// Agent spec forms accepted by [`parse_agent`], for `list` output.
pub fn agent_spec_forms() -> Vec<&'static str> {
    vec![
        "constant",
        "constant(<k>)",
        "constant_never_push",
        "constant_always_push",
        "random",
        "q",
        "q(lr=<f>,eps=<f>,gamma=<f>)",
        "phantom_deviant",
        "rc(<agent>)",
        "rc(<agent>;y=<k>)",
    ]
}

fn base_kind(name: &str) -> Result<EnvKind, ExtrlError> {
    Ok(match name {
        "ignore_rewards" => EnvKind::IgnoreRewards,
        "tempting_button" => EnvKind::TemptingButton,
        "reverse_history" => EnvKind::ReverseHistory,
        "incentivize_learning_rate" => EnvKind::IncentivizeLearningRate,
        "self_recognition" => EnvKind::SelfRecognition,
        "limited_memory" => EnvKind::LimitedMemory { window: LIMITED_MEMORY_WINDOW },
        "false_memories" => EnvKind::FalseMemories { phantom: default_phantom() },
        "adversarial_predictor" => EnvKind::AdversarialSequencePredictor,
        "prop3_fixture" => EnvKind::StartupProbe,
        "cartpole" => EnvKind::CartPole,
        other => return Err(ExtrlError::UnknownEnv(other.to_string())),
    })
}

/// Resolve an environment name, including `cartpole*<env>` combinations.
pub fn parse_env(name: &str) -> Result<EnvFactory, ExtrlError> {
    let name = name.trim();
    if let Some((g, e)) = name.split_once('*') {
        let (g, e) = (g.trim(), e.trim());
        if g != "cartpole" {
            return Err(ExtrlError::UnknownEnv(format!(
                "{name} (combinations must have the control task on the left: cartpole*<env>)"
            )));
        }
        let e_kind = base_kind(e)?;
        if !check_adaptable(&e_kind) {
            return Err(ExtrlError::NotAdaptable(e.to_string()));
        }
        return Ok(EnvFactory::new(EnvKind::Combined { e: Box::new(e_kind) }));
    }
    Ok(EnvFactory::new(base_kind(name)?))
}

/// Whether a named environment can be combined with the control task.
pub fn env_is_adaptable(name: &str) -> Result<bool, ExtrlError> {
    Ok(check_adaptable(&base_kind(name.trim())?))
}

/// A parsed agent spec, independent of any particular token spaces.
#[derive(Clone, Debug, PartialEq)]
pub enum AgentSpec {
    Constant(u32),
    Random,
    Q { lr: Option<f64>, eps: Option<f64>, gamma: Option<f64> },
    PhantomDeviant,
    Rc { inner: Box<AgentSpec>, default_action: Option<u32> },
}

impl AgentSpec {
    /// Materialize a factory over concrete spaces.
    pub fn factory(&self, seed: u64, obs_count: u32, action_count: u32) -> AgentFactory {
        let config = AgentConfig::new(seed, obs_count, action_count);
        match self {
            AgentSpec::Constant(k) => AgentFactory::constant(*k, config),
            AgentSpec::Random => AgentFactory::random(config),
            AgentSpec::Q { lr, eps, gamma } => {
                let mut config = config;
                config.learning_rate = *lr;
                config.exploration = *eps;
                config.discount = *gamma;
                AgentFactory::tabular_q(config)
            }
            AgentSpec::PhantomDeviant => AgentFactory::phantom_deviant(config),
            AgentSpec::Rc { inner, default_action } => {
                rc_wrap(inner.factory(seed, obs_count, action_count), default_action.map(ActionId))
            }
        }
    }

    /// Apply overrides to the learning parameters, where the agent spec has any.
    pub fn with_overrides(
        &self,
        lr: Option<f64>,
        eps: Option<f64>,
        gamma: Option<f64>,
    ) -> AgentSpec {
        match self {
            AgentSpec::Q { lr: l0, eps: e0, gamma: g0 } => {
                AgentSpec::Q { lr: lr.or(*l0), eps: eps.or(*e0), gamma: gamma.or(*g0) }
            }
            AgentSpec::Rc { inner, default_action } => AgentSpec::Rc {
                inner: Box::new(inner.with_overrides(lr, eps, gamma)),
                default_action: *default_action,
            },
            other => other.clone(),
        }
    }

    /// True if any nested spec is the Q kind (the only learning kind).
    pub fn learns(&self) -> bool {
        match self {
            AgentSpec::Q { .. } => true,
            AgentSpec::Rc { inner, .. } => inner.learns(),
            _ => false,
        }
    }
}

/// Parse an agent spec string.
pub fn parse_agent(spec: &str) -> Result<AgentSpec, ExtrlError> {
    let spec = spec.trim();
    let bad = || ExtrlError::UnknownAgent(spec.to_string());

    match spec {
        "constant" | "constant_never_push" => return Ok(AgentSpec::Constant(0)),
        "constant_always_push" => return Ok(AgentSpec::Constant(1)),
        "random" => return Ok(AgentSpec::Random),
        "q" => return Ok(AgentSpec::Q { lr: None, eps: None, gamma: None }),
        "phantom_deviant" => return Ok(AgentSpec::PhantomDeviant),
        _ => {}
    }

    if let Some(args) = spec.strip_prefix("constant(").and_then(|s| s.strip_suffix(')')) {
        let k: u32 = args.trim().parse().map_err(|_| bad())?;
        return Ok(AgentSpec::Constant(k));
    }

    if let Some(args) = spec.strip_prefix("q(").and_then(|s| s.strip_suffix(')')) {
        let (mut lr, mut eps, mut gamma) = (None, None, None);
        for part in args.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            let value: f64 = value.trim().parse().map_err(|_| bad())?;
            match key.trim() {
                "lr" => lr = Some(value),
                "eps" => eps = Some(value),
                "gamma" => gamma = Some(value),
                _ => return Err(bad()),
            }
        }
        return Ok(AgentSpec::Q { lr, eps, gamma });
    }

    if let Some(args) = spec.strip_prefix("rc(").and_then(|s| s.strip_suffix(')')) {
        // Optional ";y=<k>" after the inner spec; the inner spec itself may
        // contain parentheses but never a semicolon.
        let (inner_str, default_action) = match args.rsplit_once(';') {
            Some((inner, tail)) => {
                let y = tail
                    .trim()
                    .strip_prefix("y=")
                    .ok_or_else(bad)?
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| bad())?;
                (inner, Some(y))
            }
            None => (args, None),
        };
        let inner = parse_agent(inner_str)?;
        return Ok(AgentSpec::Rc { inner: Box::new(inner), default_action });
    }

    Err(bad())
}
