//! Reference agents and the factory blueprint they are built from.
//!
//! Every agent kind here honors the twin-replay contract: two instances
//! created from the same factory and given the same interleaved
//! sequence of `act`/`train` calls return identical actions at every
//! `act`. That property is what lets extended environments interrogate
//! shadow copies of the live agent and trust the answers.
//!
//! To keep the contract while still allowing divergently-trained copies
//! to explore differently, stochastic kinds derive their noise from a
//! *noise key* that starts at the factory seed and folds in the content
//! of every training step received so far. The key is a pure function of
//! the training history, so identically-trained twins stay in lockstep,
//! while a shadow copy trained on altered data (say, zeroed rewards)
//! draws from a decoupled stream instead of echoing the original's
//! exploration.

use crate::error::ExtrlError;
use crate::rng::{derive_random, mix64};
use crate::types::{ActionId, AgentConfig, ObservationId, TrainStep};

/// Learning rate used by the Q kind when the config leaves it unset.
pub const DEFAULT_LEARNING_RATE: f64 = 0.1;
/// Discount factor used by the Q kind when the config leaves it unset.
pub const DEFAULT_DISCOUNT: f64 = 0.95;
/// Exploration rate used by the Q kind when the config leaves it unset.
pub const DEFAULT_EXPLORATION: f64 = 0.08;

/// A live agent instance.
///
/// `act` is a pure query: it must never change how the instance behaves
/// in the future (the reality-check wrapper latches the first observation
/// it sees, which is the one sanctioned exception and is part of its
/// documented contract). All learning happens in `train`.
pub trait Agent {
    fn act(&mut self, obs: ObservationId) -> ActionId;
    fn train(&mut self, step: TrainStep);
}

/// Which behavior an [`AgentFactory`] builds.
#[derive(Clone, Debug, PartialEq)]
pub enum AgentKind {
    /// Always returns the fixed action, ignoring observations and training.
    Constant(ActionId),
    /// Uniform over the action space, keyed by the noise chain.
    Random,
    /// Tabular ε-greedy Q-learning.
    TabularQ,
    /// Returns action 1 exactly when its entire training history is the
    /// single step `(0, 1, 0.0, 0)` and the query observation is 0;
    /// otherwise action 0. A deliberately history-sensitive probe agent.
    PhantomDeviant,
    /// Reality-check wrapper around an inner blueprint; see
    /// [`crate::reality_check`].
    RealityCheck {
        inner: Box<AgentFactory>,
        /// Action to lock onto when the wrapper trips; `None` means
        /// "whatever the inner agent would have done at the first
        /// observation of the run".
        default_action: Option<ActionId>,
    },
}

impl AgentKind {
    /// Short stable name used in error messages.
    pub fn name(&self) -> &'static str {
        match self {
            AgentKind::Constant(_) => "constant",
            AgentKind::Random => "random",
            AgentKind::TabularQ => "q",
            AgentKind::PhantomDeviant => "phantom_deviant",
            AgentKind::RealityCheck { .. } => "rc",
        }
    }
}

/// Immutable blueprint from which any number of identical agent
/// instances can be created.
///
/// Extended environments receive the factory of the agent they are
/// evaluating and use it to build shadow instances.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentFactory {
    pub config: AgentConfig,
    pub kind: AgentKind,
}

impl AgentFactory {
    pub fn new(config: AgentConfig, kind: AgentKind) -> Self {
        AgentFactory { config, kind }
    }

    pub fn constant(action: u32, config: AgentConfig) -> Self {
        AgentFactory::new(config, AgentKind::Constant(ActionId(action)))
    }

    pub fn random(config: AgentConfig) -> Self {
        AgentFactory::new(config, AgentKind::Random)
    }

    pub fn tabular_q(config: AgentConfig) -> Self {
        AgentFactory::new(config, AgentKind::TabularQ)
    }

    pub fn phantom_deviant(config: AgentConfig) -> Self {
        AgentFactory::new(config, AgentKind::PhantomDeviant)
    }

    /// The same blueprint with every seed (outer and nested) replaced.
    pub fn with_seed(&self, seed: u64) -> AgentFactory {
        let mut f = self.clone();
        f.set_seed(seed);
        f
    }

    fn set_seed(&mut self, seed: u64) {
        self.config.seed = seed;
        if let AgentKind::RealityCheck { inner, .. } = &mut self.kind {
            inner.set_seed(seed);
        }
    }

    /// Build a fresh, untrained instance.
    pub fn create(&self) -> Box<dyn Agent> {
        match &self.kind {
            AgentKind::Constant(a) => Box::new(ConstantAgent { action: *a }),
            AgentKind::Random => Box::new(RandomAgent {
                action_count: self.config.action_count,
                train_counter: 0,
                noise_key: self.config.seed,
            }),
            AgentKind::TabularQ => Box::new(TabularQAgent::new(&self.config)),
            AgentKind::PhantomDeviant => {
                Box::new(PhantomDeviantAgent { steps_seen: 0, exactly_phantom: false })
            }
            AgentKind::RealityCheck { inner, default_action } => Box::new(
                crate::reality_check::RealityCheckAgent::new(inner.create(), *default_action),
            ),
        }
    }
}

/// Learning rate the factory's instances will train with.
///
/// Errors for kinds that have no learning rate (constant, random, and the
/// probe agent neither have nor use one). Reality-check factories answer
/// for their inner blueprint.
pub fn get_learning_rate(factory: &AgentFactory) -> Result<f64, ExtrlError> {
    match &factory.kind {
        AgentKind::TabularQ => Ok(factory.config.learning_rate.unwrap_or(DEFAULT_LEARNING_RATE)),
        AgentKind::RealityCheck { inner, .. } => get_learning_rate(inner),
        other => Err(ExtrlError::NoLearningRate(other.name())),
    }
}

/// A copy of the blueprint with the learning rate replaced.
///
/// Errors under the same conditions as [`get_learning_rate`], and for
/// non-finite or negative rates. Reality-check factories rewrite their
/// inner blueprint.
pub fn replace_learning_rate(
    factory: &AgentFactory,
    learning_rate: f64,
) -> Result<AgentFactory, ExtrlError> {
    if !learning_rate.is_finite() || learning_rate < 0.0 {
        return Err(ExtrlError::InvalidArg(format!(
            "learning rate must be finite and non-negative, got {learning_rate}"
        )));
    }
    match &factory.kind {
        AgentKind::TabularQ => {
            let mut f = factory.clone();
            f.config.learning_rate = Some(learning_rate);
            Ok(f)
        }
        AgentKind::RealityCheck { inner, default_action } => {
            let new_inner = replace_learning_rate(inner, learning_rate)?;
            Ok(AgentFactory {
                config: factory.config.clone(),
                kind: AgentKind::RealityCheck {
                    inner: Box::new(new_inner),
                    default_action: *default_action,
                },
            })
        }
        other => Err(ExtrlError::NoLearningRate(other.name())),
    }
}

/// Fold one training step into a noise key.
///
/// Identical histories produce identical keys; any difference in any
/// field of any step sends the chain down a different path.
fn fold_step(key: u64, step: &TrainStep) -> u64 {
    let mut k = key;
    k = mix64(k ^ step.o_prev.0 as u64);
    k = mix64(k ^ ((step.a.0 as u64) << 1 | 1));
    k = mix64(k ^ step.r.to_bits());
    k = mix64(k ^ ((step.o_next.0 as u64) << 1 | 1));
    k
}

struct ConstantAgent {
    action: ActionId,
}

impl Agent for ConstantAgent {
    fn act(&mut self, _obs: ObservationId) -> ActionId {
        self.action
    }

    fn train(&mut self, _step: TrainStep) {}
}

struct RandomAgent {
    action_count: u32,
    train_counter: u64,
    noise_key: u64,
}

impl Agent for RandomAgent {
    fn act(&mut self, obs: ObservationId) -> ActionId {
        let u = derive_random(self.noise_key, self.train_counter, obs);
        ActionId(((u * self.action_count as f64) as u32).min(self.action_count - 1))
    }

    fn train(&mut self, step: TrainStep) {
        self.noise_key = fold_step(self.noise_key, &step);
        self.train_counter += 1;
    }
}

/// Tabular ε-greedy Q-learner over flat observation/action tokens.
pub(crate) struct TabularQAgent {
    /// Action values, indexed `obs * action_count + action`.
    values: Vec<f64>,
    action_count: u32,
    learning_rate: f64,
    discount: f64,
    exploration: f64,
    train_counter: u64,
    noise_key: u64,
}

impl TabularQAgent {
    fn new(config: &AgentConfig) -> Self {
        let states = config.obs_count as usize * config.action_count as usize;
        TabularQAgent {
            values: vec![0.0; states],
            action_count: config.action_count,
            learning_rate: config.learning_rate.unwrap_or(DEFAULT_LEARNING_RATE),
            discount: config.discount.unwrap_or(DEFAULT_DISCOUNT),
            exploration: config.exploration.unwrap_or(DEFAULT_EXPLORATION),
            train_counter: 0,
            noise_key: config.seed,
        }
    }

    fn row(&self, obs: ObservationId) -> &[f64] {
        let base = obs.0 as usize * self.action_count as usize;
        &self.values[base..base + self.action_count as usize]
    }

    /// Greatest action value at `obs`.
    fn best_value(&self, obs: ObservationId) -> f64 {
        self.row(obs).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Argmax with ties broken toward the lowest action id.
    fn greedy(&self, obs: ObservationId) -> ActionId {
        let row = self.row(obs);
        let mut best = 0usize;
        for (i, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = i;
            }
        }
        ActionId(best as u32)
    }
}

impl Agent for TabularQAgent {
    fn act(&mut self, obs: ObservationId) -> ActionId {
        let u = derive_random(self.noise_key, self.train_counter, obs);
        if u < self.exploration {
            // Rescale the sub-ε mass to a uniform pick so one draw decides
            // both whether and where to explore.
            let pick = (u / self.exploration * self.action_count as f64) as u32;
            ActionId(pick.min(self.action_count - 1))
        } else {
            self.greedy(obs)
        }
    }

    fn train(&mut self, step: TrainStep) {
        let target = step.r + self.discount * self.best_value(step.o_next);
        let idx = step.o_prev.0 as usize * self.action_count as usize + step.a.0 as usize;
        self.values[idx] += self.learning_rate * (target - self.values[idx]);
        self.noise_key = fold_step(self.noise_key, &step);
        self.train_counter += 1;
    }
}

/// The single training step that flips the probe agent's answer.
pub(crate) const PHANTOM_STEP: TrainStep =
    TrainStep { o_prev: ObservationId(0), a: ActionId(1), r: 0.0, o_next: ObservationId(0) };

struct PhantomDeviantAgent {
    steps_seen: u64,
    exactly_phantom: bool,
}

impl Agent for PhantomDeviantAgent {
    fn act(&mut self, obs: ObservationId) -> ActionId {
        if self.exactly_phantom && obs == ObservationId(0) {
            ActionId(1)
        } else {
            ActionId(0)
        }
    }

    fn train(&mut self, step: TrainStep) {
        self.steps_seen += 1;
        self.exactly_phantom = self.steps_seen == 1 && step == PHANTOM_STEP;
    }
}
