//! The extended environments.
//!
//! Each environment here exercises a different counterfactual power over
//! the agent it evaluates: replaying history backwards, training shadow
//! copies on altered data, probing hypothetical actions, or pitting the
//! agent against a copy of itself. All of them reward with values in
//! {−1, 0, +1} and are deterministic given their construction inputs.
//!
//! Four of them — `ignore_rewards`, `tempting_button`,
//! `incentivize_learning_rate`, `self_recognition` — are *adaptable*:
//! their per-step work splits into a reward phase that only queries the
//! shadow sim and a train phase that only feeds it, which is what lets
//! [`crate::combine`] graft them onto a control task. The rest need
//! powers that do not fit that split (rebuilding fresh sims every step,
//! training on reversed or truncated history) and can only run
//! standalone.

mod adaptable;
mod adversarial;
mod fixture;
mod replay;

pub use adaptable::{
    IgnoreRewards, IncentivizeLearningRate, SelfRecognition, StandaloneAdaptable, TemptingButton,
};
pub use adversarial::AdversarialSequencePredictor;
pub use fixture::StartupProbe;
pub use replay::{FalseMemories, LimitedMemory, ReverseHistory};

use crate::agents::AgentFactory;
use crate::cartpole::{CartPoleEnv, CARTPOLE_ACTIONS, CARTPOLE_TOKENS};
use crate::combine::{AdaptableEnv, CombinedEnv};
use crate::error::ExtrlError;
use crate::types::{ExtendedEnv, TrainStep};

/// Number of distinct subjects the self-recognition environment makes
/// statements about.
pub const SELF_RECOGNITION_SUBJECTS: u32 = 4;

/// Which environment an [`EnvFactory`] builds.
#[derive(Clone, Debug, PartialEq)]
pub enum EnvKind {
    /// Rewards acting identically under true-reward and zero-reward training.
    IgnoreRewards,
    /// A button that pays +1 to push but −1 whenever a would-be pusher is
    /// shown no button.
    TemptingButton,
    /// Rewards agents that treat their history the same read backwards.
    ReverseHistory,
    /// Rewards agents that behave like a half-learning-rate copy of
    /// themselves.
    IncentivizeLearningRate,
    /// Asks the agent true/false questions about its own policy.
    SelfRecognition,
    /// Judges the agent by a copy that only remembers the last `window`
    /// steps.
    LimitedMemory { window: usize },
    /// Judges the agent by a copy pre-trained on fabricated steps.
    FalseMemories { phantom: Vec<TrainStep> },
    /// Pays for evading a predictor that is a copy of the agent itself.
    AdversarialSequencePredictor,
    /// Pays once, at the first step, according to what a copy trained on a
    /// single phantom step would do.
    StartupProbe,
    /// The plain cart-pole control task (not extended; no shadow copies).
    CartPole,
    /// Cart-pole combined with an adaptable extended environment.
    Combined { e: Box<EnvKind> },
}

/// Blueprint from which environment instances are created.
///
/// `action_count` sizes the action space of the environments that adapt
/// to the agent's space; environments with intrinsic spaces (cart-pole)
/// ignore it. The default of 2 matches every registry name.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvFactory {
    pub kind: EnvKind,
    pub action_count: u32,
}

impl EnvFactory {
    pub fn new(kind: EnvKind) -> Self {
        EnvFactory { kind, action_count: 2 }
    }

    /// Observation and action space of the environments this factory
    /// builds, as `(obs_count, action_count)`.
    pub fn spaces(&self) -> (u32, u32) {
        let n = self.action_count;
        match &self.kind {
            EnvKind::IgnoreRewards => (1, n),
            EnvKind::TemptingButton => (2, n),
            EnvKind::ReverseHistory => (1, n),
            EnvKind::IncentivizeLearningRate => (1, n),
            EnvKind::SelfRecognition => (SELF_RECOGNITION_SUBJECTS * n, n),
            EnvKind::LimitedMemory { .. } => (1, n),
            EnvKind::FalseMemories { .. } => (1, n),
            EnvKind::AdversarialSequencePredictor => (4, 2),
            EnvKind::StartupProbe => (1, 2),
            EnvKind::CartPole => (CARTPOLE_TOKENS, CARTPOLE_ACTIONS),
            EnvKind::Combined { e } => {
                let inner = EnvFactory { kind: (**e).clone(), action_count: self.action_count };
                let (eo, ea) = inner.spaces();
                (CARTPOLE_TOKENS * eo, CARTPOLE_ACTIONS * ea)
            }
        }
    }

    /// Build the adaptable core for kinds that have one.
    fn adaptable_core(&self, env_seed: u64) -> Option<Box<dyn AdaptableEnv>> {
        let n = self.action_count;
        match &self.kind {
            EnvKind::IgnoreRewards => Some(Box::new(IgnoreRewards::new(n))),
            EnvKind::TemptingButton => Some(Box::new(TemptingButton::new(n, env_seed))),
            EnvKind::IncentivizeLearningRate => Some(Box::new(IncentivizeLearningRate::new(n))),
            EnvKind::SelfRecognition => Some(Box::new(SelfRecognition::new(n, env_seed))),
            _ => None,
        }
    }

    /// Create a live environment evaluating agents built by `agent`.
    ///
    /// `agent` must already carry the seed of the run — shadow copies are
    /// built from it verbatim, which is what keeps them synchronized with
    /// the true agent. `env_seed` drives the environment's own draws
    /// (observation streams, episode resets).
    pub fn instantiate(
        &self,
        agent: &AgentFactory,
        env_seed: u64,
    ) -> Result<Box<dyn ExtendedEnv>, ExtrlError> {
        if self.action_count < 2 {
            return Err(ExtrlError::InvalidArg(format!(
                "environments need at least 2 actions, got {}",
                self.action_count
            )));
        }
        if let Some(core) = self.adaptable_core(env_seed) {
            return Ok(Box::new(StandaloneAdaptable::new(core, agent)?));
        }
        match &self.kind {
            EnvKind::ReverseHistory => Ok(Box::new(ReverseHistory::new(agent.clone()))),
            EnvKind::LimitedMemory { window } => {
                Ok(Box::new(LimitedMemory::new(agent.clone(), *window)))
            }
            EnvKind::FalseMemories { phantom } => {
                Ok(Box::new(FalseMemories::new(agent, phantom.clone())))
            }
            EnvKind::AdversarialSequencePredictor => {
                Ok(Box::new(AdversarialSequencePredictor::new(agent)?))
            }
            EnvKind::StartupProbe => Ok(Box::new(StartupProbe::new(agent.clone()))),
            EnvKind::CartPole => Ok(Box::new(CartPoleEnv::new(env_seed))),
            EnvKind::Combined { e } => {
                let inner = EnvFactory { kind: (**e).clone(), action_count: self.action_count };
                let core = inner
                    .adaptable_core(env_seed)
                    .ok_or_else(|| ExtrlError::NotAdaptable(format!("{:?}", e)))?;
                Ok(Box::new(CombinedEnv::new(core, agent, env_seed)?))
            }
            // Adaptable kinds were handled above.
            _ => unreachable!("adaptable kind fell through"),
        }
    }
}
