//! Core protocol types: observations, actions, percepts, training steps,
//! histories, and the record produced by an interaction run.
//!
//! The interaction protocol is turn-based. The environment emits a
//! [`Percept`] (reward plus observation), the agent answers with an
//! [`ActionId`], and after each exchange the agent is handed the full
//! transition as a [`TrainStep`]. Acting is a pure query; all learning
//! happens in `train`.

use crate::error::ExtrlError;

/// Discrete observation token. Values range over `0..obs_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObservationId(pub u32);

/// Discrete action token. Values range over `0..action_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

/// One environment emission: a real-valued reward paired with the next
/// observation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Percept {
    pub reward: f64,
    pub obs: ObservationId,
}

/// One complete transition, as delivered to an agent's `train`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainStep {
    pub o_prev: ObservationId,
    pub a: ActionId,
    pub r: f64,
    pub o_next: ObservationId,
}

impl TrainStep {
    pub fn new(o_prev: u32, a: u32, r: f64, o_next: u32) -> Self {
        TrainStep {
            o_prev: ObservationId(o_prev),
            a: ActionId(a),
            r,
            o_next: ObservationId(o_next),
        }
    }
}

/// Blueprint parameters shared by all agent kinds.
///
/// The three learning parameters are optional; kinds that do not learn
/// leave them unset, and the Q-learner falls back to crate defaults for
/// any that are absent.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentConfig {
    pub seed: u64,
    pub action_count: u32,
    pub obs_count: u32,
    pub learning_rate: Option<f64>,
    pub exploration: Option<f64>,
    pub discount: Option<f64>,
}

impl AgentConfig {
    /// Config with the given spaces and seed and no learning parameters.
    pub fn new(seed: u64, obs_count: u32, action_count: u32) -> Self {
        AgentConfig {
            seed,
            action_count,
            obs_count,
            learning_rate: None,
            exploration: None,
            discount: None,
        }
    }
}

/// An alternating sequence `x₁ y₁ x₂ y₂ … xₙ` of percepts and actions
/// that starts and ends with a percept.
///
/// The representation stores percepts and actions separately with the
/// invariant `percepts.len() == actions.len() + 1`, which makes strict
/// alternation and the odd total length structural rather than checked.
#[derive(Clone, Debug, PartialEq)]
pub struct History {
    percepts: Vec<Percept>,
    actions: Vec<ActionId>,
}

impl History {
    /// A minimal history: a single initial percept.
    pub fn new(first: Percept) -> Self {
        History { percepts: vec![first], actions: Vec::new() }
    }

    /// Extend with one action/percept exchange.
    pub fn push(&mut self, action: ActionId, percept: Percept) {
        self.actions.push(action);
        self.percepts.push(percept);
    }

    pub fn percepts(&self) -> &[Percept] {
        &self.percepts
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    /// Number of percepts (one more than the number of actions).
    pub fn turns(&self) -> usize {
        self.percepts.len()
    }

    /// The percept-terminated prefix containing `turns` percepts.
    ///
    /// `turns` must be in `1..=self.turns()`.
    pub fn prefix(&self, turns: usize) -> History {
        assert!(
            (1..=self.turns()).contains(&turns),
            "prefix of {turns} turns from a {}-turn history",
            self.turns()
        );
        History {
            percepts: self.percepts[..turns].to_vec(),
            actions: self.actions[..turns - 1].to_vec(),
        }
    }

    /// The transitions replayed when feeding this history to an agent:
    /// `(xᵢ.obs, yᵢ, xᵢ₊₁.reward, xᵢ₊₁.obs)` for each action `yᵢ`.
    pub fn transitions(&self) -> impl Iterator<Item = TrainStep> + '_ {
        self.actions.iter().enumerate().map(|(i, &a)| TrainStep {
            o_prev: self.percepts[i].obs,
            a,
            r: self.percepts[i + 1].reward,
            o_next: self.percepts[i + 1].obs,
        })
    }

    /// Observation of the final percept.
    pub fn last_obs(&self) -> ObservationId {
        self.percepts[self.percepts.len() - 1].obs
    }
}

/// Everything produced by one interaction run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub history: History,
    /// Reward of each post-initial percept, in order; length equals `steps`.
    pub per_step_rewards: Vec<f64>,
    pub total_reward: f64,
    pub mean_reward_per_turn: f64,
    pub steps: u64,
    pub seed: u64,
}

/// A live environment instance mid-interaction.
///
/// `start` is called exactly once and yields the initial observation;
/// every subsequent exchange goes through `step`. Implementations must be
/// pure functions of (construction inputs, call sequence) — all randomness
/// comes from counter-based draws on explicit seeds.
pub trait ExtendedEnv {
    /// Begin the interaction; returns the initial observation `x₁.obs`.
    fn start(&mut self) -> ObservationId;

    /// Consume one action and emit the next percept.
    fn step(&mut self, action: ActionId) -> Percept;

    /// True when the most recent `step` closed a control-task episode.
    /// Environments without episode structure always answer false.
    fn episode_ended(&self) -> bool {
        false
    }
}

/// Check that an emitted token lies inside a declared space.
pub(crate) fn check_token(value: u32, count: u32, what: &'static str) -> Result<(), ExtrlError> {
    if value < count {
        Ok(())
    } else {
        Err(ExtrlError::SpaceMismatch { what, value, count })
    }
}
