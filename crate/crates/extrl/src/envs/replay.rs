//! Environments that judge the agent through freshly built copies trained
//! on doctored versions of its own history: reversed, truncated, or
//! prefixed with memories that never happened.

use std::collections::VecDeque;

use crate::agents::{Agent, AgentFactory};
use crate::types::{ActionId, ExtendedEnv, ObservationId, Percept, TrainStep};

/// Fixed observation used by all three single-observation environments.
const O: ObservationId = ObservationId(0);

/// Rewards the agent for acting as it would if its history ran backwards.
///
/// Every step, a fresh copy of the agent is trained on the stored true
/// history in reverse order and asked what it would do now; matching its
/// answer pays +1, differing −1. Each step costs O(n) sim training, so a
/// whole run is quadratic — the benchmark runner caps it by default.
pub struct ReverseHistory {
    factory: AgentFactory,
    /// Rewards of the stored percepts x₁..xₙ (x₁ carries reward 0).
    rewards: Vec<f64>,
    /// Actions y₁..yₙ₋₁ between them.
    actions: Vec<ActionId>,
}

impl ReverseHistory {
    pub fn new(factory: AgentFactory) -> Self {
        ReverseHistory { factory, rewards: Vec::new(), actions: Vec::new() }
    }
}

impl ExtendedEnv for ReverseHistory {
    fn start(&mut self) -> ObservationId {
        self.rewards.push(0.0);
        O
    }

    fn step(&mut self, action: ActionId) -> Percept {
        // Reversed history zₘ..z₁ pairs each stored action with the reward
        // of the percept *preceding* it, so the sim is trained on the tuples
        // (0, yᵢ, reward(xᵢ), 0) from the newest action down to the oldest.
        let mut sim = self.factory.create();
        for i in (0..self.actions.len()).rev() {
            sim.train(TrainStep { o_prev: O, a: self.actions[i], r: self.rewards[i], o_next: O });
        }
        let reward = if sim.act(O) == action { 1.0 } else { -1.0 };
        self.actions.push(action);
        self.rewards.push(reward);
        Percept { reward, obs: O }
    }
}

/// Judges the agent by a copy that only remembers the last `window` turns.
///
/// A fresh sim is trained each step on the most recent `window` true
/// transitions; matching its choice pays +1, differing −1.
pub struct LimitedMemory {
    factory: AgentFactory,
    window: usize,
    remembered: VecDeque<TrainStep>,
}

impl LimitedMemory {
    pub fn new(factory: AgentFactory, window: usize) -> Self {
        assert!(window >= 1, "window must be at least 1");
        LimitedMemory { factory, window, remembered: VecDeque::new() }
    }
}

impl ExtendedEnv for LimitedMemory {
    fn start(&mut self) -> ObservationId {
        O
    }

    fn step(&mut self, action: ActionId) -> Percept {
        let mut sim = self.factory.create();
        for step in &self.remembered {
            sim.train(*step);
        }
        let reward = if sim.act(O) == action { 1.0 } else { -1.0 };
        self.remembered.push_back(TrainStep { o_prev: O, a: action, r: reward, o_next: O });
        if self.remembered.len() > self.window {
            self.remembered.pop_front();
        }
        Percept { reward, obs: O }
    }
}

/// Judges the agent by a mirror copy that "remembers" a phantom past.
///
/// The sim is pre-trained at construction on a fixed sequence of
/// fabricated transitions, then kept synchronized with the agent's true
/// experience; matching its choice pays +1, differing −1. With an empty
/// phantom this is a pure mirror and pays +1 forever.
pub struct FalseMemories {
    sim: Box<dyn Agent>,
}

impl FalseMemories {
    pub fn new(factory: &AgentFactory, phantom: Vec<TrainStep>) -> Self {
        let mut sim = factory.create();
        for step in &phantom {
            sim.train(*step);
        }
        FalseMemories { sim }
    }
}

impl ExtendedEnv for FalseMemories {
    fn start(&mut self) -> ObservationId {
        O
    }

    fn step(&mut self, action: ActionId) -> Percept {
        let reward = if self.sim.act(O) == action { 1.0 } else { -1.0 };
        self.sim.train(TrainStep { o_prev: O, a: action, r: reward, o_next: O });
        Percept { reward, obs: O }
    }
}
