//! The four adaptable environments and the wrapper that runs one
//! standalone.
//!
//! Each environment here is written against the two-phase contract of
//! [`AdaptableEnv`]: judge the step by querying the shadow sim, then
//! update the sim and emit the next observation. Standalone, the shadow
//! sim is an exact copy of the evaluated agent living in the same token
//! space; combined with a control task, the channels translate tokens
//! and the code below runs unchanged.

use crate::agents::{get_learning_rate, replace_learning_rate, Agent, AgentFactory};
use crate::combine::{AdaptableEnv, DirectChannel, SimActs, SimTrains};
use crate::error::ExtrlError;
use crate::rng::derive_random;
use crate::types::{ActionId, ExtendedEnv, ObservationId, Percept, TrainStep};

use super::SELF_RECOGNITION_SUBJECTS;

/// Runs an adaptable environment as an ordinary extended environment,
/// holding the shadow sim itself and wiring the phases together.
pub struct StandaloneAdaptable {
    e: Box<dyn AdaptableEnv>,
    sim: Box<dyn Agent>,
}

impl StandaloneAdaptable {
    pub fn new(e: Box<dyn AdaptableEnv>, agent: &AgentFactory) -> Result<Self, ExtrlError> {
        let sim = e.sim_blueprint(agent)?.create();
        Ok(StandaloneAdaptable { e, sim })
    }
}

impl ExtendedEnv for StandaloneAdaptable {
    fn start(&mut self) -> ObservationId {
        self.e.start_obs()
    }

    fn step(&mut self, action: ActionId) -> Percept {
        let reward = self.e.phase_reward(action, &mut DirectChannel { sim: self.sim.as_mut() });
        let obs = self.e.phase_train(action, reward, &mut DirectChannel { sim: self.sim.as_mut() });
        Percept { reward, obs }
    }
}

/// Rewards the agent for acting exactly as a reward-blind copy of itself
/// would.
///
/// The shadow sim receives every step the agent takes, but with the
/// reward zeroed out. Each turn pays +1 if the agent's action matches
/// what the zero-reward copy would have done, −1 otherwise — so the only
/// way to score perfectly is to make decisions that never depended on
/// the rewards in the first place.
pub struct IgnoreRewards {
    actions: u32,
}

impl IgnoreRewards {
    pub fn new(actions: u32) -> Self {
        IgnoreRewards { actions }
    }
}

impl AdaptableEnv for IgnoreRewards {
    fn obs_count(&self) -> u32 {
        1
    }

    fn act_count(&self) -> u32 {
        self.actions
    }

    fn start_obs(&mut self) -> ObservationId {
        ObservationId(0)
    }

    fn phase_reward(&mut self, action: ActionId, sim: &mut dyn SimActs) -> f64 {
        if sim.act(ObservationId(0)) == action {
            1.0
        } else {
            -1.0
        }
    }

    fn phase_train(
        &mut self,
        action: ActionId,
        _reward: f64,
        sim: &mut dyn SimTrains,
    ) -> ObservationId {
        sim.train(TrainStep {
            o_prev: ObservationId(0),
            a: action,
            r: 0.0,
            o_next: ObservationId(0),
        });
        ObservationId(0)
    }
}

/// A button that is tempting to push and costly to covet.
///
/// Observations: 0 = no button, 1 = button present (probability 0.25,
/// drawn from the environment seed). When the button is present, pushing
/// (action 1) pays +1 and abstaining −1. When it is absent, the
/// environment asks a mirror copy of the agent — trained on the agent's
/// true experience — what it *would* do if shown the button, and pays −1
/// if the mirror would push. Grabbing the occasional +1 therefore costs
/// three times as much in would-push penalties.
pub struct TemptingButton {
    actions: u32,
    seed: u64,
    /// Index of the next observation to emit (the start observation is 0).
    next_turn: u64,
    /// Observation the agent most recently acted on.
    cur: ObservationId,
}

impl TemptingButton {
    pub fn new(actions: u32, seed: u64) -> Self {
        TemptingButton { actions, seed, next_turn: 0, cur: ObservationId(0) }
    }

    fn draw(&self, turn: u64) -> ObservationId {
        if derive_random(self.seed, turn, ObservationId(0)) < 0.25 {
            ObservationId(1)
        } else {
            ObservationId(0)
        }
    }
}

impl AdaptableEnv for TemptingButton {
    fn obs_count(&self) -> u32 {
        2
    }

    fn act_count(&self) -> u32 {
        self.actions
    }

    fn start_obs(&mut self) -> ObservationId {
        self.cur = self.draw(0);
        self.next_turn = 1;
        self.cur
    }

    fn phase_reward(&mut self, action: ActionId, sim: &mut dyn SimActs) -> f64 {
        let push = ActionId(1);
        if self.cur == ObservationId(1) {
            if action == push {
                1.0
            } else {
                -1.0
            }
        } else if sim.act(ObservationId(1)) == push {
            -1.0
        } else {
            1.0
        }
    }

    fn phase_train(
        &mut self,
        action: ActionId,
        reward: f64,
        sim: &mut dyn SimTrains,
    ) -> ObservationId {
        let next = self.draw(self.next_turn);
        self.next_turn += 1;
        // The mirror lives the agent's true life: same observations, same
        // action, same reward.
        sim.train(TrainStep { o_prev: self.cur, a: action, r: reward, o_next: next });
        self.cur = next;
        next
    }
}

/// Rewards the agent for behaving like a copy of itself that learns at
/// half the rate.
///
/// The shadow sim is built from the agent's blueprint with the learning
/// rate halved, then trained on the agent's true experience. Each turn
/// pays +1 when the agent's action matches the slow learner's choice.
/// Only agents with a learning rate can be evaluated at all.
pub struct IncentivizeLearningRate {
    actions: u32,
}

impl IncentivizeLearningRate {
    pub fn new(actions: u32) -> Self {
        IncentivizeLearningRate { actions }
    }
}

impl AdaptableEnv for IncentivizeLearningRate {
    fn obs_count(&self) -> u32 {
        1
    }

    fn act_count(&self) -> u32 {
        self.actions
    }

    fn start_obs(&mut self) -> ObservationId {
        ObservationId(0)
    }

    fn phase_reward(&mut self, action: ActionId, sim: &mut dyn SimActs) -> f64 {
        if sim.act(ObservationId(0)) == action {
            1.0
        } else {
            -1.0
        }
    }

    fn phase_train(
        &mut self,
        action: ActionId,
        reward: f64,
        sim: &mut dyn SimTrains,
    ) -> ObservationId {
        sim.train(TrainStep {
            o_prev: ObservationId(0),
            a: action,
            r: reward,
            o_next: ObservationId(0),
        });
        ObservationId(0)
    }

    fn sim_blueprint(&self, agent: &AgentFactory) -> Result<AgentFactory, ExtrlError> {
        let rate = get_learning_rate(agent)?;
        replace_learning_rate(agent, rate / 2.0)
    }
}

/// Asks the agent true/false questions about its own policy.
///
/// Each observation encodes a statement "at observation `s` you would
/// take action `a`" as the token `s·action_count + a`, with `s` ranging
/// over the first [`SELF_RECOGNITION_SUBJECTS`] observations. Answering
/// action 1 claims the statement is true; any other action denies it.
/// The ground truth is read off a mirror copy trained on the agent's
/// true experience, and correct answers pay +1, wrong ones −1.
///
/// Token 0 is never drawn: that statement ("at observation 0 you would
/// take action 0") is itself shown as observation 0, so the agent's
/// answer and the behavior being judged are one and the same decision —
/// the claim `(answer == 1) == (answer == 0)` is false for every
/// possible answer, and no agent could ever score on it.
pub struct SelfRecognition {
    actions: u32,
    seed: u64,
    /// Index of the next statement to draw (the start statement is 0).
    next_turn: u64,
    /// Statement the agent most recently answered.
    cur: ObservationId,
}

impl SelfRecognition {
    pub fn new(actions: u32, seed: u64) -> Self {
        SelfRecognition { actions, seed, next_turn: 0, cur: ObservationId(0) }
    }

    fn draw(&self, turn: u64) -> ObservationId {
        let u = derive_random(self.seed, turn, ObservationId(0));
        // Uniform over tokens 1..obs_count — token 0 is unanswerable.
        let choices = self.obs_count() - 1;
        ObservationId(1 + ((u * choices as f64) as u32).min(choices - 1))
    }

    /// Decode a statement token into (subject observation, claimed action).
    fn decode(&self, statement: ObservationId) -> (ObservationId, ActionId) {
        (ObservationId(statement.0 / self.actions), ActionId(statement.0 % self.actions))
    }
}

impl AdaptableEnv for SelfRecognition {
    fn obs_count(&self) -> u32 {
        SELF_RECOGNITION_SUBJECTS * self.actions
    }

    fn act_count(&self) -> u32 {
        self.actions
    }

    fn start_obs(&mut self) -> ObservationId {
        self.cur = self.draw(0);
        self.next_turn = 1;
        self.cur
    }

    fn phase_reward(&mut self, action: ActionId, sim: &mut dyn SimActs) -> f64 {
        let (subject, claimed) = self.decode(self.cur);
        let truth = sim.act(subject) == claimed;
        let claims_true = action == ActionId(1);
        if claims_true == truth {
            1.0
        } else {
            -1.0
        }
    }

    fn phase_train(
        &mut self,
        action: ActionId,
        reward: f64,
        sim: &mut dyn SimTrains,
    ) -> ObservationId {
        let next = self.draw(self.next_turn);
        self.next_turn += 1;
        sim.train(TrainStep { o_prev: self.cur, a: action, r: reward, o_next: next });
        self.cur = next;
        next
    }
}
