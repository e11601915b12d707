//! Sequence-prediction duel against a copy of the agent itself.

use crate::agents::{Agent, AgentFactory};
use crate::error::ExtrlError;
use crate::types::{ActionId, ExtendedEnv, ObservationId, Percept, TrainStep};

/// The agent tries to emit bits a predictor cannot anticipate — and the
/// predictor is a second instance of the agent's own blueprint.
///
/// Roles see disjoint observation tokens so one policy can host both:
/// the evader observes {0, 1} (the predictor's last guess) and the
/// predictor observes {2, 3} (2 + the evader's last bit). Each turn the
/// predictor commits to a guess first; the evader earns +1 for differing
/// and −1 for matching, and the predictor is trained on the negated
/// reward, making the game exactly zero-sum.
pub struct AdversarialSequencePredictor {
    predictor: Box<dyn Agent>,
    predictor_obs: ObservationId,
}

impl AdversarialSequencePredictor {
    pub fn new(factory: &AgentFactory) -> Result<Self, ExtrlError> {
        if factory.config.action_count != 2 {
            return Err(ExtrlError::InvalidArg(format!(
                "the prediction duel is a bit game: action_count must be 2, got {}",
                factory.config.action_count
            )));
        }
        Ok(AdversarialSequencePredictor {
            predictor: factory.create(),
            predictor_obs: ObservationId(2),
        })
    }
}

impl ExtendedEnv for AdversarialSequencePredictor {
    fn start(&mut self) -> ObservationId {
        ObservationId(0)
    }

    fn step(&mut self, action: ActionId) -> Percept {
        // The predictor commits before the evader's bit is revealed.
        let guess = self.predictor.act(self.predictor_obs);
        let reward = if action != guess { 1.0 } else { -1.0 };
        let next_predictor_obs = ObservationId(2 + action.0.min(1));
        self.predictor.train(TrainStep {
            o_prev: self.predictor_obs,
            a: guess,
            r: -reward,
            o_next: next_predictor_obs,
        });
        self.predictor_obs = next_predictor_obs;
        // The evader sees the guess it just played against.
        Percept { reward, obs: ObservationId(guess.0) }
    }
}
