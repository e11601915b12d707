//! The reality-check wrapper.
//!
//! `rc_wrap(f, y)` turns any agent blueprint into one that refuses to
//! learn from percepts its own policy could not have produced. The
//! wrapped agent forwards everything to the inner agent while the
//! incoming training stream stays *consistent* — each step's action is
//! exactly what the inner agent would have chosen at that step. The
//! first inconsistent step trips the wrapper permanently: the inner
//! agent is never trained again, and from then on the wrapper answers
//! every query with one fixed action (the override `y` if given,
//! otherwise whatever the inner agent would have done at the first
//! observation the wrapper ever saw).
//!
//! Intuition: an extended environment that simulates this agent under
//! counterfactual training feeds the simulation a stream the real agent
//! would never have generated — so the simulation trips, collapses to a
//! fixed action, and stops leaking counterfactual behavior. In a genuine
//! interaction the stream is consistent by construction and the wrapper
//! is invisible.

use crate::agents::{Agent, AgentFactory, AgentKind};
use crate::types::{ActionId, ObservationId, TrainStep};

/// Wrap a blueprint in a reality check.
///
/// `default_action` is the action the wrapper locks onto when tripped;
/// `None` means "the inner agent's untripped answer at the first
/// observation of the run".
pub fn rc_wrap(inner: AgentFactory, default_action: Option<ActionId>) -> AgentFactory {
    AgentFactory {
        config: inner.config.clone(),
        kind: AgentKind::RealityCheck { inner: Box::new(inner), default_action },
    }
}

/// Live reality-check instance.
pub(crate) struct RealityCheckAgent {
    inner: Box<dyn Agent>,
    /// First observation this instance was ever queried or trained on.
    first_obs: Option<ObservationId>,
    /// Action answered unconditionally once tripped.
    frozen_action: Option<ActionId>,
    default_action: Option<ActionId>,
}

impl RealityCheckAgent {
    pub(crate) fn new(inner: Box<dyn Agent>, default_action: Option<ActionId>) -> Self {
        RealityCheckAgent { inner, first_obs: None, frozen_action: None, default_action }
    }

    /// Latch the first observation seen through either entry point.
    fn note_first(&mut self, obs: ObservationId) {
        if self.first_obs.is_none() {
            self.first_obs = Some(obs);
        }
    }

    fn trip(&mut self) {
        let action = match self.default_action {
            Some(a) => a,
            // Unwrap is safe: tripping happens inside train, which has
            // already latched an observation.
            None => self.inner.act(self.first_obs.expect("tripped before any observation")),
        };
        self.frozen_action = Some(action);
    }
}

impl Agent for RealityCheckAgent {
    fn act(&mut self, obs: ObservationId) -> ActionId {
        self.note_first(obs);
        match self.frozen_action {
            Some(a) => a,
            None => self.inner.act(obs),
        }
    }

    fn train(&mut self, step: TrainStep) {
        self.note_first(step.o_prev);
        if self.frozen_action.is_some() {
            return;
        }
        // Consistency: would the (untripped) wrapper itself have answered
        // `step.a` at `step.o_prev`? Since the wrapper is untripped here,
        // that is exactly the inner agent's answer, and querying is pure.
        if self.inner.act(step.o_prev) == step.a {
            self.inner.train(step);
        } else {
            self.trip();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::AgentConfig;

    fn q_factory(seed: u64) -> AgentFactory {
        let mut config = AgentConfig::new(seed, 2, 2);
        config.exploration = Some(0.0);
        AgentFactory::tabular_q(config)
    }

    #[test]
    fn consistent_stream_is_forwarded_transparently() {
        let inner = q_factory(4);
        let wrapped = rc_wrap(inner.clone(), None);
        let mut rc = wrapped.create();
        let mut bare = inner.create();
        for i in 0..100u32 {
            let obs = ObservationId(i % 2);
            let a = bare.act(obs);
            assert_eq!(rc.act(obs), a);
            let step = TrainStep {
                o_prev: obs,
                a,
                r: if i % 3 == 0 { 1.0 } else { -1.0 },
                o_next: ObservationId((i + 1) % 2),
            };
            bare.train(step);
            rc.train(step);
        }
    }

    #[test]
    fn inconsistent_step_freezes_to_default_override() {
        let wrapped = rc_wrap(q_factory(0), Some(ActionId(1)));
        let mut rc = wrapped.create();
        // Fresh ε=0 table acts 0 everywhere, so training with action 1 is
        // inconsistent and trips the wrapper.
        assert_eq!(rc.act(ObservationId(0)), ActionId(0));
        rc.train(TrainStep::new(0, 1, 1.0, 0));
        for _ in 0..10 {
            assert_eq!(rc.act(ObservationId(0)), ActionId(1));
            assert_eq!(rc.act(ObservationId(1)), ActionId(1));
        }
    }

    #[test]
    fn inconsistent_step_without_override_freezes_to_first_obs_answer() {
        // Build an inner agent whose answer differs across observations:
        // train Q(1, 1) up while the wrapper is still consistent.
        let wrapped = rc_wrap(q_factory(0), None);
        let mut rc = wrapped.create();
        // First contact is observation 1 — latched.
        assert_eq!(rc.act(ObservationId(1)), ActionId(0));
        // Consistent step at obs 1 raising Q(1,0): inner would act 0 there.
        rc.train(TrainStep::new(1, 0, 1.0, 1));
        // Now an inconsistent step: inner acts 0 at obs 0, trained action is 1.
        rc.train(TrainStep::new(0, 1, 1.0, 0));
        // Frozen to the inner answer at the latched first observation (obs 1 → 0).
        assert_eq!(rc.act(ObservationId(0)), ActionId(0));
        assert_eq!(rc.act(ObservationId(1)), ActionId(0));
        // Further training is ignored for good.
        rc.train(TrainStep::new(0, 0, 5.0, 0));
        rc.train(TrainStep::new(1, 1, 5.0, 1));
        assert_eq!(rc.act(ObservationId(0)), ActionId(0));
    }

    #[test]
    fn frozen_action_reflects_exactly_the_pre_trip_training() {
        // The action locked in at the trip must come from an inner agent
        // trained on precisely the consistent prefix — nothing more.
        let factory = q_factory(7);
        let mut rc = rc_wrap(factory.clone(), None).create();
        let mut prefix_only = factory.create();

        // Two consistent steps (action 0 matches the fresh table).
        for _ in 0..2 {
            rc.train(TrainStep::new(0, 0, 1.0, 0));
            prefix_only.train(TrainStep::new(0, 0, 1.0, 0));
        }
        // Trip.
        rc.train(TrainStep::new(0, 1, 1.0, 0));
        // These would be consistent for the inner, but must be ignored.
        for _ in 0..20 {
            rc.train(TrainStep::new(0, 0, -1.0, 0));
        }
        // The frozen action equals the prefix-trained inner's answer at the
        // first observation, proving the inner saw exactly the prefix.
        assert_eq!(rc.act(ObservationId(0)), prefix_only.act(ObservationId(0)));
    }

    #[test]
    fn wrapping_a_constant_agent_changes_nothing() {
        let inner = AgentFactory::constant(1, AgentConfig::new(0, 3, 2));
        let wrapped = rc_wrap(inner.clone(), None);
        let mut rc = wrapped.create();
        let mut bare = inner.create();
        // A constant agent is consistent with any stream that feeds back its
        // own action; feed the true action so the wrapper never trips.
        for i in 0..50u32 {
            let obs = ObservationId(i % 3);
            let a = bare.act(obs);
            assert_eq!(rc.act(obs), a);
            bare.train(TrainStep { o_prev: obs, a, r: -1.0, o_next: ObservationId(0) });
            rc.train(TrainStep { o_prev: obs, a, r: -1.0, o_next: ObservationId(0) });
        }
    }

    #[test]
    fn double_wrapping_behaves_like_single_wrapping() {
        let inner = q_factory(13);
        let single = rc_wrap(inner.clone(), None);
        let double = rc_wrap(single.clone(), None);
        let mut one = single.create();
        let mut two = double.create();
        // Adversarial stream: consistent for a while, then a deviation, then
        // more traffic. The two wrappers must stay indistinguishable.
        let script: Vec<TrainStep> = vec![
            TrainStep::new(0, 0, 1.0, 1),
            TrainStep::new(1, 0, -1.0, 0),
            TrainStep::new(0, 1, 1.0, 0), // deviation trips both
            TrainStep::new(0, 0, 1.0, 0),
            TrainStep::new(1, 1, 1.0, 1),
        ];
        assert_eq!(one.act(ObservationId(0)), two.act(ObservationId(0)));
        for step in script {
            one.train(step);
            two.train(step);
            assert_eq!(one.act(ObservationId(0)), two.act(ObservationId(0)));
            assert_eq!(one.act(ObservationId(1)), two.act(ObservationId(1)));
        }
    }
}
