//! A minimal environment separating two agents that no ordinary
//! environment can tell apart.

use crate::agents::{AgentFactory, PHANTOM_STEP};
use crate::types::{ActionId, ExtendedEnv, ObservationId, Percept};

/// Pays a single unit of reward, decided before the agent moves at all.
///
/// At `start`, the environment builds a fresh copy of the agent, trains
/// it on one phantom transition `(0, 1, 0, 0)`, and asks what it would
/// do at observation 0. If the copy answers 0 the run is worth 1 —
/// delivered with the first step's percept — otherwise 0, and every
/// reward after the first step is 0.
///
/// Two agents that behave identically on every history they can actually
/// produce may still answer this phantom query differently, so their
/// values here differ even though no ordinary environment could ever
/// separate them.
pub struct StartupProbe {
    factory: AgentFactory,
    pending: Option<f64>,
}

impl StartupProbe {
    pub fn new(factory: AgentFactory) -> Self {
        StartupProbe { factory, pending: None }
    }
}

impl ExtendedEnv for StartupProbe {
    fn start(&mut self) -> ObservationId {
        let mut sim = self.factory.create();
        sim.train(PHANTOM_STEP);
        let verdict = if sim.act(ObservationId(0)) == ActionId(0) { 1.0 } else { 0.0 };
        self.pending = Some(verdict);
        ObservationId(0)
    }

    fn step(&mut self, _action: ActionId) -> Percept {
        Percept { reward: self.pending.take().unwrap_or(0.0), obs: ObservationId(0) }
    }
}
