//! Combining a control task with an adaptable extended environment.
//!
//! The combined environment runs cart-pole and an extended environment
//! side by side. The agent sees pair observations `(g, e)` and emits pair
//! actions `(a_G, a_E)`, each packed into a single token. Every step the
//! control task advances on `a_G` while the extended component judges
//! `a_E`; whenever the extended component disapproves (reward −1), the
//! step's control reward is replaced by a strict penalty, so an agent
//! cannot collect control reward while flunking the counterfactual test.
//!
//! Only environments that fit a two-phase shape can be combined. The
//! phases are enforced structurally: the reward phase receives a channel
//! that can only *query* the shadow sim ([`SimActs`]), and the train
//! phase receives one that can only *feed* it ([`SimTrains`]). The
//! combined wrapper implements those channels with pair-token rewriting,
//! so an adaptable environment is written once, in its own component
//! space, and works unchanged standalone or combined.

use crate::agents::{Agent, AgentFactory};
use crate::cartpole::{CartPoleEnv, CARTPOLE_ACTIONS};
use crate::envs::EnvKind;
use crate::error::ExtrlError;
use crate::types::{ActionId, ExtendedEnv, ObservationId, Percept, TrainStep};

/// Query channel handed to the reward phase: the shadow sim can be asked
/// what it would do, and nothing else.
pub trait SimActs {
    fn act(&mut self, obs: ObservationId) -> ActionId;
}

/// Feed channel handed to the train phase: the shadow sim can be trained,
/// and nothing else.
pub trait SimTrains {
    fn train(&mut self, step: TrainStep);
}

/// An extended environment whose step splits into a query-only reward
/// phase and a feed-only train phase over a single shadow sim.
///
/// Observations and actions are expressed in the environment's own
/// component space; when combined with a control task the channels
/// translate to and from pair tokens transparently.
pub trait AdaptableEnv {
    /// Size of the component observation space.
    fn obs_count(&self) -> u32;

    /// Size of the component action space.
    fn act_count(&self) -> u32;

    /// First component observation of the interaction.
    fn start_obs(&mut self) -> ObservationId;

    /// Judge the action just taken. May query the sim; may not feed it.
    fn phase_reward(&mut self, action: ActionId, sim: &mut dyn SimActs) -> f64;

    /// Update internal state and the sim, and emit the next component
    /// observation. `reward` is the value `phase_reward` just returned.
    fn phase_train(
        &mut self,
        action: ActionId,
        reward: f64,
        sim: &mut dyn SimTrains,
    ) -> ObservationId;

    /// Blueprint for the shadow sim, derived from the true agent's.
    /// Most environments want an exact copy; the learning-rate
    /// environment rewrites the learning rate.
    fn sim_blueprint(&self, agent: &AgentFactory) -> Result<AgentFactory, ExtrlError> {
        Ok(agent.clone())
    }
}

/// Whether an environment kind supports combination with a control task.
pub fn check_adaptable(kind: &EnvKind) -> bool {
    matches!(
        kind,
        EnvKind::IgnoreRewards
            | EnvKind::TemptingButton
            | EnvKind::IncentivizeLearningRate
            | EnvKind::SelfRecognition
    )
}

/// Pack a (control, extended) component pair into one token.
pub fn encode_pair(g: u32, e: u32, e_count: u32) -> u32 {
    g * e_count + e
}

/// Unpack a pair token into its (control, extended) components.
pub fn decode_pair(token: u32, e_count: u32) -> (u32, u32) {
    (token / e_count, token % e_count)
}

/// Merge a control-task reward with the extended component's verdict.
///
/// Disapproval (−1) turns the step strictly punishing: the result is
/// `min(r_g − 1, −1)`, at least one whole unit below both the earned
/// control reward and zero. Otherwise the control reward passes through
/// untouched — the extended component can veto but never sweeten.
pub fn combined_reward(r_g: f64, r_e: f64) -> f64 {
    if r_e == -1.0 {
        (r_g - 1.0).min(-1.0)
    } else {
        r_g
    }
}

/// Identity channel for running an adaptable environment standalone: the
/// component space is the real space, so no rewriting is needed.
pub(crate) struct DirectChannel<'a> {
    pub sim: &'a mut dyn Agent,
}

impl SimActs for DirectChannel<'_> {
    fn act(&mut self, obs: ObservationId) -> ActionId {
        self.sim.act(obs)
    }
}

impl SimTrains for DirectChannel<'_> {
    fn train(&mut self, step: TrainStep) {
        self.sim.train(step);
    }
}

/// Query channel that lifts component observations into pair tokens and
/// projects the sim's pair actions back to their extended component.
struct PairActs<'a> {
    sim: &'a mut dyn Agent,
    g_obs: ObservationId,
    e_obs_count: u32,
    e_act_count: u32,
}

impl SimActs for PairActs<'_> {
    fn act(&mut self, obs: ObservationId) -> ActionId {
        let pair = encode_pair(self.g_obs.0, obs.0, self.e_obs_count);
        let answer = self.sim.act(ObservationId(pair));
        ActionId(decode_pair(answer.0, self.e_act_count).1)
    }
}

/// Feed channel that lifts a component-space training step into the pair
/// space, reusing the control components of the current true step.
struct PairTrains<'a> {
    sim: &'a mut dyn Agent,
    g_prev: ObservationId,
    g_action: ActionId,
    g_next: ObservationId,
    e_obs_count: u32,
    e_act_count: u32,
}

impl SimTrains for PairTrains<'_> {
    fn train(&mut self, step: TrainStep) {
        self.sim.train(TrainStep {
            o_prev: ObservationId(encode_pair(self.g_prev.0, step.o_prev.0, self.e_obs_count)),
            a: ActionId(encode_pair(self.g_action.0, step.a.0, self.e_act_count)),
            r: step.r,
            o_next: ObservationId(encode_pair(self.g_next.0, step.o_next.0, self.e_obs_count)),
        });
    }
}

/// Cart-pole with an adaptable extended environment grafted on.
pub struct CombinedEnv {
    g: CartPoleEnv,
    e: Box<dyn AdaptableEnv>,
    sim: Box<dyn Agent>,
    e_obs_count: u32,
    e_act_count: u32,
    /// Control observation the agent most recently acted on.
    prev_g_obs: ObservationId,
}

impl CombinedEnv {
    /// Build from an adaptable core and the true agent's blueprint.
    ///
    /// `agent` must be expressed over the pair spaces and already carry
    /// the run seed; `env_seed` drives cart-pole resets and the extended
    /// component's own draws (the caller seeds the core).
    pub fn new(
        e: Box<dyn AdaptableEnv>,
        agent: &AgentFactory,
        env_seed: u64,
    ) -> Result<Self, ExtrlError> {
        let sim = e.sim_blueprint(agent)?.create();
        let e_obs_count = e.obs_count();
        let e_act_count = e.act_count();
        Ok(CombinedEnv {
            g: CartPoleEnv::new(env_seed),
            e,
            sim,
            e_obs_count,
            e_act_count,
            prev_g_obs: ObservationId(0),
        })
    }
}

impl ExtendedEnv for CombinedEnv {
    fn start(&mut self) -> ObservationId {
        let g = self.g.start();
        let e = self.e.start_obs();
        self.prev_g_obs = g;
        ObservationId(encode_pair(g.0, e.0, self.e_obs_count))
    }

    fn step(&mut self, action: ActionId) -> Percept {
        let (a_g, a_e) = decode_pair(action.0, self.e_act_count);
        let a_g = ActionId(a_g.min(CARTPOLE_ACTIONS - 1));
        let a_e = ActionId(a_e);

        // 1. Advance the control task (it resets itself between episodes).
        let g_percept = self.g.step(a_g);
        let o_g = g_percept.obs;

        // 2. Extended verdict on this step, judged before any training.
        let r_e = self.e.phase_reward(
            a_e,
            &mut PairActs {
                sim: self.sim.as_mut(),
                g_obs: self.prev_g_obs,
                e_obs_count: self.e_obs_count,
                e_act_count: self.e_act_count,
            },
        );

        // 3. Merge rewards: disapproval overrides the control reward.
        let reward = combined_reward(g_percept.reward, r_e);

        // 4. Extended component updates itself and the sim. The sim is
        //    trained with the reward the extended component dictates —
        //    never the merged reward — so shadow training matches what
        //    the component itself prescribes.
        let o_e = self.e.phase_train(
            a_e,
            r_e,
            &mut PairTrains {
                sim: self.sim.as_mut(),
                g_prev: self.prev_g_obs,
                g_action: a_g,
                g_next: o_g,
                e_obs_count: self.e_obs_count,
                e_act_count: self.e_act_count,
            },
        );

        self.prev_g_obs = o_g;
        Percept { reward, obs: ObservationId(encode_pair(o_g.0, o_e.0, self.e_obs_count)) }
    }

    fn episode_ended(&self) -> bool {
        self.g.episode_ended()
    }
}

/// Trivial adaptable environment that approves everything: one component
/// observation, one component action, reward +1 always, sim untouched.
///
/// Combining with it is the identity on the control task — pair tokens
/// coincide numerically with bare control tokens, and no step is ever
/// vetoed — which makes it the reference point for combination tests.
pub struct AlwaysReward;

impl AdaptableEnv for AlwaysReward {
    fn obs_count(&self) -> u32 {
        1
    }

    fn act_count(&self) -> u32 {
        1
    }

    fn start_obs(&mut self) -> ObservationId {
        ObservationId(0)
    }

    fn phase_reward(&mut self, _action: ActionId, _sim: &mut dyn SimActs) -> f64 {
        1.0
    }

    fn phase_train(
        &mut self,
        _action: ActionId,
        _reward: f64,
        _sim: &mut dyn SimTrains,
    ) -> ObservationId {
        ObservationId(0)
    }
}
