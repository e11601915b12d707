//! The interaction loop and history-replay utilities.
//!
//! `run_interaction` is the single entry point that wires an agent to an
//! environment: both are built from factories re-seeded with the run
//! seed, so a run is a pure function of `(agent_factory, env_factory,
//! steps, seed)`. The replay utilities answer whether a recorded history
//! could have been produced by an agent, and whether two blueprints are
//! indistinguishable across a bounded set of histories.

use crate::agents::{Agent, AgentFactory};
use crate::envs::EnvFactory;
use crate::error::ExtrlError;
use crate::types::{check_token, ActionId, History, Percept, RunRecord, TrainStep};

/// Run one agent against one environment for `steps` exchanges.
///
/// Both factories are seeded with `seed` before instantiation — the
/// agent, every shadow copy the environment builds from its blueprint,
/// and the environment's own stream draws all derive from it, making the
/// whole record reproducible bit for bit.
pub fn run_interaction(
    agent: &AgentFactory,
    env: &EnvFactory,
    steps: u64,
    seed: u64,
) -> Result<RunRecord, ExtrlError> {
    if steps == 0 {
        return Err(ExtrlError::InvalidArg("steps must be at least 1".into()));
    }
    let (env_obs, env_actions) = env.spaces();
    let agent = agent.with_seed(seed);
    if agent.config.obs_count != env_obs || agent.config.action_count != env_actions {
        return Err(ExtrlError::SpaceDisagreement {
            env: format!("{:?}", env.kind),
            agent_obs: agent.config.obs_count,
            agent_actions: agent.config.action_count,
            env_obs,
            env_actions,
        });
    }

    let mut env_inst = env.instantiate(&agent, seed)?;
    let mut agent_inst = agent.create();

    let first_obs = env_inst.start();
    check_token(first_obs.0, env_obs, "observation")?;
    let mut history = History::new(Percept { reward: 0.0, obs: first_obs });
    let mut per_step_rewards = Vec::with_capacity(steps as usize);
    let mut obs = first_obs;

    for step in 0..steps {
        let action = agent_inst.act(obs);
        check_token(action.0, env_actions, "action")?;
        let percept = env_inst.step(action);
        check_token(percept.obs.0, env_obs, "observation")?;
        if !percept.reward.is_finite() {
            return Err(ExtrlError::NonFiniteReward { step });
        }
        agent_inst.train(TrainStep {
            o_prev: obs,
            a: action,
            r: percept.reward,
            o_next: percept.obs,
        });
        history.push(action, percept);
        per_step_rewards.push(percept.reward);
        obs = percept.obs;
    }

    let total_reward: f64 = per_step_rewards.iter().sum();
    Ok(RunRecord {
        history,
        total_reward,
        mean_reward_per_turn: total_reward / steps as f64,
        per_step_rewards,
        steps,
        seed,
    })
}

/// Could a fresh instance of this blueprint have produced `history`?
///
/// Replays the history against one instance: at each turn the instance
/// is queried at the recorded observation, and the recorded action must
/// match before the transition is fed back through `train`. Because
/// acting is a pure query, this is exactly the sequence of decisions the
/// agent would have faced living the history forward.
pub fn is_possible(factory: &AgentFactory, history: &History) -> bool {
    let mut agent = factory.create();
    for (i, step) in history.transitions().enumerate() {
        if agent.act(step.o_prev) != history.actions()[i] {
            return false;
        }
        agent.train(step);
    }
    true
}

/// Action a fresh instance takes after replaying the whole history.
fn replay_act(factory: &AgentFactory, history: &History) -> ActionId {
    let mut agent: Box<dyn Agent> = factory.create();
    for step in history.transitions() {
        agent.train(step);
    }
    agent.act(history.last_obs())
}

/// Are two blueprints indistinguishable across the given histories?
///
/// For every history in the set that is possible for `f1`, fresh
/// instances of both factories must answer the follow-up query
/// identically after replaying it. A `true` is a certificate only over
/// the given set, not a proof of equivalence in general.
pub fn traditionally_equivalent_on(
    f1: &AgentFactory,
    f2: &AgentFactory,
    histories: &[History],
) -> bool {
    histories.iter().filter(|h| is_possible(f1, h)).all(|h| replay_act(f1, h) == replay_act(f2, h))
}
