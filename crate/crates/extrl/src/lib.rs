//! Extended reinforcement-learning environments.
//!
//! An *extended* environment is allowed to do something ordinary RL
//! environments cannot: it holds one or more shadow instances of the very
//! agent that is being evaluated, created from the same blueprint
//! ([`AgentFactory`]), and lets the outcome of a step depend on what the
//! agent *would* do under different circumstances — in the past, in a
//! counterfactual training regime, or in a hypothetical future. The reward
//! an agent earns can therefore hinge on properties of its policy that no
//! ordinary trajectory reveals.
//!
//! The crate provides:
//!
//! * the agent/environment interaction protocol and its determinism
//!   guarantees ([`types`], [`rng`], [`interact`]),
//! * a set of reference agents — constant, uniform-random, tabular
//!   Q-learning — built so that identically-trained instances behave
//!   identically ([`agents`]),
//! * the reality-check wrapper, which makes any agent ignore percepts that
//!   its own past policy could not have produced ([`reality_check`]),
//! * nine extended environments exercising different counterfactual powers
//!   ([`envs`]),
//! * a small cart-pole control task with a discretized observation space
//!   ([`cartpole`]),
//! * a combination operator that grafts an adaptable extended environment
//!   onto the control task so that learning pressure and counterfactual
//!   pressure act simultaneously ([`combine`]),
//! * a name registry and benchmark runner used by the `extrl-bench` CLI
//!   ([`registry`], [`bench`]).
//!
//! # Determinism
//!
//! Every source of randomness in the crate is derived by counter-based
//! hashing ([`rng::derive_random`]) from explicit seeds. No entropy is
//! hidden in global state, and an agent's `act` never advances an RNG:
//! two instances built from the same factory and fed the same training
//! data answer every query identically, which is what makes shadow
//! instances faithful stand-ins for the real agent.

mod agents;
mod bench;
mod cartpole;
mod combine;
mod envs;
mod error;
mod interact;
mod reality_check;
mod registry;
mod rng;
mod types;

pub use agents::{
    get_learning_rate, replace_learning_rate, Agent, AgentFactory, AgentKind, DEFAULT_DISCOUNT,
    DEFAULT_EXPLORATION, DEFAULT_LEARNING_RATE,
};
pub use bench::{
    mean_table_path, run_benchmark, run_curves, write_curve_tables, write_result_table,
    AgentOverrides, BenchConfig, CurveMeanPoint, CurvePoint, CurvesOutput, ResultRow,
    DEFAULT_CURVE_EPISODES, DEFAULT_CURVE_SEEDS, DEFAULT_RUN_SEEDS, DEFAULT_RUN_STEPS,
    REVERSE_HISTORY_STEP_CAP,
};
pub use cartpole::{
    cartpole_reset, cartpole_step, cartpole_step_with_force, discretize, CartPoleEnv,
    CartPoleState, CARTPOLE_ACTIONS, CARTPOLE_TOKENS, EPISODE_STEP_LIMIT,
};
pub use combine::{
    check_adaptable, combined_reward, decode_pair, encode_pair, AdaptableEnv, AlwaysReward,
    CombinedEnv, SimActs, SimTrains,
};
pub use envs::{
    AdversarialSequencePredictor, EnvFactory, EnvKind, FalseMemories, IgnoreRewards,
    IncentivizeLearningRate, LimitedMemory, ReverseHistory, SelfRecognition, StandaloneAdaptable,
    StartupProbe, TemptingButton,
};
pub use error::ExtrlError;
pub use interact::{is_possible, run_interaction, traditionally_equivalent_on};
pub use reality_check::rc_wrap;
pub use registry::{
    agent_spec_forms, default_phantom, env_is_adaptable, env_names, parse_agent, parse_env,
    AgentSpec, LIMITED_MEMORY_WINDOW,
};
pub use rng::{derive_random, mix64};
pub use types::{
    ActionId, AgentConfig, ExtendedEnv, History, ObservationId, Percept, RunRecord, TrainStep,
};
