//! A small cart-pole balancing task with a discretized observation space.
//!
//! Classic inverted-pendulum dynamics: a pole hinged on a cart, force
//! applied left or right, reward 1.0 for every step survived, episode
//! over when the cart leaves the track, the pole tips too far, or 200
//! steps pass. The continuous state is binned into 324 discrete tokens
//! so tabular agents can play. As an [`ExtendedEnv`] the task runs
//! continuing: each terminal step is followed by an automatic reset
//! drawn from the episode counter, so one long interaction spans many
//! episodes.
//!
//! This environment is *not* extended — it never sees the agent's
//! blueprint and holds no shadow copies, which is visible in its
//! constructor: [`CartPoleEnv::new`] takes only a seed.

use crate::rng::derive_random;
use crate::types::{ActionId, ExtendedEnv, ObservationId, Percept};

const GRAVITY: f64 = 9.8;
const MASS_CART: f64 = 1.0;
const MASS_POLE: f64 = 0.1;
const TOTAL_MASS: f64 = MASS_CART + MASS_POLE;
/// Half the pole's length, as the dynamics are written around the center
/// of mass.
const POLE_HALF_LENGTH: f64 = 0.5;
const POLE_MASS_LENGTH: f64 = MASS_POLE * POLE_HALF_LENGTH;
const FORCE_MAG: f64 = 10.0;
/// Integration time step in seconds.
const TAU: f64 = 0.02;

/// Track half-width: episodes end when |x| exceeds this.
const X_LIMIT: f64 = 2.4;
/// Tip-over angle in radians (12°).
const THETA_LIMIT: f64 = 12.0 * std::f64::consts::PI / 180.0;
/// Episodes end after this many steps regardless of state.
pub const EPISODE_STEP_LIMIT: u32 = 200;

/// Number of discrete observation tokens (3·3·6·6).
pub const CARTPOLE_TOKENS: u32 = 324;
/// Two actions: 0 pushes left, 1 pushes right.
pub const CARTPOLE_ACTIONS: u32 = 2;

/// Binning for (x, x_dot, theta, theta_dot).
const BINS: [u32; 4] = [3, 3, 6, 6];
const LOWS: [f64; 4] = [-X_LIMIT, -3.0, -THETA_LIMIT, -3.5];
const HIGHS: [f64; 4] = [X_LIMIT, 3.0, THETA_LIMIT, 3.5];

/// Full continuous state of the cart-pole system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub steps_in_episode: u32,
}

/// Advance the dynamics one step with an explicit force magnitude.
///
/// Exposed for the zero-force calibration mode used in tests; ordinary
/// play goes through [`cartpole_step`]. Semi-implicit Euler with the
/// velocity updated before the position it integrates.
pub fn cartpole_step_with_force(
    state: CartPoleState,
    action: ActionId,
    force_mag: f64,
) -> (f64, CartPoleState, bool) {
    let force = if action == ActionId(1) { force_mag } else { -force_mag };
    let cos_t = state.theta.cos();
    let sin_t = state.theta.sin();

    let temp = (force + POLE_MASS_LENGTH * state.theta_dot * state.theta_dot * sin_t) / TOTAL_MASS;
    let theta_acc = (GRAVITY * sin_t - cos_t * temp)
        / (POLE_HALF_LENGTH * (4.0 / 3.0 - MASS_POLE * cos_t * cos_t / TOTAL_MASS));
    let x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS;

    let x_dot = state.x_dot + TAU * x_acc;
    let x = state.x + TAU * x_dot;
    let theta_dot = state.theta_dot + TAU * theta_acc;
    let theta = state.theta + TAU * theta_dot;

    let next =
        CartPoleState { x, x_dot, theta, theta_dot, steps_in_episode: state.steps_in_episode + 1 };
    let done = next.x.abs() > X_LIMIT
        || next.theta.abs() > THETA_LIMIT
        || next.steps_in_episode >= EPISODE_STEP_LIMIT;
    (1.0, next, done)
}

/// Advance the dynamics one step under the standard ±10 N push.
pub fn cartpole_step(state: CartPoleState, action: ActionId) -> (f64, CartPoleState, bool) {
    cartpole_step_with_force(state, action, FORCE_MAG)
}

/// Initial state for an episode: every component uniform in
/// [−0.05, 0.05], drawn from the seed and a per-episode counter.
pub fn cartpole_reset(seed: u64, episode_counter: u64) -> CartPoleState {
    let mut c = [0.0f64; 4];
    for (i, v) in c.iter_mut().enumerate() {
        let u = derive_random(seed, episode_counter * 4 + i as u64, ObservationId(0));
        *v = -0.05 + u * 0.1;
    }
    CartPoleState { x: c[0], x_dot: c[1], theta: c[2], theta_dot: c[3], steps_in_episode: 0 }
}

/// Bin a continuous state into one of [`CARTPOLE_TOKENS`] tokens.
///
/// Each component is floored into equal-width bins over its range (so a
/// bin includes its left edge), with out-of-range values clipped to the
/// edge bins; the four indices combine in mixed radix. The all-zero
/// state lands in bin indices (1, 1, 3, 3).
pub fn discretize(state: CartPoleState) -> ObservationId {
    let comps = [state.x, state.x_dot, state.theta, state.theta_dot];
    let mut token = 0u32;
    for i in 0..4 {
        let width = (HIGHS[i] - LOWS[i]) / BINS[i] as f64;
        let raw = ((comps[i] - LOWS[i]) / width).floor();
        let idx = (raw.max(0.0) as u32).min(BINS[i] - 1);
        token = token * BINS[i] + idx;
    }
    ObservationId(token)
}

/// The task as a continuing environment with automatic episode resets.
pub struct CartPoleEnv {
    seed: u64,
    episode_counter: u64,
    state: CartPoleState,
    last_done: bool,
}

impl CartPoleEnv {
    pub fn new(seed: u64) -> Self {
        CartPoleEnv {
            seed,
            episode_counter: 0,
            state: CartPoleState {
                x: 0.0,
                x_dot: 0.0,
                theta: 0.0,
                theta_dot: 0.0,
                steps_in_episode: 0,
            },
            last_done: false,
        }
    }

    fn reset(&mut self) -> CartPoleState {
        let s = cartpole_reset(self.seed, self.episode_counter);
        self.episode_counter += 1;
        s
    }
}

impl ExtendedEnv for CartPoleEnv {
    fn start(&mut self) -> ObservationId {
        self.state = self.reset();
        discretize(self.state)
    }

    fn step(&mut self, action: ActionId) -> Percept {
        let (reward, next, done) = cartpole_step(self.state, action);
        self.state = if done { self.reset() } else { next };
        self.last_done = done;
        Percept { reward, obs: discretize(self.state) }
    }

    fn episode_ended(&self) -> bool {
        self.last_done
    }
}
