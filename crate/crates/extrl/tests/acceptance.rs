//! The acceptance gate: nine end-to-end checks, one per headline claim
//! of the crate, each printing a single `ACCEPTANCE <n> PASS/FAIL` line
//! (run with `--nocapture` to see the lines for passing checks too).
//!
//! Tolerances and scales are pinned here, in code, so the gate cannot
//! drift: analytic payoffs within ±0.02 at 100k steps, the convergence
//! split at 0.9, the directional episode-reward comparison over the final
//! 1000 of 10000 episodes in at least 8 of 10 seeds, byte-identical CSV
//! reruns.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use extrl::{is_possible, ActionId};
use extrl::{
    mean_table_path, mix64, parse_agent, parse_env, rc_wrap, run_benchmark, run_curves,
    run_interaction, traditionally_equivalent_on, write_curve_tables, write_result_table, Agent,
    AgentConfig, AgentFactory, AlwaysReward, BenchConfig, CartPoleEnv, CombinedEnv, EnvFactory,
    EnvKind, ExtendedEnv, History, ObservationId, Percept, TrainStep, CARTPOLE_ACTIONS,
    CARTPOLE_TOKENS,
};

/// Print the verdict line for one criterion, then enforce it.
fn verdict(criterion: u32, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {criterion} {tag} — {detail}");
    assert!(pass, "acceptance {criterion}: {detail}");
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Deterministic test-local randomness, chained through the crate's hash.
struct Chain(u64);

impl Chain {
    fn new(seed: u64) -> Self {
        Chain(mix64(seed ^ 0x5851_f42d_4c95_7f2d))
    }

    fn next(&mut self) -> u64 {
        self.0 = mix64(self.0.wrapping_add(0x9e37_79b9_7f4a_7c15));
        self.0
    }

    fn pick(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    fn float(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// One agent blueprint of a random kind over the given spaces.
fn sample_factory(chain: &mut Chain, obs_count: u32, action_count: u32) -> AgentFactory {
    let config = AgentConfig::new(chain.next(), obs_count, action_count);
    match chain.pick(4) {
        0 => AgentFactory::constant(chain.pick(action_count as u64) as u32, config),
        1 => AgentFactory::random(config),
        2 => AgentFactory::tabular_q(config),
        _ => {
            let mut config = config;
            config.exploration = Some(0.3);
            config.learning_rate = Some(0.5);
            AgentFactory::tabular_q(config)
        }
    }
}

#[test]
fn a1_button_payoff_analytics() {
    let env = EnvFactory::new(EnvKind::TemptingButton);
    let mut push = Vec::new();
    let mut hold = Vec::new();
    for seed in 0..5u64 {
        let pusher = AgentFactory::constant(1, AgentConfig::new(seed, 2, 2));
        let holder = AgentFactory::constant(0, AgentConfig::new(seed, 2, 2));
        push.push(run_interaction(&pusher, &env, 100_000, seed).unwrap().mean_reward_per_turn);
        hold.push(run_interaction(&holder, &env, 100_000, seed).unwrap().mean_reward_per_turn);
    }
    let pass = push.iter().all(|m| (m + 0.5).abs() <= 0.02)
        && hold.iter().all(|m| (m - 0.5).abs() <= 0.02);
    verdict(
        1,
        pass,
        format!(
            "tempting_button 100k steps x 5 seeds: always-push mean {:.5} (want -0.5 +/- 0.02), \
             never-push mean {:.5} (want +0.5 +/- 0.02), every seed within tolerance",
            mean(&push),
            mean(&hold)
        ),
    );
}

#[test]
fn a2_q_learner_button_score_band() {
    let env = EnvFactory::new(EnvKind::TemptingButton);
    let spec = parse_agent("q").unwrap();
    let mut means = Vec::new();
    for seed in 0..5u64 {
        let f = spec.factory(seed, 2, 2);
        means.push(run_interaction(&f, &env, 100_000, seed).unwrap().mean_reward_per_turn);
    }
    let m = mean(&means);
    let pass = (-0.55..=-0.30).contains(&m);
    verdict(
        2,
        pass,
        format!(
            "q defaults on tempting_button, 100k steps x 5 seeds: mean reward/turn {m:.5} \
             (want within [-0.55, -0.30]; per-seed {means:.5?})"
        ),
    );
}

/// Every history over one observation, binary actions, and rewards in
/// {-1, 0, +1}, with at most `max_actions` exchanges.
fn all_short_histories(max_actions: usize) -> Vec<History> {
    let rewards = [-1.0, 0.0, 1.0];
    let mut out: Vec<History> = Vec::new();
    let mut frontier: Vec<History> = rewards
        .iter()
        .map(|&r| History::new(Percept { reward: r, obs: ObservationId(0) }))
        .collect();
    out.extend(frontier.iter().cloned());
    for _ in 0..max_actions {
        let mut next = Vec::new();
        for h in &frontier {
            for a in 0..2u32 {
                for &r in &rewards {
                    let mut h2 = h.clone();
                    h2.push(ActionId(a), Percept { reward: r, obs: ObservationId(0) });
                    next.push(h2);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn a3_startup_probe_splits_equivalent_policies() {
    let env = EnvFactory::new(EnvKind::StartupProbe);
    let pi1 = AgentFactory::constant(0, AgentConfig::new(0, 1, 2));
    let pi2 = AgentFactory::phantom_deviant(AgentConfig::new(0, 1, 2));

    // Total reward is decided at the first step and must not depend on the
    // seed or the run length.
    let mut totals_ok = true;
    for seed in 0..3u64 {
        for steps in [1u64, 5, 40] {
            let v1 = run_interaction(&pi1, &env, steps, seed).unwrap().total_reward;
            let v2 = run_interaction(&pi2, &env, steps, seed).unwrap().total_reward;
            totals_ok &= v1 == 1.0 && v2 == 0.0;
        }
    }

    let histories = all_short_histories(3);
    let te_forward = traditionally_equivalent_on(&pi1, &pi2, &histories);
    let te_backward = traditionally_equivalent_on(&pi2, &pi1, &histories);

    let pass = totals_ok && te_forward && te_backward;
    verdict(
        3,
        pass,
        format!(
            "prop3_fixture: always-first-action total 1.0 and history-probe total 0.0 across \
             seeds/lengths ({totals_ok}), traditionally equivalent on all {} histories with \
             <= 3 exchanges (forward {te_forward}, backward {te_backward})",
            histories.len()
        ),
    );
}

/// Test-local replica of the wrapper under its alternative reading: each
/// training step is judged against the wrapper's *own* current answer
/// (frozen action included) rather than the inner agent's.
struct AltWrapper {
    inner: Box<dyn Agent>,
    first_obs: Option<ObservationId>,
    frozen: Option<ActionId>,
    default_action: Option<ActionId>,
}

impl AltWrapper {
    fn new(inner: Box<dyn Agent>, default_action: Option<ActionId>) -> Self {
        AltWrapper { inner, first_obs: None, frozen: None, default_action }
    }

    fn answer(&mut self, obs: ObservationId) -> ActionId {
        match self.frozen {
            Some(a) => a,
            None => self.inner.act(obs),
        }
    }

    fn act(&mut self, obs: ObservationId) -> ActionId {
        if self.first_obs.is_none() {
            self.first_obs = Some(obs);
        }
        self.answer(obs)
    }

    fn train(&mut self, step: TrainStep) {
        if self.first_obs.is_none() {
            self.first_obs = Some(step.o_prev);
        }
        if self.answer(step.o_prev) == step.a {
            if self.frozen.is_none() {
                self.inner.train(step);
            }
        } else if self.frozen.is_none() {
            let fallback = self
                .default_action
                .unwrap_or_else(|| self.inner.act(self.first_obs.expect("latched above")));
            self.frozen = Some(fallback);
        }
    }
}

/// Drive two agents through one identical randomized act/train stream,
/// returning false on the first disagreement between their answers.
fn lockstep<A, B>(
    chain: &mut Chain,
    obs_count: u32,
    action_count: u32,
    calls: usize,
    mut act_a: A,
    mut act_b: B,
) -> bool
where
    A: FnMut(bool, ObservationId, TrainStep) -> Option<ActionId>,
    B: FnMut(bool, ObservationId, TrainStep) -> Option<ActionId>,
{
    for _ in 0..calls {
        let obs = ObservationId(chain.pick(obs_count as u64) as u32);
        let step = TrainStep::new(
            chain.pick(obs_count as u64) as u32,
            chain.pick(action_count as u64) as u32,
            [-1.0, 0.0, 1.0][chain.pick(3) as usize],
            chain.pick(obs_count as u64) as u32,
        );
        let is_act = chain.float() < 0.5;
        let a = act_a(is_act, obs, step);
        let b = act_b(is_act, obs, step);
        if a != b {
            return false;
        }
    }
    true
}

#[test]
fn a4_wrapper_equivalence_laws() {
    let trials = 100usize;
    let mut detail = String::new();

    // Part 1: the two readings of the consistency test are observationally
    // identical — judged against the inner policy or against the wrapper's
    // own (possibly frozen) policy.
    let mut part1 = 0usize;
    for t in 0..trials {
        let mut chain = Chain::new(0x11 * 1000 + t as u64);
        let (obs_count, action_count) = (3u32, 3u32);
        let inner = sample_factory(&mut chain, obs_count, action_count);
        let default_action = match chain.pick(3) {
            0 => None,
            k => Some(ActionId(k as u32 - 1)),
        };
        let mut standard = rc_wrap(inner.clone(), default_action).create();
        let mut alternative = AltWrapper::new(inner.create(), default_action);
        let agree = lockstep(
            &mut chain.clone_fork(t as u64),
            obs_count,
            action_count,
            80,
            |is_act, obs, step| {
                if is_act {
                    Some(standard.act(obs))
                } else {
                    standard.train(step);
                    None
                }
            },
            |is_act, obs, step| {
                if is_act {
                    Some(alternative.act(obs))
                } else {
                    alternative.train(step);
                    None
                }
            },
        );
        part1 += agree as usize;
    }
    let _ = write!(detail, "alternate-consistency agreement {part1}/{trials}");

    // Part 2: wrapping twice changes nothing.
    let mut part2 = 0usize;
    for t in 0..trials {
        let mut chain = Chain::new(0x22 * 1000 + t as u64);
        let (obs_count, action_count) = (3u32, 3u32);
        let inner = sample_factory(&mut chain, obs_count, action_count);
        let default_action = match chain.pick(3) {
            0 => None,
            k => Some(ActionId(k as u32 - 1)),
        };
        let single = rc_wrap(inner, default_action);
        let double = rc_wrap(single.clone(), default_action);
        let mut one = single.create();
        let mut two = double.create();
        let agree = lockstep(
            &mut chain.clone_fork(t as u64),
            obs_count,
            action_count,
            80,
            |is_act, obs, step| {
                if is_act {
                    Some(one.act(obs))
                } else {
                    one.train(step);
                    None
                }
            },
            |is_act, obs, step| {
                if is_act {
                    Some(two.act(obs))
                } else {
                    two.train(step);
                    None
                }
            },
        );
        part2 += agree as usize;
    }
    let _ = write!(detail, "; idempotence {part2}/{trials}");

    // Part 3: wrapped and bare blueprints replay identically on histories
    // the bare agent could have produced — genuine ones and mutated ones
    // (mutations that break possibility are filtered by definition).
    let env_names = ["ignore_rewards", "tempting_button", "self_recognition", "false_memories"];
    let mut part3 = 0usize;
    for t in 0..trials {
        let mut chain = Chain::new(0x33 * 1000 + t as u64);
        let envf = parse_env(env_names[t % env_names.len()]).unwrap();
        let (obs_count, action_count) = envf.spaces();
        let f = sample_factory(&mut chain, obs_count, action_count);
        let wrapped = rc_wrap(f.clone(), None);

        let record = run_interaction(&f, &envf, 30, chain.next()).unwrap();
        let mut histories = vec![record.history.clone()];
        for _ in 0..4 {
            let mut h = History::new(record.history.percepts()[0]);
            for (i, step) in record.history.transitions().enumerate() {
                let mut action = record.history.actions()[i];
                if chain.float() < 0.3 {
                    action = ActionId(chain.pick(action_count as u64) as u32);
                }
                h.push(action, Percept { reward: step.r, obs: step.o_next });
            }
            histories.push(h);
        }
        // Seeds were rewritten by the run; compare the blueprints the run
        // actually used.
        let seeded = f.with_seed(record.seed);
        let wrapped_seeded = wrapped.with_seed(record.seed);
        let ok = traditionally_equivalent_on(&seeded, &wrapped_seeded, &histories)
            && traditionally_equivalent_on(&wrapped_seeded, &seeded, &histories);
        part3 += ok as usize;
    }
    let _ = write!(detail, "; replay equivalence {part3}/{trials}");

    // Part 4: a wrapped agent's genuine interaction stream never trips it —
    // the recorded history stays possible for the wrapped blueprint and for
    // the bare one with the same seed.
    let all_envs = [
        "ignore_rewards",
        "tempting_button",
        "reverse_history",
        "incentivize_learning_rate",
        "self_recognition",
        "limited_memory",
        "false_memories",
        "adversarial_predictor",
        "prop3_fixture",
    ];
    let mut part4 = 0usize;
    for t in 0..trials {
        let mut chain = Chain::new(0x44 * 1000 + t as u64);
        let envf = parse_env(all_envs[t % all_envs.len()]).unwrap();
        let (obs_count, action_count) = envf.spaces();
        // The learning-rate environment needs a learner; give it one always.
        let f = if all_envs[t % all_envs.len()] == "incentivize_learning_rate" {
            AgentFactory::tabular_q(AgentConfig::new(chain.next(), obs_count, action_count))
        } else {
            sample_factory(&mut chain, obs_count, action_count)
        };
        let wrapped = rc_wrap(f.clone(), None);
        let seed = chain.next();
        let record = run_interaction(&wrapped, &envf, 40, seed).unwrap();
        let ok = is_possible(&wrapped.with_seed(seed), &record.history)
            && is_possible(&f.with_seed(seed), &record.history);
        part4 += ok as usize;
    }
    let _ = write!(detail, "; genuine-history possibility {part4}/{trials}");

    // Part 5: on the plain control task the wrapper is a no-op, down to the
    // full run record.
    let mut part5 = 0usize;
    for t in 0..trials {
        let mut chain = Chain::new(0x55 * 1000 + t as u64);
        let envf = EnvFactory::new(EnvKind::CartPole);
        let f = sample_factory(&mut chain, CARTPOLE_TOKENS, CARTPOLE_ACTIONS);
        let seed = chain.next();
        let bare = run_interaction(&f, &envf, 200, seed).unwrap();
        let wrapped = run_interaction(&rc_wrap(f, None), &envf, 200, seed).unwrap();
        part5 += (bare == wrapped) as usize;
    }
    let _ = write!(detail, "; control-task transparency {part5}/{trials}");

    let pass = [part1, part2, part3, part4, part5].iter().all(|&p| p == trials);
    verdict(4, pass, detail);
}

impl Chain {
    /// An independent stream split off for one trial, so sampling order
    /// inside a trial cannot perturb its neighbors.
    fn clone_fork(&self, salt: u64) -> Chain {
        Chain::new(self.0 ^ mix64(salt))
    }
}

#[test]
fn a5_twin_replay_across_every_agent_kind() {
    let specs = [
        "constant",
        "constant(1)",
        "random",
        "q",
        "q(lr=0.3,eps=0.2,gamma=0.5)",
        "phantom_deviant",
        "rc(constant)",
        "rc(random)",
        "rc(q)",
        "rc(rc(q))",
    ];
    let (obs_count, action_count) = (4u32, 3u32);
    let trials_per_kind = 100usize;
    let mut trials = 0usize;
    let mut divergences = 0usize;
    for (k, spec_str) in specs.iter().enumerate() {
        let spec = parse_agent(spec_str).unwrap();
        for t in 0..trials_per_kind {
            let mut chain = Chain::new((k * 1000 + t) as u64);
            let factory = spec.factory(chain.next(), obs_count, action_count);
            let mut first = factory.create();
            let mut second = factory.create();
            let agree = lockstep(
                &mut chain.clone_fork(t as u64),
                obs_count,
                action_count,
                150,
                |is_act, obs, step| {
                    if is_act {
                        Some(first.act(obs))
                    } else {
                        first.train(step);
                        None
                    }
                },
                |is_act, obs, step| {
                    if is_act {
                        Some(second.act(obs))
                    } else {
                        second.train(step);
                        None
                    }
                },
            );
            trials += 1;
            divergences += !agree as usize;
        }
    }
    let pass = trials == 1000 && divergences == 0;
    verdict(
        5,
        pass,
        format!(
            "twin replay over randomized interleaved streams: {divergences} divergences in \
             {trials} trials across {} agent kinds",
            specs.len()
        ),
    );
}

#[test]
fn a6_wrapper_restores_convergence_under_zeroed_rewards() {
    let env = EnvFactory::new(EnvKind::IgnoreRewards);
    let bare_spec = parse_agent("q").unwrap();
    let wrapped_spec = parse_agent("rc(q)").unwrap();
    let steps = 100_000u64;
    let tail = (steps as usize) * 9 / 10;

    let mut bare_tails = Vec::new();
    let mut wrapped_tails = Vec::new();
    for seed in 0..5u64 {
        let bare = run_interaction(&bare_spec.factory(seed, 1, 2), &env, steps, seed).unwrap();
        let wrapped =
            run_interaction(&wrapped_spec.factory(seed, 1, 2), &env, steps, seed).unwrap();
        bare_tails.push(mean(&bare.per_step_rewards[tail..]));
        wrapped_tails.push(mean(&wrapped.per_step_rewards[tail..]));
    }
    let pass = wrapped_tails.iter().all(|&m| m >= 0.9) && bare_tails.iter().all(|&m| m < 0.9);
    verdict(
        6,
        pass,
        format!(
            "ignore_rewards, final 10% of 100k steps, 5 seeds: rc(q) per-seed means \
             {wrapped_tails:.5?} (all >= 0.9), bare q {bare_tails:.5?} (all < 0.9)"
        ),
    );
}

#[test]
fn a7_wrapped_learner_beats_bare_learner_on_combined_tasks() {
    let envs = ["cartpole*ignore_rewards", "cartpole*incentivize_learning_rate"];
    let config = BenchConfig {
        agents: vec!["q".into(), "rc(q)".into()],
        envs: envs.iter().map(|s| s.to_string()).collect(),
        seeds: Some(10),
        episode_curves: true,
        episodes: 10_000,
        ..BenchConfig::default()
    };
    let curves = run_curves(&config).unwrap();

    // Mean episode reward over the final 1000 episodes, per (agent, env, seed).
    let mut sums: BTreeMap<(String, String, u64), (f64, u64)> = BTreeMap::new();
    for p in &curves.points {
        if p.episode > 9_000 {
            let entry = sums.entry((p.agent.clone(), p.env.clone(), p.seed)).or_insert((0.0, 0));
            entry.0 += p.episode_reward;
            entry.1 += 1;
        }
    }
    let tail_mean = |agent: &str, env: &str, seed: u64| -> f64 {
        let (sum, n) = sums[&(agent.to_string(), env.to_string(), seed)];
        sum / n as f64
    };

    let mut detail = String::new();
    let mut pass = true;
    for env in envs {
        let mut wins = 0u32;
        let mut bare_means = Vec::new();
        let mut wrapped_means = Vec::new();
        for seed in 0..10u64 {
            let bare = tail_mean("q", env, seed);
            let wrapped = tail_mean("rc(q)", env, seed);
            bare_means.push(bare);
            wrapped_means.push(wrapped);
            wins += (wrapped > bare) as u32;
        }
        pass &= wins >= 8;
        let _ = write!(
            detail,
            "{env}: rc(q) > q in {wins}/10 seeds (need >= 8; mean final-1000 episode reward \
             rc(q) {:.3}, q {:.3}); ",
            mean(&wrapped_means),
            mean(&bare_means)
        );
    }
    let _ = write!(
        detail,
        "known shortfall: with tabular Q the combined task pays +1 every step regardless of \
         the pole, so balancing is not learnable from returns and episode length is set by \
         action churn rather than skill — see README"
    );
    verdict(7, pass, detail);
}

#[test]
fn a8_trivial_combination_is_transparent() {
    // Combining with the always-approving one-token environment must leave
    // the control task untouched: same observation tokens, same rewards,
    // same episode boundaries, bit for bit.
    let spec = parse_agent("q").unwrap();
    let factory = spec.factory(0, CARTPOLE_TOKENS, CARTPOLE_ACTIONS);

    let run = |env: &mut dyn ExtendedEnv| -> (Vec<u64>, Vec<u32>, Vec<usize>) {
        let mut agent = factory.create();
        let mut obs = env.start();
        let mut reward_bits = Vec::new();
        let mut obs_tokens = vec![obs.0];
        let mut episode_lengths = Vec::new();
        let mut len = 0usize;
        while episode_lengths.len() < 100 {
            let action = agent.act(obs);
            let percept = env.step(action);
            agent.train(TrainStep {
                o_prev: obs,
                a: action,
                r: percept.reward,
                o_next: percept.obs,
            });
            reward_bits.push(percept.reward.to_bits());
            obs_tokens.push(percept.obs.0);
            len += 1;
            if env.episode_ended() {
                episode_lengths.push(len);
                len = 0;
            }
            obs = percept.obs;
        }
        (reward_bits, obs_tokens, episode_lengths)
    };

    let mut combined = CombinedEnv::new(Box::new(AlwaysReward), &factory, 0).unwrap();
    let mut bare = CartPoleEnv::new(0);
    let (c_bits, c_obs, c_eps) = run(&mut combined);
    let (g_bits, g_obs, g_eps) = run(&mut bare);

    let pass = c_bits == g_bits && c_obs == g_obs && c_eps == g_eps;
    verdict(
        8,
        pass,
        format!(
            "cartpole + always-reward combination vs bare cartpole over {} episodes \
             ({} steps): reward streams bit-identical {}, observation tokens identical {}, \
             episode boundaries identical {}",
            g_eps.len(),
            g_bits.len(),
            c_bits == g_bits,
            c_obs == g_obs,
            c_eps == g_eps
        ),
    );
}

#[test]
fn a9_identical_configs_rerun_to_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let table_path = dir.path().join("result_table.csv");
    let curves_path = dir.path().join("curves.csv");

    let table_json = format!(
        r#"{{
            "agents": ["q", "rc(q)", "random"],
            "envs": ["tempting_button", "ignore_rewards"],
            "steps": 3000,
            "seeds": 3,
            "output_path": "{}"
        }}"#,
        table_path.display()
    );
    let curves_json = format!(
        r#"{{
            "agents": ["q", "rc(q)"],
            "envs": ["cartpole"],
            "episode_curves": true,
            "episodes": 400,
            "seeds": 2,
            "output_path": "{}"
        }}"#,
        curves_path.display()
    );

    let mut table_bytes = Vec::new();
    let mut curve_bytes = Vec::new();
    let mut mean_bytes = Vec::new();
    for _ in 0..2 {
        let config: BenchConfig = serde_json::from_str(&table_json).unwrap();
        let rows = run_benchmark(&config).unwrap();
        write_result_table(&rows, &config.output_path).unwrap();
        table_bytes.push(std::fs::read(&config.output_path).unwrap());

        let config: BenchConfig = serde_json::from_str(&curves_json).unwrap();
        let curves = run_curves(&config).unwrap();
        write_curve_tables(&curves, &config.output_path).unwrap();
        curve_bytes.push(std::fs::read(&config.output_path).unwrap());
        mean_bytes.push(std::fs::read(mean_table_path(&config.output_path)).unwrap());
    }

    let pass = table_bytes[0] == table_bytes[1]
        && curve_bytes[0] == curve_bytes[1]
        && mean_bytes[0] == mean_bytes[1];
    verdict(
        9,
        pass,
        format!(
            "identical JSON configs run twice: result_table.csv identical {} ({} bytes), \
             curves.csv identical {} ({} bytes), curves_mean.csv identical {} ({} bytes)",
            table_bytes[0] == table_bytes[1],
            table_bytes[0].len(),
            curve_bytes[0] == curve_bytes[1],
            curve_bytes[0].len(),
            mean_bytes[0] == mean_bytes[1],
            mean_bytes[0].len()
        ),
    );
}
