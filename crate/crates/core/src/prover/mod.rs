//! Training, greedy rollout, random search and benchmark reports.

mod config;
mod report;
mod search;

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{argmax, q_values, AgentError, Dqn, EpisodeActions, EpsilonSchedule, QNetwork, Transition};
use crate::certificate::{extract, verify_for, Certificate};
use crate::environment::{EnvError, Environment, StepRecord};
use crate::lp::SimplexSolver;
use crate::problem::Problem;
use crate::stableset::Graph;
use crate::poly::Rational;

pub use config::{ConfigError, ConfigPatch, RunConfig};
pub use report::{bench, BenchReport, BenchRow, RandomSummary};
pub use search::{random_search, stats_from_log, RandomSearchReport, StepStats, TrialRecord};

#[derive(Debug, Error)]
pub enum ProverError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proved,
    Unknown,
}

/// Where a certificate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum ProofSource {
    /// The initial memory already suffices.
    Initial,
    Training { episode: usize },
    Rollout,
}

/// One line of the training log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub steps: usize,
    pub final_gamma: f64,
    pub mean_loss: Option<f64>,
    pub epsilon: f64,
    pub proved: bool,
    /// The LP solver failed numerically and the episode was cut short.
    pub aborted: bool,
}

pub struct ProveOutcome {
    pub status: Status,
    pub certificate: Option<Certificate>,
    pub source: Option<ProofSource>,
    /// Steps of the episode that produced the certificate.
    pub proof_steps: Option<usize>,
    /// Steps of the final greedy rollout.
    pub rollout_steps: usize,
    pub rollout_proved: bool,
    /// Environment steps over training and rollout together.
    pub total_steps: usize,
    pub best_gamma: f64,
    pub initial_memory: usize,
    pub episodes: Vec<EpisodeLog>,
    pub rollout_trace: Vec<StepRecord>,
    pub model: QNetwork,
    pub seed: u64,
}

/// Extracts a certificate from the current LP optimum and keeps it only if
/// the independent verifier accepts it.
pub fn certify(problem: &Problem, env: &Environment) -> Option<Certificate> {
    if !env.bound_reached() {
        return None;
    }
    let cert = extract(problem, env.memory(), env.solution(), env.config().success_tol).ok()?;
    verify_for(&cert, problem).ok()?;
    Some(cert)
}

pub(crate) fn new_env(problem: &Problem, config: &RunConfig) -> Result<Environment, EnvError> {
    let solver = Arc::new(SimplexSolver { rule: config.solver, ..SimplexSolver::default() });
    Environment::with_solver(problem, config.env.clone(), solver)
}

fn available_features(env: &Environment) -> Vec<f64> {
    let mut out = Vec::new();
    for &i in env.available() {
        out.extend(env.action_features(i));
    }
    out
}

/// Trains a Q-network on `problem`, then rolls out greedily. `Proved` is
/// reported only with a certificate that passed verification.
pub fn prove(problem: &Problem, config: &RunConfig) -> Result<ProveOutcome, ProverError> {
    config.validate()?;
    let n = problem.nvars();
    let mut env = new_env(problem, config)?;
    let mut dqn = Dqn::new(n, config.dqn.clone(), config.seed);
    let initial_memory = env.memory().len();
    let mut outcome = ProveOutcome {
        status: Status::Unknown,
        certificate: None,
        source: None,
        proof_steps: None,
        rollout_steps: 0,
        rollout_proved: false,
        total_steps: 0,
        best_gamma: env.state().gamma,
        initial_memory,
        episodes: Vec::new(),
        rollout_trace: Vec::new(),
        model: dqn.online.clone(),
        seed: config.seed,
    };
    if env.is_done() {
        if let Some(cert) = certify(problem, &env) {
            outcome.status = Status::Proved;
            outcome.certificate = Some(cert);
            outcome.source = Some(ProofSource::Initial);
            outcome.proof_steps = Some(0);
            outcome.rollout_proved = true;
            return Ok(outcome);
        }
    }

    let total = config.episodes * config.env.max_steps;
    let schedule = EpsilonSchedule {
        start: config.dqn.eps_start,
        end: config.dqn.eps_end,
        decay_steps: (config.dqn.eps_decay_fraction * total as f64).round() as usize,
    };
    let width = 2 * n;
    let mut global = 0usize;
    let mut found: Option<(Certificate, usize, ProofSource)> = None;

    for ep in 0..config.episodes {
        if ep > 0 {
            env.reset()?;
        }
        let mut actions = EpisodeActions::new(width);
        for i in 0..env.actions().len() {
            actions.push(&env.action_features(i));
        }
        dqn.episodes.insert(ep, actions);
        let mut losses = Vec::new();
        let mut proved = false;
        let mut aborted = false;
        let mut epsilon = schedule.value(global);
        while !env.is_done() {
            epsilon = schedule.value(global);
            let avail = env.available().to_vec();
            let feats = available_features(&env);
            let s = env.state_features();
            let k = dqn.select(&s, &feats, epsilon)?;
            let index = avail[k];
            let before = env.actions().len();
            let out = match env.step(index) {
                Err(EnvError::NumericFailure { .. }) => {
                    aborted = true;
                    break;
                }
                r => r?,
            };
            global += 1;
            outcome.best_gamma = outcome.best_gamma.max(out.state.gamma);
            let ea = dqn.episodes.get_mut(ep).expect("episode registered");
            for i in before..env.actions().len() {
                ea.push(&env.action_features(i));
            }
            ea.consume(index, out.state.step);
            dqn.observe(Transition {
                state: s,
                action: feats[k * width..(k + 1) * width].to_vec(),
                reward: out.reward,
                next_state: env.state_features(),
                next_action_count: env.actions().len(),
                next_step: out.state.step,
                done: out.done,
                episode: ep,
            });
            if let Some(loss) = dqn.learn()? {
                losses.push(loss);
            }
            if out.done && env.bound_reached() {
                match certify(problem, &env) {
                    Some(cert) => {
                        proved = true;
                        if found.as_ref().is_none_or(|f| out.state.step < f.1) {
                            found = Some((cert, out.state.step, ProofSource::Training { episode: ep }));
                        }
                    }
                    None => {
                        env.resume();
                    }
                }
            }
        }
        outcome.episodes.push(EpisodeLog {
            episode: ep,
            steps: env.state().step,
            final_gamma: env.state().gamma,
            mean_loss: (!losses.is_empty()).then(|| losses.iter().sum::<f64>() / losses.len() as f64),
            epsilon,
            proved,
            aborted,
        });
        dqn.prune_episodes();
        if proved && config.stop_on_proof {
            break;
        }
    }

    env.reset()?;
    while !env.is_done() {
        let q = q_values(&dqn.online, &env.state_features(), &available_features(&env))?;
        let index = env.available()[argmax(&q).expect("actions available while not done")];
        let out = match env.step(index) {
            Err(EnvError::NumericFailure { .. }) => break,
            r => r?,
        };
        global += 1;
        outcome.best_gamma = outcome.best_gamma.max(out.state.gamma);
        if out.done && env.bound_reached() {
            match certify(problem, &env) {
                Some(cert) => {
                    outcome.rollout_proved = true;
                    found = Some((cert, out.state.step, ProofSource::Rollout));
                }
                None => {
                    env.resume();
                }
            }
        }
    }
    outcome.rollout_steps = env.state().step;
    outcome.rollout_trace = env.trace().to_vec();
    outcome.total_steps = global;
    outcome.model = dqn.online;
    if let Some((cert, steps, source)) = found {
        outcome.status = Status::Proved;
        outcome.certificate = Some(cert);
        outcome.proof_steps = Some(steps);
        outcome.source = Some(source);
    }
    Ok(outcome)
}

/// Proves `bound − Σ x_i ≥ 0` for `graph` modulo its edge ideal.
pub fn prove_stable_bound(graph: &Graph, bound: u64, config: &RunConfig) -> Result<ProveOutcome, ProverError> {
    let problem = Problem::stable_set(&format!("stable-set bound {bound}"), graph, Rational::from_integer(bound.into()));
    let config = config.resolve(&problem.overrides, &ConfigPatch::default())?;
    prove(&problem, &config)
}

/// Wall-clock seconds spent in `f`.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}
