//! Uniform random action selection as a baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certify, new_env, ProverError, RunConfig};
use crate::environment::EnvError;
use crate::problem::Problem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub steps: usize,
    pub proved: bool,
    pub final_gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub max: usize,
    pub min: usize,
    pub avg: f64,
}

impl StepStats {
    pub fn from_steps(steps: &[usize]) -> Option<Self> {
        let max = *steps.iter().max()?;
        let min = *steps.iter().min()?;
        let avg = steps.iter().sum::<usize>() as f64 / steps.len() as f64;
        Some(Self { max, min, avg })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSearchReport {
    pub problem: String,
    pub max_steps: usize,
    pub trials: Vec<TrialRecord>,
    /// Over proved trials only.
    pub stats: Option<StepStats>,
    pub failures: usize,
}

impl RandomSearchReport {
    fn from_trials(problem: &str, max_steps: usize, mut trials: Vec<TrialRecord>) -> Self {
        trials.sort_by_key(|t| t.trial);
        let steps: Vec<usize> = trials.iter().filter(|t| t.proved).map(|t| t.steps).collect();
        let failures = trials.len() - steps.len();
        Self { problem: problem.to_string(), max_steps, stats: StepStats::from_steps(&steps), failures, trials }
    }

    /// One JSON object per trial.
    pub fn trial_log(&self) -> String {
        self.trials
            .iter()
            .map(|t| serde_json::to_string(t).expect("trial serializes") + "\n")
            .collect()
    }
}

/// Statistics recomputed from a [`RandomSearchReport::trial_log`].
pub fn stats_from_log(log: &str) -> Result<Option<StepStats>, serde_json::Error> {
    let mut steps = Vec::new();
    for line in log.lines().filter(|l| !l.trim().is_empty()) {
        let t: TrialRecord = serde_json::from_str(line)?;
        if t.proved {
            steps.push(t.steps);
        }
    }
    Ok(StepStats::from_steps(&steps))
}

fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(trial as u64)
}

fn run_trial(problem: &Problem, config: &RunConfig, trial: usize) -> Result<TrialRecord, ProverError> {
    let seed = trial_seed(config.seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut env = new_env(problem, config)?;
    let mut proved = env.is_done() && certify(problem, &env).is_some();
    while !proved && !env.is_done() {
        let avail = env.available();
        let index = avail[rng.random_range(0..avail.len())];
        let out = match env.step(index) {
            Err(EnvError::NumericFailure { .. }) => break,
            r => r?,
        };
        if out.done && env.bound_reached() {
            if certify(problem, &env).is_some() {
                proved = true;
            } else {
                env.resume();
            }
        }
    }
    Ok(TrialRecord { trial, seed, steps: env.state().step, proved, final_gamma: env.state().gamma })
}

/// `trials` independent episodes with uniformly random actions.
pub fn random_search(problem: &Problem, config: &RunConfig, trials: usize) -> Result<RandomSearchReport, ProverError> {
    config.validate()?;
    let records = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(problem, config, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RandomSearchReport::from_trials(&problem.name, config.env.max_steps, records))
}
