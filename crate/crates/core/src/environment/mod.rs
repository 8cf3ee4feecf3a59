//! The proof-search environment: memory, actions, LP-driven state and reward.

use std::collections::HashSet;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kronfft::{mul_with, MulStrategy};
use crate::lp::{LpSolution, LpSolver, LpStatus, NumericLp, SimplexSolver};
use crate::poly::{Generator, KrivineTerm, Polynomial};
use crate::problem::Problem;
use crate::stableset::EdgeIdeal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvError {
    #[error("action {index} is not available (valid actions: {available})")]
    InvalidAction { index: usize, available: usize },
    #[error("the episode is already finished")]
    Finished,
    #[error("LP solver failed numerically at step {step}")]
    NumericFailure { step: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub max_steps: usize,
    /// Reward when the bound does not move.
    pub eps_penalty: f64,
    pub reward_tol: f64,
    pub success_tol: f64,
    /// Stand-in bound when the LP is infeasible.
    pub infeasible_gamma: f64,
    /// Largest admissible lemma degree (after reduction for stable-set problems).
    pub lemma_degree_cap: Option<u32>,
    /// Initial memory degree `k`; defaults to `deg f`.
    pub init_degree: Option<u32>,
    pub mul: MulStrategy,
    /// Keep memory and actions across resets instead of starting afresh.
    pub persist_memory: bool,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            max_steps: 400,
            eps_penalty: -0.05,
            reward_tol: 1e-9,
            success_tol: 1e-8,
            infeasible_gamma: -1e9,
            lemma_degree_cap: None,
            init_degree: None,
            mul: MulStrategy::Auto,
            persist_memory: false,
        }
    }
}

/// How a memory element or action came about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    Initial,
    Product { parent: usize, generator: Generator },
}

#[derive(Clone, Debug)]
pub struct MemoryElement {
    pub term: KrivineTerm,
    /// The expansion of `term`, reduced modulo the problem's ideal if any.
    pub poly: Polynomial,
    pub origin: Origin,
}

#[derive(Clone, Debug)]
pub struct Action {
    pub term: KrivineTerm,
    pub poly: Polynomial,
    /// Memory index of the parent.
    pub parent: usize,
    pub generator: Generator,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub gamma: f64,
    pub kappa: usize,
    pub gamma0: f64,
    pub step: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub state: State,
    pub reward: f64,
    pub done: bool,
}

/// One line of the episode trace log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub action: usize,
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub gamma: f64,
    pub reward: f64,
    pub memory: usize,
    pub actions: usize,
}

/// All Krivine terms with `1 ≤ |α| + |β| ≤ k`, graded by degree.
pub fn krivine_terms_up_to(n: usize, k: u32) -> Vec<KrivineTerm> {
    crate::poly::monomial_basis(2 * n, k)
        .into_iter()
        .skip(1)
        .map(|e| {
            let s = e.as_slice();
            KrivineTerm::new(s[..n].to_vec(), s[n..].to_vec())
        })
        .collect()
}

/// `[α / cap ‖ β / cap]`.
pub fn action_features(term: &KrivineTerm, cap: u32) -> Vec<f64> {
    let c = f64::from(cap.max(1));
    term.alpha
        .as_slice()
        .iter()
        .chain(term.beta.as_slice())
        .map(|&k| f64::from(k) / c)
        .collect()
}

pub struct Environment {
    target: Polynomial,
    ideal: Option<EdgeIdeal>,
    config: EnvConfig,
    solver: Arc<dyn LpSolver>,
    feature_cap: u32,
    memory: Vec<MemoryElement>,
    actions: Vec<Action>,
    consumed_at: Vec<Option<usize>>,
    available: Vec<usize>,
    seen: HashSet<Polynomial>,
    lp: NumericLp,
    solution: LpSolution,
    state: State,
    done: bool,
    trace: Vec<StepRecord>,
}

impl Environment {
    pub fn new(problem: &Problem, config: EnvConfig) -> Result<Self, EnvError> {
        Self::with_solver(problem, config, Arc::new(SimplexSolver::default()))
    }

    pub fn with_solver(problem: &Problem, config: EnvConfig, solver: Arc<dyn LpSolver>) -> Result<Self, EnvError> {
        let target = problem.target.clone();
        let deg = target.degree();
        let feature_cap = deg + (config.max_steps as u32).min(deg.max(2));
        let mut env = Self {
            lp: NumericLp::new(target.nvars()),
            target,
            ideal: problem.ideal.clone(),
            config,
            solver,
            feature_cap,
            memory: Vec::new(),
            actions: Vec::new(),
            consumed_at: Vec::new(),
            available: Vec::new(),
            seen: HashSet::new(),
            solution: LpSolution::failed(LpStatus::Infeasible, 0, 0),
            state: State { gamma: 0.0, kappa: 0, gamma0: 0.0, step: 0 },
            done: false,
            trace: Vec::new(),
        };
        env.rebuild()?;
        Ok(env)
    }

    fn reduce(&self, p: Polynomial) -> Polynomial {
        match &self.ideal {
            Some(ideal) => ideal.reduce(&p),
            None => p,
        }
    }

    fn admissible(&self, p: &Polynomial) -> bool {
        !p.is_zero() && self.config.lemma_degree_cap.is_none_or(|cap| p.degree() <= cap) && !self.seen.contains(p)
    }

    fn rebuild(&mut self) -> Result<(), EnvError> {
        let n = self.target.nvars();
        let k = self.config.init_degree.unwrap_or(self.target.degree()).max(1);
        self.memory.clear();
        self.actions.clear();
        self.consumed_at.clear();
        self.available.clear();
        self.seen.clear();
        self.lp = NumericLp::new(n);
        self.lp.set_target(&self.target);
        for term in krivine_terms_up_to(n, k) {
            let poly = self.reduce(term.expand());
            if self.admissible(&poly) {
                self.push_memory(MemoryElement { term, poly, origin: Origin::Initial });
            }
        }
        for i in 0..self.memory.len() {
            self.expand_from(i);
        }
        self.start_episode()
    }

    fn start_episode(&mut self) -> Result<(), EnvError> {
        self.trace.clear();
        self.done = false;
        let gamma = self.solve(0)?;
        self.state = State { gamma, kappa: 0, gamma0: gamma, step: 0 };
        self.done = gamma >= -self.config.success_tol || self.available.is_empty();
        Ok(())
    }

    /// Starts a new episode. Memory and actions are rebuilt from scratch
    /// unless `persist_memory` is set.
    pub fn reset(&mut self) -> Result<State, EnvError> {
        if self.config.persist_memory {
            self.start_episode()?;
        } else {
            self.rebuild()?;
        }
        Ok(self.state)
    }

    fn push_memory(&mut self, el: MemoryElement) {
        self.seen.insert(el.poly.clone());
        self.lp.push_column(&el.poly);
        self.memory.push(el);
    }

    fn expand_from(&mut self, parent: usize) {
        let n = self.target.nvars();
        for g in Generator::all(n) {
            let m = &self.memory[parent];
            let term = m.term.times(g);
            let poly = self.reduce(mul_with(&m.poly, &g.polynomial(n), self.config.mul));
            if self.admissible(&poly) {
                self.seen.insert(poly.clone());
                self.available.push(self.actions.len());
                self.actions.push(Action { term, poly, parent, generator: g });
                self.consumed_at.push(None);
            }
        }
    }

    fn solve(&mut self, step: usize) -> Result<f64, EnvError> {
        self.solution = self.solver.solve(&self.lp);
        match self.solution.status {
            LpStatus::Optimal => Ok(self.solution.gamma),
            LpStatus::Infeasible => Ok(self.config.infeasible_gamma),
            LpStatus::NumericFailure => Err(EnvError::NumericFailure { step }),
        }
    }

    /// Moves action `index` into memory, re-solves the LP and extends the
    /// action list with the products of the new element.
    pub fn step(&mut self, index: usize) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::Finished);
        }
        let pos = self
            .available
            .binary_search(&index)
            .map_err(|_| EnvError::InvalidAction { index, available: self.available.len() })?;
        self.available.remove(pos);
        let step = self.state.step + 1;
        self.consumed_at[index] = Some(step);
        let a = self.actions[index].clone();
        self.push_memory(MemoryElement {
            term: a.term.clone(),
            poly: a.poly,
            origin: Origin::Product { parent: a.parent, generator: a.generator },
        });
        self.expand_from(self.memory.len() - 1);

        let gamma = self.solve(step)?;
        let delta = gamma - self.state.gamma;
        let norm = if self.state.gamma0.abs() < 1e-12 { 1.0 } else { self.state.gamma0.abs() };
        let (reward, kappa) = if delta.abs() > self.config.reward_tol {
            (delta / norm, 0)
        } else {
            (self.config.eps_penalty, self.state.kappa + 1)
        };
        self.state = State { gamma, kappa, gamma0: self.state.gamma0, step };
        self.done = gamma >= -self.config.success_tol || step >= self.config.max_steps || self.available.is_empty();
        self.trace.push(StepRecord {
            step,
            action: index,
            alpha: a.term.alpha.as_slice().to_vec(),
            beta: a.term.beta.as_slice().to_vec(),
            gamma,
            reward,
            memory: self.memory.len(),
            actions: self.available.len(),
        });
        Ok(StepOutcome { state: self.state, reward, done: self.done })
    }

    /// Reopens an episode that stopped on a bound that could not be
    /// certified, if steps and actions remain.
    pub fn resume(&mut self) -> bool {
        if self.state.step < self.config.max_steps && !self.available.is_empty() {
            self.done = false;
        }
        !self.done
    }

    pub fn state(&self) -> State {
        self.state
    }

    /// `[γ / |γ0|, κ / Maxstep]`.
    pub fn state_features(&self) -> [f64; 2] {
        let norm = if self.state.gamma0.abs() < 1e-12 { 1.0 } else { self.state.gamma0.abs() };
        [self.state.gamma / norm, self.state.kappa as f64 / self.config.max_steps.max(1) as f64]
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// True when the float bound clears the success tolerance.
    pub fn bound_reached(&self) -> bool {
        self.solution.status == LpStatus::Optimal && self.state.gamma >= -self.config.success_tol
    }

    pub fn target(&self) -> &Polynomial {
        &self.target
    }

    pub fn ideal(&self) -> Option<&EdgeIdeal> {
        self.ideal.as_ref()
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn feature_cap(&self) -> u32 {
        self.feature_cap
    }

    pub fn memory(&self) -> &[MemoryElement] {
        &self.memory
    }

    /// Every action ever created in this episode; indices are stable.
    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    /// Indices of actions that can still be taken, ascending.
    pub fn available(&self) -> &[usize] {
        &self.available
    }

    /// Step at which each action was taken, if it was.
    pub fn consumed_at(&self) -> &[Option<usize>] {
        &self.consumed_at
    }

    pub fn action_features(&self, index: usize) -> Vec<f64> {
        action_features(&self.actions[index].term, self.feature_cap)
    }

    pub fn solution(&self) -> &LpSolution {
        &self.solution
    }

    pub fn trace(&self) -> &[StepRecord] {
        &self.trace
    }

    pub fn write_trace<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.trace {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{binomial, Rational};

    #[test]
    fn initial_memory_size_matches_closed_form() {
        for (n, k) in [(1, 1), (2, 2), (3, 2), (5, 4)] {
            assert_eq!(krivine_terms_up_to(n, k).len() as u128, binomial((2 * n) as u64 + k as u64, (2 * n) as u64) - 1);
        }
    }

    #[test]
    fn single_variable_actions() {
        // memory {x1, 1-x1}; products x1^2, x1(1-x1), (1-x1)^2
        let p = Problem::on_unit_cube("t", Polynomial::from_i64(1, &[(1, &[1]), (-2, &[0])]));
        let env = Environment::new(&p, EnvConfig::default()).unwrap();
        assert_eq!(env.memory().len(), 2);
        assert_eq!(env.actions().len(), 3);
    }

    #[test]
    fn features() {
        let t = KrivineTerm::new(vec![2, 0], vec![0, 1]);
        assert_eq!(action_features(&t, 4), vec![0.5, 0.0, 0.0, 0.25]);
        assert_eq!(action_features(&KrivineTerm::one(2), 4), vec![0.0; 4]);
    }

    #[test]
    fn constant_target_is_done_immediately() {
        let p = Problem::on_unit_cube("one", Polynomial::one(1));
        let env = Environment::new(&p, EnvConfig::default()).unwrap();
        assert!(env.is_done());
        assert!(env.bound_reached());
        assert!((env.state().gamma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_benchmark_action_count() {
        let p = crate::problem::benchmark("C1").unwrap();
        let env = Environment::new(&p, EnvConfig::default()).unwrap();
        assert_eq!(env.memory().len(), 14);
        assert_eq!(env.available().len(), 20);
    }

    #[test]
    fn triangle_bound_in_two_steps() {
        use crate::stableset::Graph;
        let p = Problem::stable_set("k3", &Graph::complete(3), Rational::from_integer(1.into()));
        let cfg = EnvConfig { lemma_degree_cap: Some(2), ..EnvConfig::default() };
        let mut env = Environment::new(&p, cfg).unwrap();
        assert_eq!(env.memory().len(), 6);
        assert!(!env.is_done());
        // (1-x1)(1-x2) reduces to 1 - x1 - x2, then (1-x1)(1-x2)(1-x3) to 1 - x1 - x2 - x3
        let first = (0..env.actions().len())
            .find(|&i| env.actions()[i].term == KrivineTerm::new(vec![0, 0, 0], vec![1, 1, 0]))
            .unwrap();
        env.step(first).unwrap();
        let second = (0..env.actions().len())
            .find(|&i| env.actions()[i].term == KrivineTerm::new(vec![0, 0, 0], vec![1, 1, 1]))
            .unwrap();
        let out = env.step(second).unwrap();
        assert!(out.done);
        assert!(env.bound_reached());
    }
}
