//! Deep Q-learning over (state, action) feature pairs.

mod adamw;
mod model;
mod network;
mod replay;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adamw::{AdamW, AdamWConfig};
pub use model::{load_model, read_model, save_model, write_model, ModelError, ModelMeta, MODEL_FORMAT_VERSION};
pub use network::{Gradients, Layer, QNetwork};
pub use replay::{EpisodeActions, EpisodeStore, ReplayBuffer, Transition};

/// Width of the state part of a network input.
pub const STATE_WIDTH: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("no actions to choose from")]
    NoActions,
    #[error("input width {found} does not match the network ({expected})")]
    InputWidth { expected: usize, found: usize },
    #[error("transition refers to unknown episode {0}")]
    DanglingEpisode(usize),
    #[error("training loss is not finite ({0})")]
    NonFiniteLoss(f64),
    #[error("network architectures differ")]
    ArchitectureMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DqnConfig {
    pub hidden: usize,
    pub layers: usize,
    pub discount: f64,
    pub batch: usize,
    pub capacity: usize,
    /// Gradient updates between target-network syncs.
    pub target_sync: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Share of the total step budget over which ε decays.
    pub eps_decay_fraction: f64,
    pub optimizer: AdamWConfig,
}

impl Default for DqnConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            layers: 4,
            discount: 0.99,
            batch: 64,
            capacity: 20_000,
            target_sync: 50,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay_fraction: 0.8,
            optimizer: AdamWConfig::default(),
        }
    }
}

/// Linear decay from `start` to `end` over `decay_steps`, constant afterwards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_steps: usize,
}

impl EpsilonSchedule {
    pub fn value(&self, step: usize) -> f64 {
        if self.decay_steps == 0 || step >= self.decay_steps {
            return self.end;
        }
        self.start + (self.end - self.start) * step as f64 / self.decay_steps as f64
    }
}

/// Counts gradient updates and reports when the target network is due.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TargetSync {
    pub every: usize,
    updates: usize,
}

impl TargetSync {
    pub fn new(every: usize) -> Self {
        Self { every: every.max(1), updates: 0 }
    }

    pub fn tick(&mut self) -> bool {
        self.updates += 1;
        self.updates.is_multiple_of(self.every)
    }

    pub fn updates(&self) -> usize {
        self.updates
    }
}

fn input_rows(state: &[f64; 2], actions: &[f64], width: usize) -> Vec<f64> {
    let count = actions.len() / width;
    let mut x = Vec::with_capacity(count * (STATE_WIDTH + width));
    for a in actions.chunks_exact(width) {
        x.extend_from_slice(state);
        x.extend_from_slice(a);
    }
    x
}

/// `Q(s, a)` for each action in the row-major feature block `actions`.
pub fn q_values(net: &QNetwork, state: &[f64; 2], actions: &[f64]) -> Result<Vec<f64>, AgentError> {
    let width = net.input_width().checked_sub(STATE_WIDTH).filter(|&w| w > 0).ok_or(AgentError::InputWidth {
        expected: net.input_width(),
        found: STATE_WIDTH,
    })?;
    if actions.len() % width != 0 {
        return Err(AgentError::InputWidth { expected: net.input_width(), found: STATE_WIDTH + actions.len() });
    }
    let rows = actions.len() / width;
    Ok(net.forward_batch(&input_rows(state, actions, width), rows))
}

/// Index of the largest value, the lowest on ties.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// ε-greedy choice among the actions in `actions`.
pub fn select_action<R: Rng>(
    net: &QNetwork,
    state: &[f64; 2],
    actions: &[f64],
    epsilon: f64,
    rng: &mut R,
) -> Result<usize, AgentError> {
    let width = net.input_width().saturating_sub(STATE_WIDTH).max(1);
    let count = actions.len() / width;
    if count == 0 {
        return Err(AgentError::NoActions);
    }
    if rng.random::<f64>() < epsilon {
        return Ok(rng.random_range(0..count));
    }
    let q = q_values(net, state, actions)?;
    Ok(argmax(&q).expect("non-empty"))
}

/// `max_{a'} Q_target(s'_i, a')` over the actions that were available
/// after each step; `None` for terminal transitions and empty action sets.
pub fn target_maxima(
    batch: &[&Transition],
    target: &QNetwork,
    store: &EpisodeStore,
) -> Result<Vec<Option<f64>>, AgentError> {
    let mut x = Vec::new();
    let mut spans = Vec::with_capacity(batch.len());
    let mut rows = 0;
    for t in batch {
        if t.done {
            spans.push(0);
            continue;
        }
        let ep = store.get(t.episode).ok_or(AgentError::DanglingEpisode(t.episode))?;
        if STATE_WIDTH + ep.width() != target.input_width() {
            return Err(AgentError::InputWidth { expected: target.input_width(), found: STATE_WIDTH + ep.width() });
        }
        let before = rows;
        for i in ep.valid(t.next_action_count, t.next_step) {
            x.extend_from_slice(&t.next_state);
            x.extend_from_slice(ep.features(i));
            rows += 1;
        }
        spans.push(rows - before);
    }
    let q = target.forward_batch(&x, rows);
    let mut at = 0;
    Ok(spans
        .into_iter()
        .map(|k| {
            let best = q[at..at + k].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            at += k;
            (k > 0).then_some(best)
        })
        .collect())
}

fn bellman(t: &Transition, discount: f64, best: Option<f64>) -> f64 {
    match best {
        Some(b) if discount != 0.0 => t.reward + discount * b,
        _ => t.reward,
    }
}

/// `y_i = r_i` for terminal transitions, otherwise
/// `r_i + δ · max_{a'} Q_target(s'_i, a')` over the actions that were
/// available after the step.
pub fn td_targets(
    batch: &[&Transition],
    target: &QNetwork,
    discount: f64,
    store: &EpisodeStore,
) -> Result<Vec<f64>, AgentError> {
    if discount == 0.0 {
        return Ok(batch.iter().map(|t| t.reward).collect());
    }
    let best = target_maxima(batch, target, store)?;
    Ok(batch.iter().zip(best).map(|(t, b)| bellman(t, discount, b)).collect())
}

/// One optimizer step on `(1/N) Σ (y_i − Q(s_i, a_i))²`; returns the loss
/// before the step.
pub fn fit(net: &mut QNetwork, opt: &mut AdamW, batch: &[&Transition], targets: &[f64]) -> Result<f64, AgentError> {
    let width = net.input_width();
    let mut x = Vec::with_capacity(batch.len() * width);
    for t in batch {
        if STATE_WIDTH + t.action.len() != width {
            return Err(AgentError::InputWidth { expected: width, found: STATE_WIDTH + t.action.len() });
        }
        x.extend_from_slice(&t.state);
        x.extend_from_slice(&t.action);
    }
    let (loss, grads) = net.loss_and_gradients(&x, targets);
    if !loss.is_finite() {
        return Err(AgentError::NonFiniteLoss(loss));
    }
    opt.step(net, &grads);
    Ok(loss)
}

/// TD targets from `target`, then one update of `net`.
pub fn train_step(
    net: &mut QNetwork,
    target: &QNetwork,
    batch: &[&Transition],
    opt: &mut AdamW,
    discount: f64,
    store: &EpisodeStore,
) -> Result<f64, AgentError> {
    if !net.same_architecture(target) {
        return Err(AgentError::ArchitectureMismatch);
    }
    let y = td_targets(batch, target, discount, store)?;
    fit(net, opt, batch, &y)
}

pub fn sync_target(net: &QNetwork, target: &mut QNetwork) -> Result<(), AgentError> {
    if !net.same_architecture(target) {
        return Err(AgentError::ArchitectureMismatch);
    }
    target.copy_from(net);
    Ok(())
}

/// Online and target networks with their optimizer, replay buffer and RNG.
pub struct Dqn {
    pub config: DqnConfig,
    pub online: QNetwork,
    target: QNetwork,
    pub optimizer: AdamW,
    pub sync: TargetSync,
    pub buffer: ReplayBuffer,
    pub episodes: EpisodeStore,
    pub rng: ChaCha8Rng,
    pub seed: u64,
    /// Gradient-update counts at which the target network was synced.
    pub sync_log: Vec<usize>,
    /// Target maxima keyed by `(episode, next_step)`, valid until the next sync.
    target_max: HashMap<(usize, usize), Option<f64>>,
}

impl Dqn {
    pub fn new(nvars: usize, config: DqnConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let online = QNetwork::new(STATE_WIDTH + 2 * nvars, config.hidden, config.layers, &mut rng);
        Self::with_network(online, config, seed, rng)
    }

    pub fn with_network(online: QNetwork, config: DqnConfig, seed: u64, rng: ChaCha8Rng) -> Self {
        let target = online.clone();
        Self {
            optimizer: AdamW::new(config.optimizer, online.param_count()),
            sync: TargetSync::new(config.target_sync),
            buffer: ReplayBuffer::new(config.capacity),
            episodes: EpisodeStore::default(),
            online,
            target,
            rng,
            seed,
            config,
            sync_log: Vec::new(),
            target_max: HashMap::new(),
        }
    }

    pub fn select(&mut self, state: &[f64; 2], actions: &[f64], epsilon: f64) -> Result<usize, AgentError> {
        select_action(&self.online, state, actions, epsilon, &mut self.rng)
    }

    pub fn observe(&mut self, t: Transition) {
        self.buffer.push(t);
    }

    /// One update once the buffer holds a full batch; `None` before that.
    pub fn learn(&mut self) -> Result<Option<f64>, AgentError> {
        if self.buffer.len() < self.config.batch.max(1) {
            return Ok(None);
        }
        let batch = self.buffer.sample(self.config.batch, &mut self.rng);
        if !self.online.same_architecture(&self.target) {
            return Err(AgentError::ArchitectureMismatch);
        }
        let discount = self.config.discount;
        let missing: Vec<&Transition> = batch
            .iter()
            .copied()
            .filter(|t| discount != 0.0 && !self.target_max.contains_key(&(t.episode, t.next_step)))
            .collect();
        let fresh = target_maxima(&missing, &self.target, &self.episodes)?;
        for (t, best) in missing.iter().zip(fresh) {
            self.target_max.insert((t.episode, t.next_step), best);
        }
        let y: Vec<f64> = batch
            .iter()
            .map(|t| bellman(t, discount, self.target_max.get(&(t.episode, t.next_step)).copied().flatten()))
            .collect();
        let loss = fit(&mut self.online, &mut self.optimizer, &batch, &y)?;
        if self.sync.tick() {
            self.target.copy_from(&self.online);
            self.target_max.clear();
            self.sync_log.push(self.sync.updates());
        }
        Ok(Some(loss))
    }

    pub fn target(&self) -> &QNetwork {
        &self.target
    }

    /// Drops action lists no stored transition refers to.
    pub fn prune_episodes(&mut self) {
        if let Some(first) = self.buffer.oldest_episode() {
            self.episodes.forget_before(first);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule() {
        let s = EpsilonSchedule { start: 1.0, end: 0.05, decay_steps: 100 };
        assert_eq!(s.value(0), 1.0);
        assert!((s.value(50) - 0.525).abs() < 1e-15);
        assert_eq!(s.value(100), 0.05);
        assert_eq!(s.value(1000), 0.05);
    }

    #[test]
    fn sync_every_c() {
        let mut s = TargetSync::new(5);
        let fired: Vec<usize> = (1..=20).filter(|_| s.tick()).collect();
        assert_eq!(fired.len(), 4);
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), Some(1));
        assert_eq!(argmax(&[]), None);
    }

    #[test]
    fn greedy_with_zero_epsilon() {
        let mut net = QNetwork::zeros(&[4, 1]);
        net.set_parameters(&[0.0, 0.0, 1.0, -1.0, 0.0]);
        let actions = [0.0, 1.0, 1.0, 0.0, 0.5, 0.5];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            assert_eq!(select_action(&net, &[0.0, 0.0], &actions, 0.0, &mut rng), Ok(1));
        }
        assert_eq!(select_action(&net, &[0.0, 0.0], &[], 0.0, &mut rng), Err(AgentError::NoActions));
    }

    #[test]
    fn cached_maxima_match_plain_updates() {
        let config = DqnConfig { hidden: 6, layers: 2, batch: 5, target_sync: 4, ..DqnConfig::default() };
        let mut dqn = Dqn::new(1, config.clone(), 3);
        let mut actions = EpisodeActions::new(2);
        for k in 0..6 {
            actions.push(&[k as f64 / 6.0, 1.0 - k as f64 / 6.0]);
        }
        actions.consume(2, 3);
        dqn.episodes.insert(0, actions);
        for i in 0..12 {
            dqn.observe(Transition {
                state: [-1.0 + i as f64 / 12.0, 0.0],
                action: vec![0.5, 0.5],
                reward: if i % 3 == 0 { 0.2 } else { -0.05 },
                next_state: [-1.0 + (i + 1) as f64 / 12.0, 0.1],
                next_action_count: 2 + i % 5,
                next_step: i + 1,
                done: i == 11,
                episode: 0,
            });
        }
        let mut online = dqn.online.clone();
        let mut target = dqn.target.clone();
        let mut opt = dqn.optimizer.clone();
        let mut rng = dqn.rng.clone();
        let mut sync = TargetSync::new(config.target_sync);
        for _ in 0..20 {
            let cached = dqn.learn().unwrap().unwrap();
            let batch = dqn.buffer.sample(config.batch, &mut rng);
            let plain = train_step(&mut online, &target, &batch, &mut opt, config.discount, &dqn.episodes).unwrap();
            if sync.tick() {
                sync_target(&online, &mut target).unwrap();
            }
            assert_eq!(cached.to_bits(), plain.to_bits());
            assert_eq!(dqn.online, online);
        }
    }
}
