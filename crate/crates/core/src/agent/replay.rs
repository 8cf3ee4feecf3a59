//! Replay buffer and the per-episode action lists that transitions refer to.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub state: [f64; 2],
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: [f64; 2],
    /// Length of the episode's action list after the step.
    pub next_action_count: usize,
    /// Step counter after the step.
    pub next_step: usize,
    pub done: bool,
    pub episode: usize,
}

/// Fixed-capacity ring buffer.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self { capacity, items: Vec::new(), head: 0 }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.head] = t;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// `min(n, len)` distinct transitions, uniformly.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<&Transition> {
        let k = n.min(self.items.len());
        index::sample(rng, self.items.len(), k).into_iter().map(|i| &self.items[i]).collect()
    }

    pub fn oldest_episode(&self) -> Option<usize> {
        self.items.iter().map(|t| t.episode).min()
    }
}

/// Append-only action features of one episode, with the step at which
/// each action was taken.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpisodeActions {
    width: usize,
    features: Vec<f64>,
    consumed_at: Vec<Option<usize>>,
}

impl EpisodeActions {
    pub fn new(width: usize) -> Self {
        Self { width, features: Vec::new(), consumed_at: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.consumed_at.len()
    }

    pub fn is_empty(&self) -> bool {
        self.consumed_at.is_empty()
    }

    pub fn push(&mut self, features: &[f64]) {
        assert_eq!(features.len(), self.width);
        self.features.extend_from_slice(features);
        self.consumed_at.push(None);
    }

    pub fn consume(&mut self, index: usize, step: usize) {
        self.consumed_at[index] = Some(step);
    }

    pub fn features(&self, index: usize) -> &[f64] {
        &self.features[index * self.width..(index + 1) * self.width]
    }

    /// Indices among the first `count` that were still available after `step` steps.
    pub fn valid(&self, count: usize, step: usize) -> impl Iterator<Item = usize> + '_ {
        (0..count.min(self.len())).filter(move |&i| self.consumed_at[i].is_none_or(|s| s > step))
    }
}

#[derive(Clone, Debug, Default)]
pub struct EpisodeStore {
    episodes: BTreeMap<usize, EpisodeActions>,
}

impl EpisodeStore {
    pub fn insert(&mut self, episode: usize, actions: EpisodeActions) {
        self.episodes.insert(episode, actions);
    }

    pub fn get(&self, episode: usize) -> Option<&EpisodeActions> {
        self.episodes.get(&episode)
    }

    pub fn get_mut(&mut self, episode: usize) -> Option<&mut EpisodeActions> {
        self.episodes.get_mut(&episode)
    }

    /// Drops episodes before `first`.
    pub fn forget_before(&mut self, first: usize) {
        self.episodes = self.episodes.split_off(&first);
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(i: usize) -> Transition {
        Transition {
            state: [i as f64, 0.0],
            action: vec![],
            reward: 0.0,
            next_state: [0.0; 2],
            next_action_count: 0,
            next_step: 0,
            done: false,
            episode: i,
        }
    }

    #[test]
    fn ring_keeps_most_recent() {
        let mut b = ReplayBuffer::new(3);
        for i in 0..7 {
            b.push(t(i));
        }
        assert_eq!(b.len(), 3);
        let mut kept: Vec<usize> = b.iter().map(|t| t.episode).collect();
        kept.sort();
        assert_eq!(kept, vec![4, 5, 6]);
        assert_eq!(b.oldest_episode(), Some(4));
    }

    #[test]
    fn samples_are_distinct() {
        let mut b = ReplayBuffer::new(50);
        for i in 0..50 {
            b.push(t(i));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ids: Vec<usize> = b.sample(20, &mut rng).iter().map(|t| t.episode).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 20);
        assert_eq!(b.sample(80, &mut rng).len(), 50);
    }

    #[test]
    fn validity_respects_prefix_and_consumption() {
        let mut e = EpisodeActions::new(1);
        for k in 0..4 {
            e.push(&[k as f64]);
        }
        e.consume(1, 1);
        e.consume(3, 2);
        assert_eq!(e.valid(3, 1).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(e.valid(4, 1).collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(e.valid(4, 2).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(e.valid(4, 0).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }
}
