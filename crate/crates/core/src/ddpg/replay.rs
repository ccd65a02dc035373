use std::collections::VecDeque;

use rand::Rng;

use crate::env::{AllocationAction, Observation};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Observation,
    pub action: AllocationAction,
    pub reward: f64,
    pub next_state: Observation,
}

/// Bounded FIFO experience memory.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    storage: VecDeque<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            storage: VecDeque::with_capacity(capacity.min(1 << 16)),
        }
    }

    /// Appends `t`, evicting the oldest transition when full.
    pub fn store(&mut self, t: Transition) {
        if self.capacity == 0 {
            return;
        }
        if self.storage.len() == self.capacity {
            self.storage.pop_front();
        }
        self.storage.push_back(t);
    }

    /// Draws `n` distinct transitions uniformly; `None` while fewer than `n`
    /// are stored.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Option<Vec<&Transition>> {
        if n == 0 || self.storage.len() < n {
            return None;
        }
        let idx = rand::seq::index::sample(rng, self.storage.len(), n);
        Some(idx.iter().map(|i| &self.storage[i]).collect())
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn clear(&mut self) {
        self.storage.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.storage.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{rng_for, Stream};

    fn tr(r: f64) -> Transition {
        Transition {
            state: Observation::zeros(1),
            action: AllocationAction::zeros(1),
            reward: r,
            next_state: Observation::zeros(1),
        }
    }

    #[test]
    fn fifo_eviction() {
        let mut b = ReplayBuffer::new(2);
        for r in [1.0, 2.0, 3.0] {
            b.store(tr(r));
        }
        assert_eq!(b.len(), 2);
        let rewards: Vec<f64> = b.iter().map(|t| t.reward).collect();
        assert_eq!(rewards, vec![2.0, 3.0]);
    }

    #[test]
    fn underfilled_is_not_ready() {
        let mut b = ReplayBuffer::new(10);
        b.store(tr(0.0));
        assert!(b.sample(2, &mut rng_for(0, Stream::Agent(0))).is_none());
    }

    #[test]
    fn exhaustive_draw_is_a_permutation() {
        let mut b = ReplayBuffer::new(10);
        for r in 0..7 {
            b.store(tr(r as f64));
        }
        let mut got: Vec<f64> = b
            .sample(7, &mut rng_for(0, Stream::Agent(0)))
            .unwrap()
            .iter()
            .map(|t| t.reward)
            .collect();
        got.sort_by(f64::total_cmp);
        assert_eq!(got, (0..7).map(|r| r as f64).collect::<Vec<_>>());
    }

    #[test]
    fn uniform_over_many_draws() {
        let mut b = ReplayBuffer::new(10);
        for r in 0..10 {
            b.store(tr(r as f64));
        }
        let mut rng = rng_for(11, Stream::Agent(0));
        let draws = 100_000;
        let mut counts = [0usize; 10];
        for _ in 0..draws {
            let t = b.sample(1, &mut rng).unwrap()[0];
            counts[t.reward as usize] += 1;
        }
        // Binomial(1e5, 0.1): sd = sqrt(1e5 * 0.1 * 0.9) ~= 94.9
        let sd = (draws as f64 * 0.1 * 0.9).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 / 10.0).abs() < 3.0 * sd, "{counts:?}");
        }
    }
}
