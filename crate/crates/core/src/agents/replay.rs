use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};

/// FIFO experience buffer with uniform sampling (with replacement).
#[derive(Debug, Clone)]
pub struct ReplayBuffer<T> {
    capacity: usize,
    items: VecDeque<T>,
}

impl<T: Clone> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::param("capacity", "must be > 0"));
        }
        Ok(Self {
            capacity,
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
        })
    }

    /// Appends, evicting the oldest item when full.
    pub fn push(&mut self, item: T) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(item);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, slot: usize) -> Option<&T> {
        self.items.get(slot)
    }

    /// Uniform slot index; `None` when empty.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.items.is_empty() {
            None
        } else {
            Some(rng.random_range(0..self.items.len()))
        }
    }

    /// `count` uniform draws with replacement.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<T> {
        if self.items.is_empty() {
            return Vec::new();
        }
        (0..count)
            .map(|_| self.items[rng.random_range(0..self.items.len())].clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    #[test]
    fn fifo_eviction() {
        let mut buf = ReplayBuffer::new(3).unwrap();
        for i in 0..5 {
            buf.push(i);
        }
        assert_eq!(buf.len(), 3);
        assert_eq!(
            (0..3).map(|s| *buf.get(s).unwrap()).collect::<Vec<_>>(),
            vec![2, 3, 4]
        );
    }

    #[test]
    fn empty_and_zero_capacity() {
        assert!(ReplayBuffer::<u8>::new(0).is_err());
        let buf = ReplayBuffer::<u8>::new(2).unwrap();
        let mut rng = RngStream::named(0, "replay");
        assert!(buf.sample(5, &mut rng).is_empty());
        assert_eq!(buf.sample_index(&mut rng), None);
    }

    #[test]
    fn slot_frequencies_are_uniform() {
        let n = 10;
        let mut buf = ReplayBuffer::new(n).unwrap();
        for i in 0..n {
            buf.push(i);
        }
        let mut rng = RngStream::named(5, "replay");
        let draws = 100_000;
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            counts[buf.sample_index(&mut rng).unwrap()] += 1;
        }
        let p = 1.0 / n as f64;
        let tol = 5.0 * (p * (1.0 - p) / draws as f64).sqrt();
        for c in counts {
            assert!((c as f64 / draws as f64 - p).abs() <= tol);
        }
    }

    proptest! {
        #[test]
        fn never_exceeds_capacity(cap in 1usize..20, pushes in 0usize..100) {
            let mut buf = ReplayBuffer::new(cap).unwrap();
            for i in 0..pushes {
                buf.push(i);
                prop_assert!(buf.len() <= cap);
            }
            prop_assert_eq!(buf.len(), pushes.min(cap));
            if pushes > 0 {
                prop_assert_eq!(*buf.get(buf.len() - 1).unwrap(), pushes - 1);
            }
        }
    }
}
