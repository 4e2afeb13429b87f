use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::ptrie::{KeyError, PTrie};

/// Minimal min-priority-queue interface shared by the graph algorithms and
/// the benchmark, so the PTrie can be swapped for a heap.
pub trait MinQueue<T> {
    fn push(&mut self, key: u64, item: T) -> Result<(), KeyError>;
    fn pop_min(&mut self) -> Option<(u64, T)>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<T> MinQueue<T> for PTrie<T> {
    fn push(&mut self, key: u64, item: T) -> Result<(), KeyError> {
        self.insert(key, item)
    }

    fn pop_min(&mut self) -> Option<(u64, T)> {
        self.delete_min()
    }

    fn len(&self) -> usize {
        PTrie::len(self)
    }
}

struct HeapEntry<T> {
    key: u64,
    seq: u64,
    item: T,
}

impl<T> PartialEq for HeapEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        (self.key, self.seq) == (other.key, other.seq)
    }
}

impl<T> Eq for HeapEntry<T> {}

impl<T> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for HeapEntry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.key, self.seq).cmp(&(other.key, other.seq))
    }
}

/// Binary min-heap made stable with an arrival counter. Baseline for the
/// benchmark.
pub struct StableBinaryHeap<T> {
    heap: BinaryHeap<Reverse<HeapEntry<T>>>,
    seq: u64,
    max_key: u64,
}

impl<T> StableBinaryHeap<T> {
    pub fn new(word_bits: u32) -> Self {
        Self {
            heap: BinaryHeap::new(),
            seq: 0,
            max_key: if word_bits >= 64 { u64::MAX } else { (1 << word_bits) - 1 },
        }
    }
}

impl<T> MinQueue<T> for StableBinaryHeap<T> {
    fn push(&mut self, key: u64, item: T) -> Result<(), KeyError> {
        if key > self.max_key {
            return Err(KeyError {
                key,
                word_bits: 64 - self.max_key.leading_zeros(),
            });
        }
        self.heap.push(Reverse(HeapEntry {
            key,
            seq: self.seq,
            item,
        }));
        self.seq += 1;
        Ok(())
    }

    fn pop_min(&mut self) -> Option<(u64, T)> {
        self.heap.pop().map(|Reverse(e)| (e.key, e.item))
    }

    fn len(&self) -> usize {
        self.heap.len()
    }
}
