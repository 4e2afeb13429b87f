//! Mapping application weights onto PTrie keys.
//!
//! Unsigned weights embed as themselves. Signed weights use two tries:
//! non-negative values go to one keyed by value, negative values to another
//! keyed by magnitude. The most negative value is then the *maximum* of the
//! negative trie, so extraction drains that trie from its tail before
//! touching the non-negative one.

use thiserror::Error;

use crate::config::PTrieConfig;
use crate::ptrie::{PTrie, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("value {value} does not fit in {bits} bits")]
    Unsigned { value: u64, bits: u32 },
    #[error("magnitude of {value} does not fit in {bits} bits")]
    Signed { value: i64, bits: u32 },
}

/// Identity embedding of `w` into an `M`-bit key; order preserving.
pub fn encode_unsigned(w: u64, config: &PTrieConfig) -> Result<u64, CodecError> {
    if config.contains(w) {
        Ok(w)
    } else {
        Err(CodecError::Unsigned {
            value: w,
            bits: config.word_bits(),
        })
    }
}

/// Priority queue over signed integers whose magnitude fits in `M - 1` bits.
#[derive(Debug, Clone)]
pub struct SignedPTrie<T> {
    pos: PTrie<T>,
    neg: PTrie<T>,
    magnitude_bits: u32,
}

impl<T> SignedPTrie<T> {
    pub fn new(config: PTrieConfig) -> Self {
        Self {
            pos: PTrie::new(config),
            neg: PTrie::new(config),
            magnitude_bits: config.word_bits() - 1,
        }
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn magnitude(&self, v: i64) -> Result<u64, CodecError> {
        let m = v.unsigned_abs();
        if self.magnitude_bits < 64 && m >> self.magnitude_bits != 0 {
            return Err(CodecError::Signed {
                value: v,
                bits: self.magnitude_bits,
            });
        }
        Ok(m)
    }

    pub fn insert(&mut self, v: i64, payload: T) -> Result<(), CodecError> {
        let m = self.magnitude(v)?;
        let trie = if v < 0 { &mut self.neg } else { &mut self.pos };
        trie.insert(m, payload).expect("magnitude checked against M - 1 bits");
        Ok(())
    }

    pub fn minimum(&self) -> Option<(i64, &T)> {
        match self.neg.maximum() {
            Some((m, p)) => Some((-(m as i64), p)),
            None => self.pos.minimum().map(|(k, p)| (k as i64, p)),
        }
    }

    pub fn delete_min(&mut self) -> Option<(i64, T)> {
        match self.neg.delete_max() {
            Some((m, p)) => Some((-(m as i64), p)),
            None => self.pos.delete_min().map(|(k, p)| (k as i64, p)),
        }
    }

    pub fn remove(&mut self, v: i64) -> Option<T> {
        let m = self.magnitude(v).ok()?;
        if v < 0 {
            self.neg.remove(m)
        } else {
            self.pos.remove(m)
        }
    }

    pub fn search(&self, v: i64) -> bool {
        match self.magnitude(v) {
            Ok(m) if v < 0 => self.neg.search(m),
            Ok(m) => self.pos.search(m),
            Err(_) => false,
        }
    }

    /// Validates both tries; the first violation wins.
    pub fn validate(&self) -> ValidationReport {
        let neg = self.neg.validate();
        if !neg.is_ok() {
            return neg;
        }
        self.pos.validate()
    }

    /// Entries in ascending value order, stable within equal values.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        let mut neg_leaf = self.neg.last();
        let negatives = std::iter::from_fn(move || {
            let leaf = neg_leaf.take()?;
            neg_leaf = leaf.prev();
            Some(leaf)
        })
        .flat_map(|leaf| {
            let v = -(leaf.key() as i64);
            leaf.payloads().map(move |p| (v, p))
        });
        negatives.chain(self.pos.iter().map(|(k, p)| (k as i64, p)))
    }
}
