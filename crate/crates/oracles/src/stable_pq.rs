use std::fmt::Debug;

use crate::OracleVerdict;

/// A priority-queue operation, replayable against any implementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op<P> {
    Insert(u64, P),
    DeleteMin,
    Remove(u64),
    Search(u64),
}

/// What an operation returned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<P> {
    Inserted,
    Extracted(Option<(u64, P)>),
    Removed(Option<P>),
    Found(bool),
}

/// Sorted vector of `(key, payload)`; a new entry goes after every entry
/// with a key `<=` its own, so equal keys keep arrival order.
#[derive(Debug, Clone, Default)]
pub struct StableSortedList<P> {
    entries: Vec<(u64, P)>,
}

impl<P> StableSortedList<P> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, key: u64, payload: P) {
        let pos = self
            .entries
            .iter()
            .position(|(k, _)| *k > key)
            .unwrap_or(self.entries.len());
        self.entries.insert(pos, (key, payload));
    }

    pub fn delete_min(&mut self) -> Option<(u64, P)> {
        if self.entries.is_empty() {
            None
        } else {
            Some(self.entries.remove(0))
        }
    }

    /// Oldest payload with this key.
    pub fn remove(&mut self, key: u64) -> Option<P> {
        let pos = self.entries.iter().position(|(k, _)| *k == key)?;
        Some(self.entries.remove(pos).1)
    }

    pub fn search(&self, key: u64) -> bool {
        self.entries.iter().any(|(k, _)| *k == key)
    }

    pub fn min(&self) -> Option<&(u64, P)> {
        self.entries.first()
    }

    pub fn entries(&self) -> &[(u64, P)] {
        &self.entries
    }

    pub fn apply(&mut self, op: Op<P>) -> Outcome<P> {
        match op {
            Op::Insert(k, p) => {
                self.insert(k, p);
                Outcome::Inserted
            }
            Op::DeleteMin => Outcome::Extracted(self.delete_min()),
            Op::Remove(k) => Outcome::Removed(self.remove(k)),
            Op::Search(k) => Outcome::Found(self.search(k)),
        }
    }
}

/// Runs `ops` on a fresh [`StableSortedList`] and returns every outcome.
pub fn stable_pq_replay<P>(ops: impl IntoIterator<Item = Op<P>>) -> Vec<Outcome<P>> {
    let mut list = StableSortedList::new();
    ops.into_iter().map(|op| list.apply(op)).collect()
}

/// Compares two outcome streams position by position.
pub fn compare_streams<P: PartialEq + Debug>(actual: &[Outcome<P>], expected: &[Outcome<P>]) -> OracleVerdict {
    for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
        if a != e {
            return OracleVerdict::diverged(format!("op {i}: got {a:?}, oracle {e:?}"));
        }
    }
    if actual.len() != expected.len() {
        return OracleVerdict::diverged(format!(
            "stream lengths differ: {} vs oracle {}",
            actual.len(),
            expected.len()
        ));
    }
    OracleVerdict::matched()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_replay_is_empty() {
        assert!(stable_pq_replay::<u32>(vec![]).is_empty());
    }

    #[test]
    fn equal_keys_leave_in_arrival_order() {
        let out = stable_pq_replay(vec![
            Op::Insert(5, 'a'),
            Op::Insert(3, 'b'),
            Op::Insert(5, 'c'),
            Op::Insert(1, 'd'),
            Op::DeleteMin,
            Op::DeleteMin,
            Op::DeleteMin,
            Op::DeleteMin,
            Op::DeleteMin,
        ]);
        let drained: Vec<_> = out[4..].to_vec();
        assert_eq!(
            drained,
            vec![
                Outcome::Extracted(Some((1, 'd'))),
                Outcome::Extracted(Some((3, 'b'))),
                Outcome::Extracted(Some((5, 'a'))),
                Outcome::Extracted(Some((5, 'c'))),
                Outcome::Extracted(None),
            ]
        );
    }

    #[test]
    fn remove_takes_oldest() {
        let mut l = StableSortedList::new();
        l.insert(7, 1);
        l.insert(7, 2);
        assert_eq!(l.remove(7), Some(1));
        assert_eq!(l.remove(7), Some(2));
        assert_eq!(l.remove(7), None);
        assert!(!l.search(7));
    }

    #[test]
    fn verdict_names_first_divergence() {
        let a = vec![Outcome::<u8>::Found(true), Outcome::Found(false)];
        let b = vec![Outcome::<u8>::Found(true), Outcome::Found(true)];
        let v = compare_streams(&a, &b);
        assert!(!v.matched);
        assert!(v.first_divergence.unwrap().starts_with("op 1"));
        assert!(compare_streams(&a, &a).matched);
    }
}
