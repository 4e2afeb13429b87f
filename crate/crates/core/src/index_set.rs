//! Ordered set over slot indices `[0, 256)`, one per layer.
//!
//! Backed by four 64-bit words. Predecessor and successor queries mask the
//! word holding the probe and fall back to at most three neighbouring words,
//! so every query is bounded regardless of occupancy.

const WORDS: usize = 4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct IndexSet {
    bits: [u64; WORDS],
}

impl IndexSet {
    pub const CAPACITY: usize = WORDS * 64;

    pub const fn new() -> Self {
        Self { bits: [0; WORDS] }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i >> 6, i & 63);
        let was = self.bits[w] >> b & 1 == 1;
        self.bits[w] |= 1 << b;
        !was
    }

    #[inline]
    pub fn remove(&mut self, i: usize) -> bool {
        let (w, b) = (i >> 6, i & 63);
        let was = self.bits[w] >> b & 1 == 1;
        self.bits[w] &= !(1 << b);
        was
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.bits = [0; WORDS];
    }

    pub fn min(&self) -> Option<usize> {
        self.bits
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn max(&self) -> Option<usize> {
        self.bits
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Largest member strictly below `i`.
    pub fn pred(&self, i: usize) -> Option<usize> {
        let (w, b) = (i >> 6, i & 63);
        let below = self.bits[w] & ((1u64 << b) - 1);
        if below != 0 {
            return Some(w * 64 + 63 - below.leading_zeros() as usize);
        }
        (0..w)
            .rev()
            .find(|&j| self.bits[j] != 0)
            .map(|j| j * 64 + 63 - self.bits[j].leading_zeros() as usize)
    }

    /// Smallest member strictly above `i`.
    pub fn succ(&self, i: usize) -> Option<usize> {
        let (w, b) = (i >> 6, i & 63);
        let above = if b == 63 { 0 } else { self.bits[w] & !((2u64 << b) - 1) };
        if above != 0 {
            return Some(w * 64 + above.trailing_zeros() as usize);
        }
        (w + 1..WORDS)
            .find(|&j| self.bits[j] != 0)
            .map(|j| j * 64 + self.bits[j].trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..WORDS).flat_map(move |w| {
            let mut word = self.bits[w];
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub(crate) fn words(&self) -> &[u64; WORDS] {
        &self.bits
    }
}
