use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported stride; a layer then holds 256 slots.
pub const MAX_STRIDE_BITS: u32 = 8;
/// Keys are stored in a `u64`.
pub const MAX_WORD_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("word length must be between 1 and {MAX_WORD_BITS} bits, got {0}")]
    WordBits(u32),
    #[error("stride must be between 1 and {MAX_STRIDE_BITS} bits, got {0}")]
    StrideBits(u32),
    #[error("stride of {stride} bits does not divide a {word}-bit word")]
    Ragged { word: u32, stride: u32 },
}

/// Shape of a PTrie: `word_bits` (M) bits per key, consumed `stride_bits`
/// (K) at a time from the most significant end.
///
/// A layer has `2^K` slots and no root-to-leaf path is longer than `M / K`
/// layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PTrieConfig {
    word_bits: u32,
    stride_bits: u32,
}

impl PTrieConfig {
    pub fn new(word_bits: u32, stride_bits: u32) -> Result<Self, ConfigError> {
        if word_bits == 0 || word_bits > MAX_WORD_BITS {
            return Err(ConfigError::WordBits(word_bits));
        }
        if stride_bits == 0 || stride_bits > MAX_STRIDE_BITS {
            return Err(ConfigError::StrideBits(stride_bits));
        }
        if word_bits % stride_bits != 0 {
            return Err(ConfigError::Ragged {
                word: word_bits,
                stride: stride_bits,
            });
        }
        Ok(Self {
            word_bits,
            stride_bits,
        })
    }

    #[inline]
    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    #[inline]
    pub fn stride_bits(&self) -> u32 {
        self.stride_bits
    }

    /// Slots per layer, `2^K`.
    #[inline]
    pub fn degree(&self) -> usize {
        1 << self.stride_bits
    }

    /// Maximum number of layers on a root-to-leaf path, `M / K`.
    #[inline]
    pub fn depth_max(&self) -> usize {
        (self.word_bits / self.stride_bits) as usize
    }

    /// Largest representable key, `2^M - 1`.
    #[inline]
    pub fn max_key(&self) -> u64 {
        if self.word_bits == 64 {
            u64::MAX
        } else {
            (1u64 << self.word_bits) - 1
        }
    }

    #[inline]
    pub fn contains(&self, key: u64) -> bool {
        key <= self.max_key()
    }

    /// Slot index of `key` at `depth` (0 = root), most significant chunk first.
    #[inline]
    pub fn chunk(&self, key: u64, depth: usize) -> usize {
        let shift = self.word_bits - (depth as u32 + 1) * self.stride_bits;
        ((key >> shift) & (self.degree() as u64 - 1)) as usize
    }

    /// Per-operation step bound `M/K + K`.
    pub fn step_bound(&self) -> usize {
        self.depth_max() + self.stride_bits as usize
    }
}

impl Default for PTrieConfig {
    fn default() -> Self {
        Self {
            word_bits: 32,
            stride_bits: 4,
        }
    }
}
