//! Link patterns: noncrossing perfect matchings on `2k` ordered vertices.
//!
//! A pattern is stored as its parenthesis word packed into a `u64`, bit `i`
//! set when vertex `i` (0-based, left to right) opens an arc. The word view
//! makes the insertion moves in [`crate::transfer`] local bit rewrites.
//!
//! Patterns of half-size `k` are ranked by the lexicographic order of their
//! words with `(` before `)`, via the ballot-number combinatorial number
//! system. The order is part of the on-disk layer layout and must not change.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use dashu_int::UBig;
use thiserror::Error;

/// Largest supported half-size; the word has to fit in 64 bits.
pub const MAX_HALF_SIZE: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkPatternError {
    #[error("unbalanced word (first violation at position {position})")]
    UnbalancedWord { position: usize },
    #[error("rank {rank} out of range for half-size {k} ({count} patterns)")]
    RankOutOfRange { k: usize, rank: u64, count: u64 },
    #[error("half-size {0} exceeds the supported maximum of {MAX_HALF_SIZE}")]
    TooLarge(usize),
    #[error("invalid symbol {0:?} in link pattern word")]
    InvalidSymbol(char),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Open,
    Close,
}

/// A noncrossing perfect matching of `2k` vertices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkPattern {
    bits: u64,
    k: u8,
}

/// Position of a pattern in the dense state space: half-size plus rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateIndex {
    pub k: usize,
    pub rank: u64,
}

/// An insertion point of a pattern.
///
/// `index` counts closes to the left (0 is the gap before vertex 1);
/// `position` is the word offset the gap sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gap {
    pub index: usize,
    pub position: usize,
}

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl LinkPattern {
    pub const EMPTY: LinkPattern = LinkPattern { bits: 0, k: 0 };

    /// Builds a pattern from packed bits without validation.
    #[inline]
    pub(crate) const fn from_raw(bits: u64, k: usize) -> Self {
        LinkPattern { bits, k: k as u8 }
    }

    /// Validates a packed word (bit `i` set = Open at vertex `i`).
    pub fn from_bits(bits: u64, k: usize) -> Result<Self, LinkPatternError> {
        if k > MAX_HALF_SIZE {
            return Err(LinkPatternError::TooLarge(k));
        }
        let len = 2 * k;
        if bits & !low_mask(len) != 0 {
            return Err(LinkPatternError::UnbalancedWord { position: len });
        }
        let mut depth = 0i32;
        for i in 0..len {
            depth += if bits >> i & 1 == 1 { 1 } else { -1 };
            if depth < 0 {
                return Err(LinkPatternError::UnbalancedWord { position: i });
            }
        }
        if depth != 0 {
            return Err(LinkPatternError::UnbalancedWord { position: len });
        }
        Ok(LinkPattern::from_raw(bits, k))
    }

    /// Validates a symbol sequence.
    pub fn validate(word: &[Symbol]) -> Result<Self, LinkPatternError> {
        if word.len() % 2 == 1 {
            // The prefix check below would pass on e.g. "(((", so report the end.
            let opens = word.iter().filter(|s| **s == Symbol::Open).count();
            if opens * 2 != word.len() {
                return Err(LinkPatternError::UnbalancedWord { position: word.len() });
            }
        }
        let k = word.len() / 2;
        if k > MAX_HALF_SIZE {
            return Err(LinkPatternError::TooLarge(k));
        }
        let mut bits = 0u64;
        for (i, s) in word.iter().enumerate() {
            if *s == Symbol::Open {
                bits |= 1 << i;
            }
        }
        Self::from_bits(bits, k)
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        2 * self.k as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn is_open(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn word(&self) -> Vec<Symbol> {
        (0..self.len())
            .map(|i| if self.is_open(i) { Symbol::Open } else { Symbol::Close })
            .collect()
    }

    /// Index of the close matching the open at `i`.
    #[inline]
    pub fn matching_close(&self, i: usize) -> usize {
        debug_assert!(self.is_open(i));
        let mut depth = 0i32;
        let mut j = i;
        loop {
            depth += if self.is_open(j) { 1 } else { -1 };
            if depth == 0 {
                return j;
            }
            j += 1;
        }
    }

    /// Index of the open matching the close at `j`.
    #[inline]
    pub fn matching_open(&self, j: usize) -> usize {
        debug_assert!(!self.is_open(j));
        let mut depth = 0i32;
        let mut i = j as isize;
        loop {
            depth += if self.is_open(i as usize) { -1 } else { 1 };
            if depth == 0 {
                return i as usize;
            }
            i -= 1;
        }
    }

    /// Arcs as 1-based `(open, close)` vertex pairs, ordered by open vertex.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut stack = Vec::with_capacity(self.k());
        let mut arcs = Vec::with_capacity(self.k());
        for i in 0..self.len() {
            if self.is_open(i) {
                stack.push(i);
            } else {
                let o = stack.pop().expect("validated pattern");
                arcs.push((o + 1, i + 1));
            }
        }
        arcs.sort_unstable();
        arcs
    }

    /// Legal insertion points: the start gap plus the gap after every close
    /// that returns the word to depth 0.
    pub fn depth0_gaps(&self) -> Vec<Gap> {
        let mut gaps = vec![Gap { index: 0, position: 0 }];
        let mut depth = 0i32;
        let mut closes = 0;
        for i in 0..self.len() {
            if self.is_open(i) {
                depth += 1;
            } else {
                depth -= 1;
                closes += 1;
                if depth == 0 {
                    gaps.push(Gap {
                        index: closes,
                        position: i + 1,
                    });
                }
            }
        }
        gaps
    }

    /// Word position of gap `index` and whether it lies at depth 0.
    pub fn gap_position(&self, index: usize) -> Option<(usize, bool)> {
        if index == 0 {
            return Some((0, true));
        }
        let mut depth = 0i32;
        let mut closes = 0;
        for i in 0..self.len() {
            if self.is_open(i) {
                depth += 1;
            } else {
                depth -= 1;
                closes += 1;
                if closes == index {
                    return Some((i + 1, depth == 0));
                }
            }
        }
        None
    }

    pub fn rank(&self) -> StateIndex {
        StateIndex {
            k: self.k(),
            rank: rank_bits(self.bits, self.k()),
        }
    }

    pub fn unrank(idx: StateIndex) -> Result<Self, LinkPatternError> {
        if idx.k > MAX_HALF_SIZE {
            return Err(LinkPatternError::TooLarge(idx.k));
        }
        let count = catalan_u64(idx.k);
        if idx.rank >= count {
            return Err(LinkPatternError::RankOutOfRange {
                k: idx.k,
                rank: idx.rank,
                count,
            });
        }
        Ok(LinkPattern::from_raw(unrank_bits(idx.rank, idx.k), idx.k))
    }
}

impl fmt::Display for LinkPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.is_open(i) { "(" } else { ")" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for LinkPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            f.write_str("LinkPattern(∅)")
        } else {
            write!(f, "LinkPattern({self})")
        }
    }
}

impl FromStr for LinkPattern {
    type Err = LinkPatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let s = if s == "∅" { "" } else { s };
        let word = s
            .chars()
            .map(|c| match c {
                '(' => Ok(Symbol::Open),
                ')' => Ok(Symbol::Close),
                other => Err(LinkPatternError::InvalidSymbol(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        LinkPattern::validate(&word)
    }
}

/// `(2k)! / (k! (k+1)!)`.
pub fn catalan(k: usize) -> UBig {
    // C_{j+1} = C_j * 2(2j+1) / (j+2), exact at every step.
    let mut c = UBig::ONE;
    for j in 0..k {
        c = c * UBig::from(2 * (2 * j + 1)) / UBig::from(j + 2);
    }
    c
}

/// Catalan numbers small enough for `u64` (`k <= 35`).
pub fn catalan_u64(k: usize) -> u64 {
    assert!(k <= 35, "catalan({k}) overflows u64");
    let mut c: u128 = 1;
    for j in 0..k as u128 {
        c = c * 2 * (2 * j + 1) / (j + 2);
    }
    c as u64
}

/// All patterns of half-size `k` in rank order.
pub fn enumerate(k: usize) -> Vec<LinkPattern> {
    let count = catalan_u64(k);
    (0..count)
        .map(|r| LinkPattern::from_raw(unrank_bits(r, k), k))
        .collect()
}

const BALLOT_LEN: usize = 2 * MAX_HALF_SIZE + 1;

/// `ballot()[len][h]`: number of ways to finish a word with `len` symbols
/// left from depth `h` without going negative and ending at depth 0.
fn ballot() -> &'static [[u64; BALLOT_LEN + 1]; BALLOT_LEN] {
    static TABLE: OnceLock<Box<[[u64; BALLOT_LEN + 1]; BALLOT_LEN]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; BALLOT_LEN + 1]; BALLOT_LEN]);
        t[0][0] = 1;
        for len in 1..BALLOT_LEN {
            for h in 0..=len.min(BALLOT_LEN - 1) {
                let up = t[len - 1][h + 1];
                let down = if h > 0 { t[len - 1][h - 1] } else { 0 };
                t[len][h] = up + down;
            }
        }
        t
    })
}

#[inline]
pub(crate) fn rank_bits(bits: u64, k: usize) -> u64 {
    let table = ballot();
    let len = 2 * k;
    let mut rank = 0u64;
    let mut h = 0usize;
    for i in 0..len {
        if bits >> i & 1 == 1 {
            h += 1;
        } else {
            // Every word with an open here instead sorts earlier.
            rank += table[len - i - 1][h + 1];
            h -= 1;
        }
    }
    rank
}

#[inline]
pub(crate) fn unrank_bits(mut rank: u64, k: usize) -> u64 {
    let table = ballot();
    let len = 2 * k;
    let mut bits = 0u64;
    let mut h = 0usize;
    for i in 0..len {
        let rest = len - i - 1;
        let with_open = table[rest][h + 1];
        if rank < with_open {
            bits |= 1 << i;
            h += 1;
        } else {
            rank -= with_open;
            h -= 1;
        }
    }
    bits
}
