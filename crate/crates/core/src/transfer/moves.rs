//! The four insertion moves, forwards (`apply_move`, `for_each_child`) and
//! backwards (`for_each_parent`, used by the destination-driven sweep).

use std::fmt;

use crate::linkpattern::{low_mask, LinkPattern};

use super::TransferError;

/// How a newly inserted value relates to the runs on either side of its gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveType {
    /// Adjacent to neither side: a new arc back to the start.
    Split = 1,
    /// Adjacent to the run on the left only.
    MergeLeft = 2,
    /// Adjacent to the run on the right (or the ceiling) only.
    MergeRightOpen = 3,
    /// Adjacent to both sides: the gap is filled and the left arc erased.
    MergeBoth = 4,
}

impl MoveType {
    pub const ALL: [MoveType; 4] = [
        MoveType::Split,
        MoveType::MergeLeft,
        MoveType::MergeRightOpen,
        MoveType::MergeBoth,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(MoveType::Split),
            2 => Some(MoveType::MergeLeft),
            3 => Some(MoveType::MergeRightOpen),
            4 => Some(MoveType::MergeBoth),
            _ => None,
        }
    }
}

impl fmt::Display for MoveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A subset of the moves, used to restrict the transfer (e.g. to `{1, 4}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MoveSet(u8);

impl MoveSet {
    pub const ALL: MoveSet = MoveSet(0b1111);
    pub const ALTERNATING: MoveSet = MoveSet(0b1001);

    pub fn of(moves: &[MoveType]) -> Self {
        MoveSet(moves.iter().fold(0, |acc, m| acc | 1 << (m.number() - 1)))
    }

    #[inline]
    pub fn contains(self, m: MoveType) -> bool {
        self.0 >> (m.number() - 1) & 1 == 1
    }
}

// Bit-level word helpers. Bit i is vertex i; 1 = Open.

#[inline]
fn insert_bit(bits: u64, pos: usize, open: bool) -> u64 {
    let low = bits & low_mask(pos);
    let high = if pos >= 64 { 0 } else { bits >> pos };
    low | (open as u64) << pos | high << (pos + 1)
}

#[inline]
fn delete_bit(bits: u64, pos: usize) -> u64 {
    let low = bits & low_mask(pos);
    let high = bits >> pos >> 1;
    low | high << pos
}

#[inline]
fn prepend_opens(bits: u64, m: usize) -> u64 {
    if m == 0 {
        bits
    } else {
        bits << m | low_mask(m)
    }
}

/// Moves the `m` opens at `pos..pos+m` to the front of the word.
#[inline]
fn relocate_opens(bits: u64, pos: usize, m: usize) -> u64 {
    if m == 0 {
        return bits;
    }
    let low = bits & low_mask(pos);
    let high = bits >> (pos + m);
    prepend_opens(low | high << pos, m)
}

#[inline]
fn run_of_opens(bits: u64, pos: usize, len: usize) -> usize {
    if pos >= len {
        return 0;
    }
    ((bits >> pos).trailing_ones() as usize).min(len - pos)
}

#[inline]
fn matching_open(bits: u64, close: usize) -> usize {
    let mut depth = 0i32;
    let mut i = close;
    loop {
        depth += if bits >> i & 1 == 1 { -1 } else { 1 };
        if depth == 0 {
            return i;
        }
        i -= 1;
    }
}

#[inline]
fn matching_close(bits: u64, open: usize) -> usize {
    let mut depth = 0i32;
    let mut j = open;
    loop {
        depth += if bits >> j & 1 == 1 { 1 } else { -1 };
        if depth == 0 {
            return j;
        }
        j += 1;
    }
}

/// Applies move `m` at the gap at word position `pos` (gap index `gap`),
/// assuming the gap is at depth 0 and the move is legal there.
#[inline]
fn apply_at(p: LinkPattern, gap: usize, pos: usize, m: MoveType) -> LinkPattern {
    let bits = p.bits();
    let k = p.k();
    let len = 2 * k;
    match m {
        MoveType::Split => LinkPattern::from_raw(insert_bit(prepend_opens(bits, 1), pos + 1, false), k + 1),
        MoveType::MergeLeft => {
            debug_assert!(gap > 0);
            let open = matching_open(bits, pos - 1);
            LinkPattern::from_raw(prepend_opens(delete_bit(bits, open), 1), k)
        }
        MoveType::MergeRightOpen => {
            let run = run_of_opens(bits, pos, len);
            LinkPattern::from_raw(relocate_opens(bits, pos, run), k)
        }
        MoveType::MergeBoth => {
            debug_assert!(gap > 0);
            let run = run_of_opens(bits, pos, len);
            let moved = relocate_opens(bits, pos, run);
            let close = pos - 1 + run;
            let open = matching_open(moved, close);
            LinkPattern::from_raw(delete_bit(delete_bit(moved, close), open), k - 1)
        }
    }
}

/// Applies one insertion move at gap `gap` (0 = before vertex 1, `i` = after
/// the `i`-th close).
pub fn apply_move(p: &LinkPattern, gap: usize, m: MoveType) -> Result<LinkPattern, TransferError> {
    let (pos, depth0) = p.gap_position(gap).ok_or(TransferError::Illegal { gap, mv: m })?;
    if !depth0 {
        return Err(TransferError::Illegal { gap, mv: m });
    }
    if gap == 0 && matches!(m, MoveType::MergeLeft | MoveType::MergeBoth) {
        return Err(TransferError::Illegal { gap, mv: m });
    }
    if m == MoveType::Split && p.k() >= crate::linkpattern::MAX_HALF_SIZE {
        return Err(TransferError::Illegal { gap, mv: m });
    }
    Ok(apply_at(*p, gap, pos, m))
}

/// Calls `f(child, move, gap)` for every legal derivation from `p`,
/// skipping children with more than `max_k` arcs.
#[inline]
pub fn for_each_child(p: LinkPattern, moves: MoveSet, max_k: usize, mut f: impl FnMut(LinkPattern, MoveType, usize)) {
    let bits = p.bits();
    let k = p.k();
    let mut visit = |gap: usize, pos: usize| {
        for m in MoveType::ALL {
            if !moves.contains(m) || (gap == 0 && matches!(m, MoveType::MergeLeft | MoveType::MergeBoth)) {
                continue;
            }
            let child_k = match m {
                MoveType::Split => k + 1,
                MoveType::MergeBoth => k - 1,
                _ => k,
            };
            if child_k > max_k {
                continue;
            }
            f(apply_at(p, gap, pos, m), m, gap);
        }
    };
    visit(0, 0);
    let mut depth = 0i32;
    let mut closes = 0;
    for i in 0..2 * k {
        if bits >> i & 1 == 1 {
            depth += 1;
        } else {
            depth -= 1;
            closes += 1;
            if depth == 0 {
                visit(closes, i + 1);
            }
        }
    }
}

/// The child multiset of `p` when `s` elements remain to be inserted:
/// every legal `(gap, move)` derivation whose result can still be finished
/// in the `s - 1` steps left afterwards.
pub fn children(p: &LinkPattern, s: usize) -> Vec<(LinkPattern, MoveType, usize)> {
    children_with(p, s, MoveSet::ALL)
}

pub fn children_with(p: &LinkPattern, s: usize, moves: MoveSet) -> Vec<(LinkPattern, MoveType, usize)> {
    let mut out = Vec::new();
    if s == 0 {
        return out;
    }
    for_each_child(*p, moves, s - 1, |c, m, g| out.push((c, m, g)));
    out
}

#[inline]
fn count_closes(bits: u64, len: usize) -> usize {
    len - (bits & low_mask(len)).count_ones() as usize
}

/// Calls `f(parent, move, gap)` for every derivation `apply_move(parent, gap,
/// move) == c` with `parent.k() <= max_parent_k`.
///
/// This enumerates exactly the edges `for_each_child` produces, reached from
/// their destination.
#[inline]
pub fn for_each_parent(
    c: LinkPattern,
    moves: MoveSet,
    max_parent_k: usize,
    mut f: impl FnMut(LinkPattern, MoveType, usize),
) {
    let bits = c.bits();
    let k = c.k();
    let len = 2 * k;
    let lead = run_of_opens(bits, 0, len);

    // Split: the first arc is the new one.
    if moves.contains(MoveType::Split) && k >= 1 && k - 1 <= max_parent_k {
        let j = matching_close(bits, 0);
        let parent = delete_bit(delete_bit(bits, j), 0);
        let gap = count_closes(bits >> 1, j - 1);
        f(LinkPattern::from_raw(parent, k - 1), MoveType::Split, gap);
    }

    if k <= max_parent_k {
        if moves.contains(MoveType::MergeRightOpen) {
            // Highest value inserted at the rightmost gap: no change.
            f(c, MoveType::MergeRightOpen, k);
            // m leading opens came from a gap followed by exactly m opens. In
            // the parent that gap sits where c first drops back below depth m.
            for m in 1..=lead {
                let drop = matching_close(bits, m - 1);
                let u = bits >> m;
                let q = drop - m;
                // parent = u[..q] + "("*m + u[q..]
                let low = u & low_mask(q);
                let high = u >> q;
                let parent = low | low_mask(m) << q | high << (q + m);
                let gap = count_closes(low, q);
                f(LinkPattern::from_raw(parent, k), MoveType::MergeRightOpen, gap);
            }
        }
        if moves.contains(MoveType::MergeLeft) && k >= 1 {
            // The first arc's open was relocated from the start of one of the
            // top-level components of its interior (or from just before its close).
            let j = matching_close(bits, 0);
            let interior = bits >> 1;
            let ilen = j - 1;
            let gap = count_closes(bits, j + 1);
            let mut a = 0usize;
            loop {
                // parent = I[..a] + "(" + I[a..] + rest, with c[0] removed.
                let rest = delete_bit(bits, 0);
                let parent = insert_bit(rest, a, true);
                f(LinkPattern::from_raw(parent, k), MoveType::MergeLeft, gap);
                if a == ilen {
                    break;
                }
                a = matching_close(interior, a) + 1;
            }
        }
    }

    if moves.contains(MoveType::MergeBoth) && k < crate::linkpattern::MAX_HALF_SIZE && k < max_parent_k {
        for m in 0..=lead {
            let u = bits >> m;
            let ulen = len - m;
            // b: where the erased arc closed; the relocated opens followed it.
            let b = if m == 0 { ulen } else { matching_close(bits, m - 1) - m };
            let gap = count_closes(u, b) + 1;
            let mut a = 0usize;
            loop {
                // parent = u[..a] + "(" + u[a..b] + ")" + "("*m + u[b..]
                let head = u & low_mask(a);
                let mid = (u >> a) & low_mask(b - a);
                let tail = if b >= 64 { 0 } else { u >> b };
                let mut parent = head | 1 << a | mid << (a + 1);
                let after = b + 2;
                parent |= low_mask(m) << after;
                if b < ulen {
                    parent |= tail << (after + m);
                }
                f(LinkPattern::from_raw(parent, k + 1), MoveType::MergeBoth, gap);
                if a == b {
                    break;
                }
                a = matching_close(u, a) + 1;
            }
        }
    }
}
