//! Brute-force ground truth: pattern containment over explicit
//! permutations, the alternating filter, and a per-permutation replay of
//! the state machine.

use std::fmt;

use thiserror::Error;

use crate::linkpattern::LinkPattern;
use crate::transfer::{apply_move, MoveType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("not a permutation of 1..{0}")]
    NotAPermutation(usize),
}

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn new(values: Vec<u8>) -> Result<Self, PermutationError> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(PermutationError::NotAPermutation(n));
            }
            seen[v] = true;
        }
        Ok(Permutation(values))
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i as u8 + 1;
        }
        Permutation(inv)
    }

    /// All permutations of length `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut next: Option<Vec<u8>> = Some((1..=n as u8).collect());
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut v = cur.clone();
            if let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) {
                let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot successor");
                v.swap(i - 1, j);
                v[i..].reverse();
                next = Some(v);
            }
            Some(Permutation(cur))
        })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Backtracking occurrence search. When `forced` is `Some((i, j))`, only
/// occurrences that map pattern entry `j` to position `i` are considered.
fn find_occurrence(perm: &[u8], pattern: &[u8], forced: Option<(usize, usize)>) -> bool {
    fn rec(perm: &[u8], pattern: &[u8], forced: Option<(usize, usize)>, chosen: &mut Vec<usize>, start: usize) -> bool {
        let j = chosen.len();
        if j == pattern.len() {
            return true;
        }
        let range: Box<dyn Iterator<Item = usize>> = match forced {
            Some((i, fj)) if fj == j => Box::new((i >= start).then_some(i).into_iter()),
            Some((i, fj)) if fj > j => Box::new(start..i.min(perm.len())),
            _ => Box::new(start..perm.len()),
        };
        for i in range {
            let consistent = chosen
                .iter()
                .enumerate()
                .all(|(a, &pa)| (perm[pa] < perm[i]) == (pattern[a] < pattern[j]));
            if consistent {
                chosen.push(i);
                if rec(perm, pattern, forced, chosen, i + 1) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if pattern.len() > perm.len() {
        return false;
    }
    rec(perm, pattern, forced, &mut Vec::with_capacity(pattern.len()), 0)
}

/// Whether `perm` contains an occurrence of `pattern`.
pub fn contains_pattern(perm: &Permutation, pattern: &Permutation) -> bool {
    find_occurrence(perm.values(), pattern.values(), None)
}

/// Avoiders of length `n`, grown by inserting the new maximum into avoiders
/// of length `n - 1`; avoidance is closed under deleting the maximum.
pub fn avoiders(n: usize, pattern: &Permutation) -> Vec<Permutation> {
    let mut level = vec![Permutation(Vec::new())];
    let top = pattern.values().iter().position(|&v| v as usize == pattern.len());
    for len in 1..=n {
        let mut next = Vec::new();
        for p in &level {
            for i in 0..len {
                let mut v = p.0.clone();
                v.insert(i, len as u8);
                let hit = match top {
                    Some(j) => find_occurrence(&v, pattern.values(), Some((i, j))),
                    None => false,
                };
                if !hit {
                    next.push(Permutation(v));
                }
            }
        }
        level = next;
    }
    level
}

/// Number of avoiders of each length `1..=n`.
pub fn brute_series(n: usize, pattern: &Permutation) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut level = vec![Permutation(Vec::new())];
    let top = pattern.values().iter().position(|&v| v as usize == pattern.len());
    for len in 1..=n {
        let mut next = Vec::new();
        for p in &level {
            for i in 0..len {
                let mut v = p.0.clone();
                v.insert(i, len as u8);
                let hit = top.is_some_and(|j| find_occurrence(&v, pattern.values(), Some((i, j))));
                if !hit {
                    next.push(Permutation(v));
                }
            }
        }
        out.push(next.len() as u64);
        level = next;
    }
    out
}

/// The pattern 1324.
pub fn p1324() -> Permutation {
    Permutation(vec![1, 3, 2, 4])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlternatingConvention {
    /// `p1 > p2 < p3 > …`
    #[default]
    DownUp,
    /// `p1 < p2 > p3 < …`
    UpDown,
}

pub fn is_alternating_with(perm: &Permutation, convention: AlternatingConvention) -> bool {
    let v = perm.values();
    v.windows(2).enumerate().all(|(i, w)| {
        let down = w[0] > w[1];
        match convention {
            AlternatingConvention::DownUp => down == (i % 2 == 0),
            AlternatingConvention::UpDown => down == (i % 2 == 1),
        }
    })
}

/// Down-up alternation: `p1 > p2 < p3 > …`.
pub fn is_alternating(perm: &Permutation) -> bool {
    is_alternating_with(perm, AlternatingConvention::DownUp)
}

/// Count of alternating 1324-avoiders of each length `1..=n`.
pub fn brute_alternating_series(n: usize, convention: AlternatingConvention) -> Vec<u64> {
    (1..=n)
        .map(|len| {
            avoiders(len, &p1324())
                .iter()
                .filter(|p| is_alternating_with(p, convention))
                .count() as u64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOutcome {
    Accepted,
    /// 1-based position of the first element whose move is illegal.
    RejectedAt(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub value: u8,
    pub gap: usize,
    pub mv: MoveType,
}

/// Replay of a permutation through the state machine. `states[0]` is the
/// empty pattern and `states[i]` follows `steps[i - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTrace {
    pub states: Vec<LinkPattern>,
    pub steps: Vec<TraceStep>,
    pub outcome: TraceOutcome,
}

impl StateTrace {
    pub fn moves(&self) -> Vec<MoveType> {
        self.steps.iter().map(|s| s.mv).collect()
    }
}

/// Reads the permutation left to right. Present values form maximal runs
/// of consecutive integers, each run one arc; `n + 1` is always present as
/// the ceiling. A new value's gap is the number of runs below it, and its
/// move is fixed by which neighbouring runs it touches.
pub fn trace_permutation(perm: &Permutation) -> StateTrace {
    let n = perm.len();
    // runs[i] = (lo, hi), sorted, excluding the run that reaches the ceiling.
    let mut runs: Vec<(u32, u32)> = Vec::new();
    let mut ceiling = n as u32 + 1;
    let mut state = LinkPattern::EMPTY;
    let mut states = vec![state];
    let mut steps = Vec::new();
    for (i, &v) in perm.values().iter().enumerate() {
        let x = v as u32;
        let g = runs.partition_point(|r| r.1 < x);
        let left = g > 0 && runs[g - 1].1 + 1 == x;
        let right = match runs.get(g) {
            Some(r) => r.0 == x + 1,
            None => x + 1 == ceiling,
        };
        let mv = match (left, right) {
            (false, false) => MoveType::Split,
            (true, false) => MoveType::MergeLeft,
            (false, true) => MoveType::MergeRightOpen,
            (true, true) => MoveType::MergeBoth,
        };
        steps.push(TraceStep { value: v, gap: g, mv });
        match apply_move(&state, g, mv) {
            Ok(next) => state = next,
            Err(_) => {
                return StateTrace {
                    states,
                    steps,
                    outcome: TraceOutcome::RejectedAt(i + 1),
                }
            }
        }
        states.push(state);
        match mv {
            MoveType::Split => runs.insert(g, (x, x)),
            MoveType::MergeLeft => runs[g - 1].1 = x,
            MoveType::MergeRightOpen => match runs.get_mut(g) {
                Some(r) => r.0 = x,
                None => ceiling = x,
            },
            MoveType::MergeBoth => {
                if g < runs.len() {
                    runs[g - 1].1 = runs[g].1;
                    runs.remove(g);
                } else {
                    ceiling = runs[g - 1].0;
                    runs.pop();
                }
            }
        }
    }
    StateTrace {
        states,
        steps,
        outcome: TraceOutcome::Accepted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[u8]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn containment_examples() {
        let p = p1324();
        assert!(contains_pattern(&perm(&[1, 3, 2, 4]), &p));
        assert!(contains_pattern(&perm(&[2, 1, 5, 3, 4, 6]), &p));
        assert!(!contains_pattern(&perm(&[4, 3, 2, 1]), &p));
        assert!(!contains_pattern(&perm(&[1, 2, 3]), &p));
        assert!(contains_pattern(&perm(&[3, 1, 2]), &perm(&[2, 1])));
        assert!(!contains_pattern(&perm(&[1, 2, 3]), &perm(&[2, 1])));
    }

    #[test]
    fn permutations_are_listed_once() {
        let all: Vec<_> = Permutation::all(5).collect();
        assert_eq!(all.len(), 120);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Permutation::all(0).count(), 1);
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert_eq!(perm(&[2, 3, 1]).inverse(), perm(&[3, 1, 2]));
    }

    #[test]
    fn brute_counts() {
        assert_eq!(
            brute_series(10, &p1324()),
            vec![1, 2, 6, 23, 103, 513, 2762, 15793, 94776, 591950]
        );
        // every length-3 pattern is counted by the Catalan numbers
        for p in Permutation::all(3) {
            assert_eq!(brute_series(7, &p), vec![1, 2, 5, 14, 42, 132, 429], "{p}");
        }
    }

    #[test]
    fn prefix_extension_matches_full_filter() {
        for n in 0..=7 {
            let mut fast = avoiders(n, &p1324());
            fast.sort();
            let slow: Vec<_> = Permutation::all(n).filter(|p| !contains_pattern(p, &p1324())).collect();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn alternating_examples() {
        assert!(is_alternating(&perm(&[2, 1, 3])));
        assert!(!is_alternating(&perm(&[1, 2, 3])));
        assert!(is_alternating(&perm(&[1])));
        assert!(is_alternating_with(&perm(&[1, 3, 2]), AlternatingConvention::UpDown));
        assert!(!is_alternating_with(&perm(&[2, 1, 3]), AlternatingConvention::UpDown));
    }

    #[test]
    fn worked_trace() {
        let t = trace_permutation(&perm(&[5, 4, 2, 7, 10, 8, 9, 1, 3, 6]));
        assert_eq!(t.outcome, TraceOutcome::Accepted);
        let moves: Vec<u8> = t.moves().iter().map(|m| m.number()).collect();
        assert_eq!(moves, vec![1, 3, 1, 1, 3, 2, 4, 3, 4, 4]);
        let words: Vec<String> = t.states.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            words,
            vec!["", "()", "()", "()()", "(()())", "(()())", "(()())", "()()", "()()", "()", ""]
        );
    }

    #[test]
    fn rejected_trace() {
        let t = trace_permutation(&perm(&[5, 4, 2, 7, 10, 6, 9, 1, 3, 8]));
        assert_eq!(t.outcome, TraceOutcome::RejectedAt(6));
        assert_eq!(t.steps[5].mv, MoveType::MergeBoth);
        assert_eq!(t.steps[5].gap, 2);
        assert_eq!(trace_permutation(&perm(&[1])).outcome, TraceOutcome::Accepted);
    }
}
