//! Exact big-integer sweep over a sparse map of states.
//!
//! Slower than the residue sweep and independent of ranking, so it serves
//! as the reference the residue path is checked against.

use std::collections::HashMap;

use dashu_int::UBig;

use crate::linkpattern::{LinkPattern, MAX_HALF_SIZE};

use super::layer::k_max;
use super::moves::{for_each_child, MoveSet};

pub type SparseLayer = HashMap<LinkPattern, UBig>;

/// Every layer `t = 0..=n` of an `n`-step sweep.
///
/// With `prune` the layer at `t` keeps only states with at most
/// `min(t, n - t)` arcs; without it every reachable state is kept.
pub fn direct_layers(n: usize, moves: MoveSet, prune: bool) -> Vec<SparseLayer> {
    let mut layers = Vec::with_capacity(n + 1);
    let mut layer = SparseLayer::new();
    layer.insert(LinkPattern::EMPTY, UBig::ONE);
    for t in 0..n {
        let max_k = if prune { k_max(t + 1, n) } else { MAX_HALF_SIZE };
        let mut next = SparseLayer::new();
        for (p, count) in &layer {
            for_each_child(*p, moves, max_k, |c, _, _| {
                *next.entry(c).or_insert(UBig::ZERO) += count;
            });
        }
        layers.push(layer);
        layer = next;
    }
    layers.push(layer);
    layers
}

/// `p_1..p_n` as the multiplicity of the empty pattern at each time.
pub fn count_series_direct(n: usize, moves: MoveSet, prune: bool) -> Vec<UBig> {
    direct_layers(n, moves, prune)
        .into_iter()
        .skip(1)
        .map(|l| l.get(&LinkPattern::EMPTY).cloned().unwrap_or(UBig::ZERO))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(s: &str) -> LinkPattern {
        s.parse().unwrap()
    }

    fn at(layer: &SparseLayer, s: &str) -> u64 {
        layer.get(&lp(s)).map_or(0, |v| u64::try_from(v).unwrap())
    }

    #[test]
    fn layers_for_seven() {
        let l = direct_layers(7, MoveSet::ALL, true);
        assert_eq!((at(&l[1], ""), at(&l[1], "()")), (1, 1));
        assert_eq!(["", "()", "()()", "(())"].map(|s| at(&l[2], s)), [2, 4, 1, 1]);
        assert_eq!(l[2].len(), 4);
        assert_eq!(["", "()", "()()", "(())"].map(|s| at(&l[3], s)), [6, 17, 7, 9]);
        for s in ["()()()", "()(())", "(())()", "(()())", "((()))"] {
            assert_eq!(at(&l[3], s), 1, "{s}");
        }
        assert_eq!(["", "()", "()()", "(())"].map(|s| at(&l[4], s)), [23, 80, 42, 63]);
        let k3: u64 = ["()()()", "()(())", "(())()", "(()())", "((()))"]
            .iter()
            .map(|s| at(&l[4], s))
            .sum();
        assert_eq!(k3, 10 + 12 + 12 + 13 + 15);
        assert_eq!(["", "()", "()()", "(())"].map(|s| at(&l[5], s)), [103, 410, 251, 414]);
        assert_eq!((at(&l[6], ""), at(&l[6], "()")), (513, 2249));
        assert_eq!(l[6].len(), 2);
        assert_eq!(at(&l[7], ""), 2762);
        assert_eq!(l[7].len(), 1);
    }

    #[test]
    fn pruning_does_not_change_the_series() {
        assert_eq!(
            count_series_direct(12, MoveSet::ALL, true),
            count_series_direct(12, MoveSet::ALL, false)
        );
    }
}
