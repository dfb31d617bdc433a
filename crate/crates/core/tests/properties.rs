use av1324_core::linkpattern::{catalan_u64, enumerate};
use av1324_core::residues::{crt, reduce, select_moduli};
use av1324_core::transfer::{
    children, count_series_multi, direct::direct_layers, layer_state_count, peak_state_count, step, Layer,
};
use av1324_core::{LinkPattern, MoveSet, StepMode, SweepOptions};
use dashu_int::UBig;
use proptest::prelude::*;

const M: u64 = 65521;

fn random_layer(t: usize, n: usize, seed: &[u64]) -> Layer<u16> {
    let mut layer = Layer::<u16>::zeroed(t, n, &[M]);
    let mut i = 0;
    for k in 0..=layer.k_max() {
        for p in enumerate(k) {
            layer.set(&p, &[seed[i % seed.len()]]);
            i += 1;
        }
    }
    layer
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn step_is_linear(
        a in 0u64..M,
        b in 0u64..M,
        xs in proptest::collection::vec(0u64..M, 1..40),
        ys in proptest::collection::vec(0u64..M, 1..40),
        t in 0usize..5,
    ) {
        let n = 10;
        let l1 = random_layer(t, n, &xs);
        let l2 = random_layer(t, n, &ys);
        let mut combo = Layer::<u16>::zeroed(t, n, &[M]);
        for k in 0..=combo.k_max() {
            for p in enumerate(k) {
                let v = (a * l1.get(&p) + b * l2.get(&p)) % M;
                combo.set(&p, &[v]);
            }
        }
        for mode in [StepMode::DestinationDriven, StepMode::SourceDriven] {
            let s1 = step(&l1, MoveSet::ALL, mode);
            let s2 = step(&l2, MoveSet::ALL, mode);
            let sc = step(&combo, MoveSet::ALL, mode);
            for k in 0..=sc.k_max() {
                for p in enumerate(k) {
                    prop_assert_eq!(sc.get(&p), (a * s1.get(&p) + b * s2.get(&p)) % M);
                }
            }
        }
    }

    #[test]
    fn crt_inverts_reduction(hi in any::<u64>(), lo in any::<u64>()) {
        let set = select_moduli(20);
        let x = ((UBig::from(hi) << 64) + UBig::from(lo)) % set.product();
        let r: Vec<u64> = set.moduli.iter().map(|&m| reduce(&x, m)).collect();
        prop_assert_eq!(crt(&r, &set.moduli).unwrap(), x);
    }

    #[test]
    fn pruned_children_respect_the_bound(rank in 0u64..429, s in 1usize..8) {
        let p = LinkPattern::unrank(av1324_core::StateIndex { k: 7, rank }).unwrap();
        for (c, _, _) in children(&p, s) {
            prop_assert!(c.k() < s);
        }
    }
}

#[test]
fn children_of_empty_and_split_counts() {
    for s in 2..6 {
        assert_eq!(children(&LinkPattern::EMPTY, s).len(), 2);
    }
    for k in 0..6 {
        for p in enumerate(k) {
            let splits = children(&p, 2 * k + 5)
                .iter()
                .filter(|(_, m, _)| *m == av1324_core::MoveType::Split)
                .count();
            assert_eq!(splits, p.depth0_gaps().len());
        }
    }
}

#[test]
fn layers_respect_pruning_and_end_at_empty() {
    let n = 12;
    let layers = direct_layers(n, MoveSet::ALL, true);
    for (t, layer) in layers.iter().enumerate() {
        assert!(layer.keys().all(|p| p.k() <= t.min(n - t)), "t={t}");
    }
    assert_eq!(layers[n].len(), 1);
    assert!(layers[n].contains_key(&LinkPattern::EMPTY));
}

#[test]
fn no_pruning_sweep_agrees_up_to_fourteen() {
    use av1324_core::transfer::direct::count_series_direct;
    let pruned = count_series_multi(14, &[M, 65519], &SweepOptions::default()).unwrap();
    let full = count_series_direct(14, MoveSet::ALL, false);
    for (t, v) in full.iter().enumerate() {
        assert_eq!(reduce(v, M), pruned[0][t]);
        assert_eq!(reduce(v, 65519), pruned[1][t]);
    }
}

#[test]
fn peak_state_count_is_a_catalan_sum() {
    for n in 1..=36 {
        let want: u64 = (0..=n / 2).map(catalan_u64).sum();
        assert_eq!(peak_state_count(n), want, "n={n}");
        assert_eq!(layer_state_count(n / 2, n), want);
    }
}
