use av1324_core::residues::{crt, digit_assisted_reconstruct, reduce, select_moduli, ModulusSet};
use av1324_core::transfer::{count_series, count_series_exact, count_series_multi, direct::count_series_direct};
use av1324_core::{MoveSet, SweepOptions};
use dashu_int::UBig;

const KNOWN: [&str; 25] = [
    "1",
    "2",
    "6",
    "23",
    "103",
    "513",
    "2762",
    "15793",
    "94776",
    "591950",
    "3824112",
    "25431452",
    "173453058",
    "1209639642",
    "8604450011",
    "62300851632",
    "458374397312",
    "3421888118907",
    "25887131596018",
    "198244731603623",
    "1535346218316422",
    "12015325816028313",
    "94944352095728825",
    "757046484552152932",
    "6087537591051072864",
];

fn known(n: usize) -> Vec<UBig> {
    KNOWN[..n].iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn direct_sweep_reproduces_known_terms() {
    assert_eq!(count_series_direct(25, MoveSet::ALL, true), known(25));
}

#[test]
fn crt_of_three_runs_matches_direct_sweep() {
    let moduli = [65521u64, 65519, 65497];
    let direct = count_series_direct(20, MoveSet::ALL, true);
    let runs: Vec<Vec<u64>> = moduli.iter().map(|&m| count_series(20, m).unwrap()).collect();
    for t in 0..20 {
        let r: Vec<u64> = runs.iter().map(|run| run[t]).collect();
        assert_eq!(crt(&r, &moduli).unwrap(), direct[t], "t={}", t + 1);
    }
}

#[test]
fn exact_series_with_verification_to_25() {
    let got = count_series_exact(25, &select_moduli(25), &SweepOptions::default()).unwrap();
    assert_eq!(got, known(25));
}

#[test]
fn three_moduli_with_check_for_sixteen() {
    let set = ModulusSet::new(vec![65521, 65519, 65497], Some(65479)).unwrap();
    let got = count_series_exact(16, &set, &SweepOptions::default()).unwrap();
    assert_eq!(got[15], "62300851632".parse::<UBig>().unwrap());
}

#[test]
fn digit_assisted_sixteenth_term_from_two_runs() {
    let moduli = [65521u64, 65519];
    let runs = count_series_multi(16, &moduli, &SweepOptions::default()).unwrap();
    let r: Vec<u64> = runs.iter().map(|run| run[15]).collect();
    let p16 = digit_assisted_reconstruct(&r, &moduli, "62300", 10).unwrap();
    assert_eq!(p16, known(16)[15]);
    assert_eq!(reduce(&p16, 65497), count_series(16, 65497).unwrap()[15]);
}

#[test]
fn zero_length_gives_empty_series() {
    assert!(count_series(0, 65521).unwrap().is_empty());
    assert!(count_series_direct(0, MoveSet::ALL, true).is_empty());
}
