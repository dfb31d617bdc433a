use av1324_analysis::hp::{self, Real};
use av1324_analysis::report::{analyze, ReportOptions};
use av1324_analysis::series::Series;
use dashu_int::UBig;

const P: usize = 60;

fn rounded(values: impl Iterator<Item = Real>) -> Series {
    let exact = values.map(|v| UBig::try_from(hp::round(&v)).unwrap()).collect();
    Series::new(exact, P)
}

/// `B μ^n μ₁^{√n} n^g` rounded to integers.
fn stretched(len: usize, mu: &str, mu1: &str, g: &str) -> Series {
    let (mu, mu1, g) = (
        hp::parse(mu, P).unwrap(),
        hp::parse(mu1, P).unwrap(),
        hp::parse(g, P).unwrap(),
    );
    let b = hp::exp(&hp::int(60, P));
    rounded((1..=len).map(|n| {
        let nf = hp::int(n as i64, P);
        let log = &nf * hp::ln(&mu) + hp::sqrt(&nf) * hp::ln(&mu1) + &g * hp::ln(&nf);
        &b * hp::exp(&log)
    }))
}

fn value(s: &Option<String>) -> f64 {
    s.as_ref().unwrap().parse().unwrap()
}

#[test]
fn pure_power_law_has_no_stretched_signal() {
    let s = rounded((1..=60i64).map(|n| hp::int(10, P).powi(n.into()) * hp::int(n * n * n, P)));
    let r = analyze(&s, &ReportOptions::new(P)).unwrap();
    assert_eq!(r.summary.mu_source, "log_fit_four");
    assert!((value(&r.summary.mu) - 10.0).abs() < 1e-9);
    assert_eq!(r.summary.stretched_exponential_signal, Some(false));
    let sg = r.summary.estimate("sigma_gradient").unwrap();
    assert!((value(&sg.value) - 1.0).abs() < 0.1);
}

#[test]
fn stretched_exponential_is_detected() {
    let s = stretched(120, "11.6", "0.04", "-1.1");
    let mut opts = ReportOptions::new(P);
    opts.mu = hp::parse("11.6", P);
    let r = analyze(&s, &opts).unwrap();
    assert_eq!(r.summary.stretched_exponential_signal, Some(true));
    let log4 = r.summary.estimate("log_fit_four").unwrap();
    assert!((value(&log4.mu) - 11.6).abs() < 1e-6, "{log4:?}");
    assert!((value(&log4.mu1) - 0.04).abs() < 1e-4, "{log4:?}");
    let log3 = r.summary.estimate("log_fit_three").unwrap();
    assert!((value(&log3.g) + 1.1).abs() < 1e-3, "{log3:?}");
    let c1 = r.summary.estimate("ratio_fit_three").unwrap();
    // c1 = log(μ₁)/2
    assert!((value(&c1.value) - 0.04f64.ln() / 2.0).abs() < 0.02, "{c1:?}");
}

#[test]
fn two_terms_give_one_ratio_and_no_mu() {
    let s = Series::from_u64(&[1, 2], P);
    let r = analyze(&s, &ReportOptions::new(P)).unwrap();
    assert_eq!(r.trace("ratios_vs_1_over_n").unwrap().points.len(), 1);
    assert_eq!(r.summary.mu, None);
    assert!(r.trace("sigma_estimates").is_none());
    assert!(analyze(&Series::from_u64(&[1], P), &ReportOptions::new(P)).is_err());
}

#[test]
fn written_bundle_is_deterministic() {
    let s = stretched(40, "11.6", "0.04", "-1.1");
    let r = analyze(&s, &ReportOptions::new(P)).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let fa = r.write(a.path(), P).unwrap();
    let fb = analyze(&s, &ReportOptions::new(P)).unwrap().write(b.path(), P).unwrap();
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
    }
    let csv = std::fs::read_to_string(a.path().join("ratios_vs_1_over_n.csv")).unwrap();
    assert!(csv.starts_with("n,abscissa,value,is_predicted\n"));
    assert!(a.path().join("summary.json").exists());
}
