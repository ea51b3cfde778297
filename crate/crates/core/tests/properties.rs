use proptest::prelude::*;

use survmrl::simulate::{exponential_sample, uniform_sample};
use survmrl::{
    fit_hybrid_mrl, km_fit, load_dataset, mrl_difference, restricted_mrl_km, write_dataset,
    ColumnSpec, GridSpec, SurvivalSample, ThresholdConfig,
};

fn observations() -> impl Strategy<Value = Vec<(f64, bool)>> {
    prop::collection::vec((0u32..40, any::<bool>()), 1..30)
        .prop_map(|v| v.into_iter().map(|(t, e)| (f64::from(t) / 4.0, e)).collect())
}

proptest! {
    #[test]
    fn km_without_censoring_is_the_empirical_fraction(times in prop::collection::vec(0u32..50, 1..40)) {
        let pairs: Vec<(f64, bool)> = times.iter().map(|&t| (f64::from(t), true)).collect();
        let km = km_fit(&SurvivalSample::from_pairs("g", &pairs).unwrap());
        let n = pairs.len() as f64;
        for probe in 0..=50 {
            let t = f64::from(probe);
            let surviving = times.iter().filter(|&&x| f64::from(x) > t).count() as f64;
            prop_assert!((km.eval(t).unwrap() - surviving / n).abs() < 1e-12);
        }
    }

    #[test]
    fn km_is_non_increasing_and_bounded(obs in observations()) {
        let km = km_fit(&SurvivalSample::from_pairs("g", &obs).unwrap());
        let mut prev = 1.0;
        for probe in 0..=45 {
            let s = km.eval(f64::from(probe) / 4.0).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn restricted_mrl_never_exceeds_the_window(obs in observations(), t in 0.0f64..5.0, width in 0.0f64..6.0) {
        let km = km_fit(&SurvivalSample::from_pairs("g", &obs).unwrap());
        let u = t + width;
        match restricted_mrl_km(&km, t, u) {
            Ok(m) => prop_assert!(m >= 0.0 && m <= u - t + 1e-12, "m = {m}, window {}", u - t),
            Err(survmrl::Error::ZeroSurvival { .. }) => prop_assert_eq!(km.eval(t).unwrap(), 0.0),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn dataset_round_trip(a in observations(), b in observations()) {
        let a = SurvivalSample::from_pairs("A", &a).unwrap();
        let b = SurvivalSample::from_pairs("B", &b).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, [&a, &b]).unwrap();
        let loaded = load_dataset(buf.as_slice(), &ColumnSpec::default()).unwrap();
        prop_assert_eq!(loaded.len(), 2);
        prop_assert_eq!(&loaded["A"], &a);
        prop_assert_eq!(&loaded["B"], &b);
    }

    #[test]
    fn groups_partition_the_rows(rows in prop::collection::vec((0u32..100, any::<bool>(), 0usize..4), 1..60)) {
        let labels = ["w", "x", "y", "z"];
        let mut text = String::from("time,status,group\n");
        for (t, e, g) in &rows {
            text.push_str(&format!("{},{},{}\n", f64::from(*t) / 8.0, u8::from(*e), labels[*g]));
        }
        let loaded = load_dataset(text.as_bytes(), &ColumnSpec::default()).unwrap();
        let total: usize = loaded.values().map(SurvivalSample::len).sum();
        prop_assert_eq!(total, rows.len());
        for (label, sample) in &loaded {
            let expected = rows.iter().filter(|r| labels[r.2] == label.as_str()).count();
            prop_assert_eq!(sample.len(), expected);
            prop_assert!(sample.observations().iter().all(|o| &o.group == label));
            prop_assert!(sample.observations().windows(2).all(|w| w[0].time <= w[1].time));
        }
    }
}

/// ∫ₜ^∞ S / S(t) by composite Simpson on a truncated range.
fn true_mrl(survival: impl Fn(f64) -> f64, t: f64, end: f64) -> f64 {
    let steps = 20_000;
    let h = (end - t) / steps as f64;
    let mut acc = survival(t) + survival(end);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * survival(t + i as f64 * h);
    }
    acc * h / 3.0 / survival(t)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[test]
fn hybrid_converges_to_integrated_true_survival() {
    let exp_survival = |t: f64| (-0.5 * t).exp();
    let uni_survival = |t: f64| (1.0 - t / 10.0).clamp(0.0, 1.0);
    for (name, is_uniform) in [("exponential", false), ("uniform", true)] {
        let mut errors = Vec::new();
        for seed in 0..20 {
            let sample = if is_uniform {
                uniform_sample("U", 2000, 10.0, 300 + seed).unwrap()
            } else {
                exponential_sample("E", 2000, 0.5, 0.0, 300 + seed).unwrap()
            };
            let curve = fit_hybrid_mrl(&sample, &ThresholdConfig::default(), &GridSpec::Default).unwrap();
            let u = curve.threshold();
            for k in 0..20 {
                let t = u * f64::from(k) / 20.0;
                let truth = if is_uniform {
                    true_mrl(uni_survival, t, 10.0)
                } else {
                    true_mrl(exp_survival, t, t + 80.0)
                };
                errors.push((curve.eval(t).unwrap() - truth).abs() / truth);
            }
        }
        let med = median(errors);
        assert!(med < 0.10, "{name}: median relative error {med}");
    }
}

#[test]
fn uniform_mrl_decreases_and_tracks_half_the_remaining_range() {
    let sample = uniform_sample("U", 2000, 10.0, 11).unwrap();
    let curve = fit_hybrid_mrl(&sample, &ThresholdConfig::default(), &GridSpec::Default).unwrap();
    let probes: Vec<f64> = (0..=10).map(|k| f64::from(k) * 0.5).collect();
    let fitted: Vec<f64> = probes.iter().map(|&t| curve.eval(t).unwrap()).collect();
    assert!(fitted.windows(2).all(|w| w[1] < w[0]), "{fitted:?}");
    for (t, m) in probes.iter().zip(&fitted) {
        let truth = (10.0 - t) / 2.0;
        assert!((m - truth).abs() / truth < 0.15, "t = {t}: {m} vs {truth}");
    }
}

#[test]
fn mrl_difference_recovers_the_exponential_gap() {
    let fast = exponential_sample("fast", 1500, 1.0, 0.0, 21).unwrap();
    let slow = exponential_sample("slow", 1500, 0.5, 0.0, 22).unwrap();
    let cfg = ThresholdConfig::default();
    let a = fit_hybrid_mrl(&fast, &cfg, &GridSpec::Default).unwrap();
    let b = fit_hybrid_mrl(&slow, &cfg, &GridSpec::Default).unwrap();
    let diff = mrl_difference(&a, &b).unwrap();
    let mid = diff.values[diff.values.len() / 2];
    assert!((mid + 1.0).abs() < 0.25, "difference {mid}");
}
