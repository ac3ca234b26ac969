use egospec::laplacian::exact_moments;
use egospec::moments::moment_ceiling;
use egospec::sampling::{
    estimate_moments, estimate_moments_with, failure_probability, joint_half_width, plan_sample_size, sample_nodes,
    EstimateConfig, IntervalSpec, SampleMode,
};
use egospec::{Graph, GraphKind, Provenance};
use proptest::prelude::*;

fn er200() -> Graph {
    Graph::generate(GraphKind::ErdosRenyi { n: 200, p: 0.04, seed: 5 }).unwrap()
}

#[test]
fn sample_means_are_unbiased() {
    let g = er200();
    let radius = 2;
    let truth = exact_moments(&g, 2 * radius + 1).unwrap();
    let trials = 200;
    let estimates: Vec<Vec<f64>> = (0..trials)
        .map(|seed| {
            let sample = sample_nodes(&g, 21, seed, SampleMode::WithReplacement).unwrap();
            estimate_moments(&g, &sample, radius, 0.9).unwrap().values().to_vec()
        })
        .collect();
    for k in 2..=2 * radius + 1 {
        let column: Vec<f64> = estimates.iter().map(|e| e[k]).collect();
        let mean = column.iter().sum::<f64>() / trials as f64;
        let var = column.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!((mean - truth.value(k)).abs() <= 3.0 * se, "k={k}: mean {mean} truth {} se {se}", truth.value(k));
    }
}

#[test]
fn joint_intervals_cover_at_the_stated_rate() {
    let g = er200();
    let radius = 2;
    let truth = exact_moments(&g, 2 * radius + 1).unwrap();
    let trials = 100;
    let confidence = 0.8;
    let covered = (0..trials)
        .filter(|&seed| {
            let sample = sample_nodes(&g, 30, 1000 + seed, SampleMode::WithoutReplacement).unwrap();
            let m = estimate_moments(&g, &sample, radius, confidence).unwrap();
            (0..=2 * radius + 1).all(|k| {
                let (lo, hi) = m.interval(k);
                lo <= truth.value(k) && truth.value(k) <= hi
            })
        })
        .count();
    assert!(covered as f64 / trials as f64 >= confidence, "covered {covered} of {trials}");
}

#[test]
fn per_moment_intervals_use_the_plan_width() {
    let g = er200();
    let plan = plan_sample_size(0.2, 0.05).unwrap();
    let sample = sample_nodes(&g, plan.samples, 3, SampleMode::WithReplacement).unwrap();
    let config = EstimateConfig {
        radius: 2,
        intervals: IntervalSpec::PerMoment { epsilon: 0.2, delta: 0.05 },
        exact_up_to: Some(2),
    };
    let m = estimate_moments_with(&g, &sample, &config).unwrap();
    assert_eq!(m.provenance()[2], Provenance::Exact);
    assert_eq!(m.half_widths()[2], 0.0);
    for k in 3..=5 {
        assert_eq!(m.provenance()[k], Provenance::Estimated);
        assert!((m.half_widths()[k] - 0.2 * moment_ceiling(k)).abs() < 1e-15);
    }
    assert!((m.confidence() - 0.85).abs() < 1e-12);
}

#[test]
fn sampling_is_seeded() {
    let g = er200();
    let a = sample_nodes(&g, 50, 9, SampleMode::WithReplacement).unwrap();
    let b = sample_nodes(&g, 50, 9, SampleMode::WithReplacement).unwrap();
    assert_eq!(a, b);
    let mut c = sample_nodes(&g, 200, 9, SampleMode::WithoutReplacement).unwrap();
    c.sort_unstable();
    assert_eq!(c, (0..200).collect::<Vec<_>>());
    assert!(sample_nodes(&g, 201, 9, SampleMode::WithoutReplacement).is_err());
}

proptest! {
    #[test]
    fn half_widths_are_monotone(k in 1usize..12, s in 1usize..5000, q in 1usize..12, conf in 0.01f64..0.999) {
        let t = joint_half_width(k, s, q, conf);
        prop_assert!(t > 0.0);
        prop_assert!(joint_half_width(k + 1, s, q, conf) > t);
        prop_assert!(joint_half_width(k, s + 1, q, conf) < t);
        prop_assert!(joint_half_width(k, s, q + 1, conf) > t);
        prop_assert!(joint_half_width(k, s, q, (conf + 1.0) / 2.0) > t);
    }

    #[test]
    fn planned_size_meets_the_failure_target(eps in 0.01f64..1.0, delta in 0.001f64..0.999, k in 1usize..10) {
        let plan = plan_sample_size(eps, delta).unwrap();
        let t = eps * moment_ceiling(k);
        let p = failure_probability(t, k, plan.samples).unwrap();
        prop_assert!(p <= delta * (1.0 + 1e-12), "p={p} delta={delta}");
        if plan.samples > 1 {
            let fewer = failure_probability(t, k, plan.samples - 1).unwrap();
            prop_assert!(fewer > delta * (1.0 - 1e-12));
        }
    }

    #[test]
    fn joint_width_inverts_the_tail(k in 1usize..10, s in 1usize..2000, q in 1usize..10, conf in 0.05f64..0.999) {
        let t = joint_half_width(k, s, q, conf);
        let p = failure_probability(t, k, s).unwrap();
        prop_assert!((p * q as f64 - (1.0 - conf)).abs() <= 1e-9 || p == 1.0);
    }
}
