use std::collections::HashMap;

use cumcal::binning::{assign_bins, noiseless_diagram, reliability_diagram};
use cumcal::bootstrap::bootstrap_diagrams;
use cumcal::cumulative::{cumulative_curve, noiseless_curve, running_means, secant_slope};
use cumcal::data::{write_csv, Observations};
use cumcal::synthetic::{deviation_family, score_family};
use cumcal::{
    BinningKind, BinningScheme, DeviationFamily, DeviationParams, PairedSample, ScoreFamily,
    SortedDataset, TrueModel,
};
use proptest::prelude::*;

fn samples_strategy(max_len: usize) -> impl Strategy<Value = Vec<PairedSample>> {
    prop::collection::vec((0.0f64..=1.0, any::<bool>()), 1..max_len).prop_map(|v| {
        v.into_iter()
            .map(|(p, c)| PairedSample::new(p, c).unwrap())
            .collect()
    })
}

// Scores drawn from a small grid so ties are common.
fn tied_samples_strategy(max_len: usize) -> impl Strategy<Value = Vec<PairedSample>> {
    prop::collection::vec((0u8..=8, any::<bool>()), 1..max_len).prop_map(|v| {
        v.into_iter()
            .map(|(p, c)| PairedSample::new(p as f64 / 8.0, c).unwrap())
            .collect()
    })
}

fn multiset(samples: &[PairedSample]) -> HashMap<(u64, bool), usize> {
    let mut m = HashMap::new();
    for s in samples {
        *m.entry((s.score().to_bits(), s.outcome())).or_default() += 1;
    }
    m
}

proptest! {
    #[test]
    fn sorting_preserves_pairs(samples in tied_samples_strategy(60), seed in any::<u64>()) {
        let ds = SortedDataset::new(samples.clone(), seed).unwrap();
        prop_assert!(ds.samples().windows(2).all(|w| w[0].score() <= w[1].score()));
        prop_assert_eq!(multiset(ds.samples()), multiset(&samples));
        prop_assert_eq!(&ds, &SortedDataset::new(samples, seed).unwrap());
    }

    #[test]
    fn serialize_then_ingest_is_bit_exact(samples in samples_strategy(80)) {
        let mut buf = Vec::new();
        write_csv(&mut buf, &samples, None).unwrap();
        let back = Observations::from_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.samples, samples);
    }

    #[test]
    fn running_means_match_direct_sums(samples in samples_strategy(50)) {
        let ds = SortedDataset::new(samples, 0).unwrap();
        let n = ds.len() as f64;
        let means = running_means(&ds);
        let curve = cumulative_curve(&ds);
        let mut f = 0.0;
        let mut e = 0.0;
        for (k, s) in ds.samples().iter().enumerate() {
            f += s.score();
            e += s.outcome_value();
            prop_assert!((means.expected[k] - f / n).abs() <= 1e-12);
            prop_assert!((means.empirical[k] - e / n).abs() <= 1e-12);
            prop_assert!((curve.ordinates()[k] - (e - f) / n).abs() <= 1e-12);
        }
    }

    #[test]
    fn curve_telescopes_and_steps_are_bounded(samples in samples_strategy(400)) {
        let ds = SortedDataset::new(samples, 1).unwrap();
        let n = ds.len();
        let curve = cumulative_curve(&ds);
        let mean_c = ds.outcomes().sum::<f64>() / n as f64;
        let mean_p = ds.scores().sum::<f64>() / n as f64;
        prop_assert!((curve.diff_at(n) - (mean_c - mean_p)).abs() <= 1e-12);
        for k in 1..=n {
            let step = (curve.diff_at(k) - curve.diff_at(k - 1)).abs();
            prop_assert!(step <= 1.0 / n as f64 + 1e-15);
        }
        for (k, x) in curve.abscissas().iter().enumerate() {
            prop_assert_eq!(*x, (k + 1) as f64 / n as f64);
        }
    }

    #[test]
    fn secant_slope_is_mean_step(samples in samples_strategy(300), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let ds = SortedDataset::new(samples, 2).unwrap();
        let n = ds.len();
        prop_assume!(n >= 2);
        let (mut lo, mut hi) = (a.index(n + 1), b.index(n + 1));
        if lo > hi { std::mem::swap(&mut lo, &mut hi); }
        prop_assume!(lo < hi);
        let curve = cumulative_curve(&ds);
        let est = secant_slope(&curve, lo, hi).unwrap();
        let direct: f64 = ds.samples()[lo..hi].iter().map(|s| s.outcome_value() - s.score()).sum::<f64>()
            / (hi - lo) as f64;
        prop_assert!((est.slope - direct).abs() <= 1e-12, "{} vs {}", est.slope, direct);
        prop_assert!(est.slope.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn bins_partition_the_dataset(samples in tied_samples_strategy(120), m in 1usize..25, equal_count in any::<bool>()) {
        let ds = SortedDataset::new(samples, 3).unwrap();
        let n = ds.len();
        let kind = if equal_count { BinningKind::EqualCount } else { BinningKind::EqualWidth };
        let scheme = BinningScheme::new(kind, m);
        if kind == BinningKind::EqualCount && m > n {
            prop_assert!(assign_bins(&ds, scheme).is_err());
            return Ok(());
        }
        let bins = assign_bins(&ds, scheme).unwrap();
        let mut next = 0;
        for b in &bins {
            prop_assert_eq!(b.indices.start, next);
            prop_assert!(!b.indices.is_empty());
            next = b.indices.end;
        }
        prop_assert_eq!(next, n);
        if equal_count {
            let sizes: Vec<usize> = bins.iter().map(|b| b.indices.len()).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        }

        let diagram = reliability_diagram(&ds, scheme).unwrap();
        prop_assert_eq!(diagram.total_count(), n);
        let weighted_a: f64 = diagram.bins.iter().map(|b| b.count as f64 * b.mean_score).sum();
        let weighted_b: f64 = diagram.bins.iter().map(|b| b.count as f64 * b.success_rate).sum();
        prop_assert!((weighted_a - ds.scores().sum::<f64>()).abs() <= 1e-12);
        prop_assert!((weighted_b - ds.outcomes().sum::<f64>()).abs() <= 1e-12);
        prop_assert!(diagram.bins.windows(2).all(|w| w[0].mean_score <= w[1].mean_score));
        prop_assert!(diagram.bins.iter().all(|b| (0.0..=1.0).contains(&b.mean_score) && (0.0..=1.0).contains(&b.success_rate)));

        // merging every bin gives the single-bin diagram
        let single = reliability_diagram(&ds, BinningScheme::new(kind, 1)).unwrap();
        prop_assert!((weighted_a / n as f64 - single.bins[0].mean_score).abs() <= 1e-12);
        prop_assert!((weighted_b / n as f64 - single.bins[0].success_rate).abs() <= 1e-12);
    }

    #[test]
    fn equal_width_bins_hold_their_scores(samples in samples_strategy(200), m in 1usize..30) {
        let ds = SortedDataset::new(samples, 0).unwrap();
        let diagram = reliability_diagram(&ds, BinningScheme::equal_width(m)).unwrap();
        prop_assert!(diagram.bins.windows(2).all(|w| w[0].bin < w[1].bin));
        let bins = assign_bins(&ds, BinningScheme::equal_width(m)).unwrap();
        for b in &bins {
            let (lo, hi) = ((b.bin - 1) as f64 / m as f64, b.bin as f64 / m as f64);
            for s in &ds.samples()[b.indices.clone()] {
                let p = s.score();
                prop_assert!(p >= lo - 1e-15 && (p < hi + 1e-15 || b.bin == m));
            }
        }
    }

    #[test]
    fn deviation_families_stay_in_unit_interval(
        n in 1usize..400,
        slope in -2.0f64..2.0,
        height in -1.0f64..1.0,
        amplitude in -1.0f64..1.0,
    ) {
        let params = DeviationParams { linear_slope: slope, bump_height: height, oscillation_amplitude: amplitude, ..Default::default() };
        for sf in ScoreFamily::ALL {
            let scores = score_family(sf, n);
            prop_assert!(scores.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(scores.iter().all(|&p| p > 0.0 && p < 1.0));
            for df in DeviationFamily::ALL {
                let truth = deviation_family(df, &scores, &params);
                prop_assert!(truth.iter().all(|t| (0.0..=1.0).contains(t)));
            }
        }
    }
}

// Upper 1% point of chi-square with 1 and 5 degrees of freedom.
const CHI2_99: [(usize, f64); 2] = [(1, 6.634_896_601), (5, 15.086_272_47)];

fn chi_square_tie_uniformity(r: usize) {
    let factorial: usize = (1..=r).product();
    let trials = 1000 * factorial;
    // r samples with identical score, distinguished by their original index
    let samples: Vec<PairedSample> = (0..r).map(|_| PairedSample::new(0.5, false).unwrap()).collect();
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for seed in 0..trials as u64 {
        let (_, order) = cumcal::data::sort_with_tie_randomization(samples.clone(), seed).unwrap();
        *counts.entry(order).or_default() += 1;
    }
    assert_eq!(counts.len(), factorial, "every ordering should appear");
    let expected = trials as f64 / factorial as f64;
    let stat: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let critical = CHI2_99.iter().find(|(df, _)| *df == factorial - 1).unwrap().1;
    assert!(stat < critical, "r = {r}: chi-square {stat} >= {critical}");
}

#[test]
fn tie_orders_are_uniform_pairs() {
    chi_square_tie_uniformity(2);
}

#[test]
fn tie_orders_are_uniform_triples() {
    chi_square_tie_uniformity(3);
}

#[test]
fn null_scale_matches_triangle() {
    let model = TrueModel::new(ScoreFamily::Equispaced, DeviationFamily::Calibrated, 1000, DeviationParams::default()).unwrap();
    let h = cumulative_curve(&model.sample(0)).triangle_half_height();
    let finals: Vec<f64> = (0..1000u64)
        .map(|t| {
            let ds = model.sample(cumcal::rng::derive_seed(42, t));
            *cumulative_curve(&ds).ordinates().last().unwrap()
        })
        .collect();
    let mean = finals.iter().sum::<f64>() / 1000.0;
    let sd = (finals.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / 999.0).sqrt();
    assert!((0.87..=1.13).contains(&(sd / h)), "sd/h = {}", sd / h);
}

#[test]
fn noiseless_matches_monte_carlo_mean() {
    // The noiseless curve is the expectation of the sampled one.
    let model = TrueModel::new(ScoreFamily::DenseNearOne, DeviationFamily::Oscillation, 200, DeviationParams::default()).unwrap();
    let exact = noiseless_curve(&model);
    let trials = 4000;
    let mut mean = vec![0.0; 200];
    for t in 0..trials {
        let curve = cumulative_curve(&model.sample(t));
        for (m, d) in mean.iter_mut().zip(curve.ordinates()) {
            *m += d / trials as f64;
        }
    }
    let h = exact.triangle_half_height();
    for (k, (m, e)) in mean.iter().zip(exact.ordinates()).enumerate() {
        // standard error of the mean is at most h / sqrt(trials)
        assert!((m - e).abs() < 5.0 * h / (trials as f64).sqrt(), "k = {k}: {m} vs {e}");
    }
}

#[test]
fn schemes_coincide_on_equispaced_scores() {
    let model = TrueModel::new(ScoreFamily::Equispaced, DeviationFamily::Linear, 600, DeviationParams::default()).unwrap();
    let ds = model.sample(5);
    for m in [3, 10, 20, 60] {
        let w = reliability_diagram(&ds, BinningScheme::equal_width(m)).unwrap();
        let c = reliability_diagram(&ds, BinningScheme::equal_count(m)).unwrap();
        let pw: Vec<_> = w.points().collect();
        let pc: Vec<_> = c.points().collect();
        assert_eq!(pw, pc, "m = {m}");
        let nw = noiseless_diagram(&model, BinningScheme::equal_width(m)).unwrap();
        let nc = noiseless_diagram(&model, BinningScheme::equal_count(m)).unwrap();
        assert_eq!(nw.points().collect::<Vec<_>>(), nc.points().collect::<Vec<_>>());
    }
}

#[test]
fn notch_bins_lie_on_diagonal() {
    let params = DeviationParams::default();
    let model = TrueModel::new(ScoreFamily::Equispaced, DeviationFamily::BumpNotch, 1000, params).unwrap();
    // 50 equal-width bins: bin 13 is [0.24, 0.26), strictly inside the notch
    let d = noiseless_diagram(&model, BinningScheme::equal_width(50)).unwrap();
    let notch_bin = d.bins.iter().find(|b| b.bin == 13).unwrap();
    assert_eq!(notch_bin.success_rate, notch_bin.mean_score);
    let outside = d.bins.iter().find(|b| b.bin == 5).unwrap();
    assert!(outside.success_rate > outside.mean_score);
}

#[test]
fn bootstrap_envelope_covers_original() {
    let model = TrueModel::new(ScoreFamily::Equispaced, DeviationFamily::Calibrated, 1000, DeviationParams::default()).unwrap();
    let scheme = BinningScheme::equal_count(10);
    let mut covered = 0;
    let mut total = 0;
    for trial in 0..100u64 {
        let ds = model.sample(trial);
        let original = reliability_diagram(&ds, scheme).unwrap();
        let ens = bootstrap_diagrams(&ds, scheme, 20, 1000 + trial).unwrap();
        for b in &original.bins {
            let rates: Vec<f64> = ens
                .replicates
                .iter()
                .filter_map(|r| r.bins.iter().find(|x| x.bin == b.bin))
                .map(|x| x.success_rate)
                .collect();
            let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            total += 1;
            covered += usize::from(lo <= b.success_rate && b.success_rate <= hi);
        }
    }
    assert!(covered as f64 >= 0.9 * total as f64, "{covered}/{total}");
}
