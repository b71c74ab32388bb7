use asi_core::detector::jml_squarings;
use asi_core::{Constellation, LgsdConfig, Modulation, NoiseModel, Scenario};
use asi_sim::harness::{draw_trial, point_seed, run_point, run_sweep, DetectorSpec, ExperimentPlan, BLOCK_TRIALS};
use asi_sim::stats::{wilson, wilson95};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn plan(detectors: Vec<DetectorSpec>, snrs: Vec<f64>, symbols: u64) -> ExperimentPlan {
    let s = Scenario::default_geometry();
    let mut p = ExperimentPlan::new(
        s.build_channel(),
        s.noise_correlation().clone(),
        Modulation::Psk8,
        detectors,
        snrs,
        11,
    );
    p.min_symbols = symbols;
    p.max_symbols = symbols;
    p
}

fn elgsd() -> DetectorSpec {
    DetectorSpec::enhanced_lgsd(LgsdConfig::standard(5, 1, 1, 1))
}

#[test]
fn trials_depend_only_on_seed_and_index() {
    let s = Scenario::default_geometry();
    let a = s.build_channel();
    let c = Constellation::new(Modulation::Psk8);
    let noise = NoiseModel::new(a.sigma2_for_snr(5.0), s.noise_correlation()).unwrap();
    let seed = point_seed(1, 0);
    let t = draw_trial(&a, &c, &noise, seed, 17);
    assert_eq!(t, draw_trial(&a, &c, &noise, seed, 17));
    assert_ne!(t, draw_trial(&a, &c, &noise, seed, 18));
    assert_ne!(t, draw_trial(&a, &c, &noise, point_seed(1, 1), 17));
    assert_ne!(point_seed(1, 0), point_seed(2, 0));
}

#[test]
fn detectors_see_common_random_numbers() {
    let alone = run_point(&plan(vec![DetectorSpec::Jml], vec![6.0], 2_000), 0).unwrap();
    let paired = run_point(&plan(vec![elgsd(), DetectorSpec::Jml], vec![6.0], 2_000), 0).unwrap();
    let jml: Vec<_> = paired.iter().filter(|r| r.detector == "JML").cloned().collect();
    assert_eq!(alone, jml);
}

#[test]
fn jml_is_error_free_at_high_snr_and_charges_the_closed_form() {
    let rec = run_point(&plan(vec![DetectorSpec::Jml], vec![60.0], 1_000), 0).unwrap();
    assert_eq!(rec.len(), 5);
    for r in &rec {
        assert_eq!(r.bits, 3_000);
        assert_eq!(r.errors, 0);
        assert_eq!(r.ber, 0.0);
        assert_eq!(r.mean_squarings, jml_squarings(5, 8) as f64);
        assert!(r.ci95.lo == 0.0 && r.ci95.hi > 0.0);
    }
}

#[test]
fn jml_ber_falls_with_snr() {
    let rec = run_sweep(&plan(vec![DetectorSpec::Jml], vec![0.0, 6.0, 12.0], 2_000)).unwrap();
    let ref_sat: Vec<_> = rec.iter().filter(|r| r.satellite == 0).collect();
    assert_eq!(ref_sat.len(), 3);
    for w in ref_sat.windows(2) {
        assert!(w[1].ber < w[0].ber);
        assert!(w[1].ci95.hi < w[0].ci95.lo, "{:?} vs {:?}", w[0], w[1]);
    }
}

#[test]
fn stopping_rule_runs_whole_blocks_between_bounds() {
    let mut p = plan(vec![DetectorSpec::Jml, elgsd()], vec![0.0, 30.0], 0);
    p.min_symbols = 1_000;
    p.max_bit_errors = 50;
    p.max_symbols = 5_000;
    let rec = run_sweep(&p).unwrap();
    // Low SNR: errors come quickly, so the first block suffices.
    let low = rec.iter().find(|r| r.snr_db == 0.0).unwrap();
    assert_eq!(low.bits, 3 * BLOCK_TRIALS);
    // High SNR: too few errors, so the cap applies.
    let high = rec.iter().find(|r| r.snr_db == 30.0).unwrap();
    assert_eq!(high.bits, 3 * 5_000);
    for r in &rec {
        assert_eq!(r.ber, r.errors as f64 / r.bits as f64);
        assert!(r.ci95.contains(r.ber));
    }
}

#[test]
fn rows_are_ordered_by_detector_snr_satellite() {
    let rec = run_sweep(&plan(vec![elgsd(), DetectorSpec::Jml], vec![20.0, 10.0], 1_000)).unwrap();
    let keys: Vec<(String, f64, usize)> = rec
        .iter()
        .map(|r| (r.detector.clone(), r.snr_db, r.satellite))
        .collect();
    let mut expected = Vec::new();
    for d in ["E-LGSD(1/1/1)", "JML"] {
        for snr in [20.0, 10.0] {
            for k in 0..5 {
                expected.push((d.to_string(), snr, k));
            }
        }
    }
    assert_eq!(keys, expected);
}

#[test]
fn plans_are_validated() {
    let good = plan(vec![DetectorSpec::Jml], vec![0.0], 1_000);
    assert!(good.validate().is_ok());
    let mut p = good.clone();
    p.snr_points.clear();
    assert!(p.validate().is_err());
    let mut p = good.clone();
    p.snr_points = vec![f64::NAN];
    assert!(p.validate().is_err());
    let mut p = good.clone();
    p.detectors.clear();
    assert!(p.validate().is_err());
    let mut p = good.clone();
    p.max_symbols = 10;
    assert!(p.validate().is_err());
    let mut p = good.clone();
    p.reference_satellite = 5;
    assert!(p.validate().is_err());
    let mut p = good.clone();
    p.detectors = vec![DetectorSpec::Jml, DetectorSpec::Jml];
    assert!(p.validate().is_err());
    let mut p = good;
    let mut bad = LgsdConfig::standard(5, 1, 1, 1);
    bad.group_sizes = vec![3, 3];
    p.detectors = vec![DetectorSpec::lgsd(bad)];
    assert!(p.validate().is_err());
}

#[test]
fn wilson_interval_covers_at_the_nominal_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for p in [0.01, 0.05, 0.5] {
        let n = 2_000u64;
        let reps = 2_000;
        let hits = (0..reps)
            .filter(|_| {
                let s = (0..n).filter(|_| rng.random_bool(p)).count() as u64;
                wilson95(s, n).contains(p)
            })
            .count();
        let coverage = hits as f64 / reps as f64;
        assert!((0.925..=0.975).contains(&coverage), "p = {p}: coverage {coverage}");
    }
}

#[test]
fn wilson_interval_edges() {
    let i = wilson95(0, 100);
    assert_eq!(i.lo, 0.0);
    assert!(i.hi > 0.0 && i.hi < 0.05);
    let i = wilson95(100, 100);
    assert_eq!(i.hi, 1.0);
    let i = wilson(0, 0, 1.96);
    assert_eq!((i.lo, i.hi), (0.0, 1.0));
    let narrow = wilson95(50, 10_000);
    let wide = wilson95(5, 1_000);
    assert!(narrow.hi - narrow.lo < wide.hi - wide.lo);
}
