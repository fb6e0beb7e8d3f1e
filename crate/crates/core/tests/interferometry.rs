use insitu_core::basis::{BasisKind, BasisMatrix, Ordering};
use insitu_core::experiment::DetectorSpec;
use insitu_core::interferometry::{
    combine_three_step, correction_phase, measure, measure_with, reconstruct_full, InterferogramSet,
};
use insitu_core::optics::{BenchConfig, BenchState, Exposure, Perturbation, TWO_PI};
use insitu_core::Grid2D;
use proptest::prelude::*;

fn bench(p: Perturbation) -> BenchState {
    BenchState::new(&BenchConfig::default(), p).unwrap()
}

#[test]
fn noiseless_reconstruction_matches_ground_truth() {
    let bench = bench(Perturbation::glass());
    let n = 64;
    let truth = bench.ground_truth_field(n).unwrap();
    let mut fields = Vec::new();
    for kind in [BasisKind::Canonical, BasisKind::Hadamard] {
        let basis = BasisMatrix::new(kind, n, Ordering::Natural).unwrap();
        let igrams = measure(&bench, &basis, Exposure::Fixed(1.0)).unwrap();
        let field = reconstruct_full(&basis, &igrams).unwrap();
        assert!(field.correlation(&truth).unwrap() >= 0.999, "{kind}");
        fields.push(field);
    }
    assert!(fields[0].correlation(&fields[1]).unwrap() >= 0.999);
}

#[test]
fn zero_interferograms_give_zero_field() {
    let basis = BasisMatrix::hadamard(16, Ordering::Walsh).unwrap();
    let set = InterferogramSet::new(&basis, [vec![0.0; 16], vec![0.0; 16], vec![0.0; 16]], 1.0, 0).unwrap();
    let field = reconstruct_full(&basis, &set).unwrap();
    assert!(field.values().iter().all(|z| z.norm() == 0.0));
    assert!(InterferogramSet::new(&basis, [vec![-1.0; 16], vec![0.0; 16], vec![0.0; 16]], 1.0, 0).is_err());
    assert!(InterferogramSet::new(&basis, [vec![f64::NAN; 16], vec![0.0; 16], vec![0.0; 16]], 1.0, 0).is_err());
}

#[test]
fn measuring_in_another_order_equals_reordering() {
    let bench = bench(Perturbation::scatterer(4));
    let n = 256;
    let natural = BasisMatrix::hadamard(n, Ordering::Natural).unwrap();
    let spec = DetectorSpec::interferometric();
    let noisy = spec.model(bench.unperturbed_peak(), 1.0, 99).unwrap();
    for ordering in [Ordering::Walsh, Ordering::CakeCutting, Ordering::Random(3)] {
        let target = BasisMatrix::hadamard(n, ordering).unwrap();
        let a = measure(&bench, &natural, Exposure::Fixed(0.5)).unwrap().reordered(&target).unwrap();
        let b = measure(&bench, &target, Exposure::Fixed(0.5)).unwrap();
        assert_eq!(a, b, "noiseless {ordering}");
        // noise streams follow the natural row, so this holds with noise too
        let a = measure_with(&bench, &noisy, &natural, Exposure::Fixed(0.5))
            .unwrap()
            .reordered(&target)
            .unwrap();
        let b = measure_with(&bench, &noisy, &target, Exposure::Fixed(0.5)).unwrap();
        assert_eq!(a, b, "noisy {ordering}");
    }
}

#[test]
fn hadamard_is_more_robust_to_noise_at_large_n() {
    let bench = bench(Perturbation::glass());
    let n = 1024;
    let truth = bench.ground_truth_field(n).unwrap();
    let detector = DetectorSpec::interferometric()
        .model(bench.unperturbed_peak(), 1.0, 5)
        .unwrap();
    let corr = |kind| {
        let basis = BasisMatrix::new(kind, n, Ordering::Natural).unwrap();
        let igrams = measure_with(&bench, &detector, &basis, Exposure::Fixed(0.5)).unwrap();
        reconstruct_full(&basis, &igrams).unwrap().correlation(&truth).unwrap()
    };
    let (c, h) = (corr(BasisKind::Canonical), corr(BasisKind::Hadamard));
    assert!(h >= c, "hadamard {h} vs canonical {c}");
}

#[test]
fn correction_brightens_the_spot() {
    for pert in [Perturbation::glass(), Perturbation::scatterer(8)] {
        let bench = bench(pert);
        let basis = BasisMatrix::hadamard(256, Ordering::Natural).unwrap();
        let igrams = measure(&bench, &basis, Exposure::Fixed(1.0)).unwrap();
        let phase = correction_phase(&reconstruct_full(&basis, &igrams).unwrap()).unwrap();
        let before = bench.focal_amplitude(&bench.plain_prism(), 0.0).unwrap().norm_sqr();
        let slm = bench.encode_correction(&phase).unwrap();
        let after = bench.focal_amplitude(&slm, 0.0).unwrap().norm_sqr();
        assert!(after > 2.0 * before, "{}: {after} vs {before}", pert.label());

        // gauge: a global offset on the correction changes nothing but grey-level rounding
        let offset = phase.map(|p| (p + 1.234).rem_euclid(TWO_PI));
        let shifted = bench.focal_amplitude(&bench.encode_correction(&offset).unwrap(), 0.0).unwrap().norm_sqr();
        assert!((shifted - after).abs() < 1e-3 * after);
        assert!(phase.values().iter().all(|p| (0.0..TWO_PI).contains(p)));
    }
}

#[test]
fn flat_correction_without_perturbation() {
    let bench = bench(Perturbation::None);
    let basis = BasisMatrix::hadamard(64, Ordering::Natural).unwrap();
    let igrams = measure(&bench, &basis, Exposure::Fixed(1.0)).unwrap();
    let phase = correction_phase(&reconstruct_full(&basis, &igrams).unwrap()).unwrap();
    let first = phase.values()[0];
    let spread = phase.values().iter().map(|p| {
        let d = (p - first).rem_euclid(TWO_PI);
        d.min(TWO_PI - d)
    });
    assert!(spread.fold(0.0, f64::max) < 1e-3);
    assert_eq!(Grid2D::filled(8, 0.0).side(), phase.side());
}

proptest! {
    #[test]
    fn common_offsets_cancel(
        x in proptest::collection::vec((0.0f64..100.0, 0.0f64..100.0, 0.0f64..100.0), 1..32),
        c in -50.0f64..50.0,
    ) {
        let (a, b, d): (Vec<f64>, Vec<f64>, Vec<f64>) = x.iter().fold((vec![], vec![], vec![]), |mut acc, t| {
            acc.0.push(t.0);
            acc.1.push(t.1);
            acc.2.push(t.2);
            acc
        });
        let plus = |v: &[f64]| v.iter().map(|e| e + c).collect::<Vec<_>>();
        let x0 = combine_three_step(&a, &b, &d).unwrap();
        let x1 = combine_three_step(&plus(&a), &plus(&b), &plus(&d)).unwrap();
        for (p, q) in x0.values().iter().zip(x1.values()) {
            prop_assert!((p - q).norm() < 1e-11 * (200.0 + c.abs()));
        }
    }
}
