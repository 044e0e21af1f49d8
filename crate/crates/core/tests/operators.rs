mod common;

use common::{naive_dft, random_image, rng};
use maskopt::signal::{centered_frequency, centered_index, storage_index};
use maskopt::*;
use proptest::prelude::*;

fn random_points(rows: usize, cols: usize, count: usize, seed: u64) -> SamplingPattern {
    let fam = SubsetFamily::new(rows, cols, FamilyKind::Points).unwrap();
    generate_mask(&MaskGeneratorConfig::new(GeneratorKind::UniformRandom).with_seed(seed), fam, count).unwrap()
}

#[test]
fn fft_matches_direct_dft() {
    let mut r = rng(1);
    for (rows, cols) in [(8, 8), (4, 16), (1, 8), (6, 5)] {
        let x = random_image(rows, cols, &mut r);
        let k = fft2_unitary(&x);
        for (a, b) in k.data().iter().zip(naive_dft(&x)) {
            assert!((a - b).norm() < 1e-12, "{rows}x{cols}");
        }
    }
}

#[test]
fn row_two_of_four_by_four() {
    let data: Vec<Complex64> = (0..16).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
    let k = KSpace::new(4, 4, data.clone()).unwrap();
    let fam = SubsetFamily::new(4, 4, FamilyKind::Rows).unwrap();
    let p = SamplingPattern::from_trace(fam, &[Subset::Row(2)]).unwrap();
    let m = subsample(&k, &p).unwrap();
    assert_eq!(m.values(), &data[8..12]);
    assert_eq!(m.indices(), &[8, 9, 10, 11]);
}

#[test]
fn full_pattern_zero_fill_is_identity() {
    let mut r = rng(2);
    let x = random_image(8, 8, &mut r);
    let fam = SubsetFamily::new(8, 8, FamilyKind::Rows).unwrap();
    let m = subsample(&fft2_unitary(&x), &SamplingPattern::full(fam)).unwrap();
    assert!(adjoint_zero_fill(&m).distance(&x).unwrap() < 1e-12);
}

#[test]
fn shape_mismatch_is_reported() {
    let fam = SubsetFamily::new(8, 8, FamilyKind::Rows).unwrap();
    let k = KSpace::zeros(4, 4);
    assert!(matches!(subsample(&k, &SamplingPattern::full(fam)), Err(Error::ShapeMismatch { .. })));
}

#[test]
fn centered_index_round_trip() {
    for n in [1usize, 2, 7, 8, 32] {
        for k in 0..n {
            assert_eq!(storage_index(centered_index(k, n), n), k);
        }
    }
    assert_eq!(centered_frequency(0, 8), 0);
    assert_eq!(centered_frequency(7, 8), -1);
    assert_eq!(centered_frequency(4, 8), -4);
}

fn arb_dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..5, 1usize..5).prop_map(|(a, b)| (1 << a, 1 << b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval((rows, cols) in arb_dims(), seed in any::<u64>()) {
        let x = random_image(rows, cols, &mut rng(seed));
        let k = fft2_unitary(&x);
        prop_assert!((k.norm() - x.norm()).abs() <= 1e-10 * x.norm());
        prop_assert!(ifft2_unitary(&k).distance(&x).unwrap() <= 1e-10 * x.norm());
    }

    #[test]
    fn adjoint_dot_product((rows, cols) in arb_dims(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_image(rows, cols, &mut r);
        let y = random_image(rows, cols, &mut r);
        let p = random_points(rows, cols, rows * cols / 2, seed);
        let ax = subsample(&fft2_unitary(&x), &p).unwrap();
        let ay = subsample(&fft2_unitary(&y), &p).unwrap();
        let lhs: Complex64 = ay.values().iter().zip(ax.values()).map(|(a, b)| a.conj() * b).sum();
        let rhs = adjoint_zero_fill(&ay).dot(&x);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn haar_orthonormal((rows, cols) in arb_dims(), seed in any::<u64>()) {
        let x = random_image(rows, cols, &mut rng(seed));
        let h = Haar2d::with_default_levels(rows, cols).unwrap();
        let c = h.analyze_image(&x).unwrap();
        let cn: f64 = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((cn - x.norm()).abs() <= 1e-10 * x.norm());
        let back = h.synthesize_image(&c).unwrap();
        prop_assert!(back.distance(&x).unwrap() <= 1e-10 * x.norm());
    }
}
