mod common;

use fup_core::baker::{
    baker_letter_matrix, build_baker, loglog_slope, propagation_check, spectral_gap_experiment, spectrum,
    BakerAlphabet, BumpRegion, CutoffKind, CutoffProfile, Sampling,
};
use fup_core::cantor::{Alphabet1D, Alphabet2D};
use fup_core::dft::{fourier_submatrix, Dim};
use fup_core::linalg::{eigenvalues, CMatrix};
use fup_core::{FupError, ResourceCaps};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use common::rng;

fn one(m: usize, d: &[i64]) -> BakerAlphabet {
    BakerAlphabet::One(Alphabet1D::new(m, d.iter().copied()).unwrap())
}

fn two(m: usize, d: &[(i64, i64)]) -> BakerAlphabet {
    BakerAlphabet::Two(Alphabet2D::new(m, d.iter().copied()).unwrap())
}

fn caps() -> ResourceCaps {
    ResourceCaps::default()
}

/// The full unitary DFT matrix on `ℤ_n^d`.
fn fourier(n: usize, dim: Dim) -> CMatrix {
    let pts: Vec<(usize, usize)> = match dim {
        Dim::One => (0..n).map(|x| (x, 0)).collect(),
        Dim::Two => (0..n * n).map(|i| (i / n, i % n)).collect(),
    };
    fourier_submatrix(n, dim, &pts, &pts, false)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[test]
fn two_by_two_example() {
    let b = build_baker(&one(2, &[0]), 1, &CutoffProfile::new(CutoffKind::Indicator), &caps()).unwrap();
    let s = 1.0 / 2f64.sqrt();
    let expect = CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(s, 0.0), Complex64::new(0.0, 0.0), Complex64::new(s, 0.0), Complex64::new(0.0, 0.0)],
    );
    assert!(max_abs(&(&b.matrix - expect)) < 1e-15);
}

#[test]
fn zero_cutoff_and_small_cases() {
    let b = build_baker(&two(3, &[(0, 0), (1, 1)]), 2, &CutoffProfile::new(CutoffKind::Zero), &caps()).unwrap();
    assert_eq!(max_abs(&b.matrix), 0.0);
    assert!(spectrum(&b).iter().all(|l| l.norm() == 0.0));

    let b = build_baker(&two(2, &[(0, 0)]), 1, &CutoffProfile::smooth_bump(), &caps()).unwrap();
    assert_eq!(b.matrix.shape(), (4, 4));
    assert!(b.operator_norm() <= 1.0 + 1e-9);

    let tiny = ResourceCaps { dense_side: 100, ..caps() };
    assert!(matches!(
        build_baker(&two(3, &[(0, 0)]), 3, &CutoffProfile::smooth_bump(), &tiny),
        Err(FupError::ResourceCap { .. })
    ));
    assert!(build_baker(&one(3, &[0]), 0, &CutoffProfile::smooth_bump(), &caps()).is_err());
}

#[test]
fn block_identity() {
    let cutoff = CutoffProfile::new(CutoffKind::PlateauBump { flat: [0.25, 0.75] });
    for (alpha, k) in [(one(3, &[0, 2]), 3), (two(3, &[(0, 0), (2, 1), (1, 2)]), 2)] {
        let b = build_baker(&alpha, k, &cutoff, &caps()).unwrap();
        let letters = alpha.letters();
        let parts: Vec<CMatrix> =
            letters.iter().map(|&l| baker_letter_matrix(&alpha, l, k, &cutoff, &caps()).unwrap()).collect();
        let forward = parts.iter().fold(CMatrix::zeros(b.matrix.nrows(), b.matrix.ncols()), |acc, p| acc + p);
        let backward = parts.iter().rev().fold(CMatrix::zeros(b.matrix.nrows(), b.matrix.ncols()), |acc, p| acc + p);
        assert!(max_abs(&(&forward - &b.matrix)) < 1e-12);
        assert!(max_abs(&(&backward - &b.matrix)) < 1e-12);
    }
}

#[test]
fn adjoint_identity() {
    let mut r = rng(5);
    for (alpha, k) in [(one(3, &[0, 2]), 3), (one(2, &[1]), 4), (two(2, &[(0, 1)]), 2)] {
        let b = build_baker(&alpha, k, &CutoffProfile::smooth_bump(), &caps()).unwrap();
        let side = b.matrix.nrows();
        let phi: Vec<f64> = (0..side).map(|_| r.random_range(0.0..1.0)).collect();
        let psi: Vec<f64> = (0..side).map(|_| r.random_range(0.0..1.0)).collect();
        let diag =
            |v: &[f64]| CMatrix::from_fn(side, side, |i, j| Complex64::new(if i == j { v[i] } else { 0.0 }, 0.0));
        let f = fourier(b.n, alpha.dim());
        let fa = f.adjoint();
        // Multipliers conjugated to the Fourier side.
        let phi_f = &fa * diag(&phi) * &f;
        let psi_f = &fa * diag(&psi) * &f;
        let lhs = &psi_f * &b.matrix * &phi_f;
        let inner = diag(&phi) * &b.matrix * diag(&psi);
        let rhs = &fa * inner.adjoint().map(|c| c.conj()) * &f;
        assert!(max_abs(&(lhs - rhs)) < 1e-10);
    }
}

#[test]
fn unitary_spectrum() {
    for (n, dim) in [(8, Dim::One), (5, Dim::Two)] {
        for l in eigenvalues(&fourier(n, dim)) {
            assert!((l.norm() - 1.0).abs() < 1e-9);
        }
    }
}

/// Power sums of the spectrum against traces of matrix powers, and each
/// eigenvalue against the smallest singular value of `B - λ`.
fn check_spectrum(b: &CMatrix, eig: &[Complex64]) {
    let scale = b.nrows() as f64;
    let mut power = b.clone();
    for j in 1..=4 {
        let tr = power.trace();
        let sum: Complex64 = eig.iter().map(|l| l.powu(j)).sum();
        assert!((tr - sum).norm() < 1e-8 * scale, "power {j}: {tr} vs {sum}");
        power = &power * b;
    }
    for l in eig.iter().take(5) {
        let shifted = b - CMatrix::identity(b.nrows(), b.ncols()) * *l;
        let smin = shifted.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(smin < 1e-7, "λ = {l}: σ_min = {smin}");
    }
}

#[test]
fn spectra_and_radius_trend() {
    let alpha = one(3, &[0, 2]);
    let cutoff = CutoffProfile::smooth_bump();
    let mut radii = Vec::new();
    for k in 1..=5 {
        let b = build_baker(&alpha, k, &cutoff, &caps()).unwrap();
        let eig = spectrum(&b);
        assert_eq!(eig.len(), b.n);
        check_spectrum(&b.matrix, &eig);
        assert!(eig.windows(2).all(|w| w[0].norm() >= w[1].norm() - 1e-12));
        radii.push(b.spectral_radius());
        assert!(b.spectral_radius() <= b.operator_norm() + 1e-9);
    }
    // At k = 1 each block lives on ℤ_1 and only samples χ(0) = 0.
    assert_eq!(radii[0], 0.0);
    for w in radii[1..].windows(2) {
        assert!(w[1] < w[0], "{radii:?}");
    }
}

#[test]
fn gap_experiments() {
    let cutoff = CutoffProfile::smooth_bump();
    let t =
        spectral_gap_experiment(&two(3, &[(0, 0), (1, 1), (2, 2), (0, 2), (2, 0)]), 1..=2, &cutoff, &caps()).unwrap();
    assert!(t.warning.is_some());

    let t = spectral_gap_experiment(&one(3, &[0]), 1..=5, &cutoff, &caps()).unwrap();
    assert!(t.warning.is_none());
    for row in &t.rows {
        assert!(row.radius <= row.norm + 1e-9 && row.norm <= 1.0 + 1e-9);
    }
    let radii: Vec<f64> = t.rows.iter().map(|r| r.radius).collect();
    for w in radii[1..].windows(2) {
        assert!(w[1] < 0.5 * w[0], "{radii:?}");
    }

    let free = two(3, &[(0, 0), (0, 1), (1, 0), (2, 2), (1, 2)]);
    let t = spectral_gap_experiment(&free, 1..=3, &cutoff.with_sampling(Sampling::Midpoint), &caps()).unwrap();
    assert!(t.warning.is_none(), "{:?}", t.warning);
    for w in t.rows.windows(2) {
        assert!(w[1].radius <= w[0].radius + 0.05, "{t:?}");
    }
    assert!(t.beta_ref > 0.0);
}

#[test]
fn propagation_examples() {
    let alpha = one(3, &[0, 2]);
    let b = build_baker(&alpha, 3, &CutoffProfile::smooth_bump(), &caps()).unwrap();
    let silent = BumpRegion::new(vec![[0.0, 1.0 / 27.0]]).unwrap();
    let psi = BumpRegion::new(vec![[0.05, 0.3]]).unwrap();
    assert_eq!(propagation_check(&silent, &psi, &b).unwrap().norm, 0.0);

    let phi = BumpRegion::new(vec![[0.3, 0.5]]).unwrap();
    let psi = BumpRegion::new(vec![[0.7, 0.8]]).unwrap();
    let rep = propagation_check(&phi, &psi, &b).unwrap();
    assert!(!rep.hypothesis_met && rep.separation == Some(0.0));
    assert!(rep.norm > 0.05);

    let mut norms = Vec::new();
    let mut ns = Vec::new();
    let phi = BumpRegion::new(vec![[0.65, 0.95]]).unwrap();
    let psi = BumpRegion::new(vec![[0.05, 0.15]]).unwrap();
    for k in 2..=5 {
        let b = build_baker(&alpha, k, &CutoffProfile::smooth_bump(), &caps()).unwrap();
        let rep = propagation_check(&phi, &psi, &b).unwrap();
        assert!(rep.hypothesis_met);
        norms.push(rep.norm);
        ns.push(b.n as f64);
    }
    assert!(norms.windows(2).all(|w| w[1] < w[0]));
    assert!(loglog_slope(&ns, &norms) < -1.0);
    assert!(propagation_check(&BumpRegion::new(vec![[0.1, 0.2], [0.1, 0.2]]).unwrap(), &psi, &b).is_err());
    assert!(BumpRegion::new(vec![[0.5, 0.2]]).is_err());
}

#[test]
fn slope_of_power_law() {
    let xs = [2.0, 4.0, 8.0, 16.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.5)).collect();
    assert!((loglog_slope(&xs, &ys) + 2.5).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cutoff_samples_in_unit_interval(n in 1usize..200, lo in 0.05f64..0.45, width in 0.0f64..0.4, mid in prop::bool::ANY) {
        let kinds = [CutoffKind::SmoothBump, CutoffKind::PlateauBump { flat: [lo, lo + width] }];
        for kind in kinds {
            let mut p = CutoffProfile::new(kind);
            if mid {
                p = p.with_sampling(Sampling::Midpoint);
            }
            let s = p.samples(n);
            prop_assert_eq!(s.len(), n);
            prop_assert!(s.iter().all(|&v| (0.0..=1.0).contains(&v)));
            if !mid {
                prop_assert_eq!(s[0], 0.0);
            }
        }
    }

    #[test]
    fn contraction_on_random_alphabets(m in 2usize..=4, seed in 0u64..1000, k in 1u32..=3) {
        let mut r = rng(seed);
        let size = r.random_range(1..m);
        let digits: Vec<i64> = rand::seq::index::sample(&mut r, m, size).into_iter().map(|d| d as i64).collect();
        let alpha = one(m, &digits);
        let b = build_baker(&alpha, k, &CutoffProfile::smooth_bump(), &caps()).unwrap();
        let norm = b.operator_norm();
        prop_assert!(norm <= 1.0 + 1e-9);
        prop_assert!(b.spectral_radius() <= norm + 1e-9);
    }
}
