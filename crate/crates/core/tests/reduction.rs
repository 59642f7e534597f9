mod oracle;

use cmv_core::cmv::{unitary_cmv_reduction, verify_cmv_like, verify_rank_pattern, CmvProfile};
use cmv_core::generate::{circulant_generator, fourier, haar_unitary};
use cmv_core::lanczos::{block_lanczos_unitary, verify_simultaneous_reduction};
use cmv_core::linalg::{congruence, unitarity_residual, UNIT_ROUNDOFF};
use cmv_core::rng::SeededRng;
use cmv_core::spy::SpyImage;

#[test]
fn haar_reductions_are_similar_and_cmv_like() {
    for (k, n) in [5usize, 6, 9, 12, 16].into_iter().enumerate() {
        let u = haar_unitary(n, 100 + k as u64);
        let z = SeededRng::new(k as u64).unit_vector(n);
        let form = unitary_cmv_reduction(&u, &z).unwrap();
        let scale = n as f64 * UNIT_ROUNDOFF * u.frobenius_norm();
        assert_eq!(form.profile.segments().len(), 1, "n = {n}");
        assert!(unitarity_residual(&form.q).unwrap() <= 10.0 * n as f64 * UNIT_ROUNDOFF);
        let back = congruence(&form.q, &u).unwrap();
        assert!(back.sub(&form.t).unwrap().frobenius_norm() <= 10.0 * scale);
        assert!(verify_cmv_like(&form.t, &form.profile, 10.0 * scale).passed());
        if n % 2 == 0 {
            assert!(
                verify_rank_pattern(&form.t, 10.0 * scale).passed(),
                "n = {n}"
            );
        }
        let d = oracle::matching_distance(
            &oracle::schur_eigenvalues(&u),
            &oracle::schur_eigenvalues(&form.t),
        );
        assert!(d < 1e-10, "n = {n}: spectra differ by {d:e}");
    }
}

#[test]
fn fourier_thirty_two_splits_into_eight_segments() {
    let n = 32;
    let z = SeededRng::new(1).unit_vector(n);
    let form = unitary_cmv_reduction(&fourier(n), &z).unwrap();
    let sizes: Vec<usize> = form.profile.segments().iter().map(|s| s.len()).collect();
    assert_eq!(sizes, vec![4; 8]);
    assert_eq!(form.report.breakdown_norms.len(), 7);
    assert!(form.report.breakdown_norms.iter().all(|&b| b <= 1e-12));
    // off-segment part of the spy image is empty
    let spy = SpyImage::new(&form.t, 10.0 * form.report.deflation_threshold);
    for i in 0..n {
        for j in 0..n {
            if i / 4 != j / 4 {
                assert!(!spy.is_nonzero(i, j), "({i}, {j})");
            }
        }
    }
}

#[test]
fn fourier_lanczos_breaks_down_early() {
    for m in [4usize, 8, 16] {
        let f = fourier(2 * m);
        let mut rng = SeededRng::new(m as u64);
        for _ in 0..5 {
            let z = rng.unit_vector(2 * m);
            let step = block_lanczos_unitary(&f, &z).unwrap().breakdown_step();
            assert!(matches!(step, Some(s) if s <= 3), "m = {m}: {step:?}");
        }
    }
}

#[test]
fn haar_lanczos_reduces_both_parts() {
    for n in [6usize, 11, 16] {
        let u = haar_unitary(n, n as u64);
        let z = SeededRng::new(9).unit_vector(n);
        let form = block_lanczos_unitary(&u, &z)
            .unwrap()
            .complete()
            .expect("no breakdown");
        let sim = verify_simultaneous_reduction(&form, &u).unwrap();
        assert!(sim.passed(), "n = {n}: {sim:?}");
    }
}

#[test]
fn circulant_mask_is_the_compressed_profile() {
    let n = 16;
    let z = SeededRng::new(1).unit_vector(n);
    let form = unitary_cmv_reduction(&circulant_generator(n), &z).unwrap();
    let spy = SpyImage::new(&form.t, 10.0 * form.report.deflation_threshold);
    assert_eq!(spy.to_text(), CmvProfile::single(n).mask_text());
}
