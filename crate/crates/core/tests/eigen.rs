mod oracle;

use cmv_core::cmv::unitary_cmv_reduction;
use cmv_core::generate::{circulant_generator, haar_unitary, random_unit_disk_polynomial};
use cmv_core::linalg::UNIT_ROUNDOFF;
use cmv_core::qriter::{eigensolve_unitary, qr_step, qr_step_perturbed, ShiftStrategy};
use cmv_core::rng::SeededRng;
use cmv_core::rootfind::{reduce_companion, roots_with, MonicPolynomial, RootOptions};
use num_complex::Complex64;

#[test]
fn small_spectra_match_characteristic_polynomial_roots() {
    for n in 2..=8usize {
        let u = haar_unitary(n, 40 + n as u64);
        let form = unitary_cmv_reduction(&u, &SeededRng::new(2).unit_vector(n)).unwrap();
        let eig =
            eigensolve_unitary(&form.t, &form.profile, ShiftStrategy::Wilkinson, 100 * n).unwrap();
        assert!(eig.converged);
        let reference = oracle::durand_kerner(&oracle::char_poly(&u));
        let d = oracle::matching_distance(&eig.eigenvalues, &reference);
        assert!(d < 1e-8, "n = {n}: {d:e}");
    }
}

#[test]
fn spectra_match_dense_schur() {
    for (k, n) in [10usize, 17, 24, 32].into_iter().enumerate() {
        let u = haar_unitary(n, 70 + k as u64);
        let form = unitary_cmv_reduction(&u, &SeededRng::new(k as u64).unit_vector(n)).unwrap();
        for shift in [ShiftStrategy::Wilkinson, ShiftStrategy::Rayleigh] {
            let eig = eigensolve_unitary(&form.t, &form.profile, shift, 100 * n).unwrap();
            assert!(eig.converged, "n = {n}, {shift}");
            assert!(eig
                .eigenvalues
                .iter()
                .all(|z| (z.norm() - 1.0).abs() <= 1e-10));
            let d = oracle::matching_distance(&eig.eigenvalues, &oracle::schur_eigenvalues(&u));
            assert!(d < 1e-8, "n = {n}, {shift}: {d:e}");
        }
    }
}

#[test]
fn qr_steps_keep_the_circulant_profile() {
    let n = 16;
    let form =
        unitary_cmv_reduction(&circulant_generator(n), &SeededRng::new(1).unit_vector(n)).unwrap();
    let initial = oracle::schur_eigenvalues(&form.t);
    let mut t = form.t.clone();
    for _ in 0..32 {
        let step = qr_step(&t, &form.profile, ShiftStrategy::Wilkinson).unwrap();
        let tol = 10.0 * n as f64 * UNIT_ROUNDOFF * t.frobenius_norm();
        assert!(
            step.profile_violation <= tol,
            "{:e}",
            step.profile_violation
        );
        t = step.t_next;
    }
    assert!(oracle::matching_distance(&initial, &oracle::schur_eigenvalues(&t)) <= 1e-8);
}

#[test]
fn perturbed_steps_keep_rank_structure() {
    let (p, _) = random_unit_disk_polynomial(12, 5);
    let mut b = reduce_companion(&p).unwrap();
    for _ in 0..16 {
        let (next, report) = qr_step_perturbed(&b, ShiftStrategy::Wilkinson).unwrap();
        assert!(report.block_hessenberg_violation <= 1e-10, "{report:?}");
        assert!(report.max_subdiagonal_ratio <= 1e-8, "{report:?}");
        assert!(report.upper_rank_ratio <= 1e-8, "{report:?}");
        assert!(
            report.aggregate_rank_ratios.iter().all(|&(_, r)| r <= 1e-8),
            "{report:?}"
        );
        b = next;
    }
}

#[test]
fn roots_match_durand_kerner() {
    for seed in 0..6 {
        let mut rng = SeededRng::new(seed);
        let degree = 3 + seed as usize;
        let coeffs: Vec<Complex64> = (0..degree).map(|_| rng.gaussian()).collect();
        let p = MonicPolynomial::new(coeffs.clone()).unwrap();
        let found = roots_with(&p, &RootOptions::default()).unwrap();
        assert!(found.converged);
        let mut high = vec![Complex64::new(1.0, 0.0)];
        high.extend(coeffs.iter().rev());
        let d = oracle::matching_distance(&found.roots, &oracle::durand_kerner(&high));
        assert!(d < 1e-8, "seed {seed}: {d:e}");
    }
}
