use minktrace::functionals::{phi_p, psi_p, PExponent};
use minktrace::matcore::{
    abs, apply_fn, eig_hermitian, mat_power, positive_part, random_hermitian_with, random_psd_with,
    random_unitary_with, rng_for, trace_norm, HermitianMatrix, PsdMatrix,
};
use minktrace::tensor::{kron, TensorSpace};
use minktrace::CMatrix;
use proptest::prelude::*;

fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    (a - b).max_abs() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn calculus_is_multiplicative(seed in any::<u64>(), dim in 1usize..6) {
        let h = random_hermitian_with(&mut rng_for(seed), dim);
        let f = apply_fn(&h, |x| x.sin()).unwrap();
        let g = apply_fn(&h, |x| x * x + 1.0).unwrap();
        let fg = apply_fn(&h, |x| x.sin() * (x * x + 1.0)).unwrap();
        prop_assert!(close(&(f.matrix() * g.matrix()), fg.matrix(), 1e-12));
    }

    #[test]
    fn calculus_commutes_with_unitaries(seed in any::<u64>(), dim in 1usize..6, p in 0.1f64..4.0) {
        let mut rng = rng_for(seed);
        let a = random_psd_with(&mut rng, dim, 1.0);
        let u = random_unitary_with(&mut rng, dim);
        let lhs = mat_power(&a.conjugate_by(&u).unwrap(), p).unwrap();
        let rhs = mat_power(&a, p).unwrap().conjugate_by(&u).unwrap();
        prop_assert!(close(lhs.matrix(), rhs.matrix(), 1e-10));
    }

    #[test]
    fn positive_and_negative_parts_are_orthogonal(seed in any::<u64>(), dim in 1usize..6) {
        let h = random_hermitian_with(&mut rng_for(seed), dim);
        let plus = positive_part(&h).unwrap();
        let minus = plus.as_hermitian().sub(&h);
        prop_assert!(eig_hermitian(&minus).unwrap().min_eigenvalue() >= -1e-12);
        prop_assert!((plus.matrix() * minus.matrix()).max_abs() < 1e-12);
        let a = abs(&h).unwrap();
        prop_assert!(close(a.matrix(), &(plus.matrix() + minus.matrix()), 1e-12));
        prop_assert!((trace_norm(h.matrix()).unwrap() - a.trace()).abs() < 1e-11);
    }

    #[test]
    fn power_round_trip(seed in any::<u64>(), dim in 1usize..6, p in 0.3f64..3.0) {
        let a = random_psd_with(&mut rng_for(seed), dim, 1.0);
        let back = mat_power(&mat_power(&a, p).unwrap(), 1.0 / p).unwrap();
        prop_assert!(close(back.matrix(), a.matrix(), 1e-9));
    }

    #[test]
    fn phi_is_homogeneous_and_unitarily_invariant(seed in any::<u64>(), dim in 1usize..5, p in 0.2f64..5.0, t in 0.1f64..10.0) {
        let mut rng = rng_for(seed);
        let mats: Vec<PsdMatrix> = (0..3).map(|_| random_psd_with(&mut rng, dim, 1.0)).collect();
        let pe = PExponent::new(p).unwrap();
        let base = phi_p(&mats, pe).unwrap();
        let scaled: Vec<_> = mats.iter().map(|m| m.scale(t)).collect();
        prop_assert!((phi_p(&scaled, pe).unwrap() - t * base).abs() <= 1e-10 * t * base.max(1.0));
        let u = random_unitary_with(&mut rng, dim);
        let rotated: Vec<_> = mats.iter().map(|m| m.conjugate_by(&u).unwrap()).collect();
        prop_assert!((phi_p(&rotated, pe).unwrap() - base).abs() <= 1e-10 * base.max(1.0));
    }

    #[test]
    fn psi_invariant_under_local_unitaries(seed in any::<u64>(), p in 0.2f64..5.0) {
        let mut rng = rng_for(seed);
        let space = TensorSpace::new(&[2, 3]).unwrap();
        let a = random_psd_with(&mut rng, 6, 1.0);
        let u = kron(&random_unitary_with(&mut rng, 2), &random_unitary_with(&mut rng, 3));
        let pe = PExponent::new(p).unwrap();
        let base = psi_p(&a, &space, pe).unwrap();
        let moved = psi_p(&a.conjugate_by(&u).unwrap(), &space, pe).unwrap();
        prop_assert!((moved - base).abs() <= 1e-10 * base.max(1.0));
    }
}

#[test]
fn two_by_two_closed_form() {
    let h = HermitianMatrix::new(CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap()).unwrap();
    let s = eig_hermitian(&h).unwrap();
    assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15 && (s.eigenvalues[1] - 3.0).abs() < 1e-15);
    // sqrt of [[2,1],[1,2]] is ((√3+1)/2) I-part and ((√3-1)/2) off-diagonal
    let r = mat_power(&PsdMatrix::new(h).unwrap(), 0.5).unwrap();
    let (d, o) = ((3f64.sqrt() + 1.0) / 2.0, (3f64.sqrt() - 1.0) / 2.0);
    assert!((r.matrix()[(0, 0)].re - d).abs() < 1e-14);
    assert!((r.matrix()[(0, 1)].re - o).abs() < 1e-14);
}

#[test]
fn singular_negative_power_rejected() {
    let a = PsdMatrix::from_diag(&[1.0, 0.0]).unwrap();
    assert!(mat_power(&a, -0.5).is_err());
    assert!(mat_power(&a, 0.5).is_ok());
}
