use minktrace::functionals::{phi_p, PExponent};
use minktrace::matcore::{mat_power, random_psd_with, rng_for, PsdMatrix};
use minktrace::probes::{
    counterexample_p_gt_2, expectation, limit_value, midpoint_margin, operator_convexity_witness, projector_weighting,
    small_t_expansion, unit_norm_defect, DEFAULT_ATTEMPTS, T_GRID,
};

#[test]
fn margins_for_several_exponents() {
    for p in [2.5, 3.0, 4.0] {
        let w = counterexample_p_gt_2(p, 2, 1).unwrap();
        assert!(w.margin > 1e-8, "p = {p}: margin {}", w.margin);
        assert!(unit_norm_defect(&w.v) < 1e-12);
        // the reported margin is reproducible from the witness alone
        let again = midpoint_margin(&w.a1, &w.a2, &w.b, w.t, PExponent::new(p).unwrap()).unwrap();
        assert_eq!(again, w.margin);
        // B is the projector weighting built from v
        assert!((expectation(w.b.as_hermitian(), &w.v) - 1.0).abs() < 1e-9);
        assert!((w.b.trace() - (1.0 + w.lambda)).abs() < 1e-9 * w.lambda);
    }
}

#[test]
fn witness_violates_operator_convexity_pointwise() {
    let w = operator_convexity_witness(4.0, 2, 3, DEFAULT_ATTEMPTS).unwrap();
    let mid = mat_power(&w.a1.add(&w.a2).unwrap().scale(0.5), 4.0).unwrap();
    let avg = 0.5
        * (expectation(mat_power(&w.a1, 4.0).unwrap().as_hermitian(), &w.v)
            + expectation(mat_power(&w.a2, 4.0).unwrap().as_hermitian(), &w.v));
    let gap = expectation(mid.as_hermitian(), &w.v) - avg;
    assert!((gap - w.gap).abs() < 1e-12 && gap > 0.0);
}

#[test]
fn rejects_p_at_most_two() {
    assert!(counterexample_p_gt_2(2.0, 2, 1).is_err());
    assert!(counterexample_p_gt_2(1.5, 2, 1).is_err());
}

#[test]
fn scaled_margin_approaches_limit_value() {
    // p t^{-p} margin(t) → Tr(B^{1-p} D) as t → 0, D the operator midpoint defect
    let p = 3.0;
    let w = counterexample_p_gt_2(p, 2, 1).unwrap();
    let b = projector_weighting(&w.v, 10.0).unwrap();
    let limit = limit_value(&w.a1, &w.a2, &b, p).unwrap();
    let pe = PExponent::new(p).unwrap();
    let scaled = |t: f64| p * t.powf(-p) * midpoint_margin(&w.a1, &w.a2, &b, t, pe).unwrap();
    // t stays large enough that roundoff, amplified by t^{-p}, does not dominate
    let errs: Vec<f64> = [0.5, 0.25, 0.1].iter().map(|&t| (scaled(t) - limit).abs()).collect();
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    assert!(errs[2] < 1e-2 * limit.abs(), "{errs:?} vs {limit}");
    // and the limit approaches the operator gap as λ grows, off by O(λ^{1-p})
    let mut prev = f64::INFINITY;
    for lambda in [1e1, 1e2, 1e3] {
        let l = limit_value(&w.a1, &w.a2, &projector_weighting(&w.v, lambda).unwrap(), p).unwrap();
        let dev = (l - w.gap).abs();
        assert!(dev < prev);
        assert!(dev <= 10.0 * lambda.powf(1.0 - p), "λ = {lambda}: {dev}");
        prev = dev;
    }
}

#[test]
fn scalar_expansion_oracle() {
    // r(t) = (t^p a^p + b^p)^{1/p} - b - t^p a^p b^{1-p}/p
    let (a, b, p) = (0.7f64, 1.3f64, 2.5f64);
    let r = small_t_expansion(
        &PsdMatrix::from_diag(&[a]).unwrap(),
        &PsdMatrix::from_diag(&[b]).unwrap(),
        p,
        &T_GRID,
    )
    .unwrap();
    for &(t, res) in &r.residuals {
        let scalar =
            (t.powf(p) * a.powf(p) + b.powf(p)).powf(1.0 / p) - b - t.powf(p) * a.powf(p) * b.powf(1.0 - p) / p;
        assert!((res - scalar).abs() < 1e-14, "t = {t}");
    }
    assert!(r.meets_contract(), "{r:?}");
}

#[test]
fn matrix_expansion_decays_like_t_to_2p() {
    let mut rng = rng_for(13);
    let a = random_psd_with(&mut rng, 3, 1.0 / 3.0);
    let b = random_psd_with(&mut rng, 3, 1.0 / 3.0)
        .add(&PsdMatrix::identity(3))
        .unwrap();
    let r = small_t_expansion(&a, &b, 3.0, &[0.3, 0.2, 0.1, 0.05]).unwrap();
    assert!(r.used >= 2);
    assert!(r.meets_contract(), "{r:?}");
    let phi = phi_p(&[a.scale(0.3), b.clone()], PExponent::new(3.0).unwrap()).unwrap();
    assert!(phi > b.trace());
}
