//! Constructive failure of joint convexity of `Φ_p` for `p > 2`.
//!
//! Start from a failure of operator convexity of `x ↦ x^p`: PSD `A_1, A_2` and
//! a unit `v` with `⟨v, ((A_1+A_2)/2)^p v⟩ > ⟨v, ((A_1^p+A_2^p)/2) v⟩`. With
//! `B = Π_v + λ Π_v^⊥`, the small-`t` expansion
//! `Φ_p(tA, B) = Tr B + (t^p/p) Tr(B^{1-p} A^p) + O(t^{2p})` turns that gap,
//! up to `O(λ^{1-p})`, into a positive midpoint margin for
//! `(tA_1, B), (tA_2, B)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{vec_norm, CMatrix};
use crate::error::{Error, Result};
use crate::functionals::{phi_p, PExponent};
use crate::matcore::{eig_hermitian, mat_power, random_psd_with, rng_for, HermitianMatrix, PsdMatrix, EPS_PSD};
use crate::tensor::kron;

use super::Witness;

/// Gaps at or below this do not count as operator-convexity failures.
pub const TOL_GAP: f64 = 1e-9;
pub const LAMBDA_GRID: [f64; 6] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6];
pub const T_GRID: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const DEFAULT_ATTEMPTS: usize = 10_000;

/// Multiple of the estimated roundoff a margin must clear to count.
const NOISE_FACTOR: f64 = 100.0;

#[derive(Clone, Debug)]
pub struct OperatorConvexityWitness {
    pub a1: PsdMatrix,
    pub a2: PsdMatrix,
    pub v: Vec<Complex64>,
    /// `⟨v, ((A_1+A_2)/2)^p v⟩ - ⟨v, ((A_1^p+A_2^p)/2) v⟩`
    pub gap: f64,
    pub attempts: usize,
}

/// `((A_1+A_2)/2)^p - (A_1^p + A_2^p)/2`.
fn operator_midpoint_defect(a1: &PsdMatrix, a2: &PsdMatrix, p: f64) -> Result<HermitianMatrix> {
    let mid = PsdMatrix::new(a1.as_hermitian().add(a2.as_hermitian()).scale(0.5))?;
    let avg = mat_power(a1, p)?
        .as_hermitian()
        .add(mat_power(a2, p)?.as_hermitian())
        .scale(0.5);
    Ok(mat_power(&mid, p)?.as_hermitian().sub(&avg))
}

fn quadratic_form(h: &HermitianMatrix, v: &[Complex64]) -> f64 {
    let hv = h.matrix().mat_vec(v);
    v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Random search for a failure of operator convexity of `x^p`. Each attempt
/// draws `A_1, A_2` whose midpoint has unit trace (separately normalized pairs
/// of equal trace rarely fail); the best `v` for a pair is the top eigenvector
/// of the midpoint defect. Keeps the best pair over all attempts.
pub fn operator_convexity_witness(
    p: f64,
    dim: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<OperatorConvexityWitness> {
    if !(p > 0.0) || dim < 2 || max_attempts == 0 {
        return Err(Error::InvalidArgument(format!(
            "operator convexity search needs p > 0, dim >= 2, attempts >= 1 (got p = {p}, dim = {dim})"
        )));
    }
    let mut rng = rng_for(seed);
    let mut best: Option<OperatorConvexityWitness> = None;
    for _ in 0..max_attempts {
        let a1 = random_psd_with(&mut rng, dim, 1.0);
        let a2 = random_psd_with(&mut rng, dim, 1.0);
        let scale = 2.0 / (a1.trace() + a2.trace());
        let (a1, a2) = (a1.scale(scale), a2.scale(scale));
        let spec = eig_hermitian(&operator_midpoint_defect(&a1, &a2, p)?)?;
        let gap = *spec.eigenvalues.last().expect("dim >= 2");
        if best.as_ref().is_none_or(|b| gap > b.gap) {
            best = Some(OperatorConvexityWitness {
                a1,
                a2,
                v: spec.eigenvector(dim - 1),
                gap,
                attempts: max_attempts,
            });
        }
    }
    let best = best.expect("at least one attempt");
    if best.gap <= TOL_GAP {
        return Err(Error::SearchFailed {
            attempts: max_attempts,
            best_gap: best.gap,
        });
    }
    Ok(best)
}

/// Certified failure of midpoint convexity of `Φ_p`:
/// `Φ_p(t(A_1+A_2)/2, B) - ½Φ_p(tA_1, B) - ½Φ_p(tA_2, B) = margin > 0`.
#[derive(Clone, Debug)]
pub struct ConvexityWitness {
    pub p: f64,
    pub a1: PsdMatrix,
    pub a2: PsdMatrix,
    pub b: PsdMatrix,
    pub v: Vec<Complex64>,
    pub lambda: f64,
    pub t: f64,
    pub margin: f64,
    /// Operator-convexity gap of `(A_1, A_2, v)`.
    pub gap: f64,
    /// `(λ, t, margin)` for every grid point; non-significant margins are `NaN`.
    pub scan: Vec<(f64, f64, f64)>,
}

impl ConvexityWitness {
    pub fn to_witness(&self) -> Witness {
        Witness::default()
            .matrix("A1", self.a1.matrix())
            .matrix("A2", self.a2.matrix())
            .matrix("B", self.b.matrix())
            .vector("v", &self.v)
            .scalar("lambda", self.lambda)
            .scalar("t", self.t)
            .scalar("margin", self.margin)
            .scalar("operator_gap", self.gap)
    }
}

/// `B = Π_v + λ Π_v^⊥` for unit `v`.
pub fn projector_weighting(v: &[Complex64], lambda: f64) -> Result<PsdMatrix> {
    let n = v.len();
    let col = CMatrix::from_fn(n, 1, |i, _| v[i]);
    let proj = kron(&col, &col.adjoint());
    let b = &CMatrix::identity(n).scale(lambda) + &proj.scale(1.0 - lambda);
    PsdMatrix::from_matrix(b)
}

/// Midpoint margin of `Φ_p` at the pair `(tA_1, B)`, `(tA_2, B)`.
pub fn midpoint_margin(a1: &PsdMatrix, a2: &PsdMatrix, b: &PsdMatrix, t: f64, p: PExponent) -> Result<f64> {
    let mid = PsdMatrix::new(a1.as_hermitian().add(a2.as_hermitian()).scale(0.5 * t))?;
    let phi = |a: PsdMatrix| phi_p(&[a, b.clone()], p);
    Ok(phi(mid)? - 0.5 * phi(a1.scale(t))? - 0.5 * phi(a2.scale(t))?)
}

/// Roundoff scale of `Φ_p(tA, B)` for `B` with spectrum `{1, λ}`: eigenvalues
/// of `B^p + t^p A^p` carry absolute error `~ε λ^p`.
fn margin_noise(lambda: f64, p: f64, dim: usize) -> f64 {
    NOISE_FACTOR * f64::EPSILON * (lambda.powf(p) / p + dim as f64 * lambda)
}

/// Scans `λ ∈ LAMBDA_GRID`, `t ∈ T_GRID` for the largest significant midpoint
/// margin built from an operator-convexity witness.
pub fn counterexample_p_gt_2(p: f64, dim: usize, seed: u64) -> Result<ConvexityWitness> {
    if !(p > 2.0) {
        return Err(Error::InvalidArgument(format!(
            "the counterexample needs p > 2, got {p}"
        )));
    }
    let op = operator_convexity_witness(p, dim, seed, DEFAULT_ATTEMPTS)?;
    let pe = PExponent::new(p)?;
    let mut scan = Vec::with_capacity(LAMBDA_GRID.len() * T_GRID.len());
    let mut best: Option<(f64, f64, f64, PsdMatrix)> = None;
    for &lambda in &LAMBDA_GRID {
        let b = projector_weighting(&op.v, lambda)?;
        let noise = margin_noise(lambda, p, dim);
        for &t in &T_GRID {
            let m = midpoint_margin(&op.a1, &op.a2, &b, t, pe)?;
            let significant = m > noise;
            scan.push((lambda, t, if significant { m } else { f64::NAN }));
            if significant && best.as_ref().is_none_or(|(_, _, bm, _)| m > *bm) {
                best = Some((lambda, t, m, b.clone()));
            }
        }
    }
    match best {
        Some((lambda, t, margin, b)) => Ok(ConvexityWitness {
            p,
            a1: op.a1,
            a2: op.a2,
            b,
            v: op.v,
            lambda,
            t,
            margin,
            gap: op.gap,
            scan,
        }),
        None => Err(Error::ConstructionFailed {
            best_margin: f64::NAN,
            scan,
        }),
    }
}

/// `Tr(B^{1-p}((A_1+A_2)/2)^p) - ½Tr(B^{1-p}A_1^p) - ½Tr(B^{1-p}A_2^p)`, the
/// `t → 0` limit of `p t^{-p}·margin(t)`. Differs from the operator gap by
/// `λ^{1-p}·Tr(Π_v^⊥ D)` with `D` the midpoint defect.
pub fn limit_value(a1: &PsdMatrix, a2: &PsdMatrix, b: &PsdMatrix, p: f64) -> Result<f64> {
    let weight = mat_power(b, 1.0 - p)?;
    let defect = operator_midpoint_defect(a1, a2, p)?;
    Ok((weight.matrix() * defect.matrix()).trace().re)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub p: f64,
    /// `(t, r(t))` for every grid point.
    pub residuals: Vec<(f64, f64)>,
    /// Points above the roundoff floor, used in the fit.
    pub used: usize,
    pub noise_floor: f64,
    pub fitted_exponent: f64,
}

impl ExpansionReport {
    /// The residual must decay at least like `t^{2p - 0.2}`.
    pub fn meets_contract(&self) -> bool {
        self.fitted_exponent >= 2.0 * self.p - 0.2
    }
}

/// Least-squares slope of `ln|r|` against `ln t`.
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, r)| r.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Residual `r(t) = Φ_p(tA, B) - Tr B - (t^p/p) Tr(B^{1-p} A^p)` on `t_grid`
/// and its fitted decay exponent. Residuals at or below the roundoff floor
/// `1e3·ε·d·‖B‖^p·λ_min(B)^{1-p}` are kept in the table but not fitted.
pub fn small_t_expansion(a: &PsdMatrix, b: &PsdMatrix, p: f64, t_grid: &[f64]) -> Result<ExpansionReport> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("expansion needs p > 1, got {p}")));
    }
    let min_b = b.spectrum().min_eigenvalue();
    let max_b = b.spectral_scale();
    if min_b <= EPS_PSD * (1.0 + max_b) {
        return Err(Error::Singular {
            min_eigenvalue: min_b,
            power: 1.0 - p,
        });
    }
    let pe = PExponent::new(p)?;
    let first_order = (mat_power(b, 1.0 - p)?.matrix() * mat_power(a, p)?.matrix()).trace().re / p;
    let tr_b = b.trace();
    let residuals = t_grid
        .iter()
        .map(|&t| {
            let phi = phi_p(&[a.scale(t), b.clone()], pe)?;
            Ok((t, phi - tr_b - t.powf(p) * first_order))
        })
        .collect::<Result<Vec<_>>>()?;
    let noise_floor = 1e3 * f64::EPSILON * b.dim() as f64 * max_b.powf(p) * min_b.powf(1.0 - p);
    let usable: Vec<(f64, f64)> = residuals
        .iter()
        .copied()
        .filter(|(_, r)| r.abs() > noise_floor)
        .collect();
    let fitted_exponent = if usable.len() >= 2 {
        log_log_slope(&usable)
    } else if residuals.iter().all(|(_, r)| *r == 0.0) {
        f64::INFINITY
    } else {
        f64::NAN
    };
    Ok(ExpansionReport {
        p,
        residuals,
        used: usable.len(),
        noise_floor,
        fitted_exponent,
    })
}

/// `‖v‖`, exposed for witness validation.
pub fn unit_norm_defect(v: &[Complex64]) -> f64 {
    (vec_norm(v) - 1.0).abs()
}

/// `⟨v, H v⟩` for the quadratic-form checks in tests.
pub fn expectation(h: &HermitianMatrix, v: &[Complex64]) -> f64 {
    quadratic_form(h, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_is_operator_convex() {
        match operator_convexity_witness(2.0, 2, 1, 2_000) {
            Err(Error::SearchFailed { best_gap, .. }) => assert!(best_gap <= 1e-10),
            other => panic!("expected search failure, got {other:?}"),
        }
    }

    #[test]
    fn cube_fails_operator_convexity() {
        let w = operator_convexity_witness(3.0, 2, 7, DEFAULT_ATTEMPTS).unwrap();
        assert!(w.gap > TOL_GAP);
        assert!(unit_norm_defect(&w.v) < 1e-12);
        let lhs = expectation(
            &mat_power(&w.a1.add(&w.a2).unwrap().scale(0.5), 3.0)
                .unwrap()
                .as_hermitian()
                .clone(),
            &w.v,
        );
        let rhs = 0.5
            * (expectation(mat_power(&w.a1, 3.0).unwrap().as_hermitian(), &w.v)
                + expectation(mat_power(&w.a2, 3.0).unwrap().as_hermitian(), &w.v));
        assert!(lhs > rhs);
        assert!((lhs - rhs - w.gap).abs() < 1e-12);
    }

    #[test]
    fn p_at_most_two_rejected() {
        assert!(matches!(
            counterexample_p_gt_2(2.0, 2, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            counterexample_p_gt_2(1.5, 2, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn projector_weighting_spectrum() {
        let v = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let b = projector_weighting(&v, 10.0).unwrap();
        let e = b.eigenvalues();
        assert!((e[0] - 1.0).abs() < 1e-13 && (e[1] - 10.0).abs() < 1e-13);
        assert!((expectation(b.as_hermitian(), &v) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn expansion_with_zero_a_is_exact() {
        let b = PsdMatrix::from_diag(&[1.0, 2.0, 3.0]).unwrap();
        let r = small_t_expansion(&PsdMatrix::zeros(3), &b, 3.0, &[0.1, 0.01]).unwrap();
        assert!(r.residuals.iter().all(|(_, x)| *x == 0.0));
    }

    #[test]
    fn expansion_rejects_singular_b() {
        let b = PsdMatrix::from_diag(&[0.0, 2.0]).unwrap();
        assert!(matches!(
            small_t_expansion(&PsdMatrix::identity(2), &b, 3.0, &[0.1]),
            Err(Error::Singular { .. })
        ));
    }
}
