//! Scalar trace functionals on PSD matrices and density matrices.
//!
//! | function | value |
//! |---|---|
//! | [`phi_p`] | `Tr (Σ_j A_j^p)^{1/p}` |
//! | [`psi_p`] | `Tr_0 (Tr_1 A^p)^{1/p}` on a two-factor space |
//! | [`entropy`] | `-Tr ρ ln ρ` |
//! | [`ssa_deficit`] | `S(ρ_02) + S(ρ_12) - S(ρ_012) - S(ρ_2)` |
//! | [`minkowski2_sides`] | `(Tr (Tr_0 A)^p)^{1/p}` vs `Tr (Tr_1 A^p)^{1/p}` |
//! | [`minkowski3_sides`] | `Tr (Tr_1 (Tr_0 A)^p)^{1/p}` vs `Tr (Tr_1 A^p)^{1/p}` |
//! | [`bks_sides`] | `Tr (B^p - A^p)_+^{1/p}` vs `Tr (B - A)_+` |
//! | [`bks_subadditivity_sides`] | `Tr(A + C)` vs `Tr (A^p + C^p)^{1/p}` |
//!
//! Factor indices are zero-based (see [`crate::tensor`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{mat_power, positive_part, HermitianMatrix, PsdMatrix};
use crate::tensor::{partial_trace, partial_trace_many, TensorSpace};

/// Eigenvalues at or below this contribute nothing to the entropy.
pub const ENTROPY_ZERO: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `0 < p < 1`
    Concave,
    /// `p = 1`
    Boundary,
    /// `1 < p < 2`, joint convexity open
    Conjecture,
    /// `p = 2`
    ConvexKnown,
    /// `p > 2`, neither convex nor concave
    Failure,
}

/// Exponent `p > 0` tagged with its regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PExponent {
    p: f64,
    regime: Regime,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "exponent p must be finite and > 0, got {p}"
            )));
        }
        let regime = if p < 1.0 {
            Regime::Concave
        } else if p == 1.0 {
            Regime::Boundary
        } else if p < 2.0 {
            Regime::Conjecture
        } else if p == 2.0 {
            Regime::ConvexKnown
        } else {
            Regime::Failure
        };
        Ok(Self { p, regime })
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.p
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Hölder conjugate `q = p/(p-1)`, defined for `p > 1`.
    pub fn conjugate(&self) -> Option<f64> {
        (self.p > 1.0).then(|| self.p / (self.p - 1.0))
    }
}

/// PSD matrix normalized to unit trace.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    base: PsdMatrix,
    original_trace: f64,
}

impl DensityMatrix {
    pub fn new(a: &PsdMatrix) -> Result<Self> {
        let t = a.trace();
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "density matrix needs positive trace, got {t}"
            )));
        }
        Ok(Self {
            base: a.scale(1.0 / t),
            original_trace: t,
        })
    }

    pub fn psd(&self) -> &PsdMatrix {
        &self.base
    }

    pub fn original_trace(&self) -> f64 {
        self.original_trace
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }
}

fn check_same_dim(mats: &[&PsdMatrix]) -> Result<usize> {
    let d = mats[0].dim();
    if let Some(m) = mats.iter().find(|m| m.dim() != d) {
        return Err(Error::Shape {
            expected: format!("{d}x{d}"),
            got: format!("{0}x{0}", m.dim()),
        });
    }
    Ok(d)
}

/// `Tr X^r` for Hermitian `X` known to be PSD up to roundoff.
fn trace_root(x: HermitianMatrix, r: f64) -> Result<f64> {
    Ok(PsdMatrix::new(x)?.trace_power(r))
}

pub fn phi_p(mats: &[PsdMatrix], p: PExponent) -> Result<f64> {
    if mats.is_empty() {
        return Err(Error::InvalidArgument("phi_p needs at least one matrix".into()));
    }
    let refs: Vec<&PsdMatrix> = mats.iter().collect();
    let d = check_same_dim(&refs)?;
    let p = p.value();
    if p == 1.0 {
        return Ok(mats.iter().map(PsdMatrix::trace).sum());
    }
    let mut sum = HermitianMatrix::zeros(d);
    for a in mats {
        sum = sum.add(mat_power(a, p)?.as_hermitian());
    }
    trace_root(sum, 1.0 / p)
}

/// `Tr_0 ((Tr_1 A^p)^{1/p})` on a two-factor space.
pub fn psi_p(a: &PsdMatrix, space: &TensorSpace, p: PExponent) -> Result<f64> {
    require_factors(space, 2)?;
    space.check_matrix(a.matrix())?;
    let p = p.value();
    let ap = mat_power(a, p)?;
    let reduced = partial_trace(ap.as_hermitian(), space, 1)?;
    trace_root(reduced, 1.0 / p)
}

fn require_factors(space: &TensorSpace, k: usize) -> Result<()> {
    if space.factors() != k {
        return Err(Error::Shape {
            expected: format!("{k}-factor space"),
            got: format!("dims {:?}", space.dims()),
        });
    }
    Ok(())
}

/// `-Σ λ ln λ` with eigenvalues `≤ ENTROPY_ZERO` dropped.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    -eigenvalues
        .iter()
        .filter(|&&x| x > ENTROPY_ZERO)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

pub fn entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(rho.psd().eigenvalues())
}

fn entropy_of_marginal(a: &HermitianMatrix, space: &TensorSpace, traced: &[usize]) -> Result<f64> {
    let (m, _) = partial_trace_many(a, space, traced)?;
    Ok(entropy_of_spectrum(PsdMatrix::new(m)?.eigenvalues()))
}

/// `S(A_{02}) + S(A_{12}) - S(A_{012}) - S(A_2)`; nonnegative by strong subadditivity.
pub fn ssa_deficit(rho: &DensityMatrix, space: &TensorSpace) -> Result<f64> {
    require_factors(space, 3)?;
    let a = rho.psd().as_hermitian();
    space.check_matrix(a.matrix())?;
    let s02 = entropy_of_marginal(a, space, &[1])?;
    let s12 = entropy_of_marginal(a, space, &[0])?;
    let s2 = entropy_of_marginal(a, space, &[0, 1])?;
    Ok(s02 + s12 - entropy(rho) - s2)
}

/// Both sides of the two-space Minkowski trace inequality:
/// `lhs = (Tr (Tr_0 A)^p)^{1/p}`, `rhs = Tr (Tr_1 A^p)^{1/p}`.
/// `lhs ≤ rhs` for `p ≥ 1`, reversed for `0 < p ≤ 1`.
pub fn minkowski2_sides(a: &PsdMatrix, space: &TensorSpace, p: PExponent) -> Result<(f64, f64)> {
    require_factors(space, 2)?;
    space.check_matrix(a.matrix())?;
    let pv = p.value();
    let marginal = PsdMatrix::new(partial_trace(a.as_hermitian(), space, 0)?)?;
    let lhs = marginal.trace_power(pv).powf(1.0 / pv);
    let rhs = psi_p(a, space, p)?;
    Ok((lhs, rhs))
}

/// Both sides of the three-space inequality:
/// `lhs = Tr_2 (Tr_1 (Tr_0 A)^p)^{1/p}`, `rhs = Tr_{0,2} (Tr_1 A^p)^{1/p}`.
/// `lhs ≤ rhs` for `p = 2` (and trivially `p = 1`), reversed for `0 < p ≤ 1`.
pub fn minkowski3_sides(a: &PsdMatrix, space: &TensorSpace, p: PExponent) -> Result<(f64, f64)> {
    require_factors(space, 3)?;
    space.check_matrix(a.matrix())?;
    let pv = p.value();
    let dims = space.dims();

    // lhs: Tr_0 A lives on H_1 ⊗ H_2
    let m12 = PsdMatrix::new(partial_trace(a.as_hermitian(), space, 0)?)?;
    let space12 = TensorSpace::new(&dims[1..])?;
    let m12p = mat_power(&m12, pv)?;
    let on2 = partial_trace(m12p.as_hermitian(), &space12, 0)?;
    let lhs = trace_root(on2, 1.0 / pv)?;

    // rhs: Tr_1 A^p lives on H_0 ⊗ H_2, then the full trace
    let ap = mat_power(a, pv)?;
    let on02 = partial_trace(ap.as_hermitian(), space, 1)?;
    let rhs = trace_root(on02, 1.0 / pv)?;
    Ok((lhs, rhs))
}

/// `lhs = Tr ((B^p - A^p)_+)^{1/p}`, `rhs = Tr (B - A)_+`; `lhs ≥ rhs` for `p > 1`.
pub fn bks_sides(a: &PsdMatrix, b: &PsdMatrix, p: f64) -> Result<(f64, f64)> {
    require_p_gt_1(p)?;
    check_same_dim(&[a, b])?;
    let diff_p = mat_power(b, p)?.as_hermitian().sub(mat_power(a, p)?.as_hermitian());
    let lhs = positive_part(&diff_p)?.trace_power(1.0 / p);
    let rhs = positive_part(&b.as_hermitian().sub(a.as_hermitian()))?.trace();
    Ok((lhs, rhs))
}

/// `lhs = Tr(C + A)`, `rhs = Tr (A^p + C^p)^{1/p} = Φ_p(A, C)`; `lhs ≥ rhs` for `p > 1`.
pub fn bks_subadditivity_sides(a: &PsdMatrix, c: &PsdMatrix, p: f64) -> Result<(f64, f64)> {
    require_p_gt_1(p)?;
    check_same_dim(&[a, c])?;
    let lhs = a.trace() + c.trace();
    let rhs = phi_p(&[a.clone(), c.clone()], PExponent::new(p)?)?;
    Ok((lhs, rhs))
}

fn require_p_gt_1(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("BKS quantities need p > 1, got {p}")));
    }
    Ok(())
}
