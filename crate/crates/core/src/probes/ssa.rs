//! Strong subadditivity as the left derivative at `p = 1` of the gap
//! `rhs(p) - lhs(p)` of the three-space inequality.
//!
//! Differentiating `Tr (Tr_1 X^p)^{1/p}` at `p = 1` gives
//! `S(X) - S(Tr_1 X)`-type terms, and the four of them combine to exactly the
//! SSA deficit, so the derivative matches it with unit constant.

use serde::{Deserialize, Serialize};

use super::{run_campaign, Campaign, Mode, ProbeReport, SlackConvention, Witness};
use crate::error::{Error, Result};
use crate::functionals::{minkowski3_sides, ssa_deficit, DensityMatrix, PExponent};
use crate::matcore::random_psd_with;
use crate::tensor::TensorSpace;

/// Contract floor for the finite-difference derivative.
pub const DERIVATIVE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SsaLimit {
    pub h: f64,
    /// `[gap(1) - gap(1 - h)] / h`
    pub fd_derivative: f64,
    pub ssa_deficit: f64,
    /// `fd_derivative - ssa_deficit`
    pub discrepancy: f64,
}

fn gap(rho: &DensityMatrix, space: &TensorSpace, p: f64) -> Result<f64> {
    let (lhs, rhs) = minkowski3_sides(rho.psd(), space, PExponent::new(p)?)?;
    Ok(rhs - lhs)
}

pub fn ssa_from_limit(rho: &DensityMatrix, space: &TensorSpace, h: f64) -> Result<SsaLimit> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::InvalidArgument(format!("step h must lie in (0, 0.1], got {h}")));
    }
    let fd = (gap(rho, space, 1.0)? - gap(rho, space, 1.0 - h)?) / h;
    let deficit = ssa_deficit(rho, space)?;
    Ok(SsaLimit {
        h,
        fd_derivative: fd,
        ssa_deficit: deficit,
        discrepancy: fd - deficit,
    })
}

/// Eliminates the `O(h)` term of a one-sided difference from two step sizes.
pub fn richardson(h1: f64, d1: f64, h2: f64, d2: f64) -> f64 {
    (h1 * d2 - h2 * d1) / (h1 - h2)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SsaLimitStudy {
    pub steps: Vec<SsaLimit>,
    /// Richardson values from consecutive step pairs.
    pub extrapolated: Vec<f64>,
    pub ssa_deficit: f64,
}

impl SsaLimitStudy {
    pub fn best_estimate(&self) -> f64 {
        self.extrapolated
            .last()
            .copied()
            .unwrap_or_else(|| self.steps.last().map_or(f64::NAN, |s| s.fd_derivative))
    }
}

/// Finite differences over decreasing `steps` plus Richardson extrapolation.
pub fn ssa_limit_study(rho: &DensityMatrix, space: &TensorSpace, steps: &[f64]) -> Result<SsaLimitStudy> {
    let results = steps
        .iter()
        .map(|&h| ssa_from_limit(rho, space, h))
        .collect::<Result<Vec<_>>>()?;
    let extrapolated = results
        .windows(2)
        .map(|w| richardson(w[0].h, w[0].fd_derivative, w[1].h, w[1].fd_derivative))
        .collect();
    Ok(SsaLimitStudy {
        ssa_deficit: ssa_deficit(rho, space)?,
        steps: results,
        extrapolated,
    })
}

/// Left-derivative campaign; slack is the derivative itself with tolerance
/// [`DERIVATIVE_TOL`].
pub fn ssa_derivative_campaign(campaign: &Campaign, space: &TensorSpace, h: f64) -> Result<ProbeReport> {
    if space.factors() != 3 {
        return Err(Error::InvalidArgument("SSA campaign needs three factors".into()));
    }
    let d = space.total_dim();
    run_campaign(
        "ssa_left_derivative",
        campaign,
        SlackConvention {
            negate: false,
            mode: Mode::Contract,
        },
        DERIVATIVE_TOL,
        1.0 - h,
        space.dims().to_vec(),
        |rng| DensityMatrix::new(&random_psd_with(rng, d, 1.0)),
        |rho| Ok(ssa_from_limit(rho, space, h)?.fd_derivative),
        |rho| Witness::default().matrix("rho", rho.psd().matrix()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_linear_term() {
        let f = |h: f64| 2.0 + 3.0 * h;
        assert!((richardson(1e-2, f(1e-2), 1e-3, f(1e-3)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn step_range_checked() {
        let rho = DensityMatrix::new(&crate::matcore::PsdMatrix::identity(8)).unwrap();
        let s = TensorSpace::new(&[2, 2, 2]).unwrap();
        assert!(ssa_from_limit(&rho, &s, 0.0).is_err());
        assert!(ssa_from_limit(&rho, &s, 0.5).is_err());
    }
}
