use super::{run_campaign, slack_convention, Campaign, Inequality, Mode, ProbeReport, SlackConvention, Witness};
use crate::error::{Error, Result};
use crate::functionals::{
    bks_sides, bks_subadditivity_sides, minkowski2_sides, minkowski3_sides, phi_p, ssa_deficit, DensityMatrix,
    PExponent,
};
use crate::matcore::{random_psd_with, PsdMatrix, TrialRng};
use crate::tensor::TensorSpace;

/// Draws `count` PSD matrices with eigenvalues of order one.
fn draw_psd(rng: &mut TrialRng, count: usize, dim: usize) -> Vec<PsdMatrix> {
    (0..count)
        .map(|_| random_psd_with(rng, dim, 1.0 / dim as f64))
        .collect()
}

fn named_witness(mats: &[PsdMatrix], prefix: &str) -> Witness {
    mats.iter().enumerate().fold(Witness::default(), |w, (i, m)| {
        w.matrix(&format!("{prefix}{}", i + 1), m.matrix())
    })
}

/// `Φ_p((X+Y)/2) - ½Φ_p(X) - ½Φ_p(Y)` for tuples `X`, `Y`.
pub fn midpoint_gap(xs: &[PsdMatrix], ys: &[PsdMatrix], p: PExponent) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("midpoint tuples differ in length".into()));
    }
    let mid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| PsdMatrix::new(x.as_hermitian().add(y.as_hermitian()).scale(0.5)))
        .collect::<Result<Vec<_>>>()?;
    Ok(phi_p(&mid, p)? - 0.5 * phi_p(xs, p)? - 0.5 * phi_p(ys, p)?)
}

/// Midpoint test of joint concavity (`p ≤ 1`) or convexity (`p = 2`) of `Φ_p`
/// on random `n`-tuples of `dim × dim` PSD matrices.
pub fn midpoint_probe(p: PExponent, n: usize, dim: usize, campaign: &Campaign) -> Result<ProbeReport> {
    if n == 0 || dim == 0 {
        return Err(Error::InvalidArgument(
            "midpoint probe needs n >= 1 and dim >= 1".into(),
        ));
    }
    let convention = slack_convention(Inequality::Midpoint, p.value());
    run_campaign(
        "midpoint",
        campaign,
        convention,
        campaign.tol,
        p.value(),
        vec![dim],
        |rng| Ok(draw_psd(rng, 2 * n, dim)),
        |m| midpoint_gap(&m[..n], &m[n..], p),
        |m| named_witness(m, "A"),
    )
}

fn minkowski_campaign(
    name: &str,
    campaign: &Campaign,
    space: &TensorSpace,
    p: PExponent,
    convention: SlackConvention,
    sides: fn(&PsdMatrix, &TensorSpace, PExponent) -> Result<(f64, f64)>,
) -> Result<ProbeReport> {
    let d = space.total_dim();
    run_campaign(
        name,
        campaign,
        convention,
        campaign.tol,
        p.value(),
        space.dims().to_vec(),
        |rng| Ok(random_psd_with(rng, d, 1.0 / d as f64)),
        |a| {
            let (lhs, rhs) = sides(a, space, p)?;
            Ok(rhs - lhs)
        },
        |a| Witness::default().matrix("A", a.matrix()),
    )
}

/// Two-space Minkowski trace inequality on random PSD operators.
pub fn verify_theorem2(campaign: &Campaign, space: &TensorSpace, p: PExponent) -> Result<ProbeReport> {
    if space.factors() != 2 {
        return Err(Error::InvalidArgument("minkowski2 campaign needs two factors".into()));
    }
    let c = slack_convention(Inequality::Minkowski2, p.value());
    minkowski_campaign("minkowski2", campaign, space, p, c, minkowski2_sides)
}

/// Three-space inequality; a contract for `p ∈ (0, 1] ∪ {2}`, exploratory otherwise.
pub fn verify_theorem3(campaign: &Campaign, space: &TensorSpace, p: PExponent) -> Result<ProbeReport> {
    if space.factors() != 3 {
        return Err(Error::InvalidArgument("minkowski3 campaign needs three factors".into()));
    }
    let c = slack_convention(Inequality::Minkowski3, p.value());
    minkowski_campaign("minkowski3", campaign, space, p, c, minkowski3_sides)
}

/// Strong subadditivity deficit on random densities of a three-factor space.
pub fn ssa_campaign(campaign: &Campaign, space: &TensorSpace) -> Result<ProbeReport> {
    if space.factors() != 3 {
        return Err(Error::InvalidArgument("SSA campaign needs three factors".into()));
    }
    let d = space.total_dim();
    run_campaign(
        "ssa_deficit",
        campaign,
        SlackConvention {
            negate: false,
            mode: Mode::Contract,
        },
        campaign.tol,
        1.0,
        space.dims().to_vec(),
        |rng| DensityMatrix::new(&random_psd_with(rng, d, 1.0)),
        |rho| ssa_deficit(rho, space),
        |rho| Witness::default().matrix("rho", rho.psd().matrix()),
    )
}

/// Both BKS inequalities: `Tr (B^p - A^p)_+^{1/p} ≥ Tr (B - A)_+` and
/// `Tr(A + C) ≥ Tr (A^p + C^p)^{1/p}`.
pub fn verify_bks(campaign: &Campaign, dim: usize, p: f64) -> Result<[ProbeReport; 2]> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("BKS campaigns need p > 1, got {p}")));
    }
    let contract = SlackConvention {
        negate: false,
        mode: Mode::Contract,
    };
    let draw = |rng: &mut TrialRng| Ok(draw_psd(rng, 2, dim));
    let bks = run_campaign(
        "bks",
        campaign,
        contract,
        campaign.tol,
        p,
        vec![dim],
        draw,
        |m| bks_sides(&m[0], &m[1], p).map(|(l, r)| l - r),
        |m| Witness::default().matrix("A", m[0].matrix()).matrix("B", m[1].matrix()),
    )?;
    let sub = run_campaign(
        "bks_subadditivity",
        campaign,
        contract,
        campaign.tol,
        p,
        vec![dim],
        draw,
        |m| bks_subadditivity_sides(&m[0], &m[1], p).map(|(l, r)| l - r),
        |m| Witness::default().matrix("A", m[0].matrix()).matrix("C", m[1].matrix()),
    )?;
    Ok([bks, sub])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random_psd;

    #[test]
    fn identical_tuples_have_zero_gap() {
        let xs: Vec<_> = (0..3).map(|s| random_psd(3, 1.0, s)).collect();
        for p in [0.5, 2.0, 3.0] {
            let g = midpoint_gap(&xs, &xs, PExponent::new(p).unwrap()).unwrap();
            assert!(g.abs() < 1e-11, "p = {p}: {g}");
        }
    }

    #[test]
    fn bks_equal_arguments_have_zero_slack() {
        let a = random_psd(4, 1.0, 3);
        let (l, r) = bks_sides(&a, &a, 1.5).unwrap();
        assert_eq!(l - r, 0.0);
    }

    #[test]
    fn campaign_shape_checks() {
        let c = Campaign::new(2, 0);
        let p = PExponent::new(2.0).unwrap();
        assert!(verify_theorem2(&c, &TensorSpace::new(&[2, 2, 2]).unwrap(), p).is_err());
        assert!(verify_theorem3(&c, &TensorSpace::new(&[2, 2]).unwrap(), p).is_err());
        assert!(verify_bks(&c, 2, 1.0).is_err());
    }
}
