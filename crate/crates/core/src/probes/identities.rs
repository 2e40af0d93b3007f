//! Exact identities checked numerically: the swap-projection split, the
//! block-column trace norm, group averaging, block-diagonal reduction, the
//! duality witness of the two-space inequality and the `M_±` construction.

use serde::{Deserialize, Serialize};

use super::{run_trials, Campaign, Mode, ProbeReport};
use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::functionals::{phi_p, psi_p, PExponent};
use crate::matcore::{
    eig_hermitian, mat_power, random_hermitian_with, random_psd_with, trace_norm, HermitianMatrix, PsdMatrix,
};
use crate::tensor::{embed_factor, group_average, kron, partial_trace, TensorSpace};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / |lhs|` (absolute when `lhs = 0`).
    pub residual: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        let diff = (lhs - rhs).abs();
        let residual = if lhs == 0.0 { diff } else { diff / lhs.abs() };
        Self { lhs, rhs, residual }
    }
}

fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.set_block(at, at, b);
        at += b.rows();
    }
    out
}

/// `Tr (V^* X V)^{r}` where `V` spans the range of the orthogonal projector `Π`.
fn compressed_trace_power(projector: &HermitianMatrix, x: &CMatrix, r: f64) -> Result<f64> {
    let spec = eig_hermitian(projector)?;
    let range: Vec<usize> = (0..spec.dim()).filter(|&k| spec.eigenvalues[k] > 0.5).collect();
    let v = CMatrix::from_fn(spec.dim(), range.len(), |i, j| spec.eigenvectors[(i, range[j])]);
    let compressed = &(&v.adjoint() * x) * &v;
    Ok(PsdMatrix::from_matrix(compressed)?.trace_power(r))
}

/// `2 Tr (A_1^p + A_2^p)^{1/p}` against
/// `2^{1/p} [Tr (Π_+ 𝒜^p Π_+)^{1/p} + Tr (Π_- 𝒜^p Π_-)^{1/p}]` with
/// `𝒜 = diag(A_1, A_2)`, `Π_± = (I ± σ)/2` and `σ` the block swap. Each
/// compression is taken on the range of its projector.
pub fn verify_identity_3_1(a1: &PsdMatrix, a2: &PsdMatrix, p: f64) -> Result<IdentityCheck> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("identity needs 0 < p < 1, got {p}")));
    }
    let d = a1.dim();
    if a2.dim() != d {
        return Err(Error::Shape {
            expected: format!("{d}x{d}"),
            got: format!("{0}x{0}", a2.dim()),
        });
    }
    let lhs = 2.0 * phi_p(&[a1.clone(), a2.clone()], PExponent::new(p)?)?;

    let big = PsdMatrix::from_matrix(block_diag(&[a1.matrix(), a2.matrix()]))?;
    let big_p = mat_power(&big, p)?;
    let mut swap = CMatrix::zeros(2 * d, 2 * d);
    swap.set_block(0, d, &CMatrix::identity(d));
    swap.set_block(d, 0, &CMatrix::identity(d));
    let id = CMatrix::identity(2 * d);
    let mut rhs = 0.0;
    for sign in [1.0, -1.0] {
        let proj = HermitianMatrix::new((&id + &swap.scale(sign)).scale(0.5))?;
        let sandwiched = &(proj.matrix() * big_p.matrix()) * proj.matrix();
        rhs += compressed_trace_power(&proj, &sandwiched, 1.0 / p)?;
    }
    rhs *= 2f64.powf(1.0 / p);
    Ok(IdentityCheck::new(lhs, rhs))
}

/// `Φ_2(A_1, .., A_n)` against the trace norm of the block matrix whose first
/// block column is `A_1, .., A_n` and whose other blocks vanish.
pub fn verify_sahi(mats: &[PsdMatrix]) -> Result<IdentityCheck> {
    let n = mats.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one matrix".into()));
    }
    let d = mats[0].dim();
    let mut stacked = CMatrix::zeros(n * d, n * d);
    for (k, a) in mats.iter().enumerate() {
        if a.dim() != d {
            return Err(Error::Shape {
                expected: format!("{d}x{d}"),
                got: format!("{0}x{0}", a.dim()),
            });
        }
        stacked.set_block(k * d, 0, a.matrix());
    }
    let lhs = phi_p(mats, PExponent::new(2.0)?)?;
    Ok(IdentityCheck::new(lhs, trace_norm(&stacked)?))
}

/// Max-entry deviation of the group average over `averaged_factor` from
/// `(1/N) Tr_f(A)` re-embedded with `I_N` on slot `f`.
pub fn group_average_residual(a: &HermitianMatrix, space: &TensorSpace, averaged_factor: usize) -> Result<f64> {
    let avg = group_average(a, space, averaged_factor)?;
    let n = space.dims()[averaged_factor];
    let reduced = partial_trace(a, space, averaged_factor)?.scale(1.0 / n as f64);
    let expected = if averaged_factor == 0 {
        kron(&CMatrix::identity(n), reduced.matrix())
    } else {
        kron(reduced.matrix(), &CMatrix::identity(n))
    };
    Ok((avg.matrix() - &expected).max_abs())
}

/// `Ψ_p(Σ_k A_k ⊗ E_kk)` on `[d, n]` against `Φ_p(A_1, .., A_n)`. The block
/// label is the second factor, the one `Ψ_p` traces out after the power.
pub fn block_diag_reduction(mats: &[PsdMatrix], p: PExponent) -> Result<IdentityCheck> {
    let n = mats.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one block".into()));
    }
    let d = mats[0].dim();
    let mut a = CMatrix::zeros(d * n, d * n);
    for (k, m) in mats.iter().enumerate() {
        let mut e = CMatrix::zeros(n, n);
        e[(k, k)] = 1.0.into();
        a = &a + &kron(m.matrix(), &e);
    }
    let a = PsdMatrix::from_matrix(a)?;
    let space = TensorSpace::new(&[d, n])?;
    let psi = psi_p(&a, &space, p)?;
    let phi = phi_p(mats, p)?;
    Ok(IdentityCheck::new(phi, psi))
}

#[derive(Clone, Debug)]
pub struct DualWitness {
    /// `B = c (Tr_0 A)^{p-1}` with `Tr B^q = 1`.
    pub b: PsdMatrix,
    pub q: f64,
    pub b_q_trace: f64,
    /// `Tr(B · Tr_0 A)`
    pub attained: f64,
    /// `Tr((I ⊗ B) A)`, the same pairing through the embedding
    pub attained_embedded: f64,
    /// `(Tr (Tr_0 A)^p)^{1/p}`
    pub lhs: f64,
}

impl DualWitness {
    pub fn residual(&self) -> f64 {
        (self.attained - self.lhs).abs() / self.lhs
    }
}

/// Hölder equality case behind the duality argument for the two-space
/// inequality: the normalized `B ∝ (Tr_0 A)^{p-1}` attains the `L^p` norm.
pub fn dual_witness_theorem2(a: &PsdMatrix, space: &TensorSpace, p: f64) -> Result<DualWitness> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("duality needs p > 1, got {p}")));
    }
    if space.factors() != 2 {
        return Err(Error::InvalidArgument("duality witness needs two factors".into()));
    }
    let pe = PExponent::new(p)?;
    let q = pe.conjugate().expect("p > 1");
    let marginal = PsdMatrix::new(partial_trace(a.as_hermitian(), space, 0)?)?;
    let norm_p = marginal.trace_power(p);
    if !(norm_p > 0.0) {
        return Err(Error::ZeroMarginal);
    }
    let c = norm_p.powf(-1.0 / q);
    let b = mat_power(&marginal, p - 1.0)?.scale(c);
    let attained = (b.matrix() * marginal.matrix()).trace().re;
    let attained_embedded = (&embed_factor(b.matrix(), space, 1)? * a.matrix()).trace().re;
    Ok(DualWitness {
        b_q_trace: b.trace_power(q),
        q,
        b,
        attained,
        attained_embedded,
        lhs: norm_p.powf(1.0 / p),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MpmReport {
    /// Max eigenvalue difference of `M_±^* M_±` and `M_± M_±^*`, relative to the largest.
    pub spectra_residual: [f64; 2],
    /// `Tr (M_±^* M_±)^{1/p}` against `Tr (A^p + C^p)^{1/p}`.
    pub trace_residual: [f64; 2],
    /// `Tr ((M_+M_+^* + M_-M_-^*)/2)^{1/p}` against `Tr(A + C)`.
    pub average_residual: f64,
    /// `Tr ((M_+M_+^* + M_-M_-^*)/2)^{1/p} - Tr (A^p + C^p)^{1/p}`, nonnegative.
    pub concavity_slack: f64,
}

impl MpmReport {
    pub fn max_residual(&self) -> f64 {
        self.spectra_residual
            .iter()
            .chain(&self.trace_residual)
            .fold(self.average_residual, |m, &x| m.max(x))
    }
}

/// Checks the `M_± = [[A^{p/2}, 0], [±C^{p/2}, 0]]` proof of subadditivity.
pub fn verify_mpm_spectra(a: &PsdMatrix, c: &PsdMatrix, p: f64) -> Result<MpmReport> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("M± construction needs p > 1, got {p}")));
    }
    let d = a.dim();
    if c.dim() != d {
        return Err(Error::Shape {
            expected: format!("{d}x{d}"),
            got: format!("{0}x{0}", c.dim()),
        });
    }
    let pe = PExponent::new(p)?;
    let phi = phi_p(&[a.clone(), c.clone()], pe)?;
    let a_half = mat_power(a, p / 2.0)?;
    let c_half = mat_power(c, p / 2.0)?;

    let mut spectra_residual = [0.0; 2];
    let mut trace_residual = [0.0; 2];
    let mut outer = Vec::with_capacity(2);
    for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
        let mut m = CMatrix::zeros(2 * d, 2 * d);
        m.set_block(0, 0, a_half.matrix());
        m.set_block(d, 0, &c_half.matrix().scale(sign));
        let inner_prod = HermitianMatrix::new(&m.adjoint() * &m)?;
        let outer_prod = HermitianMatrix::new(&m * &m.adjoint())?;
        let s_inner = eig_hermitian(&inner_prod)?;
        let s_outer = eig_hermitian(&outer_prod)?;
        let scale = s_inner.max_abs_eigenvalue().max(f64::MIN_POSITIVE);
        spectra_residual[k] = s_inner
            .eigenvalues
            .iter()
            .zip(&s_outer.eigenvalues)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
            / scale;
        let tr = PsdMatrix::new(inner_prod)?.trace_power(1.0 / p);
        trace_residual[k] = IdentityCheck::new(phi, tr).residual;
        outer.push(outer_prod);
    }
    let average = PsdMatrix::new(outer[0].add(&outer[1]).scale(0.5))?;
    let averaged = average.trace_power(1.0 / p);
    Ok(MpmReport {
        spectra_residual,
        trace_residual,
        average_residual: IdentityCheck::new(a.trace() + c.trace(), averaged).residual,
        concavity_slack: averaged - phi,
    })
}

/// Pinned tolerances for the identity suite.
#[derive(Clone, Copy, Debug)]
pub struct IdentityTolerances {
    /// absolute, max entry
    pub group_average: f64,
    /// relative
    pub identity: f64,
}

impl Default for IdentityTolerances {
    fn default() -> Self {
        Self {
            group_average: 1e-12,
            identity: 1e-9,
        }
    }
}

fn residual_report(
    name: &str,
    campaign: &Campaign,
    tol: f64,
    p: impl Into<Option<f64>>,
    dims: Vec<usize>,
    residuals: Vec<f64>,
) -> ProbeReport {
    let slacks = residuals.into_iter().map(|r| -r).collect();
    ProbeReport::from_slacks(name, Mode::Contract, campaign, tol, p, dims, slacks)
}

/// Runs every identity on `campaign.trials` random instances. Slack is the
/// negated residual, so a violation means residual above the pinned tolerance.
pub fn identity_suite(campaign: &Campaign, dim: usize, tols: IdentityTolerances) -> Result<Vec<ProbeReport>> {
    let mut reports = Vec::new();
    let unit = 1.0 / dim as f64;

    for (d1, n) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
        let space = TensorSpace::new(&[d1, n])?;
        let res = run_trials(campaign, |_, rng| {
            let a = random_hermitian_with(rng, d1 * n);
            group_average_residual(&a, &space, 1)
        })?;
        reports.push(residual_report(
            &format!("group_average_{d1}x{n}"),
            campaign,
            tols.group_average,
            None,
            vec![d1, n],
            res,
        ));
    }

    let res = run_trials(campaign, |_, rng| {
        let a1 = random_psd_with(rng, dim, unit);
        let a2 = random_psd_with(rng, dim, unit);
        Ok(verify_identity_3_1(&a1, &a2, 0.5)?.residual)
    })?;
    reports.push(residual_report(
        "swap_projection_split",
        campaign,
        tols.identity,
        0.5,
        vec![dim],
        res,
    ));

    let res = run_trials(campaign, |_, rng| {
        let mats: Vec<_> = (0..3).map(|_| random_psd_with(rng, dim, unit)).collect();
        Ok(verify_sahi(&mats)?.residual)
    })?;
    reports.push(residual_report(
        "block_column_trace_norm",
        campaign,
        tols.identity,
        2.0,
        vec![dim],
        res,
    ));

    let res = run_trials(campaign, |_, rng| {
        let mats: Vec<_> = (0..2).map(|_| random_psd_with(rng, dim, unit)).collect();
        Ok(block_diag_reduction(&mats, PExponent::new(0.5)?)?.residual)
    })?;
    reports.push(residual_report(
        "block_diag_reduction",
        campaign,
        tols.identity,
        0.5,
        vec![dim, 2],
        res,
    ));

    let space = TensorSpace::new(&[2, 3])?;
    let res = run_trials(campaign, |_, rng| {
        let a = random_psd_with(rng, 6, 1.0 / 6.0);
        let w = dual_witness_theorem2(&a, &space, 2.0)?;
        Ok(w.residual()
            .max((w.attained_embedded - w.lhs).abs() / w.lhs)
            .max((w.b_q_trace - 1.0).abs()))
    })?;
    reports.push(residual_report(
        "dual_witness",
        campaign,
        tols.identity,
        2.0,
        vec![2, 3],
        res,
    ));

    let res = run_trials(campaign, |_, rng| {
        let a = random_psd_with(rng, dim, unit);
        let c = random_psd_with(rng, dim, unit);
        Ok(verify_mpm_spectra(&a, &c, 2.5)?.max_residual())
    })?;
    reports.push(residual_report(
        "mpm_spectra",
        campaign,
        tols.identity,
        2.5,
        vec![dim],
        res,
    ));

    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random_psd;

    #[test]
    fn identity_split_on_identities() {
        let i = PsdMatrix::identity(3);
        let c = verify_identity_3_1(&i, &i, 0.5).unwrap();
        assert!((c.lhs - 2.0 * 3.0 * 2f64.powf(2.0)).abs() < 1e-12);
        assert!(c.residual <= 1e-10);
    }

    #[test]
    fn identity_split_with_zero_block() {
        let a = random_psd(3, 1.0, 4);
        let c = verify_identity_3_1(&a, &PsdMatrix::zeros(3), 0.5).unwrap();
        assert!(c.residual <= 1e-10, "{c:?}");
    }

    #[test]
    fn identity_split_rejects_p() {
        let i = PsdMatrix::identity(2);
        assert!(verify_identity_3_1(&i, &i, 1.0).is_err());
        assert!(verify_identity_3_1(&i, &PsdMatrix::identity(3), 0.5).is_err());
    }

    #[test]
    fn block_column_norm_single_matrix() {
        let a = random_psd(3, 1.0, 2);
        let c = verify_sahi(std::slice::from_ref(&a)).unwrap();
        assert!((c.lhs - a.trace()).abs() <= 1e-10 && (c.rhs - a.trace()).abs() <= 1e-10);
    }

    #[test]
    fn dual_witness_for_identity() {
        let w = dual_witness_theorem2(&PsdMatrix::identity(4), &TensorSpace::new(&[2, 2]).unwrap(), 3.0).unwrap();
        // B ∝ I on the second factor
        assert!((w.b.matrix()[(0, 0)] - w.b.matrix()[(1, 1)]).norm() < 1e-15);
        assert!(w.b.matrix()[(0, 1)].norm() < 1e-15);
        assert!(w.residual() < 1e-14);
    }

    #[test]
    fn dual_witness_zero_marginal() {
        let r = dual_witness_theorem2(&PsdMatrix::zeros(4), &TensorSpace::new(&[2, 2]).unwrap(), 2.0);
        assert!(matches!(r, Err(Error::ZeroMarginal)));
    }

    #[test]
    fn mpm_with_zero_c() {
        let a = random_psd(3, 1.0, 6);
        let r = verify_mpm_spectra(&a, &PsdMatrix::zeros(3), 2.5).unwrap();
        assert!(r.max_residual() < 1e-10, "{r:?}");
        assert!(r.concavity_slack.abs() < 1e-10);
    }

    #[test]
    fn block_diag_single_block() {
        let a = random_psd(3, 1.0, 8);
        let c = block_diag_reduction(std::slice::from_ref(&a), PExponent::new(0.7).unwrap()).unwrap();
        assert!((c.lhs - a.trace()).abs() < 1e-12 && c.residual < 1e-12);
    }
}
