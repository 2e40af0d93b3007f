//! Simultaneously diagonal inputs: every functional against its scalar formula.
//!
//! The scalar sides here are written out directly and share no code with the
//! matrix paths, except the classical cross-path check, which goes through
//! [`classical_oracle`].

use rand::Rng;

use super::classical::{classical_oracle, diagonal_embedding, NonnegTensor};
use super::{run_trials, Campaign, Mode, ProbeReport};
use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::functionals::{
    bks_sides, bks_subadditivity_sides, entropy, minkowski2_sides, minkowski3_sides, phi_p, psi_p, ssa_deficit,
    DensityMatrix, PExponent,
};
use crate::matcore::{trace_norm, PsdMatrix, TrialRng};
use crate::tensor::TensorSpace;

/// Relative agreement required of each functional against its scalar formula.
pub const ORACLE_TOL: f64 = 1e-11;
/// Relative agreement required of the classical cross-path check.
pub const CLASSICAL_TOL: f64 = 1e-10;

/// Entries uniform on `[0, 1)`, a fifth of them set exactly to zero.
fn draw_entries(rng: &mut TrialRng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.random::<f64>() < 0.2 {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect()
}

fn pw(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(p)
    }
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

fn rel(matrix_path: f64, scalar: f64) -> f64 {
    (matrix_path - scalar).abs() / scalar.abs().max(1.0)
}

fn report(name: &str, campaign: &Campaign, tol: f64, p: f64, dims: Vec<usize>, residuals: Vec<f64>) -> ProbeReport {
    let slacks = residuals.into_iter().map(|r| -r).collect();
    ProbeReport::from_slacks(name, Mode::Contract, campaign, tol, p, dims, slacks)
}

/// Diagonal checks for `phi_p`, `psi_p`, both Minkowski inequalities, the
/// entropy, the SSA deficit, the trace norm and (for `p > 1`) both BKS
/// quantities, followed by the classical cross-path check. Factor `k` of
/// `dims` indexes the `k`-th digit of the diagonal position.
pub fn oracle_suite(campaign: &Campaign, p: PExponent, dims: [usize; 3]) -> Result<Vec<ProbeReport>> {
    if dims.contains(&0) {
        return Err(Error::InvalidArgument("oracle dims must be positive".into()));
    }
    let pv = p.value();
    let [d0, d1, d2] = dims;
    let d = d0 * d1 * d2;
    let space2 = TensorSpace::new(&[d0, d1])?;
    let space3 = TensorSpace::new(&dims)?;
    let mut reports = Vec::new();

    // phi_p on a triple of diagonal matrices: Σ_i (Σ_j a_j(i)^p)^{1/p}
    let res = run_trials(campaign, |_, rng| {
        let cols: Vec<Vec<f64>> = (0..3).map(|_| draw_entries(rng, d)).collect();
        let mats = cols
            .iter()
            .map(|c| PsdMatrix::from_diag(c))
            .collect::<Result<Vec<_>>>()?;
        let scalar: f64 = (0..d)
            .map(|i| pw(cols.iter().map(|c| pw(c[i], pv)).sum(), 1.0 / pv))
            .sum();
        Ok(rel(phi_p(&mats, p)?, scalar))
    })?;
    reports.push(report("diag_phi", campaign, ORACLE_TOL, pv, vec![d], res));

    // psi_p and both sides of the two-space inequality; a(i, j) at i·d1 + j
    let res = run_trials(campaign, |_, rng| {
        let a = draw_entries(rng, d0 * d1);
        let m = PsdMatrix::from_diag(&a)?;
        let at = |i: usize, j: usize| a[i * d1 + j];
        let psi: f64 = (0..d0)
            .map(|i| pw((0..d1).map(|j| pw(at(i, j), pv)).sum(), 1.0 / pv))
            .sum();
        let lhs = pw((0..d1).map(|j| pw((0..d0).map(|i| at(i, j)).sum(), pv)).sum(), 1.0 / pv);
        let (ml, mr) = minkowski2_sides(&m, &space2, p)?;
        Ok(rel(psi_p(&m, &space2, p)?, psi).max(rel(ml, lhs)).max(rel(mr, psi)))
    })?;
    reports.push(report("diag_minkowski2", campaign, ORACLE_TOL, pv, vec![d0, d1], res));

    // three-space sides; a(i, j, k) at (i·d1 + j)·d2 + k
    let res = run_trials(campaign, |_, rng| {
        let a = draw_entries(rng, d);
        let m = PsdMatrix::from_diag(&a)?;
        let at = |i: usize, j: usize, k: usize| a[(i * d1 + j) * d2 + k];
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for k in 0..d2 {
            let inner: f64 = (0..d1).map(|j| pw((0..d0).map(|i| at(i, j, k)).sum(), pv)).sum();
            lhs += pw(inner, 1.0 / pv);
            for i in 0..d0 {
                rhs += pw((0..d1).map(|j| pw(at(i, j, k), pv)).sum(), 1.0 / pv);
            }
        }
        let (ml, mr) = minkowski3_sides(&m, &space3, p)?;
        Ok(rel(ml, lhs).max(rel(mr, rhs)))
    })?;
    reports.push(report("diag_minkowski3", campaign, ORACLE_TOL, pv, dims.to_vec(), res));

    // entropy and the SSA deficit of a diagonal density
    let res = run_trials(campaign, |_, rng| {
        let mut a = draw_entries(rng, d);
        a[0] += 0.5;
        let total: f64 = a.iter().sum();
        let a: Vec<f64> = a.iter().map(|x| x / total).collect();
        let rho = DensityMatrix::new(&PsdMatrix::from_diag(&a)?)?;
        let at = |i: usize, j: usize, k: usize| a[(i * d1 + j) * d2 + k];
        let h = |vals: Vec<f64>| -vals.into_iter().map(xlogx).sum::<f64>();
        let s012 = h(a.clone());
        let s02 = h((0..d0)
            .flat_map(|i| (0..d2).map(move |k| (i, k)))
            .map(|(i, k)| (0..d1).map(|j| at(i, j, k)).sum())
            .collect());
        let s12 = h((0..d1)
            .flat_map(|j| (0..d2).map(move |k| (j, k)))
            .map(|(j, k)| (0..d0).map(|i| at(i, j, k)).sum())
            .collect());
        let s2 = h((0..d2)
            .map(|k| {
                (0..d0)
                    .flat_map(|i| (0..d1).map(move |j| (i, j)))
                    .map(|(i, j)| at(i, j, k))
                    .sum()
            })
            .collect());
        Ok(rel(entropy(&rho), s012).max(rel(ssa_deficit(&rho, &space3)?, s02 + s12 - s012 - s2)))
    })?;
    reports.push(report(
        "diag_entropy_ssa",
        campaign,
        ORACLE_TOL,
        1.0,
        dims.to_vec(),
        res,
    ));

    // trace norm of a real diagonal: Σ |a_i|
    let res = run_trials(campaign, |_, rng| {
        let a: Vec<f64> = draw_entries(rng, d).into_iter().map(|x| x - 0.5).collect();
        let scalar: f64 = a.iter().map(|x| x.abs()).sum();
        Ok(rel(trace_norm(&CMatrix::from_diag(&a))?, scalar))
    })?;
    reports.push(report("diag_trace_norm", campaign, ORACLE_TOL, 1.0, vec![d], res));

    if pv > 1.0 {
        let res = run_trials(campaign, |_, rng| {
            let a = draw_entries(rng, d);
            let b = draw_entries(rng, d);
            let (ma, mb) = (PsdMatrix::from_diag(&a)?, PsdMatrix::from_diag(&b)?);
            let lhs: f64 = a
                .iter()
                .zip(&b)
                .map(|(&x, &y)| pw((pw(y, pv) - pw(x, pv)).max(0.0), 1.0 / pv))
                .sum();
            let rhs: f64 = a.iter().zip(&b).map(|(&x, &y)| (y - x).max(0.0)).sum();
            let sub_lhs: f64 = a.iter().chain(&b).sum();
            let sub_rhs: f64 = a
                .iter()
                .zip(&b)
                .map(|(&x, &y)| pw(pw(x, pv) + pw(y, pv), 1.0 / pv))
                .sum();
            let (l, r) = bks_sides(&ma, &mb, pv)?;
            let (sl, sr) = bks_subadditivity_sides(&ma, &mb, pv)?;
            Ok(rel(l, lhs).max(rel(r, rhs)).max(rel(sl, sub_lhs)).max(rel(sr, sub_rhs)))
        })?;
        reports.push(report("diag_bks", campaign, ORACLE_TOL, pv, vec![d], res));
    }

    // classical cross-path: f(x, y, z) embedded on [ny, nx, nz]
    let shape = [d1, d0, d2];
    let res = run_trials(campaign, |_, rng| {
        let f = NonnegTensor::random(rng, shape);
        let c = classical_oracle(&f, pv)?;
        let (a, space) = diagonal_embedding(&f)?;
        let (ml, mr) = minkowski3_sides(&a, &space, p)?;
        let rho = DensityMatrix::new(&a)?;
        Ok(rel(ml, c.lhs)
            .max(rel(mr, c.rhs))
            .max(rel(ssa_deficit(&rho, &space)?, c.entropy_combination)))
    })?;
    reports.push(report(
        "classical_cross_path",
        campaign,
        CLASSICAL_TOL,
        pv,
        dims.to_vec(),
        res,
    ));

    Ok(reports)
}
