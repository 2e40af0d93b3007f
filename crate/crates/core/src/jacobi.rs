//! Complex Jacobi kernels: two-sided cyclic Jacobi for Hermitian eigenproblems
//! and one-sided (Hestenes) Jacobi for singular values.

use num_complex::Complex64;

use crate::dense::CMatrix;
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius mass, relative to `‖H‖_F`, accepted as converged.
pub const CONVERGENCE_TOL: f64 = 1e-13;

/// A plane rotation `G` acting on coordinates `(p, q)` with columns
/// `g_p = (c, s·conj(phase))` and `g_q = (-s·phase, c)`.
#[derive(Clone, Copy, Debug)]
struct Rotation {
    c: f64,
    s: f64,
    phase: Complex64,
}

impl Rotation {
    /// Rotation annihilating the off-diagonal entry `z` of the 2×2 Hermitian
    /// block `[[a, z], [conj z, b]]` under `G^* H G`.
    fn annihilating(a: f64, b: f64, z: Complex64) -> Self {
        let r = z.norm();
        let phase = z / r;
        let theta = (a - b) / (2.0 * r);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
            sign / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        Self { c, s: t * c, phase }
    }

    /// `M <- M G` on columns `p`, `q`.
    fn apply_right(&self, m: &mut CMatrix, p: usize, q: usize) {
        let sp = self.phase.conj() * self.s;
        let sq = self.phase * self.s;
        for k in 0..m.rows() {
            let x = m[(k, p)];
            let y = m[(k, q)];
            m[(k, p)] = x * self.c + y * sp;
            m[(k, q)] = y * self.c - x * sq;
        }
    }

    /// `M <- G^* M` on rows `p`, `q`.
    fn apply_left_adjoint(&self, m: &mut CMatrix, p: usize, q: usize) {
        let sp = self.phase * self.s;
        let sq = self.phase.conj() * self.s;
        for k in 0..m.cols() {
            let x = m[(p, k)];
            let y = m[(q, k)];
            m[(p, k)] = x * self.c + y * sp;
            m[(q, k)] = y * self.c - x * sq;
        }
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi on a Hermitian matrix. Returns unsorted eigenvalues and the
/// unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = CMatrix::identity(n);
    let norm = h.frobenius_norm();
    let target = f64::EPSILON * norm;
    let skip = 1e-3 * f64::EPSILON * norm;

    let mut off = off_diagonal_norm(&a);
    for _ in 0..MAX_SWEEPS {
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let z = a[(p, q)];
                if z.norm() <= skip {
                    continue;
                }
                let rot = Rotation::annihilating(a[(p, p)].re, a[(q, q)].re, z);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                rot.apply_right(&mut v, p, q);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
        let next = off_diagonal_norm(&a);
        // roundoff floor reached
        if next >= off {
            off = next;
            break;
        }
        off = next;
    }

    if off > CONVERGENCE_TOL * norm {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual: off / norm.max(f64::MIN_POSITIVE),
        });
    }
    let eigenvalues = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((eigenvalues, v))
}

/// Singular values of an arbitrary rectangular matrix by one-sided Jacobi,
/// sorted descending. Small singular values keep full relative accuracy,
/// unlike square roots of the eigenvalues of `X^* X`.
pub fn singular_values(x: &CMatrix) -> Result<Vec<f64>> {
    let n = x.cols();
    let mut w = x.clone();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, Complex64::new(0.0, 0.0));
                for k in 0..w.rows() {
                    let (wp, wq) = (w[(k, p)], w[(k, q)]);
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                Rotation::annihilating(alpha, beta, gamma).apply_right(&mut w, p, q);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n)
        .map(|j| (0..w.rows()).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual: f64::NAN,
        });
    }
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_zeroes_complex_entry() {
        let z = Complex64::new(0.3, -0.8);
        let mut h = CMatrix::from_vec(
            2,
            2,
            vec![Complex64::new(1.5, 0.0), z, z.conj(), Complex64::new(-0.5, 0.0)],
        )
        .unwrap();
        let rot = Rotation::annihilating(1.5, -0.5, z);
        rot.apply_right(&mut h, 0, 1);
        rot.apply_left_adjoint(&mut h, 0, 1);
        assert!(h[(0, 1)].norm() < 1e-15);
        assert!(h[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let x = CMatrix::from_real_rows(&[vec![-3.0, 0.0], vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let sv = singular_values(&x).unwrap();
        assert_eq!(sv, vec![3.0, 2.0]);
    }
}
