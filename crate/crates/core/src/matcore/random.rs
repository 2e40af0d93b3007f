//! Seeded random matrices. All sampling goes through ChaCha8 so a seed maps to
//! the same matrix on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{HermitianMatrix, PsdMatrix};
use crate::dense::{inner, vec_norm, CMatrix};

pub type TrialRng = ChaCha8Rng;

pub fn rng_for(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian with `E|z|^2 = 1`.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// `scale · G G^*` with `G` a `dim × dim` complex Gaussian matrix.
pub fn random_psd_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> PsdMatrix {
    assert!(dim >= 1, "random_psd requires dim >= 1");
    let g = gaussian_matrix(rng, dim, dim);
    let w = (&g * &g.adjoint()).scale(scale);
    PsdMatrix::from_matrix(w).expect("G G^* is positive semidefinite")
}

pub fn random_psd(dim: usize, scale: f64, seed: u64) -> PsdMatrix {
    random_psd_with(&mut rng_for(seed), dim, scale)
}

/// `(G + G^*)/2` with Gaussian `G`.
pub fn random_hermitian_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    HermitianMatrix::new(gaussian_matrix(rng, dim, dim)).expect("square")
}

/// Unitary from modified Gram–Schmidt on the columns of a Gaussian matrix.
pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        // two passes keep orthogonality at machine precision
        for _ in 0..2 {
            for q in &cols {
                let c = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let n = vec_norm(&v);
        v.iter_mut().for_each(|x| *x /= n);
        cols.push(v);
    }
    CMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrix() {
        let a = random_psd(4, 1.0, 42);
        let b = random_psd(4, 1.0, 42);
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn different_seeds_differ() {
        let a = random_psd(4, 1.0, 1);
        let b = random_psd(4, 1.0, 2);
        assert!((a.matrix() - b.matrix()).frobenius_norm() > 0.0);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary_with(&mut rng_for(3), 5);
        let uu = &u.adjoint() * &u;
        assert!(uu.approx_eq(&CMatrix::identity(5), 1e-14));
    }
}
