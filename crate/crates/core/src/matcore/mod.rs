//! Hermitian and positive semidefinite matrices with spectral functional calculus.
//!
//! Everything downstream (powers, logarithms, positive parts, trace norms) goes
//! through [`eig_hermitian`], a cyclic complex Jacobi solver. Conventions fixed
//! here and used crate-wide:
//!
//! * `0^p = 0` for `p > 0`, and `0 · ln 0 = 0`;
//! * PSD construction clamps eigenvalues in `[-EPS_PSD·(1 + max|λ|), 0)` to zero
//!   and rejects anything more negative.

mod random;

pub use random::{random_hermitian_with, random_psd, random_psd_with, random_unitary_with, rng_for, TrialRng};

use num_complex::Complex64;

use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::jacobi;

/// Relative tolerance for accepting a slightly negative eigenvalue as zero.
pub const EPS_PSD: f64 = 1e-10;
/// Relative tolerance on eigendecomposition residuals.
pub const EPS_EIG: f64 = 1e-10;

/// Square complex matrix with `H = H^*` enforced at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    /// Symmetrizes `(X + X^*)/2`. Exactly Hermitian input passes through unchanged.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be at least 1".into()));
        }
        let sym = CMatrix::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
        Ok(Self { inner: sym })
    }

    /// Like [`HermitianMatrix::new`], but rejects input whose worst entry of
    /// `X - X^*` exceeds `tol · max(1, max|X_ij|)`.
    pub fn new_checked(m: CMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let scale = m.max_abs().max(1.0);
        let mut worst = (0, 0, 0.0);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let d = (m[(i, j)] - m[(j, i)].conj()).norm();
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        if worst.2 > tol * scale {
            return Err(Error::NotHermitian {
                row: worst.0,
                col: worst.1,
                deviation: worst.2,
            });
        }
        Self::new(m)
    }

    pub fn from_real_diag(diag: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_diag(diag))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: CMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: CMatrix::zeros(dim, dim),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner + &other.inner,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner - &other.inner,
        }
    }

    /// `U H U^*`, re-symmetrized against roundoff.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        let m = &(u * &self.inner) * &u.adjoint();
        Self::new(m).expect("conjugation preserves squareness")
    }
}

/// Eigendecomposition `H = U diag(λ) U^*` with eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(λ)) U^*` without any domain checks.
    pub fn synthesize(&self, values: &[f64]) -> CMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in values.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = u[(i, k)] * lam;
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in i..n {
                    out[(i, j)] += a * u[(j, k)].conj();
                }
            }
        }
        for i in 0..n {
            out[(i, i)].im = 0.0;
            for j in 0..i {
                out[(i, j)] = out[(j, i)].conj();
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.synthesize(&self.eigenvalues)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }
}

pub fn eig_hermitian(h: &HermitianMatrix) -> Result<Spectrum> {
    let (values, vectors) = jacobi::hermitian_eigen(h.matrix())?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let n = values.len();
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn map_eigenvalues(spec: &Spectrum, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    spec.eigenvalues
        .iter()
        .map(|&lam| {
            let y = f(lam);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::Domain { eigenvalue: lam })
            }
        })
        .collect()
}

/// Spectral functional calculus `f(H) = U diag(f(λ)) U^*`. A non-finite
/// `f(λ)` (for example `sqrt` or `ln` of a negative number) is a domain error.
pub fn apply_fn(h: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let spec = eig_hermitian(h)?;
    let values = map_eigenvalues(&spec, f)?;
    HermitianMatrix::new(spec.synthesize(&values))
}

/// Hermitian matrix with nonnegative spectrum. Caches its (clamped) spectrum so
/// repeated powers cost a single decomposition.
#[derive(Clone, Debug)]
pub struct PsdMatrix {
    base: HermitianMatrix,
    spectrum: Spectrum,
}

impl PsdMatrix {
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let mut spectrum = eig_hermitian(&base)?;
        let tolerance = EPS_PSD * (1.0 + spectrum.max_abs_eigenvalue());
        let min = spectrum.min_eigenvalue();
        if min < -tolerance {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                tolerance,
            });
        }
        for lam in &mut spectrum.eigenvalues {
            if *lam < 0.0 {
                *lam = 0.0;
            }
        }
        Ok(Self { base, spectrum })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    /// Builds from a spectrum whose eigenvalues are already known to be
    /// nonnegative up to roundoff; negatives are clamped.
    pub(crate) fn from_spectrum(mut spectrum: Spectrum) -> Self {
        for lam in &mut spectrum.eigenvalues {
            if *lam < 0.0 {
                *lam = 0.0;
            }
        }
        let base = HermitianMatrix {
            inner: spectrum.reconstruct(),
        };
        Self { base, spectrum }
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diag(diag)?)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            base: HermitianMatrix::zeros(dim),
            spectrum: Spectrum {
                eigenvalues: vec![0.0; dim],
                eigenvectors: CMatrix::identity(dim),
            },
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            base: HermitianMatrix::identity(dim),
            spectrum: Spectrum {
                eigenvalues: vec![1.0; dim],
                eigenvectors: CMatrix::identity(dim),
            },
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    #[inline]
    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn trace(&self) -> f64 {
        self.base.trace()
    }

    /// `t·A` for `t ≥ 0`, reusing the cached eigenvectors.
    pub fn scale(&self, t: f64) -> Self {
        assert!(t >= 0.0, "PSD matrices may only be scaled by t >= 0");
        Self {
            base: self.base.scale(t),
            spectrum: Spectrum {
                eigenvalues: self.spectrum.eigenvalues.iter().map(|x| x * t).collect(),
                eigenvectors: self.spectrum.eigenvectors.clone(),
            },
        }
    }

    /// Sum of PSD matrices is PSD; the sum is re-decomposed.
    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(self.base.add(&other.base))
    }

    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        Self::new(self.base.conjugate_by(u))
    }

    /// `Σ λ_i^r` over the clamped spectrum with `0^r = 0` for `r > 0`.
    pub fn trace_power(&self, r: f64) -> f64 {
        self.spectrum.eigenvalues.iter().map(|&x| pow_convention(x, r)).sum()
    }

    /// Largest eigenvalue.
    pub fn spectral_scale(&self) -> f64 {
        self.spectrum.max_abs_eigenvalue()
    }
}

#[inline]
pub(crate) fn pow_convention(x: f64, p: f64) -> f64 {
    if x <= 0.0 {
        if p > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else if p == 1.0 {
        x
    } else {
        x.powf(p)
    }
}

/// Spectral power `A^p` with `0^p = 0` for `p > 0`. For `p ≤ 0` the matrix
/// must be nonsingular (min eigenvalue above `EPS_PSD` relative).
pub fn mat_power(a: &PsdMatrix, p: f64) -> Result<PsdMatrix> {
    if !p.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent must be finite, got {p}")));
    }
    if p == 1.0 {
        return Ok(a.clone());
    }
    let spec = a.spectrum();
    if p <= 0.0 {
        let min = spec.min_eigenvalue();
        if min <= EPS_PSD * (1.0 + spec.max_abs_eigenvalue()) {
            return Err(Error::Singular {
                min_eigenvalue: min,
                power: p,
            });
        }
    }
    let values: Vec<f64> = spec.eigenvalues.iter().map(|&x| pow_convention(x, p)).collect();
    Ok(PsdMatrix::from_spectrum(Spectrum {
        eigenvalues: values,
        eigenvectors: spec.eigenvectors.clone(),
    }))
}

/// `X_+ = (X + |X|)/2`: eigenvalues `max(λ, 0)` on the eigenvectors of `X`.
pub fn positive_part(x: &HermitianMatrix) -> Result<PsdMatrix> {
    let spec = eig_hermitian(x)?;
    let values = spec.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    Ok(PsdMatrix::from_spectrum(Spectrum {
        eigenvalues: values,
        eigenvectors: spec.eigenvectors,
    }))
}

/// `|X| = sqrt(X^* X)` for Hermitian `X`.
pub fn abs(x: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_fn(x, f64::abs)
}

/// `Tr sqrt(X^* X)`, the sum of singular values, for any rectangular `X`.
pub fn trace_norm(x: &CMatrix) -> Result<f64> {
    Ok(jacobi::singular_values(x)?.iter().sum())
}
