//! Tensor-product index structure.
//!
//! Factors are numbered from 0 and factor 0 is the slowest (leftmost)
//! Kronecker index: on `H_0 ⊗ H_1 ⊗ H_2` the basis vector `e_a ⊗ e_b ⊗ e_c`
//! sits at row `(a·d_1 + b)·d_2 + c`. So `Tr_1` in the usual one-based
//! notation is `partial_trace(.., 0)` here.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::dense::{CMatrix, ZERO};
use crate::error::{Error, Result};
use crate::matcore::HermitianMatrix;

/// Largest `N` for which the signed-permutation group is enumerated (384 elements).
pub const N_MAX: usize = 4;

/// Ordered factor dimensions `[d_0, .., d_{k-1}]` with `1 ≤ k ≤ 3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSpace {
    dims: Vec<usize>,
}

impl TensorSpace {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "a tensor space has 1 to 3 factors, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument("factor dimensions must be >= 1".into()));
        }
        Ok(Self { dims: dims.to_vec() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// The space left after tracing out `factor`.
    pub fn without(&self, factor: usize) -> Result<Self> {
        self.check_factor(factor)?;
        if self.dims.len() == 1 {
            return Ok(Self { dims: vec![1] });
        }
        let mut dims = self.dims.clone();
        dims.remove(factor);
        Ok(Self { dims })
    }

    fn check_factor(&self, factor: usize) -> Result<()> {
        if factor >= self.dims.len() {
            return Err(Error::InvalidArgument(format!(
                "factor {factor} out of range for {} factors",
                self.dims.len()
            )));
        }
        Ok(())
    }

    /// `(left, mid, right)` block sizes around `factor`.
    fn split(&self, factor: usize) -> (usize, usize, usize) {
        let left = self.dims[..factor].iter().product();
        let right = self.dims[factor + 1..].iter().product();
        (left, self.dims[factor], right)
    }

    pub(crate) fn check_matrix(&self, m: &CMatrix) -> Result<()> {
        let d = self.total_dim();
        if m.rows() != d || m.cols() != d {
            return Err(Error::Shape {
                expected: format!("{d}x{d} for dims {:?}", self.dims),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        Ok(())
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Contracts the index of `factor`; works on any square matrix living on `space`.
pub(crate) fn partial_trace_matrix(a: &CMatrix, space: &TensorSpace, factor: usize) -> Result<CMatrix> {
    space.check_matrix(a)?;
    space.check_factor(factor)?;
    let (left, mid, right) = space.split(factor);
    let out_dim = left * right;
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for l in 0..left {
        for r in 0..right {
            let row = l * right + r;
            for l2 in 0..left {
                for r2 in 0..right {
                    let col = l2 * right + r2;
                    let mut acc = ZERO;
                    for m in 0..mid {
                        acc += a[((l * mid + m) * right + r, (l2 * mid + m) * right + r2)];
                    }
                    out[(row, col)] = acc;
                }
            }
        }
    }
    Ok(out)
}

/// Trace over one factor by direct index contraction. Returns the operator on
/// the remaining factors, in their original order.
pub fn partial_trace(a: &HermitianMatrix, space: &TensorSpace, factor: usize) -> Result<HermitianMatrix> {
    HermitianMatrix::new(partial_trace_matrix(a.matrix(), space, factor)?)
}

/// Traces out several factors (any order) and returns the reduced operator
/// together with the space it lives on.
pub fn partial_trace_many(
    a: &HermitianMatrix,
    space: &TensorSpace,
    factors: &[usize],
) -> Result<(HermitianMatrix, TensorSpace)> {
    for &f in factors {
        space.check_factor(f)?;
    }
    if !factors.iter().all_unique() {
        return Err(Error::InvalidArgument(format!("repeated factor in {factors:?}")));
    }
    // trace the highest index first so the lower indices stay valid
    let mut order = factors.to_vec();
    order.sort_unstable_by(|a, b| b.cmp(a));
    let mut current = a.matrix().clone();
    let mut current_space = space.clone();
    for f in order {
        current = partial_trace_matrix(&current, &current_space, f)?;
        current_space = current_space.without(f)?;
    }
    Ok((HermitianMatrix::new(current)?, current_space))
}

/// `I ⊗ .. ⊗ B ⊗ .. ⊗ I` with `B` in slot `factor`.
pub fn embed_factor(b: &CMatrix, space: &TensorSpace, factor: usize) -> Result<CMatrix> {
    space.check_factor(factor)?;
    let (left, mid, right) = space.split(factor);
    if b.rows() != mid || b.cols() != mid {
        return Err(Error::Shape {
            expected: format!("{mid}x{mid} operator for factor {factor}"),
            got: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    Ok(kron(&kron(&CMatrix::identity(left), b), &CMatrix::identity(right)))
}

/// Unitary `W e_j = (-1)^{s(j)} e_{π(j)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutationUnitary {
    perm: Vec<usize>,
    flips: Vec<bool>,
}

impl SignedPermutationUnitary {
    pub fn new(perm: Vec<usize>, flips: Vec<bool>) -> Result<Self> {
        let n = perm.len();
        if flips.len() != n || !perm.iter().all_unique() || perm.iter().any(|&p| p >= n) {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        Ok(Self { perm, flips })
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    #[inline]
    fn sign(&self, j: usize) -> f64 {
        if self.flips[j] {
            -1.0
        } else {
            1.0
        }
    }

    /// Integer entries; `W[π(j)][j] = ±1`.
    pub fn to_int_matrix(&self) -> Vec<Vec<i32>> {
        let n = self.size();
        let mut w = vec![vec![0; n]; n];
        for j in 0..n {
            w[self.perm[j]][j] = if self.flips[j] { -1 } else { 1 };
        }
        w
    }

    pub fn to_matrix(&self) -> CMatrix {
        let w = self.to_int_matrix();
        CMatrix::from_fn(self.size(), self.size(), |i, j| (w[i][j] as f64).into())
    }

    /// `W^T W == I` in exact integer arithmetic (entries are real).
    pub fn is_unitary_exact(&self) -> bool {
        let w = self.to_int_matrix();
        let n = self.size();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let dot: i32 = (0..n).map(|k| w[k][i] * w[k][j]).sum();
                dot == i32::from(i == j)
            })
        })
    }
}

/// All `2^N · N!` signed permutations of `N` basis vectors, each exactly once.
pub fn signed_permutation_group(n: usize) -> Result<Vec<SignedPermutationUnitary>> {
    if n > N_MAX {
        return Err(Error::Capacity { n, max: N_MAX });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("group needs N >= 1".into()));
    }
    let mut out = Vec::with_capacity((1usize << n) * (1..=n).product::<usize>());
    for perm in (0..n).permutations(n) {
        for mask in 0u32..(1 << n) {
            let flips = (0..n).map(|j| mask & (1 << j) != 0).collect();
            out.push(SignedPermutationUnitary {
                perm: perm.clone(),
                flips,
            });
        }
    }
    Ok(out)
}

/// `(1/|G|) Σ_W (I ⊗ W^*) A (I ⊗ W)` with `W` ranging over the signed
/// permutations of factor `averaged_factor` of a two-factor space.
///
/// The result equals `(1/N)·Tr_f(A)` placed back on the remaining factor with
/// the identity on the averaged slot `f`.
pub fn group_average(a: &HermitianMatrix, space: &TensorSpace, averaged_factor: usize) -> Result<HermitianMatrix> {
    if space.factors() != 2 {
        return Err(Error::InvalidArgument(
            "group averaging acts on a two-factor space".into(),
        ));
    }
    space.check_matrix(a.matrix())?;
    space.check_factor(averaged_factor)?;
    let n = space.dims()[averaged_factor];
    let group = signed_permutation_group(n)?;
    let (left, mid, right) = space.split(averaged_factor);
    let d = space.total_dim();
    let am = a.matrix();

    // (W^* A W)[x, y] = s(x) s(y) A[π(x), π(y)] on the averaged index.
    let mut sum = CMatrix::zeros(d, d);
    for w in &group {
        let map = |idx: usize| {
            let (l, rest) = (idx / (mid * right), idx % (mid * right));
            let (m, r) = (rest / right, rest % right);
            ((l * mid + w.perm[m]) * right + r, w.sign(m))
        };
        for x in 0..d {
            let (px, sx) = map(x);
            for y in 0..d {
                let (py, sy) = map(y);
                sum[(x, y)] += am[(px, py)] * (sx * sy);
            }
        }
    }
    debug_assert_eq!(left * mid * right, d);
    HermitianMatrix::new(sum.scale(1.0 / group.len() as f64))
}
