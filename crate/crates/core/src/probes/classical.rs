//! Commutative special case: nonnegative functions on a finite product
//! `X × Y × Z`, evaluated by direct summation.
//!
//! `lhs = Σ_z (Σ_x (Σ_y f)^p)^{1/p}`, `rhs = Σ_z Σ_y (Σ_x f^p)^{1/p}`; `lhs ≤ rhs`
//! for `p ≥ 1`, reversed for `p ≤ 1`, and `d/dp (rhs - lhs)` at `p = 1` is the
//! classical SSA combination `S(f_13) + S(f_23) - S(f_123) - S(f_3)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::PsdMatrix;
use crate::tensor::TensorSpace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonnegTensor {
    shape: [usize; 3],
    data: Vec<f64>,
}

impl NonnegTensor {
    /// `data` is indexed as `f(x, y, z) = data[(x·ny + y)·nz + z]`.
    pub fn new(shape: [usize; 3], data: Vec<f64>) -> Result<Self> {
        if shape.contains(&0) || data.len() != shape.iter().product::<usize>() {
            return Err(Error::Shape {
                expected: format!("{} entries for shape {shape:?}", shape.iter().product::<usize>()),
                got: format!("{}", data.len()),
            });
        }
        if let Some(bad) = data.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "entries must be nonnegative, found {bad}"
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn from_fn(shape: [usize; 3], f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let [nx, ny, nz] = shape;
        let mut data = Vec::with_capacity(nx * ny * nz);
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    data.push(f(x, y, z));
                }
            }
        }
        Self::new(shape, data)
    }

    /// Entries uniform on `[0, 1)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, shape: [usize; 3]) -> Self {
        let n = shape.iter().product();
        Self {
            shape,
            data: (0..n).map(|_| rng.random::<f64>()).collect(),
        }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        let [_, ny, nz] = self.shape;
        self.data[(x * ny + y) * nz + z]
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn normalized(&self) -> Self {
        let t = self.total();
        Self {
            shape: self.shape,
            data: self.data.iter().map(|x| x / t).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSides {
    pub lhs: f64,
    pub rhs: f64,
    /// SSA combination of the normalized tensor.
    pub entropy_combination: f64,
}

fn shannon(values: impl Iterator<Item = f64>) -> f64 {
    -values.filter(|&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

fn powf(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(p)
    }
}

pub fn classical_oracle(f: &NonnegTensor, p: f64) -> Result<ClassicalSides> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("p must be > 0, got {p}")));
    }
    let [nx, ny, nz] = f.shape;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for z in 0..nz {
        let inner: f64 = (0..nx).map(|x| powf((0..ny).map(|y| f.get(x, y, z)).sum(), p)).sum();
        lhs += powf(inner, 1.0 / p);
        for y in 0..ny {
            rhs += powf((0..nx).map(|x| powf(f.get(x, y, z), p)).sum(), 1.0 / p);
        }
    }

    let g = f.normalized();
    let f13 = (0..nx)
        .flat_map(|x| (0..nz).map(move |z| (x, z)))
        .map(|(x, z)| (0..ny).map(|y| g.get(x, y, z)).sum());
    let f23 = (0..ny)
        .flat_map(|y| (0..nz).map(move |z| (y, z)))
        .map(|(y, z)| (0..nx).map(|x| g.get(x, y, z)).sum());
    let f3 = (0..nz).map(|z| {
        (0..nx)
            .flat_map(|x| (0..ny).map(move |y| (x, y)))
            .map(|(x, y)| g.get(x, y, z))
            .sum()
    });
    let entropy_combination = shannon(f13) + shannon(f23) - shannon(g.data.iter().copied()) - shannon(f3);

    Ok(ClassicalSides {
        lhs,
        rhs,
        entropy_combination,
    })
}

/// `rhs - lhs` of the classical inequality.
pub fn classical_gap(f: &NonnegTensor, p: f64) -> Result<f64> {
    let s = classical_oracle(f, p)?;
    Ok(s.rhs - s.lhs)
}

/// Diagonal operator on `[ny, nx, nz]` with `⟨y,x,z| A |y,x,z⟩ = f(x, y, z)`.
/// The operator's first factor carries the classical `Y`, which is the
/// variable summed first on the left-hand side.
pub fn diagonal_embedding(f: &NonnegTensor) -> Result<(PsdMatrix, TensorSpace)> {
    let [nx, ny, nz] = f.shape;
    let mut diag = Vec::with_capacity(nx * ny * nz);
    for y in 0..ny {
        for x in 0..nx {
            for z in 0..nz {
                diag.push(f.get(x, y, z));
            }
        }
    }
    Ok((PsdMatrix::from_diag(&diag)?, TensorSpace::new(&[ny, nx, nz])?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_tensor_sides_agree() {
        let f = NonnegTensor::from_fn([2, 3, 2], |_, _, _| 0.7).unwrap();
        for p in [0.5, 2.0, 3.0] {
            let s = classical_oracle(&f, p).unwrap();
            assert!((s.lhs - s.rhs).abs() < 1e-13 * s.lhs, "p = {p}");
        }
    }

    #[test]
    fn p_one_sides_agree() {
        let f = NonnegTensor::from_fn([2, 2, 3], |x, y, z| (1 + x + 2 * y + 3 * z) as f64).unwrap();
        let s = classical_oracle(&f, 1.0).unwrap();
        assert!((s.lhs - s.rhs).abs() < 1e-12);
        assert!((s.lhs - f.total()).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_entries() {
        assert!(NonnegTensor::new([1, 1, 2], vec![1.0, -0.5]).is_err());
        assert!(NonnegTensor::new([1, 1, 2], vec![1.0]).is_err());
    }
}
