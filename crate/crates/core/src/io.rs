//! JSON interchange for matrices and CSV/JSON report output.
//!
//! Matrix format: `{"dim": n, "re": [[..]; n], "im": [[..]; n]}`, row-major.
//! Floats are written in shortest round-trip form, so `load(save(X)) == X`
//! bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::matcore::HermitianMatrix;
use crate::probes::ProbeReport;

/// Hermiticity tolerance applied when loading matrices from disk.
pub const LOAD_HERMITIAN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dim: m.rows(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        let shape_ok = |part: &Vec<Vec<f64>>| part.len() == n && part.iter().all(|r| r.len() == n);
        if n == 0 || !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Parse(format!("\"re\" and \"im\" must both be {n}x{n} arrays")));
        }
        let data = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| Complex64::new(self.re[i][j], self.im[i][j]))
            .collect();
        CMatrix::from_vec(n, n, data)
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new_checked(self.to_matrix()?, LOAD_HERMITIAN_TOL)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl VectorJson {
    pub fn from_slice(v: &[Complex64]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_vec(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect()
    }
}

pub fn matrix_to_json(m: &HermitianMatrix) -> Result<String> {
    Ok(serde_json::to_string(&MatrixJson::from_matrix(m.matrix()))?)
}

pub fn matrix_from_json(s: &str) -> Result<HermitianMatrix> {
    let parsed: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    parsed.to_hermitian()
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<HermitianMatrix> {
    matrix_from_json(&fs::read_to_string(path)?)
}

pub fn save_matrix(m: &HermitianMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, matrix_to_json(m)?)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Top-level document written by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignOutput {
    pub command: String,
    /// Seconds since the Unix epoch; the only field that varies between identical runs.
    pub timestamp: u64,
    pub passed: bool,
    pub reports: Vec<ProbeReport>,
}

impl CampaignOutput {
    /// JSON with the timestamp zeroed, for determinism comparisons.
    pub fn canonical_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.timestamp = 0;
        Ok(serde_json::to_string_pretty(&copy)?)
    }
}

/// Flat per-trial rows `trial,seed,slack,probe`.
pub fn reports_to_csv(reports: &[ProbeReport]) -> String {
    let mut out = String::from("trial,seed,slack,probe\n");
    for r in reports {
        for t in &r.slacks {
            out.push_str(&format!("{},{},{:e},{}\n", t.trial, t.seed, t.slack, r.name));
        }
    }
    out
}

pub fn render_output(output: &CampaignOutput, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(output)? + "\n"),
        Format::Csv => Ok(reports_to_csv(&output.reports)),
    }
}

pub fn save_report(output: &CampaignOutput, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(render_output(output, format)?.as_bytes())?;
    Ok(())
}
