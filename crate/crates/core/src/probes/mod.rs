//! Seeded verification campaigns, identity checks and the constructive
//! counterexample for `p > 2`.
//!
//! Every campaign is a deterministic function of its parameters and seed:
//! trial `k` draws from its own generator seeded with `seed + k`, so serial
//! and parallel runs yield identical reports.

mod campaigns;
mod classical;
mod counterexample;
mod identities;
mod oracles;
mod ssa;

pub use campaigns::{midpoint_gap, midpoint_probe, ssa_campaign, verify_bks, verify_theorem2, verify_theorem3};
pub use classical::{classical_gap, classical_oracle, diagonal_embedding, ClassicalSides, NonnegTensor};
pub use counterexample::{
    counterexample_p_gt_2, expectation, limit_value, midpoint_margin, operator_convexity_witness, projector_weighting,
    small_t_expansion, unit_norm_defect, ConvexityWitness, ExpansionReport, OperatorConvexityWitness, DEFAULT_ATTEMPTS,
    LAMBDA_GRID, TOL_GAP, T_GRID,
};
pub use identities::{
    block_diag_reduction, dual_witness_theorem2, group_average_residual, identity_suite, verify_identity_3_1,
    verify_mpm_spectra, verify_sahi, DualWitness, IdentityCheck, IdentityTolerances, MpmReport,
};
pub use oracles::{oracle_suite, CLASSICAL_TOL, ORACLE_TOL};
pub use ssa::{
    richardson, ssa_derivative_campaign, ssa_from_limit, ssa_limit_study, SsaLimit, SsaLimitStudy, DERIVATIVE_TOL,
};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::io::{MatrixJson, VectorJson};
use crate::matcore::{rng_for, TrialRng};

/// Default slack tolerance for contract campaigns.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Shared campaign knobs.
#[derive(Clone, Debug)]
pub struct Campaign {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub threads: usize,
    /// Report but never fail, whatever the regime.
    pub force_exploratory: bool,
}

impl Campaign {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            tol: DEFAULT_TOL,
            threads: 1,
            force_exploratory: false,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn exploratory(mut self, yes: bool) -> Self {
        self.force_exploratory = yes;
        self
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The inequality is known to hold in this regime; violations fail the run.
    Contract,
    /// Recorded only.
    Exploratory,
    /// A construction whose success is the margin itself.
    Constructive,
}

/// Inequalities whose direction depends on `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inequality {
    /// raw value `Φ_p(mid) - ½Φ_p(X) - ½Φ_p(Y)`
    Midpoint,
    /// raw value `rhs - lhs`
    Minkowski2,
    /// raw value `rhs - lhs`
    Minkowski3,
}

/// How a raw value becomes a slack (nonnegative when the expected inequality holds).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlackConvention {
    pub negate: bool,
    pub mode: Mode,
}

impl SlackConvention {
    pub fn apply(&self, raw: f64) -> f64 {
        if self.negate {
            -raw
        } else {
            raw
        }
    }
}

/// The one table of slack signs and modes per regime.
pub fn slack_convention(inequality: Inequality, p: f64) -> SlackConvention {
    use Inequality::*;
    use Mode::*;
    let (negate, mode) = match inequality {
        Midpoint if p <= 1.0 => (false, Contract),
        Midpoint if p == 2.0 => (true, Contract),
        Midpoint => (true, Exploratory),
        Minkowski2 if p < 1.0 => (true, Contract),
        Minkowski2 => (false, Contract),
        Minkowski3 if p < 1.0 => (true, Contract),
        Minkowski3 if p == 1.0 || p == 2.0 => (false, Contract),
        Minkowski3 => (false, Exploratory),
    };
    SlackConvention { negate, mode }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedVector {
    pub name: String,
    pub vector: VectorJson,
}

/// Matrices, vectors and scalars that reproduce a reported outcome.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: Option<usize>,
    pub trial_seed: Option<u64>,
    pub matrices: Vec<NamedMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<NamedVector>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, f64>,
}

impl Witness {
    pub fn matrix(mut self, name: &str, m: &CMatrix) -> Self {
        self.matrices.push(NamedMatrix {
            name: name.to_string(),
            matrix: MatrixJson::from_matrix(m),
        });
        self
    }

    pub fn vector(mut self, name: &str, v: &[num_complex::Complex64]) -> Self {
        self.vectors.push(NamedVector {
            name: name.to_string(),
            vector: VectorJson::from_slice(v),
        });
        self
    }

    pub fn scalar(mut self, name: &str, x: f64) -> Self {
        self.scalars.insert(name.to_string(), x);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSlack {
    pub trial: usize,
    pub seed: u64,
    pub slack: f64,
}

/// Outcome of one campaign. `violations` counts trials with `slack < -tol_report`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub name: String,
    pub mode: Mode,
    pub trials: usize,
    pub worst_slack: f64,
    pub mean_slack: f64,
    pub violations: usize,
    pub tol_report: f64,
    pub seed: u64,
    /// `None` for checks without an exponent.
    pub p: Option<f64>,
    pub dims: Vec<usize>,
    pub witness: Option<Witness>,
    pub slacks: Vec<TrialSlack>,
}

impl ProbeReport {
    /// Contract runs pass iff nothing was violated; other modes always pass.
    pub fn passed(&self) -> bool {
        self.mode != Mode::Contract || self.violations == 0
    }

    pub(crate) fn from_slacks(
        name: &str,
        mode: Mode,
        campaign: &Campaign,
        tol: f64,
        p: impl Into<Option<f64>>,
        dims: Vec<usize>,
        slacks: Vec<f64>,
    ) -> Self {
        let trials = slacks.len();
        let worst_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
        let mean_slack = slacks.iter().sum::<f64>() / trials.max(1) as f64;
        let violations = slacks.iter().filter(|&&s| s < -tol || s.is_nan()).count();
        let mode = if campaign.force_exploratory && mode == Mode::Contract {
            Mode::Exploratory
        } else {
            mode
        };
        Self {
            name: name.to_string(),
            mode,
            trials,
            worst_slack,
            mean_slack,
            violations,
            tol_report: tol,
            seed: campaign.seed,
            p: p.into(),
            dims,
            witness: None,
            slacks: slacks
                .into_iter()
                .enumerate()
                .map(|(trial, slack)| TrialSlack {
                    trial,
                    seed: campaign.trial_seed(trial),
                    slack,
                })
                .collect(),
        }
    }

    fn worst_trial(&self) -> Option<usize> {
        self.slacks
            .iter()
            .min_by(|a, b| a.slack.total_cmp(&b.slack))
            .map(|t| t.trial)
    }
}

/// Evaluates `trials` independent trials, in parallel when `threads > 1`.
/// Results are returned in trial order regardless of scheduling.
pub(crate) fn run_trials<T, F>(campaign: &Campaign, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut TrialRng) -> Result<T> + Sync,
{
    if campaign.trials == 0 {
        return Err(Error::InvalidArgument("a campaign needs at least one trial".into()));
    }
    let one = |k: usize| f(k, &mut rng_for(campaign.trial_seed(k)));
    if campaign.threads <= 1 {
        return (0..campaign.trials).map(one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(campaign.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| (0..campaign.trials).into_par_iter().map(one).collect())
}

/// Draw/evaluate campaign with a witness for the worst trial when anything is
/// violated. Inputs of that trial are re-drawn from its seed.
pub(crate) fn run_campaign<I, D, E, W>(
    name: &str,
    campaign: &Campaign,
    convention: SlackConvention,
    tol: f64,
    p: f64,
    dims: Vec<usize>,
    draw: D,
    eval: E,
    witness: W,
) -> Result<ProbeReport>
where
    D: Fn(&mut TrialRng) -> Result<I> + Sync,
    E: Fn(&I) -> Result<f64> + Sync,
    W: Fn(&I) -> Witness,
{
    let slacks = run_trials(campaign, |_, rng| {
        let input = draw(rng)?;
        Ok(convention.apply(eval(&input)?))
    })?;
    let mut report = ProbeReport::from_slacks(name, convention.mode, campaign, tol, p, dims, slacks);
    if report.violations > 0 {
        if let Some(k) = report.worst_trial() {
            let seed = campaign.trial_seed(k);
            let input = draw(&mut rng_for(seed))?;
            let mut w = witness(&input);
            w.trial = Some(k);
            w.trial_seed = Some(seed);
            report.witness = Some(w.scalar("slack", report.slacks[k].slack));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_table() {
        let c = slack_convention(Inequality::Midpoint, 0.5);
        assert_eq!((c.negate, c.mode), (false, Mode::Contract));
        let c = slack_convention(Inequality::Midpoint, 2.0);
        assert_eq!((c.negate, c.mode), (true, Mode::Contract));
        assert_eq!(slack_convention(Inequality::Midpoint, 1.5).mode, Mode::Exploratory);
        assert!(slack_convention(Inequality::Midpoint, 1.5).negate);
        assert_eq!(slack_convention(Inequality::Midpoint, 3.0).mode, Mode::Exploratory);
        assert!(slack_convention(Inequality::Minkowski2, 0.5).negate);
        assert!(!slack_convention(Inequality::Minkowski2, 5.0).negate);
        assert_eq!(slack_convention(Inequality::Minkowski2, 5.0).mode, Mode::Contract);
        assert_eq!(slack_convention(Inequality::Minkowski3, 1.5).mode, Mode::Exploratory);
        assert_eq!(slack_convention(Inequality::Minkowski3, 2.0).mode, Mode::Contract);
        assert!(slack_convention(Inequality::Minkowski3, 0.9).negate);
    }

    #[test]
    fn report_counts_violations() {
        let c = Campaign::new(3, 10);
        let r = ProbeReport::from_slacks("t", Mode::Contract, &c, 1e-9, 1.0, vec![2], vec![0.5, -1e-3, -1e-12]);
        assert_eq!(r.violations, 1);
        assert_eq!(r.worst_slack, -1e-3);
        assert_eq!(r.slacks[2].seed, 12);
        assert!(!r.passed());
        let e = ProbeReport::from_slacks(
            "t",
            Mode::Contract,
            &c.clone().exploratory(true),
            1e-9,
            1.0,
            vec![2],
            vec![-1.0],
        );
        assert!(e.passed());
    }

    #[test]
    fn zero_trials_rejected() {
        let c = Campaign::new(0, 1);
        assert!(run_trials(&c, |_, _| Ok(0.0)).is_err());
    }
}
