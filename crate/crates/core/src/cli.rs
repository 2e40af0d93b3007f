//! Seeded campaign driver behind the `minktrace` binary.

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};

use crate::error::{Error, Result};
use crate::functionals::PExponent;
use crate::io::{render_output, save_report, CampaignOutput, Format};
use crate::probes::{
    counterexample_p_gt_2, identity_suite, midpoint_probe, oracle_suite, ssa_campaign, ssa_derivative_campaign,
    verify_bks, verify_theorem2, verify_theorem3, Campaign, IdentityTolerances, Mode, ProbeReport, TrialSlack,
    DEFAULT_TOL,
};
use crate::tensor::TensorSpace;

/// Step of the one-sided difference used by the `ssa` command.
pub const SSA_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Midpoint concavity/convexity of Φ_p on random n-tuples
    Probe,
    /// Two-space Minkowski trace inequality
    Verify2,
    /// Three-space Minkowski trace inequality
    Verify3,
    /// SSA deficit and the left derivative at p = 1
    Ssa,
    /// Both BKS inequalities (p > 1)
    Bks,
    /// Constructive convexity failure for p > 2
    Counterexample,
    /// Identity residuals
    Identities,
    /// Diagonal inputs against scalar formulas
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Probe => "probe",
            Command::Verify2 => "verify2",
            Command::Verify3 => "verify3",
            Command::Ssa => "ssa",
            Command::Bks => "bks",
            Command::Counterexample => "counterexample",
            Command::Identities => "identities",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "minktrace",
    version,
    about = "Seeded campaigns for trace inequalities of PSD matrices"
)]
pub struct CampaignConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Exponent (required by probe, verify2, verify3, bks, counterexample, oracle)
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Factor dimensions, e.g. 2,2 or 2,2,2
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Matrix dimension for single-space commands
    #[arg(long)]
    pub dim: Option<usize>,
    /// Tuple length for probe
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Violation threshold on slacks
    #[arg(long, default_value_t = DEFAULT_TOL, allow_negative_numbers = true)]
    pub tol: f64,
    /// Write the report here instead of stdout
    #[arg(long = "out")]
    pub output_path: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Record outcomes without failing the exit status
    #[arg(long)]
    pub exploratory: bool,
}

impl CampaignConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            p: None,
            dims: None,
            dim: None,
            n: 2,
            trials: 100,
            seed: 0,
            tol: DEFAULT_TOL,
            output_path: None,
            format: Format::Json,
            threads: 1,
            exploratory: false,
        }
    }

    /// Errors here are usage errors.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if let Some(p) = self.p {
            if !(p > 0.0 && p.is_finite()) {
                return bad(format!("--p must be a finite number > 0, got {p}"));
            }
        }
        if self.trials == 0 {
            return bad("--trials must be at least 1".into());
        }
        if !(self.tol > 0.0) {
            return bad(format!("--tol must be > 0, got {}", self.tol));
        }
        if self.threads == 0 {
            return bad("--threads must be at least 1".into());
        }
        if self.n == 0 {
            return bad("--n must be at least 1".into());
        }
        if let Some(dims) = &self.dims {
            if dims.is_empty() || dims.contains(&0) {
                return bad("--dims must list positive dimensions".into());
            }
        }
        if self.dim == Some(0) {
            return bad("--dim must be positive".into());
        }
        let needs_p = !matches!(self.command, Command::Ssa | Command::Identities);
        if needs_p && self.p.is_none() {
            return bad(format!("{} needs --p", self.command.name()));
        }
        match self.command {
            Command::Bks if self.p.is_some_and(|p| p <= 1.0) => bad("bks needs --p > 1".into()),
            Command::Counterexample if self.p.is_some_and(|p| p <= 2.0) => bad("counterexample needs --p > 2".into()),
            Command::Verify2 if self.dims.as_ref().is_some_and(|d| d.len() != 2) => {
                bad("verify2 needs --dims with two factors".into())
            }
            Command::Verify3 | Command::Ssa | Command::Oracle if self.dims.as_ref().is_some_and(|d| d.len() != 3) => {
                bad(format!("{} needs --dims with three factors", self.command.name()))
            }
            _ => Ok(()),
        }
    }

    fn campaign(&self) -> Campaign {
        Campaign::new(self.trials, self.seed)
            .with_tol(self.tol)
            .with_threads(self.threads)
            .exploratory(self.exploratory)
    }

    fn exponent(&self) -> Result<PExponent> {
        PExponent::new(self.p.unwrap_or(1.0))
    }

    fn space(&self, default: &[usize]) -> Result<TensorSpace> {
        TensorSpace::new(self.dims.as_deref().unwrap_or(default))
    }

    fn dim_or(&self, default: usize) -> usize {
        self.dim.unwrap_or(default)
    }
}

/// Runs the configured campaign. The timestamp is the only field that is not a
/// function of the configuration.
pub fn execute(config: &CampaignConfig) -> Result<CampaignOutput> {
    config.validate()?;
    let campaign = config.campaign();
    let reports = match config.command {
        Command::Probe => vec![midpoint_probe(
            config.exponent()?,
            config.n,
            config.dim_or(3),
            &campaign,
        )?],
        Command::Verify2 => vec![verify_theorem2(&campaign, &config.space(&[2, 2])?, config.exponent()?)?],
        Command::Verify3 => vec![verify_theorem3(
            &campaign,
            &config.space(&[2, 2, 2])?,
            config.exponent()?,
        )?],
        Command::Ssa => {
            let space = config.space(&[2, 2, 2])?;
            vec![
                ssa_campaign(&campaign, &space)?,
                ssa_derivative_campaign(&campaign, &space, SSA_STEP)?,
            ]
        }
        Command::Bks => verify_bks(&campaign, config.dim_or(4), config.exponent()?.value())?.to_vec(),
        Command::Counterexample => vec![counterexample_report(config)?],
        Command::Identities => identity_suite(&campaign, config.dim_or(3), IdentityTolerances::default())?,
        Command::Oracle => {
            let space = config.space(&[2, 2, 2])?;
            let d = space.dims();
            oracle_suite(&campaign, config.exponent()?, [d[0], d[1], d[2]])?
        }
    };
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    Ok(CampaignOutput {
        command: config.command.name().to_string(),
        timestamp,
        passed: reports.iter().all(ProbeReport::passed),
        reports,
    })
}

fn counterexample_report(config: &CampaignConfig) -> Result<ProbeReport> {
    let p = config.exponent()?.value();
    let dim = config.dim_or(2);
    let w = counterexample_p_gt_2(p, dim, config.seed)?;
    let mut witness = w.to_witness();
    witness.trial = Some(0);
    witness.trial_seed = Some(config.seed);
    Ok(ProbeReport {
        name: "counterexample".into(),
        mode: Mode::Constructive,
        trials: 1,
        worst_slack: w.margin,
        mean_slack: w.margin,
        violations: usize::from(!(w.margin > 0.0)),
        tol_report: 0.0,
        seed: config.seed,
        p: Some(p),
        dims: vec![dim],
        witness: Some(witness),
        slacks: vec![TrialSlack {
            trial: 0,
            seed: config.seed,
            slack: w.margin,
        }],
    })
}

/// `0` when every contract report passed, `1` otherwise.
pub fn exit_status(output: &CampaignOutput) -> i32 {
    if output.passed {
        0
    } else {
        1
    }
}

/// Executes, writes the report to `--out` or stdout, and returns the exit status.
pub fn run(config: &CampaignConfig) -> Result<i32> {
    let output = execute(config)?;
    match &config.output_path {
        Some(path) => save_report(&output, path, config.format)?,
        None => std::io::stdout().write_all(render_output(&output, config.format)?.as_bytes())?,
    }
    Ok(exit_status(&output))
}
