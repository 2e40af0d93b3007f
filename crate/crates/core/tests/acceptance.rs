//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use minktrace::functionals::PExponent;
use minktrace::probes::{
    counterexample_p_gt_2, identity_suite, midpoint_probe, oracle_suite, ssa_campaign, ssa_derivative_campaign,
    verify_bks, verify_theorem2, verify_theorem3, Campaign, IdentityTolerances, Mode, ProbeReport, DEFAULT_ATTEMPTS,
};
use minktrace::tensor::TensorSpace;
use minktrace::Result;

const SEED: u64 = 20_240_601;
const SLACK_TOL: f64 = 1e-9;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn pe(p: f64) -> PExponent {
    PExponent::new(p).unwrap()
}

fn space(dims: &[usize]) -> TensorSpace {
    TensorSpace::new(dims).unwrap()
}

fn campaign(trials: usize) -> Campaign {
    Campaign::new(trials, SEED).with_tol(SLACK_TOL)
}

/// Every report is a contract run with no violations.
fn all_clean(reports: &[ProbeReport]) -> Outcome {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| r.mode != Mode::Contract || r.violations > 0)
        .map(|r| {
            format!(
                "{} p={:?} dims={:?}: {} violations, worst {:e}",
                r.name, r.p, r.dims, r.violations, r.worst_slack
            )
        })
        .collect();
    let worst = reports.iter().map(|r| r.worst_slack).fold(f64::INFINITY, f64::min);
    let trials: usize = reports.iter().map(|r| r.trials).sum();
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!(
                "{} campaigns, {trials} trials, 0 violations, worst slack {worst:.3e}",
                reports.len()
            )
        } else {
            bad.join("; ")
        },
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Result<Outcome>) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    match out {
        Ok(mut o) => {
            if elapsed > limit {
                o.passed = false;
            }
            o.detail = format!(
                "{} ({:.2}s, limit {}s)",
                o.detail,
                elapsed.as_secs_f64(),
                limit.as_secs()
            );
            o
        }
        Err(e) => Outcome {
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn midpoint_grid(ps: &[f64]) -> Result<Vec<ProbeReport>> {
    let mut reports = Vec::new();
    for &p in ps {
        for n in [2, 3] {
            for dim in [2, 3, 4] {
                reports.push(midpoint_probe(pe(p), n, dim, &campaign(200))?);
            }
        }
    }
    Ok(reports)
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(30), || {
        Ok(all_clean(&midpoint_grid(&[0.25, 0.5, 0.75, 1.0])?))
    })
}

fn criterion_2() -> Outcome {
    timed(Duration::from_secs(30), || Ok(all_clean(&midpoint_grid(&[2.0])?)))
}

fn criterion_3() -> Outcome {
    timed(Duration::from_secs(60), || {
        let mut parts = Vec::new();
        let mut passed = true;
        for p in [2.5, 3.0, 4.0] {
            let w = counterexample_p_gt_2(p, 2, SEED)?;
            passed &= w.margin > 1e-8;
            parts.push(format!(
                "p={p}: margin {:.3e} (λ={:e}, t={:e})",
                w.margin, w.lambda, w.t
            ));
        }
        Ok(Outcome {
            passed,
            detail: format!("{}; search budget {DEFAULT_ATTEMPTS}", parts.join(", ")),
        })
    })
}

fn criterion_4() -> Outcome {
    timed(Duration::from_secs(120), || {
        let mut reports = Vec::new();
        for p in [1.0, 1.5, 2.0, 5.0, 0.5, 0.9] {
            for dims in [[2, 2], [3, 3]] {
                reports.push(verify_theorem2(&campaign(200), &space(&dims), pe(p))?);
            }
        }
        Ok(all_clean(&reports))
    })
}

fn criterion_5() -> Outcome {
    timed(Duration::from_secs(120), || {
        let reports = [2.0, 0.5, 1.0]
            .iter()
            .map(|&p| verify_theorem3(&campaign(200), &space(&[2, 2, 2]), pe(p)))
            .collect::<Result<Vec<_>>>()?;
        Ok(all_clean(&reports))
    })
}

fn criterion_6() -> Outcome {
    timed(Duration::from_secs(120), || {
        let s = space(&[2, 2, 2]);
        let deficit = ssa_campaign(&campaign(500), &s)?;
        let derivative = ssa_derivative_campaign(&campaign(50), &s, 1e-3)?;
        Ok(all_clean(&[deficit, derivative]))
    })
}

fn criterion_7() -> Outcome {
    timed(Duration::from_secs(120), || {
        let reports = identity_suite(&campaign(100), 3, IdentityTolerances::default())?;
        let worst: Vec<String> = reports
            .iter()
            .map(|r| format!("{} {:.1e}", r.name, -r.worst_slack))
            .collect();
        let mut o = all_clean(&reports);
        o.detail = format!("{}; max residuals: {}", o.detail, worst.join(", "));
        Ok(o)
    })
}

fn criterion_8() -> Outcome {
    timed(Duration::from_secs(120), || {
        let mut reports = Vec::new();
        for p in [1.5, 2.0, 3.0, 5.0] {
            reports.extend(verify_bks(&campaign(200), 4, p)?);
        }
        Ok(all_clean(&reports))
    })
}

fn criterion_9() -> Outcome {
    timed(Duration::from_secs(120), || {
        let mut reports = Vec::new();
        for p in [0.5, 1.0, 1.5, 2.5, 4.0] {
            for dims in [[2, 2, 2], [2, 3, 2]] {
                reports.extend(oracle_suite(&campaign(100), pe(p), dims)?);
            }
        }
        Ok(all_clean(&reports))
    })
}

fn criterion_10() -> Outcome {
    timed(Duration::from_secs(120), || {
        let run = |threads: usize| -> Result<String> {
            let c = campaign(100).with_threads(threads);
            let s3 = space(&[2, 2, 2]);
            let mut reports = vec![
                midpoint_probe(pe(0.5), 3, 3, &c)?,
                midpoint_probe(pe(1.5), 2, 3, &c)?,
                verify_theorem2(&c, &space(&[3, 3]), pe(5.0))?,
                verify_theorem3(&c, &s3, pe(0.5))?,
                ssa_campaign(&c, &s3)?,
                ssa_derivative_campaign(&c, &s3, 1e-3)?,
            ];
            reports.extend(verify_bks(&c, 4, 3.0)?);
            reports.extend(identity_suite(&c, 3, IdentityTolerances::default())?);
            reports.extend(oracle_suite(&c, pe(2.5), [2, 2, 2])?);
            Ok(serde_json::to_string(&reports)?)
        };
        let serial = run(1)?;
        let parallel = run(4)?;
        let again = run(1)?;
        Ok(Outcome {
            passed: serial == parallel && serial == again,
            detail: format!(
                "{} bytes of report JSON; 1 vs 4 threads {}, rerun {}",
                serial.len(),
                if serial == parallel { "identical" } else { "DIFFER" },
                if serial == again { "identical" } else { "DIFFER" },
            ),
        })
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("midpoint concavity, p in {0.25, 0.5, 0.75, 1}", criterion_1),
        ("midpoint convexity, p = 2", criterion_2),
        ("convexity failure construction, p in {2.5, 3, 4}", criterion_3),
        ("two-space inequality, both directions", criterion_4),
        ("three-space inequality, p in {2, 0.5, 1}", criterion_5),
        ("SSA deficit and left derivative at p = 1", criterion_6),
        ("identity suite", criterion_7),
        ("BKS inequalities, dim 4", criterion_8),
        ("diagonal and classical oracles", criterion_9),
        ("determinism across thread counts", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!(
            "acceptance criterion {:>2}: {} - {name}: {}",
            k + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
