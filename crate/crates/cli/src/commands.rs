//! Subcommand implementations.

use chrono::Utc;
use gl_kramers::instanton::InstantonDescription;
use gl_kramers::rates::{kramers_rate, prefactor_corrected, RateBreakdown};
use gl_kramers::simulator::{run_mfpt, Passage, SimConfig, DEFAULT_DT, DEFAULT_MODES};
use gl_kramers::spectrum::{hessian_spectrum, uniform_spectrum, StateKind, DEFAULT_HESSIAN_MODES};
use gl_kramers::verify::{run_checks, ScalingFunctions, VerifyOptions};
use gl_kramers::{field::DEFAULT_GRID_POINTS, SystemParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{usage, Resolved};
use crate::output::{num, rate_row, ManifestInput, Outputs, RATE_HEADER};

/// Default noise intensities of `sweep`.
pub const DEFAULT_SWEEP_EPS: [f64; 3] = [1e-4, 1e-3, 1e-2];
pub const DEFAULT_TMAX: f64 = 1e4;
pub const DEFAULT_NTRAJ: usize = 500;

/// Library parameter errors are usage errors; everything else is a runtime failure.
fn lift(err: gl_kramers::Error) -> anyhow::Error {
    match err {
        gl_kramers::Error::InvalidParameter { .. } => usage(err.to_string()),
        other => other.into(),
    }
}

fn manifest<P: Serialize>(
    outputs: &Outputs,
    command: &str,
    params: &P,
    seed: Option<u64>,
    started: chrono::DateTime<Utc>,
) -> anyhow::Result<()> {
    outputs.write_manifest(ManifestInput { command, params, seed, started })
}

fn rate_table(rows: &[RateBreakdown]) -> String {
    let mut text = String::from(RATE_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&rate_row(row));
        text.push('\n');
    }
    text
}

pub fn rate(resolved: &Resolved) -> anyhow::Result<()> {
    let started = Utc::now();
    let bc = resolved.require_bc()?;
    let length = resolved.require_length()?;
    if resolved.eps.is_empty() {
        return Err(usage("missing required parameter `eps`"));
    }
    let mut eps = resolved.eps.clone();
    eps.sort_by(f64::total_cmp);
    let rows = eps
        .iter()
        .map(|&e| {
            let params = SystemParams::new(length, e, bc).map_err(lift)?;
            kramers_rate(&params).map_err(lift)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut outputs = Outputs::new(resolved.out.clone());
    outputs.emit_primary(&rate_table(&rows))?;
    manifest(&outputs, "rate", resolved, None, started)
}

/// Rows ordered by `(ε, L)`, computed in parallel.
pub fn sweep_rows(
    bc: gl_kramers::BoundaryCondition,
    lengths: &[f64],
    eps: &[f64],
) -> anyhow::Result<Vec<RateBreakdown>> {
    let mut eps = eps.to_vec();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let mut lengths = lengths.to_vec();
    lengths.sort_by(f64::total_cmp);
    let grid: Vec<(f64, f64)> = eps.iter().flat_map(|&e| lengths.iter().map(move |&l| (e, l))).collect();
    grid.par_iter().map(|&(e, l)| prefactor_corrected(l, e, bc).map_err(lift)).collect()
}

pub fn sweep(resolved: &Resolved) -> anyhow::Result<()> {
    let started = Utc::now();
    let bc = resolved.require_bc()?;
    let lengths = resolved.lengths()?;
    let eps = if resolved.eps.is_empty() { DEFAULT_SWEEP_EPS.to_vec() } else { resolved.eps.clone() };
    let rows = sweep_rows(bc, &lengths, &eps)?;
    let mut outputs = Outputs::new(resolved.out.clone());
    outputs.emit_primary(&rate_table(&rows))?;
    let mut params = resolved.clone();
    params.eps = eps;
    manifest(&outputs, "sweep", &params, None, started)
}

pub fn profile(resolved: &Resolved) -> anyhow::Result<()> {
    let started = Utc::now();
    let bc = resolved.require_bc()?;
    let length = resolved.require_length()?;
    let n = resolved.modes.unwrap_or(DEFAULT_GRID_POINTS);
    let instanton = InstantonDescription::new(length, bc).map_err(lift)?;
    let field = instanton.profile(n).map_err(lift)?;
    let mut text = String::from("x,phi\n");
    for (x, phi) in field.grid().iter().zip(field.values()) {
        text.push_str(&format!("{},{}\n", num(*x), num(*phi)));
    }
    let mut outputs = Outputs::new(resolved.out.clone());
    outputs.emit_primary(&text)?;
    manifest(&outputs, "profile", resolved, None, started)
}

pub fn spectrum(resolved: &Resolved) -> anyhow::Result<()> {
    let started = Utc::now();
    let bc = resolved.require_bc()?;
    let length = resolved.require_length()?;
    let modes = resolved.modes.unwrap_or(DEFAULT_HESSIAN_MODES);
    let spectrum = if bc.is_uniform_saddle(length) {
        uniform_spectrum(length, bc, StateKind::Transition, modes).map_err(lift)?
    } else {
        let field = InstantonDescription::new(length, bc)
            .and_then(|inst| inst.profile(DEFAULT_GRID_POINTS.max(modes)))
            .map_err(lift)?;
        hessian_spectrum(&field, modes, StateKind::Transition).map_err(lift)?
    };
    let mut text = String::from("index,eigenvalue,multiplicity\n");
    for (i, mode) in spectrum.modes.iter().enumerate() {
        text.push_str(&format!("{i},{},{}\n", num(mode.value), mode.multiplicity));
    }
    let mut outputs = Outputs::new(resolved.out.clone());
    outputs.emit_primary(&text)?;
    manifest(&outputs, "spectrum", resolved, None, started)
}

#[derive(Serialize)]
struct MfptSummary<'a> {
    config: &'a SimConfig,
    mean_passage_time: f64,
    std_error: f64,
    n_completed: usize,
    n_censored: usize,
    n_failed: usize,
    rate: f64,
    rate_ci_low: f64,
    rate_ci_high: f64,
    kramers_rate: Option<f64>,
}

pub fn mfpt(resolved: &Resolved) -> anyhow::Result<()> {
    let started = Utc::now();
    let bc = resolved.require_bc()?;
    let length = resolved.require_length()?;
    let eps = resolved.require_single_eps()?;
    let params = SystemParams::new(length, eps, bc).map_err(lift)?;
    let mut config = SimConfig::new(params);
    config.modes = resolved.modes.unwrap_or(DEFAULT_MODES);
    config.dt = resolved.dt.unwrap_or(DEFAULT_DT);
    config.t_max = resolved.tmax.unwrap_or(DEFAULT_TMAX);
    config.n_traj = resolved.ntraj.unwrap_or(DEFAULT_NTRAJ);
    config.seed = resolved.seed.unwrap_or(0);
    config.validate().map_err(lift)?;

    let run = run_mfpt(&config).map_err(lift)?;
    let mut table = String::from("trajectory,status,passage_time\n");
    for record in &run.records {
        let (status, time) = match &record.outcome {
            Ok(Passage::Crossed { time }) => ("crossed", num(*time)),
            Ok(Passage::Censored) => ("censored", String::new()),
            Err(err) => {
                eprintln!("warning: {err}");
                ("failed", String::new())
            }
        };
        table.push_str(&format!("{},{status},{time}\n", record.trajectory));
    }
    let e = run.estimate;
    let summary = MfptSummary {
        config: &config,
        mean_passage_time: e.mean_passage_time,
        std_error: e.std_error,
        n_completed: e.n_completed,
        n_censored: e.n_censored,
        n_failed: e.n_failed,
        rate: e.rate,
        rate_ci_low: e.rate_ci.0,
        rate_ci_high: e.rate_ci.1,
        kramers_rate: kramers_rate(&params).ok().map(|b| b.rate),
    };
    let summary_json = serde_json::to_string_pretty(&summary)? + "\n";

    let mut outputs = Outputs::new(resolved.out.clone());
    if resolved.out.is_some() {
        outputs.emit_primary(&table)?;
        outputs.emit_companion("summary.json", &summary_json)?;
    } else {
        print!("{summary_json}");
    }
    let mut recorded = resolved.clone();
    recorded.modes = Some(config.modes);
    recorded.dt = Some(config.dt);
    recorded.tmax = Some(config.t_max);
    recorded.ntraj = Some(config.n_traj);
    recorded.seed = Some(config.seed);
    manifest(&outputs, "mfpt", &recorded, Some(config.seed), started)
}

/// Returns whether every check passed.
pub fn verify(resolved: &Resolved) -> anyhow::Result<bool> {
    let report = run_checks(&ScalingFunctions::default(), VerifyOptions { quick: resolved.quick });
    print!("{report}");
    let failures = report.failures();
    if failures.is_empty() {
        println!("all {} checks passed", report.checks.len());
    } else {
        let names: Vec<&str> = failures.iter().map(|c| c.name).collect();
        eprintln!("failed checks: {}", names.join(", "));
    }
    Ok(report.all_passed())
}
