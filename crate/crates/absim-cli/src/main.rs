//! `absim` command line: evaluate the closed forms, run the dynamic
//! scenarios, check the triggered null configuration, and drive sweeps and
//! convergence studies. Reports are JSON, series and tables are CSV, and
//! identical inputs produce byte-identical report files.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use absim::config::{load_config, ExperimentKind, SetupDocument, SimulationConfig};
use absim::constants::Constants;
use absim::error::Error as AbsimError;
use absim::scenario::{
    self, triggered_null_scenario, ScenarioOutcome,
};
use absim::setup::Setup;

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "absim",
    about = "Aharonov-Bohm effects from local field action on the source: \
             closed forms, dynamic two-branch simulations, and consistency checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON configuration document.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports and series.
    #[arg(long, default_value = "./out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form phase/shift/flux relations and their
    /// consistency residual.
    Analytic(CommonArgs),
    /// Run the dynamic two-branch scenario and compare against the closed
    /// forms; writes report.json and series.csv.
    Simulate(CommonArgs),
    /// Evaluate the triggered-charges configuration: per-particle fields
    /// and the predicted phase under the local-field corollary.
    NullCheck(CommonArgs),
    /// Re-run the scenario across values of one setup/config parameter.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to vary: sigma0, Q, M, v, r, or T.
        #[arg(long)]
        param: String,
        /// Comma-separated list of values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Step- and grid-refinement study of the propagator.
    Convergence {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated grid point counts (powers of two).
        #[arg(long, value_delimiter = ',')]
        grids: Vec<usize>,
        /// Comma-separated time steps.
        #[arg(long, value_delimiter = ',')]
        dts: Vec<f64>,
    },
}

/// Provenance record stored alongside each simulate run. `wall_time` varies
/// between runs, which is why this lives in its own file and not in
/// report.json.
#[derive(Serialize)]
struct RunRecord<'a, R: Serialize> {
    schema_version: &'a str,
    command: String,
    config_digest: String,
    report: &'a R,
    wall_time: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<AbsimError>()
                .map(|e| if e.is_config_error() { 2 } else { 3 })
                .unwrap_or(2);
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Analytic(common) => cmd_analytic(&common),
        Command::Simulate(common) => cmd_simulate(&common),
        Command::NullCheck(common) => cmd_null_check(&common),
        Command::Sweep { common, param, values } => cmd_sweep(&common, &param, &values),
        Command::Convergence { common, grids, dts } => cmd_convergence(&common, &grids, &dts),
    }
}

fn read_config(path: &Path) -> anyhow::Result<(SimulationConfig, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| AbsimError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let cfg = load_config(&text)?;
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let digest = hex::encode(Sha256::digest(cfg.canonical_json().as_bytes()));
    Ok((cfg, digest))
}

fn ensure_out(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_analytic(common: &CommonArgs) -> anyhow::Result<()> {
    let (cfg, _) = read_config(&common.config)?;
    let setup = match (&cfg.setup, cfg.experiment) {
        (SetupDocument::Electric(s), ExperimentKind::Electric) => Setup::Electric(*s),
        (SetupDocument::Magnetic(s), ExperimentKind::Magnetic) => Setup::Magnetic(*s),
        _ => anyhow::bail!(AbsimError::Domain(
            "analytic needs an electric or magnetic config".into()
        )),
    };
    let report = absim::analytic::consistency_report(&setup, &Constants::natural())?;
    let json = output::to_json(&report)?;
    print!("{json}");
    ensure_out(&common.out)?;
    fs::write(common.out.join("consistency.json"), &json)?;
    Ok(())
}

fn run_scenario(cfg: &SimulationConfig) -> anyhow::Result<ScenarioOutcome> {
    Ok(match cfg.experiment {
        ExperimentKind::Electric => scenario::electric_scenario(cfg)?,
        ExperimentKind::Magnetic => scenario::magnetic_scenario(cfg)?,
        ExperimentKind::NullCheck => anyhow::bail!(AbsimError::Domain(
            "simulate needs an electric or magnetic config; use null-check instead".into()
        )),
    })
}

fn cmd_simulate(common: &CommonArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let (cfg, digest) = read_config(&common.config)?;
    let mut outcome = run_scenario(&cfg)?;
    outcome.report.series_path = "series.csv".into();

    ensure_out(&common.out)?;
    let report_json = output::to_json(&outcome.report)?;
    fs::write(common.out.join("report.json"), &report_json)?;
    fs::write(common.out.join("series.csv"), output::series_to_csv(&outcome.series))?;

    let record = RunRecord {
        schema_version: SCHEMA_VERSION,
        command: format!("simulate --config {}", common.config.display()),
        config_digest: digest,
        report: &outcome.report,
        wall_time: started.elapsed().as_secs_f64(),
    };
    fs::write(common.out.join("run.json"), output::to_json(&record)?)?;

    print!("{report_json}");
    Ok(())
}

fn cmd_null_check(common: &CommonArgs) -> anyhow::Result<()> {
    let (cfg, _) = read_config(&common.config)?;
    let setup = match (&cfg.setup, cfg.experiment) {
        (SetupDocument::NullCheck(s), ExperimentKind::NullCheck) => *s,
        _ => anyhow::bail!(AbsimError::Domain(
            "null-check needs a null_check config".into()
        )),
    };
    let report = triggered_null_scenario(setup.r, setup.q, &Constants::natural())?;
    let json = output::to_json(&report)?;
    print!("{json}");
    ensure_out(&common.out)?;
    fs::write(common.out.join("null_check.json"), &json)?;
    Ok(())
}

/// Apply one swept value to a copy of the config.
fn apply_param(cfg: &SimulationConfig, param: &str, value: f64) -> anyhow::Result<SimulationConfig> {
    let mut out = cfg.clone();
    match (param, &mut out.setup) {
        ("sigma0", _) => out.sigma0 = value,
        ("Q", SetupDocument::Electric(s)) => s.q = value,
        ("M", SetupDocument::Electric(s)) => s.m = value,
        ("v", SetupDocument::Electric(s)) => s.v = value,
        ("r", SetupDocument::Electric(s)) => s.r = value,
        ("T", SetupDocument::Electric(s)) => s.t_dwell = value,
        ("Q", SetupDocument::Magnetic(s)) => s.q = value,
        ("M", SetupDocument::Magnetic(s)) => s.m = value,
        ("v", SetupDocument::Magnetic(s)) => s.v = value,
        ("r", SetupDocument::Magnetic(s)) => s.r = value,
        _ => anyhow::bail!(AbsimError::Domain(format!(
            "unsupported sweep parameter `{param}` for this experiment"
        ))),
    }
    out.validate()?;
    Ok(out)
}

fn cmd_sweep(common: &CommonArgs, param: &str, values: &[f64]) -> anyhow::Result<()> {
    if values.is_empty() {
        anyhow::bail!(AbsimError::Domain("sweep needs a non-empty --values list".into()));
    }
    let (cfg, _) = read_config(&common.config)?;

    let mut csv = String::new();
    csv.push_str(&format!(
        "{param},phi_ab,simulated_phase,visibility_sim,visibility_model,phase_error\n"
    ));
    for &value in values {
        let point_cfg = apply_param(&cfg, param, value)?;
        let outcome = run_scenario(&point_cfg)?;
        let rep = &outcome.report;
        let model = absim::branch::gaussian_visibility_model(
            rep.analytic.delta_x,
            0.0,
            point_cfg.sigma0,
        );
        let row = [
            value,
            rep.analytic.phi_ab,
            rep.simulated_phase,
            rep.final_visibility,
            model,
            rep.phase_error,
        ];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }

    ensure_out(&common.out)?;
    fs::write(common.out.join("sweep.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

fn cmd_convergence(common: &CommonArgs, grids: &[usize], dts: &[f64]) -> anyhow::Result<()> {
    if grids.is_empty() || dts.is_empty() {
        anyhow::bail!(AbsimError::Domain(
            "convergence needs non-empty --grids and --dts lists".into()
        ));
    }
    let (cfg, _) = read_config(&common.config)?;
    let points = scenario::convergence_study(&cfg, grids, dts)?;

    let mut csv = String::from("points,dt,phase_error,norm_drift\n");
    for p in &points {
        csv.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e}\n",
            p.points, p.dt, p.phase_error, p.norm_drift
        ));
    }
    ensure_out(&common.out)?;
    fs::write(common.out.join("convergence.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}
