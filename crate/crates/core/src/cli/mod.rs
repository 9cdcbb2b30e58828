//! Command-line experiment runner.
//!
//! Every subcommand reads an optional JSON manifest ([`ExperimentConfig`]),
//! applies command-line overrides, validates everything, and writes one
//! comma-separated report to `--out` or stdout.

mod config;
mod output;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

pub use config::{ExperimentConfig, InitialSpec, MapKind, NoiseSpec, CONFIG_SUM_TOL};
pub use output::{num, opt_num, Report};

use crate::analysis::{
    binary_fixpoint_closed_form, classify_regime, critical_f0_binary, critical_f0_binary_iterative,
    critical_interval_white_noise, find_fixpoint, jacobian, max_eigenvalue_modulus, regime_histogram,
    resource_curve, RegimeCriteria, CRITICAL_BINARY_BRACKET, CRITICAL_BINARY_TOL, CRITICAL_WHITE_TOL,
    DEFAULT_REGIME_WERNER, DEFAULT_RESOURCE_ROUNDS, FIXPOINT_MAX_ITER, FIXPOINT_TOL,
};
use crate::bell_algebra::TransitionTable;
use crate::monte_carlo::{mc_run, DEFAULT_ENSEMBLE, GENERATOR_NAME};
use crate::recurrence::{
    aggregate_step, binary_step, cell_names, conditional_fidelity, flagged_step, iterate, qpa_step_ideal,
    BinaryNoise, Coefficients, NoiseModel, QuadraticMap, DEFAULT_MAX_ROUNDS, DEFAULT_TOL,
};
use crate::{Error, Result};

pub const DEFAULT_MC_ROUNDS: usize = 30;
pub const DEFAULT_SAMPLES_PER_POINT: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "flagged-epp", version, about = "Noisy entanglement purification with error-flag bookkeeping")]
pub struct Cli {
    /// JSON experiment manifest.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rounds: Option<usize>,
    /// Monte Carlo ensemble size.
    #[arg(long, global = true)]
    pub ensemble: Option<usize>,
    /// Leave out the generation-time header line so reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// All 256 transition-table entries.
    TableDump,
    /// Recompute every table entry with the state-vector oracle.
    TableVerify,
    /// Per-round trajectory of the flagged map.
    Iterate,
    /// Iterate one map to its fixpoint and report the Jacobian spectral radius there.
    Fixpoint,
    /// Critical f0 of the binary channel, by spectral radius and by iteration.
    CriticalBinary,
    /// Purification and security thresholds for one-qubit white noise.
    CriticalWhite,
    /// Regime frequencies over random noise tables.
    Regimes,
    /// Pair-level Monte Carlo run.
    Montecarlo,
    /// Resources needed per security-parameter target.
    Resources,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::TableDump => "table-dump",
            Command::TableVerify => "table-verify",
            Command::Iterate => "iterate",
            Command::Fixpoint => "fixpoint",
            Command::CriticalBinary => "critical-binary",
            Command::CriticalWhite => "critical-white",
            Command::Regimes => "regimes",
            Command::Montecarlo => "montecarlo",
            Command::Resources => "resources",
        }
    }
}

/// Config file plus command-line overrides, validated.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut c = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        c.seed = cli.seed;
    }
    if cli.rounds.is_some() {
        c.rounds = cli.rounds;
    }
    if cli.ensemble.is_some() {
        c.ensemble = cli.ensemble;
    }
    if let Some(p) = &cli.out {
        c.out = Some(p.display().to_string());
    }
    c.validate()?;
    Ok(c)
}

/// Runs the subcommand and writes its report. Errors found after the report
/// is complete (unreachable targets) are returned once it has been written.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    let mut report = match cli.command {
        Command::TableVerify => {
            let table = TransitionTable::shared();
            if !table.matches_noiseless_rules() {
                return Err(Error::OracleInconsistent("noiseless sub-table".into()));
            }
            let n = table.verify_against_oracle()?;
            println!("{n}/256 entries verified");
            return Ok(());
        }
        Command::TableDump => table_dump(),
        Command::Iterate => run_iterate(&cfg)?,
        Command::Fixpoint => run_fixpoint(&cfg)?,
        Command::CriticalBinary => run_critical_binary(&cfg)?,
        Command::CriticalWhite => run_critical_white(&cfg)?,
        Command::Regimes => run_regimes(&cfg)?,
        Command::Montecarlo => run_montecarlo(&cfg)?,
        Command::Resources => run_resources(&cfg)?,
    };
    let mut header = Report::new(Vec::<String>::new());
    header.meta("program", format!("flagged-epp {}", env!("CARGO_PKG_VERSION")));
    header.meta("command", cli.command.name());
    header.meta("config", serde_json::to_string(&cfg)?);
    report.prepend_meta(header);
    if !cli.no_timestamp {
        let t = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        report.timestamp(t);
    }
    let out = cfg.out.as_deref().map(std::path::Path::new);
    report.emit(out)?;
    report.deferred_error.take().map_or(Ok(()), Err)
}

/// A report plus an error to raise after it has been written.
pub struct Output {
    report: Report,
    deferred_error: Option<Error>,
}

impl From<Report> for Output {
    fn from(report: Report) -> Output {
        Output {
            report,
            deferred_error: None,
        }
    }
}

impl Output {
    fn prepend_meta(&mut self, header: Report) {
        self.report.prepend_meta(header);
    }

    fn timestamp(&mut self, t: u64) {
        self.report.timestamp(t);
    }

    fn emit(&self, path: Option<&std::path::Path>) -> std::io::Result<()> {
        self.report.emit(path)
    }
}

fn noise_of(cfg: &ExperimentConfig) -> Result<NoiseModel> {
    cfg.noise.as_ref().map_or(Ok(NoiseModel::noiseless()), |n| n.build("noise"))
}

fn initial_or(cfg: &ExperimentConfig, werner: f64) -> InitialSpec {
    cfg.initial.clone().unwrap_or(InitialSpec::Werner(werner))
}

fn noise_meta(r: &mut Report, n: &NoiseModel) {
    let parts: Vec<String> = NoiseModel::entry_names()
        .iter()
        .zip(n.entries())
        .map(|(k, v)| format!("{k}={}", num(v)))
        .collect();
    r.meta("noise", parts.join(" "));
}

fn table_dump() -> Output {
    let table = TransitionTable::shared();
    let mut r = Report::new(["s1", "s2", "mu", "nu", "kept", "result"]);
    r.meta("rotation_convention", format!("{:?}", table.convention()));
    for t in table.iter() {
        r.row(vec![
            t.source.tag().into(),
            t.target.tag().into(),
            t.mu.name().into(),
            t.nu.name().into(),
            u8::from(t.kept()).to_string(),
            t.result.map(|b| b.tag().to_string()).unwrap_or_default(),
        ]);
    }
    r.into()
}

fn run_iterate(cfg: &ExperimentConfig) -> Result<Output> {
    let initial = initial_or(cfg, 0.7).build("initial")?;
    let noise = noise_of(cfg)?;
    let t = iterate(
        &initial,
        &noise,
        cfg.rounds.unwrap_or(DEFAULT_MAX_ROUNDS),
        cfg.tol.unwrap_or(DEFAULT_TOL),
    )?;
    let mut cols: Vec<String> = ["round", "A", "B", "C", "D", "F", "F_cond", "N", "R", "eps"]
        .map(String::from)
        .to_vec();
    cols.extend(cell_names());
    let mut r = Report::new(cols);
    noise_meta(&mut r, &noise);
    r.meta("converged", t.converged);
    for rec in &t.records {
        let mut row = vec![rec.round.to_string()];
        row.extend(rec.blend.coeffs().iter().map(|x| num(*x)));
        row.extend([
            num(rec.fidelity),
            num(rec.conditional_fidelity),
            num(rec.survival),
            num(rec.resources),
            num(rec.epsilon),
        ]);
        row.extend(rec.state.coeffs().iter().map(|x| num(*x)));
        r.row(row);
    }
    Ok(r.into())
}

#[allow(clippy::too_many_arguments)]
fn fixpoint_row(
    r: &mut Report,
    converged: bool,
    iterations: usize,
    last_change: f64,
    fidelity: f64,
    f_cond: f64,
    radius: f64,
    coeffs: &[f64],
) {
    let mut row = vec![
        u8::from(converged).to_string(),
        iterations.to_string(),
        num(last_change),
        num(fidelity),
        num(f_cond),
        num(radius),
    ];
    row.extend(coeffs.iter().map(|x| num(*x)));
    r.row(row);
}

fn run_fixpoint(cfg: &ExperimentConfig) -> Result<Output> {
    let kind = cfg.map.unwrap_or_default();
    let tol = cfg.tol.unwrap_or(FIXPOINT_TOL);
    let max_iter = cfg.rounds.unwrap_or(FIXPOINT_MAX_ITER);
    let lead = ["converged", "iterations", "last_change", "F", "F_cond", "max_abs_eigenvalue"].map(String::from);
    let with = |names: Vec<String>| {
        let mut c = lead.to_vec();
        c.extend(names);
        c
    };
    let abcd = || ["A", "B", "C", "D"].map(String::from).to_vec();
    let mut r;
    match kind {
        MapKind::Ideal => {
            let s = initial_or(cfg, 0.7).ideal("initial")?;
            let f = find_fixpoint(qpa_step_ideal, s, tol, max_iter)?;
            let rho = max_eigenvalue_modulus(&jacobian(&QuadraticMap::ideal(), f.state.as_slice()))?;
            r = Report::new(with(abcd()));
            let fid = f.state.fidelity();
            fixpoint_row(&mut r, f.converged, f.iterations, f.last_change, fid, fid, rho, f.state.as_slice());
        }
        MapKind::Aggregate => {
            let s = initial_or(cfg, 0.7).ideal("initial")?;
            let noise = noise_of(cfg)?;
            let f = find_fixpoint(|x| aggregate_step(x, &noise), s, tol, max_iter)?;
            let map = QuadraticMap::flagged(&noise, TransitionTable::shared()).aggregate_reduction();
            let rho = max_eigenvalue_modulus(&jacobian(&map, f.state.as_slice()))?;
            r = Report::new(with(abcd()));
            noise_meta(&mut r, &noise);
            let fid = f.state.fidelity();
            fixpoint_row(&mut r, f.converged, f.iterations, f.last_change, fid, f64::NAN, rho, f.state.as_slice());
        }
        MapKind::Binary => {
            let s = cfg
                .initial
                .clone()
                .unwrap_or(InitialSpec::Binary([0.8, 0.2]))
                .binary("initial")?;
            let noise = match &cfg.noise {
                Some(n) => n.binary("noise")?,
                None => BinaryNoise::uncorrelated(0.9)?,
            };
            let f = find_fixpoint(|x| binary_step(x, &noise), s, tol, max_iter)?;
            let rho = max_eigenvalue_modulus(&jacobian(&QuadraticMap::binary(&noise), f.state.as_slice()))?;
            r = Report::new(with(["A0", "A1", "B0", "B1"].map(String::from).to_vec()));
            noise_meta(&mut r, &noise.to_noise_model());
            let uncorrelated = (noise.f00 * noise.f11 - noise.f01 * noise.f10).abs() < 1e-15;
            if uncorrelated {
                let f0 = noise.f00 + noise.f01;
                if let Ok(cf) = binary_fixpoint_closed_form(f0) {
                    r.meta("closed_form_A0", num(cf.coeffs()[0]));
                }
            }
            fixpoint_row(
                &mut r,
                f.converged,
                f.iterations,
                f.last_change,
                f.state.fidelity(),
                f.state.conditional_fidelity(),
                rho,
                f.state.as_slice(),
            );
        }
        MapKind::Flagged => {
            let s = initial_or(cfg, 0.7).build("initial")?;
            let noise = noise_of(cfg)?;
            let f = find_fixpoint(|x| flagged_step(x, &noise), s, tol, max_iter)?;
            let map = QuadraticMap::flagged(&noise, TransitionTable::shared());
            let rho = max_eigenvalue_modulus(&jacobian(&map, f.state.as_slice()))?;
            r = Report::new(with(cell_names()));
            noise_meta(&mut r, &noise);
            fixpoint_row(
                &mut r,
                f.converged,
                f.iterations,
                f.last_change,
                f.state.fidelity(),
                conditional_fidelity(&f.state),
                rho,
                f.state.as_slice(),
            );
        }
    }
    r.meta("map", serde_json::to_string(&kind)?);
    Ok(r.into())
}

fn run_critical_binary(cfg: &ExperimentConfig) -> Result<Output> {
    let bracket = cfg.bracket.map_or(CRITICAL_BINARY_BRACKET, |[a, b]| (a, b));
    let tol = cfg.critical_tol.unwrap_or(CRITICAL_BINARY_TOL);
    let spectral = critical_f0_binary(bracket, tol)?;
    let iterative = critical_f0_binary_iterative(bracket, tol)?;
    let mut r = Report::new(["parameter", "method", "value", "tolerance"]);
    r.meta("bracket", format!("{} {}", num(bracket.0), num(bracket.1)));
    r.row(vec!["f0_crit".into(), "spectral_radius_bisection".into(), num(spectral), num(tol)]);
    r.row(vec!["f0_crit".into(), "iteration_bisection".into(), num(iterative), num(tol)]);
    Ok(r.into())
}

fn run_critical_white(cfg: &ExperimentConfig) -> Result<Output> {
    let tol = cfg.critical_tol.unwrap_or(CRITICAL_WHITE_TOL);
    let iv = critical_interval_white_noise(tol)?;
    let mut r = Report::new(["parameter", "method", "value", "tolerance"]);
    r.row(vec!["f0_crit_lower".into(), "purification_fixpoint_bisection".into(), num(iv.lower), num(tol)]);
    r.row(vec!["f0_crit_upper".into(), "flagged_spectral_radius_bisection".into(), num(iv.upper), num(tol)]);
    Ok(r.into())
}

fn criteria(cfg: &ExperimentConfig) -> RegimeCriteria {
    let d = RegimeCriteria::default();
    RegimeCriteria {
        max_rounds: cfg.rounds.unwrap_or(d.max_rounds),
        tol: cfg.tol.unwrap_or(d.tol),
        eps_sec: cfg.eps_sec.unwrap_or(d.eps_sec),
        ..d
    }
}

fn default_f00_grid() -> Vec<f64> {
    (0..=20).map(|i| 0.8 + 0.01 * i as f64).collect()
}

fn run_regimes(cfg: &ExperimentConfig) -> Result<Output> {
    let initial = initial_or(cfg, DEFAULT_REGIME_WERNER).build("initial")?;
    let crit = criteria(cfg);
    let seed = cfg.seed.unwrap_or(0);
    let mut r = Report::new(["f00", "frac_high", "frac_intermediate", "frac_security", "samples"]);
    r.meta("seed", seed);
    r.meta("generator", GENERATOR_NAME);
    r.meta("criteria", serde_json::to_string(&crit)?);
    if let Some(noise) = &cfg.noise {
        // A fixed noise model: classify that one instead of sampling.
        let n = noise.build("noise")?;
        let c = classify_regime(&n, &initial, &crit)?;
        noise_meta(&mut r, &n);
        r.meta("label", c.label);
        r.meta("confident", c.confident);
        let one = |l| if c.label == l { "1" } else { "0" }.to_string();
        use crate::analysis::RegimeLabel::*;
        r.row(vec![num(n.f00()), one(HighNoise), one(Intermediate), one(Security), "1".into()]);
        return Ok(r.into());
    }
    let grid = cfg.f00_grid.clone().unwrap_or_else(default_f00_grid);
    let rows = regime_histogram(&grid, cfg.samples_per_point.unwrap_or(DEFAULT_SAMPLES_PER_POINT), seed, &initial, &crit)?;
    let low: usize = rows.iter().map(|h| h.low_confidence).sum();
    r.meta("low_confidence_samples", low);
    for h in rows {
        r.row(vec![
            num(h.f00),
            num(h.frac_high),
            num(h.frac_intermediate),
            num(h.frac_security),
            h.samples.to_string(),
        ]);
    }
    Ok(r.into())
}

fn run_montecarlo(cfg: &ExperimentConfig) -> Result<Output> {
    let initial = initial_or(cfg, 0.7).ideal("initial")?;
    let noise = noise_of(cfg)?;
    let seed = cfg.seed.unwrap_or(0);
    let size = cfg.ensemble.unwrap_or(DEFAULT_ENSEMBLE);
    let stats = mc_run(&initial, &noise, cfg.rounds.unwrap_or(DEFAULT_MC_ROUNDS), size, seed)?;
    let mut cols: Vec<String> = ["round", "pairs_remaining", "kept", "discarded", "dropped_odd", "F_hat", "F_cond_hat"]
        .map(String::from)
        .to_vec();
    cols.extend(cell_names());
    let mut r = Report::new(cols);
    r.meta("seed", seed);
    r.meta("generator", GENERATOR_NAME);
    r.meta("ensemble", size);
    noise_meta(&mut r, &noise);
    for s in &stats {
        let mut row = vec![
            s.round.to_string(),
            s.pairs_remaining.to_string(),
            s.kept.to_string(),
            s.discarded.to_string(),
            s.dropped_odd.to_string(),
            opt_num(s.fidelity_hat),
            opt_num(s.conditional_fidelity_hat),
        ];
        row.extend(s.histogram.iter().map(|c| c.to_string()));
        r.row(row);
    }
    Ok(r.into())
}

fn default_eps_targets() -> Vec<f64> {
    (1..=12).map(|k| 10f64.powi(-k)).collect()
}

fn run_resources(cfg: &ExperimentConfig) -> Result<Output> {
    let initial = initial_or(cfg, 0.85).build("initial")?;
    let noise = noise_of(cfg)?;
    let targets = cfg.eps_targets.clone().unwrap_or_else(default_eps_targets);
    let curve = resource_curve(&noise, &initial, &targets, cfg.rounds.unwrap_or(DEFAULT_RESOURCE_ROUNDS))?;
    let mut r = Report::new(["eps", "N_required", "rounds"]);
    noise_meta(&mut r, &noise);
    match &curve.fit {
        Some(f) => {
            r.meta(
                "fit",
                format!(
                    "slope={} intercept={} r_squared={} points={}",
                    num(f.slope),
                    num(f.intercept),
                    num(f.r_squared),
                    f.points
                ),
            );
        }
        None => {
            r.meta("fit", "none");
        }
    }
    let mut first_unreachable = None;
    for p in &curve.points {
        match p.require() {
            Ok((round, n)) => r.row(vec![num(p.eps_target), num(n), round.to_string()]),
            Err(e) => {
                r.meta("unreachable", num(p.eps_target));
                first_unreachable.get_or_insert(e);
            }
        }
    }
    Ok(Output {
        report: r,
        deferred_error: first_unreachable,
    })
}

/// Machine-readable error line for stderr.
pub fn error_record(e: &Error) -> String {
    let mut v = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::Config { key, .. } = e {
        v["key"] = serde_json::Value::String(key.clone());
    }
    v.to_string()
}

/// Exit status for a failed run: 2 for bad input, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Json(_) => 2,
        _ => 1,
    }
}
