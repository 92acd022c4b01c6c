//! The `qmkdv` command line.
//!
//! Every subcommand writes plot-ready CSV (to `--out`, or to stdout when no
//! file is given) and ends with one summary line `<check>: PASS|FAIL|INFO`.
//! Exit codes: 0 on success, 1 when a check fails, 2 on usage or input
//! errors. A `--config FILE` of `key=value` lines supplies flags of the chosen
//! subcommand; flags given on the command line override it.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use log::info;

use crate::dynamics::{
    gauge_forward, gauge_inverse, mass_derivative, nonlinear_physical, verify_divergence_form,
    EquationCoefficients, RhsMode,
};
use crate::energy::{
    calibrate_as, comparability_check, dyadic_energy_norm, modified_energy_total, EnergyKind,
    ModifiedEnergyParams,
};
use crate::integrator::{
    evolve, gauge_equivalence, parabolic_family, scaling_check, EvolveConfig, Flow,
};
use crate::io::{load_trajectory, save_trajectory, write_monitor_csv};
use crate::random::{random_field, seeded};
use crate::resonance::{audit_triple, exhaustive_factorization, split_cubic};
use crate::xsb::{fit_exponent, ratio_sweep, Variant};
use crate::{CutoffFamily, Error, FrequencyGrid, Result, SpectralField};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qmkdv",
    version,
    about = "Spectral laboratory for the periodic fifth-order modified KdV equation",
    arg_required_else_help = true
)]
pub struct Cli {
    /// `key=value` file of flags for the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Seed of the random probes.
    #[arg(long, global = true, default_value_t = 20240611)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a datum and record the trajectory and monitors.
    Simulate(SimulateArgs),
    /// Check the mass-conservation condition on random probes.
    Conserve(ConserveArgs),
    /// Exhaustive check of the cubic resonance factorization.
    ResonanceAudit(AuditArgs),
    /// Split the cubic nonlinearity by resonance and compare with the physical form.
    SplitCheck(SplitArgs),
    /// Gauge a trajectory forward and back.
    GaugeRoundtrip(GaugeArgs),
    /// Compare the gauged physical flow with the renormalized flow.
    Equivalence(EquivalenceArgs),
    /// Modified energy along a stored trajectory.
    EnergyTrack(EnergyTrackArgs),
    /// Calibrate the coefficient of the Sobolev-level modified energy.
    CalibrateAs(CalibrateArgs),
    /// Comparability of the modified energies with the dyadic energy.
    Comparability(ComparabilityArgs),
    /// Trilinear counterexample ratios and their growth exponent.
    Counterexample(CounterexampleArgs),
    /// Distance of parabolic regularizations to the dispersive flow.
    ParabolicSweep(ParabolicArgs),
    /// Residual of the scaling symmetry.
    ScalingCheck(ScalingArgs),
}

#[derive(Debug, Args, Clone)]
pub struct DatumArgs {
    /// Sample count `M` of the grid.
    #[arg(long, default_value_t = 128)]
    pub modes: usize,
    /// Amplitude of the initial datum.
    #[arg(long, default_value_t = 0.1)]
    pub amp: f64,
    /// `cos` for `amp cos(x)` or `random` for a seeded random field.
    #[arg(long, default_value = "cos")]
    pub init: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub datum: DatumArgs,
    /// `integrable`, `linear` or `a1,a2,a3,a4`.
    #[arg(long, default_value = "integrable")]
    pub coeffs: String,
    /// `physical` or `renormalized`.
    #[arg(long, default_value = "physical")]
    pub flow: String,
    /// Right-hand side of the renormalized flow: `direct` or `fft`.
    #[arg(long, default_value = "fft")]
    pub rhs: String,
    #[arg(long, default_value_t = 1e-5)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.05)]
    pub tend: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 100)]
    pub record_stride: usize,
    /// Trajectory file; `.txt`/`.csv` selects the text format.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Monitor CSV (stdout when omitted).
    #[arg(long)]
    pub monitor: Option<PathBuf>,
    /// Drift tolerance for the first two conserved quantities.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Drift tolerance for the third Hamiltonian.
    #[arg(long, default_value_t = 1e-7)]
    pub tol_ham3: f64,
}

#[derive(Debug, Args)]
pub struct ConserveArgs {
    #[arg(long, default_value = "integrable")]
    pub coeffs: String,
    #[arg(long, default_value_t = 64)]
    pub modes: usize,
    #[arg(long, default_value_t = 0.3)]
    pub amp: f64,
    #[arg(long, default_value_t = 20)]
    pub probes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, default_value_t = 40)]
    pub max: i64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long, default_value_t = 32)]
    pub modes: usize,
    #[arg(long, default_value_t = 0.3)]
    pub amp: f64,
    #[arg(long, default_value_t = 10)]
    pub probes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GaugeArgs {
    #[command(flatten)]
    pub datum: DatumArgs,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.01)]
    pub tend: f64,
    #[arg(long, default_value_t = 10)]
    pub record_stride: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EquivalenceArgs {
    #[command(flatten)]
    pub datum: DatumArgs,
    #[arg(long, default_value = "direct")]
    pub rhs: String,
    #[arg(long, default_value_t = 5e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.01)]
    pub tend: f64,
    #[arg(long, default_value_t = 4.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnergyTrackArgs {
    #[arg(long)]
    pub traj: PathBuf,
    #[arg(long, default_value_t = 3.0)]
    pub s: f64,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub traj: PathBuf,
    #[arg(long, default_value_t = 4.0)]
    pub s: f64,
    /// Drift-versus-coefficient curve.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ComparabilityArgs {
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 3.0)]
    pub s: f64,
    #[arg(long, default_value_t = 32)]
    pub modes: usize,
    /// `solution`, `difference` or `both`.
    #[arg(long, default_value = "both")]
    pub kind: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, default_value = "1")]
    pub variant: String,
    #[arg(long, default_value_t = 0.5)]
    pub b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, default_value_t = 16)]
    pub nmin: i64,
    #[arg(long, default_value_t = 256)]
    pub nmax: i64,
    #[arg(long, default_value_t = 0.15)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParabolicArgs {
    #[command(flatten)]
    pub datum: DatumArgs,
    /// Comma-separated regularization strengths.
    #[arg(long, default_value = "1e-6,1e-7,1e-8")]
    pub eps: String,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.01)]
    pub tend: f64,
    #[arg(long, default_value_t = 4.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub datum: DatumArgs,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.01)]
    pub tend: f64,
    #[arg(long, default_value_t = 3.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

const SUBCOMMANDS: [&str; 12] = [
    "simulate",
    "conserve",
    "resonance-audit",
    "split-check",
    "gauge-roundtrip",
    "equivalence",
    "energy-track",
    "calibrate-as",
    "comparability",
    "counterexample",
    "parabolic-sweep",
    "scaling-check",
];

/// Turns `key=value` lines into flags. Blank lines and `#` comments are
/// skipped; `key=true` becomes a bare flag and `key=false` is dropped.
pub fn config_args(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("config line {}: expected key=value", i + 1))
        })?;
        let key = k.trim().replace('_', "-");
        let value = v.trim();
        match value {
            "false" => {}
            "true" => out.push(format!("--{key}")),
            _ => out.push(format!("--{key}={value}")),
        }
    }
    Ok(out)
}

/// Splices the config-file flags in right after the subcommand so that later
/// command-line flags win.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| {
        Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
    })?;
    let extra = config_args(&text)?;
    let pos = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let Some(pos) = pos else {
        return Ok(args);
    };
    let mut out: Vec<OsString> = args[..=pos].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

fn init_threads() {
    if let Some(n) = std::env::var("QMKDV_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // fails only if the pool was already built, e.g. by an earlier call
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parser in which a repeated flag replaces the earlier value.
pub fn command() -> clap::Command {
    let mut cmd = Cli::command().args_override_self(true);
    for name in SUBCOMMANDS {
        cmd = cmd.mut_subcommand(name, |s| s.args_override_self(true));
    }
    cmd
}

fn parse(args: Vec<OsString>) -> std::result::Result<Cli, clap::Error> {
    let matches = command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_threads();
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match parse(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_)
                | Error::InvalidGrid(_)
                | Error::Io(_)
                | Error::Format(_)
                | Error::SizeCap { .. }
                | Error::OutOfRange { .. }
                | Error::GridMismatch(_)
                | Error::MissingPhase => EXIT_USAGE,
                _ => EXIT_FAIL,
            }
        }
    }
}

/// CSV destination plus the stream the summary goes to.
struct Report {
    csv: Box<dyn Write>,
    to_stdout: bool,
}

impl Report {
    fn open(out: Option<&Path>, seed: u64, params: &str) -> Result<Self> {
        let (csv, to_stdout): (Box<dyn Write>, bool) = match out {
            Some(p) => (Box::new(BufWriter::new(File::create(p)?)), false),
            None => (Box::new(BufWriter::new(io::stdout())), true),
        };
        let mut r = Self { csv, to_stdout };
        writeln!(r.csv, "# seed={seed}")?;
        if !params.is_empty() {
            writeln!(r.csv, "# {params}")?;
        }
        Ok(r)
    }

    fn row(&mut self, line: std::fmt::Arguments<'_>) -> Result<()> {
        self.csv.write_fmt(line)?;
        Ok(self.csv.write_all(b"\n")?)
    }

    fn summary(mut self, check: &str, pass: Option<bool>, detail: &str) -> Result<bool> {
        self.csv.flush()?;
        let verdict = match pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        };
        let line = format!("{check}: {verdict} ({detail})");
        if self.to_stdout {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
        Ok(pass.unwrap_or(true))
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("--{name} must be positive, got {v}")))
    }
}

fn datum(d: &DatumArgs, seed: u64, lambda: f64) -> Result<SpectralField> {
    let grid = FrequencyGrid::new(d.modes, lambda)?;
    if !d.amp.is_finite() {
        return Err(Error::InvalidParameter("--amp must be finite".into()));
    }
    match d.init.as_str() {
        "cos" => Ok(SpectralField::cosine(grid, d.amp, lambda.round() as i64)),
        "random" => {
            let band = (grid.max_index() / 4).max(1);
            Ok(random_field(&mut seeded(seed), grid, band, 2.0, d.amp))
        }
        other => Err(Error::InvalidParameter(format!("unknown --init {other:?}"))),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number {t:?} in list")))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<bool> {
    let seed = cli.seed;
    match &cli.command {
        Command::Simulate(a) => simulate(a, seed),
        Command::Conserve(a) => conserve(a, seed),
        Command::ResonanceAudit(a) => resonance_audit(a, seed),
        Command::SplitCheck(a) => split_check(a, seed),
        Command::GaugeRoundtrip(a) => gauge_roundtrip(a, seed),
        Command::Equivalence(a) => equivalence(a, seed),
        Command::EnergyTrack(a) => energy_track(a, seed),
        Command::CalibrateAs(a) => calibrate(a, seed),
        Command::Comparability(a) => comparability(a, seed),
        Command::Counterexample(a) => counterexample(a, seed),
        Command::ParabolicSweep(a) => parabolic(a, seed),
        Command::ScalingCheck(a) => scaling(a, seed),
    }
}

fn simulate(a: &SimulateArgs, seed: u64) -> Result<bool> {
    let coeffs: EquationCoefficients = a.coeffs.parse()?;
    let dt = positive("dt", a.dt)?;
    positive("tend", a.tend)?;
    if a.record_stride == 0 {
        return Err(Error::InvalidParameter("--record-stride must be positive".into()));
    }
    let flow = match a.flow.as_str() {
        "physical" => Flow::Physical(coeffs),
        "renormalized" => Flow::Renormalized(a.rhs.parse::<RhsMode>()?),
        other => return Err(Error::InvalidParameter(format!("unknown --flow {other:?}"))),
    };
    let u0 = datum(&a.datum, seed, 1.0)?;
    let config = EvolveConfig {
        flow,
        ..EvolveConfig::physical(coeffs, dt)
    }
    .with_epsilon(a.eps)
    .with_stride(a.record_stride);
    info!("simulate: M = {}, dt = {dt}, T = {}", a.datum.modes, a.tend);
    let traj = evolve(&u0, a.tend, &config)?;
    if let Some(path) = &a.out {
        save_trajectory(path, &traj)?;
    }
    let comments = vec![
        format!("seed={seed}"),
        format!(
            "coeffs={} flow={} modes={} amp={} dt={} tend={} eps={}",
            coeffs, a.flow, a.datum.modes, a.datum.amp, dt, a.tend, a.eps
        ),
    ];
    match &a.monitor {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write_monitor_csv(&mut w, traj.monitors(), &comments)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout());
            write_monitor_csv(&mut w, traj.monitors(), &comments)?;
            w.flush()?;
        }
    }
    let worst = traj.monitors().iter().fold([0.0f64; 3], |m, r| {
        [
            m[0].max(r.gamma1_drift),
            m[1].max(r.gamma2_drift),
            m[2].max(r.ham3_drift),
        ]
    });
    let detail = format!(
        "gamma1 drift {:.3e}, gamma2 drift {:.3e}, ham3 drift {:.3e}",
        worst[0], worst[1], worst[2]
    );
    let conserved = coeffs == EquationCoefficients::INTEGRABLE && a.eps == 0.0;
    let pass = conserved.then(|| worst[0] <= a.tol && worst[1] <= a.tol && worst[2] <= a.tol_ham3);
    let line = format!(
        "hamiltonian conservation: {} ({detail})",
        match pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        }
    );
    if a.monitor.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(pass.unwrap_or(true))
}

/// Largest instantaneous `|d/dt int u^2|` over seeded probes.
pub fn mass_probe(
    coeffs: &EquationCoefficients,
    grid: FrequencyGrid,
    amp: f64,
    probes: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = seeded(seed);
    let band = (grid.max_index() / 2).max(1);
    (0..probes)
        .map(|_| {
            let u = random_field(&mut rng, grid, band, 1.0, amp);
            Ok(mass_derivative(&u, coeffs)?.abs())
        })
        .collect()
}

fn conserve(a: &ConserveArgs, seed: u64) -> Result<bool> {
    let coeffs: EquationCoefficients = a.coeffs.parse()?;
    let grid = FrequencyGrid::unit(a.modes)?;
    let values = mass_probe(&coeffs, grid, positive("amp", a.amp)?, a.probes, seed)?;
    let flag = coeffs.mass_condition();
    let mut r = Report::open(
        a.out.as_deref(),
        seed,
        &format!("coeffs={coeffs} modes={} amp={} condition={flag}", a.modes, a.amp),
    )?;
    r.row(format_args!("probe,mass_derivative"))?;
    for (i, v) in values.iter().enumerate() {
        r.row(format_args!("{i},{v}"))?;
    }
    let worst = values.iter().copied().fold(0.0, f64::max);
    let pass = if flag { worst <= 1e-12 } else { worst >= 1e-3 };
    r.summary(
        "mass conservation condition",
        Some(pass),
        &format!("condition {flag}, max |d/dt int u^2| = {worst:.3e}"),
    )
}

fn resonance_audit(a: &AuditArgs, seed: u64) -> Result<bool> {
    if a.max < 0 {
        return Err(Error::InvalidParameter("--max must be nonnegative".into()));
    }
    let start = std::time::Instant::now();
    let (checked, failed) = exhaustive_factorization(a.max)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut r = Report::open(a.out.as_deref(), seed, &format!("max={}", a.max))?;
    r.row(format_args!("n1,n2,n3,n,h,factored,matches"))?;
    for n1 in -a.max..=a.max {
        for n2 in -a.max..=a.max {
            for n3 in -a.max..=a.max {
                let row = audit_triple(n1, n2, n3)?;
                r.row(format_args!(
                    "{n1},{n2},{n3},{},{},{},{}",
                    n1 + n2 + n3,
                    row.h,
                    row.factored,
                    row.matches
                ))?;
            }
        }
    }
    r.summary(
        "resonance factorization",
        Some(failed == 0),
        &format!("{checked} triples, {failed} failures, {elapsed:.2} s"),
    )
}

fn split_check(a: &SplitArgs, seed: u64) -> Result<bool> {
    let grid = FrequencyGrid::unit(a.modes)?;
    let cubic = EquationCoefficients::new(40.0, 10.0, 10.0, 0.0);
    let mut rng = seeded(seed);
    let band = (grid.max_index() / 3).max(1);
    let mut r = Report::open(
        a.out.as_deref(),
        seed,
        &format!("modes={} amp={}", a.modes, a.amp),
    )?;
    r.row(format_args!(
        "probe,resonant,nonresonant_a,nonresonant_b,linear_like,relative_residual,divergence_residual"
    ))?;
    let mut worst = 0.0f64;
    for i in 0..a.probes {
        let u = random_field(&mut rng, grid, band, 1.0, a.amp);
        let split = split_cubic(&u)?;
        let direct = nonlinear_physical(&u, &cubic)?;
        let scale = direct.l2_norm().max(f64::MIN_POSITIVE);
        let residual = (&split.total() - &direct).l2_norm() / scale;
        let div = verify_divergence_form(&u)?;
        worst = worst.max(residual);
        r.row(format_args!(
            "{i},{},{},{},{},{residual},{div}",
            split.resonant.l2_norm(),
            split.nonresonant_a.l2_norm(),
            split.nonresonant_b.l2_norm(),
            split.linear_like.l2_norm()
        ))?;
    }
    r.summary(
        "resonant split",
        Some(worst <= 1e-12),
        &format!("max relative residual {worst:.3e}"),
    )
}

fn gauge_roundtrip(a: &GaugeArgs, seed: u64) -> Result<bool> {
    let u0 = datum(&a.datum, seed, 1.0)?;
    let config = EvolveConfig::physical(EquationCoefficients::INTEGRABLE, positive("dt", a.dt)?)
        .with_stride(a.record_stride.max(1));
    let traj = evolve(&u0, positive("tend", a.tend)?, &config)?;
    let gauged = gauge_forward(&traj)?;
    let back = gauge_inverse(&gauged, None)?;
    let mut r = Report::open(
        a.out.as_deref(),
        seed,
        &format!("modes={} amp={} dt={} tend={}", a.datum.modes, a.datum.amp, a.dt, a.tend),
    )?;
    r.row(format_args!("time,phase,roundtrip_error,l4_change"))?;
    let (mut worst_rt, mut worst_l4) = (0.0f64, 0.0f64);
    for ((u, v), w) in traj.snapshots().iter().zip(gauged.snapshots()).zip(back.snapshots()) {
        let rt = u.field.max_abs_diff(&w.field) / u.field.max_abs().max(f64::MIN_POSITIVE);
        let l4u = u.field.lebesgue4_norm()?;
        let l4 = (l4u - v.field.lebesgue4_norm()?).abs() / l4u.max(f64::MIN_POSITIVE);
        worst_rt = worst_rt.max(rt);
        worst_l4 = worst_l4.max(l4);
        r.row(format_args!("{},{},{rt},{l4}", u.time, u.phase.unwrap_or(f64::NAN)))?;
    }
    r.summary(
        "gauge transformation",
        Some(worst_rt <= 1e-12 && worst_l4 <= 1e-12),
        &format!("roundtrip {worst_rt:.3e}, L4 invariance {worst_l4:.3e}"),
    )
}

fn equivalence(a: &EquivalenceArgs, seed: u64) -> Result<bool> {
    let u0 = datum(&a.datum, seed, 1.0)?;
    let mode: RhsMode = a.rhs.parse()?;
    let config = EvolveConfig::physical(EquationCoefficients::INTEGRABLE, positive("dt", a.dt)?)
        .with_stride(1);
    let report = gauge_equivalence(
        &u0,
        positive("tend", a.tend)?,
        EquationCoefficients::INTEGRABLE,
        mode,
        &config,
        a.s,
    )?;
    let mut r = Report::open(
        a.out.as_deref(),
        seed,
        &format!(
            "modes={} amp={} dt={} tend={} rhs={mode} s={}",
            a.datum.modes, a.datum.amp, a.dt, a.tend, a.s
        ),
    )?;
    r.row(format_args!("time,distance"))?;
    for (g, d) in report.gauged.snapshots().iter().zip(report.direct.snapshots()) {
        r.row(format_args!("{},{}", g.time, g.field.sobolev_distance(&d.field, a.s)))?;
    }
    r.summary(
        "renormalized system equivalence",
        Some(report.distance <= a.tol),
        &format!("sup H^{} distance {:.3e}", a.s, report.distance),
    )
}

fn energy_track(a: &EnergyTrackArgs, seed: u64) -> Result<bool> {
    let traj = load_trajectory(&a.traj)?;
    let params = ModifiedEnergyParams {
        alpha: a.alpha,
        beta: a.beta,
        s: a.s,
        ..ModifiedEnergyParams::default()
    };
    let cutoffs = CutoffFamily::new();
    let fields: Vec<SpectralField> = traj.snapshots().iter().map(|s| s.field.clone()).collect();
    let mut r = Report::open(
        a.out.as_deref(),
        seed,
        &format!("traj={} s={} alpha={} beta={}", a.traj.display(), a.s, a.alpha, a.beta),
    )?;
    r.row(format_args!("time,dyadic_energy,modified_energy,running_total"))?;
    let mut first = None;
    let mut worst: f64 = 0.0;
    for (i, snap) in traj.snapshots().iter().enumerate() {
        let plain = dyadic_energy_norm(&snap.field, a.s, &cutoffs);
        let single = modified_energy_total(&fields[i..=i], a.s, &params, &cutoffs)?;
        let running = modified_energy_total(&fields[..=i], a.s, &params, &cutoffs)?;
        let e0 = *first.get_or_insert(single);
        if e0 != 0.0 {
            worst = worst.max((single - e0).abs() / e0);
        }
        r.row(format_args!("{},{plain},{single},{running}", snap.time))?;
    }
    let g1 = traj
        .monitors()
        .iter()
        .map(|m| m.gamma1_drift)
        .fold(0.0, f64::max);
    r.summary(
        "modified energy tracking",
        None,
        &format!("max relative drift {worst:.3e}, gamma1 drift {g1:.3e}"),
    )
}

fn calibrate(a: &CalibrateArgs, seed: u64) -> Result<bool> {
    let traj = load_trajectory(&a.traj)?;
    let cal = calibrate_as(&traj, a.s)?;
    let mut r = Report::open(
        a.out.as_deref(),
        seed,
        &format!("traj={} s={}", a.traj.display(), a.s),
    )?;
    r.row(format_args!("a_s,relative_drift"))?;
    for (x, d) in &cal.curve {
        r.row(format_args!("{x},{d}"))?;
    }
    r.summary(
        "sobolev energy calibration",
        Some(cal.reduction() >= 2.0),
        &format!(
            "a_s = {:.6e}, drift {:.3e} vs {:.3e} at a_s = 0, reduction {:.2}",
            cal.a_s,
            cal.drift,
            cal.baseline_drift,
            cal.reduction()
        ),
    )
}

fn comparability(a: &ComparabilityArgs, seed: u64) -> Result<bool> {
    let grid = FrequencyGrid::unit(a.modes)?;
    let kinds: &[EnergyKind] = match a.kind.as_str() {
        "solution" => &[EnergyKind::Solution],
        "difference" => &[EnergyKind::Difference],
        "both" => &[EnergyKind::Solution, EnergyKind::Difference],
        other => return Err(Error::InvalidParameter(format!("unknown --kind {other:?}"))),
    };
    let params = ModifiedEnergyParams {
        s: a.s,
        ..ModifiedEnergyParams::default()
    };
    let cutoffs = CutoffFamily::new();
    let mut rng = seeded(seed);
    let mut r = Report::open(
        a.out.as_deref(),
        seed,
        &format!("modes={} s={} delta={} samples={}", a.modes, a.s, a.delta, a.samples),
    )?;
    r.row(format_args!("kind,samples,failures,min_ratio,max_ratio,empirical_delta"))?;
    let mut pass = true;
    let mut detail = Vec::new();
    for &kind in kinds {
        let rep = comparability_check(
            &mut rng,
            grid,
            kind,
            a.samples,
            positive("delta", a.delta)?,
            &params,
            &cutoffs,
        )?;
        let name = match kind {
            EnergyKind::Solution => "solution",
            EnergyKind::Difference => "difference",
        };
        r.row(format_args!(
            "{name},{},{},{},{},{}",
            rep.samples, rep.failures, rep.min_ratio, rep.max_ratio, rep.empirical_delta
        ))?;
        pass &= rep.passed();
        detail.push(format!(
            "{name}: ratio in [{:.4}, {:.4}], empirical delta {:.3e}",
            rep.min_ratio, rep.max_ratio, rep.empirical_delta
        ));
    }
    r.summary("modified energy comparability", Some(pass), &detail.join("; "))
}

fn counterexample(a: &CounterexampleArgs, seed: u64) -> Result<bool> {
    let variant: Variant = a.variant.parse()?;
    if a.nmin < 8 || a.nmax < a.nmin {
        return Err(Error::InvalidParameter(
            "need 8 <= --nmin <= --nmax".into(),
        ));
    }
    let mut ns = Vec::new();
    let mut n = a.nmin;
    while n <= a.nmax {
        ns.push(n);
        n *= 2;
    }
    let rows = ratio_sweep(&ns, a.s, a.b, variant)?;
    let mut r = Report::open(
        a.out.as_deref(),
        seed,
        &format!("variant={variant} b={} s={}", a.b, a.s),
    )?;
    r.row(format_args!("N,numerator,denominator,ratio"))?;
    for row in &rows {
        r.row(format_args!(
            "{},{},{},{}",
            row.n, row.numerator, row.denominator, row.ratio
        ))?;
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let (slope, r2) = fit_exponent(&xs, &ys)?;
    let predicted = variant.exponent(a.b);
    r.summary(
        "trilinear counterexample exponent",
        Some((slope - predicted).abs() <= a.tol),
        &format!("slope {slope:.4} (r^2 {r2:.6}), predicted {predicted:.4}"),
    )
}

fn parabolic(a: &ParabolicArgs, seed: u64) -> Result<bool> {
    let u0 = datum(&a.datum, seed, 1.0)?;
    let eps = parse_list(&a.eps)?;
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("--eps values must be positive".into()));
    }
    let config = EvolveConfig::physical(EquationCoefficients::INTEGRABLE, positive("dt", a.dt)?)
        .with_stride(10);
    let rep = parabolic_family(&u0, positive("tend", a.tend)?, &eps, &config, a.s)?;
    let mut r = Report::open(
        a.out.as_deref(),
        seed,
        &format!("modes={} amp={} dt={} tend={} s={}", a.datum.modes, a.datum.amp, a.dt, a.tend, a.s),
    )?;
    r.row(format_args!("epsilon,sup_distance"))?;
    for (e, d) in rep.epsilons.iter().zip(&rep.distances) {
        r.row(format_args!("{e},{d}"))?;
    }
    let last = rep.distances.last().copied().unwrap_or(f64::INFINITY);
    let rate = rep
        .empirical_rate()
        .map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"));
    r.summary(
        "parabolic regularization",
        Some(rep.strictly_decreasing() && last <= a.tol),
        &format!("final distance {last:.3e}, empirical rate {rate}"),
    )
}

fn scaling(a: &ScalingArgs, seed: u64) -> Result<bool> {
    let u0 = datum(&a.datum, seed, 1.0)?;
    let config = EvolveConfig::physical(EquationCoefficients::INTEGRABLE, positive("dt", a.dt)?)
        .with_stride(10);
    let residual = scaling_check(&u0, a.lambda, positive("tend", a.tend)?, &config, a.s)?;
    let line = format!(
        "scaling symmetry: {} (lambda {}, H^{} residual {residual:.3e})",
        if residual <= a.tol { "PASS" } else { "FAIL" },
        a.lambda,
        a.s
    );
    println!("# seed={seed}");
    println!("{line}");
    Ok(residual <= a.tol)
}
