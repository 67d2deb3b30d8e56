//! `vacpol` command-line front end: flag parsing, the `--config` overlay,
//! per-command table/report builders and the CSV/JSON writers.
//!
//! Every command is computed fully in memory before anything is written, so
//! a failure never leaves a partial file behind.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Number, Value};

use crate::bound_states::{
    minimal_distance, modified_cusp, numerov_eigensolve, perturbative_shift,
    perturbative_shift_with, NumerovGrid, PotentialMode, ShiftKind, ShiftQuadrature,
};
use crate::context::{PhysicalContext, ALPHA_DEFAULT};
use crate::coulomb_waves::coulomb_phase;
use crate::error::Error;
use crate::field_equation::{
    cardano_real_root, field_correction_psi, field_correction_psi_derivative, field_derivative, nonlinear_field_shift,
    scaled_coefficients,
};
use crate::fourier::spectral_samples;
use crate::ledger::{build_ledger, uehling_spectral_entries, wk_spectral_entry, LedgerEntry};
use crate::o21_algebra::{
    build_generators, evaluate_expansion, hausdorff_residual, hydrogen_spectrum_from_algebra, uehling_operator_expansion,
    verify_commutators, MAX_EXPANSION_ORDER,
};
use crate::potentials::{total_potential, uehling_closed, wichmann_kroll_regularized};
use crate::quadrature::EvalAccuracy;
use crate::scattering::{background_eta, differential_cross_section, integrate_phase, PhaseOptions};

pub const SCHEMA_VERSION: u32 = 1;
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Unit of the r or k grid. `alpha` means r in units of α (k in units of
/// 1/α); table values are always atomic units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GridUnits {
    Atomic,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PhasePotential {
    Uehling,
    WichmannKroll,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub units: GridUnits,
}

impl GridSpec {
    pub fn validate(&self, what: &str) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::Validation(format!("{what} grid: --count must be at least 2, got {}", self.count)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || !(self.min < self.max) {
            return Err(CliError::Validation(format!(
                "{what} grid: need min < max, got min = {}, max = {}",
                self.min, self.max
            )));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return Err(CliError::Validation(format!("{what} grid: log spacing needs min > 0, got {}", self.min)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CommandOptions {
    Potential,
    Spectrum,
    Phase { ell_max: u32, potential: PhasePotential },
    CrossSection { k: f64, delta0: Option<f64> },
    Cusp { c_param: f64, f_param: Option<f64> },
    Bound { n: u32, ell: u32, steps: usize },
    Algebra { ell: u32, basis: usize, beta: f64, order: usize, levels: u32 },
    Field,
    TypoLedger,
}

impl CommandOptions {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Potential => "potential",
            Self::Spectrum => "spectrum",
            Self::Phase { .. } => "phase",
            Self::CrossSection { .. } => "cross-section",
            Self::Cusp { .. } => "cusp",
            Self::Bound { .. } => "bound",
            Self::Algebra { .. } => "algebra",
            Self::Field => "field",
            Self::TypoLedger => "typo-ledger",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandOptions,
    pub grid: Option<GridSpec>,
    pub ctx: PhysicalContext,
    /// Not echoed: the same run written to two paths stays byte-identical.
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
    pub tolerances: EvalAccuracy,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config (exit 2).
    Validation(String),
    /// A numerical routine failed (exit 3).
    Numerical(Error),
    /// Output could not be written (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => EXIT_VALIDATION,
            Self::Numerical(_) | Self::Io(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "invalid configuration: {m}"),
            Self::Numerical(e) => write!(f, "numerical failure: {e}"),
            Self::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Range { .. } => Self::Validation(e.to_string()),
            other => Self::Numerical(other),
        }
    }
}

// ---------------------------------------------------------------- flags

#[derive(Parser, Debug)]
#[command(name = "vacpol", version, about = "Vacuum-polarization corrected point-charge interactions: tables and reports")]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Subcommand, Debug)]
enum CommandArgs {
    /// Coulomb, Uehling, Wichmann-Kroll and total potential on an r grid.
    Potential(RadialArgs),
    /// Spectral functions u(k), w_K(k): printed, quadrature and corrected.
    Spectrum(SpectrumArgs),
    /// Variable-phase shifts of the vacuum-polarization potential on a k grid.
    Phase(PhaseArgs),
    /// Differential cross-section with the s-wave vacuum-polarization phase.
    CrossSection(CrossSectionArgs),
    /// Vacuum-polarization corrected electron-nucleus cusp.
    Cusp(CuspArgs),
    /// Hydrogenic level: Numerov eigenvalues and level shifts.
    Bound(BoundArgs),
    /// O(2,1) algebra checks, spectrum and operator expansion.
    Algebra(AlgebraArgs),
    /// Root of the nonlinear field cubic on an r grid.
    Field(RadialArgs),
    /// Every printed-formula discrepancy with its oracle values.
    TypoLedger(CommonArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// key = value file; flags on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Nuclear charge acting on a unit probe.
    #[arg(long = "Q", allow_hyphen_values = true)]
    q: Option<f64>,
    /// First charge of a pair (with --q2, replaces --Q).
    #[arg(long, allow_hyphen_values = true)]
    q1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q2: Option<f64>,
    #[arg(long, default_value_t = ALPHA_DEFAULT)]
    alpha: f64,
    /// Reduced mass in electron masses.
    #[arg(long, default_value_t = 1.0)]
    reduced_mass: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
    #[arg(long, default_value_t = 0.0)]
    abs_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_subdivisions: usize,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    spacing: Spacing,
    #[arg(long, value_enum, default_value_t = GridUnits::Atomic)]
    units: GridUnits,
}

#[derive(Args, Debug, Clone)]
struct RadialArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 1e-4)]
    rmin: f64,
    #[arg(long, default_value_t = 1.0)]
    rmax: f64,
}

#[derive(Args, Debug, Clone)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 0.01)]
    kmin: f64,
    #[arg(long, default_value_t = 20.0)]
    kmax: f64,
}

#[derive(Args, Debug, Clone)]
struct PhaseArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Default keeps |eta| = |Q|/k within the Coulomb-wave range for small Q.
    #[arg(long, default_value_t = 0.1)]
    kmin: f64,
    #[arg(long, default_value_t = 5.0)]
    kmax: f64,
    #[arg(long, default_value_t = 0)]
    ell_max: u32,
    #[arg(long, value_enum, default_value_t = PhasePotential::Uehling)]
    potential: PhasePotential,
}

#[derive(Args, Debug, Clone)]
struct CrossSectionArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 37)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    spacing: Spacing,
    /// Degrees.
    #[arg(long, default_value_t = 10.0)]
    theta_min: f64,
    /// Degrees.
    #[arg(long, default_value_t = 180.0)]
    theta_max: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// s-wave phase; computed from the Uehling potential when absent.
    #[arg(long, allow_hyphen_values = true)]
    delta0: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct CuspArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Cutoff r₀ = Cα/Q.
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    /// Wichmann-Kroll factor; defaults to 1/(1 + C²).
    #[arg(long = "f", allow_hyphen_values = true)]
    f: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct BoundArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    ell: u32,
    #[arg(long, default_value_t = crate::bound_states::NUMEROV_STEPS_DEFAULT)]
    steps: usize,
}

#[derive(Args, Debug, Clone)]
struct AlgebraArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 0)]
    ell: u32,
    #[arg(long, default_value_t = 12)]
    basis: usize,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, default_value_t = 5)]
    levels: u32,
}

fn context_from(c: &CommonArgs) -> Result<PhysicalContext, CliError> {
    let base = match (c.q, c.q1, c.q2) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(CliError::Validation("give either --Q or --q1/--q2, not both".into()))
        }
        (_, Some(a), Some(b)) => PhysicalContext::pair(a, b),
        (_, Some(_), None) | (_, None, Some(_)) => {
            return Err(CliError::Validation("--q1 and --q2 must be given together".into()))
        }
        (q, None, None) => PhysicalContext::nuclear(q.unwrap_or(1.0)),
    };
    let ctx = base.with_alpha(c.alpha).with_reduced_mass(c.reduced_mass);
    ctx.validate()?;
    Ok(ctx)
}

fn tolerances_from(c: &CommonArgs) -> Result<EvalAccuracy, CliError> {
    Ok(EvalAccuracy::new(c.rel_tol, c.abs_tol, c.max_subdivisions)?)
}

fn base_config(command: CommandOptions, grid: Option<GridSpec>, c: &CommonArgs, default: Format) -> Result<RunConfig, CliError> {
    Ok(RunConfig {
        command,
        grid,
        ctx: context_from(c)?,
        output: c.output.clone(),
        format: c.format.unwrap_or(default),
        tolerances: tolerances_from(c)?,
    })
}

fn grid(min: f64, max: f64, g: &GridArgs) -> GridSpec {
    GridSpec { min, max, count: g.count, spacing: g.spacing, units: g.units }
}

impl CommandArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        match self {
            Self::Potential(a) => {
                base_config(CommandOptions::Potential, Some(grid(a.rmin, a.rmax, &a.grid)), &a.common, Format::Csv)
            }
            Self::Field(a) => base_config(CommandOptions::Field, Some(grid(a.rmin, a.rmax, &a.grid)), &a.common, Format::Csv),
            Self::Spectrum(a) => {
                base_config(CommandOptions::Spectrum, Some(grid(a.kmin, a.kmax, &a.grid)), &a.common, Format::Csv)
            }
            Self::Phase(a) => base_config(
                CommandOptions::Phase { ell_max: a.ell_max, potential: a.potential },
                Some(grid(a.kmin, a.kmax, &a.grid)),
                &a.common,
                Format::Csv,
            ),
            Self::CrossSection(a) => base_config(
                CommandOptions::CrossSection { k: a.k, delta0: a.delta0 },
                Some(GridSpec {
                    min: a.theta_min,
                    max: a.theta_max,
                    count: a.count,
                    spacing: a.spacing,
                    units: GridUnits::Atomic,
                }),
                &a.common,
                Format::Csv,
            ),
            Self::Cusp(a) => base_config(CommandOptions::Cusp { c_param: a.c, f_param: a.f }, None, &a.common, Format::Json),
            Self::Bound(a) => base_config(
                CommandOptions::Bound { n: a.n, ell: a.ell, steps: a.steps },
                None,
                &a.common,
                Format::Json,
            ),
            Self::Algebra(a) => base_config(
                CommandOptions::Algebra { ell: a.ell, basis: a.basis, beta: a.beta, order: a.order, levels: a.levels },
                None,
                &a.common,
                Format::Json,
            ),
            Self::TypoLedger(c) => base_config(CommandOptions::TypoLedger, None, &c, Format::Json),
        }
    }
}

/// Reads `key = value` lines (`#` comments, blank lines allowed).
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("{}:{}: expected `key = value`, got `{line}`", path.display(), i + 1))
        })?;
        let key = k.trim().trim_start_matches("--").to_string();
        if key.is_empty() || key == "config" {
            return Err(CliError::Validation(format!("{}:{}: invalid key `{}`", path.display(), i + 1, k.trim())));
        }
        pairs.push((key, v.trim().to_string()));
    }
    Ok(pairs)
}

/// Splices `--config` file entries in as flags right after the subcommand,
/// skipping any key the command line sets itself.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    let mut given = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(rest) = a.strip_prefix("--") {
            let (key, inline) = match rest.split_once('=') {
                Some((k, v)) => (k.to_string(), Some(v.to_string())),
                None => (rest.to_string(), None),
            };
            if key == "config" {
                let v = match inline {
                    Some(v) => v,
                    None => {
                        i += 1;
                        args.get(i).cloned().ok_or_else(|| CliError::Validation("--config needs a path".into()))?
                    }
                };
                path = Some(PathBuf::from(v));
            } else {
                given.push(key);
            }
        }
        i += 1;
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let sub = args.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 1);
    let Some(sub) = sub else {
        return Ok(args);
    };
    let mut out: Vec<String> = args[..=sub].to_vec();
    for (k, v) in read_config_file(&path)? {
        if !given.contains(&k) {
            out.push(format!("--{k}={v}"));
        }
    }
    let mut rest = args[sub + 1..].iter();
    while let Some(a) = rest.next() {
        if a == "--config" {
            rest.next();
        } else if !a.starts_with("--config=") {
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// Parses argv (program name first) into a validated config. `Ok(Err(text))`
/// carries help or version output.
pub fn parse_args<I, T>(args: I) -> Result<Result<RunConfig, String>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let raw: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let expanded = expand_config(raw)?;
    match Cli::try_parse_from(expanded) {
        Ok(cli) => cli.command.into_config().map(Ok),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Ok(Err(e.to_string())),
            _ => Err(CliError::Validation(e.to_string())),
        },
    }
}

// ---------------------------------------------------------------- tables

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Table(Table),
    Report(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Produced {
    pub payload: Payload,
    pub diagnostics: Value,
    pub typo_ledger: Option<Value>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn grid_points(config: &RunConfig, kind: GridKind) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let g = config
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Validation("command needs a grid".into()))?;
    g.validate(kind.label())?;
    let shown = g.points();
    let a = config.ctx.alpha;
    let atomic: Vec<f64> = match (g.units, kind) {
        (GridUnits::Atomic, _) | (_, GridKind::Angle) => shown.clone(),
        (GridUnits::Alpha, _) if a == 0.0 => {
            return Err(CliError::Validation("--units alpha needs alpha > 0".into()));
        }
        (GridUnits::Alpha, GridKind::Radius) => shown.iter().map(|x| x * a).collect(),
        (GridUnits::Alpha, GridKind::WaveNumber) => shown.iter().map(|x| x / a).collect(),
    };
    if kind != GridKind::Angle && !(atomic[0] > 0.0) {
        return Err(CliError::Validation(format!("{} grid must be positive", kind.label())));
    }
    Ok((shown, atomic))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GridKind {
    Radius,
    WaveNumber,
    Angle,
}

impl GridKind {
    fn label(self) -> &'static str {
        match self {
            Self::Radius => "r",
            Self::WaveNumber => "k",
            Self::Angle => "theta",
        }
    }
}

fn potential_table(config: &RunConfig) -> Result<Produced, CliError> {
    let (shown, radii) = grid_points(config, GridKind::Radius)?;
    let ctx = config.ctx;
    let rows = shown
        .par_iter()
        .zip(radii.par_iter())
        .map(|(&x, &r)| {
            let s = total_potential(r, &ctx)?;
            Ok(vec![
                Cell::Num(x),
                Cell::Num(s.coulomb),
                Cell::Num(s.uehling),
                Cell::Num(s.wichmann_kroll),
                Cell::Num(s.total),
                Cell::Text("closed_form".into()),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Produced {
        payload: Payload::Table(Table {
            headers: vec!["r", "coulomb", "uehling", "wichmann_kroll", "total", "source"],
            rows,
        }),
        diagnostics: json!({ "rows": radii.len(), "wichmann_kroll": "regularized" }),
        typo_ledger: None,
    })
}

fn spectrum_table(config: &RunConfig) -> Result<Produced, CliError> {
    let (shown, ks) = grid_points(config, GridKind::WaveNumber)?;
    let ctx = config.ctx;
    let acc = config.tolerances;
    let blocks = shown
        .par_iter()
        .zip(ks.par_iter())
        .map(|(&x, &k)| {
            let [printed, oracle, corrected] = spectral_samples(k, &ctx, &acc)?;
            let rel = |v: f64, o: f64| if o == 0.0 { (v - o).abs() } else { (v - o) / o.abs() };
            Ok([
                (printed, "closed_form"),
                (oracle, "oracle"),
                (corrected, "corrected"),
            ]
            .map(|(s, tag)| {
                vec![
                    Cell::Num(x),
                    Cell::Num(s.u_k),
                    Cell::Num(s.u_tilde_k),
                    Cell::Num(s.w_k),
                    Cell::Num(s.w_k_field),
                    Cell::Num(rel(s.u_k, oracle.u_k)),
                    Cell::Num(rel(s.w_k, oracle.w_k)),
                    Cell::Text(tag.into()),
                ]
            }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let rows: Vec<Vec<Cell>> = blocks.into_iter().flatten().collect();
    let worst = |col: usize, tag: &str| {
        rows.iter()
            .filter(|r| r[7] == Cell::Text(if tag == "c" { "corrected" } else { "closed_form" }.into()))
            .map(|r| match r[col] {
                Cell::Num(v) => v.abs(),
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    };
    let diagnostics = json!({
        "max_u_discrepancy_closed_form": worst(5, "p"),
        "max_u_discrepancy_corrected": worst(5, "c"),
        "max_w_discrepancy_closed_form": worst(6, "p"),
        "max_w_discrepancy_corrected": worst(6, "c"),
    });
    let typo_ledger = if config.format == Format::Json {
        let mut entries: Vec<LedgerEntry> = uehling_spectral_entries(&ks, &ctx, &acc)?;
        entries.push(wk_spectral_entry(&ks, &ctx, &acc)?);
        Some(to_value(&entries))
    } else {
        None
    };
    Ok(Produced {
        payload: Payload::Table(Table {
            headers: vec![
                "k",
                "u_k",
                "u_tilde_k",
                "w_k",
                "W_k_field",
                "u_discrepancy",
                "w_discrepancy",
                "source",
            ],
            rows,
        }),
        diagnostics,
        typo_ledger,
    })
}

fn phase_potential(which: PhasePotential, r: f64, ctx: &PhysicalContext) -> crate::Result<f64> {
    Ok(match which {
        PhasePotential::Uehling => uehling_closed(r, ctx)?,
        PhasePotential::WichmannKroll => wichmann_kroll_regularized(r, ctx)?,
        PhasePotential::Total => uehling_closed(r, ctx)? + wichmann_kroll_regularized(r, ctx)?,
    })
}

fn phase_table(config: &RunConfig, ell_max: u32, which: PhasePotential) -> Result<Produced, CliError> {
    let (shown, ks) = grid_points(config, GridKind::WaveNumber)?;
    let ctx = config.ctx;
    let opts = PhaseOptions::default();
    let jobs: Vec<(f64, f64, u32)> = shown
        .iter()
        .zip(&ks)
        .flat_map(|(&x, &k)| (0..=ell_max).map(move |l| (x, k, l)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(x, k, ell)| {
            let t = integrate_phase(|r| phase_potential(which, r, &ctx), ell, k, &ctx, &opts)?;
            Ok((x, t))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let unconverged = results.iter().filter(|(_, t)| !t.converged).count();
    let rows = results
        .into_iter()
        .map(|(x, t)| {
            vec![
                Cell::Num(x),
                Cell::Int(t.ell as i64),
                Cell::Num(t.eta),
                Cell::Num(t.delta_inf),
                Cell::Num(t.tail_estimate),
                Cell::Num(t.error_estimate),
                Cell::Int(t.converged as i64),
                Cell::Text("oracle".into()),
            ]
        })
        .collect();
    Ok(Produced {
        payload: Payload::Table(Table {
            headers: vec!["k", "ell", "eta", "delta", "tail_estimate", "error_estimate", "converged", "source"],
            rows,
        }),
        diagnostics: json!({ "unconverged": unconverged, "options": to_value(&opts) }),
        typo_ledger: None,
    })
}

fn cross_section_table(config: &RunConfig, k: f64, delta0: Option<f64>) -> Result<Produced, CliError> {
    let (degrees, _) = grid_points(config, GridKind::Angle)?;
    if !(degrees[0] > 0.0 && degrees[degrees.len() - 1] <= 180.0) {
        return Err(CliError::Validation("theta grid must lie in (0, 180] degrees".into()));
    }
    let ctx = config.ctx;
    let cp = ctx.charge_product();
    if cp == 0.0 {
        return Err(CliError::Validation("cross-section needs a nonzero charge product".into()));
    }
    let a_c = 1.0 / (ctx.reduced_mass * cp.abs());
    let delta0 = match delta0 {
        Some(d) => d,
        None => integrate_phase(|r| uehling_closed(r, &ctx), 0, k, &ctx, &PhaseOptions::default())?.delta_inf,
    };
    let rows = degrees
        .par_iter()
        .map(|&deg| {
            let p = differential_cross_section(deg.to_radians(), k, delta0, a_c, &ctx)?;
            Ok(vec![
                Cell::Num(deg),
                Cell::Num(p.dsigma),
                Cell::Num(p.components.coulomb),
                Cell::Num(p.components.interference),
                Cell::Num(p.components.vacuum_polarization),
                Cell::Num(p.dsigma_amplitude),
                Cell::Num(p.relative_discrepancy),
                Cell::Text("closed_form".into()),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let eta = background_eta(k, &ctx)?;
    Ok(Produced {
        payload: Payload::Table(Table {
            headers: vec![
                "theta_deg",
                "dsigma",
                "coulomb",
                "interference",
                "vacuum_polarization",
                "dsigma_amplitude",
                "relative_discrepancy",
                "source",
            ],
            rows,
        }),
        diagnostics: json!({
            "k": k,
            "a_c": a_c,
            "eta": eta,
            "delta0": delta0,
            "coulomb_phase0": coulomb_phase(0, eta)?,
        }),
        typo_ledger: None,
    })
}

fn nuclear_charge(ctx: &PhysicalContext) -> Result<f64, CliError> {
    let q = ctx.charge_product().abs();
    if q > 0.0 {
        Ok(q)
    } else {
        Err(CliError::Validation("a nonzero nuclear charge is required".into()))
    }
}

fn cusp_report(config: &RunConfig, c: f64, f: Option<f64>) -> Result<Produced, CliError> {
    let q = nuclear_charge(&config.ctx)?;
    let report = modified_cusp(q, c, f, &config.ctx)?;
    Ok(Produced {
        payload: Payload::Report(to_value(&report)),
        diagnostics: json!({
            "minimal_distance": minimal_distance(q, &config.ctx)?,
            "cutoff_radius": c * minimal_distance(q, &config.ctx)?,
        }),
        typo_ledger: None,
    })
}

fn bound_report(config: &RunConfig, n: u32, ell: u32, steps: usize) -> Result<Produced, CliError> {
    let ctx = config.ctx;
    let q = nuclear_charge(&ctx)?;
    if steps < 100 {
        return Err(CliError::Validation(format!("--steps must be at least 100, got {steps}")));
    }
    let state = crate::bound_states::hydrogenic_state_with_mass(n, ell, q, ctx.reduced_mass)?;
    let grid = NumerovGrid { steps, ..NumerovGrid::for_level(n, q) };
    let ((coulomb, total), (uehling, (wk, (both, both_gk)))) = rayon::join(
        || {
            rayon::join(
                || numerov_eigensolve(n, ell, q, PotentialMode::Coulomb, &grid, &ctx),
                || numerov_eigensolve(n, ell, q, PotentialMode::Total, &grid, &ctx),
            )
        },
        || {
            rayon::join(
                || perturbative_shift(&state, ShiftKind::Uehling, &ctx),
                || {
                    rayon::join(
                        || perturbative_shift(&state, ShiftKind::WichmannKroll, &ctx),
                        || {
                            rayon::join(
                                || perturbative_shift(&state, ShiftKind::Both, &ctx),
                                || {
                                    perturbative_shift_with(
                                        &state,
                                        ShiftKind::Both,
                                        &ctx,
                                        ShiftQuadrature::GaussKronrod,
                                        &config.tolerances,
                                    )
                                },
                            )
                        },
                    )
                },
            )
        },
    );
    let (coulomb, total) = (coulomb?, total?);
    let both = both?;
    let direct = total.energy - coulomb.energy;
    let report = json!({
        "n": n,
        "ell": ell,
        "Q": q,
        "analytic_energy": state.energy,
        "numerov_coulomb_energy": coulomb.energy,
        "numerov_total_energy": total.energy,
        "direct_shift": direct,
        "perturbative_shift": {
            "uehling": uehling?,
            "wichmann_kroll": wk?,
            "total": both,
            "total_gauss_kronrod": both_gk?,
        },
        "direct_over_perturbative": direct / both,
    });
    Ok(Produced {
        payload: Payload::Report(report),
        diagnostics: json!({
            "grid": to_value(&grid),
            "coulomb_relative_error": (coulomb.energy - state.energy) / state.energy.abs(),
            "bisection_steps": [coulomb.bisection_steps, total.bisection_steps],
        }),
        typo_ledger: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn algebra_report(config: &RunConfig, ell: u32, basis: usize, beta: f64, order: usize, levels: u32) -> Result<Produced, CliError> {
    if order > MAX_EXPANSION_ORDER {
        return Err(CliError::Validation(format!("--order must be at most {MAX_EXPANSION_ORDER}")));
    }
    if levels == 0 {
        return Err(CliError::Validation("--levels must be at least 1".into()));
    }
    let q = nuclear_charge(&config.ctx)?;
    let rep = build_generators(ell, basis)?;
    let margin = (basis / 2).max(1);
    let commutators = verify_commutators(&rep);
    let hausdorff = hausdorff_residual(&rep, beta, margin)?;
    let spectrum = (1..=levels)
        .map(|n| {
            Ok(json!({
                "n": n,
                "algebra": hydrogen_spectrum_from_algebra(q, n)?,
                "analytic": -q * q / (2.0 * (n * n) as f64),
            }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut results = json!({
        "commutators": to_value(&commutators),
        "hausdorff": to_value(&hausdorff),
        "spectrum": spectrum,
    });
    let mut diagnostics = json!({ "max_commutator_residual": commutators.max_residual() });
    if config.ctx.alpha > 0.0 {
        let terms = uehling_operator_expansion(order, &config.ctx)?;
        let r = 0.1 * config.ctx.alpha;
        let exact = r * uehling_closed(r, &config.ctx)?;
        let approx = evaluate_expansion(&terms, r, config.ctx.alpha);
        results["expansion"] = to_value(&terms);
        diagnostics["expansion_check"] = json!({ "r": r, "r_times_uehling": exact, "expansion": approx });
    }
    Ok(Produced { payload: Payload::Report(results), diagnostics, typo_ledger: None })
}

fn field_table(config: &RunConfig) -> Result<Produced, CliError> {
    let (shown, radii) = grid_points(config, GridKind::Radius)?;
    let ctx = config.ctx;
    if ctx.alpha == 0.0 || ctx.charge_product() == 0.0 {
        return Err(CliError::Validation("field needs alpha > 0 and a nonzero charge".into()));
    }
    let rows = shown
        .par_iter()
        .zip(radii.par_iter())
        .map(|(&x, &r)| {
            let c = scaled_coefficients(r / ctx.alpha, &ctx)?;
            let eta = cardano_real_root(&c);
            let scale = (c.p * eta).abs().max(c.q / (c.r * c.r));
            Ok(vec![
                Cell::Num(x),
                Cell::Num(field_derivative(r, &ctx)?),
                Cell::Num(-ctx.charge_product() / (r * r)),
                Cell::Num(nonlinear_field_shift(r, &ctx)?),
                Cell::Num(field_correction_psi_derivative(r, &ctx)?),
                Cell::Num(field_correction_psi(r, &ctx)?),
                Cell::Num(c.residual(eta).abs() / scale),
                Cell::Text("closed_form".into()),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Produced {
        payload: Payload::Table(Table {
            headers: vec![
                "r",
                "field_derivative",
                "coulomb_derivative",
                "nonlinear_shift",
                "psi_derivative",
                "psi",
                "cubic_residual",
                "source",
            ],
            rows,
        }),
        diagnostics: json!({ "units": "y = d phi/dr in atomic units; residual relative to max(|p y|, |q/r^2|)" }),
        typo_ledger: None,
    })
}

fn ledger_report(config: &RunConfig) -> Result<Produced, CliError> {
    let ledger = build_ledger(&config.ctx, &config.tolerances)?;
    let value = to_value(&ledger);
    let rows = ledger
        .entries
        .iter()
        .flat_map(|e| {
            let measure = match e.measure {
                crate::ledger::Measure::Relative => "relative",
                crate::ledger::Measure::Absolute => "absolute",
            };
            e.samples.iter().map(move |s| {
                vec![
                    Cell::Text(e.id.clone()),
                    Cell::Num(s.x),
                    Cell::Num(s.printed),
                    Cell::Num(s.oracle),
                    Cell::Num(s.discrepancy),
                    Cell::Text(measure.into()),
                ]
            })
        })
        .collect();
    let payload = match config.format {
        Format::Json => Payload::Report(value.clone()),
        Format::Csv => Payload::Table(Table {
            headers: vec!["id", "x", "printed", "oracle", "discrepancy", "measure"],
            rows,
        }),
    };
    let summary: Map<String, Value> = ledger
        .entries
        .iter()
        .map(|e| (e.id.clone(), json!({ "max_discrepancy": e.max_discrepancy, "corrected": e.corrected_max_discrepancy })))
        .collect();
    Ok(Produced { payload, diagnostics: Value::Object(summary), typo_ledger: None })
}

/// Computes the payload for a validated config.
pub fn produce(config: &RunConfig) -> Result<Produced, CliError> {
    config.ctx.validate()?;
    config.tolerances.validate()?;
    match &config.command {
        CommandOptions::Potential => potential_table(config),
        CommandOptions::Spectrum => spectrum_table(config),
        CommandOptions::Phase { ell_max, potential } => phase_table(config, *ell_max, *potential),
        CommandOptions::CrossSection { k, delta0 } => cross_section_table(config, *k, *delta0),
        CommandOptions::Cusp { c_param, f_param } => cusp_report(config, *c_param, *f_param),
        CommandOptions::Bound { n, ell, steps } => bound_report(config, *n, *ell, *steps),
        CommandOptions::Algebra { ell, basis, beta, order, levels } => {
            algebra_report(config, *ell, *basis, *beta, *order, *levels)
        }
        CommandOptions::Field => field_table(config),
        CommandOptions::TypoLedger => ledger_report(config),
    }
}

// ---------------------------------------------------------------- writers

/// 17 significant digits, round-trip safe.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        let s = format!("{x:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn json_float(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format_float(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::String(format_float(x))
    }
}

/// Rewrites every non-integer number with [`format_float`].
fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n.as_f64().map(json_float).unwrap_or(Value::Number(n)),
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => o.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.into(), s.clone())),
        Value::Null => out.push((prefix.into(), String::new())),
        other => out.push((prefix.into(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_float(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(t) => t.clone(),
    }
}

fn table_json(t: &Table) -> Value {
    Value::Array(
        t.rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = t
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| {
                        let v = match c {
                            Cell::Num(x) => json_float(*x),
                            Cell::Int(i) => Value::from(*i),
                            Cell::Text(s) => Value::from(s.as_str()),
                        };
                        (h.to_string(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect(),
    )
}

/// Renders the emitted file.
pub fn render(config: &RunConfig, produced: &Produced) -> String {
    let config_value = canonical(to_value(config));
    let diagnostics = canonical(produced.diagnostics.clone());
    match config.format {
        Format::Json => {
            let mut top = Map::new();
            top.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
            top.insert("library_version".into(), Value::from(env!("CARGO_PKG_VERSION")));
            top.insert("config".into(), config_value);
            let results = match &produced.payload {
                Payload::Table(t) => table_json(t),
                Payload::Report(v) => canonical(v.clone()),
            };
            top.insert("results".into(), results);
            top.insert("diagnostics".into(), diagnostics);
            if let Some(l) = &produced.typo_ledger {
                top.insert("typo_ledger".into(), canonical(l.clone()));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON renders");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::new();
            s.push_str(&format!("# vacpol {} schema {}\n", env!("CARGO_PKG_VERSION"), SCHEMA_VERSION));
            s.push_str(&format!("# command = {}\n", config.command.name()));
            let t = &config.tolerances;
            s.push_str(&format!(
                "# tolerances = rel_tol {} abs_tol {} max_subdivisions {}\n",
                format_float(t.rel_tol),
                format_float(t.abs_tol),
                t.max_subdivisions
            ));
            let mut pairs = Vec::new();
            flatten("config", &config_value, &mut pairs);
            flatten("diagnostics", &diagnostics, &mut pairs);
            for (k, v) in pairs {
                s.push_str(&format!("# {k} = {v}\n"));
            }
            let table = match &produced.payload {
                Payload::Table(t) => t.clone(),
                Payload::Report(v) => {
                    let mut leaves = Vec::new();
                    flatten("", &canonical(v.clone()), &mut leaves);
                    let rows = leaves
                        .into_iter()
                        .map(|(k, v)| {
                            vec![Cell::Text(k), Cell::Text(v)]
                        })
                        .collect();
                    Table { headers: vec!["key", "value"], rows }
                }
            };
            s.push_str(&table.headers.join(","));
            s.push('\n');
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(|c| csv_field(&cell_text(c))).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s
        }
    }
}

/// Produces and renders; nothing is written.
pub fn run_to_string(config: &RunConfig) -> Result<String, CliError> {
    let produced = produce(config)?;
    Ok(render(config, &produced))
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    let result = fs::File::create(path).and_then(|mut f| {
        f.write_all(text.as_bytes())?;
        f.sync_all()
    });
    result.map_err(|e| {
        let _ = fs::remove_file(path);
        CliError::Io(format!("{}: {e}", path.display()))
    })
}

/// Runs a config end to end and returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    match run_to_string(config) {
        Ok(text) => {
            let written = match &config.output {
                Some(p) => write_output(p, &text),
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Io(e.to_string())),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("vacpol: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            if let Some(p) = &config.output {
                let _ = fs::remove_file(p);
            }
            eprintln!("vacpol: {e}");
            e.exit_code()
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match parse_args(args) {
        Ok(Ok(config)) => run(&config),
        Ok(Err(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("vacpol: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        let mut v = vec!["vacpol"];
        v.extend_from_slice(args);
        parse_args(v).unwrap().unwrap()
    }

    #[test]
    fn grids_and_validation() {
        let g = GridSpec { min: 1.0, max: 100.0, count: 3, spacing: Spacing::Log, units: GridUnits::Atomic };
        let p = g.points();
        assert!((p[1] - 10.0).abs() < 1e-12);
        assert!(GridSpec { count: 1, ..g }.validate("r").is_err());
        assert!(GridSpec { min: 0.0, ..g }.validate("r").is_err());
        let e = parse_args(["vacpol", "potential", "--count", "1"]).unwrap().unwrap();
        assert_eq!(produce(&e).unwrap_err().exit_code(), EXIT_VALIDATION);
        assert!(parse_args(["vacpol", "potential", "--Q", "1", "--q1", "1", "--q2", "1"]).is_err());
        assert!(parse_args(["vacpol", "potential", "-r", "1"]).is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        let v = canonical(json!({ "a": 0.5, "n": 3 }));
        assert_eq!(v.to_string(), r#"{"a":5.0000000000000000e-1,"n":3}"#);
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "# test\nQ = 2\nrmax = 5\ncount = 4\n").unwrap();
        let c = config(&["potential", "--config", path.to_str().unwrap(), "--count", "6"]);
        assert_eq!(c.ctx.charge_product(), 2.0);
        let g = c.grid.unwrap();
        assert_eq!((g.max, g.count), (5.0, 6));
        fs::write(&path, "bogus line\n").unwrap();
        let e = parse_args(["vacpol", "potential", "--config", path.to_str().unwrap()]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_VALIDATION);
    }

    #[test]
    fn potential_csv_layout() {
        let c = config(&["potential", "--rmin", "1e-4", "--rmax", "30", "--count", "5", "--units", "alpha"]);
        let text = run_to_string(&c).unwrap();
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "r,coulomb,uehling,wichmann_kroll,total,source");
        assert_eq!(text.lines().filter(|l| l.ends_with(",closed_form")).count(), 5);
    }
}
