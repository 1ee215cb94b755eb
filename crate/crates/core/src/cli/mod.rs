//! Command-line front end: flag and config parsing, command dispatch and
//! artifact serialization.

pub mod expr;
pub mod svg;
pub mod table;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::Value;

use crate::dynamics::{
    caustic_scan, find_turning_points, sample_trajectory, standing_wave_limit_diagnostic, transformed_mass_velocity,
    turning_loci, uniform_grid, velocity, TrajectorySample, TurningKind,
};
use crate::error::{Error, Result};
use crate::planar::{
    contour_family, contour_of_action, trajectory_y, turning_loci_2d, ContourPolyline, ContourWindow, PlanarSpec,
};
use crate::verify::{self, Suite};
use crate::wave_core::DichromaticSpec;
use svg::{Figure, LineStyle, Series};
use table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Traj,
    Turning,
    Family,
    Mass,
    Contour2d,
    Traj2d,
    Limits,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Contour levels: a spacing (levels `j·spacing` crossing the window) or an
/// explicit list.
#[derive(Debug, Clone, PartialEq)]
pub enum Levels {
    Spacing(f64),
    List(Vec<f64>),
}

/// A fully parsed and validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub amplitude_a: f64,
    pub amplitude_b: f64,
    pub wavenumber: f64,
    pub phase_shift: f64,
    pub hbar: f64,
    pub mass: f64,
    pub tau: f64,
    pub kx: f64,
    pub ky: f64,
    pub y0: f64,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub n: Option<usize>,
    pub betas: Option<Vec<f64>>,
    pub b_list: Option<Vec<f64>>,
    pub levels: Option<Levels>,
    pub window: Option<(f64, f64)>,
    pub epsilons: Vec<f64>,
    pub x_probe: f64,
    pub x_null: f64,
    pub suite: Suite,
}

#[derive(Debug, Parser)]
#[command(name = "dichromatic", version, about = "Trajectories of two interfering plane waves")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Tabulate t(x), momentum, velocity, effective mass and dwell density
    Traj(Flags),
    /// Locate the time reversals of one trajectory
    Turning(Flags),
    /// Turning points over a family of phase shifts
    Family(Flags),
    /// Transformed effective mass and velocity
    Mass(Flags),
    /// Contours of constant reduced action in the plane
    #[command(name = "contour2d")]
    Contour2d(Flags),
    /// Planar trajectory y(x)
    #[command(name = "traj2d")]
    Traj2d(Flags),
    /// Standing-wave limit diagnostic as B approaches A
    Limits(Flags),
    /// Run the invariant suites
    Verify(Flags),
}

#[derive(Debug, Default, Args)]
struct Flags {
    #[arg(long = "A", allow_hyphen_values = true, value_name = "REAL")]
    a: Option<String>,
    #[arg(long = "B", allow_hyphen_values = true, value_name = "REAL")]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    k: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    hbar: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    m: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    tau: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    kx: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    ky: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    y0: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    xmin: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "REAL")]
    xmax: Option<String>,
    /// Number of samples
    #[arg(long, value_name = "INT")]
    n: Option<String>,
    /// Comma-separated phase shifts
    #[arg(long, allow_hyphen_values = true, value_name = "LIST")]
    betas: Option<String>,
    /// Comma-separated B values for a contour family
    #[arg(long, allow_hyphen_values = true, value_name = "LIST")]
    bs: Option<String>,
    /// One spacing (e.g. h/4) or a comma-separated list of action levels
    #[arg(long, allow_hyphen_values = true, value_name = "SPEC")]
    levels: Option<String>,
    /// x window `lo,hi` for planar commands
    #[arg(long, allow_hyphen_values = true, value_name = "LO,HI")]
    window: Option<String>,
    /// Comma-separated decreasing epsilons for `limits`
    #[arg(long, value_name = "LIST")]
    epsilons: Option<String>,
    #[arg(long = "x-probe", allow_hyphen_values = true, value_name = "REAL")]
    x_probe: Option<String>,
    #[arg(long = "x-null", allow_hyphen_values = true, value_name = "REAL")]
    x_null: Option<String>,
    /// all, wave_core, qshje, dynamics, planar or cli
    #[arg(long, value_name = "NAME")]
    suite: Option<String>,
    #[arg(long, value_name = "PATH")]
    output: Option<String>,
    /// csv, json or svg
    #[arg(long, value_name = "FORMAT")]
    format: Option<String>,
    /// JSON file whose keys mirror the flag names
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

const KEYS: [&str; 23] = [
    "A", "B", "k", "beta", "hbar", "m", "tau", "kx", "ky", "y0", "xmin", "xmax", "n", "betas", "bs", "levels",
    "window", "epsilons", "x-probe", "x-null", "suite", "output", "format",
];

impl Flags {
    fn entries(&self) -> [(&'static str, &Option<String>); 23] {
        [
            ("A", &self.a),
            ("B", &self.b),
            ("k", &self.k),
            ("beta", &self.beta),
            ("hbar", &self.hbar),
            ("m", &self.m),
            ("tau", &self.tau),
            ("kx", &self.kx),
            ("ky", &self.ky),
            ("y0", &self.y0),
            ("xmin", &self.xmin),
            ("xmax", &self.xmax),
            ("n", &self.n),
            ("betas", &self.betas),
            ("bs", &self.bs),
            ("levels", &self.levels),
            ("window", &self.window),
            ("epsilons", &self.epsilons),
            ("x-probe", &self.x_probe),
            ("x-null", &self.x_null),
            ("suite", &self.suite),
            ("output", &self.output),
            ("format", &self.format),
        ]
    }
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("--{key}: {msg}"))
}

fn config_scalar(key: &str, value: &Value) -> Result<String> {
    match value {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(invalid(key, "config value must be a number or a string")),
    }
}

/// Flatten a JSON config object into flag-name → token pairs.
fn read_config(path: &PathBuf) -> Result<BTreeMap<&'static str, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("--config: cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("--config: {}: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(Error::InvalidParameter(
            "--config: top level must be a JSON object".into(),
        ));
    };
    let mut out = BTreeMap::new();
    for (key, value) in &map {
        let Some(&name) = KEYS.iter().find(|k| *k == key) else {
            return Err(Error::InvalidParameter(format!("--config: unknown key '{key}'")));
        };
        let token = match value {
            Value::Array(items) => items
                .iter()
                .map(|v| config_scalar(name, v))
                .collect::<Result<Vec<_>>>()?
                .join(","),
            other => config_scalar(name, other)?,
        };
        out.insert(name, token);
    }
    Ok(out)
}

struct Params(BTreeMap<&'static str, String>);

impl Params {
    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn real(&self, key: &str, default: f64) -> Result<f64> {
        self.opt_real(key).map(|v| v.unwrap_or(default))
    }

    fn opt_real(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|t| expr::parse_real(t).map_err(|e| invalid(key, e)))
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|t| expr::parse_list(t).map_err(|e| invalid(key, e)))
            .transpose()
    }
}

impl RunConfig {
    /// Parse command-line arguments (the first item is the program name).
    pub fn from_args<I, T>(args: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidParameter(first_line(&e)))?;
        Self::from_cli(cli)
    }

    fn from_cli(cli: Cli) -> Result<Self> {
        let (command, flags) = match cli.command {
            Sub::Traj(f) => (Command::Traj, f),
            Sub::Turning(f) => (Command::Turning, f),
            Sub::Family(f) => (Command::Family, f),
            Sub::Mass(f) => (Command::Mass, f),
            Sub::Contour2d(f) => (Command::Contour2d, f),
            Sub::Traj2d(f) => (Command::Traj2d, f),
            Sub::Limits(f) => (Command::Limits, f),
            Sub::Verify(f) => (Command::Verify, f),
        };
        let mut merged = match &flags.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        for (key, value) in flags.entries() {
            if let Some(v) = value {
                merged.insert(key, v.clone());
            }
        }
        Self::from_params(command, &Params(merged))
    }

    fn from_params(command: Command, p: &Params) -> Result<Self> {
        let format = match p.get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            "svg" => Format::Svg,
            other => return Err(invalid("format", format!("expected csv, json or svg, got '{other}'"))),
        };
        let hbar = p.real("hbar", 1.0)?;
        let n = p
            .get("n")
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| invalid("n", format!("'{t}' is not a count")))
            })
            .transpose()?;
        let levels = match p.get("levels") {
            None => None,
            Some(t) => {
                let planck = Some(2.0 * PI * hbar);
                let values = t
                    .split(',')
                    .map(|s| expr::parse_real_with(s, planck))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| invalid("levels", e))?;
                if values.len() == 1 {
                    if !(values[0].is_finite() && values[0] > 0.0) {
                        return Err(invalid("levels", "a single value is a spacing and must be positive"));
                    }
                    Some(Levels::Spacing(values[0]))
                } else {
                    Some(Levels::List(values))
                }
            }
        };
        let window = match p.list("window")? {
            None => None,
            Some(v) if v.len() == 2 && v[0] < v[1] => Some((v[0], v[1])),
            Some(_) => return Err(invalid("window", "expected lo,hi with lo < hi")),
        };
        let suite = match p.get("suite") {
            None => Suite::All,
            Some(name) => Suite::parse(name).ok_or_else(|| invalid("suite", format!("unknown suite '{name}'")))?,
        };
        let config = Self {
            command,
            format,
            output: p.get("output").map(PathBuf::from),
            amplitude_a: p.real("A", 1.0)?,
            amplitude_b: p.real("B", 0.5)?,
            wavenumber: p.real("k", PI / 2.0)?,
            phase_shift: p.real("beta", 0.0)?,
            hbar,
            mass: p.real("m", 1.0)?,
            tau: p.real("tau", 0.0)?,
            kx: p.real("kx", PI / 2.0)?,
            ky: p.real("ky", PI / 2.0)?,
            y0: p.real("y0", 0.0)?,
            x_min: p.opt_real("xmin")?,
            x_max: p.opt_real("xmax")?,
            n,
            betas: p.list("betas")?,
            b_list: p.list("bs")?,
            levels,
            window,
            epsilons: p.list("epsilons")?.unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3]),
            x_probe: p.real("x-probe", 0.5)?,
            x_null: p.real("x-null", 1.0)?,
            suite,
        };
        config.validate()?;
        Ok(config)
    }

    /// Check every parameter the command uses against its type invariants.
    pub fn validate(&self) -> Result<()> {
        match self.command {
            Command::Traj | Command::Turning | Command::Family | Command::Mass => {
                self.dichromatic()?;
            }
            Command::Contour2d | Command::Traj2d => {
                self.planar()?;
            }
            Command::Limits => {
                DichromaticSpec::new(self.amplitude_a, 0.0, self.wavenumber)?;
            }
            Command::Verify => {}
        }
        if let Some(n) = self.n {
            if n < 2 {
                return Err(Error::InvalidRange(format!("--n must be at least 2, got {n}")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.x_min, self.x_max) {
            if lo >= hi {
                return Err(Error::InvalidRange(format!("--xmin {lo} must be below --xmax {hi}")));
            }
        }
        if matches!(&self.betas, Some(b) if b.is_empty()) {
            return Err(Error::EmptyFamily);
        }
        Ok(())
    }

    pub fn dichromatic(&self) -> Result<DichromaticSpec> {
        let spec = DichromaticSpec::new(self.amplitude_a, self.amplitude_b, self.wavenumber)?
            .with_phase_shift(self.phase_shift)
            .with_hbar(self.hbar)
            .with_mass(self.mass)
            .with_tau(self.tau);
        spec.validate()?;
        Ok(spec)
    }

    pub fn planar(&self) -> Result<PlanarSpec> {
        let mut spec =
            PlanarSpec::new(self.amplitude_a, self.amplitude_b, self.kx, self.ky)?.with_phase_shift(self.phase_shift);
        spec.hbar = self.hbar;
        spec.mass = self.mass;
        spec.validate()?;
        Ok(spec)
    }

    fn range(&self, lo: f64, hi: f64) -> (f64, f64) {
        (self.x_min.unwrap_or(lo), self.x_max.unwrap_or(hi))
    }
}

/// Result of a command: the serialized artifact and whether it succeeded
/// (only `verify` can produce a document and still fail).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: String,
    pub success: bool,
}

impl Outcome {
    fn ok(document: String) -> Self {
        Self {
            document,
            success: true,
        }
    }
}

struct Artifact {
    table: Table,
    figure: Figure,
}

fn render(artifact: Artifact, format: Format) -> Result<Outcome> {
    let document = match format {
        Format::Csv => table::to_csv(&artifact.table),
        Format::Json => table::to_json(&artifact.table),
        Format::Svg => svg::emit_svg(&artifact.figure)?,
    };
    Ok(Outcome::ok(document))
}

/// Run a validated configuration and return its artifact.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let artifact = match config.command {
        Command::Traj => traj(config)?,
        Command::Turning => turning(config)?,
        Command::Family => family(config)?,
        Command::Mass => mass(config)?,
        Command::Contour2d => contour2d(config)?,
        Command::Traj2d => traj2d(config)?,
        Command::Limits => limits(config)?,
        Command::Verify => {
            let checks = verify::run_suite(config.suite);
            let success = checks.iter().all(|c| c.passed);
            return Ok(Outcome {
                document: verify::report(&checks),
                success,
            });
        }
    };
    render(artifact, config.format)
}

fn figure(title: &str, x_label: &str, y_label: &str, series: Vec<Series>) -> Figure {
    Figure {
        title: title.into(),
        x_label: x_label.into(),
        y_label: y_label.into(),
        series,
    }
}

fn beta_label(beta: f64) -> String {
    let quarters = beta / (PI / 4.0);
    if (quarters - quarters.round()).abs() > 1e-12 {
        return format!("β = {beta}");
    }
    let q = quarters.round() as i64;
    if q == 0 {
        return "β = 0".into();
    }
    let (mut num, mut den) = (q, 4);
    while den > 1 && num % 2 == 0 {
        num /= 2;
        den /= 2;
    }
    let coeff = match num {
        1 => String::new(),
        -1 => "-".into(),
        _ => num.to_string(),
    };
    if den == 1 {
        format!("β = {coeff}π")
    } else {
        format!("β = {coeff}π/{den}")
    }
}

/// Trajectory as (t, x) with breaks at infinite velocity.
fn motion_series(sample: &TrajectorySample, label: String, style: LineStyle) -> Series {
    Series {
        label,
        style,
        points: sample
            .rows
            .iter()
            .map(|r| (!r.xdot.is_infinite()).then_some((r.t, r.x)))
            .collect(),
    }
}

fn wedge_guides(spec: &DichromaticSpec, x_min: f64, x_max: f64) -> Vec<Series> {
    let Ok(slopes) = turning_loci(spec) else {
        return Vec::new();
    };
    [(TurningKind::Upper, "t_u"), (TurningKind::Lower, "t_l")]
        .into_iter()
        .map(|(kind, label)| {
            let pts = [x_min.max(0.0), x_max].map(|x| (slopes.line(spec, kind, x), x));
            Series::from_points(label, LineStyle::Guide, pts)
        })
        .collect()
}

fn traj(config: &RunConfig) -> Result<Artifact> {
    let base = config.dichromatic()?;
    let (x_min, x_max) = config.range(0.0, 10.0);
    let n = config.n.unwrap_or(1001);
    let betas = config.betas.clone().unwrap_or_else(|| vec![base.phase_shift]);
    let samples = betas
        .par_iter()
        .map(|&beta| sample_trajectory(&base.with_phase_shift(beta), x_min, x_max, n))
        .collect::<Result<Vec<_>>>()?;

    let with_beta = config.betas.is_some();
    let columns = ["x", "t", "p", "xdot", "m_q", "dwell_density"];
    let headers: Vec<&'static str> = if with_beta {
        std::iter::once("beta").chain(columns).collect()
    } else {
        columns.to_vec()
    };
    let mut table = Table::new(&headers);
    for (beta, sample) in betas.iter().zip(&samples) {
        for r in &sample.rows {
            let mut row: Vec<Cell> = Vec::with_capacity(headers.len());
            if with_beta {
                row.push((*beta).into());
            }
            row.extend([r.x, r.t, r.p, r.xdot.as_f64(), r.m_q, r.dwell_density].map(Cell::from));
            table.push(row);
        }
    }

    let mut series: Vec<Series> = betas
        .iter()
        .zip(&samples)
        .enumerate()
        .map(|(i, (&beta, s))| {
            let style = if i == 0 { LineStyle::Solid } else { LineStyle::Dashed };
            motion_series(s, beta_label(beta), style)
        })
        .collect();
    series.extend(wedge_guides(&base, x_min, x_max));
    Ok(Artifact {
        table,
        figure: figure("Motion x(t)", "t", "x", series),
    })
}

fn turning(config: &RunConfig) -> Result<Artifact> {
    let spec = config.dichromatic()?;
    let (x_min, x_max) = config.range(0.0, 10.0);
    let points = find_turning_points(&spec, x_min, x_max)?;
    let mut table = Table::new(&["x", "t", "kind", "locus_residual"]);
    for tp in &points {
        table.push(vec![
            tp.x.into(),
            tp.t.into(),
            tp.kind.as_str().into(),
            tp.locus_residual.into(),
        ]);
    }
    let sample = sample_trajectory(&spec, x_min, x_max, config.n.unwrap_or(1001))?;
    let mut series = vec![motion_series(&sample, beta_label(spec.phase_shift), LineStyle::Solid)];
    for kind in [TurningKind::Upper, TurningKind::Lower] {
        series.push(Series::from_points(
            kind.as_str(),
            LineStyle::Markers,
            points.iter().filter(|p| p.kind == kind).map(|p| (p.t, p.x)),
        ));
    }
    series.extend(wedge_guides(&spec, x_min, x_max));
    Ok(Artifact {
        table,
        figure: figure("Turning points", "t", "x", series),
    })
}

fn family(config: &RunConfig) -> Result<Artifact> {
    let base = config.dichromatic()?;
    let (x_min, x_max) = config.range(0.0, 10.0);
    let betas = config
        .betas
        .clone()
        .unwrap_or_else(|| (0..8).map(|j| j as f64 * PI / 4.0).collect());
    let points = caustic_scan(&base, &betas, x_min, x_max)?;
    let mut table = Table::new(&["beta", "x", "t", "side", "dt_dbeta", "wedge_offset"]);
    for p in &points {
        table.push(vec![
            p.beta.into(),
            p.x.into(),
            p.t.into(),
            p.side.as_str().into(),
            p.dt_dbeta.into(),
            p.wedge_offset.into(),
        ]);
    }

    let n = config.n.unwrap_or(1001);
    let samples = betas
        .par_iter()
        .map(|&beta| sample_trajectory(&base.with_phase_shift(beta), x_min, x_max, n))
        .collect::<Result<Vec<_>>>()?;
    let mut series: Vec<Series> = betas
        .iter()
        .zip(&samples)
        .map(|(&beta, s)| motion_series(s, beta_label(beta), LineStyle::Solid))
        .collect();
    series.push(Series::from_points(
        "turning points",
        LineStyle::Markers,
        points.iter().map(|p| (p.t, p.x)),
    ));
    series.extend(wedge_guides(&base, x_min, x_max));
    Ok(Artifact {
        table,
        figure: figure("Phase-shift family", "t", "x", series),
    })
}

fn mass(config: &RunConfig) -> Result<Artifact> {
    let spec = config.dichromatic()?;
    let (x_min, x_max) = config.range(0.0, 10.0);
    let n = config.n.unwrap_or(1001);
    if n < 2 {
        return Err(Error::InvalidRange(format!("need at least 2 samples, got {n}")));
    }
    crate::dynamics::check_range(x_min, x_max)?;
    let xs = uniform_grid(x_min, x_max, n);
    let mut table = Table::new(&["x", "M_Q", "Xdot_T"]);
    let mut mass_series = Series::new("M_Q", LineStyle::Solid);
    let mut velocity_series = Series::new("Xdot", LineStyle::Dashed);
    let mut previous: Option<f64> = None;
    for &x in &xs {
        let (m_q, xdot) = transformed_mass_velocity(&spec, x)?;
        table.push(vec![x.into(), m_q.into(), xdot.into()]);
        mass_series.points.push(Some((x, m_q)));
        let v = velocity(&spec, x)?;
        if v.is_infinite() {
            velocity_series.points.push(None);
            previous = None;
            continue;
        }
        if matches!(previous, Some(p) if p * xdot < 0.0 && (p - xdot).abs() > 1.0) {
            velocity_series.points.push(None);
        }
        velocity_series.points.push(Some((x, xdot)));
        previous = Some(xdot);
    }
    Ok(Artifact {
        table,
        figure: figure(
            "Transformed mass and velocity",
            "x",
            "M_Q, Xdot",
            vec![mass_series, velocity_series],
        ),
    })
}

fn planar_window(config: &RunConfig) -> (f64, f64) {
    config
        .window
        .unwrap_or_else(|| (config.x_min.unwrap_or(-2.0), config.x_max.unwrap_or(2.0)))
}

/// Levels `j·spacing` whose contours enter the square window.
fn levels_in_window(spec: &PlanarSpec, spacing: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    const MAX_LEVELS: f64 = 10_000.0;
    let base = if spec.amplitude_a == spec.amplitude_b {
        spec.with_amplitude_b(0.0)
    } else {
        *spec
    };
    // contour of level 0, shifted by w/(ħ k_y) for level w
    let zero = contour_of_action(&base, 0.0, lo, hi, n)?;
    let (y_min, y_max) = zero
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let scale = spec.hbar * spec.ky;
    let first = (scale * (lo - y_max) / spacing).ceil();
    let last = (scale * (hi - y_min) / spacing).floor();
    if last - first > MAX_LEVELS {
        return Err(invalid("levels", "spacing too fine for the window"));
    }
    Ok((first as i64..=last as i64).map(|j| j as f64 * spacing).collect())
}

fn clipped(points: &[(f64, f64)], lo: f64, hi: f64) -> Vec<Option<(f64, f64)>> {
    let pad = 0.05 * (hi - lo);
    points
        .iter()
        .map(|&(x, y)| (y >= lo - pad && y <= hi + pad).then_some((x, y)))
        .collect()
}

fn contour2d(config: &RunConfig) -> Result<Artifact> {
    let spec = config.planar()?;
    let (lo, hi) = planar_window(config);
    let n = config.n.unwrap_or(401);
    let window = ContourWindow {
        x_min: lo,
        x_max: hi,
        n,
    };
    let levels = match &config.levels {
        Some(Levels::List(v)) => v.clone(),
        Some(Levels::Spacing(s)) => levels_in_window(&spec, *s, lo, hi, n)?,
        None if config.b_list.is_some() => vec![0.0],
        None => levels_in_window(&spec, 2.0 * PI * spec.hbar / 4.0, lo, hi, n)?,
    };

    let mut series = Vec::new();
    let table = if let Some(bs) = &config.b_list {
        let families = levels
            .par_iter()
            .map(|&w| contour_family(&spec, bs, w, window))
            .collect::<Result<Vec<_>>>()?;
        let mut table = Table::new(&["b", "level", "x", "y"]);
        for (i, &b) in bs.iter().enumerate() {
            let mut s = Series::new(format!("B = {b}"), LineStyle::Solid);
            for (w, family) in levels.iter().zip(&families) {
                let c = &family[i];
                for &(x, y) in &c.points {
                    table.push(vec![b.into(), (*w).into(), x.into(), y.into()]);
                }
                s.points.extend(clipped(&c.points, lo, hi));
                s.points.push(None);
            }
            series.push(s);
        }
        table
    } else {
        let contours = levels
            .par_iter()
            .map(|&w| contour_of_action(&spec, w, lo, hi, n))
            .collect::<Result<Vec<ContourPolyline>>>()?;
        let mut table = Table::new(&["level", "x", "y"]);
        let mut s = Series::new("contours", LineStyle::Solid);
        for c in &contours {
            for &(x, y) in &c.points {
                table.push(vec![c.action_value.into(), x.into(), y.into()]);
            }
            s.points.extend(clipped(&c.points, lo, hi));
            s.points.push(None);
        }
        series.push(s);
        let path = uniform_grid(lo, hi, n)
            .into_iter()
            .map(|x| trajectory_y(&spec, config.y0, x).map(|y| (x, y)))
            .collect::<Result<Vec<_>>>()?;
        series.push(Series {
            label: "trajectory".into(),
            style: LineStyle::Dashed,
            points: clipped(&path, lo, hi),
        });
        table
    };
    Ok(Artifact {
        table,
        figure: figure("Contours of constant reduced action", "x", "y", series),
    })
}

fn traj2d(config: &RunConfig) -> Result<Artifact> {
    let spec = config.planar()?;
    let (lo, hi) = planar_window(config);
    crate::dynamics::check_range(lo, hi)?;
    let n = config.n.unwrap_or(401);
    let mut table = Table::new(&["x", "y"]);
    let mut path = Vec::with_capacity(n);
    for x in uniform_grid(lo, hi, n) {
        let y = trajectory_y(&spec, config.y0, x)?;
        table.push(vec![x.into(), y.into()]);
        path.push((x, y));
    }
    let mut series = vec![Series::from_points("trajectory", LineStyle::Solid, path)];
    if let Ok((upper, lower)) = turning_loci_2d(&spec) {
        let ends = [lo.max(0.0), hi.max(0.0)];
        series.push(Series::from_points(
            "y_u",
            LineStyle::Guide,
            ends.map(|x| (x, config.y0 + upper * x)),
        ));
        series.push(Series::from_points(
            "y_l",
            LineStyle::Guide,
            ends.map(|x| (x, config.y0 + lower * x)),
        ));
    }
    Ok(Artifact {
        table,
        figure: figure("Planar trajectory", "x", "y", series),
    })
}

fn limits(config: &RunConfig) -> Result<Artifact> {
    let diag = standing_wave_limit_diagnostic(
        config.amplitude_a,
        &config.epsilons,
        config.wavenumber,
        config.x_probe,
        config.x_null,
    )?;
    let mut table = Table::new(&["branch", "epsilon", "B", "t_probe", "t_null_max", "x_at_max"]);
    let mut series = Vec::new();
    for (name, rows) in [("forward", &diag.forward), ("reversed", &diag.reversed)] {
        for r in rows {
            table.push(vec![
                name.into(),
                r.epsilon.into(),
                r.amplitude_b.into(),
                r.t_probe.into(),
                r.t_null_max.into(),
                r.x_at_max.into(),
            ]);
        }
        let log = |v: f64| v.abs().log10();
        let style = if name == "forward" {
            LineStyle::Solid
        } else {
            LineStyle::Dashed
        };
        series.push(Series::from_points(
            format!("{name} |t_probe|"),
            style,
            rows.iter().map(|r| (log(r.epsilon), log(r.t_probe))),
        ));
        series.push(Series::from_points(
            format!("{name} |t_null_max|"),
            style,
            rows.iter().map(|r| (log(r.epsilon), log(r.t_null_max))),
        ));
    }
    Ok(Artifact {
        table,
        figure: figure("Standing-wave limit", "log10 epsilon", "log10 |t|", series),
    })
}

fn first_line(e: &clap::Error) -> String {
    let rendered = e.render().to_string();
    let line = rendered.lines().next().unwrap_or("invalid arguments");
    line.trim_start_matches("error: ").to_string()
}

fn write_document(config: &RunConfig, document: &str, out: &mut dyn Write) -> Result<()> {
    match &config.output {
        Some(path) => std::fs::write(path, document)?,
        None => out.write_all(document.as_bytes())?,
    }
    Ok(())
}

/// Parse `args`, run the command and report. Returns the process exit
/// status: 0 on success, 1 for invalid input, 2 when the computation fails.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = writeln!(err, "dichromatic: no command given (try --help)");
                    1
                }
                _ => {
                    let _ = writeln!(err, "dichromatic: {}", first_line(&e));
                    1
                }
            };
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| {
        let outcome = run(&config)?;
        write_document(&config, &outcome.document, out)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) if outcome.success => 0,
        Ok(_) => {
            let _ = writeln!(err, "dichromatic: verification failed");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "dichromatic: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}
