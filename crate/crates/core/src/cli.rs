//! Command-line front end. Every subcommand writes plot data as CSV (with `#`
//! header lines carrying the resolved model) or as a JSON object of columns.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::catalog::{CavityModel, Family, ModelSpec};
use crate::error::{Error, Result};
use crate::moore::MooreEvaluator;
use crate::observables::{
    asymptotic_energy, classical_energy, coefficient_table, density_snapshot, total_energy_closed,
    total_energy_piecewise, total_energy_quadrature,
};
use crate::oracle::{verify_model_seeded, DEFAULT_SEED};
use crate::stability::{amplitude_frequency_curve, instability_threshold, max_amplitude, phase_diagram_scan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vibcav", version, about = "Exact vibrating-cavity solutions: trajectories, Moore's function, energy and stability")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wall trajectory: t, L(t), L'(t).
    Trajectory {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Moore's function: tau, R(tau), n(tau).
    Moore {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Energy density snapshot in units of the static Casimir density.
    Density {
        #[command(flatten)]
        model: ModelArgs,
        /// Time of the snapshot [default: 40 T].
        #[arg(long)]
        time: Option<f64>,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Total energy inside the cavity, one column per method.
    Energy {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "quadrature")]
        methods: Vec<EnergyMethod>,
        /// Also emit ln|E| for every method.
        #[arg(long)]
        log: bool,
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Stability verdicts over (omega/omega1, dL/L); boundary curves go to sibling files.
    PhaseDiagram {
        #[arg(long, default_value_t = 1.0)]
        omega_min: f64,
        #[arg(long, default_value_t = 10.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 0.0)]
        amp_min: f64,
        #[arg(long, default_value_t = 1.0)]
        amp_max: f64,
        #[arg(long, default_value_t = 181)]
        nx: usize,
        #[arg(long, default_value_t = 101)]
        ny: usize,
        /// Points per boundary curve.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cross-check the model against the trajectory-only oracle; exit 1 on failure.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Upper end of the sampled time range [default: 40 T].
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Report format [default: json].
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quadratic growth coefficients of the odd-resonance family.
    Coefficients {
        #[arg(long = "M-max", default_value_t = 10)]
        m_max: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, conflicts_with = "model")]
    pub family: Option<Family>,
    #[arg(long = "M")]
    pub m: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, conflicts_with = "theta", allow_hyphen_values = true)]
    pub theta_deg: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v1: Option<f64>,
    /// Static length (static family only).
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub period: Option<f64>,
    /// JSON model description.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Adds this offset to every coefficient of the fundamental map (fault injection).
    #[arg(long, allow_hyphen_values = true)]
    pub map_offset: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RangeArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    /// [default: 10 T]
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnergyMethod {
    Quadrature,
    Piecewise,
    Closed,
    Asymptotic,
    Classical,
}

impl EnergyMethod {
    fn column(self) -> &'static str {
        match self {
            EnergyMethod::Quadrature => "E_quadrature",
            EnergyMethod::Piecewise => "E_piecewise",
            EnergyMethod::Closed => "E_closed",
            EnergyMethod::Asymptotic => "E_asymptotic",
            EnergyMethod::Classical => "E_classical",
        }
    }
}

impl ModelArgs {
    pub fn spec(&self) -> Result<ModelSpec> {
        if let Some(path) = &self.model {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            let mut spec = ModelSpec::from_json(&text)?;
            if let Some(t) = self.period {
                spec.period = t;
            }
            return Ok(spec);
        }
        let family = self
            .family
            .ok_or_else(|| Error::InvalidInput("a model is required: pass --family or --model".into()))?;
        Ok(ModelSpec {
            family,
            m: self.m.unwrap_or(0),
            theta: self.theta.or(self.theta_deg.map(f64::to_radians)),
            v0: self.v0,
            v1: self.v1,
            period: self.period.unwrap_or(PI),
            length: self.length,
        })
    }
}

enum Cell {
    Num(f64),
    Int(i64),
    Text(&'static str),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => (*s).to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

struct Table {
    columns: Vec<(&'static str, &'static str)>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[(&'static str, &'static str)]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn to_csv(&self, model: Option<&ModelSpec>, notes: &[String]) -> String {
        let mut s = String::new();
        if let Some(m) = model {
            s.push_str(&format!("# model: {}\n", m.to_json()));
        }
        for n in notes {
            s.push_str(&format!("# {n}\n"));
        }
        let units: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n} [{u}]")).collect();
        s.push_str(&format!("# columns: {}\n", units.join(", ")));
        let names: Vec<&str> = self.columns.iter().map(|c| c.0).collect();
        s.push_str(&names.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn to_json(&self, model: Option<&ModelSpec>, extra: Map<String, Value>) -> String {
        let mut obj = extra;
        if let Some(m) = model {
            obj.insert("model".into(), serde_json::to_value(m).expect("model serializes"));
        }
        for (k, (name, _)) in self.columns.iter().enumerate() {
            let col: Vec<Value> = self.rows.iter().map(|r| r[k].json()).collect();
            obj.insert((*name).into(), Value::Array(col));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json");
        s.push('\n');
        s
    }

    fn render(&self, format: Format, model: Option<&ModelSpec>) -> String {
        match format {
            Format::Csv => self.to_csv(model, &[]),
            Format::Json => self.to_json(model, Map::new()),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display()))),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            // A closed downstream pipe (e.g. `| head`) is not an error.
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Error::InvalidInput(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t0];
    }
    (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect()
}

fn build(args: &ModelArgs) -> Result<(ModelSpec, CavityModel)> {
    let spec = args.spec()?;
    let mut model = spec.build()?;
    if let Some(offset) = args.map_offset {
        model = model.with_map_offset(offset)?;
    }
    // Echo the resolved model so defaults are recorded.
    Ok((model.spec(), model))
}

fn check_samples(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("sample count {n} must be at least 2")));
    }
    Ok(())
}

fn range(model: &CavityModel, r: &RangeArgs) -> Result<Vec<f64>> {
    check_samples(r.samples)?;
    let t1 = r.t1.unwrap_or(10.0 * model.period);
    if !(t1 > r.t0) || !t1.is_finite() {
        return Err(Error::InvalidInput(format!("empty range [{}, {t1}]", r.t0)));
    }
    Ok(grid(r.t0, t1, r.samples))
}

/// Sibling path `<stem>.<suffix>.<ext>` for auxiliary outputs.
fn sibling(path: &Path, suffix: &str, format: Format) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    path.with_file_name(format!("{stem}.{suffix}.{ext}"))
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Trajectory { model, range: r, out } => {
            let (spec, model) = build(&model)?;
            let ev = MooreEvaluator::new(model.clone());
            let mut table = Table::new(&[("t", "time"), ("L", "length"), ("Ldot", "1")]);
            for t in range(&model, &r)? {
                let v = ev.wall_velocity(t).unwrap_or(f64::NAN);
                table.rows.push(vec![Cell::Num(t), Cell::Num(ev.trajectory(t)), Cell::Num(v)]);
            }
            emit(&out.out, &table.render(out.format, Some(&spec)))?;
        }
        Command::Moore { model, range: r, out } => {
            let (spec, model) = build(&model)?;
            let ev = MooreEvaluator::new(model.clone());
            let mut table = Table::new(&[("tau", "time"), ("R", "time"), ("n", "1")]);
            for tau in range(&model, &r)? {
                table.rows.push(vec![
                    Cell::Num(tau),
                    Cell::Num(ev.moore_eval(tau)),
                    Cell::Int(ev.map_index(tau) as i64),
                ]);
            }
            emit(&out.out, &table.render(out.format, Some(&spec)))?;
        }
        Command::Density { model, time, samples, out } => {
            check_samples(samples)?;
            let (spec, model) = build(&model)?;
            let t = time.unwrap_or(40.0 * model.period);
            let ev = MooreEvaluator::new(model);
            let mut table = Table::new(&[("x", "length"), ("T00", "rho0")]);
            for (x, v) in density_snapshot(&ev, t, samples) {
                table.rows.push(vec![Cell::Num(x), Cell::Num(v)]);
            }
            let text = match out.format {
                Format::Csv => table.to_csv(Some(&spec), &[format!("time: {}", fmt_float(t))]),
                Format::Json => {
                    let mut extra = Map::new();
                    extra.insert("time".into(), json!(t));
                    table.to_json(Some(&spec), extra)
                }
            };
            emit(&out.out, &text)?;
        }
        Command::Energy { model, range: r, methods, log, rel_tol, out } => {
            let (spec, model) = build(&model)?;
            let ts = range(&model, &r)?;
            if methods.contains(&EnergyMethod::Closed) && model.family != Family::LinearOdd {
                return Err(Error::ClosedFormUnavailable(model.family.as_str()));
            }
            let ev = MooreEvaluator::new(model);
            let mut cols = vec![("t", "time")];
            cols.extend(methods.iter().map(|m| (m.column(), "energy")));
            const LOG_NAMES: [&str; 5] =
                ["log_E_quadrature", "log_E_piecewise", "log_E_closed", "log_E_asymptotic", "log_E_classical"];
            if log {
                cols.extend(methods.iter().map(|&m| (LOG_NAMES[m as usize], "1")));
            }
            let mut table = Table::new(&cols);
            for t in ts {
                let mut vals = Vec::with_capacity(methods.len());
                for m in &methods {
                    vals.push(match m {
                        EnergyMethod::Quadrature => total_energy_quadrature(&ev, t, rel_tol)?,
                        EnergyMethod::Piecewise => total_energy_piecewise(&ev, t),
                        EnergyMethod::Closed => total_energy_closed(&ev, t)?,
                        EnergyMethod::Asymptotic => asymptotic_energy(&ev, t).value,
                        EnergyMethod::Classical => classical_energy(&ev, t, rel_tol)?,
                    });
                }
                let mut row = vec![Cell::Num(t)];
                row.extend(vals.iter().map(|&v| Cell::Num(v)));
                if log {
                    row.extend(vals.iter().map(|v| Cell::Num(v.abs().ln())));
                }
                table.rows.push(row);
            }
            emit(&out.out, &table.render(out.format, Some(&spec)))?;
        }
        Command::PhaseDiagram { omega_min, omega_max, amp_min, amp_max, nx, ny, samples, out } => {
            check_samples(nx)?;
            check_samples(ny)?;
            check_samples(samples)?;
            let mut table = Table::new(&[("omega_ratio", "1"), ("amplitude_ratio", "1"), ("verdict", "class")]);
            for p in phase_diagram_scan((omega_min, omega_max), (amp_min, amp_max), (nx, ny)) {
                table.rows.push(vec![
                    Cell::Num(p.omega_ratio),
                    Cell::Num(p.amplitude_ratio),
                    Cell::Text(p.verdict.as_str()),
                ]);
            }
            let curves: [(&str, fn(f64) -> f64); 3] = [
                ("amplitude_frequency", amplitude_frequency_curve),
                ("instability_threshold", instability_threshold),
                ("max_amplitude", max_amplitude),
            ];
            if let Some(path) = &out.out {
                for (name, curve) in curves {
                    let mut c = Table::new(&[("omega_ratio", "1"), ("amplitude_ratio", "1")]);
                    for r in grid(omega_min, omega_max, samples) {
                        c.rows.push(vec![Cell::Num(r), Cell::Num(curve(r))]);
                    }
                    emit(&Some(sibling(path, name, out.format)), &c.render(out.format, None))?;
                }
            }
            emit(&out.out, &table.render(out.format, None))?;
        }
        Command::Verify { model, t_max, samples, seed, format, out } => {
            check_samples(samples)?;
            let (_, model) = build(&model)?;
            let t_max = t_max.unwrap_or(40.0 * model.period);
            let report = verify_model_seeded(&model, t_max, samples, seed);
            let text = match format.unwrap_or(Format::Json) {
                Format::Json => report.to_json() + "\n",
                Format::Csv => {
                    let mut table = Table::new(&[
                        ("check", "name"),
                        ("value", "1"),
                        ("threshold", "1"),
                        ("samples", "1"),
                        ("passed", "bool"),
                    ]);
                    for c in &report.checks {
                        table.rows.push(vec![
                            Cell::Text(c.name),
                            Cell::Num(c.value),
                            Cell::Num(c.threshold),
                            Cell::Int(c.samples as i64),
                            Cell::Text(if c.passed { "true" } else { "false" }),
                        ]);
                    }
                    table.to_csv(Some(&report.model), &[format!("seed: {seed}"), format!("passed: {}", report.passed)])
                }
            };
            emit(&out, &text)?;
            if !report.passed {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("check {} failed: {} > {}", c.name, fmt_float(c.value), fmt_float(c.threshold));
                }
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Coefficients { m_max, out } => {
            let mut table = Table::new(&[("M", "1"), ("quantum", "pi tan^2(theta)/(12L)"), ("classical", "pi tan^2(theta)/(12L)"), ("sum", "pi tan^2(theta)/(12L)")]);
            for row in coefficient_table(m_max) {
                table.rows.push(vec![
                    Cell::Int(row.m as i64),
                    Cell::Num(row.quantum),
                    Cell::Num(row.classical),
                    Cell::Num(row.sum),
                ]);
            }
            emit(&out.out, &table.render(out.format, None))?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the subcommand, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
