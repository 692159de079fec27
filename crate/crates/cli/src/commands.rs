//! One function per subcommand, each returning a JSON report.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use serde_json::{json, Map, Value};

use lcs_lab::calculus::{
    parse_form_json, parse_one_form, structural_identities_report, ConformalStructure, Form, Grid, SemiForm, Space,
    TrigPoly,
};
use lcs_lab::dynamics::{
    displaceability_check, moser_flow, moser_refinement, trajectories_csv, DisplaceConfig, MoserConfig, MoserProblem,
};
use lcs_lab::families::{
    beta_critical_points, build_pipeline, lagrangian_from_family, theorem_bound_report, FamilyFunction,
    GeneratingFamily, LagrangianConfig, PipelineConfig, SearchConfig,
};
use lcs_lab::novikov::io::{parse_cocycle, parse_complex};
use lcs_lab::novikov::{self as nv, circle_morse_novikov, subdivision_complex, verify_duality, CellComplex, Cocycle};
use lcs_lab::ring::FieldTag;

use crate::Output;

pub const SCHEMA: &str = "lcs-lab/1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] lcs_lab::Error),
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
    #[error("{path}: invalid JSON: {message}")]
    Json { path: String, message: String },
    #[error("{flag} = {value} is outside {range}")]
    OutOfRange { flag: &'static str, value: String, range: &'static str },
    #[error("unknown field '{0}' (use Q or F2)")]
    Field(String),
}

impl CliError {
    pub fn kind(&self) -> String {
        match self {
            CliError::Lib(e) => e.kind(),
            CliError::Read { .. } => "io.Read".into(),
            CliError::Write { .. } => "io.Write".into(),
            CliError::Json { .. } => "input.Json".into(),
            CliError::OutOfRange { .. } => "input.OutOfRange".into(),
            CliError::Field(_) => "input.Field".into(),
        }
    }
}

fn lib<E: Into<lcs_lab::Error>>(e: E) -> CliError {
    CliError::Lib(e.into())
}

/// A JSON report plus an optional CSV artifact.
pub struct Report {
    json: Value,
    out: Option<PathBuf>,
    csv: Option<(PathBuf, String)>,
}

impl Report {
    fn new(command: &str, out: &Output, body: Value) -> Report {
        let mut map = Map::new();
        map.insert("schema".into(), SCHEMA.into());
        map.insert("command".into(), command.into());
        if let Value::Object(fields) = body {
            map.extend(fields);
        }
        Report {
            json: Value::Object(map),
            out: out.out.clone(),
            csv: None,
        }
    }

    pub fn write(self) -> Result<(), CliError> {
        if let Some((path, text)) = &self.csv {
            write_file(path, text)?;
        }
        let text = serde_json::to_string_pretty(&self.json).expect("JSON values serialize") + "\n";
        match &self.out {
            Some(path) => write_file(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn field(s: &str) -> Result<FieldTag, CliError> {
    FieldTag::parse(s).ok_or_else(|| CliError::Field(s.into()))
}

fn in_range<T: PartialOrd + ToString>(
    flag: &'static str,
    value: T,
    lo: T,
    hi: T,
    range: &'static str,
) -> Result<T, CliError> {
    if value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(CliError::OutOfRange {
            flag,
            value: value.to_string(),
            range,
        })
    }
}

fn positive(flag: &'static str, value: f64, hi: f64, range: &'static str) -> Result<f64, CliError> {
    if value > 0.0 && value <= hi {
        Ok(value)
    } else {
        Err(CliError::OutOfRange {
            flag,
            value: value.to_string(),
            range,
        })
    }
}

fn one_form(text: &str, angles: usize) -> Result<Form, CliError> {
    parse_one_form(text, angles).map_err(lib)
}

// ------------------------------------------------------------------ novikov

#[derive(Args, Debug)]
pub struct NovikovArgs {
    /// Cell complex JSON.
    #[arg(long, value_name = "PATH")]
    complex: PathBuf,
    /// Cocycle JSON `{"edge_values": [...]}`; the zero class if omitted.
    #[arg(long, value_name = "PATH")]
    cocycle: Option<PathBuf>,
    /// Coefficient field: Q or F2.
    #[arg(long, default_value = "Q")]
    field: String,
    #[command(flatten)]
    output: Output,
}

fn load_novikov(a: &NovikovArgs) -> Result<(CellComplex, Cocycle, FieldTag), CliError> {
    let cx = parse_complex(&read(&a.complex)?).map_err(lib)?;
    let c = match &a.cocycle {
        Some(p) => parse_cocycle(&read(p)?).map_err(lib)?,
        None => Cocycle::zero(cx.num_edges()),
    };
    Ok((cx, c, field(&a.field)?))
}

pub fn novikov_betti(a: &NovikovArgs) -> Result<Report, CliError> {
    let (cx, c, f) = load_novikov(a)?;
    let b = novikov_betti_checked(&cx, &c, f)?;
    Ok(Report::new(
        "novikov-betti",
        &a.output,
        json!({
            "betti": b.betti,
            "total": b.total(),
            "field": f,
            "euler_characteristic": cx.euler_characteristic(),
            "cocycle": c.values().iter().map(ToString::to_string).collect::<Vec<_>>(),
        }),
    ))
}

fn novikov_betti_checked(
    cx: &CellComplex,
    c: &Cocycle,
    f: FieldTag,
) -> Result<lcs_lab::novikov::NovikovBetti, CliError> {
    nv::novikov_betti(cx, c, f).map_err(lib)
}

pub fn duality_check(a: &NovikovArgs) -> Result<Report, CliError> {
    let (cx, c, f) = load_novikov(a)?;
    let dual = verify_duality(&cx, &c, f).map_err(lib)?;
    let b = novikov_betti_checked(&cx, &c, f)?;
    Ok(Report::new(
        "duality-check",
        &a.output,
        json!({ "dual": dual, "betti": b.betti, "field": f }),
    ))
}

// ---------------------------------------------------------------- identities

#[derive(Args, Debug)]
pub struct IdentitiesArgs {
    /// Lee form β on T^n; the structure is T*_β T^n with ω = d_β(p dq).
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Minimum torus dimension n.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Grid points per circle, 2..=128.
    #[arg(long, default_value_t = 12)]
    per_circle: usize,
    /// Grid points per fiber line, 2..=33.
    #[arg(long, default_value_t = 5)]
    per_line: usize,
    /// Fiber box half-width, (0, 100].
    #[arg(long, default_value_t = 4.0)]
    line_box: f64,
    /// Seed for the random Cartan and gauge data.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

pub fn identities(a: &IdentitiesArgs) -> Result<Report, CliError> {
    let grid = Grid {
        per_circle: in_range("--per-circle", a.per_circle, 2, 128, "2..=128")?,
        per_line: in_range("--per-line", a.per_line, 2, 33, "2..=33")?,
        line_box: positive("--line-box", a.line_box, 100.0, "(0, 100]")?,
    };
    let beta = one_form(&a.beta, a.dim)?;
    let (st, lambda) = ConformalStructure::cotangent(&beta, grid).map_err(lib)?;
    let closedness = st.closedness_residual().map_err(lib)?;
    let report = structural_identities_report(&st, &SemiForm::plain(lambda), a.seed).map_err(lib)?;
    let mut body = to_value(&report);
    body["closedness_residual"] = closedness.into();
    body["dim"] = beta.angles().into();
    Ok(Report::new("identities", &a.output, body))
}

// --------------------------------------------------------------------- moser

#[derive(Args, Debug)]
pub struct MoserArgs {
    /// Lee form η on T^n.
    #[arg(long, default_value = "1/2 dq1", allow_hyphen_values = true)]
    eta: String,
    /// Starting primitive λ₀.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    lambda0: String,
    /// Final primitive λ₁.
    #[arg(long, default_value = "0.1 sin(q1) dq2", allow_hyphen_values = true)]
    lambda1: String,
    /// ω₀ as form JSON; defaults to dq1∧dq2 + dq3∧dq4 + ….
    #[arg(long, value_name = "PATH")]
    omega0: Option<PathBuf>,
    /// Torus dimension, even.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// RK4 step, (0, 0.1].
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Finite-difference step for pushed-forward frames, (0, 0.1].
    #[arg(long, default_value_t = 1e-3)]
    fd_step: f64,
    /// Seeds per circle, 1..=64.
    #[arg(long, default_value_t = 32)]
    seeds: usize,
    /// Also run (4dt, 4h) and (2dt, 2h) and report monotonicity.
    #[arg(long)]
    refine: bool,
    /// Trajectory CSV with columns t, q…, f_t.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

pub fn moser(a: &MoserArgs) -> Result<Report, CliError> {
    let n = a.dim;
    let space = Space::torus(n);
    let omega0 = match &a.omega0 {
        Some(p) => parse_form_json(&read_json(p)?, &space).map_err(lib)?,
        None => Form::from_terms(
            &space,
            2,
            (0..n / 2).map(|i| (vec![2 * i, 2 * i + 1], TrigPoly::from_int(n, 0, 1))),
        ),
    };
    let prob = MoserProblem::new(
        one_form(&a.eta, n)?,
        omega0,
        one_form(&a.lambda0, n)?,
        one_form(&a.lambda1, n)?,
    )
    .map_err(lib)?;
    let cfg = MoserConfig {
        dt: positive("--dt", a.dt, 0.1, "(0, 0.1]")?,
        fd_step: positive("--fd-step", a.fd_step, 0.1, "(0, 0.1]")?,
        seeds_per_circle: in_range("--seeds", a.seeds, 1, 64, "1..=64")?,
        ..MoserConfig::default()
    };
    let flow = moser_flow(&prob, &cfg).map_err(lib)?;
    let mut body = json!({ "dim": n, "report": to_value(&flow.report) });
    if a.refine {
        let levels = [(4.0 * cfg.dt, 4.0 * cfg.fd_step), (2.0 * cfg.dt, 2.0 * cfg.fd_step), (cfg.dt, cfg.fd_step)];
        body["refinement"] = to_value(&moser_refinement(&prob, &cfg, &levels).map_err(lib)?);
    }
    let mut report = Report::new("moser", &a.output, body);
    if let Some(path) = &a.csv {
        let names: Vec<String> = space.names().to_vec();
        report.csv = Some((path.clone(), trajectories_csv(&names, &flow.trajectories)));
    }
    Ok(report)
}

// ------------------------------------------------------------------ displace

#[derive(Args, Debug)]
pub struct DisplaceArgs {
    /// Lee form β on T^n.
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Minimum torus dimension n.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Largest flow time, (0, 100].
    #[arg(long, default_value_t = 1.0)]
    tmax: f64,
    /// Equally spaced sample times up to tmax, 1..=1000.
    #[arg(long, default_value_t = 10)]
    samples: usize,
    /// RK4 step, (0, 1].
    #[arg(long, default_value_t = 1e-2)]
    dt: f64,
    /// Zero-section seeds per circle, 1..=512.
    #[arg(long, default_value_t = 16)]
    per_circle: usize,
    #[command(flatten)]
    output: Output,
}

pub fn displace(a: &DisplaceArgs) -> Result<Report, CliError> {
    let beta = one_form(&a.beta, a.dim)?;
    let cfg = DisplaceConfig {
        dt: positive("--dt", a.dt, 1.0, "(0, 1]")?,
        per_circle: in_range("--per-circle", a.per_circle, 1, 512, "1..=512")?,
        ..DisplaceConfig::up_to(
            positive("--tmax", a.tmax, 100.0, "(0, 100]")?,
            in_range("--samples", a.samples, 1, 1000, "1..=1000")?,
        )
    };
    let report = displaceability_check(&beta, &cfg).map_err(lib)?;
    let mut body = to_value(&report);
    body["dim"] = beta.angles().into();
    Ok(Report::new("displace", &a.output, body))
}

// ------------------------------------------------------------------ families

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Newton seeds per circle, 2..=1024.
    #[arg(long, default_value_t = 64)]
    per_circle: usize,
    /// Newton seeds per fiber axis, 1..=257.
    #[arg(long, default_value_t = 33)]
    per_fiber: usize,
    /// Newton residual tolerance, (0, 1e-3].
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl SearchArgs {
    fn config(&self) -> Result<SearchConfig, CliError> {
        Ok(SearchConfig {
            per_circle: in_range("--per-circle", self.per_circle, 2, 1024, "2..=1024")?,
            per_fiber: in_range("--per-fiber", self.per_fiber, 1, 257, "1..=257")?,
            tol: positive("--tol", self.tol, 1e-3, "(0, 1e-3]")?,
            ..SearchConfig::default()
        })
    }
}

fn load_family(path: &Path) -> Result<GeneratingFamily, CliError> {
    GeneratingFamily::from_json(&read_json(path)?).map_err(lib)
}

#[derive(Args, Debug)]
pub struct GfArgs {
    /// Generating family JSON.
    #[arg(long, value_name = "PATH")]
    family: PathBuf,
    /// Closed 1-form β on the base torus.
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Also build the smoothed pipeline G, H, γ.
    #[arg(long)]
    pipeline: bool,
    /// Also count intersections of L_F with the zero section.
    #[arg(long)]
    lagrangian: bool,
    /// Pipeline ε, (0, 10].
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Smoothing δ as a fraction of ε, (0, 1].
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: Output,
}

pub fn gf_critical(a: &GfArgs) -> Result<Report, CliError> {
    let family = load_family(&a.family)?;
    let beta = one_form(&a.beta, family.base_dim())?;
    let search = a.search.config()?;
    let found = beta_critical_points(&family, &beta, &search).map_err(lib)?;
    let mut body = json!({
        "count": found.count(),
        "points": to_value(&found.points),
        "warnings": to_value(&found.warnings),
        "seeds": found.seeds,
        "converged_seeds": found.converged_seeds,
        "exact_on_grid": found.exact_on_grid,
        "min_separation": found.min_separation,
    });
    if a.pipeline {
        let cfg = PipelineConfig {
            epsilon: positive("--epsilon", a.epsilon, 10.0, "(0, 10]")?,
            smoothing_delta: positive("--delta", a.delta, 1.0, "(0, 1]")?,
            search: search.clone(),
            ..PipelineConfig::default()
        };
        body["pipeline"] = to_value(&build_pipeline(&family, &beta, &cfg).map_err(lib)?.summary());
    }
    if a.lagrangian {
        let l = lagrangian_from_family(&family, &beta, &LagrangianConfig::default()).map_err(lib)?;
        body["lagrangian"] = json!({
            "count": l.count,
            "intersections": to_value(&l.intersections),
            "samples": l.samples.len(),
            "flagged": l.flagged,
            "warnings": l.warnings,
        });
    }
    Ok(Report::new("gf-critical", &a.output, body))
}

#[derive(Args, Debug)]
pub struct TheoremArgs {
    /// Generating family JSON.
    #[arg(long, value_name = "PATH")]
    family: PathBuf,
    /// Closed 1-form β on the base torus.
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Cell complex of the base torus.
    #[arg(long, value_name = "PATH")]
    complex: PathBuf,
    /// Cocycle JSON; derived from the periods of β when omitted.
    #[arg(long, value_name = "PATH")]
    cocycle: Option<PathBuf>,
    /// Coefficient field: Q or F2.
    #[arg(long, default_value = "Q")]
    field: String,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: Output,
}

pub fn theorem_check(a: &TheoremArgs) -> Result<Report, CliError> {
    let family = load_family(&a.family)?;
    let beta = one_form(&a.beta, family.base_dim())?;
    let cx = parse_complex(&read(&a.complex)?).map_err(lib)?;
    let cocycle = match &a.cocycle {
        Some(p) => Some(parse_cocycle(&read(p)?).map_err(lib)?),
        None => None,
    };
    let report = theorem_bound_report(&family, &beta, &cx, cocycle.as_ref(), field(&a.field)?, &a.search.config()?)
        .map_err(lib)?;
    Ok(Report::new("theorem-check", &a.output, to_value(&report)))
}

// ------------------------------------------------------------------ circle

#[derive(Args, Debug)]
pub struct CircleArgs {
    /// The 1-form f(θ)dθ, written in q.
    #[arg(long, allow_hyphen_values = true)]
    eta: String,
    /// Integral class of the form; its sign must match the mean of f.
    #[arg(long, allow_hyphen_values = true)]
    period: i64,
    /// Coefficient field: Q or F2.
    #[arg(long, default_value = "Q")]
    field: String,
    #[command(flatten)]
    output: Output,
}

pub fn circle_mn(a: &CircleArgs) -> Result<Report, CliError> {
    let f = field(&a.field)?;
    let eta = one_form(&a.eta, 1)?;
    let mn = circle_morse_novikov(&eta, a.period, f).map_err(lib)?;
    let (cx, c) = subdivision_complex(mn.zeros.len().max(1), a.period);
    let sub = novikov_betti_checked(&cx, &c, f)?;
    let d = &mn.differential;
    let differential: Vec<Vec<String>> = (0..d.rows())
        .map(|i| (0..d.cols()).map(|j| d.get(i, j).to_string()).collect())
        .collect();
    Ok(Report::new(
        "circle-mn",
        &a.output,
        json!({
            "period": a.period,
            "field": f,
            "zeros": to_value(&mn.zeros),
            "minima": mn.minima,
            "maxima": mn.maxima,
            "differential": differential,
            "betti": mn.betti.betti,
            "subdivision_betti": sub.betti,
            "agrees": sub.betti == mn.betti.betti,
        }),
    ))
}
