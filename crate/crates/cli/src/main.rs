//! `warpbench` command-line front end.
//!
//! Exit codes: 0 ok/pass, 1 error, 2 verification failed, 3 Riccati
//! blow-up, 4 fiber mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use warpbench::analysis::{
    classify_rigidity, classify_scenario, empirical_estimate, hypotheses_from_ansatz,
    soliton_presets, EstimateConfig, EstimateProblem, Evidence, HypothesisInput, Scenario,
};
use warpbench::catalog;
use warpbench::solver::{construct, ConstructionDoc};
use warpbench::system::{grid_rows, verify, ResidualReport, VerifyOptions};
use warpbench::{Error, Grid, WarpedAnsatz};

#[derive(Parser)]
#[command(
    name = "warpbench",
    version,
    about = "Gradient Einstein-type warped product workbench"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Evaluation grid `a:b:n`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Tolerance for the reduced residuals.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Use the scalar curvature without the fiber term.
    #[arg(long, global = true)]
    literal_prop2: bool,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a catalog entry or ansatz file against the reduced system.
    Verify { input: String },
    /// Integrate the potential equation from a construction file.
    Construct { spec: PathBuf },
    /// Rigidity / nonexistence verdict from signs, a preset or an ansatz.
    Classify(ClassifyArgs),
    /// Empirical gradient-estimate probe on the Lichnerowicz data.
    Estimate(EstimateArgs),
    /// Residuals on a grid, for plotting.
    Export { input: String },
    /// Catalog ids.
    List,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Hypothesis JSON file, ansatz file or catalog id.
    input: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, conflicts_with_all = ["expanding", "shrinking", "lambda"])]
    steady: bool,
    #[arg(long, conflicts_with_all = ["shrinking", "lambda"])]
    expanding: bool,
    #[arg(long, conflicts_with = "lambda")]
    shrinking: bool,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    base_scalar: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    fiber_scalar: Option<f64>,
    /// Shorthand for `--ricci-w asserted`.
    #[arg(long, conflicts_with = "ricci_w")]
    ricci_w_nonneg: bool,
    #[arg(long, value_parser = parse_evidence)]
    ricci_w: Option<Evidence>,
    #[arg(long, value_parser = parse_evidence)]
    growth: Option<Evidence>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
}

#[derive(Args)]
struct EstimateArgs {
    /// Catalog id (optionally `<id>-lich`) or ansatz file.
    input: String,
    #[arg(long = "R", default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x0: f64,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

fn parse_evidence(s: &str) -> std::result::Result<Evidence, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("expected one of verified, asserted, violated, unknown; got `{s}`"))
}

/// A verify/export input file: a bare ansatz or `{ "ansatz": …, "grid": … }`.
#[derive(Deserialize)]
#[serde(untagged)]
enum AnsatzFile {
    Wrapped {
        ansatz: WarpedAnsatz,
        grid: Option<Grid>,
    },
    Bare(WarpedAnsatz),
}

#[derive(Serialize)]
struct Constructed<'a> {
    ansatz: &'a WarpedAnsatz,
    grid: Grid,
    report: &'a ResidualReport,
}

#[derive(Serialize)]
struct ListRow<'a> {
    id: &'a str,
    completeness_note: &'a str,
    description: &'a str,
    grid: Grid,
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text).map_err(|e| parse_err(path, e))?)
}

/// Catalog id or JSON file, with the grid to evaluate on.
fn load_ansatz(input: &str, g: &Global) -> Result<(WarpedAnsatz, Grid)> {
    let explicit = g.grid.as_deref().map(Grid::parse).transpose()?;
    if catalog::IDS.contains(&input) {
        let e = catalog::entry(input)?;
        return Ok((e.ansatz, explicit.unwrap_or(e.grid)));
    }
    let path = Path::new(input);
    if !path.exists() {
        return Err(Error::UnknownId(input.to_string()).into());
    }
    let (a, grid) = match read_json::<AnsatzFile>(path)? {
        AnsatzFile::Wrapped { ansatz, grid } => (ansatz, grid),
        AnsatzFile::Bare(a) => (a, None),
    };
    let grid = match explicit.or(grid) {
        Some(g) => g,
        None => {
            let d = a.domain();
            if !(d.lo.is_finite() && d.hi.is_finite() && d.closed) {
                return Err(Error::Parse(format!(
                    "{input}: ansatz domain is not a closed interval; pass --grid"
                ))
                .into());
            }
            Grid::new(d.lo, d.hi, 401)?
        }
    };
    Ok((a, grid))
}

fn verify_options(g: &Global) -> VerifyOptions {
    let mut o = g.tol.map(VerifyOptions::with_tol).unwrap_or_default();
    o.fiber_in_scalar = !g.literal_prop2;
    o
}

fn emit(g: &Global, body: &[u8]) -> Result<()> {
    match &g.out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(body)?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(g: &Global, v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    emit(g, s.as_bytes())
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit_csv(g: &Global, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.into_iter().map(num))?;
    }
    emit(g, &w.into_inner()?)
}

fn cmd_verify(input: &str, g: &Global) -> Result<u8> {
    let (a, grid) = load_ansatz(input, g)?;
    let report = verify(&a, &grid, &verify_options(g))?;
    if g.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["equation", "sup", "argmax"])?;
        for (eq, s) in &report.per_equation {
            w.write_record([eq.clone(), num(s.sup), num(s.argmax)])?;
        }
        emit(g, &w.into_inner()?)?;
    } else {
        emit_json(g, &report)?;
    }
    Ok(if report.pass { 0 } else { 2 })
}

fn cmd_construct(spec: &Path, g: &Global) -> Result<u8> {
    let mut doc: ConstructionDoc = read_json(spec)?;
    if let Some(s) = &g.grid {
        let grid = Grid::parse(s)?;
        doc.grid.xi_min = grid.min;
        doc.grid.xi_max = grid.max;
        doc.solver.verify_points = grid.count;
    }
    if let Some(t) = g.tol {
        doc.solver.verify_tol = t;
    }
    if g.literal_prop2 {
        doc.solver.fiber_in_scalar = false;
    }
    let (spec, fiber) = doc.into_parts();
    let c = construct(&spec, &fiber)?;
    emit_json(
        g,
        &Constructed {
            ansatz: &c.ansatz,
            grid: c.report.grid,
            report: &c.report,
        },
    )?;
    Ok(if c.report.pass { 0 } else { 2 })
}

fn cmd_classify(args: &ClassifyArgs, g: &Global) -> Result<u8> {
    if let Some(input) = &args.input {
        let path = Path::new(input);
        if !catalog::IDS.contains(&input.as_str()) && path.exists() {
            let text = fs::read_to_string(path)?;
            if let Ok(h) = serde_json::from_str::<HypothesisInput>(&text) {
                emit_json(g, &classify_rigidity(&h.complete()?))?;
                return Ok(0);
            }
        }
        let (a, grid) = load_ansatz(input, g)?;
        let auto = hypotheses_from_ansatz(&a, &grid)?;
        let verdict = classify_rigidity(&auto.input.complete()?);
        emit_json(
            g,
            &serde_json::json!({ "hypotheses": auto, "verdict": verdict }),
        )?;
        return Ok(0);
    }
    let Some(name) = &args.preset else {
        return Err(
            Error::IncompleteHypotheses("an input file, catalog id or --preset".into()).into(),
        );
    };
    let mut s = Scenario::new(soliton_presets(name, args.n, args.m)?);
    s.lambda = match (args.steady, args.expanding, args.shrinking) {
        (true, _, _) => Some(0.0),
        (_, true, _) => Some(-1.0),
        (_, _, true) => Some(1.0),
        _ => args.lambda,
    };
    s.base_scalar = args.base_scalar;
    s.fiber_scalar = args.fiber_scalar;
    // preset scenarios take the analytic side conditions as given unless told otherwise
    s.ricci_w_nonneg = if args.ricci_w_nonneg {
        Evidence::Asserted
    } else {
        args.ricci_w.unwrap_or(Evidence::Asserted)
    };
    s.growth_ok = args.growth.unwrap_or(Evidence::Asserted);
    emit_json(g, &classify_scenario(&s)?)?;
    Ok(0)
}

fn cmd_estimate(args: &EstimateArgs, g: &Global) -> Result<u8> {
    let id = args.input.strip_suffix("-lich").unwrap_or(&args.input);
    let (a, _) = load_ansatz(id, g)?;
    let pb = EstimateProblem::lichnerowicz(&a)?;
    let mut cfg = EstimateConfig {
        x0: args.x0,
        ..EstimateConfig::with_radius(args.radius)
    };
    if let Some(p) = args.p {
        cfg.p = p;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    if let Some(n) = args.points {
        cfg.points = n;
    }
    if let Some(t) = g.tol {
        cfg.residual_tol = t;
    }
    let r = empirical_estimate(&cfg, &pb)?;
    if g.json {
        emit_json(g, &r)?;
    } else {
        let rows = r
            .rows
            .iter()
            .map(|w| vec![w.xi, w.u, w.grad_ln_u, w.bracket, w.local_c]);
        emit_csv(g, &["xi", "u", "grad_ln_u", "bracket", "local_C"], rows)?;
    }
    Ok(0)
}

fn cmd_export(input: &str, g: &Global) -> Result<u8> {
    let (a, grid) = load_ansatz(input, g)?;
    let rows = grid_rows(&a, &grid, &verify_options(g))?;
    if g.json {
        emit_json(g, &rows)?;
    } else {
        let rows = rows
            .iter()
            .map(|r| vec![r.xi, r.ode1, r.ode2, r.ode3, r.theta_implied]);
        emit_csv(g, &["xi", "ode1", "ode2", "ode3", "theta_implied"], rows)?;
    }
    Ok(0)
}

fn cmd_list(g: &Global) -> Result<u8> {
    let entries = catalog::all();
    let rows: Vec<ListRow> = entries
        .iter()
        .map(|e| ListRow {
            id: &e.id,
            completeness_note: &e.completeness_note,
            description: &e.description,
            grid: e.grid,
        })
        .collect();
    if g.json {
        emit_json(g, &rows)?;
    } else {
        let mut s = String::new();
        for r in rows {
            s.push_str(&format!(
                "{:<12} {:<11} {}\n",
                r.id, r.completeness_note, r.description
            ));
        }
        emit(g, s.as_bytes())?;
    }
    Ok(0)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BlowUp { .. }) => 3,
        Some(Error::FiberMismatch { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let res = match &cli.cmd {
        Cmd::Verify { input } => cmd_verify(input, g),
        Cmd::Construct { spec } => cmd_construct(spec, g),
        Cmd::Classify(a) => cmd_classify(a, g),
        Cmd::Estimate(a) => cmd_estimate(a, g),
        Cmd::Export { input } => cmd_export(input, g),
        Cmd::List => cmd_list(g),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
