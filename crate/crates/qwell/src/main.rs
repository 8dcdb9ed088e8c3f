//! Command-line front end: figure data as CSV, certification and spectral
//! reports as flat JSON. Exit codes: 0 success/pass, 1 usage, 2 numeric
//! failure, 3 strict-mode certification failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwell::asymmetry::{q_closed_form_sech, q_quotient, QuadratureConfig};
use qwell::certify::certify_family;
use qwell::funcalg::{FunctionExpr, PrimitiveKind};
use qwell::groundmap::{convex_potential, convex_state, ConvexFamilySpec, GroundState};
use qwell::spectral::{low_spectrum, two_level_check, Grid, Method};
use qwell::Error;
use serde::Deserialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qwell", version, about = "Double-well potentials from prescribed ground states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit x, V(x) for one family member
    Potential(CommonArgs),
    /// Emit x, psi^2(x) (unit mass on the grid) for one family member
    Density(CommonArgs),
    /// Sweep alpha: closed-form Q, quadrature Q, and the Q(a)/Q(1-a) ratio
    Qscan(CommonArgs),
    /// Run the epsilon/M certification pipeline on the sech pair
    Certify(CommonArgs),
    /// Solve the discretized operator: low eigenvalues and overlap diagnostics
    Solve(CommonArgs),
    /// Four potential curves, D = 3: (k, alpha) in (1, .5), (1, .1), (.7, .5), (.7, .1)
    Figure1(CommonArgs),
    /// Ground-state densities for the same four parameter sets
    Figure2(CommonArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Report,
}

#[derive(Args)]
struct CommonArgs {
    /// Optional JSON config with the same keys as the flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long = "D", allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long = "M", allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    #[arg(long = "x-min", allow_negative_numbers = true)]
    x_min: Option<f64>,
    #[arg(long = "x-max", allow_negative_numbers = true)]
    x_max: Option<f64>,
    /// Comma-separated alpha sweep for qscan
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Exit nonzero unless every pass flag is true
    #[arg(long)]
    strict: bool,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    k: Option<f64>,
    #[serde(rename = "D")]
    d: Option<f64>,
    alpha: Option<f64>,
    epsilon: Option<f64>,
    #[serde(rename = "M")]
    m: Option<f64>,
    grid_n: Option<usize>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    alphas: Option<Vec<f64>>,
}

/// Fully resolved parameters: flag, else config, else default.
struct Params {
    k: f64,
    d: f64,
    alpha: f64,
    epsilon: f64,
    m: f64,
    grid_n: usize,
    x_min: f64,
    x_max: f64,
    alphas: Vec<f64>,
}

enum CliError {
    Usage(String),
    Numeric(Error),
    StrictFail,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

fn resolve(args: &CommonArgs) -> Result<Params, CliError> {
    let cfg: ConfigFile = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let p = Params {
        k: args.k.or(cfg.k).unwrap_or(1.0),
        d: args.d.or(cfg.d).unwrap_or(3.0),
        alpha: args.alpha.or(cfg.alpha).unwrap_or(0.5),
        epsilon: args.epsilon.or(cfg.epsilon).unwrap_or(0.01),
        m: args.m.or(cfg.m).unwrap_or(100.0),
        grid_n: args.grid_n.or(cfg.grid_n).unwrap_or(2401),
        x_min: args.x_min.or(cfg.x_min).unwrap_or(-12.0),
        x_max: args.x_max.or(cfg.x_max).unwrap_or(12.0),
        alphas: args
            .alphas
            .clone()
            .or(cfg.alphas)
            .unwrap_or_else(|| (1..10).map(|i| 0.1 * i as f64).collect()),
    };
    if !(p.k > 0.0) {
        return Err(CliError::Usage(format!("--k must be positive, got {}", p.k)));
    }
    if !(p.d > 0.0) {
        return Err(CliError::Usage(format!("--D must be positive, got {}", p.d)));
    }
    if !(p.alpha > 0.0 && p.alpha < 1.0) {
        return Err(CliError::Usage(format!(
            "--alpha must lie in (0,1), got {}",
            p.alpha
        )));
    }
    if !(p.epsilon > 0.0) {
        return Err(CliError::Usage(format!(
            "--epsilon must be positive, got {}",
            p.epsilon
        )));
    }
    if !(p.m > 0.0) {
        return Err(CliError::Usage(format!("--M must be positive, got {}", p.m)));
    }
    if p.grid_n < 3 || !(p.x_min < p.x_max) {
        return Err(CliError::Usage(format!(
            "grid needs x-min < x-max and n >= 3, got [{}, {}] n = {}",
            p.x_min, p.x_max, p.grid_n
        )));
    }
    for &a in &p.alphas {
        if !(a > 0.0 && a < 1.0) {
            return Err(CliError::Usage(format!("--alphas entry {a} outside (0,1)")));
        }
    }
    Ok(p)
}

fn sech_state() -> Result<GroundState, Error> {
    GroundState::new(FunctionExpr::primitive(PrimitiveKind::Sech))
}

fn family_spec(k: f64, d: f64, alpha: f64) -> Result<ConvexFamilySpec, Error> {
    ConvexFamilySpec::new(sech_state()?, sech_state()?, alpha, d, k)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            CliError::Numeric(Error::Io {
                path: path.display().to_string(),
                source: e,
            })
        }),
        None => {
            use std::io::Write;
            // a closed pipe downstream is not an error worth reporting
            let _ = std::io::stdout().write_all(content.as_bytes());
            Ok(())
        }
    }
}

fn grid_points(x_min: f64, x_max: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = (x_max - x_min) / (n - 1) as f64;
    (0..n).map(move |i| x_min + i as f64 * h)
}

fn cmd_potential(p: &Params) -> Result<String, CliError> {
    let v = convex_potential(&family_spec(p.k, p.d, p.alpha)?)?;
    let mut s = String::from("x,v\n");
    for x in grid_points(p.x_min, p.x_max, p.grid_n) {
        s.push_str(&format!("{},{}\n", fmt(x), fmt(v.eval(x)?)));
    }
    Ok(s)
}

fn density_column(p: &Params, k: f64, alpha: f64) -> Result<Vec<f64>, CliError> {
    let psi = convex_state(&family_spec(k, p.d, alpha)?)?;
    let mut vals: Vec<f64> = grid_points(p.x_min, p.x_max, p.grid_n)
        .map(|x| {
            let v = psi.eval(x).value;
            v * v
        })
        .collect();
    // unit trapezoid mass on the emitted grid
    let h = (p.x_max - p.x_min) / (p.grid_n - 1) as f64;
    let mut mass = 0.0;
    for (i, &v) in vals.iter().enumerate() {
        let w = if i == 0 || i == vals.len() - 1 { 0.5 } else { 1.0 };
        mass += w * v * h;
    }
    for v in vals.iter_mut() {
        *v /= mass;
    }
    Ok(vals)
}

fn cmd_density(p: &Params) -> Result<String, CliError> {
    let vals = density_column(p, p.k, p.alpha)?;
    let mut s = String::from("x,density\n");
    for (x, v) in grid_points(p.x_min, p.x_max, p.grid_n).zip(vals) {
        s.push_str(&format!("{},{}\n", fmt(x), fmt(v)));
    }
    Ok(s)
}

fn cmd_qscan(p: &Params) -> Result<String, CliError> {
    let mut s = String::from("alpha,q_closed_form,q_quadrature,q_ratio\n");
    for &alpha in &p.alphas {
        let cf = q_closed_form_sech(p.k, p.d, alpha)?;
        let cfr = q_closed_form_sech(p.k, p.d, 1.0 - alpha)?;
        // per-row quadrature failure is flagged as nan, the sweep continues
        let quad = convex_state(&family_spec(p.k, p.d, alpha)?)
            .and_then(|psi| q_quotient(&psi, &QuadratureConfig::for_state(&psi)))
            .ok()
            .and_then(|r| r.q.finite())
            .unwrap_or(f64::NAN);
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt(alpha),
            fmt(cf),
            fmt(quad),
            fmt(cf / cfr)
        ));
    }
    Ok(s)
}

fn cmd_certify(p: &Params, strict: bool) -> Result<(String, bool), CliError> {
    let (phi0, phi1) = (sech_state()?, sech_state()?);
    let report = certify_family(p.epsilon, p.m, (&phi0, &phi1))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let pass = report.pass_eps && report.pass_m;
    if strict && !pass {
        // still emit the report before signalling the failure
        return Ok((json + "\n", false));
    }
    Ok((json + "\n", true))
}

fn cmd_solve(p: &Params) -> Result<String, CliError> {
    let spec = family_spec(p.k, p.d, p.alpha)?;
    let v = convex_potential(&spec)?;
    let psi = convex_state(&spec)?;
    let grid = match (p.grid_n, p.x_min, p.x_max) {
        // the figure defaults are too tight a box for the solver
        (2401, -12.0, 12.0) => Grid::for_family(p.k, p.d)?,
        (n, a, b) => Grid::new(a, b, n)?,
    };
    let spectrum = low_spectrum(&v, &grid, 2, Method::Fd3)?;
    let left = GroundState::new(sech_state()?.expr().shift(p.d).dilate(p.k)?)?;
    let right = GroundState::new(sech_state()?.expr().shift(-p.d).dilate(p.k)?)?;
    let fit = two_level_check(&v, &left, &right, &grid)?;
    let report = serde_json::json!({
        "k": p.k,
        "d": p.d,
        "alpha": p.alpha,
        "x_min": grid.x_min,
        "x_max": grid.x_max,
        "n": grid.n,
        "e0": spectrum.eigenvalues[0],
        "e1": spectrum.eigenvalues[1],
        "gap": spectrum.eigenvalues[1] - spectrum.eigenvalues[0],
        "overlap_ground": spectrum.overlap_with(0, &psi),
        "n_l": fit.n_l,
        "n_r": fit.n_r,
        "overlap_e1": fit.overlap_e1,
    });
    Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n")
}

const FIGURE_SETS: [(f64, f64); 4] = [(1.0, 0.5), (1.0, 0.1), (0.7, 0.5), (0.7, 0.1)];

// the figure commands fix their own window, resolution and separation
fn figure_params(p: &Params) -> Params {
    Params {
        d: 3.0,
        grid_n: 2401,
        x_min: -12.0,
        x_max: 12.0,
        k: p.k,
        alpha: p.alpha,
        epsilon: p.epsilon,
        m: p.m,
        alphas: p.alphas.clone(),
    }
}

fn cmd_figure1(p: &Params) -> Result<String, CliError> {
    let p = figure_params(p);
    let pots = FIGURE_SETS
        .iter()
        .map(|&(k, a)| convex_potential(&family_spec(k, p.d, a)?))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = String::from("x,v_k1_a05,v_k1_a01,v_k07_a05,v_k07_a01\n");
    for x in grid_points(p.x_min, p.x_max, p.grid_n) {
        s.push_str(&fmt(x));
        for v in &pots {
            s.push(',');
            s.push_str(&fmt(v.eval(x)?));
        }
        s.push('\n');
    }
    Ok(s)
}

fn cmd_figure2(p: &Params) -> Result<String, CliError> {
    let p = figure_params(p);
    let cols = FIGURE_SETS
        .iter()
        .map(|&(k, a)| density_column(&p, k, a))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = String::from("x,rho_k1_a05,rho_k1_a01,rho_k07_a05,rho_k07_a01\n");
    for (i, x) in grid_points(p.x_min, p.x_max, p.grid_n).enumerate() {
        s.push_str(&fmt(x));
        for col in &cols {
            s.push(',');
            s.push_str(&fmt(col[i]));
        }
        s.push('\n');
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let args = match &cli.command {
        Command::Potential(a)
        | Command::Density(a)
        | Command::Qscan(a)
        | Command::Certify(a)
        | Command::Solve(a)
        | Command::Figure1(a)
        | Command::Figure2(a) => a,
    };
    let p = resolve(args)?;
    let content = match &cli.command {
        Command::Potential(_) => cmd_potential(&p)?,
        Command::Density(_) => cmd_density(&p)?,
        Command::Qscan(_) => cmd_qscan(&p)?,
        Command::Solve(_) => cmd_solve(&p)?,
        Command::Figure1(_) => cmd_figure1(&p)?,
        Command::Figure2(_) => cmd_figure2(&p)?,
        Command::Certify(_) => {
            let (json, pass) = cmd_certify(&p, args.strict)?;
            write_out(&args.out, &json)?;
            if !pass {
                return Err(CliError::StrictFail);
            }
            return Ok(());
        }
    };
    write_out(&args.out, &content)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are successful exits; anything else is usage
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::StrictFail) => {
            eprintln!("certification failed under --strict");
            ExitCode::from(3)
        }
    }
}
