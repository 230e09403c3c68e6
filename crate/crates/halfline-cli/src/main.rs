mod commands;
mod config;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use halfline::dispersion::{Equation, ModelCoefficients};
use halfline::fokas::QuadratureConfig;
use halfline::Error;

use commands::{EvalContext, GridSettings, Method, Model};
use config::{parse_range, parse_samples, FileConfig, Samples};
use table::{Format, Table};

#[derive(Parser)]
#[command(name = "halfline", version, about = "Time-periodic boundary forcing of linear KdV and BBM on the half-line")]
struct Cli {
    /// JSON file with default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// kdv, bbm or general
    #[arg(long)]
    model: Option<String>,
    /// a_m2,a0,a1,a2,a3 for --model general
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct SampleArgs {
    /// Positions: a:b:n or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Times: a:b:n or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Rays x/t; replaces --x.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
}

#[derive(Args, Clone, Default)]
struct QuadArgs {
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// kdv-boundary, kdv-half-lines, kdv-saddle, bbm-circle, bbm-saddle
    #[arg(long)]
    contour: Option<String>,
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    /// sponge or truncation
    #[arg(long)]
    bc: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Roots of the characteristic polynomial for one or more harmonics.
    Roots {
        #[command(flatten)]
        model: ModelArgs,
        /// Harmonic indices: comma list.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        n: Option<Vec<i32>>,
    },
    /// Dirichlet-to-Neumann coefficients of a Fourier boundary datum.
    Dnmap {
        #[command(flatten)]
        model: ModelArgs,
        /// n:re:im, repeatable; the default is sin(-omega0 t).
        #[arg(long = "harmonic", allow_hyphen_values = true, value_parser = parse_harmonic)]
        harmonics: Vec<(i32, f64, f64)>,
        /// Prescribed u_x(0,t) slope for the degenerate family.
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<f64>,
    },
    /// Solution values at sample points.
    Evaluate {
        #[command(flatten)]
        model: ModelArgs,
        /// exact, asym, series, oracle or all
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        samples: SampleArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Region labels on an (omega0, xi) grid plus the boundary curves.
    PhaseDiagram {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        omega_range: Option<String>,
        #[arg(long)]
        xi_range: Option<String>,
        /// Cells per axis.
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        curve_samples: Option<usize>,
    },
    /// Finite-difference snapshots.
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        samples: SampleArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Discrepancy between two methods per time.
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[command(flatten)]
        samples: SampleArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

fn parse_harmonic(s: &str) -> Result<(i32, f64, f64), String> {
    let p: Vec<&str> = s.split(':').collect();
    match p.as_slice() {
        [n, re, im] => Ok((
            n.parse().map_err(|e| format!("bad harmonic index '{n}': {e}"))?,
            re.parse().map_err(|e| format!("bad real part '{re}': {e}"))?,
            im.parse().map_err(|e| format!("bad imaginary part '{im}': {e}"))?,
        )),
        _ => Err(format!("expected n:re:im, got '{s}'")),
    }
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UncoveredFamily | Error::NoUniqueRadiatingRoot { .. } => 2,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<String> for Failure {
    fn from(msg: String) -> Self {
        Failure { code: 1, msg }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        let code = if e.kind() == std::io::ErrorKind::BrokenPipe { 0 } else { 1 };
        Failure { code, msg: e.to_string() }
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn samples(flag: &Option<String>, file: &Option<Samples>, default: &str) -> Result<Vec<f64>, String> {
    match (flag, file) {
        (Some(s), _) => parse_samples(s),
        (None, Some(f)) => f.values(),
        (None, None) => parse_samples(default),
    }
}

fn resolve_model(args: &ModelArgs, cfg: &FileConfig) -> Result<Model, Failure> {
    let name = pick(args.model.clone(), cfg.model.clone(), "kdv".into());
    match name.as_str() {
        "kdv" => Ok(Model::Eq(Equation::Kdv)),
        "bbm" => Ok(Model::Eq(Equation::Bbm)),
        "general" => {
            let c = args.coeffs.clone().or(cfg.coeffs.clone()).ok_or("--model general needs --coeffs".to_string())?;
            match c.as_slice() {
                &[a_m2, a0, a1, a2, a3] => Ok(Model::General(ModelCoefficients::new(a_m2, a0, a1, a2, a3)?)),
                _ => Err(format!("--coeffs takes five values, got {}", c.len()).into()),
            }
        }
        other => Err(format!("unknown model '{other}' (kdv, bbm, general)").into()),
    }
}

fn resolve_omega0(args: &ModelArgs, cfg: &FileConfig, model: &Model) -> f64 {
    let default = match model {
        Model::Eq(Equation::Bbm) => 0.4,
        _ => 0.375,
    };
    pick(args.omega0, cfg.omega0, default)
}

fn resolve_grid(args: &GridArgs, cfg: &FileConfig) -> Result<GridSettings, Failure> {
    let bc = args.bc.clone().or(cfg.bc.clone()).map(|s| commands::parse_bc(&s)).transpose()?;
    Ok(GridSettings { nx: args.nx.or(cfg.nx), dt: args.dt.or(cfg.dt), x_max: args.x_max.or(cfg.x_max), bc })
}

fn resolve_quad(args: &QuadArgs, cfg: &FileConfig, eq: Equation) -> Result<QuadratureConfig, Failure> {
    let mut q = match args.contour.clone().or(cfg.contour.clone()) {
        Some(c) => QuadratureConfig::new(commands::parse_contour(&c)?),
        None => match eq {
            Equation::Kdv => QuadratureConfig::kdv(),
            Equation::Bbm => QuadratureConfig::bbm(),
        },
    };
    let rel = pick(args.rel_tol, cfg.rel_tol, q.rel_tol);
    let abs = pick(args.abs_tol, cfg.abs_tol, q.abs_tol);
    q = q.with_tolerances(rel, abs);
    Ok(q)
}

/// Sample points, t outer and x inner. With rays, x = xi t.
fn resolve_points(args: &SampleArgs, cfg: &FileConfig) -> Result<Vec<(f64, f64)>, Failure> {
    let ts = samples(&args.t, &cfg.t, "10")?;
    let use_xi = args.xi.is_some() || (args.x.is_none() && cfg.xi.is_some());
    if use_xi {
        let xis = samples(&args.xi, &cfg.xi, "")?;
        Ok(ts.iter().flat_map(|&t| xis.iter().map(move |&xi| (xi * t, t))).collect())
    } else {
        let xs = samples(&args.x, &cfg.x, "0:10:11")?;
        Ok(ts.iter().flat_map(|&t| xs.iter().map(move |&x| (x, t))).collect())
    }
}

fn eval_context(model: &Model, margs: &ModelArgs, quad: &QuadArgs, grid: &GridArgs, cfg: &FileConfig) -> Result<EvalContext, Failure> {
    let eq = model.equation()?;
    let omega0 = resolve_omega0(margs, cfg, model);
    if !(omega0 > 0.0) {
        return Err(Error::Precondition("omega0 must be positive".into()).into());
    }
    Ok(EvalContext { eq, omega0, quad: resolve_quad(quad, cfg, eq)?, grid: resolve_grid(grid, cfg)? })
}

/// Table plus whether every row failed.
fn run(cli: &Cli, cfg: &FileConfig) -> Result<(Table, bool), Failure> {
    match &cli.command {
        Command::Roots { model, n } => {
            let m = resolve_model(model, cfg)?;
            let w = pick(model.omega0, cfg.omega0, 0.375);
            let ns = n.clone().or(cfg.n.map(|n| vec![n])).unwrap_or(vec![1]);
            Ok((commands::roots_table(&m, w, &ns)?, false))
        }
        Command::Dnmap { model, harmonics, slope } => {
            let m = resolve_model(model, cfg)?;
            let w = resolve_omega0(model, cfg, &m);
            let h = if harmonics.is_empty() { cfg.harmonics.clone().unwrap_or_default() } else { harmonics.clone() };
            Ok((commands::dnmap_table(&m, w, &h, slope.or(cfg.slope))?, false))
        }
        Command::Evaluate { model, method, samples, quad, grid } => {
            let m = resolve_model(model, cfg)?;
            let ctx = eval_context(&m, model, quad, grid, cfg)?;
            let methods = match method.clone().or(cfg.method.clone()) {
                Some(s) if s == "all" => Method::ALL.to_vec(),
                Some(s) => vec![Method::parse(&s)?],
                None => match &cfg.methods {
                    Some(v) => v.iter().map(|s| Method::parse(s)).collect::<Result<_, _>>()?,
                    None => vec![Method::Exact],
                },
            };
            let points = resolve_points(samples, cfg)?;
            let (table, total, ok) = commands::evaluate_table(&ctx, m.name(), &methods, &points);
            Ok((table, total > 0 && ok == 0))
        }
        Command::PhaseDiagram { model, omega_range, xi_range, resolution, curve_samples } => {
            let eq = resolve_model(model, cfg)?.equation()?;
            let wr = omega_range.as_deref().map(parse_range).transpose()?.or(cfg.omega_range).unwrap_or((0.0, 1.2));
            let xr = xi_range.as_deref().map(parse_range).transpose()?.or(cfg.xi_range).unwrap_or((0.0, 2.0));
            let res = pick(*resolution, cfg.resolution, 100);
            let cs = pick(*curve_samples, cfg.curve_samples, 200);
            Ok((commands::phase_table(eq, wr, xr, res, cs), false))
        }
        Command::Oracle { model, samples, grid } => {
            let m = resolve_model(model, cfg)?;
            let ctx = eval_context(&m, model, &QuadArgs::default(), grid, cfg)?;
            let mut args = samples.clone();
            if args.x.is_none() && args.xi.is_none() && cfg.x.is_none() && cfg.xi.is_none() {
                let ts = self::samples(&args.t, &cfg.t, "10")?;
                let t_max = ts.iter().copied().fold(0.0, f64::max).min(commands::ORACLE_T_MAX);
                let g = ctx.grid.build(ctx.eq, t_max)?;
                let last = ((g.x_max - g.sponge_width) / g.h()).floor() as usize;
                args.x = Some(format!("0:{}:{}", last as f64 * g.h(), last + 1));
            }
            let points = resolve_points(&args, cfg)?;
            let (table, total, ok) = commands::evaluate_table(&ctx, m.name(), &[Method::Oracle], &points);
            Ok((table, total > 0 && ok == 0))
        }
        Command::Compare { model, a, b, samples, quad, grid } => {
            let m = resolve_model(model, cfg)?;
            let ctx = eval_context(&m, model, quad, grid, cfg)?;
            let a = Method::parse(a.as_deref().unwrap_or("exact"))?;
            let b = Method::parse(b.as_deref().unwrap_or("oracle"))?;
            let ts = self::samples(&samples.t, &cfg.t, "10")?;
            let xs = self::samples(&samples.x, &cfg.x, "0:10:11")?;
            let table = commands::compare_table(&ctx, m.name(), a, b, &xs, &ts);
            let failed = !table.rows.is_empty() && table.rows.iter().all(|r| r.last().map(|c| c.render()) != Some("ok".into()));
            Ok((table, failed))
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("HALFLINE_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| format!("HALFLINE_THREADS must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let cfg = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let (table, all_failed) = run(&cli, &cfg)?;
    let format = pick(cli.format, cfg.format, Format::Csv);
    match cli.output.clone().or(cfg.output.clone()) {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?);
            table.write(format, &mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(format, &mut lock)?;
        }
    }
    Ok(if all_failed { 1 } else { 0 })
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) if f.code == 0 => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("halfline: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
