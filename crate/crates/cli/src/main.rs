//! `nnlln` command-line tool.
//!
//! Exit status: 0 on success, 2 for usage, parse, validation and parameter
//! domain errors, 1 for everything else (I/O failures).

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use nnlln::constants::{limit_constant, union_two_balls_volume, unit_ball_volume};
use nnlln::functionals::{rescale, total_weight, WeightExponent};
use nnlln::graphs::{self, EdgeList, WeightedDigraph};
use nnlln::montecarlo::{self, default_allowance, trend_check, SimConfig};
use nnlln::points::{generate, DensitySpec};
use nnlln::{io, ConeOrder, Error, GraphFamily, LimitQuery, Seed};

#[derive(Parser)]
#[command(name = "nnlln", version, about = "Nearest-neighbour type random graphs and their edge-length limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the limiting constant of a graph family as JSON.
    Constant {
        #[command(flatten)]
        family: FamilyArgs,
        /// Dimension; defaults to 2 for mdsf.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        alpha: f64,
    },
    /// Sample points into a CSV file.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// `uniform` or a density JSON file.
        #[arg(long, default_value = "uniform")]
        density: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a graph on a points CSV and write its edges.
    ///
    /// Rows are vertices in file order (the arrival order for ong). With
    /// --with-origin the origin is vertex 0 and row i becomes vertex i + 1.
    Build {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a seeded simulation over a schedule of sample sizes.
    Simulate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        alpha: f64,
        /// Comma-separated, strictly increasing sample sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n_schedule: Vec<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "uniform")]
        density: String,
        /// Report CSV.
        #[arg(long)]
        out: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, env = "NNLLN_THREADS")]
        threads: Option<usize>,
        /// Systematic allowance on top of 3 standard errors; per-family default.
        #[arg(long)]
        allowance: Option<f64>,
    },
    /// Total and rescaled weight of an edge CSV.
    Report {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Points the edges were built on; checks the stored lengths.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Dimension for the rescaled weight when no points are given.
        #[arg(long)]
        d: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphKind {
    Nng,
    Knng,
    KnngUndirected,
    Ong,
    Mdsf,
    Gabriel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderName {
    Star,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    graph: GraphKind,
    /// Neighbour rank for nng (default 1).
    #[arg(long)]
    j: Option<usize>,
    /// Neighbour count for knng and knng-undirected (default 1).
    #[arg(long)]
    k: Option<usize>,
    /// Cone start angle in radians from the upward vertical, anticlockwise (mdsf).
    #[arg(long, conflicts_with = "order")]
    theta: Option<f64>,
    /// Cone aperture in radians, in (0, pi] (mdsf).
    #[arg(long, conflicts_with = "order")]
    phi: Option<f64>,
    /// Named cone order; `star` is the coordinatewise order.
    #[arg(long, value_enum)]
    order: Option<OrderName>,
    /// Add an origin sink (mdsf with --order star only).
    #[arg(long)]
    with_origin: bool,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl FamilyArgs {
    fn family(&self) -> nnlln::Result<GraphFamily> {
        let g = self.graph;
        let reject = |set: bool, flag: &str, allowed: &[GraphKind]| {
            if set && !allowed.contains(&g) {
                Err(usage(format!("--{flag} does not apply to this graph")))
            } else {
                Ok(())
            }
        };
        use GraphKind::*;
        reject(self.j.is_some(), "j", &[Nng])?;
        reject(self.k.is_some(), "k", &[Knng, KnngUndirected])?;
        reject(self.theta.is_some(), "theta", &[Mdsf])?;
        reject(self.phi.is_some(), "phi", &[Mdsf])?;
        reject(self.order.is_some(), "order", &[Mdsf])?;
        reject(self.with_origin, "with-origin", &[Mdsf])?;
        Ok(match g {
            Nng => GraphFamily::JthNng { j: self.j.unwrap_or(1) },
            Knng => GraphFamily::Knng { k: self.k.unwrap_or(1) },
            KnngUndirected => GraphFamily::KnngUndirected { k: self.k.unwrap_or(1) },
            Ong => GraphFamily::Ong,
            Gabriel => GraphFamily::Gabriel,
            Mdsf => {
                let order = match self.order {
                    Some(OrderName::Star) => ConeOrder::star(),
                    None => ConeOrder::new(self.theta.unwrap_or(FRAC_PI_2), self.phi.unwrap_or(FRAC_PI_2))?,
                };
                if self.with_origin && self.order != Some(OrderName::Star) {
                    return Err(usage("--with-origin requires --order star"));
                }
                GraphFamily::Mdsf { order, with_origin: self.with_origin }
            }
        })
    }

    fn default_dimension(&self, d: Option<usize>) -> nnlln::Result<usize> {
        match (d, self.graph) {
            (Some(d), _) => Ok(d),
            (None, GraphKind::Mdsf) => Ok(2),
            (None, _) => Err(usage("--d is required for this graph")),
        }
    }
}

fn params(family: &GraphFamily) -> Value {
    match *family {
        GraphFamily::JthNng { j } => json!({ "j": j }),
        GraphFamily::Knng { k } | GraphFamily::KnngUndirected { k } => json!({ "k": k }),
        GraphFamily::Mdsf { order, with_origin } => {
            json!({ "theta": order.theta(), "phi": order.phi(), "with_origin": with_origin })
        }
        GraphFamily::Ong | GraphFamily::Gabriel => json!({}),
    }
}

fn density(arg: &str, d: usize) -> nnlln::Result<DensitySpec> {
    if arg == "uniform" {
        Ok(DensitySpec::UniformUnitCube)
    } else {
        io::read_density(io::open(Path::new(arg))?, d)
    }
}

fn print_json(v: &Value) -> nnlln::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn constant(family: &FamilyArgs, d: Option<usize>, alpha: f64) -> nnlln::Result<()> {
    let fam = family.family()?;
    let d = family.default_dimension(d)?;
    let limit = limit_constant(&LimitQuery::new(fam, d, alpha))?;
    let mut out = Map::new();
    out.insert("family".into(), json!(fam.tag()));
    out.insert("d".into(), json!(d));
    out.insert("alpha".into(), json!(alpha));
    out.insert("params".into(), params(&fam));
    out.insert("limit".into(), json!(limit));
    out.insert("v_d".into(), json!(unit_ball_volume(d)?));
    if matches!(fam, GraphFamily::KnngUndirected { .. }) {
        out.insert("omega_d".into(), json!(union_two_balls_volume(d)?));
    }
    print_json(&Value::Object(out))
}

fn generate_cmd(n: usize, d: usize, density_arg: &str, seed: u64, out: &Path) -> nnlln::Result<()> {
    let ps = generate(n, d, &density(density_arg, d)?, Seed(seed))?;
    io::write_points(&ps, io::create(out)?)
}

fn build_cmd(family: &FamilyArgs, points: &Path, out: &Path) -> nnlln::Result<()> {
    let fam = family.family()?;
    let ps = io::read_points(io::open(points)?)?;
    let g = graphs::build(&ps, &fam)?;
    io::write_edges(&g, io::create(out)?)
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    family: &FamilyArgs,
    d: Option<usize>,
    alpha: f64,
    n_schedule: Vec<usize>,
    trials: usize,
    seed: u64,
    density_arg: &str,
    out: &Path,
    json_out: Option<&Path>,
    threads: Option<usize>,
    allowance: Option<f64>,
) -> nnlln::Result<()> {
    let fam = family.family()?;
    let d = family.default_dimension(d)?;
    let allowance = allowance.unwrap_or_else(|| default_allowance(&fam));
    if !(allowance.is_finite() && allowance >= 0.0) {
        return Err(usage("--allowance must be finite and >= 0"));
    }
    let mut cfg = SimConfig::new(fam, d, alpha, n_schedule, trials, Seed(seed)).with_density(density(density_arg, d)?);
    cfg.threads = threads;
    cfg.validate()?;
    // Create outputs before the run so a bad path fails fast.
    let csv_file = io::create(out)?;
    let json_file = json_out.map(io::create).transpose()?;

    let report = montecarlo::run(&cfg)?;
    io::write_report_csv(&report, csv_file)?;
    if let Some(f) = json_file {
        io::write_report_json(&report, f)?;
    }

    let last = report.largest().expect("schedule is non-empty");
    let trend = if report.rows.len() >= 3 && last.target.is_some() { Some(trend_check(&report)?) } else { None };
    let within = last.within(allowance);
    let pass = within.map(|w| w && trend.unwrap_or(true));
    print_json(&json!({
        "family": fam.tag(),
        "params": params(&fam),
        "d": d,
        "alpha": alpha,
        "n_schedule": cfg.n_schedule,
        "trials": trials,
        "seed": seed,
        "target": last.target,
        "largest_n": {
            "n": last.n,
            "mean": last.mean,
            "stderr": last.stderr,
            "abs_dev": last.abs_dev,
            "allowance": allowance,
            "within_3se_plus_allowance": within,
        },
        "trend_check": trend,
        "pass": pass,
    }))
}

fn report_cmd(edges: &Path, alpha: f64, points: Option<&Path>, d: Option<usize>) -> nnlln::Result<()> {
    let alpha_w = WeightExponent::new(alpha)?;
    let list = io::read_edges(io::open(edges)?)?;
    let max_index = list.iter().map(|e| e.src.max(e.dst) + 1).max().unwrap_or(0);
    let (n, d) = match points {
        Some(p) => {
            let ps = io::read_points(io::open(p)?)?;
            if max_index > ps.len() {
                return Err(usage(format!("edge endpoint {} out of range for {} points", max_index - 1, ps.len())));
            }
            if let Some(dd) = d {
                if dd != ps.dim() {
                    return Err(Error::DimensionMismatch { expected: ps.dim(), found: dd });
                }
            }
            let mut worst = 0.0f64;
            for e in &list {
                worst = worst.max((ps.distance(e.src, e.dst) - e.length).abs());
            }
            if worst > 1e-12 {
                return Err(usage(format!("stored lengths differ from the points by up to {worst:e}")));
            }
            (ps.len(), Some(ps.dim()))
        }
        None => (max_index, d),
    };
    let g = WeightedDigraph { n, edges: list };
    let total = total_weight(&g, alpha_w);
    let rescaled = d.map(|d| rescale(total, alpha, n, d));
    print_json(&json!({
        "edges": g.edges().len(),
        "n": n,
        "alpha": alpha,
        "total_weight": total,
        "rescaled_weight": rescaled,
    }))
}

fn run(cli: Cli) -> nnlln::Result<()> {
    match cli.command {
        Command::Constant { family, d, alpha } => constant(&family, d, alpha),
        Command::Generate { n, d, density, seed, out } => generate_cmd(n, d, &density, seed, &out),
        Command::Build { family, points, out } => build_cmd(&family, &points, &out),
        Command::Simulate { family, d, alpha, n_schedule, trials, seed, density, out, json, threads, allowance } => {
            simulate_cmd(
                &family,
                d,
                alpha,
                n_schedule,
                trials,
                seed,
                &density,
                &out,
                json.as_deref(),
                threads,
                allowance,
            )
        }
        Command::Report { edges, alpha, points, d } => report_cmd(&edges, alpha, points.as_deref(), d),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
