use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use vario::asymptotics::{annulus_F, annulus_threshold, near_boundary_probe_2d, near_boundary_probe_3d};
use vario::derivatives::{d1_i1_2d, d1_v_2d, d1_v_3d_with, d2_i1_2d, Form3};
use vario::domains::{Direction3, Domain, Point2, Point3};
use vario::stats::{stats2, stats3, DEFAULT_NODES_2D, DEFAULT_NODES_3D};
use vario::variocentre::{
    find_min_variance_3d_from, find_variocentre_2d_from, SearchOptions, VariocentreResult, DEFAULT_MAX_ITER,
    DEFAULT_NODES_3D_SEARCH, DEFAULT_TOL,
};

mod field;
mod format;
mod oracle;

const EXIT_USAGE: u8 = 2;
const EXIT_NOT_INTERIOR: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;
const EXIT_ORACLE: u8 = 5;

/// Variance of the distance to the boundary of convex domains.
#[derive(Debug, Parser)]
#[command(name = "vario", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// I₁, I₂ and the variance at one point.
    Stats {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        point: PointArg,
        #[command(flatten)]
        res: ResolutionArgs,
    },
    /// Variance over a grid, as CSV and/or a grayscale image.
    Field {
        #[command(flatten)]
        domain: DomainArg,
        /// Cell counts NX,NY (NX,NY,NZ for solid domains).
        #[arg(long, value_parser = parse_counts)]
        grid: Grid,
        #[command(flatten)]
        res: ResolutionArgs,
        /// Output path without extension; CSV goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Locate the minimizer of the variance.
    Variocentre {
        #[command(flatten)]
        domain: DomainArg,
        /// Starting point; defaults to the centroid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[command(flatten)]
        res: ResolutionArgs,
    },
    /// A directional derivative of I₁ or the variance.
    Deriv {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        point: PointArg,
        /// Angle σ in the plane, or polar,azimuth angles φ,θ in space.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sigma: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Target::V)]
        target: Target,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        order: u8,
        /// Surface integral used in space.
        #[arg(long, value_enum, default_value_t = FormArg::Kernel)]
        form: FormArg,
        #[command(flatten)]
        res: ResolutionArgs,
    },
    /// Annulus function, its threshold, and near-boundary slope probes.
    Asymptotics {
        #[command(subcommand)]
        command: Asymptotics,
    },
    /// Compare quadrature and closed forms; exit 5 when a suite fails.
    OracleCheck {
        /// Suites to run (all by default).
        #[arg(long, value_enum)]
        suite: Vec<oracle::Suite>,
        #[command(flatten)]
        res: ResolutionArgs,
    },
}

#[derive(Debug, Subcommand)]
enum Asymptotics {
    /// F(r, ε).
    Annulus {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        eps: f64,
    },
    /// The crossing r(ε) of F(·, ε).
    Threshold {
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 1e-12)]
        bracket_tol: f64,
    },
    /// Slopes D_σ v(z_δ) approaching the boundary point nearest to a point.
    Probe {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        point: PointArg,
        /// Strictly decreasing δ values in [1e-6, 1).
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
        deltas: Vec<f64>,
        #[command(flatten)]
        res: ResolutionArgs,
    },
}

#[derive(Debug, Args)]
struct DomainArg {
    /// Domain description (JSON).
    #[arg(long = "domain")]
    path: PathBuf,
}

#[derive(Debug, Args)]
struct PointArg {
    /// Coordinates x,y or x,y,z.
    #[arg(long = "point", value_delimiter = ',', allow_hyphen_values = true)]
    coords: Vec<f64>,
}

#[derive(Debug, Args)]
struct ResolutionArgs {
    /// Angular nodes in the plane.
    #[arg(long = "nodes")]
    nodes: Option<usize>,
    /// Polar nodes in space.
    #[arg(long = "nphi")]
    n_phi: Option<usize>,
    /// Azimuthal nodes in space.
    #[arg(long = "ntheta")]
    n_theta: Option<usize>,
}

impl ResolutionArgs {
    fn nodes(&self) -> usize {
        self.nodes.unwrap_or(DEFAULT_NODES_2D)
    }

    fn sphere(&self, default: usize) -> (usize, usize) {
        (self.n_phi.unwrap_or(default), self.n_theta.unwrap_or(default))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Pgm,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    /// The variance.
    V,
    /// The mean distance.
    I1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Kernel,
    Ray,
}

/// A failure with a dedicated exit status.
#[derive(Debug)]
struct Exit(u8, String);

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Exit(EXIT_USAGE, msg.into()).into()
}

/// Cell counts per axis.
#[derive(Debug, Clone)]
struct Grid(Vec<usize>);

fn parse_counts(s: &str) -> Result<Grid, String> {
    let counts = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if !(2..=3).contains(&counts.len()) || counts.iter().any(|&c| c < 2) {
        return Err("expected NX,NY[,NZ] with every count at least 2".into());
    }
    Ok(Grid(counts))
}

fn load(arg: &DomainArg) -> Result<Domain> {
    let text = fs::read_to_string(&arg.path)
        .map_err(|e| usage(format!("cannot read {}: {e}", arg.path.display())))?;
    Domain::from_json(&text).with_context(|| format!("loading {}", arg.path.display()))
}

fn point2(coords: &[f64]) -> Result<Point2> {
    match coords {
        [x, y] => Ok(Point2::new(*x, *y)),
        _ => Err(usage(format!("expected x,y for a planar domain, got {} values", coords.len()))),
    }
}

fn point3(coords: &[f64]) -> Result<Point3> {
    match coords {
        [x, y, z] => Ok(Point3::new(*x, *y, *z)),
        _ => Err(usage(format!("expected x,y,z for a solid domain, got {} values", coords.len()))),
    }
}

fn cmd_stats(domain: &Domain, coords: &[f64], res: &ResolutionArgs) -> Result<()> {
    let (head, s) = match domain {
        Domain::Planar(d) => {
            let p = point2(coords)?;
            (vec![p.x, p.y], stats2(d, &p, res.nodes())?)
        }
        Domain::Solid(d) => {
            let p = point3(coords)?;
            let (n_phi, n_theta) = res.sphere(DEFAULT_NODES_3D);
            (vec![p.x, p.y, p.z], stats3(d, &p, n_phi, n_theta)?)
        }
    };
    let mut row = head;
    row.extend([s.i1, s.i2, s.variance]);
    println!("{}", format::row(&row));
    Ok(())
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn with_extension(base: &Path, ext: &str) -> PathBuf {
    let mut name = base.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

fn cmd_field(domain: &Domain, grid: &[usize], res: &ResolutionArgs, out: Option<&Path>, fmt: OutputFormat) -> Result<()> {
    let wants_csv = matches!(fmt, OutputFormat::Csv | OutputFormat::Both);
    let wants_pgm = matches!(fmt, OutputFormat::Pgm | OutputFormat::Both);
    if wants_pgm && out.is_none() {
        return Err(usage("--out is required for image output"));
    }
    let csv = match domain {
        Domain::Planar(d) => {
            let &[nx, ny] = grid else {
                return Err(usage("a planar domain takes --grid NX,NY"));
            };
            let f = field::sample2(d, nx, ny, res.nodes());
            if let Some(k) = f.argmin() {
                let c = f.centres[k];
                eprintln!("minimum variance at {},{}", format::num(c.x), format::num(c.y));
            }
            if wants_pgm {
                write(&with_extension(out.unwrap(), "pgm"), &f.pgm())?;
            }
            f.csv()
        }
        Domain::Solid(d) => {
            let &[nx, ny, nz] = grid else {
                return Err(usage("a solid domain takes --grid NX,NY,NZ"));
            };
            if wants_pgm {
                return Err(usage("image output needs a planar domain"));
            }
            let (n_phi, n_theta) = res.sphere(DEFAULT_NODES_3D);
            field::sample3_csv(d, [nx, ny, nz], n_phi, n_theta)
        }
    };
    if wants_csv {
        match out {
            Some(base) => write(&with_extension(base, "csv"), csv.as_bytes())?,
            None => print!("{csv}"),
        }
    }
    Ok(())
}

fn variocentre_row(r: &VariocentreResult) -> String {
    let mut row = format::row(&r.location);
    row.push(',');
    row.push_str(&format::row(&[r.min_variance, r.residual, r.iterations as f64]));
    row.push_str(if r.converged { ",true" } else { ",false" });
    row
}

fn cmd_variocentre(
    domain: &Domain,
    start: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
    res: &ResolutionArgs,
) -> Result<()> {
    let found = match domain {
        Domain::Planar(d) => {
            let start = match start {
                Some(c) => point2(c)?,
                None => d.start_point(),
            };
            let opts = SearchOptions {
                tol,
                max_iter,
                n_nodes: res.nodes(),
            };
            find_variocentre_2d_from(d, &start, opts)
        }
        Domain::Solid(d) => {
            let start = match start {
                Some(c) => point3(c)?,
                None => d.start_point(),
            };
            let opts = SearchOptions {
                tol,
                max_iter,
                n_nodes: res.n_phi.unwrap_or(DEFAULT_NODES_3D_SEARCH),
            };
            find_min_variance_3d_from(d, &start, opts)
        }
    };
    match found {
        Ok(r) => {
            if domain.dimension() == 3 {
                eprintln!("note: {}", r.label);
            }
            println!("{}", variocentre_row(&r));
            Ok(())
        }
        Err(vario::Error::NotConverged { best }) => {
            println!("{}", variocentre_row(&best));
            Err(Exit(
                EXIT_NOT_CONVERGED,
                format!("did not converge after {} iterations", best.iterations),
            )
            .into())
        }
        Err(e) => Err(e.into()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_deriv(
    domain: &Domain,
    coords: &[f64],
    sigma: &[f64],
    target: Target,
    order: u8,
    form: FormArg,
    res: &ResolutionArgs,
) -> Result<()> {
    let target_name = match target {
        Target::V => "v",
        Target::I1 => "i1",
    };
    let (mut row, value) = match domain {
        Domain::Planar(d) => {
            let p = point2(coords)?;
            let &[s] = sigma else {
                return Err(usage("a planar domain takes a single --sigma angle"));
            };
            let n = res.nodes();
            let value = match (target, order) {
                (Target::V, 1) => d1_v_2d(d, &p, s, n)?.value,
                (Target::I1, 1) => d1_i1_2d(d, &p, s, n)?.value,
                (Target::I1, 2) => d2_i1_2d(d, &p, s, n)?.value,
                _ => return Err(usage("second derivatives are available for i1 only")),
            };
            (format::row(&[p.x, p.y, s]), value)
        }
        Domain::Solid(d) => {
            let p = point3(coords)?;
            let &[phi, theta] = sigma else {
                return Err(usage("a solid domain takes --sigma φ,θ"));
            };
            if (target, order) != (Target::V, 1) {
                return Err(usage("only the first derivative of v is available in space"));
            }
            let form = match form {
                FormArg::Kernel => Form3::Kernel,
                FormArg::Ray => Form3::RayDerivative,
            };
            let (n_phi, n_theta) = res.sphere(DEFAULT_NODES_3D);
            let dir = Direction3::new(phi, theta)?;
            let value = d1_v_3d_with(d, &p, dir, n_phi, n_theta, form)?.value;
            (format::row(&[p.x, p.y, p.z, phi, theta]), value)
        }
    };
    row.push_str(&format!(",{target_name},{order},{}", format::num(value)));
    println!("{row}");
    Ok(())
}

fn cmd_asymptotics(cmd: &Asymptotics) -> Result<()> {
    match cmd {
        Asymptotics::Annulus { r, eps } => {
            println!("{}", format::row(&[*r, *eps, annulus_F(*r, *eps)?]));
        }
        Asymptotics::Threshold { eps, bracket_tol } => {
            for &e in eps {
                println!("{}", format::row(&[e, annulus_threshold(e, *bracket_tol)?]));
            }
        }
        Asymptotics::Probe {
            domain,
            point,
            deltas,
            res,
        } => {
            let probe = match load(domain)? {
                Domain::Planar(d) => near_boundary_probe_2d(&d, &point2(&point.coords)?, deltas, res.nodes())?,
                Domain::Solid(d) => {
                    let (n_phi, n_theta) = res.sphere(DEFAULT_NODES_3D);
                    near_boundary_probe_3d(&d, &point3(&point.coords)?, deltas, n_phi, n_theta)?
                }
            };
            println!("delta,slope,lower_bound,ratio,i1");
            for i in 0..probe.deltas.len() {
                println!(
                    "{}",
                    format::row(&[probe.deltas[i], probe.slopes[i], probe.lower_bounds[i], probe.ratios[i], probe.i1[i]])
                );
            }
        }
    }
    Ok(())
}

fn cmd_oracle_check(suites: &[oracle::Suite], res: &ResolutionArgs) -> Result<()> {
    let all = [
        oracle::Suite::Elliptic,
        oracle::Suite::Disk,
        oracle::Suite::Ball,
        oracle::Suite::Area,
        oracle::Suite::Annulus,
        oracle::Suite::LogMoments,
    ];
    let chosen = if suites.is_empty() { &all[..] } else { suites };
    let (n_phi, n_theta) = res.sphere(DEFAULT_NODES_3D);
    let resolution = oracle::Resolution {
        n_nodes: res.nodes(),
        n_phi,
        n_theta,
    };
    println!("suite,max_deviation,tolerance,status");
    let mut failed = Vec::new();
    for &suite in chosen {
        let o = oracle::run(suite, resolution)?;
        let status = if o.passed() { "pass" } else { "FAIL" };
        println!(
            "{},{},{},{status}",
            oracle::name(suite),
            format::num(o.deviation),
            format::num(o.tolerance)
        );
        if !o.passed() {
            failed.push(oracle::name(suite));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        bail!(Exit(EXIT_ORACLE, format!("failing suites: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Stats { domain, point, res } => cmd_stats(&load(domain)?, &point.coords, res),
        Command::Field {
            domain,
            grid,
            res,
            out,
            format,
        } => cmd_field(&load(domain)?, &grid.0, res, out.as_deref(), *format),
        Command::Variocentre {
            domain,
            point,
            tol,
            max_iter,
            res,
        } => cmd_variocentre(&load(domain)?, point.as_deref(), *tol, *max_iter, res),
        Command::Deriv {
            domain,
            point,
            sigma,
            target,
            order,
            form,
            res,
        } => cmd_deriv(&load(domain)?, &point.coords, sigma, *target, *order, *form, res),
        Command::Asymptotics { command } => cmd_asymptotics(command),
        Command::OracleCheck { suite, res } => cmd_oracle_check(suite, res),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(Exit(code, _)) = cause.downcast_ref::<Exit>() {
            return *code;
        }
        if let Some(e) = cause.downcast_ref::<vario::Error>() {
            return match e {
                vario::Error::Parse(_) | vario::Error::InvalidGeometry(_) => EXIT_USAGE,
                vario::Error::NotInterior { .. } => EXIT_NOT_INTERIOR,
                vario::Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
                _ => 1,
            };
        }
    }
    1
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("VARIO_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|_| usage(format!("VARIO_THREADS must be a positive integer, got {raw:?}")))?;
        if n == 0 {
            return Err(usage("VARIO_THREADS must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
