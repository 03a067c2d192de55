use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use mercerkit::bases::{GaussBasis, MultiIndex, WeylBasis, DEFAULT_K_MAX};
use mercerkit::kernel::{self, ParseContext};
use mercerkit::linalg::Matrix;
use mercerkit::{io, mercer, rkhs, DiscreteMeasure, KernelSpec, Point};

use crate::{Failure, EXIT_NEGATIVE, EXIT_PRECONDITION};

type CmdResult = Result<u8, Failure>;

#[derive(Debug, Args)]
pub struct GramArgs {
    /// Kernel spec, e.g. `gauss:sigma=1` or `sum(weyl:d=2,identity)`.
    #[arg(long)]
    kernel: String,
    /// CSV with one point per row.
    #[arg(long)]
    points: PathBuf,
    /// Exit with status 2 when the Gram matrix is not positive semidefinite.
    #[arg(long)]
    require_psd: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MercerArgs {
    #[arg(long)]
    kernel: String,
    /// CSV with coordinates followed by a positive weight on each row.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    measure: Option<PathBuf>,
    /// 1-D midpoint grid `LOW:HIGH:STEPS[:MASS]` (mass defaults to 1).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Bound on the relative trace and Hilbert–Schmidt gaps.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Also write the eigenfunction samples, one mode per column.
    #[arg(long)]
    eigenfunctions: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long)]
    kernel: String,
    /// Interval `LOW:HIGH` used for both axes.
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    #[arg(long)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MembershipArgs {
    #[arg(long)]
    kernel: String,
    #[arg(long)]
    points: PathBuf,
    /// Single-column CSV of function values at the points.
    #[arg(long)]
    probe: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InclusionArgs {
    /// The kernel `K` whose space should embed.
    #[arg(long)]
    kernel: String,
    /// The kernel `L` of the ambient space.
    #[arg(long)]
    other: String,
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Weyl,
    Gauss,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Ambient dimension.
    #[arg(long)]
    n: usize,
    /// Weyl degree.
    #[arg(long)]
    d: Option<u32>,
    /// Gaussian truncation degree.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    kmax: u32,
    #[arg(long)]
    sigma: Option<f64>,
    /// Points at which to evaluate each basis function.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => io::write_atomic(path, contents.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| mercerkit::Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })?;
        }
    }
    Ok(())
}

fn parse_kernel(spec: &str, points: &[Point]) -> Result<KernelSpec, Failure> {
    let ctx = ParseContext {
        points: Some(points),
        base_dir: None,
    };
    Ok(KernelSpec::parse_with(spec, &ctx)?)
}

fn parse_number(field: &str, what: &str) -> Result<f64, Failure> {
    field
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Failure::usage(format!("{what}: `{field}` is not a finite number")))
}

fn parse_interval(raw: &str) -> Result<(f64, f64), Failure> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 2 {
        return Err(Failure::usage(format!(
            "range `{raw}` must look like LOW:HIGH"
        )));
    }
    let low = parse_number(parts[0], "range")?;
    let high = parse_number(parts[1], "range")?;
    if low >= high {
        return Err(Failure::usage(format!("range `{raw}` is empty")));
    }
    Ok((low, high))
}

fn parse_grid(raw: &str) -> Result<DiscreteMeasure, Failure> {
    let parts: Vec<&str> = raw.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(Failure::usage(format!(
            "grid `{raw}` must look like LOW:HIGH:STEPS[:MASS]"
        )));
    }
    let low = parse_number(parts[0], "grid")?;
    let high = parse_number(parts[1], "grid")?;
    let steps: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("grid: `{}` is not a node count", parts[2])))?;
    let mass = match parts.get(3) {
        Some(m) => parse_number(m, "grid")?,
        None => 1.0,
    };
    Ok(DiscreteMeasure::uniform_grid(
        &Point::scalar(low)?,
        &Point::scalar(high)?,
        &[steps],
        mass,
    )?)
}

pub fn gram(args: GramArgs) -> CmdResult {
    KernelSpec::check_syntax(&args.kernel)?;
    let points = io::read_points(&args.points)?;
    let spec = parse_kernel(&args.kernel, &points)?;
    let g = kernel::gram(&spec, &points)?;
    if args.require_psd {
        let report = kernel::check_psd(g.entries(), mercerkit::linalg::HERMITIAN_TOL)?;
        if !report.psd {
            eprintln!(
                "mercerkit: Gram matrix is not positive semidefinite (smallest eigenvalue {:e})",
                report.min_eigenvalue
            );
            return Ok(EXIT_PRECONDITION);
        }
    }
    emit(args.out.as_deref(), &io::matrix_to_csv(g.entries()))?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct MercerOutput {
    kernel: String,
    nodes: usize,
    total_mass: f64,
    rank: usize,
    eigenvalues: Vec<f64>,
    trace_gap: f64,
    hs_gap: f64,
    /// Indexed by the truncation order `N = 0..=rank`.
    sup_errors: Vec<f64>,
    dini_remainders: Vec<f64>,
    tol: f64,
    passed: bool,
}

pub fn mercer(args: MercerArgs) -> CmdResult {
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Failure::usage("--tol must be positive"));
    }
    KernelSpec::check_syntax(&args.kernel)?;
    let measure = match (&args.measure, &args.grid) {
        (Some(path), _) => DiscreteMeasure::read_csv(path)?,
        (None, Some(grid)) => parse_grid(grid)?,
        (None, None) => return Err(Failure::usage("one of --measure or --grid is required")),
    };
    let spec = parse_kernel(&args.kernel, measure.points())?;
    let op = mercer::assemble(&spec, &measure)?;
    let dec = mercer::spectrum(&op)?;
    let export = mercer::SpectrumExport::new(&dec, &spec)?;
    let sup_errors = mercer::mercer_sup_errors(&dec, &spec, measure.points())?;
    let dini_remainders = mercer::dini_remainders(&dec, &spec, measure.points())?;
    let passed = export.trace_gap <= args.tol && export.hs_gap <= args.tol;
    let report = MercerOutput {
        kernel: spec.to_string(),
        nodes: measure.len(),
        total_mass: measure.total_mass(),
        rank: export.rank,
        eigenvalues: export.eigenvalues,
        trace_gap: export.trace_gap,
        hs_gap: export.hs_gap,
        sup_errors,
        dini_remainders,
        tol: args.tol,
        passed,
    };
    if let Some(path) = &args.eigenfunctions {
        io::write_atomic(path, dec.eigenfunctions_csv().as_bytes())?;
    }
    emit(args.out.as_deref(), &io::to_json_string(&report))?;
    Ok(if passed { 0 } else { EXIT_NEGATIVE })
}

pub fn mesh(args: MeshArgs) -> CmdResult {
    let (low, high) = parse_interval(&args.range)?;
    if !(args.step > 0.0 && args.step.is_finite()) {
        return Err(Failure::usage("--step must be positive"));
    }
    let count = ((high - low) / args.step).round() as usize + 1;
    let axis = (0..count)
        .map(|k| Point::scalar(low + k as f64 * args.step))
        .collect::<mercerkit::Result<Vec<Point>>>()?;
    let spec = parse_kernel(&args.kernel, &axis)?;
    let values = kernel::cross_gram(&spec, &axis, &axis)?;
    let mut rows = Vec::with_capacity(count * count);
    for (i, x) in axis.iter().enumerate() {
        for (j, y) in axis.iter().enumerate() {
            rows.push([x.coords()[0], y.coords()[0], values[(i, j)]]);
        }
    }
    emit(args.out.as_deref(), &io::rows_to_csv(rows.iter()))?;
    Ok(0)
}

pub fn membership(args: MembershipArgs) -> CmdResult {
    KernelSpec::check_syntax(&args.kernel)?;
    let points = io::read_points(&args.points)?;
    let spec = parse_kernel(&args.kernel, &points)?;
    let probe = io::read_column(&args.probe)?;
    let h = rkhs::FiniteRkhs::build(&spec, &points)?;
    let verdict = rkhs::membership(&h, &probe)?;
    emit(args.out.as_deref(), &io::to_json_string(&verdict))?;
    Ok(if verdict.member { 0 } else { EXIT_NEGATIVE })
}

pub fn inclusion(args: InclusionArgs) -> CmdResult {
    KernelSpec::check_syntax(&args.kernel)?;
    KernelSpec::check_syntax(&args.other)?;
    let points = io::read_points(&args.points)?;
    let k = parse_kernel(&args.kernel, &points)?;
    let l = parse_kernel(&args.other, &points)?;
    let hk = rkhs::FiniteRkhs::build(&k, &points)?;
    let hl = rkhs::FiniteRkhs::build(&l, &points)?;
    let verdict = rkhs::aronszajn_inclusion(&hk, &hl)?;
    emit(args.out.as_deref(), &io::to_json_string(&verdict))?;
    Ok(if verdict.included { 0 } else { EXIT_NEGATIVE })
}

fn basis_csv(indices: &[MultiIndex], values: Option<&Matrix>) -> String {
    let mut out = String::new();
    for (row, alpha) in indices.iter().enumerate() {
        let mut fields: Vec<String> = alpha.entries().iter().map(u32::to_string).collect();
        if let Some(v) = values {
            fields.extend(v.row(row).iter().map(|x| io::format_f64(*x)));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn basis(args: BasisArgs) -> CmdResult {
    let points = args.points.as_deref().map(io::read_points).transpose()?;
    let csv = match args.family {
        Family::Weyl => {
            let d = args
                .d
                .ok_or_else(|| Failure::usage("--d is required for the Weyl basis"))?;
            let b = WeylBasis::new(args.n, d)?;
            let values = points.as_deref().map(|p| b.sample(p)).transpose()?;
            basis_csv(b.indices(), values.as_ref())
        }
        Family::Gauss => {
            let sigma = args
                .sigma
                .ok_or_else(|| Failure::usage("--sigma is required for the Gaussian basis"))?;
            let b = GaussBasis::new(args.n, sigma, args.kmax)?;
            let values = points.as_deref().map(|p| b.sample(p)).transpose()?;
            basis_csv(b.indices(), values.as_ref())
        }
    };
    emit(args.out.as_deref(), &csv)?;
    Ok(0)
}
