//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error (unknown flag or subcommand),
//! 3 invalid value or configuration, 4 file system error, 5 malformed file,
//! 6 numerical failure.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::algebra::{incoherence_mu, t_svd, truncated_multirank, ttnn, MultiRank};
use crate::error::Error;
use crate::io;
use crate::lab::{
    even_rank_profile, gen_synthetic, psnr, rel_error, run_phase_experiment, sample_bernoulli,
    sample_uniform, ssim, PhaseConfig,
};
use crate::solver::{admm_complete, SolverConfig};
use crate::transform::{TransformKind, UnitaryTransform};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_FORMAT: i32 = 5;
pub const EXIT_NUMERICAL: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "ttsvd", version, about = "Low transformed-tubal-rank tensor completion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random tensor with a prescribed transformed multi-rank.
    Gen(GenArgs),
    /// Draw an observation mask.
    Sample(SampleArgs),
    /// Complete a partially observed tensor.
    Complete(CompleteArgs),
    /// Print the transformed multi-rank, nuclear norm and incoherence.
    Tsvd(TsvdArgs),
    /// Run a recovery phase-transition experiment and write a CSV table.
    Phase(PhaseArgs),
    /// Compare two tensors.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub n2: usize,
    #[arg(long)]
    pub n3: usize,
    /// Comma-separated per-slice ranks.
    #[arg(long, conflicts_with_all = ["sum_rank", "tubal"])]
    pub ranks: Option<String>,
    /// Total rank, spread evenly over the slices.
    #[arg(long, requires = "tubal")]
    pub sum_rank: Option<usize>,
    /// Largest per-slice rank when spreading `--sum-rank`.
    #[arg(long, requires = "sum_rank")]
    pub tubal: Option<usize>,
    /// fft, dct or file:PATH.
    #[arg(long, default_value = "fft")]
    pub transform: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Take the shape from this tensor file.
    #[arg(long, conflicts_with = "dims")]
    pub input: Option<PathBuf>,
    /// Shape as n1,n2,n3.
    #[arg(long)]
    pub dims: Option<String>,
    /// Number of entries, drawn uniformly without replacement.
    #[arg(long, conflicts_with = "rho")]
    pub m: Option<usize>,
    /// Bernoulli inclusion probability.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the input restricted to the mask to this file.
    #[arg(long, requires = "input")]
    pub observed: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0.05)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.618)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 600)]
    pub max_iter: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig { beta: self.beta, gamma: self.gamma, tol: self.tol, max_iter: self.max_iter }
    }
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    /// Observed tensor; entries outside the mask are ignored.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// fft, dct, data or file:PATH.
    #[arg(long, default_value = "fft")]
    pub transform: String,
    /// Reference tensor for `--transform data` instead of a DCT pre-pass.
    #[arg(long)]
    pub data_from: Option<PathBuf>,
    /// Ground truth; when given, the relative error is printed.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Accepted for a uniform interface; the solver is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TsvdArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// fft, dct, data or file:PATH.
    #[arg(long, default_value = "fft")]
    pub transform: String,
    /// Energy share for the truncated multi-rank.
    #[arg(long)]
    pub trunc: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    /// Comma-separated side lengths.
    #[arg(long)]
    pub n_list: String,
    /// Third dimension; defaults to each n.
    #[arg(long)]
    pub n3: Option<usize>,
    #[arg(long)]
    pub sum_rank: usize,
    #[arg(long)]
    pub tubal: usize,
    /// Comma-separated multiples of the multi-rank sample bound.
    #[arg(long = "const", default_value = "1.0")]
    pub constants: String,
    /// Comma-separated list from fft, dct, data.
    #[arg(long, default_value = "fft")]
    pub transforms: String,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub estimate: PathBuf,
    pub reference: PathBuf,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Run(#[from] Error),
    #[error("cannot write output: {0}")]
    Output(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidValue | ErrorKind::ValueValidation => EXIT_INVALID,
                _ => EXIT_USAGE,
            },
            CliError::Run(e) => match e {
                Error::Io(_) => EXIT_IO,
                Error::Csv(c) if c.is_io_error() => EXIT_IO,
                Error::Format(_) | Error::Csv(_) => EXIT_FORMAT,
                Error::Numerical(_) => EXIT_NUMERICAL,
                _ => EXIT_INVALID,
            },
            CliError::Output(_) => EXIT_IO,
        }
    }
}

/// How a command picks its transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformChoice {
    Fft,
    Dct,
    Data,
    File(PathBuf),
}

impl std::str::FromStr for TransformChoice {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        if let Some(p) = s.strip_prefix("file:") {
            return Ok(TransformChoice::File(PathBuf::from(p)));
        }
        match s.parse::<TransformKind>()? {
            TransformKind::Fft => Ok(TransformChoice::Fft),
            TransformKind::Dct => Ok(TransformChoice::Dct),
            TransformKind::Data => Ok(TransformChoice::Data),
            TransformKind::Custom => {
                Err(Error::InvalidArgument("custom transforms are given as file:PATH".into()))
            }
        }
    }
}

/// Builds a transform that does not depend on data. `data` is rejected.
fn fixed_transform(choice: &TransformChoice, n3: usize) -> crate::Result<UnitaryTransform> {
    let t = match choice {
        TransformChoice::Fft => UnitaryTransform::fft(n3),
        TransformChoice::Dct => UnitaryTransform::dct(n3),
        TransformChoice::File(p) => io::read_transform(p)?,
        TransformChoice::Data => {
            return Err(Error::InvalidArgument("the data transform needs a tensor to derive it from".into()))
        }
    };
    if t.n3() != n3 {
        return Err(Error::DimensionMismatch(format!("transform is {}-point, tensor has n3 = {n3}", t.n3())));
    }
    Ok(t)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> crate::Result<Vec<T>> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| Error::InvalidArgument(format!("bad {what} '{p}'"))))
        .collect()
}

fn parse_dims(s: &str) -> crate::Result<(usize, usize, usize)> {
    match parse_list::<usize>(s, "dimension")?.as_slice() {
        &[a, b, c] => Ok((a, b, c)),
        _ => Err(Error::InvalidArgument(format!("dims must be n1,n2,n3, got '{s}'"))),
    }
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(CliError::Output)?
    };
}

/// Parses `argv` (including the program name) and runs the command, writing
/// its report to `out`.
pub fn run<I, S>(argv: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    match cli.command {
        Command::Gen(a) => gen(a, out),
        Command::Sample(a) => sample(a, out),
        Command::Complete(a) => complete(a, out),
        Command::Tsvd(a) => tsvd(a, out),
        Command::Phase(a) => phase(a, out),
        Command::Metrics(a) => metrics(a, out),
    }
}

/// Runs the command line and returns the process exit code. Errors are
/// reported as a single line on standard error.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(argv, &mut lock) {
        Ok(()) => 0,
        Err(CliError::Usage(e)) if e.kind() == ErrorKind::DisplayHelp || e.kind() == ErrorKind::DisplayVersion => {
            let _ = write!(lock, "{e}");
            0
        }
        Err(e) => {
            let code = e.exit_code();
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("error");
            let first = first.trim_start_matches("error: ");
            eprintln!("error: {first}");
            code
        }
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ranks = match (&a.ranks, a.sum_rank, a.tubal) {
        (Some(r), _, _) => r.parse::<MultiRank>()?,
        (None, Some(s), Some(t)) => even_rank_profile(s, t, a.n3, a.n1.min(a.n2))?,
        _ => return Err(Error::InvalidArgument("give --ranks or --sum-rank with --tubal".into()).into()),
    };
    let t = fixed_transform(&a.transform.parse()?, a.n3)?;
    let z = gen_synthetic(a.n1, a.n2, a.n3, &ranks, &t, a.seed)?;
    io::write_tensor(&a.out, &z)?;
    say!(out, "wrote {}x{}x{} tensor with multi-rank {ranks} to {}", a.n1, a.n2, a.n3, a.out.display());
    Ok(())
}

fn sample(a: SampleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let input = a.input.as_deref().map(io::read_tensor).transpose()?;
    let dims = match (&input, &a.dims) {
        (Some(t), _) => t.dims(),
        (None, Some(d)) => parse_dims(d)?,
        (None, None) => return Err(Error::InvalidArgument("give --input or --dims".into()).into()),
    };
    let s = match (a.m, a.rho) {
        (Some(m), None) => sample_uniform(dims, m, a.seed)?,
        (None, Some(rho)) => sample_bernoulli(dims, rho, a.seed)?,
        _ => return Err(Error::InvalidArgument("give exactly one of --m and --rho".into()).into()),
    };
    io::write_mask(&a.out, &s)?;
    if let (Some(path), Some(t)) = (&a.observed, &input) {
        io::write_tensor(path, &crate::solver::project_omega(t, &s)?)?;
    }
    say!(out, "wrote {} of {} entries (rho = {:.6}) to {}", s.m(), dims.0 * dims.1 * dims.2, s.rho(), a.out.display());
    Ok(())
}

fn complete(a: CompleteArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.solver.config();
    cfg.validate()?;
    let choice: TransformChoice = a.transform.parse()?;
    let obs = io::read_tensor(&a.input)?;
    let mask = io::read_mask(&a.mask, obs.dims())?;
    let n3 = obs.n3();
    let t = match (&choice, &a.data_from) {
        (TransformChoice::Data, Some(path)) => {
            let reference = io::read_tensor(path)?;
            if reference.dims() != obs.dims() {
                return Err(Error::DimensionMismatch("--data-from tensor differs in shape".into()).into());
            }
            UnitaryTransform::data_driven(&reference)?
        }
        (TransformChoice::Data, None) => {
            let pre = admm_complete(&obs, &mask, &UnitaryTransform::dct(n3), &cfg)?;
            say!(out, "dct pre-pass: iterations={} eta={:e}", pre.iterations, pre.final_kkt().eta);
            UnitaryTransform::data_driven(&pre.z)?
        }
        (_, Some(_)) => {
            return Err(Error::InvalidArgument("--data-from only applies to --transform data".into()).into())
        }
        (c, None) => fixed_transform(c, n3)?,
    };
    let report = admm_complete(&obs, &mask, &t, &cfg)?;
    io::write_tensor(&a.out, &report.z)?;
    let k = report.final_kkt();
    say!(
        out,
        "transform={} iterations={} converged={} eta={:e} eta_x={:e} eta_y={:e} seconds={:.3}",
        t.kind(),
        report.iterations,
        report.converged,
        k.eta,
        k.eta_x,
        k.eta_y,
        report.wall_seconds
    );
    if let Some(path) = &a.truth {
        let truth = io::read_tensor(path)?;
        say!(out, "rel={:e}", rel_error(&report.z, &truth)?);
    }
    Ok(())
}

fn tsvd(a: TsvdArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let z = io::read_tensor(&a.input)?;
    let t = match a.transform.parse()? {
        TransformChoice::Data => UnitaryTransform::data_driven(&z)?,
        c => fixed_transform(&c, z.n3())?,
    };
    let f = t_svd(&z, &t)?;
    say!(out, "multi_rank={}", f.multi_rank());
    say!(out, "sum_rank={}", f.multi_rank().sum());
    say!(out, "tubal_rank={}", f.rank());
    say!(out, "ttnn={}", io::format_float(ttnn(&z, &t)?));
    if f.multi_rank().sum() > 0 {
        let mu = incoherence_mu(&f)?;
        say!(out, "mu={} raw={}", io::format_float(mu.mu()), io::format_float(mu.raw));
    } else {
        say!(out, "mu=undefined");
    }
    if let Some(varpi) = a.trunc {
        let r = truncated_multirank(&z, &t, varpi)?;
        say!(out, "trunc_multi_rank={r}");
        say!(out, "trunc_sum_rank={}", r.sum());
    }
    Ok(())
}

fn phase(a: PhaseArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = PhaseConfig {
        n_list: parse_list(&a.n_list, "n")?,
        n3: a.n3,
        sum_rank: a.sum_rank,
        tubal: a.tubal,
        transforms: parse_list(&a.transforms, "transform")?,
        const_list: parse_list(&a.constants, "constant")?,
        trials: a.trials,
        seed: a.seed,
        solver: a.solver.config(),
    };
    let records = run_phase_experiment(&cfg)?;
    match &a.out {
        Some(path) => {
            io::write_results(path, &records)?;
            say!(out, "wrote {} records to {}", records.len(), path.display());
        }
        None => io::encode_results(&records, out)?,
    }
    Ok(())
}

fn metrics(a: MetricsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let est = io::read_tensor(&a.estimate)?;
    let reference = io::read_tensor(&a.reference)?;
    let rel = rel_error(&est, &reference)?;
    let p = psnr(&est, &reference)?;
    let s = ssim(&est, &reference)?;
    say!(out, "rel={} psnr={} ssim={}", short(rel), short(p), short(s));
    Ok(())
}

fn short(x: f64) -> String {
    if x.is_infinite() {
        io::format_float(x)
    } else {
        format!("{x}")
    }
}
