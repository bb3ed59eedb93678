//! The `fracdim` command line: `estimate`, `generate`, `compare` and `bench`.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 fd/ffd mismatch.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{run_bench, BenchConfig};
use crate::boxcount::{fd, ffd, Algorithm, BoxCountPlot};
use crate::dataset::{normalize, NormalizeMode, NormalizedDataset};
use crate::error::Error;
use crate::fit::{estimate_from_plot, FitMode};
use crate::generators::{GeneratorKind, GeneratorSpec};
use crate::grid::RadiusSchedule;
use crate::io::{format_sig, read_points, write_plot, write_points, IngestOptions, PlotFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fracdim",
    version,
    about = "Correlation fractal dimension (D2) by box-counting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum NormalizeArg {
    Minmax,
    None,
}

impl From<NormalizeArg> for NormalizeMode {
    fn from(arg: NormalizeArg) -> Self {
        match arg {
            NormalizeArg::Minmax => NormalizeMode::MinMax,
            NormalizeArg::None => NormalizeMode::PassThrough,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate D2 of a point file.
    Estimate {
        /// Point file, or "-" for standard input.
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, default_value = "ffd")]
        algo: Algorithm,
        /// Number of grid resolutions |R|.
        #[arg(long, default_value_t = 10)]
        levels: u32,
        /// auto, full, or J_MIN..J_MAX.
        #[arg(long, default_value = "auto")]
        fit: FitMode,
        #[arg(long, value_enum, default_value = "minmax")]
        normalize: NormalizeArg,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
        /// Skip the first line of the input.
        #[arg(long)]
        header: bool,
        /// Write the box-count plot here (.csv for commas, tabs otherwise).
        #[arg(long)]
        plot_out: Option<PathBuf>,
    },
    /// Write a synthetic dataset.
    Generate {
        #[arg(long = "type")]
        kind: GeneratorKind,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Defaults to 2; fixed at 2 for sierpinski and 1 for cantor.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Run fd and ffd on the same data and check that every S_j agrees.
    Compare {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 10)]
        levels: u32,
    },
    /// Time the kernels on seeded uniform data.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "fd,ffd")]
        algos: Vec<Algorithm>,
        #[arg(long, value_delimiter = ',', default_value = "100000,1000000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        levels: Vec<u32>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV report file; standard output when omitted.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(Error),
    Mismatch(u32),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSchedule(_)
            | Error::InvalidFitRange { .. }
            | Error::InvalidDelimiter(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(Error::Io(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data(e) => write!(f, "error: {e}"),
            CliError::Mismatch(level) => write!(f, "fd and ffd differ at level {level}"),
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match run(cli.command, stdin, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "fracdim: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Estimate {
            input,
            algo,
            levels,
            fit,
            normalize,
            delimiter,
            header,
            plot_out,
        } => {
            let opts = IngestOptions {
                delimiter,
                has_header: header,
                expected_dim: None,
            };
            let data = load(&input, &opts, normalize.into(), stdin)?;
            let schedule = RadiusSchedule::new(levels, data.dim())?;
            let plot = algo.run(&data, &schedule)?;
            let estimate = estimate_from_plot(&plot, fit)?;

            writeln!(stdout, "algorithm = {algo}")?;
            writeln!(stdout, "n = {}", data.len())?;
            writeln!(stdout, "dim = {}", data.dim())?;
            writeln!(stdout, "levels = {levels}")?;
            writeln!(stdout, "d2 = {}", format_sig(estimate.d2))?;
            writeln!(stdout, "r_squared = {}", format_sig(estimate.r_squared))?;
            writeln!(stdout, "fit_range = {}", estimate.range)?;
            write_counters(stdout, &plot)?;
            writeln!(stdout)?;
            write_plot(&plot, None, &mut *stdout, PlotFormat::Tsv)?;

            if let Some(path) = plot_out {
                let file = BufWriter::new(File::create(&path)?);
                write_plot(&plot, Some(&estimate), file, PlotFormat::for_path(&path))?;
            }
            Ok(())
        }
        Command::Generate {
            kind,
            n,
            dim,
            seed,
            output,
        } => {
            let spec = GeneratorSpec::new(kind, n as usize, dim, seed).map_err(|e| match e {
                Error::DimensionMismatch { expected, found } => CliError::Usage(format!(
                    "{kind} data has dimension {expected}, got --dim {found}"
                )),
                other => CliError::Usage(other.to_string()),
            })?;
            let data = spec.generate();
            let opts = IngestOptions::default();
            match output {
                Some(path) => write_points(&data, BufWriter::new(File::create(path)?), &opts)?,
                None => write_points(&data, BufWriter::new(&mut *stdout), &opts)?,
            }
            Ok(())
        }
        Command::Compare { input, levels } => {
            let data = load(
                &input,
                &IngestOptions::default(),
                NormalizeMode::MinMax,
                stdin,
            )?;
            let schedule = RadiusSchedule::new(levels, data.dim())?;
            let fd_plot = fd(&data, &schedule)?;
            let ffd_plot = ffd(&data, &schedule)?;
            write_comparison(stdout, &fd_plot, &ffd_plot)?;
            match fd_plot.first_mismatch(&ffd_plot) {
                None => Ok(()),
                Some(level) => Err(CliError::Mismatch(level)),
            }
        }
        Command::Bench {
            algos,
            sizes,
            dim,
            levels,
            reps,
            seed,
            output,
        } => {
            if algos.is_empty() || sizes.is_empty() || levels.is_empty() {
                return Err(CliError::Usage(
                    "--algos, --sizes and --levels must be non-empty".into(),
                ));
            }
            if reps == 0 || dim == 0 || sizes.contains(&0) {
                return Err(CliError::Usage(
                    "--reps, --dim and every size must be positive".into(),
                ));
            }
            let config = BenchConfig {
                algos,
                sizes,
                dim,
                levels,
                reps,
                seed,
            };
            let report = run_bench(&config)?;
            match output {
                Some(path) => {
                    report.write_csv(BufWriter::new(File::create(&path)?))?;
                    writeln!(stdout, "algo\tn\tlevels\tmedian_ms\tupdates_per_point")?;
                    for r in report.medians() {
                        writeln!(
                            stdout,
                            "{}\t{}\t{}\t{:.3}\t{}",
                            r.algo,
                            r.n,
                            r.levels,
                            r.wall_ms,
                            format_sig(r.updates_per_point())
                        )?;
                    }
                }
                None => report.write_csv(&mut *stdout)?,
            }
            Ok(())
        }
    }
}

fn load(
    input: &str,
    opts: &IngestOptions,
    mode: NormalizeMode,
    stdin: &mut dyn Read,
) -> Result<NormalizedDataset, CliError> {
    let raw = if input == "-" {
        read_points(stdin, opts)?
    } else {
        let path = Path::new(input);
        let file = File::open(path).map_err(|e| {
            CliError::Data(Error::Io(io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            )))
        })?;
        read_points(file, opts)?
    };
    Ok(normalize(&raw, mode)?)
}

fn write_counters(out: &mut dyn Write, plot: &BoxCountPlot) -> io::Result<()> {
    let c = plot.counters;
    writeln!(
        out,
        "{}: point_updates = {}, merge_updates = {}, scans = {}, updates_per_point = {}",
        plot.algorithm,
        c.point_cell_updates,
        c.merge_updates,
        c.dataset_scans,
        format_sig(c.updates_per_point(plot.n))
    )
}

fn write_comparison(
    out: &mut dyn Write,
    fd_plot: &BoxCountPlot,
    ffd_plot: &BoxCountPlot,
) -> io::Result<()> {
    writeln!(out, "j\tS_fd\tS_ffd")?;
    let rows = fd_plot.records.len().max(ffd_plot.records.len());
    for i in 0..rows {
        let fmt = |p: &BoxCountPlot| {
            p.records
                .get(i)
                .map_or_else(|| "-".to_string(), |r| r.sum_sq.to_string())
        };
        writeln!(out, "{}\t{}\t{}", i + 1, fmt(fd_plot), fmt(ffd_plot))?;
    }
    write_counters(out, fd_plot)?;
    write_counters(out, ffd_plot)?;
    match fd_plot.first_mismatch(ffd_plot) {
        None => writeln!(out, "IDENTICAL"),
        Some(level) => writeln!(out, "MISMATCH at level {level}"),
    }
}
