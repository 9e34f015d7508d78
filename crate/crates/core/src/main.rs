use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qmlbench::datasets::{self, DatasetSpec, Dataset};
use qmlbench::dimred::{fit_transform, Method, ReductionSpec, Scaler};
use qmlbench::harness::{run_suite, write_outputs, RunOptions, Suite};
use qmlbench::linalg::Matrix;
use qmlbench::{Error, Result};

#[derive(Parser)]
#[command(name = "qmlbench", version, about = "Quantum ML benchmarks with classical dimensionality reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Linear,
    Nonlinear,
    Image4x4,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pca,
    Tsvd,
    Tsne,
    Autoencoder,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a suite file and write result tables.
    Run {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Override the repeat count of every experiment.
        #[arg(long)]
        repeats: Option<usize>,
        /// Worker threads for independent runs.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Generate a dataset with default settings as CSV.
    GenDataset {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
    },
    /// Scale and reduce every row of a dataset CSV.
    Reduce {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        dim: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            suite,
            out,
            seed,
            repeats,
            parallel,
        } => {
            if repeats == Some(0) {
                return Err(Error::Usage("--repeats must be at least 1".into()));
            }
            let suite = Suite::load(&suite)?;
            let reports = run_suite(&suite, seed, RunOptions { repeats, parallel })?;
            write_outputs(&reports, seed, &out)?;
            for r in &reports {
                eprintln!(
                    "{:<40} accuracy {:.3}  f1 {:.3}",
                    r.config.display_name(),
                    r.mean.accuracy,
                    r.mean.f1
                );
            }
            Ok(())
        }
        Command::GenDataset { kind, out, seed } => {
            let spec = match kind {
                Kind::Linear => DatasetSpec::Linear(Default::default()),
                Kind::Nonlinear => DatasetSpec::Nonlinear(Default::default()),
                Kind::Image4x4 => DatasetSpec::Image4x4(Default::default()),
            };
            datasets::write_csv(&spec.with_seed(seed).generate()?, out)
        }
        Command::Reduce {
            method,
            dim,
            input,
            out,
            seed,
        } => {
            let method = match method {
                MethodArg::Pca => Method::Pca,
                MethodArg::Tsvd => Method::TruncatedSvd,
                MethodArg::Tsne => Method::Tsne,
                MethodArg::Autoencoder => Method::Autoencoder,
            };
            let ds = datasets::read_csv(&input)?;
            let x = Scaler::fit(method.default_scaling(), &ds.x).transform(&ds.x)?;
            let mut spec = ReductionSpec::new(method, dim);
            spec.seed = seed;
            let reduced = fit_transform(&spec, &x, &Matrix::zeros(0, x.cols()))?;
            datasets::write_csv(&Dataset::new(reduced.train, ds.y)?, out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
