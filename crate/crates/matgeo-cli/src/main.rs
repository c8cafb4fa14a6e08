use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use matgeo_cli::commands::{
    run_approx, run_chart, run_verify, ApproxOptions, ChartOp, ChartOptions, SuiteChoice,
    VerifyOptions,
};

/// Chart-based matrix manifold toolkit: verification suites, chart
/// diagnostics and a low-rank approximation demo.
#[derive(Parser)]
#[command(name = "matgeo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded invariant suites and print a JSON report to stdout.
    Verify {
        /// Which suite to run.
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Ambient rows for the fixed-rank suite.
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Ambient columns for the fixed-rank suite.
        #[arg(long, default_value_t = 15)]
        m: usize,
        /// Ambient dimension for the Grassmann and Stiefel suites.
        #[arg(long, default_value_t = 12)]
        k: usize,
        /// Subspace dimension / rank.
        #[arg(long, default_value_t = 3)]
        r: usize,
        /// Root seed; per-trial seeds are derived deterministically.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random trials per suite.
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Override the residual tolerance of every case.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Best rank-r approximation of a matrix by chart-coordinate descent;
    /// writes the result matrix and prints the iteration trace as JSON
    /// lines on stdout.
    Approx {
        /// Input matrix file (text format: "rows cols" then row lines).
        #[arg(long)]
        input: PathBuf,
        /// Output file for the rank-r result.
        #[arg(long)]
        output: PathBuf,
        /// Target rank.
        #[arg(long)]
        r: usize,
        /// Seed for the random starting point.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Iteration budget.
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        /// Acceptable relative error vs the truncated-SVD oracle.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Exercise one chart operation on an input matrix with a randomly
    /// seeded chart and print a JSON residual report.
    Chart {
        /// Input matrix file.
        #[arg(long)]
        input: PathBuf,
        /// Which operation to exercise.
        #[arg(long, value_enum)]
        op: Op,
        /// Rank of the input (default: detected numerical rank).
        #[arg(long)]
        r: Option<usize>,
        /// Seed for the chart placement.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Suite {
    All,
    Grassmann,
    Stiefel,
    Fixedrank,
}

#[derive(ValueEnum, Clone, Copy)]
enum Op {
    Roundtrip,
    Transition,
    Tangent,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not usage errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Verify {
            suite,
            n,
            m,
            k,
            r,
            seed,
            trials,
            tol,
        } => run_verify(&VerifyOptions {
            suite: match suite {
                Suite::All => SuiteChoice::All,
                Suite::Grassmann => SuiteChoice::Grassmann,
                Suite::Stiefel => SuiteChoice::Stiefel,
                Suite::Fixedrank => SuiteChoice::Fixedrank,
            },
            n,
            m,
            k,
            r,
            seed,
            trials,
            tol,
        }),
        Command::Approx {
            input,
            output,
            r,
            seed,
            max_iters,
            tol,
        } => run_approx(&ApproxOptions {
            input: &input,
            output: &output,
            r,
            seed,
            max_iters,
            tol,
        }),
        Command::Chart {
            input,
            op,
            r,
            seed,
            tol,
        } => run_chart(&ChartOptions {
            input: &input,
            op: match op {
                Op::Roundtrip => ChartOp::Roundtrip,
                Op::Transition => ChartOp::Transition,
                Op::Tangent => ChartOp::Tangent,
            },
            r,
            seed,
            tol,
        }),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
