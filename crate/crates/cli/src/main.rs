//! `orthoising`: validate, compile, solve and check cubic planar MIS instances.

mod artifacts;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "orthoising", version, about = "Maximum independent set on cubic planar graphs via lattice Ising Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a graph is cubic and passes the planar edge bound.
    Validate {
        graph: PathBuf,
        /// Also write validation.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed, build the lattice Hamiltonian, compile the pulse schedule and verify everything.
    Compile {
        graph: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long, default_value = "orthoising-out")]
        out: PathBuf,
    },
    /// Simulate the adiabatic run and sample measurements.
    Solve {
        graph: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        /// Total runtime.
        #[arg(long = "T", default_value_t = 100.0)]
        total_time: f64,
        /// Integrator step; defaults to T/1000.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        shots: usize,
        /// Points of the gap scan over s in [0, 1]; 0 disables it.
        #[arg(long, default_value_t = 11)]
        gap_points: usize,
        /// Write the final amplitudes as little-endian f64 pairs.
        #[arg(long)]
        dump_amplitudes: bool,
        #[arg(long, default_value = "orthoising-out")]
        out: PathBuf,
    },
    /// Exhaustive maximum independent set.
    Oracle {
        graph: PathBuf,
        #[arg(long, default_value_t = orthoising::graph::DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
    },
    /// Check a schedule file against a lattice Hamiltonian file.
    VerifySchedule {
        schedule: PathBuf,
        hamiltonian: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Ferromagnetic wire strength.
    #[arg(long, default_value_t = orthoising::hamiltonian::DEFAULT_C)]
    c: i64,
    /// Grid budget as `ROWSxCOLS` or `N` for N×N; defaults to n×n.
    #[arg(long)]
    budget: Option<String>,
    #[arg(long, default_value_t = orthoising::graph::DEFAULT_ORACLE_LIMIT)]
    oracle_limit: usize,
}

fn main() -> ExitCode {
    // Usage errors count as invalid input; clap's own code 2 is reserved for I/O.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Validate { graph, out } => commands::validate(&graph, out.as_deref()),
        Command::Compile { graph, build, out } => {
            commands::compile(&graph, &build.into(), &out)
        }
        Command::Solve { graph, build, total_time, dt, seed, shots, gap_points, dump_amplitudes, out } => {
            let run = commands::RunOptions { total_time, dt, seed, shots, gap_points, dump_amplitudes };
            commands::solve(&graph, &build.into(), &run, &out)
        }
        Command::Oracle { graph, oracle_limit } => commands::oracle(&graph, oracle_limit),
        Command::VerifySchedule { schedule, hamiltonian, out } => {
            commands::verify_schedule(&schedule, &hamiltonian, out.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f);
            ExitCode::from(f.code())
        }
    }
}

impl From<BuildArgs> for commands::BuildOptions {
    fn from(a: BuildArgs) -> Self {
        commands::BuildOptions { c: a.c, budget: a.budget, oracle_limit: a.oracle_limit }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}
