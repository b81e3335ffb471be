//! Experiment CLI for scheduling games with time-dependent processing
//! times: instance I/O, solvers, equilibrium analysis, generators, and
//! coordination mechanisms.

mod commands;
mod instance;
mod report;

use clap::{Parser, Subcommand, ValueEnum};

use tdsched::GameError;

#[derive(Parser)]
#[command(name = "tdsched", version, about = "Scheduling games with time-dependent processing times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NumericChoice {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmChoice {
    Symmetric,
    TwoMachines,
    Ls,
    Greedy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TieBreakChoice {
    LowestIndex,
    FewestJobs,
    LongerProcessing,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AnalyzeAction {
    Enumerate,
    Brd,
    Poa,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyChoice {
    RoundRobin,
    LowestIndex,
    MaxGain,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MechanismChoice {
    Sdr,
    SdrDynamic,
    Lbdr,
    Sbpt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyChoice {
    #[value(name = "noNE2")]
    NoNe2,
    #[value(name = "noNE3")]
    NoNe3,
    #[value(name = "poa_r")]
    PoaR,
    Exponential,
    #[value(name = "arb_lb")]
    ArbLb,
    #[value(name = "global_lb")]
    GlobalLb,
    #[value(name = "sdr_lb")]
    SdrLb,
    #[value(name = "sbpt_tight")]
    SbptTight,
    Reduce3dm,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassChoice {
    Sym,
    TwoDa,
    PDa,
    Global,
    PNegDa,
    PglobalNegDa,
    Sdr,
    Lbdr,
    Sbpt,
}

#[derive(clap::Args, Debug)]
struct CommonOpts {
    /// Override the instance's numeric backend.
    #[arg(long, value_enum)]
    numeric: Option<NumericChoice>,
    /// Comparison tolerance used in float mode.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the schedule a strategy profile induces.
    Simulate {
        #[arg(long)]
        instance: std::path::PathBuf,
        /// Inline profile, e.g. "u:0,v:1" or "0:0,1:1".
        #[arg(long)]
        profile: Option<String>,
        /// JSON array profile, e.g. [0,1,0].
        #[arg(long)]
        profile_file: Option<std::path::PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a constructive equilibrium solver.
    Solve {
        #[arg(long)]
        instance: std::path::PathBuf,
        #[arg(long, value_enum)]
        algorithm: AlgorithmChoice,
        #[arg(long, value_enum, default_value = "lowest-index")]
        tie_break: TieBreakChoice,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Enumerate equilibria, run best-response dynamics, or measure
    /// the price of anarchy.
    Analyze {
        #[arg(long)]
        instance: std::path::PathBuf,
        #[arg(value_enum)]
        action: AnalyzeAction,
        #[arg(long, value_enum, default_value = "lowest-index")]
        policy: PolicyChoice,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        /// Initial profile for dynamics (defaults to everyone on machine 0).
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, default_value_t = tdsched::DEFAULT_PROFILE_BUDGET)]
        budget: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Write a named instance or family to disk.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyChoice,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Rational parameter, e.g. "5" or "3/2".
        #[arg(long)]
        r: Option<String>,
        /// Rational rate, e.g. "1" or "1/2".
        #[arg(long)]
        a: Option<String>,
        /// Rational epsilon in (0, 1).
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        big_b: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        /// 3DM instance in text form (for reduce3dm).
        #[arg(long)]
        input: Option<std::path::PathBuf>,
        /// Class preset for random sampling.
        #[arg(long, value_enum)]
        class: Option<ClassChoice>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: std::path::PathBuf,
    },
    /// Apply a coordination mechanism and measure it against the optimum.
    Mechanism {
        #[arg(long)]
        instance: std::path::PathBuf,
        #[arg(long, value_enum)]
        policy: MechanismChoice,
        #[arg(long, default_value_t = tdsched::DEFAULT_PROFILE_BUDGET)]
        budget: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn exit_code_for(err: &commands::CliError) -> i32 {
    match err {
        commands::CliError::Game(GameError::ClassMismatch(_)) => 2,
        commands::CliError::Game(GameError::BudgetExceeded { .. }) => 3,
        commands::CliError::Game(GameError::StepBudgetExceeded(_)) => 3,
        _ => 1,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version are successes; anything else is a parse error
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            err.print().expect("write clap error");
            std::process::exit(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code_for(&err));
        }
    }
}
