//! Command-line front end for `qlinear`.
//!
//! Exit status is a stable contract across subcommands: 0 when every
//! requested verdict passes, 1 when a verdict fails (or a computation could
//! not produce one), 2 for unreadable or invalid input.

pub mod cmd;
pub mod format;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Report;

#[derive(Debug, Parser)]
#[command(
    name = "qlinear",
    version,
    about = "Physical realizability and coherent feedback analysis for linear quantum systems"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub format: OutputFormat,
    /// Residual tolerance for realizability checks.
    #[arg(long, default_value = "1e-8", global = true)]
    pub tol: f64,
    /// Seed for every random choice; echoed in the report.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    /// Static controllers are LQG optimal.
    T5,
    /// Zero Kalman gain.
    C1,
    /// The trivial controller is H∞ optimal.
    T6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    General,
    Annihilation,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check physical realizability of a system, plant or controller file.
    Check {
        file: PathBuf,
        /// Also run the frequency-domain characterization.
        #[arg(long)]
        transfer: bool,
    },
    /// Close the loop between a plant and a controller.
    Compose {
        plant: PathBuf,
        controller: PathBuf,
        /// H2 norm of the cost output (LQG cost).
        #[arg(long)]
        h2: bool,
        /// H∞ norm of the physical selector output, or of the cost output
        /// when the plant has no selector.
        #[arg(long)]
        hinf: bool,
        /// Write the closed loop as a plant file.
        #[arg(long, value_name = "PATH")]
        emit: Option<PathBuf>,
        /// Fail unless the loop is internally stable.
        #[arg(long)]
        require_stable: bool,
    },
    /// Add noise channels that make a controller triple realizable.
    Synth {
        triple: PathBuf,
        /// Where to write the synthesized controller.
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Verify a coherent-control result on a plant file or a random suite.
    Verify {
        #[arg(value_enum, ignore_case = true)]
        theorem: Theorem,
        /// Plant file (omit with --random).
        plant: Option<PathBuf>,
        /// Random suite: modes, fields, instance count, base seed.
        #[arg(long, num_args = 4, value_names = ["N", "M", "COUNT", "SEED"], conflicts_with = "plant")]
        random: Option<Vec<u64>>,
        /// Random realizable challengers per plant (T6).
        #[arg(long, default_value_t = 5)]
        challengers: usize,
        /// Dynamic challengers per plant (T5).
        #[arg(long, default_value_t = 20)]
        dynamic: usize,
    },
    /// Emit a random physically realizable system or plant.
    Gen {
        #[arg(long, value_enum, default_value_t = KindArg::Annihilation)]
        kind: KindArg,
        #[arg(long, default_value_t = 2)]
        modes: usize,
        #[arg(long, default_value_t = 2)]
        fields: usize,
        /// Emit a plant with this many control inputs instead of a system.
        #[arg(long, value_name = "M_U")]
        inputs: Option<usize>,
        /// Require a Hurwitz state matrix.
        #[arg(long)]
        hurwitz: bool,
        /// Write here instead of stdout.
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Extract the physical parameters (Θ, M, N) of a realizable system.
    Params { file: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Compose { .. } => "compose",
            Command::Synth { .. } => "synth",
            Command::Verify { .. } => "verify",
            Command::Gen { .. } => "gen",
            Command::Params { .. } => "params",
        }
    }
}

/// What a command run produced.
pub struct Outcome {
    pub report: Report,
    /// Written to stdout verbatim instead of the report (`gen` without
    /// `--output`).
    pub raw_stdout: Option<String>,
}

pub fn run(cli: &Cli, argv: Vec<String>) -> Outcome {
    let g = &cli.global;
    let mut report = Report::new(cli.command.name(), argv, g.seed, g.tol);
    let mut raw_stdout = None;
    if !(g.tol.is_finite() && g.tol > 0.0) {
        report.fail_input(format!("--tol must be a positive number, got {}", g.tol));
        return Outcome { report, raw_stdout };
    }
    let ctx = cmd::Context {
        tol: qlinear::tol::Tolerances::with_residual(g.tol),
        seed: g.seed,
        text: g.format == OutputFormat::Text,
    };
    let result = match &cli.command {
        Command::Check { file, transfer } => cmd::check::run(&ctx, &mut report, file, *transfer),
        Command::Compose { plant, controller, h2, hinf, emit, require_stable } => cmd::compose::run(
            &ctx,
            &mut report,
            &cmd::compose::Request {
                plant,
                controller,
                h2: *h2,
                hinf: *hinf,
                emit: emit.as_deref(),
                require_stable: *require_stable,
            },
        ),
        Command::Synth { triple, output } => cmd::synth::run(&ctx, &mut report, triple, output.as_deref()),
        Command::Verify { theorem, plant, random, challengers, dynamic } => cmd::verify::run(
            &ctx,
            &mut report,
            &cmd::verify::Request {
                theorem: *theorem,
                plant: plant.as_deref(),
                random: random.as_deref(),
                challengers: *challengers,
                dynamic: *dynamic,
            },
        ),
        Command::Gen { kind, modes, fields, inputs, hurwitz, output } => cmd::gen::run(
            &ctx,
            &mut report,
            &cmd::gen::Request {
                kind: match kind {
                    KindArg::General => qlinear::qsys::SystemKind::General,
                    KindArg::Annihilation => qlinear::qsys::SystemKind::Annihilation,
                },
                modes: *modes,
                fields: *fields,
                inputs: *inputs,
                hurwitz: *hurwitz,
                output: output.as_deref(),
            },
        )
        .map(|raw| raw_stdout = raw),
        Command::Params { file } => cmd::params::run(&ctx, &mut report, file),
    };
    match result {
        Ok(()) => report.settle(),
        Err(cmd::Failure::Input(msg)) => report.fail_input(msg),
        Err(cmd::Failure::Verdict(msg)) => report.fail_verdict(msg),
    }
    Outcome { report, raw_stdout }
}
