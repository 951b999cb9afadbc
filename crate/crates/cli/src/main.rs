//! `laminath` command-line front end.
//!
//! Exit status: 0 on success, 2 on bad input or failed preconditions, 3
//! when a precision, depth or step budget runs out.

mod output;
mod surface;
mod torus;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use laminath::{Error, QuadField, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use output::{Report, Sink};

#[derive(Parser, Debug)]
#[command(name = "laminath", version, about = "Exact exotic rays for measured foliations")]
struct Cli {
    /// Quadratic field for default slopes and shears: Q, sqrt2, sqrt5, ...
    #[arg(long, global = true, env = "LAMINATH_FIELD", default_value = "sqrt2")]
    field: String,
    /// text, json, csv, or a file whose extension names the format.
    #[arg(long, global = true)]
    emit: Option<String>,
    /// Output file, or a bare format name for stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Seed for sampled cross-checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergents p_k/q_k with |q_k θ − p_k|.
    Convergents(torus::ConvergentsArgs),
    /// Block word of a rational slope.
    SimpleWord(torus::SimpleWordArgs),
    /// Inadmissible word at convergent k.
    Inadmissible(torus::IndexArgs),
    /// Closed inadmissible segment at convergent k.
    Segment(torus::IndexArgs),
    /// Concatenated segments with a measure ledger.
    Exotic(torus::ExoticArgs),
    /// Convergent words joined by loops around the cusp.
    CuspExotic(torus::CuspArgs),
    /// Cutting sequence of a slope-θ line.
    Cut(torus::CutArgs),
    /// Transverse measure of a path file.
    Measure(torus::MeasureArgs),
    /// Admissibility certificate for a word.
    Admissible(torus::AdmissibleArgs),
    /// Factor complexity.
    Factors(torus::FactorsArgs),
    /// Transverse measure growth tables.
    Growth(torus::GrowthArgs),
    /// Translation surfaces.
    Ts(surface::TsArgs),
}

pub struct Ctx {
    pub field: QuadField,
    pub seed: u64,
}

impl Ctx {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn run(cli: &Cli) -> Result<()> {
    let sink = Sink::resolve(cli.emit.as_deref(), cli.out.as_deref())?;
    let ctx = Ctx {
        field: QuadField::parse(&cli.field)?,
        seed: cli.seed,
    };
    let report: Report = match &cli.command {
        Command::Convergents(a) => torus::convergents(&ctx, a)?,
        Command::SimpleWord(a) => torus::simple(a)?,
        Command::Inadmissible(a) => torus::inadmissible(&ctx, a)?,
        Command::Segment(a) => torus::segment(&ctx, a)?,
        Command::Exotic(a) => torus::exotic(&ctx, a)?,
        Command::CuspExotic(a) => torus::cusp(&ctx, a)?,
        Command::Cut(a) => torus::cut(&ctx, a)?,
        Command::Measure(a) => torus::measure(&ctx, a)?,
        Command::Admissible(a) => torus::admissible(&ctx, a)?,
        Command::Factors(a) => torus::factors(&ctx, a)?,
        Command::Growth(a) => torus::growth(&ctx, a)?,
        Command::Ts(a) => surface::run(&ctx, a)?,
    };
    sink.write(&report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("laminath: error[{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_exhaustion() {
        3
    } else {
        2
    }
}
