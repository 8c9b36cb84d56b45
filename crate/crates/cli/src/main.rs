use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod cmd;
mod grid;
mod output;

use output::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "hl", version, about = "Level sets of Hölder functions on fractals: reproducible experiments")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, env = "HL_THREADS", global = true)]
    threads: Option<usize>,

    /// Write the artifact to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Precision::Double, global = true)]
    precision: Precision,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    Big,
}

impl Precision {
    fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Big => "big",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower, upper and trivial dimension bounds over an α grid.
    Bounds(cmd::bounds::BoundsArgs),
    /// Approximate level sets with conservation and measure checks.
    Levelset(cmd::levelset::LevelsetArgs),
    /// Histogram of conductivities and the well-conducting census.
    ConductivityHist(cmd::levelset::HistArgs),
    /// Box counts of the Bernoulli witness along random digit streams.
    Witness(cmd::witness::WitnessArgs),
    /// Fat Cantor measures, capacity tables and separated structures.
    Cantor(cmd::cantor::CantorArgs),
    /// Piecewise constant feasibility and the perturbation certificate.
    Phase(cmd::phase::PhaseArgs),
    /// Quick run of every check.
    Selftest,
}

fn config(cli: &Cli, name: &'static str, params: &impl Serialize) -> RunConfig {
    RunConfig::new(name, cli.precision.name(), cli.out.as_deref(), params)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let p = cli.precision;
    match &cli.command {
        Command::Bounds(a) => cmd::bounds::run(a, p, &config(cli, "bounds", a)),
        Command::Levelset(a) => cmd::levelset::run(a, &config(cli, "levelset", a)),
        Command::ConductivityHist(a) => cmd::levelset::run_hist(a, &config(cli, "conductivity-hist", a)),
        Command::Witness(a) => cmd::witness::run(a, &config(cli, "witness", a)),
        Command::Cantor(a) => cmd::cantor::run(a, p, &config(cli, "cantor", a)),
        Command::Phase(a) => cmd::phase::run(a, &config(cli, "phase", a)),
        Command::Selftest => cmd::selftest::run(&config(cli, "selftest", &())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
