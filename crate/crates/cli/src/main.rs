mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "symrig", version, about = "Infinitesimal rigidity of symmetric body-bar and body-hinge frameworks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for the random generic configuration.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Ambient dimension d; must match the input when given.
    #[arg(long, global = true)]
    dim: Option<usize>,

    /// Restrict to these irreps, e.g. `--irrep 1` or `--irrep 1,0`.
    #[arg(long, global = true)]
    irrep: Vec<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Also run the exhaustive counting oracle (edge sets of size ≤ 20).
    #[arg(long, global = true)]
    oracle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-irrep ranks, flex counts and the overall verdict.
    Analyze { input: PathBuf },
    /// Matroid-union certificates for each irrep of a (Z/2Z)^l framework.
    Certify { input: PathBuf },
    /// Nontrivial symmetric infinitesimal flexes.
    Flex { input: PathBuf },
    /// The covering graph and, for body-bar input, its lifted bars.
    Lift { input: PathBuf },
    /// Randomized agreement checks between the numeric and combinatorial paths.
    Crosscheck {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(long, default_value_t = 10)]
        max_edges: usize,
        /// mirror, half-turn, inversion, two-mirrors, two-half-turns or half-turn-mirror.
        #[arg(long, default_value = "half-turn")]
        group: String,
        /// Put at least one loop into L in every instance.
        #[arg(long)]
        require_l: bool,
    },
}

pub struct Job {
    pub seed: u64,
    pub dim: Option<usize>,
    pub irreps: Vec<String>,
    pub format: Format,
    pub oracle: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let job = Job {
        seed: cli.seed,
        dim: cli.dim,
        irreps: cli.irrep,
        format: cli.format,
        oracle: cli.oracle,
    };
    let outcome = match cli.command {
        Command::Analyze { input } => commands::analyze(&job, &input),
        Command::Certify { input } => commands::certify(&job, &input),
        Command::Flex { input } => commands::flex(&job, &input),
        Command::Lift { input } => commands::lift(&job, &input),
        Command::Crosscheck {
            count,
            max_vertices,
            max_edges,
            group,
            require_l,
        } => commands::crosscheck(&job, count, max_vertices, max_edges, &group, require_l),
    };
    match outcome {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(err) => {
            if let Some(text) = &err.partial {
                print!("{text}");
            }
            eprintln!("error: {}", err.error);
            ExitCode::from(commands::exit_code(&err.error))
        }
    }
}
