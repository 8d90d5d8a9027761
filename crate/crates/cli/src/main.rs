use std::io::Read;
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand};

use aqpack_cli::commands::{self, CliError, ConstructArgs, Format, Selection, SweepArgs};

#[derive(Parser)]
#[command(name = "aqpack", version, about = "Pendant Steiner tree packings in augmented cubes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Size, degree, connectivity and the degree bound of AQ_n.
    Info {
        #[arg(short)]
        n: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build and verify 2n-3 internally disjoint pendant S-Steiner trees.
    Construct {
        #[arg(short)]
        n: u32,
        /// Three comma-separated n-bit labels.
        #[arg(short = 'S')]
        s: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Route the quarter trees of Case 1 along Hamiltonian paths.
        #[arg(long)]
        fidelity: bool,
        /// Fail instead of searching when a case recipe does not verify.
        #[arg(long)]
        no_fallback: bool,
    },
    /// Check a certificate file ("-" reads stdin).
    Verify { path: String },
    /// Construct and verify families for many terminal sets.
    #[command(group(ArgGroup::new("selection").required(true).args(["exhaustive", "samples"])))]
    Sweep {
        #[arg(short)]
        n: u32,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
        /// Allow an exhaustive sweep beyond n = 5.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        no_fallback: bool,
        #[arg(long)]
        fidelity: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Exact maximum number of disjoint pendant S-Steiner trees (small n).
    Oracle {
        #[arg(short)]
        n: u32,
        #[arg(short = 'S')]
        s: String,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        /// Allow more than 16 vertices.
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// k internally disjoint u-v paths, or a cut showing fewer exist.
    Paths {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        u: String,
        #[arg(short)]
        v: String,
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn run(command: Command) -> Result<String, CliError> {
    match command {
        Command::Info { n, format } => commands::info(n, format),
        Command::Construct { n, s, format, fidelity, no_fallback } => {
            commands::construct_cmd(&ConstructArgs { n, s: &s, format, fidelity, no_fallback })
        }
        Command::Verify { path } => {
            let text = if path == "-" {
                let mut buf = String::new();
                std::io::stdin().read_to_string(&mut buf).map_err(|e| CliError::Usage(e.to_string()))?;
                buf
            } else {
                std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?
            };
            commands::verify_cmd(&text)
        }
        Command::Sweep { n, exhaustive, samples, seed, jobs, force, no_fallback, fidelity, format } => {
            let selection = match samples {
                Some(samples) if !exhaustive => Selection::Sampled { samples, seed },
                _ => Selection::Exhaustive,
            };
            let started = Instant::now();
            let result = commands::sweep_cmd(&SweepArgs { n, selection, jobs, force, no_fallback, fidelity }, format);
            // Wall time stays off stdout so that output is reproducible.
            eprintln!("runtime: {:.3}s", started.elapsed().as_secs_f64());
            result
        }
        Command::Oracle { n, s, budget, force, format } => commands::oracle_cmd(n, &s, budget, force, format),
        Command::Paths { n, u, v, k, format } => commands::paths_cmd(n, &u, &v, k, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::Failure { stdout, .. } = &e {
                print!("{stdout}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
