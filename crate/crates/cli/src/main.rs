use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use bvsynth::bench::bench_dir;
use bvsynth::corpus::{generate_corpus, CorpusSpec, Template};
use bvsynth::solver::{solve_text, Budgets};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bvsynth",
    version,
    about = "Bitvector programming-by-example synthesizer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Wall-clock limit per problem, in seconds.
    #[arg(long, value_name = "SECONDS")]
    timeout: Option<f64>,
    /// Largest expression size any search may reach.
    #[arg(long, value_name = "N", default_value_t = 12)]
    max_size: usize,
    /// Expressions evaluated per search before giving up.
    #[arg(long, value_name = "N", default_value_t = 5_000_000)]
    max_candidates: u64,
}

impl BudgetArgs {
    fn budgets(self) -> Budgets {
        Budgets {
            max_size: self.max_size,
            max_candidates: self.max_candidates,
            timeout: self.timeout.map(Duration::from_secs_f64),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem file and print the solution.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
        /// Print run statistics on stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Generate a corpus of solvable problems.
    Gen {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        size_min: usize,
        #[arg(long, default_value_t = 7)]
        size_max: usize,
        #[arg(long, default_value_t = 8)]
        examples: usize,
        #[arg(long, default_value_t = 64)]
        width: u32,
        /// Grammar family: icfp or smtlib.
        #[arg(long, default_value = "icfp")]
        template: Template,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve every .sl file in a directory and report timings.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
        /// Also write the results as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Problems solved concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve {
            file,
            budgets,
            stats,
        } => {
            let text = match fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            match solve_text(&text, &budgets.budgets()) {
                Ok((_, out)) => {
                    println!("{}", out.text);
                    if stats {
                        eprintln!("{}", out.stats);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Gen {
            count,
            seed,
            size_min,
            size_max,
            examples,
            width,
            template,
            out,
        } => {
            let spec = CorpusSpec {
                count,
                size_min,
                size_max,
                examples,
                width,
                seed,
                template,
            };
            if let Err(e) = spec.validate() {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            match generate_corpus(&spec, &out) {
                Ok(files) => {
                    for f in files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Bench {
            dir,
            budgets,
            csv,
            jobs,
        } => {
            let report = match bench_dir(&dir, &budgets.budgets(), jobs) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", dir.display());
                    return ExitCode::from(2);
                }
            };
            print!("{}", report.to_table());
            if let Some(path) = csv {
                if let Err(e) = fs::write(&path, report.to_csv()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
    }
}
