use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use gchs_cli::{bracket, check, exit, exit_code, run, scenario};

#[derive(Parser)]
#[command(name = "gchs", version, about = "Structural Poisson brackets and covariant Hamilton flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write CSV trajectories and JSON summaries.
    Run {
        scenario: PathBuf,
        /// Worker threads for ensembles of initial conditions.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Evaluate the brackets of two expressions at one point.
    Bracket {
        #[arg(short = 'f')]
        f: String,
        #[arg(short = 'g')]
        g: String,
        /// Point as q1,p1,q2,p2,...
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        scenario: PathBuf,
    },
    /// Run the seeded invariant suites.
    Check {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        scenario: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { scenario, jobs } => {
            let setup = scenario::load_setup(&scenario)?;
            for out in run::run(&setup, jobs)? {
                log::info!("wrote {} and {}", out.csv.display(), out.json.display());
                println!(
                    "member {}: {} samples to t = {}, decay_law_max_dev = {:.3e} -> {}",
                    out.summary.member,
                    out.summary.samples,
                    out.summary.t_end,
                    out.summary.decay_law_max_dev,
                    out.csv.display()
                );
            }
            Ok(exit::OK)
        }
        Command::Bracket { f, g, at, scenario } => {
            let setup = scenario::load_setup(&scenario)?;
            let point = bracket::parse_point(&at, setup.n)?;
            print!("{}", bracket::brackets(&f, &g, &setup.system, &point)?.lines());
            Ok(exit::OK)
        }
        Command::Check { seed, count, scenario } => {
            let setup = scenario::load_setup(&scenario)?;
            let report = check::run_check(&setup, seed, count);
            println!("seed {seed}, {count} points, n = {}", setup.n);
            print!("{report}");
            Ok(if report.passed() { exit::OK } else { exit::CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GCHS_LOG", "warn")).init();
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
