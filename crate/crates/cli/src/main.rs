use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use urquhart_cli::commands;
use urquhart_cli::error::{CliError, EXIT_CONFIG, EXIT_MATCH, EXIT_NO_MATCH};
use urquhart_cli::RunConfig;

/// Place recognition in forests with Urquhart tessellations.
///
/// Exit codes: 0 success or match, 1 no match or failed merge, 2 invalid
/// configuration or input, 3 I/O failure.
#[derive(Parser, Debug)]
#[command(name = "urquhart", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the simulator, matcher and RANSAC seeds.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a forest and a trajectory of observations.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Match observation J into observation I of an observations file.
    Match {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        observations: PathBuf,
        i: usize,
        j: usize,
        /// Also write the transform to OUT/transforms.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Loop-closure evaluation over the configured (omega, sigma) grid, or
    /// over one simulated run when --input is given.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Directory written by `simulate`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Merge sub-maps into one map; each observation of the file is one
    /// sub-map, and simulated sub-maps are used without a file.
    Merge {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        observations: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Time feature building and matching.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        observations: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn setup(common: &Common) -> Result<RunConfig, CliError> {
    if let Some(n) = common.jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    RunConfig::load(common.config.as_deref())?.resolve(common.seed)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Simulate { common, out } => {
            let cfg = setup(&common)?;
            let sim = commands::simulate(&cfg, &out)?;
            let points: usize = sim.observations.iter().map(|o| o.len()).sum();
            println!(
                "{} landmarks, {} observations, {points} observed points -> {}",
                sim.map.len(),
                sim.observations.len(),
                out.display()
            );
            Ok(EXIT_MATCH)
        }
        Command::Match { common, observations, i, j, out } => {
            let cfg = setup(&common)?;
            let report = commands::match_observations_file(&cfg, &observations, i, j, out.as_deref())?;
            println!("{}", report.summary());
            Ok(if report.decision.estimated.is_some() { EXIT_MATCH } else { EXIT_NO_MATCH })
        }
        Command::Eval { common, input, out } => {
            let cfg = setup(&common)?;
            match input {
                Some(dir) => {
                    for p in commands::eval_run(&cfg, &dir, &out)? {
                        println!(
                            "min_corrs {:>3}: precision {:.3} recall {:.3} f1 {:.3}",
                            p.min_corrs, p.precision, p.recall, p.f1
                        );
                    }
                }
                None => {
                    let grid = commands::eval_grid(&cfg, &out)?;
                    println!("F1 (rows sigma {:?}, columns omega {:?})", cfg.experiment.sigmas, cfg.experiment.omegas);
                    for (sigma, row) in cfg.experiment.sigmas.iter().zip(grid) {
                        let cells: Vec<String> = row.iter().map(|f| format!("{f:.3}")).collect();
                        println!("{sigma:>5}: {}", cells.join(" "));
                    }
                }
            }
            Ok(EXIT_MATCH)
        }
        Command::Merge { common, observations, out } => {
            let cfg = setup(&common)?;
            let (_, report) = commands::merge(&cfg, observations.as_deref(), &out)?;
            println!(
                "{} sub-maps, {} landmarks merged into {}, failures {:?}",
                report.submaps, report.input_landmarks, report.merged_landmarks, report.failures
            );
            Ok(if report.failures.is_empty() { EXIT_MATCH } else { EXIT_NO_MATCH })
        }
        Command::Bench { common, observations, out } => {
            let cfg = setup(&common)?;
            let t = commands::bench(&cfg, observations.as_deref(), &out)?;
            println!(
                "descriptor build median {:.3} ms over {} observations; matching median {:.3} ms over {} pairs",
                t.descriptor_median_ms(),
                t.descriptor_ms.len(),
                t.matching_median_ms(),
                t.matching_ms.len()
            );
            Ok(EXIT_MATCH)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_MATCH });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
