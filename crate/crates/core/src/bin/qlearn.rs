use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qlearn::analysis::{estimate_margin, incidence_scaling};
use qlearn::data::{load_dataset, normalize, NormalizationMode};
use qlearn::experiment::{run_experiment, run_validation_suite, ExperimentConfig, ValidationOptions};
use qlearn::lattices::SchemeSpec;
use qlearn::Error;

const EXIT_VIOLATION: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "qlearn", version, about = "Learning linear separators on quantized lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config; writes <name>.csv and <name>.txt.
    Run { config: PathBuf },
    /// Run the built-in checks; exits 1 if any fails.
    Validate {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the error parameter of a scheme given as key=value pairs,
    /// e.g. `kind=regular dim=2 points=4 lo=-1 hi=1`.
    Delta {
        #[arg(required = true, num_args = 1..)]
        scheme: Vec<String>,
    },
    /// Separator incidence counts on [-1,1]^d for each points-per-dimension.
    Incidence {
        dim: usize,
        /// Comma-separated, e.g. 8,16,32,64.
        #[arg(value_delimiter = ',')]
        points: Vec<usize>,
        #[arg(long, default_value_t = 32)]
        normals: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate the margin of a dataset with full-precision Frank-Wolfe.
    Margin {
        dataset: PathBuf,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        /// Scale examples to unit max norm first.
        #[arg(long)]
        unit_norm: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qlearn: {e}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Run { config } => {
            let config = ExperimentConfig::from_file(&config)?;
            let output = run_experiment(&config)?;
            let (csv, txt) = output.write(&config.output_dir())?;
            print!("{}", output.to_text());
            println!("\nwrote {} and {}", csv.display(), txt.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { instances, seed } => {
            let report = run_validation_suite(&ValidationOptions { instances, seed });
            print!("{report}");
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATION)
            })
        }
        Command::Delta { scheme } => {
            let spec = SchemeSpec::parse_flat(&scheme.join(" "))?;
            let s = spec.build()?;
            println!("scheme {}", s.describe());
            println!("atoms  {} (log2 {:.3})", s.atom_count(), s.atom_count().log2());
            println!("delta  {}", s.delta());
            Ok(ExitCode::SUCCESS)
        }
        Command::Incidence {
            dim,
            points,
            normals,
            seed,
        } => {
            let r = incidence_scaling(dim, &points, normals, seed)?;
            println!("{:>8}  {:>12}  {:>12}  {:>8}  {:>8}  {:>12}", "n", "m", "mean", "min", "max", "m^(1-1/d)");
            for row in &r.rows {
                println!(
                    "{:>8}  {:>12}  {:>12.2}  {:>8}  {:>8}  {:>12.2}",
                    row.points_per_dim,
                    row.atoms,
                    row.mean_count,
                    row.min_count,
                    row.max_count,
                    (row.atoms as f64).powf(1.0 - 1.0 / dim as f64)
                );
            }
            println!("slope {:.4} (theory {:.4})", r.slope, 1.0 - 1.0 / dim as f64);
            Ok(ExitCode::SUCCESS)
        }
        Command::Margin {
            dataset,
            budget,
            unit_norm,
        } => {
            let mut data = load_dataset(&dataset)?;
            if unit_norm {
                data = normalize(&data, &NormalizationMode::UnitMaxNorm)?.0;
            }
            let m = estimate_margin(&data, budget)?;
            println!("dataset {} ({} examples, d={})", data.name(), data.len(), data.dim());
            if m.separable() {
                println!("margin {} after {} steps", m.gamma_hat, m.steps);
            } else {
                println!("not separable: best normalized margin {} after {} steps", m.gamma_hat, m.steps);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
