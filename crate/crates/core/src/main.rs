use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use logsmooth::harness::{self, output, ExperimentConfig};
use logsmooth::loworder::{verify_membership, LogExampleParams};

#[derive(Parser)]
#[command(
    name = "logsmooth",
    version,
    about = "Rate experiments for regularized ill-posed equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a rate experiment and write report.csv, plot.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Check the low-order example and print the report as JSON.
    LoworderVerify {
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        kappa: f64,
    },
    /// Run qualification, growth and commutation checks.
    CheckAxioms {
        #[arg(long)]
        config: PathBuf,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid_n: Option<usize>,
    },
}

fn run(cli: Cli) -> logsmooth::Result<bool> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            grid_n,
        } => {
            let cfg = ExperimentConfig::load(&config)?.with_overrides(seed, grid_n);
            let report = harness::run_to_dir(&cfg, &out)?;
            let s = &report.summary;
            println!(
                "rows={} max_ratio={:.4e} median_ratio={:.4e} spread={:.3} pass={}",
                report.rows.len(),
                s.max_ratio,
                s.median_ratio,
                s.ratio_spread,
                s.pass
            );
            if let Some(c) = &report.caveat {
                eprintln!("warning: {c}");
            }
            Ok(s.pass)
        }
        Command::LoworderVerify { c, kappa } => {
            let params = LogExampleParams::probe(c, kappa)?;
            let report = verify_membership(&params)?;
            println!("{}", output::to_json(&report)?);
            Ok(report.verdict)
        }
        Command::CheckAxioms {
            config,
            out,
            seed,
            grid_n,
        } => {
            let cfg = ExperimentConfig::load(&config)?.with_overrides(seed, grid_n);
            let report = harness::check_axioms(&cfg)?;
            let json = output::to_json(&report)?;
            match out {
                Some(path) => output::write(&path, &json)?,
                None => println!("{json}"),
            }
            Ok(report.qualification.iter().all(|q| q.pass != Some(false)))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
