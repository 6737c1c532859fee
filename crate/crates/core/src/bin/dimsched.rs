use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dimsched::harness::{
    emit_convergence_plot, emit_timing_report, run_campaign, CampaignConfig, CampaignSummary,
    HarnessError, PlotOptions,
};
use dimsched::objectives::catalog;

/// Bayesian optimization with dimension scheduling: run campaigns, plot
/// convergence traces and tabulate timings.
///
/// Diagnostics go to stderr, filtered by DIMSCHED_LOG (e.g. `debug`).
/// Exit codes: 0 success, 2 configuration error, 3 a run aborted, 4 I/O or
/// unreadable input.
#[derive(Parser)]
#[command(name = "dimsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the objective catalog as JSON.
    ListObjectives,
    /// Run a campaign; prints the summary JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides campaign.output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed (overrides run.seed).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write an SVG convergence plot of one or more traces.
    Plot {
        #[arg(long, num_args = 1.., required = true)]
        traces: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        log_scale: bool,
    },
    /// Tabulate per-algorithm timings across campaign summaries.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        summaries: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::ListObjectives => {
            println!(
                "{}",
                serde_json::to_string_pretty(&catalog()).expect("catalog serializes")
            );
        }
        Command::Run { config, out, seed } => {
            let mut cfg = CampaignConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.run.seed = s;
            }
            let out = out.unwrap_or_else(|| cfg.campaign.output_dir.clone());
            let summary = run_campaign(&cfg, &out)?;
            println!("{}", summary.to_json());
            if summary.any_aborted() {
                log::error!("at least one run aborted; see summary status fields");
                return Ok(ExitCode::from(3));
            }
        }
        Command::Plot {
            traces,
            out,
            title,
            log_scale,
        } => {
            let opts = PlotOptions {
                title,
                log_scale,
                ..PlotOptions::default()
            };
            emit_convergence_plot(&traces, &out, &opts)?;
            log::info!("wrote {}", out.display());
        }
        Command::Report { summaries, format } => {
            let loaded = summaries
                .iter()
                .map(|p| CampaignSummary::read(p))
                .collect::<Result<Vec<_>, _>>()?;
            let report = emit_timing_report(&loaded)?;
            match format {
                Format::Csv => print!("{}", report.to_csv()),
                Format::Text => print!("{}", report.to_text()),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DIMSCHED_LOG", "info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
