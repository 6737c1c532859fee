//! A small benchmark campaign driven by a TOML config: traces, a summary,
//! a convergence plot and a timing report, all written under one directory.
//!
//! `cargo run --release --example campaign -- [output-dir]`

use std::path::PathBuf;

use dimsched::harness::{
    emit_convergence_plot, emit_timing_report, run_campaign, CampaignConfig, PlotOptions,
};

const CONFIG: &str = r#"
[objective]
name = "ackley"
dimension = 10

[campaign]
algorithms = ["bo", "dsa"]
runs = 2

[run]
max_iter = 60
train_max_iters = 50
seed = 10
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("dimsched-campaign"));
    let config = CampaignConfig::parse(CONFIG)?;
    let summary = run_campaign(&config, &out)?;

    let traces: Vec<PathBuf> = summary
        .runs
        .iter()
        .filter(|r| r.run == 0)
        .map(|r| out.join(&r.trace))
        .collect();
    let svg = out.join("convergence.svg");
    emit_convergence_plot(
        &traces,
        &svg,
        &PlotOptions {
            title: Some("ackley-10, run 0".into()),
            ..PlotOptions::default()
        },
    )?;

    let report = emit_timing_report(std::slice::from_ref(&summary))?;
    print!("{}", report.to_text());
    println!(
        "\nwrote traces, summary.json and {} to {}",
        svg.display(),
        out.display()
    );
    Ok(())
}
