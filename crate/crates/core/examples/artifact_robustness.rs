//! Cross-validated accuracy on clean synthetic trials versus the same
//! trials with half-cosine artifacts injected, with and without amplitude
//! rejection.
//!
//! ```bash
//! cargo run --release -p nucleeg --example artifact_robustness
//! ```

use nucleeg::eval::{crossval, format_summary, CrossvalConfig};
use nucleeg::signal::{RegionSpec, DEFAULT_REJECT_THRESHOLD};
use nucleeg::synth::{generate_dataset, inject_artifacts, ArtifactConfig, GeneratorConfig};

fn main() -> nucleeg::Result<()> {
    let cfg = GeneratorConfig {
        seed: 7,
        ..Default::default()
    };
    let (clean, _) = generate_dataset(&cfg)?;
    let injected = inject_artifacts(
        &clean,
        &ArtifactConfig {
            seed: 7,
            ..Default::default()
        },
    )?;
    println!(
        "{} of {} trials carry an artifact",
        injected.affected.len(),
        clean.len()
    );

    let region = RegionSpec::all(cfg.n_channels);
    let plain = CrossvalConfig::kfold(2, 10, 7);
    let rejecting = CrossvalConfig {
        reject_threshold: Some(DEFAULT_REJECT_THRESHOLD),
        ..plain.clone()
    };
    let mut rows = Vec::new();
    for (name, trials, config) in [
        ("clean", &clean, &plain),
        ("raw", &injected.trials, &plain),
        ("rejected", &injected.trials, &rejecting),
    ] {
        let report = crossval(trials, &region, config)?;
        let mut row = report.summary_row();
        row.region = name.into();
        rows.push(row);
        if !report.rejected.is_empty() {
            println!("{name}: {} trials rejected", report.rejected.len());
        }
    }
    print!("{}", format_summary(&rows));
    Ok(())
}
