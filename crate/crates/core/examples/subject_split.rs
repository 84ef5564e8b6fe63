//! Holds out 10% of subjects for testing instead of k-fold splitting.
//!
//! ```bash
//! cargo run --release -p nucleeg --example subject_split
//! ```

use nucleeg::eval::{crossval, format_summary, subject_split, CrossvalConfig, Protocol};
use nucleeg::signal::RegionSpec;
use nucleeg::synth::{generate_dataset, GeneratorConfig};

fn main() -> nucleeg::Result<()> {
    let cfg = GeneratorConfig {
        subjects: 34,
        trials_per_class: 102,
        seed: 11,
        ..Default::default()
    };
    let (trials, _) = generate_dataset(&cfg)?;
    let subjects: Vec<&str> = trials.iter().map(|t| t.subject.as_str()).collect();
    let split = subject_split(&subjects, 0.1, 5)?;
    println!("test subjects: {:?}", split.test_subjects);
    println!(
        "{} training trials, {} test trials",
        split.train.len(),
        split.test.len()
    );

    let config = CrossvalConfig {
        protocol: Protocol::SubjectSplit { test_fraction: 0.1 },
        seed: 5,
        ..Default::default()
    };
    let report = crossval(&trials, &RegionSpec::all(cfg.n_channels), &config)?;
    print!("{}", format_summary(&[report.summary_row()]));
    Ok(())
}
