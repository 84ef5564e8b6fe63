//! Normalizes one trial, forms its nuclear matrix and prints the full
//! singular spectrum next to the two-value feature vector.
//!
//! ```bash
//! cargo run -p nucleeg --example nuclear_spectrum
//! ```

use nucleeg::nuclear::{extract_features, nuclear_matrix, singular_values};
use nucleeg::signal::{normalize, RegionSpec, DEFAULT_EPSILON};
use nucleeg::synth::{generate_dataset, GeneratorConfig};

fn main() -> nucleeg::Result<()> {
    let cfg = GeneratorConfig {
        trials_per_class: 1,
        subjects: 1,
        ..Default::default()
    };
    let (trials, _) = generate_dataset(&cfg)?;
    let region = RegionSpec::all(cfg.n_channels);

    for trial in &trials {
        let phi = normalize(trial, DEFAULT_EPSILON);
        let n = nuclear_matrix(&phi);
        let spectrum = singular_values(&n)?;
        let features = extract_features(trial, &region, 2)?;
        println!("trial {} (class {})", trial.id, trial.label);
        println!(
            "  trace(N) = {:.3}, n*d = {}",
            n.trace(),
            trial.n_channels() * trial.n_samples()
        );
        let shown: Vec<String> = spectrum.values.iter().map(|v| format!("{v:.2}")).collect();
        println!("  spectrum: {}", shown.join(" "));
        println!("  features: {:?}", features.values);
    }
    Ok(())
}
