//! Writes a small synthetic dataset to disk, loads it back through its
//! manifest, and checks the round trip.
//!
//! ```bash
//! cargo run -p nucleeg --example synth_dataset -- /tmp/nucleeg-demo
//! ```

use std::path::PathBuf;

use nucleeg::dataset::{load_dataset, write_dataset};
use nucleeg::synth::{generate_dataset, GeneratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("nucleeg-demo"));
    let cfg = GeneratorConfig {
        trials_per_class: 20,
        subjects: 4,
        seed: 3,
        ..Default::default()
    };
    let (trials, manifest) = generate_dataset(&cfg)?;
    std::fs::create_dir_all(&dir)?;
    let manifest_path = write_dataset(&dir, manifest, &trials)?;
    println!("wrote {}", manifest_path.display());

    let loaded = load_dataset(&manifest_path)?;
    println!(
        "loaded {} trials, {} channels, {} samples each, classes {:?}",
        loaded.trials.len(),
        loaded.manifest.channels.len(),
        loaded.manifest.samples_per_trial,
        loaded.manifest.class_labels()?
    );
    for region in &loaded.manifest.regions {
        println!("  region {:<6} {} channels", region.name, region.len());
    }
    let max_diff = trials
        .iter()
        .zip(&loaded.trials)
        .map(|(a, b)| (&a.samples - &b.samples).amax())
        .fold(0.0, f64::max);
    println!("largest round-trip difference: {max_diff}");
    Ok(())
}
