//! Emits the feature scatter, first-feature histogram and spectrum plots
//! for a well-separated synthetic dataset and checks that the two class
//! clusters have disjoint convex hulls.
//!
//! ```bash
//! cargo run --release -p nucleeg --example plots -- /tmp/nucleeg-plots
//! ```

use std::path::PathBuf;

use nucleeg::dataset::{FeatureRow, FeatureTable};
use nucleeg::eval::extract_all;
use nucleeg::nuclear::FeatureConfig;
use nucleeg::plot::{convex_hulls_disjoint, histogram_plot, scatter_plot, spectrum_plot};
use nucleeg::signal::RegionSpec;
use nucleeg::synth::{generate_dataset, GeneratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("nucleeg-plots"));
    let cfg = GeneratorConfig {
        trials_per_class: 100,
        seed: 9,
        ..Default::default()
    };
    let (trials, _) = generate_dataset(&cfg)?;
    let features = extract_all(&trials, &RegionSpec::all(cfg.n_channels), &FeatureConfig::default())?;
    let table = FeatureTable {
        rows: trials
            .iter()
            .zip(&features)
            .map(|(t, f)| FeatureRow {
                trial_id: t.id.clone(),
                label: t.label.clone(),
                subject: t.subject.clone(),
                values: f.values.clone(),
            })
            .collect(),
    };

    let points = |label: &str| -> Vec<(f64, f64)> {
        table
            .rows
            .iter()
            .filter(|r| r.label == label)
            .map(|r| (r.values[0], r.values[1]))
            .collect()
    };
    println!(
        "class hulls disjoint: {}",
        convex_hulls_disjoint(&points("A"), &points("B"))
    );

    std::fs::create_dir_all(&dir)?;
    for (name, plot) in [
        ("scatter", scatter_plot(&table)?),
        ("histogram", histogram_plot(&table)?),
        ("spectrum", spectrum_plot(&table)?),
    ] {
        for (ext, body) in [("svg", &plot.svg), ("csv", &plot.csv)] {
            let path = dir.join(format!("{name}.{ext}"));
            std::fs::write(&path, body)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
