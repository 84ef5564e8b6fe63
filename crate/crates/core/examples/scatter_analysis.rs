//! Within-, between- and mixture-class scatter of the two-feature space,
//! with the J1 and J2 separability criteria, across class separations.
//!
//! ```bash
//! cargo run --release -p nucleeg --example scatter_analysis
//! ```

use nucleeg::eval::{extract_all, scatter_analysis};
use nucleeg::nuclear::FeatureConfig;
use nucleeg::signal::RegionSpec;
use nucleeg::synth::{generate_dataset, GeneratorConfig};

fn main() -> nucleeg::Result<()> {
    println!(
        "{:>10} {:>12} {:>12} {:>10} {:>10}",
        "separation", "tr(Sw)", "tr(Sm)", "J1", "J2"
    );
    for separation in [0.0, 0.25, 0.5, 1.0] {
        let cfg = GeneratorConfig {
            separation,
            trials_per_class: 100,
            seed: 2,
            ..Default::default()
        };
        let (trials, _) = generate_dataset(&cfg)?;
        let features = extract_all(&trials, &RegionSpec::all(cfg.n_channels), &FeatureConfig::default())?;
        let labels: Vec<&str> = trials.iter().map(|t| t.label.as_str()).collect();
        let s = scatter_analysis(&features, &labels)?;
        let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        println!(
            "{separation:>10} {:>12.1} {:>12.1} {:>10} {:>10}",
            s.trace_sw,
            s.trace_sm,
            show(s.j1),
            show(s.j2)
        );
    }
    Ok(())
}
