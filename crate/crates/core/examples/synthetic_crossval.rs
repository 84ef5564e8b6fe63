//! Ten-fold cross-validation on synthetic data at several class separations,
//! printed as a summary table.
//!
//! ```bash
//! cargo run -p nucleeg --example synthetic_crossval
//! ```

use nucleeg::eval::{crossval, format_summary, CrossvalConfig};
use nucleeg::signal::RegionSpec;
use nucleeg::synth::{generate_dataset, GeneratorConfig};

fn main() -> nucleeg::Result<()> {
    let mut rows = Vec::new();
    for separation in [0.0, 0.1, 0.25, 0.5, 1.0] {
        let cfg = GeneratorConfig {
            separation,
            seed: 7,
            ..Default::default()
        };
        let (trials, _) = generate_dataset(&cfg)?;
        let region = RegionSpec::all(cfg.n_channels);
        let report = crossval(&trials, &region, &CrossvalConfig::kfold(2, 10, 7))?;
        let mut row = report.summary_row();
        row.region = format!("sep={separation}");
        rows.push(row);
        if let Some(s) = &report.scatter {
            println!("separation {separation}: J1 = {:?}, J2 = {:?}", s.j1, s.j2);
        }
    }
    print!("{}", format_summary(&rows));
    Ok(())
}
