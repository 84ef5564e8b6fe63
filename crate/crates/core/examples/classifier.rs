//! Fits the class-means minimum-distance classifier on half the trials,
//! predicts the rest, and saves the model as JSON.
//!
//! ```bash
//! cargo run --release -p nucleeg --example classifier
//! ```

use nucleeg::classify::CmmdcModel;
use nucleeg::eval::{confusion, extract_all, metrics, roc_auc};
use nucleeg::nuclear::FeatureConfig;
use nucleeg::signal::RegionSpec;
use nucleeg::synth::{generate_dataset, GeneratorConfig};

fn main() -> nucleeg::Result<()> {
    let cfg = GeneratorConfig {
        separation: 0.5,
        trials_per_class: 150,
        seed: 4,
        ..Default::default()
    };
    let (trials, _) = generate_dataset(&cfg)?;
    let features = extract_all(&trials, &RegionSpec::all(cfg.n_channels), &FeatureConfig::default())?;
    let labels: Vec<&str> = trials.iter().map(|t| t.label.as_str()).collect();

    let (train, test): (Vec<usize>, Vec<usize>) = (0..trials.len()).partition(|i| i % 2 == 0);
    let model = CmmdcModel::fit(
        &train.iter().map(|&i| &features[i]).collect::<Vec<_>>(),
        &train.iter().map(|&i| labels[i]).collect::<Vec<_>>(),
    )?;
    println!("class means: {:?}", model.means);

    let [negative, positive] = model.class_labels.clone();
    let mut predicted = Vec::new();
    let mut scores = Vec::new();
    for &i in &test {
        predicted.push(model.predict(&features[i].values)?.to_string());
        scores.push(model.score(&features[i].values)?);
    }
    let truth: Vec<&str> = test.iter().map(|&i| labels[i]).collect();
    let c = confusion(&predicted, &truth, &positive, &negative)?;
    let m = metrics(&c)?;
    let roc = roc_auc(&scores, &truth, &positive)?;
    println!("{c:?}");
    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.1}"));
    println!(
        "accuracy {}, sensitivity {}, specificity {}, AUC {:.3}",
        show(m.accuracy),
        show(m.sensitivity),
        show(m.specificity),
        roc.auc
    );
    println!("{}", model.to_json());
    Ok(())
}
