//! Command-line front end: `synth`, `extract`, `crossval` and `plot`.
//!
//! Exit status is 0 on success, 2 for configuration or usage errors, 3 for
//! data errors and 4 for I/O errors. `NUCLEEG_THREADS` caps the worker
//! pool size.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classify::CmmdcModel;
use crate::dataset::{load_dataset, write_dataset, FeatureRow, FeatureTable};
use crate::error::{Error, ErrorKind, Result};
use crate::eval::{crossval, extract_all, format_summary, CrossvalConfig, Protocol};
use crate::nuclear::{self, FeatureConfig};
use crate::plot;
use crate::signal::{amplitude_reject, Trial};
use crate::synth::{generate_dataset, inject_artifacts, ArtifactConfig, GeneratorConfig};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const THREADS_ENV: &str = "NUCLEEG_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "nucleeg",
    version,
    about = "Nuclear singular-value features for two-class EEG trials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic dataset (manifest plus trial CSVs).
    Synth(SynthArgs),
    /// Extract features and full singular spectra for every kept trial.
    Extract(ExtractArgs),
    /// Cross-validate the class-means classifier and write a report.
    Crossval(CrossvalArgs),
    /// Emit scatter, histogram and spectrum plots as SVG plus CSV.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 16)]
    pub channels: usize,
    #[arg(long, default_value_t = 150)]
    pub samples: usize,
    /// Trials per class.
    #[arg(long, default_value_t = 300)]
    pub trials: usize,
    #[arg(long, default_value_t = 10)]
    pub subjects: usize,
    #[arg(long, default_value_t = 1.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Latent ranks of the two classes, as `r1,r2`.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [2, 8])]
    pub ranks: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub noise: f64,
    #[arg(long, default_value_t = 0.0)]
    pub artifact_rate: f64,
    #[arg(long, default_value_t = 90.0)]
    pub artifact_amplitude: f64,
    #[arg(long, default_value_t = 20)]
    pub artifact_width: usize,
    #[arg(long, default_value_t = 0)]
    pub artifact_seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FeatureArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value = "ALL")]
    pub region: String,
    #[arg(long, default_value_t = nuclear::DEFAULT_K)]
    pub k: usize,
    /// Drop trials whose peak |amplitude| exceeds this value.
    #[arg(long)]
    pub reject_threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub features: FeatureArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CrossvalArgs {
    #[command(flatten)]
    pub features: FeatureArgs,
    #[arg(long, default_value_t = crate::eval::DEFAULT_FOLDS)]
    pub folds: usize,
    #[arg(long, default_value_t = crate::eval::DEFAULT_SEED)]
    pub seed: u64,
    /// Positive class label; defaults to the second class.
    #[arg(long)]
    pub positive: Option<String>,
    /// Hold out this fraction of subjects instead of k-fold splitting.
    #[arg(long)]
    pub subject_split: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Feature CSV written by `extract`.
    #[arg(long)]
    pub features: PathBuf,
    /// Spectrum CSV written by `extract`; the feature columns are used
    /// when absent.
    #[arg(long)]
    pub spectra: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Config => EXIT_CONFIG,
        ErrorKind::Data => EXIT_DATA,
        ErrorKind::Io => EXIT_IO,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status. Messages go to stdout and stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match configure_threads().and_then(|()| run(&cli.command)) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // a second build in the same process is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one command, returning the lines to print on success.
pub fn run(command: &Command) -> Result<Vec<String>> {
    match command {
        Command::Synth(a) => cmd_synth(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Crossval(a) => cmd_crossval(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: PathBuf, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

pub fn cmd_synth(a: &SynthArgs) -> Result<Vec<String>> {
    let cfg = GeneratorConfig {
        n_channels: a.channels,
        d_samples: a.samples,
        trials_per_class: a.trials,
        subjects: a.subjects,
        separation: a.separation,
        seed: a.seed,
        class_factor_ranks: (a.ranks[0], a.ranks[1]),
        noise_std: a.noise,
        ..Default::default()
    };
    let (mut trials, manifest) = generate_dataset(&cfg)?;
    let mut affected = Vec::new();
    if a.artifact_rate > 0.0 {
        let injection = inject_artifacts(
            &trials,
            &ArtifactConfig {
                rate: a.artifact_rate,
                amplitude: a.artifact_amplitude,
                width: a.artifact_width,
                seed: a.artifact_seed,
                ..Default::default()
            },
        )?;
        trials = injection.trials;
        affected = injection.affected;
    }
    create_dir(&a.out)?;
    let manifest_path = write_dataset(&a.out, manifest, &trials)?;
    write(a.out.join("artifacts.csv"), id_list_csv(&affected))?;
    Ok(vec![format!(
        "wrote {} trials ({} with artifacts) to {}",
        trials.len(),
        affected.len(),
        manifest_path.display()
    )])
}

/// Loaded trials after rejection, plus the rejected ids.
struct Prepared {
    kept: Vec<Trial>,
    rejected: Vec<String>,
    region: crate::signal::RegionSpec,
}

fn prepare(a: &FeatureArgs) -> Result<Prepared> {
    let dataset = load_dataset(&a.manifest)?;
    let region = dataset.manifest.region(&a.region)?;
    let (kept, rejected) = match a.reject_threshold {
        Some(t) => {
            let r = amplitude_reject(dataset.trials, t)?;
            (r.kept, r.rejected)
        }
        None => (dataset.trials, Vec::new()),
    };
    Ok(Prepared { kept, rejected, region })
}

fn feature_table(trials: &[Trial], values: Vec<Vec<f64>>) -> FeatureTable {
    FeatureTable {
        rows: trials
            .iter()
            .zip(values)
            .map(|(t, values)| FeatureRow {
                trial_id: t.id.clone(),
                label: t.label.clone(),
                subject: t.subject.clone(),
                values,
            })
            .collect(),
    }
}

fn id_list_csv(ids: &[String]) -> String {
    let mut s = String::from("trial_id\n");
    for id in ids {
        s.push_str(id);
        s.push('\n');
    }
    s
}

pub fn cmd_extract(a: &ExtractArgs) -> Result<Vec<String>> {
    let p = prepare(&a.features)?;
    let k = a.features.k;
    if k == 0 || k > p.region.len() {
        return Err(Error::Config(format!(
            "feature count k={k} must be in 1..={} for region `{}`",
            p.region.len(),
            p.region.name
        )));
    }
    let config = FeatureConfig {
        k: p.region.len(),
        ..Default::default()
    };
    let spectra = extract_all(&p.kept, &p.region, &config)?;
    let features = feature_table(&p.kept, spectra.iter().map(|s| s.values[..k].to_vec()).collect());
    let spectra = feature_table(&p.kept, spectra.into_iter().map(|s| s.values).collect());
    create_dir(&a.out)?;
    features.write(a.out.join("features.csv"), "f")?;
    spectra.write(a.out.join("spectra.csv"), "s")?;
    write(a.out.join("rejected.csv"), id_list_csv(&p.rejected))?;
    Ok(vec![format!(
        "extracted {} trials ({} rejected), k={k}, region {} to {}",
        p.kept.len(),
        p.rejected.len(),
        p.region.name,
        a.out.display()
    )])
}

pub fn cmd_crossval(a: &CrossvalArgs) -> Result<Vec<String>> {
    let f = &a.features;
    let dataset = load_dataset(&f.manifest)?;
    let region = dataset.manifest.region(&f.region)?;
    let protocol = match a.subject_split {
        Some(test_fraction) => Protocol::SubjectSplit { test_fraction },
        None => Protocol::KFold {
            folds: a.folds,
            stratified: true,
        },
    };
    let config = CrossvalConfig {
        features: FeatureConfig {
            k: f.k,
            ..Default::default()
        },
        protocol,
        seed: a.seed,
        positive: a.positive.clone(),
        reject_threshold: f.reject_threshold,
    };
    let report = crossval(&dataset.trials, &region, &config)?;

    let kept: Vec<Trial> = dataset
        .trials
        .into_iter()
        .filter(|t| !report.rejected.contains(&t.id))
        .collect();
    let features = extract_all(&kept, &region, &config.features)?;
    let labels: Vec<&str> = kept.iter().map(|t| t.label.as_str()).collect();
    let model = CmmdcModel::fit(&features, &labels)?;

    let summary = format_summary(&[report.summary_row()]);
    create_dir(&a.out)?;
    write(a.out.join("report.json"), report.to_json() + "\n")?;
    write(a.out.join("summary.txt"), &summary)?;
    write(a.out.join("model.json"), model.to_json() + "\n")?;
    let mut lines: Vec<String> = summary.lines().map(str::to_string).collect();
    lines.extend(report.flags.iter().map(|fl| format!("note: {fl}")));
    Ok(lines)
}

pub fn cmd_plot(a: &PlotArgs) -> Result<Vec<String>> {
    let features = FeatureTable::read(&a.features)?;
    if features.rows.is_empty() {
        return Err(Error::Data(format!(
            "feature file {} has no rows",
            a.features.display()
        )));
    }
    let spectra = match &a.spectra {
        Some(p) => FeatureTable::read(p)?,
        None => features.clone(),
    };
    let mut lines = Vec::new();
    let histogram = plot::histogram_plot(&features)?;
    let spectrum = plot::spectrum_plot(&spectra)?;
    let scatter = if features.width() >= 2 {
        Some(plot::scatter_plot(&features)?)
    } else {
        lines.push(format!(
            "scatter skipped: needs k >= 2, features have k = {}",
            features.width()
        ));
        None
    };
    create_dir(&a.out)?;
    let mut emitted = vec![("histogram", histogram), ("spectrum", spectrum)];
    if let Some(s) = scatter {
        emitted.insert(0, ("scatter", s));
    }
    for (name, out) in emitted {
        write(a.out.join(format!("{name}.svg")), &out.svg)?;
        write(a.out.join(format!("{name}.csv")), &out.csv)?;
        lines.push(format!("wrote {name}.svg and {name}.csv"));
    }
    Ok(lines)
}
