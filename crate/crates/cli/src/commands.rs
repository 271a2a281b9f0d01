use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tls_spectro::dataset::{
    export_png, generate_dataset, DatasetManifest, GenerationConfig, MapFile, NoiseMode, Split, SplitSizes,
};
use tls_spectro::estimator::{estimate_dataset, read_estimates, write_estimates, EstimatorConfig, RejectReason};
use tls_spectro::evaluation::{
    error_points, error_vs_detuning, labels_from_manifest, mse, render_table, scatter_export, Bounds, Labels,
    ModelColumn, PredictionTable, Scale,
};
use tls_spectro::SpectroscopyMap;

use crate::args::{EstimateArgs, EvaluateArgs, GenerateArgs, NoiseArg, RenderArgs, RulesArg, SplitFilter};
use crate::UsageError;

/// Effective configuration of a run, written next to its outputs.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
enum RunRecord {
    Generate { parallelism: usize, generation: GenerationConfig },
    Estimate { parallelism: usize, dataset: PathBuf, estimator: EstimatorConfig },
    Evaluate { dataset: PathBuf, predictions: Vec<String>, split: String, detuning_bins: usize },
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `path` with `.run.json` appended to its file name.
fn run_record_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".run.json");
    path.with_file_name(name)
}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

/// 1400/600/200 scaled to `n`.
fn scaled_splits(n: usize) -> SplitSizes {
    let total = SplitSizes::DESK.total();
    let test = (n * SplitSizes::DESK.test + total / 2) / total;
    let validation = (n * SplitSizes::DESK.validation + total / 2) / total;
    SplitSizes { train: n - test - validation, validation, test }
}

fn load_generation_config(path: &Path) -> Result<GenerationConfig> {
    let value = read_json(path)?;
    // run.json holds it under "generation", manifest.json under "config".
    let inner = value.get("generation").or_else(|| value.get("config")).cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| usage(format!("{}: not a generation config: {e}", path.display())))
}

pub fn generate(args: GenerateArgs, parallelism: usize) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => load_generation_config(path)?,
        None => GenerationConfig::default(),
    };
    if let Some(n) = args.n {
        config.n = n;
        config.splits = Some(scaled_splits(n));
    }
    if let Some(s) = args.splits {
        config.splits = Some(SplitSizes { train: s.0[0], validation: s.0[1], test: s.0[2] });
    }
    if args.no_splits {
        config.splits = None;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(noise) = args.noise {
        config.noise = match noise {
            NoiseArg::Clean => NoiseMode::Clean,
            NoiseArg::Noisy => NoiseMode::Noisy,
        };
    }
    if let Some(w) = args.noise_width {
        config.noise_width = w.0;
    }
    if let Some(g) = args.grid_omega {
        config.protocol.omega = g;
    }
    if let Some(g) = args.grid_t {
        config.protocol.time = g;
    }
    if let Some(a) = args.amplitude {
        config.protocol.drive = a;
    }
    if let Some(m) = args.method {
        config.protocol.method = m.0;
    }
    if args.png {
        config.write_png = true;
    }
    config.validate().map_err(|e| usage(e.to_string()))?;

    info!("generating {} samples into {} with {parallelism} threads", config.n, args.out.display());
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let manifest = generate_dataset(&args.out, &config, parallelism)?;
    write_json(&args.out.join("run.json"), &RunRecord::Generate { parallelism, generation: config })?;
    println!("wrote {} samples to {}", manifest.sample_count, args.out.display());
    Ok(())
}

fn load_manifest(dir: &Path) -> Result<DatasetManifest> {
    DatasetManifest::load(dir).with_context(|| format!("loading dataset {}", dir.display()))
}

pub fn estimate(args: EstimateArgs, parallelism: usize) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => {
            let value = read_json(path)?;
            let inner = value.get("estimator").cloned().unwrap_or(value);
            serde_json::from_value(inner)
                .map_err(|e| usage(format!("{}: not an estimator config: {e}", path.display())))?
        }
        None => EstimatorConfig::default(),
    };
    match args.rules {
        Some(RulesArg::Minimal) => {
            config = EstimatorConfig { window: config.window, shift_sign: config.shift_sign, ..EstimatorConfig::minimal() }
        }
        Some(RulesArg::Default) => {
            config = EstimatorConfig { window: config.window, shift_sign: config.shift_sign, ..EstimatorConfig::default() }
        }
        None => {}
    }
    if let Some(w) = args.window {
        config.window = w;
    }
    if let Some(s) = args.shift_sign {
        config.shift_sign = s;
    }
    if !(config.window > 0.0 && config.window.is_finite()) {
        return Err(usage(format!("window must be positive, got {}", config.window)));
    }

    let manifest = load_manifest(&args.dataset)?;
    let records = estimate_dataset(&args.dataset, &manifest, &config, parallelism)?;
    write_estimates(&args.out, &records)?;
    write_json(
        &run_record_path(&args.out),
        &RunRecord::Estimate { parallelism, dataset: args.dataset.clone(), estimator: config },
    )?;

    let valid = records.iter().filter(|r| r.valid).count();
    let mut reasons: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records.iter().filter_map(|r| r.reject_reason) {
        *reasons.entry(r.as_str()).or_default() += 1;
    }
    println!("{valid}/{} estimates valid", records.len());
    for (reason, count) in reasons {
        println!("  {reason}: {count}");
    }
    Ok(())
}

enum Loaded {
    Predictions(PredictionTable),
    Estimates(Vec<tls_spectro::estimator::EstimateRecord>),
}

fn load_predictions(path: &Path, bounds: &Bounds) -> Result<Loaded> {
    let header = csv_header(path)?;
    if header.iter().any(|h| h == "nu_tls_hat") && header.iter().any(|h| h == "valid") {
        Ok(Loaded::Estimates(read_estimates(path)?))
    } else {
        Ok(Loaded::Predictions(PredictionTable::read_csv(path, Some(bounds))?))
    }
}

fn csv_header(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text.lines().next().unwrap_or("");
    Ok(first.split(',').map(|s| s.trim().to_string()).collect())
}

fn split_matches(filter: SplitFilter, split: Split) -> bool {
    match filter {
        SplitFilter::All => true,
        SplitFilter::Train => split == Split::Train,
        SplitFilter::Validation => split == Split::Validation,
        SplitFilter::Test => split == Split::Test,
    }
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let manifest = load_manifest(&args.dataset)?;
    let labels: Labels = labels_from_manifest(&manifest);
    let bounds = Bounds::from_manifest(&manifest)?;
    let splits: BTreeMap<usize, Split> = manifest.records.iter().map(|r| (r.index, r.split)).collect();
    if let Some(dir) = &args.scatter_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let mut columns = Vec::new();
    let mut extra = String::new();
    for entry in &args.predictions {
        let (name, path) = match entry.split_once('=') {
            Some((n, p)) => (n.to_string(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(entry);
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| entry.clone());
                (stem, p)
            }
        };
        let (mut table, estimates) = match load_predictions(&path, &bounds)? {
            Loaded::Predictions(t) => (t, None),
            Loaded::Estimates(e) => (PredictionTable::from_estimates(&e), Some(e)),
        };
        if let Some(bad) = table.rows.iter().find(|r| !labels.contains_key(&r.index)) {
            bail!("{}: sample {} is not in the dataset", path.display(), bad.index);
        }
        table.rows.retain(|r| split_matches(args.split, splits[&r.index]));
        let raw = mse(&table, &labels, Scale::Raw, None)?;
        let normalized = mse(&table, &labels, Scale::Normalized, Some(&bounds))?;
        if let Some(dir) = &args.scatter_dir {
            scatter_export(&table, &labels, Scale::Raw, None, &dir.join(format!("{name}_raw.csv")))?;
            scatter_export(&table, &labels, Scale::Normalized, Some(&bounds), &dir.join(format!("{name}_normalized.csv")))?;
        }
        if let Some(estimates) = estimates {
            let selected: Vec<_> =
                estimates.into_iter().filter(|e| split_matches(args.split, splits[&e.index])).collect();
            let total = selected.len();
            let valid = selected.iter().filter(|e| e.valid).count();
            let _ = writeln!(extra, "\n{name}: {valid}/{total} estimates valid");
            let mut reasons: BTreeMap<RejectReason, usize> = BTreeMap::new();
            for r in selected.iter().filter_map(|e| e.reject_reason) {
                *reasons.entry(r).or_default() += 1;
            }
            for (r, n) in reasons {
                let _ = writeln!(extra, "  {r}: {n}");
            }
            let points = error_points(&selected, &labels, manifest.config.ranges.nu_q)?;
            match error_vs_detuning(&points, args.detuning_bins) {
                Ok(report) => {
                    let _ = writeln!(extra, "{name}: absolute error against |Δ| (GHz)");
                    let _ = writeln!(
                        extra,
                        "{:>8} {:>8} {:>6} {:>12} {:>12} {:>12} {:>12}",
                        "lo", "hi", "n", "ω med", "ω p90", "g med", "g p90"
                    );
                    for b in &report.bins {
                        let f = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3e}"));
                        let _ = writeln!(
                            extra,
                            "{:>8.4} {:>8.4} {:>6} {:>12} {:>12} {:>12} {:>12}",
                            b.lo,
                            b.hi,
                            b.count,
                            f(b.nu_median),
                            f(b.nu_p90),
                            f(b.g_median),
                            f(b.g_p90)
                        );
                    }
                    let _ = writeln!(
                        extra,
                        "Spearman(|Δ|, error): ω {:.3}, g {:.3}",
                        report.spearman_nu, report.spearman_g
                    );
                }
                Err(e) => {
                    let _ = writeln!(extra, "{name}: no detuning trend ({e})");
                }
            }
        }
        columns.push(ModelColumn { name, raw, normalized });
    }

    let mut report = render_table(&columns);
    report.push_str(&extra);
    print!("{report}");
    if let Some(out) = &args.out {
        fs::write(out, &report).with_context(|| format!("writing {}", out.display()))?;
        let split = format!("{:?}", args.split).to_lowercase();
        write_json(
            &run_record_path(out),
            &RunRecord::Evaluate {
                dataset: args.dataset.clone(),
                predictions: args.predictions.clone(),
                split,
                detuning_bins: args.detuning_bins,
            },
        )?;
    }
    Ok(())
}

/// A bare map file has no axes; index axes are enough for rendering.
fn map_from_file(path: &Path) -> Result<SpectroscopyMap> {
    let file = MapFile::read(path)?;
    let (rows, cols) = (file.rows as usize, file.cols as usize);
    let values = file.values.iter().map(|&v| f64::from(v)).collect();
    Ok(SpectroscopyMap::new((0..cols).map(|c| c as f64).collect(), (0..rows).map(|r| r as f64).collect(), values)?)
}

pub fn render(args: RenderArgs) -> Result<()> {
    let mut jobs: Vec<(PathBuf, Box<dyn Fn() -> Result<SpectroscopyMap>>, String)> = Vec::new();
    let single_target = args.files.len() == 1
        && args.dataset.is_none()
        && args.out.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));

    for file in &args.files {
        let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let f = file.clone();
        jobs.push((file.clone(), Box::new(move || map_from_file(&f)), format!("{stem}.png")));
    }
    if let Some(dir) = &args.dataset {
        let manifest = std::rc::Rc::new(load_manifest(dir)?);
        let selected: Vec<usize> = if args.all {
            manifest.records.iter().map(|r| r.index).collect()
        } else {
            args.index.clone()
        };
        for index in selected {
            let Some(pos) = manifest.records.iter().position(|r| r.index == index) else {
                bail!("sample {index} is not in {}", dir.display());
            };
            let record = &manifest.records[pos];
            let path = manifest.sample_path(dir, record);
            let (m, d) = (manifest.clone(), dir.clone());
            let name = Path::new(&record.file).with_extension("png").file_name().unwrap().to_string_lossy().into_owned();
            jobs.push((path, Box::new(move || Ok(m.load_map(&d, &m.records[pos])?)), name));
        }
    }
    if jobs.is_empty() {
        return Err(usage("nothing to render: give map files, --index or --all"));
    }

    if !single_target {
        fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    }
    for (source, load, name) in &jobs {
        if !source.exists() {
            bail!("map file not found: {}", source.display());
        }
        let map = load().with_context(|| format!("reading {}", source.display()))?;
        let target = if single_target { args.out.clone() } else { args.out.join(name) };
        export_png(&map, &target)?;
    }
    println!("rendered {} image(s)", jobs.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_splits_keep_proportions() {
        assert_eq!(scaled_splits(2200), SplitSizes::DESK);
        let s = scaled_splits(10);
        assert_eq!(s.total(), 10);
        assert_eq!((s.train, s.validation, s.test), (6, 3, 1));
    }

    #[test]
    fn run_record_names() {
        assert_eq!(run_record_path(Path::new("out/est.csv")), PathBuf::from("out/est.csv.run.json"));
    }
}
