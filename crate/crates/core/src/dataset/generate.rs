use std::fs;
use std::path::Path;

use log::{info, warn};
use rand::Rng;
use rayon::prelude::*;

use super::format::MapFile;
use super::manifest::{
    png_file_name, sample_file_name, DatasetManifest, GenerationConfig, NoiseMode, SampleLabel, SampleRecord,
    FORMAT_VERSION, MANIFEST_FILE, PNG_DIR, SAMPLES_DIR,
};
use super::png::export_png;
use super::sampler::{sample_params, sample_seed, stream_rng, Stream};
use crate::error::{Error, Result};
use crate::spectroscopy::{add_noise, run_protocol, SpectroscopyMap};

/// Builds sample `index` from the configuration alone.
///
/// Parameters come from the sample's parameter stream; a draw whose
/// integration fails is replaced by the next draw from the same stream.
/// Noise width and noise seed come from a separate stream, so the clean and
/// noisy datasets of one seed share their physical parameters.
pub fn generate_sample(config: &GenerationConfig, index: usize) -> Result<(SampleRecord, SpectroscopyMap)> {
    let seed = sample_seed(config.seed, index as u64);
    let mut params_rng = stream_rng(seed, Stream::Params);

    let mut attempts = 0;
    let (params, clean) = loop {
        attempts += 1;
        let params = sample_params(&mut params_rng, &config.ranges, config.protocol.drive);
        match run_protocol(&params, &config.protocol) {
            Ok(map) => break (params, map),
            Err(e) if attempts < config.max_attempts => {
                warn!("sample {index}: draw {attempts} failed ({e}); resampling");
            }
            Err(e) => return Err(e),
        }
    };

    let mut noise_rng = stream_rng(seed, Stream::Noise);
    let (width, map) = match config.noise {
        NoiseMode::Clean => (0.0, clean),
        NoiseMode::Noisy => {
            let w = config.noise_width;
            let width = w.lo + (w.hi - w.lo) * noise_rng.random::<f64>();
            let noise_seed: u64 = noise_rng.random();
            (width, add_noise(&clean, width, noise_seed)?)
        }
    };

    let record = SampleRecord {
        index,
        file: sample_file_name(index),
        split: config.split_of(index),
        nu_q: params.nu_q,
        attempts,
        label: SampleLabel::from_params(&params, width, seed),
    };
    Ok((record, map))
}

fn ensure_fresh(out: &Path) -> Result<()> {
    let manifest = out.join(MANIFEST_FILE);
    if manifest.exists() {
        return Err(Error::InvalidParams(format!(
            "{} already holds a dataset; refusing to overwrite it",
            out.display()
        )));
    }
    let samples = out.join(SAMPLES_DIR);
    if samples.exists() {
        let mut entries = fs::read_dir(&samples).map_err(|e| Error::io(&samples, e))?;
        if entries.next().is_some() {
            return Err(Error::InvalidParams(format!(
                "{} contains files from an earlier run; use a fresh output directory",
                samples.display()
            )));
        }
    }
    Ok(())
}

/// Generates `config.n` samples under `out` using `parallelism` worker
/// threads, then writes the manifest. Output bytes do not depend on
/// `parallelism`.
pub fn generate_dataset(out: &Path, config: &GenerationConfig, parallelism: usize) -> Result<DatasetManifest> {
    config.validate()?;
    ensure_fresh(out)?;
    let samples_dir = out.join(SAMPLES_DIR);
    fs::create_dir_all(&samples_dir).map_err(|e| Error::io(&samples_dir, e))?;
    if config.write_png {
        let png_dir = out.join(PNG_DIR);
        fs::create_dir_all(&png_dir).map_err(|e| Error::io(&png_dir, e))?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;

    let records: Vec<SampleRecord> = pool.install(|| {
        (0..config.n)
            .into_par_iter()
            .map(|index| {
                let (record, map) = generate_sample(config, index)?;
                MapFile::from_f64(map.rows(), map.cols(), map.values())?.write(&out.join(&record.file))?;
                if config.write_png {
                    export_png(&map, &out.join(png_file_name(index)))?;
                }
                if record.attempts > 1 {
                    info!("sample {index} used {} parameter draws", record.attempts);
                }
                Ok(record)
            })
            .collect::<Result<_>>()
    })?;

    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION,
        sample_count: records.len(),
        config: config.clone(),
        omega_axis: config.protocol.omega.points(),
        time_axis: config.protocol.time.points(),
        records,
    };
    manifest.store(out)?;
    Ok(manifest)
}
