use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::format::MapFile;
use crate::error::{Error, Result};
use crate::params::{ParamRanges, Range, SystemParams};
use crate::spectroscopy::{ProtocolConfig, SpectroscopyMap};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SAMPLES_DIR: &str = "samples";
pub const PNG_DIR: &str = "png";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    Clean,
    Noisy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl SplitSizes {
    /// 1400 / 600 / 200, the same 70/30 + held-out proportions as a
    /// 35k / 15k / 5k split.
    pub const DESK: SplitSizes = SplitSizes { train: 1400, validation: 600, test: 200 };

    pub fn total(&self) -> usize {
        self.train + self.validation + self.test
    }

    pub fn split_of(&self, index: usize) -> Split {
        if index < self.train {
            Split::Train
        } else if index < self.train + self.validation {
            Split::Validation
        } else {
            Split::Test
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
    Unsplit,
}

/// Everything that determines the generated files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub seed: u64,
    pub n: usize,
    pub splits: Option<SplitSizes>,
    pub noise: NoiseMode,
    /// Range of the per-sample noise width in noisy mode.
    pub noise_width: Range,
    pub protocol: ProtocolConfig,
    pub ranges: ParamRanges,
    /// Fresh parameter draws allowed per sample after integration failures.
    pub max_attempts: u32,
    pub write_png: bool,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n: SplitSizes::DESK.total(),
            splits: Some(SplitSizes::DESK),
            noise: NoiseMode::Clean,
            noise_width: Range::new(0.01, 0.2),
            protocol: ProtocolConfig::default(),
            ranges: ParamRanges::default(),
            max_attempts: 8,
            write_png: false,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("sample count must be at least 1".into()));
        }
        if let Some(s) = self.splits {
            if s.total() != self.n {
                return Err(Error::InvalidParams(format!("splits sum to {} but n = {}", s.total(), self.n)));
            }
        }
        if !(self.noise_width.lo >= 0.0 && self.noise_width.hi >= self.noise_width.lo && self.noise_width.hi <= 0.5) {
            return Err(Error::InvalidParams("noise width range must satisfy 0 <= lo <= hi <= 0.5".into()));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidParams("max_attempts must be at least 1".into()));
        }
        self.protocol.validate()
    }

    pub fn split_of(&self, index: usize) -> Split {
        self.splits.map_or(Split::Unsplit, |s| s.split_of(index))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nuisance {
    pub anharmonicity: f64,
    pub t1_q: f64,
    pub tphi_q: f64,
    pub drive: f64,
}

/// Regression target and the remaining generation parameters of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleLabel {
    /// [ν_TLS (GHz), g (GHz), T1_TLS (ns), Tφ_TLS (ns)]
    pub q: [f64; 4],
    pub nuisance: Nuisance,
    pub noise_width: f64,
    /// Per-sample seed derived from the dataset seed and the index.
    pub seed: u64,
}

impl SampleLabel {
    pub fn from_params(params: &SystemParams, noise_width: f64, seed: u64) -> Self {
        Self {
            q: params.targets(),
            nuisance: Nuisance {
                anharmonicity: params.anharmonicity,
                t1_q: params.t1_q,
                tphi_q: params.tphi_q,
                drive: params.drive,
            },
            noise_width,
            seed,
        }
    }

    pub fn params(&self, nu_q: f64) -> SystemParams {
        SystemParams {
            nu_q,
            nu_tls: self.q[0],
            anharmonicity: self.nuisance.anharmonicity,
            g: self.q[1],
            t1_q: self.nuisance.t1_q,
            tphi_q: self.nuisance.tphi_q,
            t1_tls: self.q[2],
            tphi_tls: self.q[3],
            drive: self.nuisance.drive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub file: String,
    pub split: Split,
    pub nu_q: f64,
    /// Parameter draws used; values above 1 mean earlier draws failed to integrate.
    pub attempts: u32,
    pub label: SampleLabel,
}

impl SampleRecord {
    pub fn params(&self) -> SystemParams {
        self.label.params(self.nu_q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub sample_count: usize,
    pub config: GenerationConfig,
    pub omega_axis: Vec<f64>,
    pub time_axis: Vec<f64>,
    pub records: Vec<SampleRecord>,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported manifest version {}", self.format_version)));
        }
        if self.records.len() != self.sample_count {
            return Err(Error::Format(format!(
                "manifest lists {} records for sample_count {}",
                self.records.len(),
                self.sample_count
            )));
        }
        let mut names: Vec<&str> = self.records.iter().map(|r| r.file.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Format("duplicate sample file names".into()));
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: Self = serde_json::from_str(&text).map_err(|e| Error::parse(&path, e))?;
        manifest.validate().map_err(|e| Error::parse(&path, e))?;
        Ok(manifest)
    }

    /// Writes via a temporary file and rename, so a present manifest always
    /// marks a complete dataset.
    pub fn store(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let tmp = dir.join(format!("{MANIFEST_FILE}.partial"));
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::parse(&path, e))?;
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(text.as_bytes()).and_then(|_| f.write_all(b"\n")).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    pub fn sample_path(&self, dir: &Path, record: &SampleRecord) -> PathBuf {
        dir.join(&record.file)
    }

    /// Reads a sample map and attaches the manifest axes.
    pub fn load_map(&self, dir: &Path, record: &SampleRecord) -> Result<SpectroscopyMap> {
        let path = self.sample_path(dir, record);
        let file = MapFile::read(&path)?;
        if file.rows as usize != self.time_axis.len() || file.cols as usize != self.omega_axis.len() {
            return Err(Error::parse(
                &path,
                format!(
                    "map is {}×{} but the manifest axes are {}×{}",
                    file.rows,
                    file.cols,
                    self.time_axis.len(),
                    self.omega_axis.len()
                ),
            ));
        }
        let values = file.values.iter().map(|&v| f64::from(v)).collect();
        SpectroscopyMap::new(self.omega_axis.clone(), self.time_axis.clone(), values)
    }

    pub fn records_in(&self, split: Split) -> impl Iterator<Item = &SampleRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }
}

pub fn sample_file_name(index: usize) -> String {
    format!("{SAMPLES_DIR}/sample_{index:06}.tlsm")
}

pub fn png_file_name(index: usize) -> String {
    format!("{PNG_DIR}/sample_{index:06}.png")
}
