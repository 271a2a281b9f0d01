//! Labeled dataset generation and the on-disk layout:
//!
//! ```text
//! <dir>/manifest.json              configuration, axes, per-sample labels
//! <dir>/samples/sample_<i>.tlsm    population maps
//! <dir>/png/sample_<i>.png         optional previews
//! ```

mod format;
mod generate;
mod manifest;
mod png;
mod sampler;

pub use format::{MapFile, MAGIC};
pub use generate::{generate_dataset, generate_sample};
pub use manifest::{
    png_file_name, sample_file_name, DatasetManifest, GenerationConfig, NoiseMode, Nuisance, SampleLabel,
    SampleRecord, Split, SplitSizes, FORMAT_VERSION, MANIFEST_FILE, PNG_DIR, SAMPLES_DIR,
};
pub use png::{export_png, render_gray};
pub use sampler::{sample_params, sample_seed, stream_rng, Stream};
