use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::params::{ParamRanges, Range, SystemParams};

fn uniform<R: Rng + ?Sized>(rng: &mut R, range: Range) -> f64 {
    range.lo + (range.hi - range.lo) * rng.random::<f64>()
}

/// Draws one parameter set. The qubit frequency is fixed; every other
/// physical parameter is uniform on its range. Draw order is part of the
/// reproducibility contract.
pub fn sample_params<R: Rng + ?Sized>(rng: &mut R, ranges: &ParamRanges, drive: f64) -> SystemParams {
    let nu_tls = uniform(rng, ranges.nu_tls);
    let anharmonicity = uniform(rng, ranges.anharmonicity);
    let g = uniform(rng, ranges.g);
    let t1_q = uniform(rng, ranges.t1_q);
    let tphi_q = uniform(rng, ranges.tphi_q);
    let t1_tls = uniform(rng, ranges.t1_tls);
    let tphi_tls = uniform(rng, ranges.tphi_tls);
    SystemParams { nu_q: ranges.nu_q, nu_tls, anharmonicity, g, t1_q, tphi_q, t1_tls, tphi_tls, drive }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` in a dataset with global seed `seed`.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    mix(mix(seed) ^ index)
}

/// Independent streams derived from one sample seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Params = 0,
    Noise = 1,
}

pub fn stream_rng(sample_seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    rng.set_stream(stream as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_qubit_and_ranges() {
        let ranges = ParamRanges::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let p = sample_params(&mut rng, &ranges, 0.02);
            assert_eq!(p.nu_q, 7.0);
            assert!(ranges.nu_tls.contains(p.nu_tls));
            assert!(ranges.g.contains(p.g));
            assert!(ranges.tphi_tls.contains(p.tphi_tls));
            p.validate().unwrap();
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let ranges = ParamRanges::default();
        let draw = |s| {
            let mut rng = stream_rng(sample_seed(s, 5), Stream::Params);
            (0..10).map(|_| sample_params(&mut rng, &ranges, 0.02)).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn streams_and_indices_are_distinct() {
        assert_ne!(sample_seed(1, 0), sample_seed(1, 1));
        assert_ne!(sample_seed(1, 0), sample_seed(2, 0));
        let a: u64 = stream_rng(9, Stream::Params).random();
        let b: u64 = stream_rng(9, Stream::Noise).random();
        assert_ne!(a, b);
    }
}
