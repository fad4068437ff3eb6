//! Counter-based random numbers.
//!
//! Every variate is a pure function of `(seed, stream, index)`: a SplitMix64
//! hash of the triple is mapped to an open-interval uniform and then through
//! the inverse normal CDF. Samples therefore do not depend on how work is
//! split across threads.

use statrs::distribution::{ContinuousCDF, Normal};

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for item `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix(splitmix(seed) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

#[inline]
pub fn hash3(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix(derive_seed(seed, stream) ^ splitmix(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// Uniform in the open interval (0, 1).
pub fn uniform_at(seed: u64, stream: u64, index: u64) -> f64 {
    let bits = hash3(seed, stream, index) >> 11;
    (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal variate.
pub fn normal_at(seed: u64, stream: u64, index: u64) -> f64 {
    let u = uniform_at(seed, stream, index);
    // the standard normal is always constructible
    Normal::standard().inverse_cdf(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_distinct() {
        assert_eq!(normal_at(7, 3, 11), normal_at(7, 3, 11));
        assert_ne!(normal_at(7, 3, 11), normal_at(7, 3, 12));
        assert_ne!(normal_at(7, 3, 11), normal_at(8, 3, 11));
        assert_ne!(normal_at(7, 3, 11), normal_at(7, 4, 11));
    }

    #[test]
    fn normal_moments() {
        let n = 200_000u64;
        let xs: Vec<f64> = (0..n).map(|i| normal_at(1, 0, i)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let kurt = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64 / (var * var);
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 0.015);
        assert!((kurt - 3.0).abs() < 0.06);
    }
}
