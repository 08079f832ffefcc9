//! Monte Carlo moment estimates with standard errors.
//!
//! Draws use sequential conditional binomials on a seeded ChaCha8 stream.
//! Central statistics subtract the exact means `m·x_i`, so every estimate is
//! unbiased for its target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{MomentError, Result};
use crate::model::{MomentKind, MultinomialParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Whether `target` lies within `z` standard errors, plus a rounding floor of `1e-12·max(1, |target|)`.
    pub fn covers(&self, target: f64, z: f64) -> bool {
        let floor = 1e-12 * target.abs().max(1.0);
        (self.estimate - target).abs() <= z * self.std_error + floor
    }
}

/// Generator for one stream of a master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One draw of `(ξ₁, …, ξ_d)`.
///
/// `ξ₁ ~ Bin(m, x₁)`, then `ξ₂ ~ Bin(m − ξ₁, x₂ / (1 − x₁))`, and so on. A
/// category whose conditional mass is zero gets a zero count.
pub fn sample<S: Scalar, R: Rng + ?Sized>(params: &MultinomialParams<S>, rng: &mut R) -> Vec<u64> {
    let x: Vec<f64> = params.x().iter().map(Scalar::to_f64).collect();
    let mut out = vec![0u64; x.len()];
    sample_into(params.m(), &x, &suffix_mass(&x), rng, &mut out);
    out
}

/// `tail[i]` = mass of categories `i..` plus the remainder.
fn suffix_mass(x: &[f64]) -> Vec<f64> {
    let total: f64 = x.iter().sum();
    let mut tail = vec![0.0; x.len()];
    let mut acc = (1.0 - total).max(0.0);
    for i in (0..x.len()).rev() {
        acc += x[i];
        tail[i] = acc;
    }
    tail
}

fn sample_into<R: Rng + ?Sized>(m: u64, x: &[f64], tail: &[f64], rng: &mut R, out: &mut [u64]) {
    let mut left = m;
    for i in 0..x.len() {
        if left == 0 || x[i] <= 0.0 || tail[i] <= 0.0 {
            out[i] = 0;
            continue;
        }
        let p = (x[i] / tail[i]).min(1.0);
        let k = if p >= 1.0 {
            left
        } else {
            Binomial::new(left, p).expect("p in [0, 1)").sample(rng)
        };
        out[i] = k;
        left -= k;
    }
}

/// A fixed batch of draws shared by many moment estimates.
#[derive(Debug, Clone)]
pub struct McSampleSet {
    m: u64,
    x: Vec<f64>,
    counts: Vec<u32>,
    n: u64,
    seed: u64,
}

impl McSampleSet {
    pub fn draw<S: Scalar>(
        params: &MultinomialParams<S>,
        n_samples: u64,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        if n_samples < 2 {
            return Err(MomentError::Parse(format!(
                "Monte Carlo needs at least 2 samples, got {n_samples}"
            )));
        }
        let x: Vec<f64> = params.x().iter().map(Scalar::to_f64).collect();
        let tail = suffix_mass(&x);
        let d = x.len();
        let mut rng = stream_rng(seed, stream);
        let mut counts = Vec::with_capacity(d * n_samples as usize);
        let mut row = vec![0u64; d];
        for _ in 0..n_samples {
            sample_into(params.m(), &x, &tail, &mut rng, &mut row);
            counts.extend(row.iter().map(|&k| k as u32));
        }
        Ok(Self {
            m: params.m(),
            x,
            counts,
            n: n_samples,
            seed,
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.counts.chunks(self.x.len())
    }

    /// Sample mean of the tuple product with its standard error.
    pub fn estimate(&self, indices: &[usize], kind: MomentKind) -> Result<McEstimate> {
        let d = self.x.len();
        if let Some(&index) = indices.iter().find(|&&i| i == 0 || i > d) {
            return Err(MomentError::IndexOutOfRange { index, d });
        }
        let shifts: Vec<f64> = indices
            .iter()
            .map(|&i| match kind {
                MomentKind::Raw => 0.0,
                MomentKind::Central => self.m as f64 * self.x[i - 1],
            })
            .collect();
        // Welford's running mean and sum of squared deviations.
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for (n, row) in self.rows().enumerate() {
            let v: f64 = indices
                .iter()
                .zip(&shifts)
                .map(|(&i, s)| f64::from(row[i - 1]) - s)
                .product();
            let delta = v - mean;
            mean += delta / (n + 1) as f64;
            m2 += delta * (v - mean);
        }
        let n = self.n as f64;
        let var = (m2 / (n - 1.0)).max(0.0);
        Ok(McEstimate {
            estimate: mean,
            std_error: (var / n).sqrt(),
            n_samples: self.n,
            seed: self.seed,
        })
    }
}

/// Estimate of one raw or central moment from `n_samples` fresh draws on stream 0.
pub fn moment_via_mc<S: Scalar>(
    params: &MultinomialParams<S>,
    indices: &[usize],
    kind: MomentKind,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    params.check_indices(indices)?;
    McSampleSet::draw(params, n_samples, seed, 0)?.estimate(indices, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;

    #[test]
    fn degenerate_samples() {
        let mut rng = stream_rng(1, 0);
        let p = validate_params(3, vec![1.0]).unwrap();
        for _ in 0..50 {
            assert_eq!(sample(&p, &mut rng), vec![3]);
        }
        let p = validate_params(5, vec![0.0, 0.5]).unwrap();
        for _ in 0..200 {
            assert_eq!(sample(&p, &mut rng)[0], 0);
        }
        let p = validate_params(2, vec![0.5, 0.25]).unwrap();
        for _ in 0..200 {
            assert!(sample(&p, &mut rng).iter().sum::<u64>() <= 2);
        }
    }

    #[test]
    fn deterministic_distribution_has_zero_error() {
        let p = validate_params(1, vec![1.0]).unwrap();
        let e = moment_via_mc(&p, &[1], MomentKind::Raw, 100, 0).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.n_samples, 100);
    }

    #[test]
    fn covariance_within_band() {
        let p = validate_params(2, vec![0.5, 0.25]).unwrap();
        let e = moment_via_mc(&p, &[1, 2], MomentKind::Central, 1_000_000, 42).unwrap();
        assert!(e.covers(-0.25, 4.0), "{e:?}");
    }

    #[test]
    fn same_seed_same_bits() {
        let p = validate_params(7, vec![0.3, 0.3, 0.2]).unwrap();
        let a = moment_via_mc(&p, &[1, 2, 3], MomentKind::Central, 5000, 9).unwrap();
        let b = moment_via_mc(&p, &[1, 2, 3], MomentKind::Central, 5000, 9).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = moment_via_mc(&p, &[1, 2, 3], MomentKind::Central, 5000, 10).unwrap();
        assert_ne!(a.estimate.to_bits(), c.estimate.to_bits());
    }

    #[test]
    fn too_few_samples() {
        let p = validate_params(2, vec![0.5]).unwrap();
        assert!(moment_via_mc(&p, &[1], MomentKind::Raw, 1, 0).is_err());
    }
}
