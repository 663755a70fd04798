//! Monte Carlo estimation of moments and tails.
//!
//! Samples are drawn in chunks of `batch`; chunk `c` uses
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `c`. Chunks are reduced in
//! index order, so estimates are bit-identical for any number of workers.

mod chaos;
mod checks;

pub use chaos::{chaos_moment, validate_chaos_kernel, ChaosMode};
pub use checks::{
    hermite_tetrahedral_convergence, sandwich_check, sobolev_check, BoundKind, HermiteRow, SandwichRow, SobolevRow,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::poly::{Polynomial, ProductDistribution};

pub const DEFAULT_BATCH: usize = 4096;
/// Minimum sample count for tail estimates.
pub const MIN_TAIL_SAMPLES: usize = 1000;
const WILSON_Z: f64 = 1.96;

#[derive(Debug, Clone, PartialEq)]
pub struct MCConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub p_list: Vec<f64>,
    pub batch: usize,
}

impl MCConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self { n_samples, seed, p_list: vec![2.0], batch: DEFAULT_BATCH }
    }

    pub fn with_p(mut self, p_list: &[f64]) -> Self {
        self.p_list = p_list.to_vec();
        self
    }

    /// Largest admissible moment order, `ln(N) / 1.5`.
    pub fn max_p(&self) -> f64 {
        (self.n_samples as f64).ln() / 1.5
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(domain("sample count N must be at least 1"));
        }
        if self.batch == 0 {
            return Err(domain("batch size must be at least 1"));
        }
        for &p in &self.p_list {
            check_p(p, self.n_samples)?;
        }
        Ok(())
    }
}

fn check_p(p: f64, n: usize) -> Result<()> {
    let max_p = (n as f64).ln() / 1.5;
    if !(p >= 2.0) {
        return Err(domain(format!("moment order p = {p} must be at least 2")));
    }
    if p > max_p {
        return Err(Error::MomentGuard { p, n, max_p });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub p: f64,
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MomentEstimate {
    /// `(mean |Z - c|^p)^{1/p}` with a delta-method standard error; `c` is the
    /// empirical mean when `center` is set and zero otherwise.
    pub fn from_samples(samples: &[f64], p: f64, center: bool) -> Self {
        let n = samples.len();
        let c = if center { mean(samples) } else { 0.0 };
        let ys: Vec<f64> = samples.iter().map(|z| (z - c).abs().powf(p)).collect();
        let m = mean(&ys);
        let value = m.powf(1.0 / p);
        let stderr = if m > 0.0 && n > 1 {
            let var = ys.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / (n - 1) as f64;
            value / (p * m) * (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { p, value, stderr, n }
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Mean and its standard error.
pub fn mean_with_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let m = mean(xs);
    if n < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (m, (var / n as f64).sqrt())
}

/// Draws `count` values of `draw` in fixed chunks; see the module docs.
pub fn chunked_samples<T, F>(count: usize, batch: usize, seed: u64, draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    let batch = batch.max(1);
    let chunks = count.div_ceil(batch);
    let parts: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = batch.min(count - c * batch);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

pub fn sample_vector(dist: &ProductDistribution, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let mut x = vec![0.0; dist.n()];
    dist.sample_into(rng, &mut x)?;
    Ok(x)
}

fn check_dims(f: &Polynomial, dist: &ProductDistribution) -> Result<()> {
    if f.nvars() != dist.n() {
        return Err(crate::error::shape(format!(
            "distribution over {} coordinates for {} variables",
            dist.n(),
            f.nvars()
        )));
    }
    Ok(())
}

/// Samples of `f(X)`.
pub fn sample_polynomial(f: &Polynomial, dist: &ProductDistribution, n: usize, batch: usize, seed: u64) -> Result<Vec<f64>> {
    check_dims(f, dist)?;
    chunked_samples(n, batch, seed, |rng| {
        let x = sample_vector(dist, rng)?;
        f.evaluate(&x)
    })
}

/// Centered empirical `L^p` norms of `f(X)` for every `p` in the config.
pub fn empirical_moment(f: &Polynomial, dist: &ProductDistribution, cfg: &MCConfig) -> Result<Vec<MomentEstimate>> {
    cfg.validate()?;
    let samples = sample_polynomial(f, dist, cfg.n_samples, cfg.batch, cfg.seed)?;
    Ok(cfg.p_list.iter().map(|&p| MomentEstimate::from_samples(&samples, p, true)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub t: f64,
    pub prob: f64,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let ph = k as f64 / nf;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / nf;
    let centre = (ph + z2 / (2.0 * nf)) / denom;
    let half = WILSON_Z * (ph * (1.0 - ph) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Fraction of deviations `|Z - Ẑ| ≥ t` for each threshold.
pub fn tail_from_samples(samples: &[f64], ts: &[f64]) -> Vec<TailEstimate> {
    let c = mean(samples);
    let mut dev: Vec<f64> = samples.iter().map(|z| (z - c).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let n = dev.len();
    ts.iter()
        .map(|&t| {
            let below = dev.partition_point(|&x| x < t);
            let k = n - below;
            let (lo, hi) = wilson_interval(k, n);
            TailEstimate { t, prob: k as f64 / n as f64, lo, hi, n }
        })
        .collect()
}

pub fn empirical_tail(f: &Polynomial, dist: &ProductDistribution, t: f64, cfg: &MCConfig) -> Result<TailEstimate> {
    if cfg.n_samples < MIN_TAIL_SAMPLES {
        return Err(domain(format!("tail estimates need N ≥ {MIN_TAIL_SAMPLES}, got {}", cfg.n_samples)));
    }
    if !(t >= 0.0) {
        return Err(domain(format!("threshold t = {t} must be nonnegative")));
    }
    let samples = sample_polynomial(f, dist, cfg.n_samples, cfg.batch, cfg.seed)?;
    Ok(tail_from_samples(&samples, &[t])[0])
}
