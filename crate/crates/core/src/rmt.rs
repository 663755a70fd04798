//! Linear eigenvalue statistics `Z = Σ f(λ_i / √n)` of Wigner matrices.
//!
//! Two entry conventions are available: unit variance everywhere (the
//! default) and the GOE convention with diagonal variance 2. For `f(x) = x²`
//! this gives `E Z = n` and `E Z = n + 1` respectively.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, shape, Result};
use crate::linalg::{check_symmetric, jacobi_eigen};
use crate::montecarlo::{chunked_samples, mean_with_stderr, tail_from_samples, MCConfig, TailEstimate};
use crate::poly::{Law, Polynomial};

pub const MAX_EIGEN_DIM: usize = 400;
pub const MAX_WIGNER_DIM: usize = 200;
pub const MAX_REPLICAS: usize = 10_000;
pub const MAX_SEMICIRCLE_DEGREE: usize = 20;
/// Half-width of the interval on which `‖f''‖_∞` is taken.
pub const DEFAULT_SUP_RANGE: f64 = 4.0;
const SUP_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarianceConvention {
    /// All entries have variance one.
    Unit,
    /// Off-diagonal variance one, diagonal variance two.
    Goe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerSpec {
    pub n: usize,
    pub law: Law,
    pub convention: VarianceConvention,
    /// Log-Sobolev constant of the entry law.
    pub l: f64,
}

impl WignerSpec {
    pub fn gaussian(n: usize) -> Self {
        Self { n, law: Law::Gaussian, convention: VarianceConvention::Unit, l: 1.0 }
    }

    pub fn with_convention(mut self, convention: VarianceConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_WIGNER_DIM {
            return Err(domain(format!("matrix size n = {} must lie in [1, {MAX_WIGNER_DIM}]", self.n)));
        }
        self.law.validate()?;
        let (m1, m2) = (self.law.moment(1)?, self.law.moment(2)?);
        if m1.abs() > 1e-12 || (m2 - 1.0).abs() > 1e-12 {
            return Err(domain(format!("entry law {} must have mean 0 and variance 1", self.law.name())));
        }
        Ok(())
    }

    /// Draws a symmetric matrix, filling the upper triangle row by row.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let n = self.n;
        let diag_scale = match self.convention {
            VarianceConvention::Unit => 1.0,
            VarianceConvention::Goe => std::f64::consts::SQRT_2,
        };
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut x = self.law.sample(rng)?;
                if i == j {
                    x *= diag_scale;
                }
                m[i * n + j] = x;
                m[j * n + i] = x;
            }
        }
        Ok(m)
    }
}

/// Sorted eigenvalues of a symmetric `n × n` matrix (row-major).
pub fn eigenvalues_symmetric(m: &[f64], n: usize) -> Result<Vec<f64>> {
    if n > MAX_EIGEN_DIM {
        return Err(domain(format!("eigenvalues are computed for n ≤ {MAX_EIGEN_DIM}, got {n}")));
    }
    check_symmetric(m, n, 1e-12)?;
    Ok(jacobi_eigen(m, n, false)?.values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinStatResult {
    pub z: f64,
    pub eigenvalues: Vec<f64>,
}

fn check_univariate(f: &Polynomial) -> Result<()> {
    if f.nvars() != 1 {
        return Err(shape(format!("expected a polynomial in one variable, got {} variables", f.nvars())));
    }
    Ok(())
}

pub fn linear_statistic(f: &Polynomial, m: &[f64], n: usize) -> Result<LinStatResult> {
    check_univariate(f)?;
    let eigenvalues = eigenvalues_symmetric(m, n)?;
    let s = (n as f64).sqrt();
    let mut z = 0.0;
    for &l in &eigenvalues {
        z += f.evaluate(&[l / s])?;
    }
    Ok(LinStatResult { z, eigenvalues })
}

fn catalan(k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * 2.0 * (2 * i + 1) as f64 / (i + 2) as f64;
    }
    c.round()
}

/// `∫ g dρ` against the semicircle law, from its moments.
pub fn semicircle_integral(g: &Polynomial) -> Result<f64> {
    check_univariate(g)?;
    if g.degree() > MAX_SEMICIRCLE_DEGREE {
        return Err(domain(format!("degree {} exceeds {MAX_SEMICIRCLE_DEGREE}", g.degree())));
    }
    let mut total = 0.0;
    for (mono, c) in g.terms() {
        let m = mono.first().map_or(0, |&(_, e)| e as usize);
        if m % 2 == 0 {
            total += c * catalan(m / 2);
        }
    }
    Ok(total)
}

/// `max_{|x| ≤ k} |g(x)|` over a uniform grid.
pub fn sup_on_grid(g: &Polynomial, k: f64) -> Result<f64> {
    check_univariate(g)?;
    let mut best = 0.0f64;
    for i in 0..=SUP_GRID {
        let x = -k + 2.0 * k * i as f64 / SUP_GRID as f64;
        best = best.max(g.evaluate(&[x])?.abs());
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinStatBound {
    /// `∫ f'² dρ`.
    pub semicircle_term: f64,
    /// `‖f''‖_∞` on `[-K, K]`.
    pub f2_sup: f64,
    pub eta: f64,
    pub tail: f64,
}

/// `2 exp(-(1/C_L) min(t² / (∫f'² dρ + n^{-2/3} ‖f''‖²), n t / ‖f''‖))`.
pub fn linstat_tail_bound(f: &Polynomial, n: usize, t: f64, c_l: f64, sup_range: f64) -> Result<LinStatBound> {
    check_univariate(f)?;
    if n == 0 || !(t >= 0.0) || !(c_l > 0.0) || !(sup_range > 0.0) {
        return Err(domain("need n ≥ 1, t ≥ 0, C_L > 0 and K > 0"));
    }
    let f1 = f.derivative(0)?;
    let semicircle_term = semicircle_integral(&f1.mul(&f1)?)?;
    let f2_sup = sup_on_grid(&f1.derivative(0)?, sup_range)?;
    let nf = n as f64;
    let quad_den = semicircle_term + nf.powf(-2.0 / 3.0) * f2_sup * f2_sup;
    let quad = if quad_den > 0.0 { t * t / quad_den } else { f64::INFINITY };
    let lin = if f2_sup > 0.0 { nf * t / f2_sup } else { f64::INFINITY };
    let eta = if t == 0.0 { 0.0 } else { quad.min(lin) };
    let tail = if eta.is_infinite() { 0.0 } else { 2.0 * (-eta / c_l).exp() };
    Ok(LinStatBound { semicircle_term, f2_sup, eta, tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WignerRow {
    pub t: f64,
    pub empirical: TailEstimate,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WignerReport {
    pub n: usize,
    pub replicas: usize,
    pub mean_z: f64,
    pub stderr_z: f64,
    /// Mean of `(1/n) Σ f'(λ_i/√n)²`.
    pub sobolev_term: f64,
    pub sobolev_stderr: f64,
    pub semicircle_term: f64,
    pub rows: Vec<WignerRow>,
}

/// Replicates `Z` and the empirical Sobolev term; tails are centered at the
/// empirical mean of `Z`.
pub fn wigner_experiment(
    f: &Polynomial,
    spec: &WignerSpec,
    cfg: &MCConfig,
    ts: &[f64],
    c_l: f64,
) -> Result<WignerReport> {
    spec.validate()?;
    check_univariate(f)?;
    if cfg.n_samples < 2 || cfg.n_samples > MAX_REPLICAS {
        return Err(domain(format!("replica count must lie in [2, {MAX_REPLICAS}], got {}", cfg.n_samples)));
    }
    let n = spec.n;
    let f1 = f.derivative(0)?;
    let pairs = chunked_samples(cfg.n_samples, cfg.batch, cfg.seed, |rng| {
        let m = spec.sample(rng)?;
        let stat = linear_statistic(f, &m, n)?;
        let s = (n as f64).sqrt();
        let mut sob = 0.0;
        for &l in &stat.eigenvalues {
            let v = f1.evaluate(&[l / s])?;
            sob += v * v;
        }
        Ok((stat.z, sob / n as f64))
    })?;
    let zs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let sobs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (mean_z, stderr_z) = mean_with_stderr(&zs);
    let (sobolev_term, sobolev_stderr) = mean_with_stderr(&sobs);
    let mut rows = Vec::with_capacity(ts.len());
    for (empirical, &t) in tail_from_samples(&zs, ts).into_iter().zip(ts) {
        let bound = linstat_tail_bound(f, n, t, c_l, DEFAULT_SUP_RANGE)?.tail;
        rows.push(WignerRow { t, empirical, bound });
    }
    let semicircle_term = semicircle_integral(&f1.mul(&f1)?)?;
    Ok(WignerReport {
        n,
        replicas: cfg.n_samples,
        mean_z,
        stderr_z,
        sobolev_term,
        sobolev_stderr,
        semicircle_term,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoffmanWielandtReport {
    pub pairs: usize,
    /// Largest `Σ(λ_i(B) - λ_i(C))² / ‖B - C‖²_F` observed.
    pub max_ratio: f64,
    pub violations: usize,
}

/// Compares sorted-eigenvalue distances with Frobenius distances on random
/// pairs of symmetric Gaussian matrices.
pub fn hoffman_wielandt_check(n: usize, pairs: usize, seed: u64) -> Result<HoffmanWielandtReport> {
    if n == 0 || n > MAX_EIGEN_DIM {
        return Err(domain(format!("matrix size n = {n} must lie in [1, {MAX_EIGEN_DIM}]")));
    }
    let spec = WignerSpec { n, law: Law::Gaussian, convention: VarianceConvention::Unit, l: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut violations = 0;
    for _ in 0..pairs {
        let b = spec.sample(&mut rng)?;
        let c = spec.sample(&mut rng)?;
        let lb = eigenvalues_symmetric(&b, n)?;
        let lc = eigenvalues_symmetric(&c, n)?;
        let spec_dist: f64 = lb.iter().zip(&lc).map(|(x, y)| (x - y) * (x - y)).sum();
        let frob: f64 = b.iter().zip(&c).map(|(x, y)| (x - y) * (x - y)).sum();
        let ratio = spec_dist / frob;
        max_ratio = max_ratio.max(ratio);
        if spec_dist > frob {
            violations += 1;
        }
    }
    Ok(HoffmanWielandtReport { pairs, max_ratio, violations })
}
