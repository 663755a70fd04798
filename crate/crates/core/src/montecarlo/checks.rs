//! Empirical checks of the bounds: sandwich ratios, Sobolev-type moment
//! growth and the tetrahedral approximation of Hermite polynomials.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{chunked_samples, mean_with_stderr, sample_polynomial, sample_vector, MCConfig, MomentEstimate};
use crate::bounds::{gaussian_moment_bound, sobolev_moment_bound, weibull_moment_bound};
use crate::error::{domain, Result};
use crate::norms::NormOptions;
use crate::poly::{hermite, Polynomial, ProductDistribution};

/// Which bound the empirical moments are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BoundKind {
    Gaussian,
    Sobolev { l: f64, gamma: f64 },
    Weibull { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichRow {
    pub p: f64,
    pub empirical: MomentEstimate,
    pub bound: f64,
    /// `None` when the bound vanishes.
    pub ratio: Option<f64>,
    pub pass: bool,
}

/// Ratios `‖f - Ef‖_p / bound(p)` checked against `window = (lo, hi)`.
/// A vanishing bound is degenerate and passes only when the empirical
/// moment vanishes as well.
pub fn sandwich_check(
    f: &Polynomial,
    dist: &ProductDistribution,
    cfg: &MCConfig,
    kind: BoundKind,
    window: (f64, f64),
    opts: &NormOptions,
) -> Result<Vec<SandwichRow>> {
    cfg.validate()?;
    let samples = sample_polynomial(f, dist, cfg.n_samples, cfg.batch, cfg.seed)?;
    let mut rows = Vec::with_capacity(cfg.p_list.len());
    for &p in &cfg.p_list {
        let empirical = MomentEstimate::from_samples(&samples, p, true);
        let bound = match kind {
            BoundKind::Gaussian => gaussian_moment_bound(f, dist, p, opts)?.total,
            BoundKind::Sobolev { l, gamma } => sobolev_moment_bound(f, dist, p, l, gamma, opts)?.total,
            BoundKind::Weibull { alpha } => weibull_moment_bound(f, dist, p, alpha, opts)?.total,
        };
        let (ratio, pass) = if bound > 0.0 {
            let r = empirical.value / bound;
            (Some(r), r >= window.0 && r <= window.1)
        } else {
            (None, empirical.value == 0.0)
        };
        rows.push(SandwichRow { p, empirical, bound, ratio, pass });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevRow {
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Zero when both sides vanish.
    pub ratio: f64,
    pub pass: bool,
}

/// Ratios `‖f - Ef‖_p / (L p^γ ‖|∇f|‖_p)`, passing when at most `constant`.
pub fn sobolev_check(dist: &ProductDistribution, f: &Polynomial, cfg: &MCConfig, constant: f64) -> Result<Vec<SobolevRow>> {
    cfg.validate()?;
    let (l, gamma) = dist.sobolev().ok_or_else(|| domain("distribution has no Sobolev pair (L, gamma) configured"))?;
    if f.nvars() != dist.n() {
        return Err(crate::error::shape("polynomial and distribution dimensions differ"));
    }
    let pairs = chunked_samples(cfg.n_samples, cfg.batch, cfg.seed, |rng| {
        let x = sample_vector(dist, rng)?;
        let g = f.gradient(&x)?;
        Ok((f.evaluate(&x)?, g.iter().map(|v| v * v).sum::<f64>().sqrt()))
    })?;
    let values: Vec<f64> = pairs.iter().map(|v| v.0).collect();
    let grads: Vec<f64> = pairs.iter().map(|v| v.1).collect();
    Ok(cfg
        .p_list
        .iter()
        .map(|&p| {
            let lhs = MomentEstimate::from_samples(&values, p, true).value;
            let rhs = l * p.powf(gamma) * MomentEstimate::from_samples(&grads, p, false).value;
            let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
            let pass = if rhs > 0.0 { ratio <= constant } else { lhs == 0.0 };
            SobolevRow { p, lhs, rhs, ratio, pass }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HermiteRow {
    pub n: usize,
    pub mean_sq: f64,
    pub stderr: f64,
    /// `2/N` for `d = 2`, zero for `d = 1`.
    pub closed_form: Option<f64>,
}

/// Empirical `E Δ²` with `Δ = h_d(g) - d! N^{-d/2} e_d(g_1, …, g_N)` and
/// `g = N^{-1/2} Σ g_j`; `cfg.n_samples` replicates per `N`.
pub fn hermite_tetrahedral_convergence(d: usize, n_list: &[usize], cfg: &MCConfig) -> Result<Vec<HermiteRow>> {
    if !(1..=4).contains(&d) {
        return Err(domain(format!("tetrahedral approximation is implemented for 1 ≤ d ≤ 4, got {d}")));
    }
    if cfg.n_samples < 2 {
        return Err(domain("need at least two replicates"));
    }
    let h = hermite(d)?;
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    let mut rows = Vec::with_capacity(n_list.len());
    for (k, &n) in n_list.iter().enumerate() {
        if n == 0 {
            return Err(domain("N must be positive"));
        }
        // one seed per N so that rows are independent
        let seed = cfg.seed.wrapping_add((k as u64) << 32);
        let scale = (n as f64).powf(-(d as f64) / 2.0);
        let deltas = chunked_samples(cfg.n_samples, cfg.batch, seed, |rng| {
            let mut e = [1.0, 0.0, 0.0, 0.0, 0.0];
            let mut sum = 0.0;
            for _ in 0..n {
                let x: f64 = StandardNormal.sample(rng);
                sum += x;
                for j in (1..=d).rev() {
                    e[j] += x * e[j - 1];
                }
            }
            let g = sum / (n as f64).sqrt();
            let delta = h.evaluate(g) - fact * scale * e[d];
            Ok(delta * delta)
        })?;
        let (mean_sq, stderr) = mean_with_stderr(&deltas);
        let closed_form = match d {
            1 => Some(0.0),
            2 => Some(2.0 / n as f64),
            _ => None,
        };
        rows.push(HermiteRow { n, mean_sq, stderr, closed_form });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Law;

    #[test]
    fn hermite_d1_is_exact() {
        let rows = hermite_tetrahedral_convergence(1, &[5, 20], &MCConfig::new(100, 1)).unwrap();
        for r in rows {
            assert!(r.mean_sq < 1e-24);
        }
        assert!(hermite_tetrahedral_convergence(5, &[5], &MCConfig::new(100, 1)).is_err());
    }

    #[test]
    fn sobolev_square() {
        let f = Polynomial::from_terms(1, [(vec![(0, 2)], 1.0)]).unwrap();
        let dist = ProductDistribution::iid(Law::Gaussian, 1);
        let rows = sobolev_check(&dist, &f, &MCConfig::new(200_000, 2), 1.0).unwrap();
        assert!((rows[0].ratio - 0.5).abs() < 0.01, "{:?}", rows[0]);
        let c = Polynomial::constant(1, 2.0);
        let rows = sobolev_check(&dist, &c, &MCConfig::new(1000, 2), 1.0).unwrap();
        assert!(rows[0].pass && rows[0].ratio == 0.0);
        let b = ProductDistribution::iid(Law::Bernoulli { p: 0.5 }, 1);
        assert!(sobolev_check(&b, &f, &MCConfig::new(1000, 2), 1.0).is_err());
    }

    #[test]
    fn sandwich_linear_ratio() {
        let f = Polynomial::linear(&[1.0, 2.0, 2.0]);
        let dist = ProductDistribution::iid(Law::Gaussian, 3);
        let rows =
            sandwich_check(&f, &dist, &MCConfig::new(200_000, 8), BoundKind::Gaussian, (0.1, 10.0), &NormOptions::default())
                .unwrap();
        let r = rows[0].ratio.unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 0.01);
        let c = Polynomial::constant(3, 1.0);
        let rows =
            sandwich_check(&c, &dist, &MCConfig::new(1000, 8), BoundKind::Gaussian, (0.1, 10.0), &NormOptions::default())
                .unwrap();
        assert!(rows[0].ratio.is_none() && rows[0].pass);
    }
}
