//! Gaussian chaoses `⟨A, G_1 ⊗ ⋯ ⊗ G_d⟩` and `Σ_i a_i g_{i_1} ⋯ g_{i_d}`.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{check_p, chunked_samples, MCConfig, MomentEstimate};
use crate::error::{Error, Result};
use crate::tensor::{advance, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChaosMode {
    /// Independent Gaussian vectors, one per axis.
    Decoupled,
    /// One Gaussian vector on every axis.
    Undecoupled,
}

/// Undecoupled kernels must be symmetric and vanish on every generalized
/// diagonal `{i_k = i_l}`.
pub fn validate_chaos_kernel(a: &Tensor) -> Result<()> {
    let d = a.order();
    let mut idx = vec![0usize; d];
    for &v in a.values() {
        if v != 0.0 {
            for k in 0..d {
                for l in k + 1..d {
                    if idx[k] == idx[l] {
                        return Err(Error::ChaosKernel(format!(
                            "nonzero entry on the generalized diagonal i{} = i{}",
                            k + 1,
                            l + 1
                        )));
                    }
                }
            }
        }
        advance(&mut idx, a.dim());
    }
    let scale = a.max_abs().max(1.0);
    let asym = a.asymmetry();
    if asym > 1e-12 * scale {
        return Err(Error::ChaosKernel(format!("kernel is not symmetric (max deviation {asym:e})")));
    }
    Ok(())
}

fn evaluate(a: &Tensor, vectors: &[&[f64]]) -> f64 {
    let d = a.order();
    let mut idx = vec![0usize; d];
    let mut sum = 0.0;
    for &v in a.values() {
        if v != 0.0 {
            sum += v * (0..d).map(|k| vectors[k][idx[k]]).product::<f64>();
        }
        advance(&mut idx, a.dim());
    }
    sum
}

/// Empirical `‖Z‖_p` of the chaos (uncentered: both chaoses have mean zero).
pub fn chaos_moment(a: &Tensor, mode: ChaosMode, p: f64, cfg: &MCConfig) -> Result<MomentEstimate> {
    check_p(p, cfg.n_samples)?;
    if mode == ChaosMode::Undecoupled {
        validate_chaos_kernel(a)?;
    }
    let (d, m) = (a.order(), a.dim());
    let samples = chunked_samples(cfg.n_samples, cfg.batch, cfg.seed, |rng| {
        let draws = if mode == ChaosMode::Decoupled { d } else { 1 };
        let g: Vec<Vec<f64>> = (0..draws).map(|_| (0..m).map(|_| StandardNormal.sample(rng)).collect()).collect();
        let vectors: Vec<&[f64]> = (0..d).map(|k| g[if draws == 1 { 0 } else { k }].as_slice()).collect();
        Ok(evaluate(a, &vectors))
    })?;
    Ok(MomentEstimate::from_samples(&samples, p, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_validation() {
        let off = Tensor::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(validate_chaos_kernel(&off).is_ok());
        let diag = Tensor::identity(2).unwrap();
        let err = validate_chaos_kernel(&diag).unwrap_err().to_string();
        assert!(err.contains("i1 = i2"), "{err}");
        let asym = Tensor::new(2, 2, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        assert!(validate_chaos_kernel(&asym).is_err());
    }

    #[test]
    fn second_moments() {
        let cfg = MCConfig::new(200_000, 11);
        let off = Tensor::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let u = chaos_moment(&off, ChaosMode::Undecoupled, 2.0, &cfg).unwrap();
        assert!((u.value - 2.0).abs() < 3.0 * u.stderr + 1e-3, "{u:?}");
        let a = Tensor::new(1, 2, vec![3.0, 4.0]).unwrap();
        let dcp = chaos_moment(&a, ChaosMode::Decoupled, 2.0, &cfg).unwrap();
        assert!((dcp.value - 5.0).abs() < 3.0 * dcp.stderr + 1e-3);
    }
}
