//! Partition norms `‖A‖_J` and the mixed norms `‖A‖_{J|K}`.
//!
//! `‖A‖_J` is the supremum of the multilinear form over unit block vectors.
//! One block gives the Frobenius norm and two blocks the top singular value
//! of a matricization; both are exact. Three or more blocks are handled by
//! alternating maximization with restarts, which only certifies a lower bound.

pub(crate) mod als;
mod bruteforce;
mod mixed;

pub use bruteforce::{norm_j_bruteforce, BRUTEFORCE_MAX_DIM};
pub use mixed::{mixed_norm, mixed_norm_terms, MixedTerm};

use serde::Serialize;

use crate::error::{shape, Result};
use crate::linalg::jacobi_eigen;
use crate::partitions::SetPartition;
use crate::tensor::{BlockLayout, Tensor};
use als::{best_of_restarts, Constraint};

/// Largest matricization side for which the exact spectral route is used.
pub const MAX_SPECTRAL_SIDE: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { restarts: 64, tol: 1e-10, max_sweeps: 500, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormMethod {
    Frobenius,
    MatricizationSpectral,
    Als,
}

impl NormMethod {
    pub fn label(&self) -> &'static str {
        match self {
            NormMethod::Frobenius => "frobenius",
            NormMethod::MatricizationSpectral => "spectral",
            NormMethod::Als => "als",
        }
    }
}

/// Value of `‖A‖_J` together with block vectors attaining it.
#[derive(Debug, Clone, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub certificate: Vec<Vec<f64>>,
    pub method: NormMethod,
    pub sweeps_used: usize,
    pub restarts_used: usize,
}

impl NormResult {
    /// ALS values are attained by the certificate but may miss the supremum.
    pub fn is_lower_bound(&self) -> bool {
        self.method == NormMethod::Als
    }
}

fn check_order(a: &Tensor, j: &SetPartition) -> Result<()> {
    if j.order() != a.order() {
        return Err(shape(format!("partition of order {} for tensor of order {}", j.order(), a.order())));
    }
    Ok(())
}

fn zero_certificate(a: &Tensor, j: &SetPartition) -> Vec<Vec<f64>> {
    j.blocks()
        .iter()
        .map(|b| {
            let len = a.dim().pow(b.len() as u32);
            let mut x = vec![0.0; len];
            x[0] = 1.0;
            x
        })
        .collect()
}

/// Computes `‖A‖_J`, choosing the exact route when one exists.
pub fn norm_j(a: &Tensor, j: &SetPartition, opts: &NormOptions) -> Result<NormResult> {
    check_order(a, j)?;
    let method = match j.num_blocks() {
        1 => NormMethod::Frobenius,
        2 => NormMethod::MatricizationSpectral,
        _ => NormMethod::Als,
    };
    if a.is_zero() {
        return Ok(NormResult { value: 0.0, certificate: zero_certificate(a, j), method, sweeps_used: 0, restarts_used: 0 });
    }
    match method {
        NormMethod::Frobenius => {
            let value = a.frobenius();
            let cert = a.values().iter().map(|v| v / value).collect();
            Ok(NormResult { value, certificate: vec![cert], method, sweeps_used: 0, restarts_used: 0 })
        }
        NormMethod::MatricizationSpectral => match spectral(a, j)? {
            Some(r) => Ok(r),
            None => norm_als(a, j, opts),
        },
        NormMethod::Als => norm_als(a, j, opts),
    }
}

/// Alternating maximization for any partition, whatever the number of blocks.
pub fn norm_als(a: &Tensor, j: &SetPartition, opts: &NormOptions) -> Result<NormResult> {
    check_order(a, j)?;
    if a.is_zero() {
        return Ok(NormResult {
            value: 0.0,
            certificate: zero_certificate(a, j),
            method: NormMethod::Als,
            sweeps_used: 0,
            restarts_used: 0,
        });
    }
    let layout = BlockLayout::new(a.order(), a.dim(), j.blocks())?;
    let constraints = vec![Constraint::L2; j.num_blocks()];
    let restarts = opts.restarts.max(1);
    let (best, sweeps) = best_of_restarts(a, &layout, &constraints, restarts, opts.seed, opts.tol, opts.max_sweeps);
    Ok(NormResult {
        value: best.value,
        certificate: best.xs,
        method: NormMethod::Als,
        sweeps_used: sweeps,
        restarts_used: restarts,
    })
}

/// Top singular pair of the matricization, from the Gram matrix of its
/// smaller side. Returns `None` when that side exceeds [`MAX_SPECTRAL_SIDE`].
fn spectral(a: &Tensor, j: &SetPartition) -> Result<Option<NormResult>> {
    let layout = BlockLayout::new(a.order(), a.dim(), j.blocks())?;
    let (rows, cols) = (layout.block_lens[0], layout.block_lens[1]);
    let small_is_rows = rows <= cols;
    let (s, big) = if small_is_rows { (rows, cols) } else { (cols, rows) };
    if s > MAX_SPECTRAL_SIDE {
        return Ok(None);
    }
    // M as a dense small x big matrix
    let mut m = vec![0.0; s * big];
    for (i, &v) in a.values().iter().enumerate() {
        let (r, c) = (layout.offsets[0][i] as usize, layout.offsets[1][i] as usize);
        let (x, y) = if small_is_rows { (r, c) } else { (c, r) };
        m[x * big + y] = v;
    }
    let mut gram = vec![0.0; s * s];
    for x in 0..s {
        let rx = &m[x * big..(x + 1) * big];
        for y in x..s {
            let ry = &m[y * big..(y + 1) * big];
            let dot: f64 = rx.iter().zip(ry).map(|(p, q)| p * q).sum();
            gram[x * s + y] = dot;
            gram[y * s + x] = dot;
        }
    }
    let eig = jacobi_eigen(&gram, s, true)?;
    let u = eig.vector(s - 1);
    let mut w = vec![0.0; big];
    for x in 0..s {
        if u[x] != 0.0 {
            for (wy, my) in w.iter_mut().zip(&m[x * big..(x + 1) * big]) {
                *wy += u[x] * my;
            }
        }
    }
    let sigma = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    w.iter_mut().for_each(|v| *v /= sigma);
    let certificate = if small_is_rows { vec![u, w] } else { vec![w, u] };
    Ok(Some(NormResult {
        value: sigma,
        certificate,
        method: NormMethod::MatricizationSpectral,
        sweeps_used: eig.sweeps,
        restarts_used: 0,
    }))
}
