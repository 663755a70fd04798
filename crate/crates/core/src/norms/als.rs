//! Alternating maximization of the multilinear form over a product of
//! constraint sets.
//!
//! Each block update replaces one block vector by the maximizer of the linear
//! functional obtained by contracting the tensor with all other blocks. The
//! objective is nondecreasing along a sweep, so the loop terminates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::tensor::{BlockLayout, Tensor};

/// Feasible set of one block vector.
#[derive(Debug, Clone)]
pub(crate) enum Constraint {
    /// Euclidean unit ball.
    L2,
    /// `{y : Σ_i ‖y_{i,·}‖₂^α ≤ 1}`, where `i` is the value of the
    /// distinguished coordinate. `slice_of[o]` is that value for block offset `o`.
    MixedL2 { slice_of: Vec<u32>, slices: usize, alpha: f64 },
}

impl Constraint {
    /// Maximizes `⟨c, y⟩` over the feasible set. Returns `None` when `c = 0`.
    pub fn maximize(&self, c: &[f64]) -> Option<(Vec<f64>, f64)> {
        match self {
            Constraint::L2 => {
                let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return None;
                }
                Some((c.iter().map(|v| v / norm).collect(), norm))
            }
            Constraint::MixedL2 { slice_of, slices, alpha } => {
                let mut r = vec![0.0; *slices];
                for (o, v) in c.iter().enumerate() {
                    r[slice_of[o] as usize] += v * v;
                }
                r.iter_mut().for_each(|x| *x = x.sqrt());
                let rmax = r.iter().fold(0.0f64, |m, &x| m.max(x));
                if rmax == 0.0 {
                    return None;
                }
                let weights: Vec<f64> = if *alpha <= 1.0 {
                    // all mass on the first slice attaining the max
                    let top = r.iter().position(|&x| x == rmax).expect("max exists");
                    (0..*slices).map(|i| if i == top { 1.0 } else { 0.0 }).collect()
                } else {
                    let beta = alpha / (alpha - 1.0);
                    let s = r.iter().map(|&x| (x / rmax).powf(beta)).sum::<f64>().powf(1.0 / beta);
                    let dual = rmax * s;
                    r.iter().map(|&x| (x / dual).powf(beta - 1.0)).collect()
                };
                let value: f64 = r.iter().zip(&weights).map(|(x, w)| x * w).sum();
                let y = c
                    .iter()
                    .enumerate()
                    .map(|(o, v)| {
                        let i = slice_of[o] as usize;
                        if r[i] == 0.0 {
                            0.0
                        } else {
                            weights[i] * v / r[i]
                        }
                    })
                    .collect();
                Some((y, value))
            }
        }
    }

    /// Rescales an arbitrary nonzero vector onto the boundary of the set.
    fn normalize(&self, x: &mut [f64]) {
        let scale = match self {
            Constraint::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Constraint::MixedL2 { slice_of, slices, alpha } => {
                let mut r = vec![0.0; *slices];
                for (o, v) in x.iter().enumerate() {
                    r[slice_of[o] as usize] += v * v;
                }
                r.iter().map(|s| s.sqrt().powf(*alpha)).sum::<f64>().powf(1.0 / alpha)
            }
        };
        if scale > 0.0 {
            x.iter_mut().for_each(|v| *v /= scale);
        }
    }
}

/// Gradient of the multilinear form with respect to block `target`.
pub(crate) fn block_gradient(a: &Tensor, layout: &BlockLayout, xs: &[Vec<f64>], target: usize) -> Vec<f64> {
    let mut g = vec![0.0; layout.block_lens[target]];
    let others: Vec<usize> = (0..xs.len()).filter(|&l| l != target).collect();
    let tgt = &layout.offsets[target];
    for (i, &v) in a.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let mut prod = v;
        for &l in &others {
            prod *= xs[l][layout.offsets[l][i] as usize];
        }
        g[tgt[i] as usize] += prod;
    }
    g
}

pub(crate) fn form_value(a: &Tensor, layout: &BlockLayout, xs: &[Vec<f64>]) -> f64 {
    let mut sum = 0.0;
    for (i, &v) in a.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let mut prod = v;
        for (l, x) in xs.iter().enumerate() {
            prod *= x[layout.offsets[l][i] as usize];
        }
        sum += prod;
    }
    sum
}

#[derive(Debug, Clone)]
pub(crate) struct AlsRun {
    pub value: f64,
    pub xs: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// Starting point of restart `r`: all-equal vectors for `r = 0`, otherwise
/// Gaussian directions from the stream `seed + r`.
pub(crate) fn initial_point(layout: &BlockLayout, constraints: &[Constraint], seed: u64, r: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
    layout
        .block_lens
        .iter()
        .zip(constraints)
        .map(|(&len, c)| {
            let mut x: Vec<f64> = if r == 0 {
                vec![1.0; len]
            } else {
                (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
            };
            c.normalize(&mut x);
            x
        })
        .collect()
}

pub(crate) fn alternating_max(
    a: &Tensor,
    layout: &BlockLayout,
    constraints: &[Constraint],
    mut xs: Vec<Vec<f64>>,
    tol: f64,
    max_sweeps: usize,
) -> AlsRun {
    let mut prev = f64::NEG_INFINITY;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        for l in 0..xs.len() {
            let g = block_gradient(a, layout, &xs, l);
            if let Some((x, _)) = constraints[l].maximize(&g) {
                xs[l] = x;
            }
        }
        let value = form_value(a, layout, &xs);
        if value - prev < tol * value.abs().max(1.0) {
            break;
        }
        prev = value;
    }
    let value = form_value(a, layout, &xs);
    AlsRun { value, xs, sweeps }
}

/// Runs `restarts` independent alternating maximizations and keeps the best.
/// Ties go to the lowest restart index, so the outcome does not depend on
/// the number of worker threads.
pub(crate) fn best_of_restarts(
    a: &Tensor,
    layout: &BlockLayout,
    constraints: &[Constraint],
    restarts: usize,
    seed: u64,
    tol: f64,
    max_sweeps: usize,
) -> (AlsRun, usize) {
    let runs: Vec<AlsRun> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = initial_point(layout, constraints, seed, r);
            alternating_max(a, layout, constraints, x0, tol, max_sweeps)
        })
        .collect();
    let total_sweeps = runs.iter().map(|r| r.sweeps).sum();
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.value > best.value { run } else { best })
        .expect("at least one restart");
    (best, total_sweeps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_update_alpha_one_picks_first_max_slice() {
        let c = Constraint::MixedL2 { slice_of: vec![0, 1, 2], slices: 3, alpha: 1.0 };
        let (y, v) = c.maximize(&[3.0, -4.0, 4.0]).unwrap();
        assert_eq!(v, 4.0);
        assert_eq!(y, vec![0.0, -1.0, 0.0]);
    }

    #[test]
    fn mixed_update_dual_norm() {
        // alpha = 4/3 has beta = 4
        let c = Constraint::MixedL2 { slice_of: vec![0, 1], slices: 2, alpha: 4.0 / 3.0 };
        let (y, v) = c.maximize(&[1.0, 2.0]).unwrap();
        let want = (1f64 + 16.0).powf(0.25);
        assert!((v - want).abs() < 1e-14);
        let feasible: f64 = y.iter().map(|t| t.abs().powf(4.0 / 3.0)).sum();
        assert!((feasible - 1.0).abs() < 1e-12);
        assert!((y[0] + 2.0 * y[1] - want).abs() < 1e-12);
    }

    #[test]
    fn mixed_alpha_two_is_euclidean() {
        let c = Constraint::MixedL2 { slice_of: vec![0, 0, 1, 1], slices: 2, alpha: 2.0 };
        let g = [1.0, -2.0, 0.5, 3.0];
        let (y, v) = c.maximize(&g).unwrap();
        let (y2, v2) = Constraint::L2.maximize(&g).unwrap();
        assert!((v - v2).abs() < 1e-14);
        for (a, b) in y.iter().zip(&y2) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_gradient_is_none() {
        assert!(Constraint::L2.maximize(&[0.0, 0.0]).is_none());
    }
}
