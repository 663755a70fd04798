//! Random-search oracle for `‖A‖_J` on tiny instances.
//!
//! Deliberately written without the shared ALS kernel: offsets are computed
//! from scratch and every start is polished by plain power-type sweeps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{shape, Error, Result};
use crate::partitions::SetPartition;
use crate::tensor::Tensor;

/// Cap on `Σ_l m^{#J_l}`.
pub const BRUTEFORCE_MAX_DIM: usize = 64;

const POLISH_SWEEPS: usize = 50;
const CHUNK: usize = 1024;

/// Best value of the multilinear form over `npoints` random starts on the
/// product of unit spheres, each polished by up to 50 alternating sweeps.
pub fn norm_j_bruteforce(a: &Tensor, j: &SetPartition, npoints: usize, seed: u64) -> Result<f64> {
    if j.order() != a.order() {
        return Err(shape(format!("partition of order {} for tensor of order {}", j.order(), a.order())));
    }
    let m = a.dim();
    let lens: Vec<usize> = j.blocks().iter().map(|b| m.pow(b.len() as u32)).collect();
    let total: usize = lens.iter().sum();
    if total > BRUTEFORCE_MAX_DIM {
        return Err(Error::Cap(format!("brute-force search dimension {total} exceeds {BRUTEFORCE_MAX_DIM}")));
    }
    let nb = lens.len();
    let mut starts = Vec::with_capacity(nb);
    let mut acc = 0;
    for &len in &lens {
        starts.push(acc);
        acc += len;
    }
    // each entry stored as its value and the flat position in each block
    let mut values = Vec::new();
    let mut offs = Vec::new();
    for i in 0..a.len() {
        let v = a.values()[i];
        if v == 0.0 {
            continue;
        }
        let idx = a.index_of(i);
        values.push(v);
        for (l, b) in j.blocks().iter().enumerate() {
            offs.push(starts[l] + b.iter().fold(0, |acc, &k| acc * m + idx[k]));
        }
    }
    if values.is_empty() {
        return Ok(0.0);
    }
    if nb == 1 {
        // a single sweep lands on A / |A|_F
        return Ok(values.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    let form = Form::new(values, offs, starts, lens, total);
    let chunks = npoints.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(npoints - c * CHUNK);
            let mut x = vec![0.0; form.total];
            let mut g = vec![0.0; form.total];
            let mut best = f64::NEG_INFINITY;
            for _ in 0..count {
                best = best.max(form.polish(&mut x, &mut g, &mut rng));
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best.max(0.0))
}

struct Form {
    values: Vec<f64>,
    offs: Vec<usize>,
    /// Per block: the updated coordinate and the remaining offsets of each entry.
    targets: Vec<Vec<usize>>,
    others: Vec<Vec<usize>>,
    starts: Vec<usize>,
    lens: Vec<usize>,
    total: usize,
}

impl Form {
    fn new(values: Vec<f64>, offs: Vec<usize>, starts: Vec<usize>, lens: Vec<usize>, total: usize) -> Self {
        let nb = lens.len();
        let mut targets = vec![Vec::with_capacity(values.len()); nb];
        let mut others = vec![Vec::with_capacity(values.len() * (nb - 1)); nb];
        for o in offs.chunks_exact(nb) {
            for l in 0..nb {
                targets[l].push(o[l]);
                others[l].extend(o.iter().enumerate().filter(|&(q, _)| q != l).map(|(_, &k)| k));
            }
        }
        Self { values, offs, targets, others, starts, lens, total }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let nb = self.lens.len();
        self.values.iter().zip(self.offs.chunks_exact(nb)).map(|(v, o)| o.iter().fold(*v, |p, &k| p * x[k])).sum()
    }

    fn polish(&self, x: &mut [f64], g: &mut [f64], rng: &mut ChaCha8Rng) -> f64 {
        let nb = self.lens.len();
        for v in x.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        for l in 0..nb {
            unit(&mut x[self.starts[l]..self.starts[l] + self.lens[l]]);
        }
        let mut prev = self.value(x);
        for _ in 0..POLISH_SWEEPS {
            let mut cur = 0.0;
            for l in 0..nb {
                let block = self.starts[l]..self.starts[l] + self.lens[l];
                g[block.clone()].fill(0.0);
                let rest = self.others[l].chunks_exact(nb - 1);
                for ((v, &t), o) in self.values.iter().zip(&self.targets[l]).zip(rest) {
                    g[t] += o.iter().fold(*v, |p, &k| p * x[k]);
                }
                // after the last block update the form equals the gradient norm
                cur = unit(&mut g[block.clone()]);
                if cur > 0.0 {
                    x[block.clone()].copy_from_slice(&g[block]);
                }
            }
            if cur == 0.0 {
                cur = self.value(x);
            }
            if cur - prev <= 1e-12 * cur.abs().max(1.0) {
                return cur;
            }
            prev = cur;
        }
        prev
    }
}

/// Normalizes in place and returns the former norm.
fn unit(x: &mut [f64]) -> f64 {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_rank_one() {
        let i2 = Tensor::identity(2).unwrap();
        let v = norm_j_bruteforce(&i2, &"1|2".parse().unwrap(), 10_000, 1).unwrap();
        assert!((v - 1.0).abs() < 1e-6);

        let u = vec![0.6, 0.8];
        let w = vec![1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()];
        let r1 = Tensor::outer(&[u.clone(), w, u]).unwrap();
        let v = norm_j_bruteforce(&r1, &"1|2|3".parse().unwrap(), 10_000, 2).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dimension_cap() {
        let a = Tensor::zeros(3, 8).unwrap();
        assert!(matches!(norm_j_bruteforce(&a, &"1|2,3".parse().unwrap(), 10, 0), Err(Error::Cap(_))));
    }
}
