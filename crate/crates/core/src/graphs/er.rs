//! Sampling `G(n, p)`, exact cycle counts and the cycle tail bounds.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{EdgeIndex, GraphSpec};
use crate::error::{domain, Error, Result};
use crate::montecarlo::{chunked_samples, mean_with_stderr, wilson_interval, MCConfig, TailEstimate, MIN_TAIL_SAMPLES};

/// Symmetric 0/1 adjacency matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    bits: Vec<u8>,
}

impl AdjacencyMatrix {
    /// Builds the graph from edge indicators in [`EdgeIndex`] order.
    pub fn from_indicators(n: usize, x: &[f64]) -> Result<Self> {
        let idx = EdgeIndex::new(n);
        if x.len() != idx.len() {
            return Err(crate::error::shape(format!("expected {} edge indicators, got {}", idx.len(), x.len())));
        }
        let mut bits = vec![0u8; n * n];
        for (pos, &v) in x.iter().enumerate() {
            if v != 0.0 {
                let (u, w) = idx.pair(pos);
                bits[u * n + w] = 1;
                bits[w * n + u] = 1;
            }
        }
        Ok(Self { n, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.n + v] != 0
    }

    pub fn num_edges(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count() / 2
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.bits.chunks(self.n).map(|row| row.iter().map(|&b| b as i64).sum()).collect()
    }

    /// Edge indicators in [`EdgeIndex`] order.
    pub fn indicators(&self) -> Vec<f64> {
        let n = self.n;
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).map(|(u, v)| self.bits[u * n + v] as f64).collect()
    }

    fn matmul(&self, m: &[i64]) -> Vec<i64> {
        let n = self.n;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                if self.bits[i * n + k] != 0 {
                    let row = &m[k * n..(k + 1) * n];
                    for (o, &v) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                        *o += v;
                    }
                }
            }
        }
        out
    }

    fn power2(&self) -> Vec<i64> {
        let a: Vec<i64> = self.bits.iter().map(|&b| b as i64).collect();
        self.matmul(&a)
    }
}

/// Samples one graph; edges are drawn in [`EdgeIndex`] order.
pub fn sample_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> AdjacencyMatrix {
    let mut bits = vec![0u8; n * n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                bits[u * n + v] = 1;
                bits[v * n + u] = 1;
            }
        }
    }
    AdjacencyMatrix { n, bits }
}

/// Number of triangles, `tr(A³) / 6`, in exact integer arithmetic.
pub fn triangle_count_trace(a: &AdjacencyMatrix) -> u64 {
    let n = a.n;
    let a2 = a.power2();
    let tr3: i64 = (0..n).map(|i| (0..n).filter(|&k| a.has_edge(i, k)).map(|k| a2[k * n + i]).sum::<i64>()).sum();
    (tr3 / 6) as u64
}

/// Number of `k`-cycles for `k ∈ {3, 4, 5}` from traces of powers of `A`.
pub fn count_cycles_trace(a: &AdjacencyMatrix, k: usize) -> Result<u64> {
    let n = a.n;
    match k {
        3 => Ok(triangle_count_trace(a)),
        4 | 5 => {
            let a2 = a.power2();
            let deg = a.degrees();
            let m = a.num_edges() as i64;
            if k == 4 {
                let tr4: i64 = a2.iter().map(|v| v * v).sum();
                let sum_d2: i64 = deg.iter().map(|d| d * d).sum();
                Ok(((tr4 - 2 * sum_d2 + 2 * m) / 8) as u64)
            } else {
                let a3 = a.matmul(&a2);
                let tr5: i64 = a2.iter().zip(&a3).map(|(x, y)| x * y).sum();
                let tr3: i64 = (0..n).map(|i| a3[i * n + i]).sum();
                let weighted: i64 = (0..n).map(|i| (deg[i] - 2) * a3[i * n + i]).sum();
                Ok(((tr5 - 5 * tr3 - 5 * weighted) / 10) as u64)
            }
        }
        _ => Err(Error::Unsupported(format!("exact {k}-cycle counts; only k = 3, 4, 5 are available"))),
    }
}

/// Counts `k`-cycles by enumerating vertex sequences (small graphs only).
pub fn count_cycles_bruteforce(a: &AdjacencyMatrix, k: usize) -> Result<u64> {
    if k < 3 {
        return Err(domain("cycles need at least 3 vertices"));
    }
    let n = a.n;
    let mut closed = 0u64;
    let mut path = Vec::with_capacity(k);
    let mut used = vec![false; n];
    fn rec(a: &AdjacencyMatrix, k: usize, path: &mut Vec<usize>, used: &mut [bool], closed: &mut u64) {
        let last = *path.last().expect("nonempty path");
        if path.len() == k {
            if a.has_edge(last, path[0]) {
                *closed += 1;
            }
            return;
        }
        for v in 0..a.n {
            if !used[v] && a.has_edge(last, v) {
                used[v] = true;
                path.push(v);
                rec(a, k, path, used, closed);
                path.pop();
                used[v] = false;
            }
        }
    }
    for s in 0..n {
        used[s] = true;
        path.push(s);
        rec(a, k, &mut path, &mut used, &mut closed);
        path.pop();
        used[s] = false;
    }
    Ok(closed / (2 * k as u64))
}

/// `E Y_H = n^{k̲} p^{e(H)} / #Aut(H)`.
pub fn expected_count(h: &GraphSpec, n: usize, p: f64) -> Result<f64> {
    let maps: f64 = (0..h.k()).map(|i| n.saturating_sub(i) as f64).product();
    Ok(maps * p.powi(h.num_edges() as i32) / h.aut_size()? as f64)
}

fn check_np(n: usize, p: f64, k: usize) -> Result<f64> {
    if n < k {
        return Err(domain(format!("need n ≥ {k}, got {n}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("p = {p} is outside (0, 1)")));
    }
    Ok((2.0 / p).ln().powf(-0.5))
}

/// `2 exp(-(1/C) min(t² / (L⁶n³ + L⁴p²n³ + L²p⁴n⁴), t / (L³n^{1/2} + L²pn), t^{2/3} / L²))`
/// with `L = (log(2/p))^{-1/2}`.
pub fn triangle_tail_bound(n: usize, p: f64, t: f64, c: f64) -> Result<f64> {
    let l = check_np(n, p, 3)?;
    if !(t >= 0.0) || !(c > 0.0) {
        return Err(domain("need t ≥ 0 and C > 0"));
    }
    let nf = n as f64;
    let a = t * t / (l.powi(6) * nf.powi(3) + l.powi(4) * p * p * nf.powi(3) + l * l * p.powi(4) * nf.powi(4));
    let b = t / (l.powi(3) * nf.sqrt() + l * l * p * nf);
    let e = t.powf(2.0 / 3.0) / (l * l);
    Ok(2.0 * (-a.min(b).min(e) / c).exp())
}

/// Tail bound for the number of `k`-cycles:
/// `2 exp(-(1/C) min(t² / (L^{2k} n^k), min_{l,d} t^{2/l} / (L^{2d/l} p^{2(k-d)/l} n^{(2k-d-l)/l})))`
/// over `1 ≤ l ≤ d ≤ k` excluding `l = 1, d = k`.
pub fn cycle_tail_bound(k: usize, n: usize, p: f64, t: f64, c: f64) -> Result<f64> {
    if k < 3 {
        return Err(domain("cycles need at least 3 vertices"));
    }
    let l = check_np(n, p, k)?;
    if !(t >= 0.0) || !(c > 0.0) {
        return Err(domain("need t ≥ 0 and C > 0"));
    }
    let (nf, kf) = (n as f64, k as f64);
    let mut eta = t * t / (l.powf(2.0 * kf) * nf.powf(kf));
    for d in 1..=k {
        for b in 1..=d {
            if d == k && b == 1 {
                continue;
            }
            let (df, bf) = (d as f64, b as f64);
            let denom = l.powf(2.0 * df / bf) * p.powf(2.0 * (kf - df) / bf) * nf.powf((2.0 * kf - df - bf) / bf);
            eta = eta.min(t.powf(2.0 / bf) / denom);
        }
    }
    Ok(2.0 * (-eta / c).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErRow {
    pub t: f64,
    pub empirical: TailEstimate,
    pub bound: f64,
    /// The triangle-specific bound when `k = 3`.
    pub triangle_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErTailReport {
    pub k: usize,
    pub n: usize,
    pub p: f64,
    pub expected: f64,
    pub mean: f64,
    pub stderr: f64,
    pub rows: Vec<ErRow>,
}

/// Empirical `P(|Y - EY| ≥ t)` for the `k`-cycle count against the bounds,
/// centered at the exact mean.
pub fn er_tail_experiment(k: usize, n: usize, p: f64, ts: &[f64], cfg: &MCConfig, c: f64) -> Result<ErTailReport> {
    if !(3..=5).contains(&k) {
        return Err(Error::Unsupported(format!("simulating {k}-cycle counts; only k = 3, 4, 5 are available")));
    }
    if cfg.n_samples < MIN_TAIL_SAMPLES {
        return Err(domain(format!("tail estimates need N ≥ {MIN_TAIL_SAMPLES}, got {}", cfg.n_samples)));
    }
    check_np(n, p, k)?;
    let h = GraphSpec::cycle(k)?;
    let expected = expected_count(&h, n, p)?;
    let counts = chunked_samples(cfg.n_samples, cfg.batch, cfg.seed, |rng| {
        let g = sample_graph(n, p, rng);
        Ok(count_cycles_trace(&g, k)? as f64)
    })?;
    let (mean, stderr) = mean_with_stderr(&counts);
    let mut dev: Vec<f64> = counts.iter().map(|y| (y - expected).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let total = dev.len();
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let hits = total - dev.partition_point(|&x| x < t);
        let (lo, hi) = wilson_interval(hits, total);
        rows.push(ErRow {
            t,
            empirical: TailEstimate { t, prob: hits as f64 / total as f64, lo, hi, n: total },
            bound: cycle_tail_bound(k, n, p, t, c)?,
            triangle_bound: if k == 3 { Some(triangle_tail_bound(n, p, t, c)?) } else { None },
        });
    }
    Ok(ErTailReport { k, n, p, expected, mean, stderr, rows })
}
