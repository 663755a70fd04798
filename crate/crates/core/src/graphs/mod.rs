//! Subgraph counts in Erdős–Rényi graphs as polynomials in the edge
//! indicators, with exact and edge-sequence norm bounds of their derivative tensors.

mod er;

pub use er::{
    count_cycles_bruteforce, count_cycles_trace, cycle_tail_bound, er_tail_experiment, expected_count, sample_graph,
    triangle_count_trace, triangle_tail_bound, AdjacencyMatrix, ErRow, ErTailReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::norms::{norm_j, NormOptions, NormResult};
use crate::partitions::SetPartition;
use crate::poly::Polynomial;
use crate::tensor::Tensor;

/// Cap on the number of injective vertex maps enumerated.
pub const MAX_EMBEDDINGS: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphKind {
    Cycle,
    Clique,
    Other,
}

/// A pattern graph on `[k]` without isolated vertices. Edges are stored
/// 0-based as `(min, max)` in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    k: usize,
    edges: Vec<(usize, usize)>,
    kind: GraphKind,
}

impl GraphSpec {
    pub fn new(k: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        let mut degree = vec![0usize; k];
        let mut norm = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= k || v >= k {
                return Err(domain(format!("edge ({}, {}) has a vertex outside [{k}]", u + 1, v + 1)));
            }
            if u == v {
                return Err(domain(format!("self-loop at vertex {}", u + 1)));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(domain(format!("duplicate edge ({}, {})", e.0 + 1, e.1 + 1)));
            }
            degree[u] += 1;
            degree[v] += 1;
            norm.push(e);
        }
        if let Some(v) = degree.iter().position(|&d| d == 0) {
            return Err(domain(format!("vertex {} is isolated", v + 1)));
        }
        let kind = classify(k, &norm, &degree);
        Ok(Self { k, edges: norm, kind })
    }

    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(domain("a cycle needs at least 3 vertices"));
        }
        Self::new(k, (0..k).map(|i| (i, (i + 1) % k)).collect())
    }

    pub fn clique(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(domain("a clique needs at least 2 vertices"));
        }
        Self::new(k, (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    pub fn is_cycle(&self) -> bool {
        self.kind == GraphKind::Cycle
    }

    /// `#Aut(H)`: `2k` for cycles, `k!` for cliques, brute force otherwise
    /// (up to 9 vertices).
    pub fn aut_size(&self) -> Result<u64> {
        match self.kind {
            GraphKind::Cycle => Ok(2 * self.k as u64),
            GraphKind::Clique => Ok((1..=self.k as u64).product()),
            GraphKind::Other => {
                if self.k > 9 {
                    return Err(Error::Unsupported("automorphism count for general graphs above 9 vertices".into()));
                }
                let set: std::collections::BTreeSet<(usize, usize)> = self.edges.iter().copied().collect();
                let count = crate::tensor::permutations(self.k)
                    .into_iter()
                    .filter(|perm| {
                        self.edges.iter().all(|&(u, v)| set.contains(&(perm[u].min(perm[v]), perm[u].max(perm[v]))))
                    })
                    .count();
                Ok(count as u64)
            }
        }
    }

    /// Parses `{"k": 3, "edges": [[1, 2], [2, 3], [1, 3]]}` (1-based).
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text)?;
        let mut edges = Vec::with_capacity(raw.edges.len());
        for [u, v] in raw.edges {
            if u == 0 || v == 0 {
                return Err(Error::Parse("graph vertices are 1-based".into()));
            }
            edges.push((u - 1, v - 1));
        }
        Self::new(raw.k, edges)
    }
}

#[derive(Deserialize, Serialize)]
struct GraphJson {
    k: usize,
    edges: Vec<[usize; 2]>,
}

fn classify(k: usize, edges: &[(usize, usize)], degree: &[usize]) -> GraphKind {
    if edges.len() == k * (k - 1) / 2 {
        return GraphKind::Clique;
    }
    if k >= 3 && edges.len() == k && degree.iter().all(|&d| d == 2) {
        // connected 2-regular graph
        let mut adj = vec![Vec::new(); k];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            if !std::mem::replace(&mut seen[u], true) {
                stack.extend(adj[u].iter().copied());
            }
        }
        if seen.iter().all(|&s| s) {
            return GraphKind::Cycle;
        }
    }
    GraphKind::Other
}

/// Lexicographic numbering of the pairs `{u < v} ⊆ [n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeIndex {
    n: usize,
}

impl EdgeIndex {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// 0-based position of `{u, v}`, `u ≠ v`.
    pub fn pos(&self, u: usize, v: usize) -> usize {
        debug_assert!(u != v && u < self.n && v < self.n);
        let (a, b) = (u.min(v), u.max(v));
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    pub fn pair(&self, mut pos: usize) -> (usize, usize) {
        for a in 0..self.n {
            let row = self.n - a - 1;
            if pos < row {
                return (a, a + 1 + pos);
            }
            pos -= row;
        }
        panic!("edge position out of range");
    }
}

fn falling_factorial(n: usize, k: usize) -> u64 {
    (0..k).map(|i| n.saturating_sub(i) as u64).product()
}

/// Calls `visit` with every injective map `[len] → [n]`.
fn for_each_injection(n: usize, len: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(n: usize, len: usize, cur: &mut Vec<usize>, used: &mut [bool], visit: &mut impl FnMut(&[usize])) {
        if cur.len() == len {
            visit(cur);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, len, cur, used, visit);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut used = vec![false; n];
    rec(n, len, &mut Vec::with_capacity(len), &mut used, visit);
}

/// The ordered-copy count `X_H = Σ_{i ∈ [n]^{k̲}} Π_{e ∈ E(H)} x_{i(e)}`.
/// Divide by [`GraphSpec::aut_size`] to count copies.
pub fn counting_polynomial(h: &GraphSpec, n: usize) -> Result<Polynomial> {
    if n < h.k {
        return Err(domain(format!("need n ≥ k, got n = {n}, k = {}", h.k)));
    }
    let maps = falling_factorial(n, h.k);
    if maps > MAX_EMBEDDINGS {
        return Err(Error::Cap(format!("{maps} vertex embeddings exceed {MAX_EMBEDDINGS}")));
    }
    let idx = EdgeIndex::new(n);
    let mut terms: std::collections::HashMap<Vec<usize>, f64> = std::collections::HashMap::new();
    for_each_injection(n, h.k, &mut |map| {
        let mut vars: Vec<usize> = h.edges.iter().map(|&(u, v)| idx.pos(map[u], map[v])).collect();
        vars.sort_unstable();
        *terms.entry(vars).or_insert(0.0) += 1.0;
    });
    let mut sorted: Vec<(Vec<usize>, f64)> = terms.into_iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    Polynomial::from_terms(idx.len(), sorted.into_iter().map(|(vars, c)| (vars.into_iter().map(|v| (v, 1)).collect(), c)))
}

/// Closed-form derivative norms of the triangle count `Y = X_{K_3} / 6`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleNorms {
    pub d1: f64,
    pub d2_operator: f64,
    pub d2_frobenius: f64,
    pub d3_frobenius: f64,
    /// Upper bound for the partitions `{1,2}{3}`, `{1,3}{2}`, `{2,3}{1}`.
    pub d3_pair_bound: f64,
    /// Upper bound for `{1}{2}{3}`.
    pub d3_triple_bound: f64,
}

pub fn triangle_norms_exact(n: usize, p: f64) -> Result<TriangleNorms> {
    if n < 3 {
        return Err(domain("triangle norms need n ≥ 3"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!("p = {p} is outside (0, 1]")));
    }
    let nf = n as f64;
    Ok(TriangleNorms {
        d1: (nf - 2.0) * p * p * (nf * (nf - 1.0) / 2.0).sqrt(),
        d2_operator: 2.0 * p * (nf - 2.0),
        d2_frobenius: p * (nf * (nf - 1.0) * (nf - 2.0)).sqrt(),
        d3_frobenius: (nf * (nf - 1.0) * (nf - 2.0)).sqrt(),
        d3_pair_bound: (2.0 * nf).sqrt(),
        d3_triple_bound: 2f64.powf(1.5),
    })
}

/// Edges of `G` with no adjacent edge in `G`.
fn isolated_edges(edges: &[(usize, usize)], k: usize) -> usize {
    let mut deg = vec![0usize; k];
    for &(u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    edges.iter().filter(|&&(u, v)| deg[u] == 1 && deg[v] == 1).count()
}

/// Combinatorial data of an edge sequence `e` and a partition of its positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeSequenceShape {
    /// `v(H_0)`.
    pub vertices: usize,
    /// `s(H_0)`.
    pub s0: usize,
    /// `Σ_r s(H_r)`.
    pub s_blocks: usize,
    /// Vertices of `H_0` lying in exactly one `H_r`.
    pub singly_covered: usize,
}

pub fn sequence_shape(h: &GraphSpec, seq: &[usize], j: &SetPartition) -> Result<EdgeSequenceShape> {
    if j.order() != seq.len() {
        return Err(domain("partition order must equal the edge-sequence length"));
    }
    let mut distinct = seq.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != seq.len() || seq.iter().any(|&e| e >= h.num_edges()) {
        return Err(domain("edge sequence must list distinct edges of H"));
    }
    let e0: Vec<(usize, usize)> = seq.iter().map(|&e| h.edges[e]).collect();
    let mut cover = vec![0usize; h.k];
    let mut in_h0 = vec![false; h.k];
    let mut s_blocks = 0;
    for block in j.blocks() {
        let er: Vec<(usize, usize)> = block.iter().map(|&q| e0[q]).collect();
        s_blocks += isolated_edges(&er, h.k);
        let mut vs: Vec<usize> = er.iter().flat_map(|&(u, v)| [u, v]).collect();
        vs.sort_unstable();
        vs.dedup();
        for v in vs {
            cover[v] += 1;
            in_h0[v] = true;
        }
    }
    Ok(EdgeSequenceShape {
        vertices: in_h0.iter().filter(|&&b| b).count(),
        s0: isolated_edges(&e0, h.k),
        s_blocks,
        singly_covered: cover.iter().filter(|&&c| c == 1).count(),
    })
}

/// The indicator tensor `1{(ẽ_1, …, ẽ_d) ≃ e}` over the edges of `K_n`.
pub fn indicator_tensor(h: &GraphSpec, seq: &[usize], n: usize) -> Result<Tensor> {
    if n < h.k {
        return Err(domain(format!("need n ≥ k, got n = {n}, k = {}", h.k)));
    }
    let idx = EdgeIndex::new(n);
    let mut t = Tensor::zeros(seq.len(), idx.len())?;
    let e0: Vec<(usize, usize)> = seq.iter().map(|&e| h.edges[e]).collect();
    let mut verts: Vec<usize> = e0.iter().flat_map(|&(u, v)| [u, v]).collect();
    verts.sort_unstable();
    verts.dedup();
    let local = |v: usize| verts.binary_search(&v).expect("vertex of H_0");
    let maps = falling_factorial(n, verts.len());
    if maps > MAX_EMBEDDINGS {
        return Err(Error::Cap(format!("{maps} vertex embeddings exceed {MAX_EMBEDDINGS}")));
    }
    let mut target = vec![0usize; seq.len()];
    for_each_injection(n, verts.len(), &mut |map| {
        for (q, &(u, v)) in e0.iter().enumerate() {
            target[q] = idx.pos(map[local(u)], map[local(v)]);
        }
        t.set(&target, 1.0);
    });
    Ok(t)
}

/// Norm of the indicator tensor next to its bound
/// `2^{-s(H_0) + Σ s(H_r)/2} n^{#singly-covered/2}` and the near-optimality
/// lower bound `2^{-#V_0} n^{#V_0/2}`.
#[derive(Debug, Clone, Serialize)]
pub struct IndicatorCheck {
    pub lhs: NormResult,
    pub rhs: f64,
    pub lower: f64,
    pub shape: EdgeSequenceShape,
}

pub fn indicator_norm_check(
    h: &GraphSpec,
    seq: &[usize],
    j: &SetPartition,
    n: usize,
    opts: &NormOptions,
) -> Result<IndicatorCheck> {
    let shape = sequence_shape(h, seq, j)?;
    let t = indicator_tensor(h, seq, n)?;
    let lhs = norm_j(&t, j, opts)?;
    let nf = n as f64;
    let rhs = 2f64.powf(-(shape.s0 as f64) + shape.s_blocks as f64 / 2.0) * nf.powf(shape.singly_covered as f64 / 2.0);
    let v0 = shape.singly_covered as f64;
    let lower = 2f64.powf(-v0) * nf.powf(v0 / 2.0);
    Ok(IndicatorCheck { lhs, rhs, lower, shape })
}

/// Edge-sequence upper bound on `‖E D^d X_H‖_J` and the shape used in the cycle
/// tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleNormBound {
    /// `p^{e(H)-d} Σ_e 2^{Σ_r s(H_r)/2} n^{k - v(H_0) + #singly/2}` for `X_H`.
    pub sequence_sum: f64,
    /// The same bound for `Y_H = X_H / #Aut(H)`.
    pub per_copy: f64,
    /// `n^{k/2}` when `d = k` and `J = {[k]}`, else `p^{k-d} n^{k-d/2-l/2}`.
    pub shape: f64,
}

/// Edge-sequence bound for any pattern graph; only cycles carry the shape term.
pub fn subgraph_norm_bound(h: &GraphSpec, d: usize, j: &SetPartition, n: usize, p: f64) -> Result<f64> {
    if d == 0 || d > h.num_edges() {
        return Err(domain(format!("derivative order d = {d} must lie in [1, e(H)]")));
    }
    if j.order() != d {
        return Err(domain("partition order must equal d"));
    }
    let nf = n as f64;
    let k = h.k as f64;
    let mut sum = 0.0;
    for_each_injection(h.num_edges(), d, &mut |seq| {
        let s = sequence_shape(h, seq, j).expect("valid sequence");
        sum += 2f64.powf(s.s_blocks as f64 / 2.0) * nf.powf(k - s.vertices as f64 + s.singly_covered as f64 / 2.0);
    });
    Ok(p.powi((h.num_edges() - d) as i32) * sum)
}

pub fn cycle_norm_bound(h: &GraphSpec, d: usize, j: &SetPartition, n: usize, p: f64) -> Result<CycleNormBound> {
    if !h.is_cycle() {
        return Err(Error::Unsupported("cycle norm bounds need a cycle; use subgraph_norm_bound".into()));
    }
    let sequence_sum = subgraph_norm_bound(h, d, j, n, p)?;
    let k = h.k;
    let l = j.num_blocks();
    let nf = n as f64;
    let shape = if d == k && l == 1 {
        nf.powf(k as f64 / 2.0)
    } else {
        p.powi((k - d) as i32) * nf.powf(k as f64 - d as f64 / 2.0 - l as f64 / 2.0)
    };
    Ok(CycleNormBound { sequence_sum, per_copy: sequence_sum / h.aut_size()? as f64, shape })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_validation() {
        assert!(GraphSpec::new(3, vec![(0, 1), (1, 1)]).is_err());
        assert!(GraphSpec::new(3, vec![(0, 1), (1, 0)]).is_err());
        assert!(GraphSpec::new(3, vec![(0, 1)]).is_err());
        assert!(GraphSpec::cycle(4).unwrap().is_cycle());
        assert_eq!(GraphSpec::clique(3).unwrap().aut_size().unwrap(), 6);
        assert_eq!(GraphSpec::cycle(5).unwrap().aut_size().unwrap(), 10);
        let path = GraphSpec::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.aut_size().unwrap(), 2);
        let g = GraphSpec::from_json(r#"{"k":3,"edges":[[1,2],[2,3],[1,3]]}"#).unwrap();
        assert_eq!(g.kind(), &GraphKind::Clique);
    }

    #[test]
    fn edge_index_round_trip() {
        let idx = EdgeIndex::new(7);
        for pos in 0..idx.len() {
            let (u, v) = idx.pair(pos);
            assert!(u < v);
            assert_eq!(idx.pos(u, v), pos);
            assert_eq!(idx.pos(v, u), pos);
        }
    }

    #[test]
    fn counting_polynomial_examples() {
        let k3 = GraphSpec::clique(3).unwrap();
        let f = counting_polynomial(&k3, 3).unwrap();
        assert_eq!(f.num_terms(), 1);
        assert_eq!(f.terms().next().unwrap().1, 6.0);
        let edge = GraphSpec::clique(2).unwrap();
        let g = counting_polynomial(&edge, 3).unwrap();
        assert_eq!(g, Polynomial::linear(&[2.0, 2.0, 2.0]));
        let f5 = counting_polynomial(&k3, 5).unwrap();
        assert_eq!(f5.evaluate(&[1.0; 10]).unwrap(), 60.0);
    }

    #[test]
    fn triangle_closed_forms() {
        let t = triangle_norms_exact(6, 0.5).unwrap();
        assert!((t.d1 - 15f64.sqrt()).abs() < 1e-12);
        assert!((t.d2_operator - 4.0).abs() < 1e-12);
        assert!((t.d3_frobenius - 120f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sequence_shapes() {
        let k3 = GraphSpec::clique(3).unwrap();
        let one: SetPartition = "1".parse().unwrap();
        let s = sequence_shape(&k3, &[0], &one).unwrap();
        assert_eq!((s.vertices, s.s0, s.s_blocks, s.singly_covered), (2, 1, 1, 2));
        let split: SetPartition = "1|2".parse().unwrap();
        let s = sequence_shape(&k3, &[0, 1], &split).unwrap();
        assert_eq!((s.vertices, s.s0, s.s_blocks, s.singly_covered), (3, 0, 2, 2));
    }

    #[test]
    fn cycle_bound_full_block() {
        let c4 = GraphSpec::cycle(4).unwrap();
        let j = SetPartition::single_block(4);
        let b = cycle_norm_bound(&c4, 4, &j, 10, 0.3).unwrap();
        assert!((b.shape - 100.0).abs() < 1e-9);
        assert!(cycle_norm_bound(&GraphSpec::clique(4).unwrap(), 2, &"1|2".parse().unwrap(), 10, 0.3).is_err());
    }
}
