//! Dense order-`d` tensors with all axes of length `m`.
//!
//! Layout is row-major with the last index fastest, so the flat offset of
//! `(i_1, .., i_d)` is `Σ_k i_k m^{d-1-k}`. The JSON file format stores the
//! flat array in exactly this order.

use serde::{Deserialize, Serialize};

use crate::error::{domain, shape, Error, Result};
use crate::partitions::SetPartition;

/// Hard cap on `m^d`.
pub const MAX_ENTRIES: usize = 4_000_000;

/// Largest supported order.
pub const MAX_TENSOR_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    values: Vec<f64>,
}

/// Number of entries of an order-`order` tensor with axis length `dim`,
/// checked against [`MAX_ENTRIES`].
pub fn checked_len(order: usize, dim: usize) -> Result<usize> {
    if order == 0 || order > MAX_TENSOR_ORDER {
        return Err(domain(format!("tensor order {order} outside [1,{MAX_TENSOR_ORDER}]")));
    }
    if dim == 0 {
        return Err(domain("tensor dimension must be positive"));
    }
    let mut len: usize = 1;
    for _ in 0..order {
        len = len
            .checked_mul(dim)
            .filter(|&l| l <= MAX_ENTRIES)
            .ok_or_else(|| Error::Cap(format!("{dim}^{order} entries exceeds the cap of {MAX_ENTRIES}")))?;
    }
    Ok(len)
}

impl Tensor {
    pub fn new(order: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        let len = checked_len(order, dim)?;
        if values.len() != len {
            return Err(shape(format!(
                "order {order}, dim {dim} needs {len} values, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidTensor(format!("non-finite entry at flat offset {pos}")));
        }
        Ok(Self { order, dim, values })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = checked_len(order, dim)?;
        Ok(Self { order, dim, values: vec![0.0; len] })
    }

    pub fn filled(order: usize, dim: usize, value: f64) -> Result<Self> {
        let mut t = Self::zeros(order, dim)?;
        t.values.fill(value);
        Ok(t)
    }

    /// The order-`order` diagonal tensor with `diag[i]` at `(i, .., i)`.
    pub fn diagonal(order: usize, diag: &[f64]) -> Result<Self> {
        let mut t = Self::zeros(order, diag.len())?;
        for (i, &v) in diag.iter().enumerate() {
            let idx = vec![i; order];
            let off = t.offset(&idx);
            t.values[off] = v;
        }
        Ok(t)
    }

    /// The `m × m` identity as an order-2 tensor.
    pub fn identity(dim: usize) -> Result<Self> {
        Self::diagonal(2, &vec![1.0; dim])
    }

    /// Builds a tensor entry by entry from its multi-index.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = checked_len(order, dim)?;
        let mut values = Vec::with_capacity(len);
        let mut idx = vec![0usize; order];
        for _ in 0..len {
            values.push(f(&idx));
            advance(&mut idx, dim);
        }
        Self::new(order, dim, values)
    }

    /// Outer product `v_1 ⊗ .. ⊗ v_d`.
    pub fn outer(vectors: &[Vec<f64>]) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(shape("outer product factors must share one length"));
        }
        Self::from_fn(vectors.len(), dim, |idx| idx.iter().zip(vectors).map(|(&i, v)| v[i]).product())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let off = self.offset(idx);
        self.values[off] = v;
    }

    /// Multi-index of a flat offset.
    pub fn index_of(&self, mut off: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for k in (0..self.order).rev() {
            idx[k] = off % self.dim;
            off /= self.dim;
        }
        idx
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Tensor {
        Tensor { order: self.order, dim: self.dim, values: self.values.iter().map(|v| v * c).collect() }
    }

    fn check_same_shape(&self, other: &Tensor) -> Result<()> {
        if self.order != other.order || self.dim != other.dim {
            return Err(shape(format!(
                "tensor shapes differ: order {} dim {} vs order {} dim {}",
                self.order, self.dim, other.order, other.dim
            )));
        }
        Ok(())
    }

    /// Entrywise linear combination `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &Tensor, b: f64) -> Result<Tensor> {
        self.check_same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Tensor { order: self.order, dim: self.dim, values })
    }

    /// Tensor with axes relabelled: axis `k` of `self` becomes axis `perm[k]`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<Tensor> {
        if perm.len() != self.order {
            return Err(shape("permutation length must equal the tensor order"));
        }
        let mut seen = vec![false; self.order];
        for &p in perm {
            if p >= self.order || std::mem::replace(&mut seen[p], true) {
                return Err(domain("not a permutation"));
            }
        }
        let mut out = Tensor::zeros(self.order, self.dim)?;
        let mut idx = vec![0usize; self.order];
        let mut target = vec![0usize; self.order];
        for &v in &self.values {
            for (k, &p) in perm.iter().enumerate() {
                target[p] = idx[k];
            }
            out.set(&target, v);
            advance(&mut idx, self.dim);
        }
        Ok(out)
    }

    /// Average over all axis permutations.
    pub fn symmetrize(&self) -> Tensor {
        let perms = permutations(self.order);
        let mut acc = vec![0.0; self.values.len()];
        for perm in &perms {
            let p = self.permute_axes(perm).expect("valid permutation");
            for (a, v) in acc.iter_mut().zip(p.values) {
                *a += v;
            }
        }
        let c = 1.0 / perms.len() as f64;
        Tensor { order: self.order, dim: self.dim, values: acc.into_iter().map(|v| v * c).collect() }
    }

    /// Largest deviation from symmetry under adjacent transpositions (which
    /// generate the symmetric group).
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.order.saturating_sub(1) {
            let mut perm: Vec<usize> = (0..self.order).collect();
            perm.swap(k, k + 1);
            let p = self.permute_axes(&perm).expect("valid permutation");
            for (a, b) in self.values.iter().zip(&p.values) {
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    /// Parses the JSON file format `{"order": d, "dim": m, "values": [..]}`.
    pub fn from_json(text: &str) -> Result<Tensor> {
        let file: TensorFile = serde_json::from_str(text)?;
        Tensor::new(file.order, file.dim, file.values)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TensorFile { order: self.order, dim: self.dim, values: self.values.clone() })
            .expect("tensor serialization")
    }
}

#[derive(Serialize, Deserialize)]
struct TensorFile {
    order: usize,
    dim: usize,
    values: Vec<f64>,
}

/// Odometer increment of a multi-index, last digit fastest.
pub(crate) fn advance(idx: &mut [usize], dim: usize) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dim {
            return;
        }
        idx[k] = 0;
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

pub fn hadamard(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    a.check_same_shape(b)?;
    let values = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
    Ok(Tensor { order: a.order, dim: a.dim, values })
}

/// `A ∘ (v_1 ⊗ .. ⊗ v_d)`.
pub fn hadamard_rank_one(a: &Tensor, vectors: &[Vec<f64>]) -> Result<Tensor> {
    if vectors.len() != a.order {
        return Err(shape(format!("expected {} multiplier vectors, got {}", a.order, vectors.len())));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != a.dim) {
        return Err(shape(format!("multiplier of length {} for dimension {}", v.len(), a.dim)));
    }
    let mut out = a.clone();
    let mut idx = vec![0usize; a.order];
    for v in out.values.iter_mut() {
        *v *= idx.iter().zip(vectors).map(|(&i, w)| w[i]).product::<f64>();
        advance(&mut idx, a.dim);
    }
    Ok(out)
}

/// Index-set selectors for masking tensors.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexMask {
    /// `{i : i_k = i_l for all k, l ∈ K}`, with `#K ≥ 2`.
    GeneralizedDiagonal(Vec<usize>),
    /// `L(K)`: indices whose coordinate-equality pattern is exactly `K`.
    LevelSet(SetPartition),
    /// All coordinates pairwise distinct.
    OffDiagonal,
}

impl IndexMask {
    fn validate(&self, order: usize) -> Result<()> {
        match self {
            IndexMask::GeneralizedDiagonal(k) => {
                let mut sorted = k.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() < 2 || sorted.len() != k.len() {
                    return Err(domain("a generalized diagonal needs at least two distinct positions"));
                }
                if sorted.iter().any(|&p| p >= order) {
                    return Err(domain(format!("diagonal position outside [1,{order}]")));
                }
            }
            IndexMask::LevelSet(p) => {
                if p.order() != order {
                    return Err(domain(format!(
                        "level-set partition of order {} for a tensor of order {order}",
                        p.order()
                    )));
                }
            }
            IndexMask::OffDiagonal => {}
        }
        Ok(())
    }

    /// Whether the multi-index is kept.
    pub fn contains(&self, idx: &[usize]) -> bool {
        match self {
            IndexMask::GeneralizedDiagonal(k) => k.iter().all(|&p| idx[p] == idx[k[0]]),
            IndexMask::LevelSet(part) => {
                let owner = part.block_of();
                (0..idx.len()).all(|a| (a + 1..idx.len()).all(|b| (idx[a] == idx[b]) == (owner[a] == owner[b])))
            }
            IndexMask::OffDiagonal => (0..idx.len()).all(|a| (a + 1..idx.len()).all(|b| idx[a] != idx[b])),
        }
    }
}

/// `A ∘ 1_C` for the index set `C` selected by `mask`.
pub fn apply_mask(a: &Tensor, mask: &IndexMask) -> Result<Tensor> {
    mask.validate(a.order)?;
    let mut out = a.clone();
    let mut idx = vec![0usize; a.order];
    for v in out.values.iter_mut() {
        if !mask.contains(&idx) {
            *v = 0.0;
        }
        advance(&mut idx, a.dim);
    }
    Ok(out)
}

/// Per-block flat offsets of every tensor entry.
///
/// For block `l` with positions `J_l = (k_1 < .. < k_s)` the block vector is
/// indexed row-major by `(i_{k_1}, .., i_{k_s})`.
#[derive(Debug, Clone)]
pub(crate) struct BlockLayout {
    pub block_lens: Vec<usize>,
    pub offsets: Vec<Vec<u32>>,
}

impl BlockLayout {
    pub fn new(order: usize, dim: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let len = checked_len(order, dim)?;
        let block_lens: Vec<usize> = blocks.iter().map(|b| dim.pow(b.len() as u32)).collect();
        // stride of axis k inside its block
        let mut axis_block = vec![usize::MAX; order];
        let mut axis_stride = vec![0usize; order];
        for (l, block) in blocks.iter().enumerate() {
            let mut stride = 1;
            for &k in block.iter().rev() {
                axis_block[k] = l;
                axis_stride[k] = stride;
                stride *= dim;
            }
        }
        let mut offsets = vec![Vec::with_capacity(len); blocks.len()];
        let mut idx = vec![0usize; order];
        let mut cur = vec![0usize; blocks.len()];
        for _ in 0..len {
            for (l, off) in offsets.iter_mut().enumerate() {
                off.push(cur[l] as u32);
            }
            // odometer step that keeps block offsets in sync
            for k in (0..order).rev() {
                let l = axis_block[k];
                idx[k] += 1;
                if idx[k] < dim {
                    cur[l] += axis_stride[k];
                    break;
                }
                cur[l] -= (dim - 1) * axis_stride[k];
                idx[k] = 0;
            }
        }
        Ok(Self { block_lens, offsets })
    }
}

fn check_block_vectors(a: &Tensor, blocks: &[Vec<usize>], xs: &[Vec<f64>]) -> Result<()> {
    if xs.len() != blocks.len() {
        return Err(shape(format!("{} block vectors for {} blocks", xs.len(), blocks.len())));
    }
    for (l, (x, b)) in xs.iter().zip(blocks).enumerate() {
        let want = a.dim.pow(b.len() as u32);
        if x.len() != want {
            return Err(shape(format!("block {} vector has length {}, expected {want}", l + 1, x.len())));
        }
    }
    Ok(())
}

/// The multilinear form `Σ_i a_i Π_l x^{(l)}_{i_{J_l}}`.
pub fn contract(a: &Tensor, partition: &SetPartition, xs: &[Vec<f64>]) -> Result<f64> {
    if partition.order() != a.order {
        return Err(shape(format!("partition of order {} for tensor of order {}", partition.order(), a.order)));
    }
    contract_blocks(a, partition.blocks(), xs)
}

/// Same as [`contract`] for any block list covering `[d]` (used by the mixed
/// norms, whose block list mixes two kinds of constraints).
pub(crate) fn contract_blocks(a: &Tensor, blocks: &[Vec<usize>], xs: &[Vec<f64>]) -> Result<f64> {
    check_block_vectors(a, blocks, xs)?;
    let mut sum = 0.0;
    let mut idx = vec![0usize; a.order];
    for &v in &a.values {
        if v != 0.0 {
            let mut prod = v;
            for (b, x) in blocks.iter().zip(xs) {
                let off = b.iter().fold(0, |acc, &k| acc * a.dim + idx[k]);
                prod *= x[off];
            }
            sum += prod;
        }
        advance(&mut idx, a.dim);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_partitions;

    fn t(order: usize, dim: usize, v: &[f64]) -> Tensor {
        Tensor::new(order, dim, v.to_vec()).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(Tensor::new(2, 2, vec![1.0; 3]).is_err());
        assert!(matches!(Tensor::new(2, 2, vec![1.0, f64::NAN, 0.0, 0.0]), Err(Error::InvalidTensor(_))));
        assert!(matches!(Tensor::zeros(3, 200), Err(Error::Cap(_))));
        assert!(Tensor::zeros(7, 2).is_err());
        assert!(Tensor::zeros(3, 66).is_ok());
    }

    #[test]
    fn hadamard_examples() {
        let a = t(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(hadamard(&a, &Tensor::filled(2, 2, 1.0).unwrap()).unwrap(), a);
        assert!(hadamard(&a, &Tensor::zeros(2, 2).unwrap()).unwrap().is_zero());
        assert_eq!(hadamard(&a, &a).unwrap().values(), &[1.0, 4.0, 9.0, 16.0]);
        assert!(hadamard(&a, &Tensor::zeros(2, 3).unwrap()).is_err());
    }

    #[test]
    fn rank_one_examples() {
        let a = t(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let ones = vec![vec![1.0; 2]; 2];
        assert_eq!(hadamard_rank_one(&a, &ones).unwrap(), a);
        let id = Tensor::identity(2).unwrap();
        let out = hadamard_rank_one(&id, &[vec![2.0, 2.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(out.values(), &[2.0, 0.0, 0.0, 0.0]);
        let out = hadamard_rank_one(&a, &[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(out.is_zero());
        assert!(hadamard_rank_one(&a, &[vec![1.0; 3], vec![1.0; 2]]).is_err());
    }

    #[test]
    fn mask_examples() {
        let ones = Tensor::filled(2, 3, 1.0).unwrap();
        let diag = apply_mask(&ones, &IndexMask::GeneralizedDiagonal(vec![0, 1])).unwrap();
        assert_eq!(diag, Tensor::identity(3).unwrap());
        let off = apply_mask(&ones, &IndexMask::LevelSet(SetPartition::singletons(2))).unwrap();
        assert_eq!(off.values().iter().sum::<f64>(), 6.0);
        assert!((0..3).all(|i| off.get(&[i, i]) == 0.0));
        let ones3 = Tensor::filled(3, 2, 1.0).unwrap();
        let ls = apply_mask(&ones3, &IndexMask::LevelSet(SetPartition::single_block(3))).unwrap();
        assert_eq!(ls.values().iter().filter(|&&v| v != 0.0).count(), 2);
        assert!(apply_mask(&ones, &IndexMask::GeneralizedDiagonal(vec![0])).is_err());
        assert!(apply_mask(&ones, &IndexMask::GeneralizedDiagonal(vec![0, 2])).is_err());
    }

    #[test]
    fn masks_idempotent_and_level_sets_partition() {
        let a = Tensor::from_fn(3, 3, |i| (i[0] * 9 + i[1] * 3 + i[2]) as f64 - 13.0).unwrap();
        let mut total = Tensor::zeros(3, 3).unwrap();
        for k in enumerate_partitions(3).unwrap() {
            let mask = IndexMask::LevelSet(k);
            let once = apply_mask(&a, &mask).unwrap();
            assert_eq!(apply_mask(&once, &mask).unwrap(), once);
            total = total.axpby(1.0, &once, 1.0).unwrap();
        }
        assert_eq!(total, a);
        for mask in [IndexMask::OffDiagonal, IndexMask::GeneralizedDiagonal(vec![0, 2])] {
            let once = apply_mask(&a, &mask).unwrap();
            assert_eq!(apply_mask(&once, &mask).unwrap(), once);
        }
    }

    #[test]
    fn contract_examples() {
        let id = Tensor::identity(2).unwrap();
        let v = contract(&id, &SetPartition::singletons(2), &[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(v, 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = contract(&id, &SetPartition::single_block(2), &[vec![s, 0.0, 0.0, s]]).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        let a = t(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let v = contract(&a, &SetPartition::singletons(2), &[vec![0.0, 0.0], vec![1.0, 5.0]]).unwrap();
        assert_eq!(v, 0.0);
        assert!(contract(&a, &SetPartition::singletons(2), &[vec![1.0; 3], vec![1.0; 2]]).is_err());
    }

    #[test]
    fn contract_block_ordering() {
        // block {1,3} of an order-3 tensor is indexed by (i_1, i_3)
        let a = Tensor::from_fn(3, 2, |i| if i == [1, 0, 1] { 1.0 } else { 0.0 }).unwrap();
        let p: SetPartition = "1,3|2".parse().unwrap();
        let mut x = vec![0.0; 4];
        x[3] = 1.0;
        assert_eq!(contract(&a, &p, &[x, vec![1.0, 0.0]]).unwrap(), 1.0);
    }

    #[test]
    fn layout_matches_direct_offsets() {
        let p: SetPartition = "1,3|2,4".parse().unwrap();
        let layout = BlockLayout::new(4, 3, p.blocks()).unwrap();
        let a = Tensor::zeros(4, 3).unwrap();
        for off in 0..a.len() {
            let idx = a.index_of(off);
            assert_eq!(layout.offsets[0][off] as usize, idx[0] * 3 + idx[2]);
            assert_eq!(layout.offsets[1][off] as usize, idx[1] * 3 + idx[3]);
        }
    }

    #[test]
    fn symmetrize_and_permute() {
        let a = Tensor::from_fn(3, 2, |i| (i[0] + 2 * i[1] + 5 * i[2]) as f64).unwrap();
        assert!(!a.is_symmetric(1e-12));
        let s = a.symmetrize();
        assert!(s.is_symmetric(1e-12));
        assert!(s.symmetrize().axpby(1.0, &s, -1.0).unwrap().max_abs() < 1e-12);
        let p = a.permute_axes(&[2, 0, 1]).unwrap();
        assert_eq!(p.get(&[0, 1, 0]), a.get(&[0, 0, 1]));
    }

    #[test]
    fn json_round_trip_rejects_nan() {
        let a = t(2, 2, &[1.0, 2.0, 3.0, 4.5]);
        assert_eq!(Tensor::from_json(&a.to_json()).unwrap(), a);
        assert!(Tensor::from_json(r#"{"order":1,"dim":2,"values":[1.0]}"#).is_err());
        assert!(Tensor::from_json(r#"{"order":1,"dim":1,"values":[NaN]}"#).is_err());
    }
}
