//! Set partitions of `[d]` and the `(I, J, K)` split families used by the
//! mixed norms.
//!
//! Positions are stored 0-based; the text form (`"1,2|3"`) and the JSON form
//! (`[[1,2],[3]]`) are 1-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest order for which partitions are enumerated.
pub const MAX_ORDER: usize = 6;

/// Largest order supported by the split families of the mixed norms.
pub const MAX_SPLIT_ORDER: usize = 3;

/// A partition of `{0, .., d-1}` into nonempty blocks, kept canonical:
/// blocks sorted by their minimum, indices ascending within a block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    d: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition from 0-based blocks and canonicalizes it.
    pub fn new(d: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; d];
        for block in &blocks {
            if block.is_empty() {
                return Err(domain("partition blocks must be nonempty"));
            }
            for &k in block {
                if k >= d {
                    return Err(domain(format!("index {} outside [1,{d}]", k + 1)));
                }
                if seen[k] {
                    return Err(domain(format!("index {} appears in two blocks", k + 1)));
                }
                seen[k] = true;
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(domain(format!("index {} is not covered by any block", k + 1)));
        }
        Ok(Self::canonical(d, blocks))
    }

    /// The one-block partition `{[d]}`.
    pub fn single_block(d: usize) -> Self {
        Self { d, blocks: vec![(0..d).collect()] }
    }

    /// The partition into singletons `{1}{2}..{d}`.
    pub fn singletons(d: usize) -> Self {
        Self { d, blocks: (0..d).map(|k| vec![k]).collect() }
    }

    /// Builds the partition whose blocks are the level sets of a
    /// restricted-growth string.
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let nblocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (pos, &b) in rgs.iter().enumerate() {
            blocks[b].push(pos);
        }
        Self { d: rgs.len(), blocks }
    }

    fn canonical(d: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        Self { d, blocks }
    }

    /// Re-sorts blocks and indices. Outputs of this module are already
    /// canonical, so this is the identity on them.
    pub fn canonicalize(&self) -> Self {
        Self::canonical(self.d, self.blocks.clone())
    }

    pub fn order(&self) -> usize {
        self.d
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index of every position.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for (b, block) in self.blocks.iter().enumerate() {
            for &k in block {
                out[k] = b;
            }
        }
        out
    }

    /// True when every block of `self` lies inside some block of `other`.
    pub fn refines(&self, other: &SetPartition) -> bool {
        if self.d != other.d {
            return false;
        }
        let owner = other.block_of();
        self.blocks.iter().all(|b| b.iter().all(|&k| owner[k] == owner[b[0]]))
    }

    /// Relabels positions: position `k` becomes `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let blocks = self.blocks.iter().map(|b| b.iter().map(|&k| perm[k]).collect()).collect();
        Self::canonical(self.d, blocks)
    }

    /// 1-based blocks, the JSON form.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|k| k + 1).collect()).collect()
    }

    /// Parses 1-based JSON blocks such as `[[1,2],[3]]`.
    pub fn from_one_based(d: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut zero = Vec::with_capacity(blocks.len());
        for b in blocks {
            let mut out = Vec::with_capacity(b.len());
            for &k in b {
                if k == 0 {
                    return Err(domain("partition indices are 1-based"));
                }
                out.push(k - 1);
            }
            zero.push(out);
        }
        Self::new(d, zero)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_blocks(f, &self.blocks)
    }
}

fn write_blocks(f: &mut fmt::Formatter<'_>, blocks: &[Vec<usize>]) -> fmt::Result {
    for (b, block) in blocks.iter().enumerate() {
        if b > 0 {
            f.write_str("|")?;
        }
        for (j, k) in block.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", k + 1)?;
        }
    }
    Ok(())
}

fn parse_blocks(s: &str) -> Result<Vec<Vec<usize>>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('|')
        .map(|block| {
            block
                .split(',')
                .map(|tok| {
                    let k: usize = tok
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad partition index {tok:?} in {s:?}")))?;
                    if k == 0 {
                        return Err(Error::Parse("partition indices are 1-based".into()));
                    }
                    Ok(k - 1)
                })
                .collect()
        })
        .collect()
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Parses `"1,2|3"`. The order is the largest index mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let blocks = parse_blocks(s)?;
        let d = blocks.iter().flatten().map(|k| k + 1).max().unwrap_or(0);
        if d == 0 {
            return Err(Error::Parse("empty partition".into()));
        }
        SetPartition::new(d, blocks)
    }
}

impl Serialize for SetPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(de)?;
        let d = blocks.iter().flatten().copied().max().unwrap_or(0);
        SetPartition::from_one_based(d, &blocks).map_err(serde::de::Error::custom)
    }
}

/// Visits all restricted-growth strings of length `d` in lexicographic order.
fn for_each_rgs(d: usize, mut visit: impl FnMut(&[usize])) {
    if d == 0 {
        visit(&[]);
        return;
    }
    let mut a = vec![0usize; d];
    // b[i] = 1 + max(a[0..i])
    let mut b = vec![1usize; d];
    loop {
        visit(&a);
        // rightmost position that can still grow
        let mut i = d - 1;
        loop {
            if i == 0 {
                return;
            }
            if a[i] < b[i] {
                break;
            }
            i -= 1;
        }
        a[i] += 1;
        for j in i + 1..d {
            a[j] = 0;
            b[j] = b[i].max(a[i] + 1);
        }
    }
}

/// Bell numbers `B_0..=B_6`.
pub const BELL: [usize; 7] = [1, 1, 2, 5, 15, 52, 203];

/// All partitions of `[d]` in restricted-growth-string order.
pub fn enumerate_partitions(d: usize) -> Result<Vec<SetPartition>> {
    if !(1..=MAX_ORDER).contains(&d) {
        return Err(domain(format!("partition order d = {d} outside [1,{MAX_ORDER}]")));
    }
    let mut out = Vec::with_capacity(BELL[d]);
    for_each_rgs(d, |rgs| out.push(SetPartition::from_rgs(rgs)));
    Ok(out)
}

/// Partitions of an arbitrary index set, relabelled from the RGS order over
/// the sorted elements. The empty set has exactly one (blockless) partition.
fn partitions_of(elems: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_rgs(elems.len(), |rgs| {
        let p = SetPartition::from_rgs(rgs);
        out.push(p.blocks.iter().map(|b| b.iter().map(|&k| elems[k]).collect()).collect());
    });
    out
}

/// A triple `(I, J ∈ P_I, K ∈ P_{[d]\I})`. `inner` carries the ℓ₂ blocks,
/// `outer` the ℓ_α(ℓ₂) blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitPartition {
    d: usize,
    inner: Vec<Vec<usize>>,
    outer: Vec<Vec<usize>>,
}

impl SplitPartition {
    pub fn new(d: usize, inner: Vec<Vec<usize>>, outer: Vec<Vec<usize>>) -> Result<Self> {
        let all: Vec<Vec<usize>> = inner.iter().chain(outer.iter()).cloned().collect();
        // validates coverage and disjointness of the union
        SetPartition::new(d, all)?;
        let canon = |mut v: Vec<Vec<usize>>| {
            for b in &mut v {
                b.sort_unstable();
            }
            v.sort_by_key(|b| b[0]);
            v
        };
        Ok(Self { d, inner: canon(inner), outer: canon(outer) })
    }

    pub fn order(&self) -> usize {
        self.d
    }

    pub fn inner(&self) -> &[Vec<usize>] {
        &self.inner
    }

    pub fn outer(&self) -> &[Vec<usize>] {
        &self.outer
    }

    /// `J ∪ K` as a partition of `[d]`.
    pub fn merged(&self) -> SetPartition {
        let all = self.inner.iter().chain(self.outer.iter()).cloned().collect();
        SetPartition::canonical(self.d, all)
    }

    /// Parses `"1|2||3"`: inner blocks, `||`, outer blocks. `d` is inferred
    /// from the largest index.
    pub fn parse(s: &str) -> Result<Self> {
        let (inner, outer) = s
            .split_once("||")
            .ok_or_else(|| Error::Parse(format!("split {s:?} must contain '||'")))?;
        let inner = parse_blocks(inner)?;
        let outer = parse_blocks(outer)?;
        let d = inner.iter().chain(outer.iter()).flatten().map(|k| k + 1).max().unwrap_or(0);
        if d == 0 {
            return Err(Error::Parse("empty split".into()));
        }
        Self::new(d, inner, outer)
    }
}

impl fmt::Display for SplitPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_blocks(f, &self.inner)?;
        f.write_str("||")?;
        write_blocks(f, &self.outer)
    }
}

/// All split triples of `[d]`, starting from `I = [d]` and walking subsets in
/// decreasing bitmask order.
pub fn enumerate_splits(d: usize) -> Result<Vec<SplitPartition>> {
    if d == 0 {
        return Err(domain("split order must be at least 1"));
    }
    if d > MAX_SPLIT_ORDER {
        return Err(Error::Unsupported(format!(
            "split families are only supported for d <= {MAX_SPLIT_ORDER} (got {d})"
        )));
    }
    let mut out = Vec::new();
    for mask in (0..1usize << d).rev() {
        let inner_set: Vec<usize> = (0..d).filter(|k| mask >> k & 1 == 1).collect();
        let outer_set: Vec<usize> = (0..d).filter(|k| mask >> k & 1 == 0).collect();
        for inner in partitions_of(&inner_set) {
            for outer in partitions_of(&outer_set) {
                out.push(SplitPartition { d, inner: inner.clone(), outer });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_counts() {
        for (d, &bell) in BELL.iter().enumerate().skip(1) {
            assert_eq!(enumerate_partitions(d).unwrap().len(), bell, "d = {d}");
        }
    }

    #[test]
    fn d1_and_d3() {
        let p1 = enumerate_partitions(1).unwrap();
        assert_eq!(p1.len(), 1);
        assert_eq!(p1[0].to_string(), "1");
        let p3: Vec<String> = enumerate_partitions(3).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(p3, ["1,2,3", "1,2|3", "1,3|2", "1|2,3", "1|2|3"]);
    }

    #[test]
    fn partitions_cover_exactly_and_are_canonical() {
        for d in 1..=6 {
            let all = enumerate_partitions(d).unwrap();
            let mut uniq = all.clone();
            uniq.sort();
            uniq.dedup();
            assert_eq!(uniq.len(), all.len());
            for p in &all {
                let mut seen: Vec<usize> = p.blocks().iter().flatten().copied().collect();
                seen.sort_unstable();
                assert_eq!(seen, (0..d).collect::<Vec<_>>());
                assert_eq!(&p.canonicalize(), p);
                assert_eq!(p.canonicalize().canonicalize(), p.canonicalize());
            }
        }
    }

    #[test]
    fn order_out_of_range() {
        assert!(matches!(enumerate_partitions(0), Err(Error::Domain(_))));
        assert!(matches!(enumerate_partitions(7), Err(Error::Domain(_))));
    }

    #[test]
    fn split_counts() {
        assert_eq!(enumerate_splits(1).unwrap().len(), 2);
        assert_eq!(enumerate_splits(2).unwrap().len(), 6);
        assert_eq!(enumerate_splits(3).unwrap().len(), 22);
        assert!(matches!(enumerate_splits(4), Err(Error::Unsupported(_))));
        let s1: Vec<String> = enumerate_splits(1).unwrap().iter().map(|s| s.to_string()).collect();
        assert_eq!(s1, ["1||", "||1"]);
    }

    #[test]
    fn splits_partition_the_order() {
        for d in 1..=3 {
            for s in enumerate_splits(d).unwrap() {
                let merged = s.merged();
                assert_eq!(merged.order(), d);
                assert_eq!(merged.num_blocks(), s.inner().len() + s.outer().len());
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let p: SetPartition = "3|1,2".parse().unwrap();
        assert_eq!(p.to_string(), "1,2|3");
        assert!("1,1|2".parse::<SetPartition>().is_err());
        assert!("1|3".parse::<SetPartition>().is_err());
        assert!("0|1".parse::<SetPartition>().is_err());
        let s = SplitPartition::parse("1|2||3").unwrap();
        assert_eq!(s.to_string(), "1|2||3");
        let s = SplitPartition::parse("||1,2").unwrap();
        assert!(s.inner().is_empty());
        assert_eq!(s.outer(), &[vec![0, 1]]);
        assert!(SplitPartition::parse("1|2").is_err());
    }

    #[test]
    fn json_form() {
        let p: SetPartition = serde_json::from_str("[[3],[1,2]]").unwrap();
        assert_eq!(p.to_string(), "1,2|3");
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[1,2],[3]]");
    }

    #[test]
    fn refinement() {
        let fine = SetPartition::singletons(3);
        let coarse: SetPartition = "1,2|3".parse().unwrap();
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert!(coarse.refines(&SetPartition::single_block(3)));
    }
}
