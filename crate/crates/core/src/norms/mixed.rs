//! Mixed norms `‖A‖_{J|K}` for entries with `exp(-t^α)` tails.
//!
//! Blocks of `K` carry the constraint `Σ_{i_s} ‖y_{i_s,·}‖₂^α ≤ 1` around a
//! distinguished coordinate `s ∈ K_l`; the norm sums the suprema over all
//! choices of distinguished coordinates.

use serde::Serialize;

use super::als::{best_of_restarts, Constraint};
use super::{norm_j, NormOptions};
use crate::error::{domain, shape, Error, Result};
use crate::partitions::{SplitPartition, MAX_SPLIT_ORDER};
use crate::tensor::{BlockLayout, Tensor};

/// Supremum for one choice of distinguished coordinates (1-based, one per
/// outer block).
#[derive(Debug, Clone, Serialize)]
pub struct MixedTerm {
    pub choice: Vec<usize>,
    pub value: f64,
}

pub fn mixed_norm(a: &Tensor, split: &SplitPartition, alpha: f64, opts: &NormOptions) -> Result<f64> {
    Ok(mixed_norm_terms(a, split, alpha, opts)?.iter().map(|t| t.value).sum())
}

/// Every term of the outer sum, enumerated exhaustively.
pub fn mixed_norm_terms(a: &Tensor, split: &SplitPartition, alpha: f64, opts: &NormOptions) -> Result<Vec<MixedTerm>> {
    if a.order() > MAX_SPLIT_ORDER {
        return Err(Error::Unsupported(format!("mixed norms are implemented for order ≤ {MAX_SPLIT_ORDER}")));
    }
    if !(1.0..=2.0).contains(&alpha) {
        return Err(domain(format!("alpha = {alpha} is outside [1, 2]")));
    }
    if split.order() != a.order() {
        return Err(shape(format!("split of order {} for tensor of order {}", split.order(), a.order())));
    }
    if split.outer().is_empty() {
        let value = norm_j(a, &split.merged(), opts)?.value;
        return Ok(vec![MixedTerm { choice: Vec::new(), value }]);
    }

    let mut blocks: Vec<(Vec<usize>, bool)> = split
        .inner()
        .iter()
        .map(|b| (b.clone(), false))
        .chain(split.outer().iter().map(|b| (b.clone(), true)))
        .collect();
    blocks.sort_by_key(|(b, _)| b[0]);
    let block_list: Vec<Vec<usize>> = blocks.iter().map(|(b, _)| b.clone()).collect();
    let layout = BlockLayout::new(a.order(), a.dim(), &block_list)?;

    let mut terms = Vec::new();
    for choice in choices(split.outer()) {
        let value = if a.is_zero() {
            0.0
        } else {
            let mut outer_pos = 0;
            let constraints: Vec<Constraint> = blocks
                .iter()
                .map(|(b, is_outer)| {
                    if !is_outer {
                        return Constraint::L2;
                    }
                    let s = choice[split.outer().iter().position(|o| o == b).expect("outer block")];
                    outer_pos += 1;
                    slice_constraint(b, s, a.dim(), alpha)
                })
                .collect();
            debug_assert_eq!(outer_pos, split.outer().len());
            let (best, _) =
                best_of_restarts(a, &layout, &constraints, opts.restarts.max(1), opts.seed, opts.tol, opts.max_sweeps);
            best.value
        };
        terms.push(MixedTerm { choice: choice.iter().map(|s| s + 1).collect(), value });
    }
    Ok(terms)
}

/// Cartesian product of the outer blocks.
fn choices(outer: &[Vec<usize>]) -> Vec<Vec<usize>> {
    outer.iter().fold(vec![Vec::new()], |acc, block| {
        acc.iter()
            .flat_map(|prefix| {
                block.iter().map(move |&s| {
                    let mut c = prefix.clone();
                    c.push(s);
                    c
                })
            })
            .collect()
    })
}

fn slice_constraint(block: &[usize], s: usize, dim: usize, alpha: f64) -> Constraint {
    let pos = block.iter().position(|&k| k == s).expect("distinguished coordinate lies in its block");
    let stride = dim.pow((block.len() - 1 - pos) as u32);
    let len = dim.pow(block.len() as u32);
    let slice_of = (0..len).map(|o| ((o / stride) % dim) as u32).collect();
    Constraint::MixedL2 { slice_of, slices: dim, alpha }
}
