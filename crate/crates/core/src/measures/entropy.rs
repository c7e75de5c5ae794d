use std::collections::HashMap;
use std::hash::Hash;

use super::{tile_blocks, ComplexityScore, Measure};
use crate::bits::{BitString, Grid};
use crate::error::{Error, Result};

/// Total Shannon information of a block sequence: per-block entropy of the
/// empirical distribution times the number of blocks.
fn total_entropy<K: Hash + Eq>(blocks: impl IntoIterator<Item = K>) -> f64 {
    let mut freq: HashMap<K, usize> = HashMap::new();
    let mut n = 0usize;
    for b in blocks {
        *freq.entry(b).or_default() += 1;
        n += 1;
    }
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let per_block: f64 = freq
        .values()
        .map(|&c| {
            let p = c as f64 / nf;
            -p * p.log2()
        })
        .sum();
    per_block.max(0.0) * nf
}

/// Entropy over non-overlapping blocks of `block_len` bits; the trailing
/// remainder is dropped. Inputs shorter than one block score 0 with a warning.
pub fn block_entropy(x: &BitString, block_len: usize) -> Result<ComplexityScore> {
    if block_len == 0 {
        return Err(Error::InvalidArgument(
            "block length must be positive".into(),
        ));
    }
    let blocks = x.len() / block_len;
    let scored = blocks * block_len;
    let mut score = ComplexityScore::new(
        Measure::BlockEntropy,
        total_entropy(x.bits()[..scored].chunks_exact(block_len)),
        scored,
        x.len() - scored,
    );
    if blocks == 0 {
        score.warning = Some(format!(
            "input of {} bits is shorter than one {block_len}-bit block",
            x.len()
        ));
    }
    Ok(score)
}

/// Entropy over the same origin-aligned tiling BDM uses.
pub fn block_entropy_grid(g: &Grid, block_shape: &[usize]) -> Result<ComplexityScore> {
    let tiling = tile_blocks(g, block_shape)?;
    Ok(ComplexityScore::new(
        Measure::BlockEntropy,
        total_entropy(tiling.blocks.iter().copied()),
        tiling.blocks.len() * tiling.block_bits,
        tiling.dropped_bits,
    ))
}
