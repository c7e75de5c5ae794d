use std::collections::HashMap;

use super::{ComplexityScore, Measure};
use crate::bits::{BitString, Grid};
use crate::ctm::CtmTable;
use crate::error::{Error, Result};

/// Largest block the decomposition accepts, in bits.
pub const MAX_BLOCK_BITS: usize = 12;

/// Origin-aligned, non-overlapping tiling of a grid. Each block is packed
/// with its first cell (row-major within the block) most significant.
#[derive(Debug, Clone)]
pub struct Tiling {
    pub blocks: Vec<u64>,
    pub block_bits: usize,
    pub dropped_bits: usize,
}

pub fn tile_blocks(g: &Grid, block_shape: &[usize]) -> Result<Tiling> {
    let dims = g.dims();
    if block_shape.len() != dims.len() {
        return Err(Error::BlockShape(format!(
            "block shape {block_shape:?} does not match a {}-dimensional grid",
            dims.len()
        )));
    }
    if block_shape.contains(&0) {
        return Err(Error::BlockShape(format!(
            "zero extent in block shape {block_shape:?}"
        )));
    }
    if block_shape.iter().zip(dims).any(|(b, d)| b > d) {
        return Err(Error::BlockShape(format!(
            "block {block_shape:?} larger than grid {dims:?}"
        )));
    }
    let block_bits: usize = block_shape.iter().product();
    if block_bits > MAX_BLOCK_BITS {
        return Err(Error::BlockShape(format!(
            "block of {block_bits} bits exceeds the {MAX_BLOCK_BITS}-bit limit"
        )));
    }

    // pad to three axes so one loop nest serves every dimensionality
    let mut d = [1usize; 3];
    let mut b = [1usize; 3];
    d[..dims.len()].copy_from_slice(dims);
    b[..dims.len()].copy_from_slice(block_shape);
    let counts = [d[0] / b[0], d[1] / b[1], d[2] / b[2]];
    let data = g.data();

    let mut blocks = Vec::with_capacity(counts.iter().product());
    for bz in 0..counts[2] {
        for by in 0..counts[1] {
            for bx in 0..counts[0] {
                let mut key = 0u64;
                for z in bz * b[2]..(bz + 1) * b[2] {
                    for y in by * b[1]..(by + 1) * b[1] {
                        let row = d[0] * (y + d[1] * z);
                        for x in bx * b[0]..(bx + 1) * b[0] {
                            key = (key << 1) | data[row + x] as u64;
                        }
                    }
                }
                blocks.push(key);
            }
        }
    }
    let dropped_bits = g.len() - blocks.len() * block_bits;
    Ok(Tiling {
        blocks,
        block_bits,
        dropped_bits,
    })
}

/// Block Decomposition Method: each distinct block contributes its CTM value
/// plus `log2` of its multiplicity.
pub fn bdm(g: &Grid, block_shape: &[usize], table: &CtmTable) -> Result<ComplexityScore> {
    let tiling = tile_blocks(g, block_shape)?;
    let mut multiplicity: HashMap<u64, u64> = HashMap::new();
    for &key in &tiling.blocks {
        *multiplicity.entry(key).or_default() += 1;
    }
    let mut fallbacks = 0usize;
    let mut terms: Vec<f64> = multiplicity
        .iter()
        .map(|(&key, &count)| {
            let v = table.ctm_packed(tiling.block_bits as u8, key);
            fallbacks += v.fallback as usize;
            v.k_bits + (count as f64).log2()
        })
        .collect();
    // sum in value order: the total then depends only on the multiset of
    // terms, so symmetric inputs (complements, reorderings) agree exactly
    terms.sort_unstable_by(f64::total_cmp);
    let total: f64 = terms.iter().sum();
    let mut score = ComplexityScore::new(
        Measure::Bdm,
        total,
        tiling.blocks.len() * tiling.block_bits,
        tiling.dropped_bits,
    );
    score.fallback_fraction = Some(if terms.is_empty() {
        0.0
    } else {
        fallbacks as f64 / terms.len() as f64
    });
    Ok(score)
}

/// BDM of a bit string as a 1D grid with blocks of `block_len` bits.
pub fn bdm_bits(x: &BitString, block_len: usize, table: &CtmTable) -> Result<ComplexityScore> {
    if x.len() < block_len || x.is_empty() {
        return Err(Error::BlockShape(format!(
            "{block_len}-bit block larger than {}-bit string",
            x.len()
        )));
    }
    let g = Grid::from_bitstring(vec![x.len()], x)?;
    bdm(&g, &[block_len], table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctm::{build_table, MachineClass};

    fn table() -> CtmTable {
        build_table(&MachineClass::new(2, 50).unwrap(), 4).unwrap()
    }

    #[test]
    fn block_packing_is_row_major_within_block() {
        // 4x2 grid, block 2x2: first block covers cells (0,0),(1,0),(0,1),(1,1)
        let data = "1000"
            .chars()
            .chain("0100".chars())
            .map(|c| c == '1')
            .collect();
        let g = Grid::new(vec![4, 2], data).unwrap();
        let t = tile_blocks(&g, &[2, 2]).unwrap();
        assert_eq!(t.blocks, vec![0b1001, 0b0000]);
        assert_eq!(t.dropped_bits, 0);
    }

    #[test]
    fn partial_blocks_are_dropped() {
        let g = Grid::zeros(vec![5, 7]).unwrap();
        let t = tile_blocks(&g, &[2, 4]).unwrap();
        assert_eq!(t.blocks.len(), 2);
        assert_eq!(t.dropped_bits, 35 - 16);
    }

    #[test]
    fn oversized_blocks_rejected() {
        let g = Grid::zeros(vec![3, 3]).unwrap();
        assert!(matches!(
            tile_blocks(&g, &[2, 4]),
            Err(Error::BlockShape(_))
        ));
        assert!(matches!(tile_blocks(&g, &[2]), Err(Error::BlockShape(_))));
        let big = Grid::zeros(vec![16, 16]).unwrap();
        assert!(matches!(
            tile_blocks(&big, &[4, 4]),
            Err(Error::BlockShape(_))
        ));
    }

    #[test]
    fn single_block_grid_scores_its_ctm_value() {
        let t = table();
        let x: BitString = "0110".parse().unwrap();
        let g = Grid::from_bitstring(vec![2, 2], &x).unwrap();
        let s = bdm(&g, &[2, 2], &t).unwrap();
        assert_eq!(s.value, t.ctm_value(&x).unwrap().k_bits);
    }

    #[test]
    fn uniform_grid_adds_log_multiplicity() {
        let t = table();
        let g = Grid::zeros(vec![16, 16]).unwrap();
        let s = bdm(&g, &[2, 4], &t).unwrap();
        let k = t.ctm_value(&BitString::zeros(8)).unwrap().k_bits;
        assert!((s.value - (k + 32f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn short_string_rejected() {
        let t = table();
        assert!(bdm_bits(&"0101".parse().unwrap(), 8, &t).is_err());
        assert!(bdm_bits(&BitString::new(), 8, &t).is_err());
    }
}
