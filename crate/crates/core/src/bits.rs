//! Bit strings and n-dimensional bit grids.
//!
//! Flattening is row-major with the first dimension as the width (fastest
//! varying axis): cell `(x, y, z)` of a grid with dims `(w, h, d)` lives at
//! flat index `x + w * (y + h * z)`. Every module uses this convention.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite sequence of bits.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| !b).collect())
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &BitString) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        Some(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }

    /// Packs bits MSB-first into bytes. The last byte is zero-padded; the
    /// number of padding bits is returned alongside.
    pub fn to_bytes(&self) -> (Vec<u8>, usize) {
        let mut out = vec![0u8; self.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            if b {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        let pad = out.len() * 8 - self.len();
        (out, pad)
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(len <= bytes.len() * 8);
        Self(
            (0..len)
                .map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0)
                .collect(),
        )
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses a string of `0`/`1` characters. Whitespace is not accepted here;
    /// see [`crate::codec::parse_bits`] for the lenient file format.
    fn from_str(s: &str) -> Result<Self> {
        s.bytes()
            .enumerate()
            .map(|(i, c)| match c {
                b'0' => Ok(false),
                b'1' => Ok(true),
                _ => Err(Error::Parse {
                    offset: i,
                    msg: format!("unexpected character {:?} in bit string", c as char),
                }),
            })
            .collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

/// An n-dimensional bit array (1 to 3 dimensions).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    dims: Vec<usize>,
    data: Vec<bool>,
}

pub const MAX_DIMS: usize = 3;

impl Grid {
    pub fn new(dims: Vec<usize>, data: Vec<bool>) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_DIMS {
            return Err(Error::Dimension(format!(
                "grids support 1 to {MAX_DIMS} dimensions, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Dimension(format!(
                "zero-length dimension in {dims:?}"
            )));
        }
        let expected: usize = dims.iter().product();
        if expected != data.len() {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need {expected} cells, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let n = dims.iter().product();
        Self::new(dims, vec![false; n])
    }

    pub fn from_bitstring(dims: Vec<usize>, bits: &BitString) -> Result<Self> {
        Self::new(dims, bits.bits().to_vec())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn to_bitstring(&self) -> BitString {
        BitString(self.data.clone())
    }

    /// Flat index of a coordinate. Missing trailing coordinates are taken as 0.
    pub fn index(&self, coord: &[usize]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (axis, &d) in self.dims.iter().enumerate() {
            let c = coord.get(axis).copied().unwrap_or(0);
            debug_assert!(c < d);
            idx += c * stride;
            stride *= d;
        }
        idx
    }

    pub fn get(&self, coord: &[usize]) -> bool {
        self.data[self.index(coord)]
    }

    pub fn set(&mut self, coord: &[usize], value: bool) {
        let i = self.index(coord);
        self.data[i] = value;
    }

    pub fn complement(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.iter().map(|b| !b).collect(),
        }
    }

    /// Builds a new grid whose cell at `coord` (in the output dims) is taken
    /// from `self` at `source(coord)`.
    pub(crate) fn remap(&self, dims: Vec<usize>, source: impl Fn(&[usize]) -> Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        let mut data = Vec::with_capacity(n);
        let mut coord = vec![0usize; dims.len()];
        for _ in 0..n {
            data.push(self.get(&source(&coord)));
            for (axis, c) in coord.iter_mut().enumerate() {
                *c += 1;
                if *c < dims[axis] {
                    break;
                }
                *c = 0;
            }
        }
        Self { dims, data }
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Grid({:?}, {} ones)",
            self.dims,
            self.data.iter().filter(|&&b| b).count()
        )
    }
}

/// Formats dims as `23x73`.
pub fn format_dims(dims: &[usize]) -> String {
    dims.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

/// Parses dims written as `2x4` or `2x2x2`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(['x', 'X'])
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::InvalidArgument(format!("bad dimension list {s:?}")))
        })
        .collect()
}
