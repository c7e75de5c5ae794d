//! Low-complexity perturbations of streams and grids, and perturbation
//! response curves.
//!
//! Randomness comes from ChaCha8 seeded with a 64-bit seed. Per-trial seeds
//! are derived as `mix64(seed ^ trial)`, where `mix64` is the SplitMix64
//! finalizer:
//!
//! ```text
//! z = x + 0x9E3779B97F4A7C15
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z ^ (z >> 31)
//! ```
//!
//! (all arithmetic wrapping mod 2^64).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{BitString, Grid};
use crate::error::{Error, Result};
use crate::measures::{Measure, Scorer};

pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, trial: u64) -> u64 {
    mix64(seed ^ trial)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Flips exactly `count` distinct positions. Positions come from a partial
/// Fisher-Yates shuffle, so for a fixed seed the positions flipped at count
/// `k` are a prefix of those flipped at any larger count.
pub fn flip_random(x: &BitString, count: usize, seed: u64) -> Result<BitString> {
    let n = x.len();
    if count > n {
        return Err(Error::InvalidArgument(format!(
            "cannot flip {count} of {n} bits"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng(seed);
    let mut bits = x.bits().to_vec();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        order.swap(i, j);
        bits[order[i]] ^= true;
    }
    Ok(BitString::from_bits(bits))
}

/// Number of flips for a rate in `[0, 1]`, rounded to nearest.
pub fn flip_count_for_rate(len: usize, rate: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidArgument(format!(
            "flip rate {rate} outside [0, 1]"
        )));
    }
    Ok((rate * len as f64).round() as usize)
}

/// Cuts `x` into consecutive `segment_len`-bit segments and shuffles them;
/// a trailing partial segment stays in place.
pub fn scramble_segments(x: &BitString, segment_len: usize, seed: u64) -> Result<BitString> {
    if segment_len == 0 || segment_len > x.len() {
        return Err(Error::InvalidArgument(format!(
            "segment length {segment_len} outside [1, {}]",
            x.len()
        )));
    }
    let full = x.len() / segment_len;
    let mut segments: Vec<&[bool]> = x.bits()[..full * segment_len]
        .chunks_exact(segment_len)
        .collect();
    segments.shuffle(&mut rng(seed));
    let mut out: Vec<bool> = segments.concat();
    out.extend_from_slice(&x.bits()[full * segment_len..]);
    Ok(BitString::from_bits(out))
}

pub fn complement(x: &BitString) -> BitString {
    x.complement()
}

/// Nearest-neighbour upscale: each cell becomes a `factors`-shaped block.
pub fn amplify(g: &Grid, factors: &[usize]) -> Result<Grid> {
    if factors.len() != g.ndim() {
        return Err(Error::Dimension(format!(
            "{} amplification factors for a {}-dimensional grid",
            factors.len(),
            g.ndim()
        )));
    }
    if factors.contains(&0) {
        return Err(Error::InvalidArgument(
            "amplification factors must be at least 1".into(),
        ));
    }
    let dims: Vec<usize> = g.dims().iter().zip(factors).map(|(d, f)| d * f).collect();
    Ok(g.remap(dims, |c| {
        c.iter().zip(factors).map(|(x, f)| x / f).collect()
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlipAmount {
    Count(usize),
    Rate(f64),
}

/// A perturbation applicable to a bit stream. `Amplify` needs the stream's
/// layout and is applied through [`Perturbation::apply_grid`].
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    FlipRandom(FlipAmount),
    ScrambleSegments { segment_len: usize },
    Complement,
    Amplify { factors: Vec<usize> },
}

impl Perturbation {
    pub fn apply(&self, x: &BitString, seed: u64) -> Result<BitString> {
        match self {
            Perturbation::FlipRandom(FlipAmount::Count(c)) => flip_random(x, *c, seed),
            Perturbation::FlipRandom(FlipAmount::Rate(r)) => {
                flip_random(x, flip_count_for_rate(x.len(), *r)?, seed)
            }
            Perturbation::ScrambleSegments { segment_len } => {
                scramble_segments(x, *segment_len, seed)
            }
            Perturbation::Complement => Ok(complement(x)),
            Perturbation::Amplify { .. } => Err(Error::InvalidArgument(
                "amplification needs a grid layout; use apply_grid".into(),
            )),
        }
    }

    pub fn apply_grid(&self, g: &Grid, seed: u64) -> Result<Grid> {
        match self {
            Perturbation::Amplify { factors } => amplify(g, factors),
            other => {
                Grid::from_bitstring(g.dims().to_vec(), &other.apply(&g.to_bitstring(), seed)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveStep {
    pub magnitude: usize,
    pub mean: f64,
    /// Population standard deviation over trials.
    pub std: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationCurve {
    pub measure: Measure,
    pub base_score: f64,
    pub steps: Vec<CurveStep>,
}

/// Scores `x` under `perturbation(magnitude)` for each scheduled magnitude,
/// `trials` times each. Trial `t` uses seed `derive_seed(seed, t)` at every
/// magnitude, so flip trials are nested across the schedule.
pub fn perturbation_curve(
    x: &BitString,
    schedule: &[usize],
    perturbation: impl Fn(usize) -> Perturbation + Sync,
    scorer: &Scorer,
    trials: usize,
    seed: u64,
) -> Result<PerturbationCurve> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial per step is required".into(),
        ));
    }
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty perturbation schedule".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "schedule magnitudes must be strictly increasing".into(),
        ));
    }
    let base_score = scorer.score_bits(x)?.value;
    let steps = schedule
        .iter()
        .map(|&magnitude| {
            let p = perturbation(magnitude);
            let scores = (0..trials as u64)
                .into_par_iter()
                .map(|t| Ok(scorer.score_bits(&p.apply(x, derive_seed(seed, t))?)?.value))
                .collect::<Result<Vec<f64>>>()?;
            let n = scores.len() as f64;
            let mean = scores.iter().sum::<f64>() / n;
            let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
            Ok(CurveStep {
                magnitude,
                mean,
                std: var.sqrt(),
                trials,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PerturbationCurve {
        measure: scorer.measure(),
        base_score,
        steps,
    })
}

/// Parses a schedule written as `a:b` (inclusive), `a:b:step`, or `a,b,c`.
pub fn parse_schedule(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("bad schedule {s:?}"));
    let num = |p: &str| p.trim().parse::<usize>().map_err(|_| bad());
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [lo, hi] => (num(lo)?, num(hi)?, 1),
            [lo, hi, step] => (num(lo)?, num(hi)?, num(step)?),
            _ => return Err(bad()),
        };
        if step == 0 || hi < lo {
            return Err(bad());
        }
        Ok((lo..=hi).step_by(step).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn mix64_reference_values() {
        // first outputs of the SplitMix64 generator seeded with 0
        assert_eq!(mix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(mix64(0x9E37_79B9_7F4A_7C15), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn zero_flips_is_identity_and_full_flip_is_complement() {
        let x = bs("1100101011110000");
        assert_eq!(flip_random(&x, 0, 3).unwrap(), x);
        assert_eq!(flip_random(&x, x.len(), 3).unwrap(), x.complement());
        assert!(flip_random(&x, x.len() + 1, 3).is_err());
    }

    #[test]
    fn flips_are_nested_across_counts() {
        let x = BitString::zeros(200);
        let small = flip_random(&x, 10, 9).unwrap();
        let large = flip_random(&x, 40, 9).unwrap();
        for i in 0..200 {
            if small.get(i) == Some(true) {
                assert_eq!(large.get(i), Some(true));
            }
        }
    }

    #[test]
    fn rate_rounds_to_nearest() {
        assert_eq!(flip_count_for_rate(1679, 0.03).unwrap(), 50);
        assert_eq!(flip_count_for_rate(10, 0.25).unwrap(), 3);
        assert!(flip_count_for_rate(10, 1.5).is_err());
    }

    #[test]
    fn scramble_single_segment_is_identity() {
        let x = bs("1100101011");
        assert_eq!(scramble_segments(&x, x.len(), 1).unwrap(), x);
        assert!(scramble_segments(&x, 0, 1).is_err());
        assert!(scramble_segments(&x, 11, 1).is_err());
    }

    #[test]
    fn scramble_keeps_tail_and_multiset() {
        let x = bs("0001101100111");
        let y = scramble_segments(&x, 3, 42).unwrap();
        assert_eq!(y, scramble_segments(&x, 3, 42).unwrap());
        assert_eq!(y.get(12), x.get(12));
        let mut a: Vec<String> = x.bits()[..12].chunks(3).map(|c| format!("{c:?}")).collect();
        let mut b: Vec<String> = y.bits()[..12].chunks(3).map(|c| format!("{c:?}")).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn amplify_shapes() {
        let g = Grid::zeros(vec![23, 73]).unwrap();
        assert_eq!(amplify(&g, &[6, 6]).unwrap().dims(), &[138, 438]);
        assert_eq!(amplify(&g, &[1, 1]).unwrap(), g);
        assert!(amplify(&g, &[2]).is_err());
        assert!(amplify(&g, &[0, 2]).is_err());
        let tiny = Grid::new(vec![2, 1], vec![true, false]).unwrap();
        assert_eq!(
            amplify(&tiny, &[2, 2]).unwrap().to_bitstring(),
            bs("11001100")
        );
    }

    #[test]
    fn schedules_parse() {
        assert_eq!(parse_schedule("1:5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_schedule("0:10:5").unwrap(), vec![0, 5, 10]);
        assert_eq!(parse_schedule("50,150,300").unwrap(), vec![50, 150, 300]);
        assert!(parse_schedule("5:1").is_err());
        assert!(parse_schedule("x").is_err());
    }
}
