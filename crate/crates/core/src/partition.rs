//! Candidate multidimensional layouts for a linear stream: enumeration,
//! reshaping, complexity sweeps, downward-spike detection, and reconstruction.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{format_dims, BitString, Grid};
use crate::error::{Error, Result};
use crate::measures::{ComplexityScore, Measure, Scorer};

/// A layout `dims` for the first `covered_bits` bits of a stream; the
/// remaining `remainder_bits` are discarded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PartitionCandidate {
    pub dims: Vec<usize>,
    pub covered_bits: usize,
    pub remainder_bits: usize,
}

impl PartitionCandidate {
    pub fn new(dims: Vec<usize>, stream_len: usize) -> Self {
        let covered: usize = dims.iter().product();
        debug_assert!(covered <= stream_len);
        Self {
            dims,
            covered_bits: covered,
            remainder_bits: stream_len - covered,
        }
    }

    pub fn leading_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn stream_len(&self) -> usize {
        self.covered_bits + self.remainder_bits
    }
}

impl fmt::Display for PartitionCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_dims(&self.dims))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EnumerationMode {
    /// Exact factorizations of the stream length.
    Divisors,
    /// Every leading dimension; the last dimension is the floor quotient.
    Full,
}

impl std::str::FromStr for EnumerationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "divisors" => Ok(Self::Divisors),
            "full" => Ok(Self::Full),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn enumerate_2d(n: usize, mode: EnumerationMode) -> Result<Vec<PartitionCandidate>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "stream length must be positive".into(),
        ));
    }
    Ok(match mode {
        EnumerationMode::Divisors => divisors(n)
            .into_iter()
            .map(|w| PartitionCandidate::new(vec![w, n / w], n))
            .collect(),
        EnumerationMode::Full => (1..=n)
            .map(|w| PartitionCandidate::new(vec![w, n / w], n))
            .collect(),
    })
}

pub const DEFAULT_CANDIDATE_CAP: usize = 1_000_000;

/// How 3D candidates are generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode3d {
    /// All ordered triples `(a, b, c)` with `a·b·c = n`.
    Divisors,
    /// `(a, second, ⌊n / (a·second)⌋)` for each `a` in `leading`.
    Full {
        leading: std::ops::RangeInclusive<usize>,
        second: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Enumerated {
    pub candidates: Vec<PartitionCandidate>,
    /// Set when the cap cut the enumeration short.
    pub warning: Option<String>,
}

pub fn enumerate_3d(n: usize, mode: &Mode3d, cap: usize) -> Result<Enumerated> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "stream length must be positive".into(),
        ));
    }
    let all: Box<dyn Iterator<Item = PartitionCandidate>> = match mode {
        Mode3d::Divisors => Box::new(divisors(n).into_iter().flat_map(move |a| {
            divisors(n / a)
                .into_iter()
                .map(move |b| PartitionCandidate::new(vec![a, b, n / a / b], n))
        })),
        Mode3d::Full { leading, second } => {
            if *second == 0 {
                return Err(Error::InvalidArgument(
                    "second dimension must be positive".into(),
                ));
            }
            let second = *second;
            Box::new(
                leading
                    .clone()
                    .filter(move |&a| a >= 1 && a * second <= n)
                    .map(move |a| PartitionCandidate::new(vec![a, second, n / (a * second)], n)),
            )
        }
    };
    let mut candidates: Vec<_> = all.take(cap.saturating_add(1)).collect();
    let mut warning = None;
    if candidates.len() > cap {
        candidates.truncate(cap);
        warning = Some(format!("candidate enumeration truncated at {cap}"));
    }
    Ok(Enumerated {
        candidates,
        warning,
    })
}

/// The most cube-like exact factorization of `n`, used to seed 3D sweeps.
pub fn balanced_triple(n: usize) -> [usize; 3] {
    let mut best = [1, 1, n];
    let mut best_spread = n;
    for a in divisors(n) {
        for b in divisors(n / a) {
            let t = [a, b, n / a / b];
            let spread = t.iter().max().unwrap() - t.iter().min().unwrap();
            if spread < best_spread {
                best = t;
                best_spread = spread;
            }
        }
    }
    best
}

pub fn reshape(x: &BitString, c: &PartitionCandidate) -> Result<Grid> {
    if c.covered_bits > x.len() || c.dims.iter().product::<usize>() != c.covered_bits {
        return Err(Error::Dimension(format!(
            "candidate {c} covers {} bits but the stream has {}",
            c.covered_bits,
            x.len()
        )));
    }
    Grid::new(c.dims.clone(), x.bits()[..c.covered_bits].to_vec())
}

/// What the sweep compares across candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScoreBasis {
    /// The measure's value as computed on the scored bits.
    Raw,
    /// The measure's value scaled by `stream length / scored bits`, so that
    /// candidates dropping different numbers of bits compare on equal terms.
    FullStream,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub ndim: usize,
    pub mode: EnumerationMode,
    /// Full-mode candidates discarding more than this share of the stream are skipped.
    pub max_remainder_fraction: f64,
    /// Second dimension held fixed by 3D Full sweeps; defaults to the middle
    /// of [`balanced_triple`].
    pub second_dim: Option<usize>,
    /// Leading-dimension range for 3D Full sweeps; defaults to `1..=n`.
    pub leading_range: Option<(usize, usize)>,
    pub cap: usize,
    pub basis: ScoreBasis,
}

impl SweepConfig {
    pub fn new(ndim: usize, mode: EnumerationMode) -> Self {
        Self {
            ndim,
            mode,
            max_remainder_fraction: 0.25,
            second_dim: None,
            leading_range: None,
            cap: DEFAULT_CANDIDATE_CAP,
            basis: ScoreBasis::FullStream,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScorePoint {
    pub candidate: PartitionCandidate,
    pub score: Option<ComplexityScore>,
    /// The value compared across the sweep (see [`ScoreBasis`]).
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSeries {
    pub measure: Measure,
    pub basis: ScoreBasis,
    pub points: Vec<ScorePoint>,
    pub skipped: Vec<PartitionCandidate>,
    pub warnings: Vec<String>,
}

impl ScoreSeries {
    /// Points that produced a score.
    pub fn scored(&self) -> impl Iterator<Item = (&PartitionCandidate, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.value.map(|v| (&p.candidate, v)))
    }

    pub fn minimum(&self) -> Option<(&PartitionCandidate, f64)> {
        self.scored().min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn value_of(&self, dims: &[usize]) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.candidate.dims == dims)
            .and_then(|p| p.value)
    }
}

pub fn candidates_for(
    n: usize,
    config: &SweepConfig,
) -> Result<(Vec<PartitionCandidate>, Option<String>)> {
    match config.ndim {
        2 => Ok((enumerate_2d(n, config.mode)?, None)),
        3 => {
            let mode = match config.mode {
                EnumerationMode::Divisors => Mode3d::Divisors,
                EnumerationMode::Full => {
                    let (lo, hi) = config.leading_range.unwrap_or((1, n));
                    Mode3d::Full {
                        leading: lo..=hi,
                        second: config.second_dim.unwrap_or(balanced_triple(n)[1]),
                    }
                }
            };
            let e = enumerate_3d(n, &mode, config.cap)?;
            Ok((e.candidates, e.warning))
        }
        d => Err(Error::InvalidArgument(format!(
            "sweeps support 2 or 3 dimensions, got {d}"
        ))),
    }
}

/// Scores every candidate layout of `x`. Candidates are scored in parallel
/// and returned in canonical order; per-candidate failures become flagged
/// points rather than aborting the sweep.
pub fn sweep(x: &BitString, config: &SweepConfig, scorer: &Scorer) -> Result<ScoreSeries> {
    let n = x.len();
    let (mut candidates, warning) = candidates_for(n, config)?;
    candidates.sort();
    candidates.dedup();

    let mut skipped = Vec::new();
    if config.mode == EnumerationMode::Full {
        let limit = config.max_remainder_fraction * n as f64;
        candidates.retain(|c| {
            let keep = c.remainder_bits as f64 <= limit;
            if !keep {
                skipped.push(c.clone());
            }
            keep
        });
    }

    let points = candidates
        .into_par_iter()
        .map(|candidate| {
            let scored = reshape(x, &candidate).and_then(|g| scorer.score_grid(&g));
            match scored {
                Ok(score) => {
                    let value = match config.basis {
                        ScoreBasis::Raw => Some(score.value),
                        ScoreBasis::FullStream if score.scored_bits > 0 => {
                            Some(score.value * n as f64 / score.scored_bits as f64)
                        }
                        ScoreBasis::FullStream => None,
                    };
                    let error = value.is_none().then(|| "no bits scored".to_string());
                    ScorePoint {
                        candidate,
                        score: Some(score),
                        value,
                        error,
                    }
                }
                Err(e) => ScorePoint {
                    candidate,
                    score: None,
                    value: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    Ok(ScoreSeries {
        measure: scorer.measure(),
        basis: config.basis,
        points,
        skipped,
        warnings: warning.into_iter().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpikeMethod {
    /// Depth is `(local median - value) / local MAD` over a sliding window.
    LocalMedianZ,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spike {
    pub candidate: PartitionCandidate,
    pub value: f64,
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpikeReport {
    /// Sorted by depth, deepest first.
    pub ranked: Vec<Spike>,
    pub window: usize,
    pub z_threshold: f64,
    pub method: SpikeMethod,
}

impl SpikeReport {
    /// 1-based rank of the first spike whose candidate satisfies `pred`.
    pub fn rank_of(&self, pred: impl Fn(&PartitionCandidate) -> bool) -> Option<usize> {
        self.ranked
            .iter()
            .position(|s| pred(&s.candidate))
            .map(|i| i + 1)
    }

    pub fn max_depth(&self) -> Option<f64> {
        self.ranked.first().map(|s| s.depth)
    }
}

pub const DEFAULT_SPIKE_WINDOW: usize = 31;
pub const DEFAULT_Z_THRESHOLD: f64 = 3.0;
const MAD_FLOOR: f64 = 1e-9;

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Per-point depth below the local median in units of local MAD. The window
/// is centred on each point and shifted inward at the series ends; points
/// without a value are left out.
pub fn spike_depths(values: &[f64], window: usize) -> Result<Vec<f64>> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "window must be odd and at least 3, got {window}"
        )));
    }
    if values.len() < window {
        return Err(Error::InvalidArgument(format!(
            "series of {} scored points is shorter than window {window}",
            values.len()
        )));
    }
    let half = window / 2;
    let mut buf = Vec::with_capacity(window);
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let start = i.saturating_sub(half).min(values.len() - window);
            buf.clear();
            buf.extend_from_slice(&values[start..start + window]);
            buf.sort_by(f64::total_cmp);
            let med = median(&buf);
            for b in buf.iter_mut() {
                *b = (*b - med).abs();
            }
            buf.sort_by(f64::total_cmp);
            let mad = median(&buf).max(MAD_FLOOR);
            (med - v) / mad
        })
        .collect())
}

pub fn detect_spikes(series: &ScoreSeries, window: usize, z_threshold: f64) -> Result<SpikeReport> {
    let scored: Vec<(&PartitionCandidate, f64)> = series.scored().collect();
    let values: Vec<f64> = scored.iter().map(|&(_, v)| v).collect();
    let depths = spike_depths(&values, window)?;
    let mut ranked: Vec<Spike> = scored
        .iter()
        .zip(depths)
        .filter(|&(_, d)| d > 0.0 && d >= z_threshold)
        .map(|(&(c, value), depth)| Spike {
            candidate: c.clone(),
            value,
            depth,
        })
        .collect();
    // stable: equal depths keep canonical candidate order
    ranked.sort_by(|a, b| b.depth.total_cmp(&a.depth));
    Ok(SpikeReport {
        ranked,
        window,
        z_threshold,
        method: SpikeMethod::LocalMedianZ,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    Original,
    Transpose,
    MirrorHorizontal,
    MirrorVertical,
    /// Axis permutation of a 3D grid: output axis `i` is input axis `p[i]`.
    Permutation([usize; 3]),
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Original => f.write_str("original"),
            Variant::Transpose => f.write_str("transpose"),
            Variant::MirrorHorizontal => f.write_str("mirror-horizontal"),
            Variant::MirrorVertical => f.write_str("mirror-vertical"),
            Variant::Permutation(p) => write!(f, "axes-{}{}{}", p[0], p[1], p[2]),
        }
    }
}

/// Reshapes `x` at `c` and returns the layout with its symmetry variants:
/// transpose and both mirrors in 2D, the six axis orders in 3D. Layouts with
/// at most one non-trivial axis yield only the original.
pub fn reconstruct(x: &BitString, c: &PartitionCandidate) -> Result<Vec<(Variant, Grid)>> {
    let g = reshape(x, c)?;
    let nontrivial = g.dims().iter().filter(|&&d| d > 1).count();
    if nontrivial <= 1 || g.ndim() == 1 {
        return Ok(vec![(Variant::Original, g)]);
    }
    let dims = g.dims().to_vec();
    Ok(match g.ndim() {
        2 => {
            let (w, h) = (dims[0], dims[1]);
            vec![
                (
                    Variant::Transpose,
                    g.remap(vec![h, w], |c| vec![c[1], c[0]]),
                ),
                (
                    Variant::MirrorHorizontal,
                    g.remap(dims.clone(), |c| vec![w - 1 - c[0], c[1]]),
                ),
                (
                    Variant::MirrorVertical,
                    g.remap(dims.clone(), |c| vec![c[0], h - 1 - c[1]]),
                ),
                (Variant::Original, g),
            ]
            .into_iter()
            .rev()
            .collect()
        }
        _ => {
            const PERMS: [[usize; 3]; 6] = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            PERMS
                .iter()
                .map(|&p| {
                    let out_dims = vec![dims[p[0]], dims[p[1]], dims[p[2]]];
                    let grid = g.remap(out_dims, |c| {
                        let mut src = [0usize; 3];
                        for i in 0..3 {
                            src[p[i]] = c[i];
                        }
                        src.to_vec()
                    });
                    let tag = if p == [0, 1, 2] {
                        Variant::Original
                    } else {
                        Variant::Permutation(p)
                    };
                    (tag, grid)
                })
                .collect()
        }
    })
}
