//! CSV and text renderings of sweeps, curves and tables.

use std::fmt;

use serde::Serialize;

use crate::bits::{format_dims, parse_dims};
use crate::ctm::CtmTable;
use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::partition::{PartitionCandidate, ScoreBasis, ScorePoint, ScoreSeries};
use crate::perturb::PerturbationCurve;

pub const SWEEP_CSV_HEADER: &str = "leading_dim,dims,remainder,measure,score,fallback_fraction";

/// One row per candidate. `score` is the compared sweep value and is empty
/// for candidates that could not be scored.
pub fn sweep_csv(series: &ScoreSeries) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in &series.points {
        let score = p.value.map(|v| v.to_string()).unwrap_or_default();
        let fallback = p
            .score
            .as_ref()
            .and_then(|s| s.fallback_fraction)
            .map(|f| f.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.candidate.leading_dim(),
            format_dims(&p.candidate.dims),
            p.candidate.remainder_bits,
            series.measure,
            score,
            fallback
        ));
    }
    out
}

/// Reads a sweep CSV back into a series (scores only; per-point details such
/// as scored bits are not stored in the CSV).
pub fn parse_sweep_csv(text: &str) -> Result<ScoreSeries> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SWEEP_CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                offset: 0,
                msg: format!("expected CSV header `{SWEEP_CSV_HEADER}`"),
            })
        }
    }
    let mut measure = None;
    let mut points = Vec::new();
    let mut offset = text.find('\n').map_or(text.len(), |i| i + 1);
    for (_, line) in lines {
        let bad = |msg: &str| Error::Parse {
            offset,
            msg: msg.to_string(),
        };
        if !line.trim().is_empty() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            let dims = parse_dims(fields[1]).map_err(|_| bad("bad dims"))?;
            let remainder: usize = fields[3 - 1].parse().map_err(|_| bad("bad remainder"))?;
            let m: Measure = fields[3].parse().map_err(|_| bad("bad measure"))?;
            if *measure.get_or_insert(m) != m {
                return Err(bad("mixed measures in one series"));
            }
            let value = match fields[4] {
                "" => None,
                v => Some(v.parse::<f64>().map_err(|_| bad("bad score"))?),
            };
            let covered: usize = dims.iter().product();
            points.push(ScorePoint {
                candidate: PartitionCandidate {
                    dims,
                    covered_bits: covered,
                    remainder_bits: remainder,
                },
                score: None,
                value,
                error: value.is_none().then(|| "unscored".to_string()),
            });
        }
        offset += line.len() + 1;
    }
    Ok(ScoreSeries {
        measure: measure.unwrap_or(Measure::Bdm),
        basis: ScoreBasis::FullStream,
        points,
        skipped: Vec::new(),
        warnings: Vec::new(),
    })
}

pub fn curve_csv(curve: &PerturbationCurve) -> String {
    let mut out = String::from("magnitude,measure,mean,std,trials\n");
    for s in &curve.steps {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.magnitude, curve.measure, s.mean, s.std, s.trials
        ));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct LengthSummary {
    pub len: usize,
    pub covered: usize,
    pub possible: u64,
    pub min_k: f64,
    pub max_k: f64,
}

#[derive(Debug, Serialize)]
pub struct TableSummary {
    pub states: u32,
    pub symbols: u32,
    pub step_budget: u32,
    pub ran_total: u64,
    pub halted_total: u64,
    pub distinct_outputs: usize,
    pub entries: usize,
    pub max_covered_len: usize,
    pub lengths: Vec<LengthSummary>,
}

impl TableSummary {
    pub fn of(table: &CtmTable) -> Self {
        let mut lengths: Vec<LengthSummary> = Vec::new();
        for (block, &k) in table.entries() {
            let len = block.len();
            match lengths.iter_mut().find(|l| l.len == len) {
                Some(l) => {
                    l.covered += 1;
                    l.min_k = l.min_k.min(k);
                    l.max_k = l.max_k.max(k);
                }
                None => lengths.push(LengthSummary {
                    len,
                    covered: 1,
                    possible: 1u64.checked_shl(len as u32).unwrap_or(u64::MAX),
                    min_k: k,
                    max_k: k,
                }),
            }
        }
        lengths.sort_by_key(|l| l.len);
        let class = table.class();
        Self {
            states: class.states(),
            symbols: class.symbols(),
            step_budget: class.step_budget(),
            ran_total: table.ran_total(),
            halted_total: table.halted_total(),
            distinct_outputs: table.raw_counts().len(),
            entries: table.entries().len(),
            max_covered_len: table.max_covered_len(),
            lengths,
        }
    }
}

impl fmt::Display for TableSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states        {}", self.states)?;
        writeln!(f, "symbols       {}", self.symbols)?;
        writeln!(f, "step budget   {}", self.step_budget)?;
        writeln!(f, "machines      {}", self.ran_total)?;
        writeln!(f, "halted        {}", self.halted_total)?;
        writeln!(f, "raw outputs   {}", self.distinct_outputs)?;
        writeln!(f, "entries       {}", self.entries)?;
        writeln!(f, "max length    {}", self.max_covered_len)?;
        writeln!(f, "len  covered/possible  min_k     max_k")?;
        for l in &self.lengths {
            writeln!(
                f,
                "{:<4} {:>8}/{:<8}  {:<9.4} {:.4}",
                l.len, l.covered, l.possible, l.min_k, l.max_k
            )?;
        }
        Ok(())
    }
}
