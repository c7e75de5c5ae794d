//! Coding Theorem Method tables.
//!
//! Every 2-symbol Turing machine with `n` working states is run from a blank
//! (all-zero) two-way tape with the head at the origin. A machine is a list of
//! `2n` rules indexed by `(state, read symbol)`; each rule is one of `4n`
//! moving actions `(write, move, next state)` or one of 2 halting actions
//! `(write, halt)`, giving `(4n + 2)^(2n)` machines. A machine that halts within
//! the step budget outputs the bit content of every tape cell its head ever
//! visited, left to right. The complexity estimate of a block is
//! `-log2(count / halted_total)`.
//!
//! Machine index `i` is decoded in base `4n + 2`, least significant digit
//! first, with digit `j` giving the rule for state `j / 2` reading symbol
//! `j % 2`. A digit `d < 4n` encodes `write = d % 2`, `move right = (d / 2) % 2`,
//! `next = d / 4`; digits `4n` and `4n + 1` halt writing 0 and 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Largest state count the exhaustive enumerator accepts.
pub const MAX_STATES: u32 = 3;

/// Known maximal halting step counts from a blank tape, indexed by states.
const BUSY_BEAVER_STEPS: [u32; 4] = [0, 1, 6, 21];

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MachineClass {
    states: u32,
    step_budget: u32,
}

impl MachineClass {
    pub const DEFAULT_STATES: u32 = 3;
    pub const DEFAULT_STEP_BUDGET: u32 = 200;

    pub fn new(states: u32, step_budget: u32) -> Result<Self> {
        if states == 0 {
            return Err(Error::InvalidClass("states must be positive".into()));
        }
        if states > MAX_STATES {
            return Err(Error::Unsupported(format!(
                "enumeration of {states}-state machines (at most {MAX_STATES} supported)"
            )));
        }
        if step_budget == 0 {
            return Err(Error::InvalidClass("step budget must be positive".into()));
        }
        Ok(Self {
            states,
            step_budget,
        })
    }

    pub fn states(&self) -> u32 {
        self.states
    }

    pub fn symbols(&self) -> u32 {
        2
    }

    pub fn step_budget(&self) -> u32 {
        self.step_budget
    }

    /// Number of distinct actions a single rule can take.
    pub fn actions_per_rule(&self) -> u64 {
        4 * self.states as u64 + 2
    }

    pub fn total_machines(&self) -> u64 {
        self.actions_per_rule().pow(2 * self.states)
    }

    /// True when the step budget reaches the busy-beaver bound, so every
    /// halting machine of the class is observed halting.
    pub fn full_coverage(&self) -> bool {
        self.step_budget >= BUSY_BEAVER_STEPS[self.states as usize]
    }
}

impl Default for MachineClass {
    fn default() -> Self {
        Self {
            states: Self::DEFAULT_STATES,
            step_budget: Self::DEFAULT_STEP_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Move { write: u8, right: bool, next: u8 },
    Halt { write: u8 },
}

/// A decoded machine: rule `2 * state + symbol`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    rules: Vec<Action>,
}

impl Machine {
    pub fn decode(class: &MachineClass, index: u64) -> Self {
        let base = class.actions_per_rule();
        let moving = 4 * class.states as u64;
        let mut rest = index;
        let rules = (0..2 * class.states)
            .map(|_| {
                let d = rest % base;
                rest /= base;
                if d < moving {
                    Action::Move {
                        write: (d % 2) as u8,
                        right: (d / 2) % 2 == 1,
                        next: (d / 4) as u8,
                    }
                } else {
                    Action::Halt {
                        write: (d - moving) as u8,
                    }
                }
            })
            .collect();
        Self { rules }
    }

    pub fn rules(&self) -> &[Action] {
        &self.rules
    }
}

/// Reusable simulation state; the tape is sized so the head can never leave it.
struct Simulator {
    tape: Vec<u8>,
    origin: usize,
    budget: u32,
}

/// Output block packed as `(length, bits)`, first cell in the most significant
/// position of the low `length` bits.
type PackedBlock = (u8, u64);

impl Simulator {
    fn new(budget: u32) -> Self {
        let origin = budget as usize;
        Self {
            tape: vec![0; 2 * origin + 1],
            origin,
            budget,
        }
    }

    fn run(&mut self, machine: &Machine) -> Option<PackedBlock> {
        let mut head = self.origin;
        let (mut lo, mut hi) = (head, head);
        let mut state = 0usize;
        let mut halted = false;
        for _ in 0..self.budget {
            let sym = self.tape[head] as usize;
            match machine.rules[2 * state + sym] {
                Action::Halt { write } => {
                    self.tape[head] = write;
                    halted = true;
                    break;
                }
                Action::Move { write, right, next } => {
                    self.tape[head] = write;
                    if right {
                        head += 1;
                        hi = hi.max(head);
                    } else {
                        head -= 1;
                        lo = lo.min(head);
                    }
                    state = next as usize;
                }
            }
        }
        let out = halted.then(|| {
            let cells = &self.tape[lo..=hi];
            assert!(cells.len() <= 64, "halting output longer than 64 cells");
            let bits = cells.iter().fold(0u64, |acc, &c| (acc << 1) | c as u64);
            (cells.len() as u8, bits)
        });
        self.tape[lo..=hi].fill(0);
        out
    }
}

fn unpack(block: PackedBlock) -> BitString {
    let (len, bits) = block;
    (0..len).map(|i| (bits >> (len - 1 - i)) & 1 == 1).collect()
}

fn pack(block: &BitString) -> Option<PackedBlock> {
    if block.len() > 64 {
        return None;
    }
    let bits = block
        .bits()
        .iter()
        .fold(0u64, |acc, &b| (acc << 1) | b as u64);
    Some((block.len() as u8, bits))
}

/// Runs a single machine and returns its output block if it halts within budget.
pub fn run_machine(class: &MachineClass, index: u64) -> Option<BitString> {
    let machine = Machine::decode(class, index);
    Simulator::new(class.step_budget).run(&machine).map(unpack)
}

/// Halting-output counts for a contiguous range of machine indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardCounts {
    pub shard_id: u32,
    pub class: MachineClass,
    pub machine_range: Range<u64>,
    pub output_counts: BTreeMap<BitString, u64>,
    pub halted_total: u64,
    pub ran_total: u64,
}

pub fn enumerate_shard(
    class: &MachineClass,
    shard_id: u32,
    range: Range<u64>,
) -> Result<ShardCounts> {
    let total = class.total_machines();
    if range.start > range.end || range.end > total {
        return Err(Error::RangeOutOfBounds {
            start: range.start,
            end: range.end,
            total,
        });
    }
    let mut sim = Simulator::new(class.step_budget);
    let mut counts: HashMap<PackedBlock, u64> = HashMap::new();
    let mut halted_total = 0;
    for index in range.clone() {
        if let Some(block) = sim.run(&Machine::decode(class, index)) {
            *counts.entry(block).or_default() += 1;
            halted_total += 1;
        }
    }
    Ok(ShardCounts {
        shard_id,
        class: *class,
        ran_total: range.end - range.start,
        machine_range: range,
        output_counts: counts.into_iter().map(|(b, c)| (unpack(b), c)).collect(),
        halted_total,
    })
}

/// Splits the full machine range into `shards` contiguous, near-equal pieces.
pub fn shard_ranges(class: &MachineClass, shards: u64) -> Vec<Range<u64>> {
    let total = class.total_machines();
    let shards = shards.clamp(1, total.max(1));
    (0..shards)
        .map(|i| (total * i / shards)..(total * (i + 1) / shards))
        .collect()
}

/// Enumerates the whole class in `shards` pieces on the rayon pool and merges.
pub fn build_table(class: &MachineClass, shards: u64) -> Result<CtmTable> {
    let parts = shard_ranges(class, shards)
        .into_par_iter()
        .enumerate()
        .map(|(i, r)| enumerate_shard(class, i as u32, r))
        .collect::<Result<Vec<_>>>()?;
    merge_shards(&parts)
}

pub fn merge_shards(shards: &[ShardCounts]) -> Result<CtmTable> {
    let first = shards
        .first()
        .ok_or_else(|| Error::Merge("no shards given".into()))?;
    let class = first.class;
    if let Some(s) = shards.iter().find(|s| s.class != class) {
        return Err(Error::Merge(format!(
            "shard {} has class {:?}, expected {class:?}",
            s.shard_id, s.class
        )));
    }
    let mut ranges: Vec<&Range<u64>> = shards.iter().map(|s| &s.machine_range).collect();
    ranges.sort_by_key(|r| (r.start, r.end));
    for pair in ranges.windows(2) {
        if pair[1].start < pair[0].end {
            return Err(Error::Merge(format!(
                "overlapping ranges {:?} and {:?}",
                pair[0], pair[1]
            )));
        }
    }
    let mut counts: BTreeMap<BitString, u64> = BTreeMap::new();
    let (mut halted, mut ran) = (0, 0);
    for s in shards {
        for (block, c) in &s.output_counts {
            *counts.entry(block.clone()).or_default() += c;
        }
        halted += s.halted_total;
        ran += s.ran_total;
    }
    CtmTable::from_counts(class, counts, halted, ran)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FallbackPolicy {
    /// One bit more than the most complex covered block of the same length,
    /// or `length + 1` bits when no block of that length is covered.
    MaxPlusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CtmValue {
    pub k_bits: f64,
    pub fallback: bool,
}

/// Complexity estimates per block, built from merged halting counts.
///
/// Counts are averaged over the orbit of each block under complement and
/// reversal before conversion, so both symmetries hold exactly while the
/// total mass stays equal to `halted_total`.
#[derive(Debug, Clone)]
pub struct CtmTable {
    class: MachineClass,
    counts: BTreeMap<BitString, u64>,
    entries: BTreeMap<BitString, f64>,
    packed: HashMap<PackedBlock, f64>,
    max_k_by_len: Vec<Option<f64>>,
    halted_total: u64,
    ran_total: u64,
    max_covered_len: usize,
    fallback_policy: FallbackPolicy,
}

impl CtmTable {
    pub fn from_counts(
        class: MachineClass,
        counts: BTreeMap<BitString, u64>,
        halted_total: u64,
        ran_total: u64,
    ) -> Result<Self> {
        let sum: u64 = counts.values().sum();
        if sum != halted_total {
            return Err(Error::Merge(format!(
                "counts sum to {sum}, halted_total is {halted_total}"
            )));
        }
        if halted_total > ran_total {
            return Err(Error::Merge(format!(
                "halted_total {halted_total} exceeds ran_total {ran_total}"
            )));
        }
        let count_of = |b: &BitString| counts.get(b).copied().unwrap_or(0);
        let mut entries = BTreeMap::new();
        for block in counts.keys() {
            let orbit = [
                block.clone(),
                block.complement(),
                block.reversed(),
                block.complement().reversed(),
            ];
            let orbit_sum: u64 = orbit.iter().map(count_of).sum();
            // -log2((orbit_sum / 4) / halted_total)
            let k = (4.0 * halted_total as f64).log2() - (orbit_sum as f64).log2();
            for member in orbit {
                entries.insert(member, k);
            }
        }
        let max_covered_len = entries.keys().map(BitString::len).max().unwrap_or(0);
        let mut max_k_by_len = vec![None; max_covered_len + 1];
        let mut packed = HashMap::with_capacity(entries.len());
        for (block, &k) in &entries {
            let slot: &mut Option<f64> = &mut max_k_by_len[block.len()];
            *slot = Some(slot.map_or(k, |m| m.max(k)));
            if let Some(p) = pack(block) {
                packed.insert(p, k);
            }
        }
        Ok(Self {
            class,
            counts,
            entries,
            packed,
            max_k_by_len,
            halted_total,
            ran_total,
            max_covered_len,
            fallback_policy: FallbackPolicy::MaxPlusOne,
        })
    }

    pub fn class(&self) -> &MachineClass {
        &self.class
    }

    pub fn entries(&self) -> &BTreeMap<BitString, f64> {
        &self.entries
    }

    pub fn raw_counts(&self) -> &BTreeMap<BitString, u64> {
        &self.counts
    }

    pub fn halted_total(&self) -> u64 {
        self.halted_total
    }

    pub fn ran_total(&self) -> u64 {
        self.ran_total
    }

    pub fn max_covered_len(&self) -> usize {
        self.max_covered_len
    }

    pub fn fallback_policy(&self) -> FallbackPolicy {
        self.fallback_policy
    }

    /// Number of covered blocks of length `len`.
    pub fn coverage(&self, len: usize) -> usize {
        self.entries.keys().filter(|b| b.len() == len).count()
    }

    pub fn ctm_value(&self, block: &BitString) -> Result<CtmValue> {
        if block.is_empty() {
            return Err(Error::EmptyBlock);
        }
        if let Some(&k) = self.entries.get(block) {
            return Ok(CtmValue {
                k_bits: k,
                fallback: false,
            });
        }
        Ok(CtmValue {
            k_bits: self.fallback_value(block.len()),
            fallback: true,
        })
    }

    /// Lookup for a block packed as `(len, bits)` with the first cell most
    /// significant. `len` must be in `1..=64`.
    pub fn ctm_packed(&self, len: u8, bits: u64) -> CtmValue {
        match self.packed.get(&(len, bits)) {
            Some(&k) => CtmValue {
                k_bits: k,
                fallback: false,
            },
            None => CtmValue {
                k_bits: self.fallback_value(len as usize),
                fallback: true,
            },
        }
    }

    fn fallback_value(&self, len: usize) -> f64 {
        match self.fallback_policy {
            FallbackPolicy::MaxPlusOne => match self.max_k_by_len.get(len).copied().flatten() {
                Some(max) => max + 1.0,
                None => len as f64 + 1.0,
            },
        }
    }

    /// Writes the table as text: a header followed by `(block, count)` records
    /// sorted by length then lexicographically.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let mut out = String::new();
        writeln!(out, "dimdecon-ctm {FORMAT_VERSION}").unwrap();
        writeln!(out, "states {}", self.class.states).unwrap();
        writeln!(out, "symbols {}", self.class.symbols()).unwrap();
        writeln!(out, "step_budget {}", self.class.step_budget).unwrap();
        writeln!(out, "halted_total {}", self.halted_total).unwrap();
        writeln!(out, "ran_total {}", self.ran_total).unwrap();
        writeln!(out, "records {}", self.counts.len()).unwrap();
        let mut records: Vec<_> = self.counts.iter().collect();
        records.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        for (block, count) in records {
            writeln!(out, "{block} {count}").unwrap();
        }
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next_line = || -> Result<(usize, String)> {
            match lines.next() {
                Some((n, l)) => Ok((n, l?)),
                None => Err(Error::TableFormat {
                    line: 0,
                    msg: "unexpected end of file".into(),
                }),
            }
        };

        let (n, magic) = next_line()?;
        let version = magic
            .strip_prefix("dimdecon-ctm ")
            .and_then(|v| v.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::TableFormat {
                line: n,
                msg: "missing dimdecon-ctm header".into(),
            })?;
        if version != FORMAT_VERSION {
            return Err(Error::TableFormat {
                line: n,
                msg: format!("unsupported format version {version}"),
            });
        }

        let mut header = |key: &str| -> Result<u64> {
            let (n, line) = next_line()?;
            line.strip_prefix(key)
                .and_then(|v| v.strip_prefix(' '))
                .and_then(|v| v.trim().parse::<u64>().ok())
                .ok_or_else(|| Error::TableFormat {
                    line: n,
                    msg: format!("expected `{key} <integer>`"),
                })
        };
        let states = header("states")?;
        let symbols = header("symbols")?;
        let budget = header("step_budget")?;
        let halted_total = header("halted_total")?;
        let ran_total = header("ran_total")?;
        let records = header("records")?;
        if symbols != 2 {
            return Err(Error::Unsupported(format!("{symbols}-symbol tables")));
        }
        let class = MachineClass::new(
            u32::try_from(states).map_err(|_| Error::InvalidClass(format!("states {states}")))?,
            u32::try_from(budget)
                .map_err(|_| Error::InvalidClass(format!("step budget {budget}")))?,
        )?;

        let mut counts = BTreeMap::new();
        for _ in 0..records {
            let (n, line) = next_line()?;
            let bad = |msg: &str| Error::TableFormat {
                line: n,
                msg: msg.to_string(),
            };
            let (block, count) = line
                .split_once(' ')
                .ok_or_else(|| bad("expected `<block> <count>`"))?;
            let block: BitString = block
                .parse()
                .map_err(|_| bad("block must be a 0/1 string"))?;
            if block.is_empty() {
                return Err(bad("empty block"));
            }
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| bad("count must be an integer"))?;
            if counts.insert(block, count).is_some() {
                return Err(bad("duplicate block"));
            }
        }
        Self::from_counts(class, counts, halted_total, ran_total)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}
