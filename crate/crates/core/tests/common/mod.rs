//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use dimdecon::CtmTable;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn committed_table() -> CtmTable {
    CtmTable::load(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/ctm_s3.ctm")).unwrap()
}

/// One rule of the naive machine: `None` halts after writing.
#[derive(Clone, Copy)]
struct Rule {
    write: u8,
    step: Option<(i64, usize)>,
}

/// Decodes a machine index from first principles: `2n` rules, each chosen
/// from `4n + 2` actions, least significant rule first.
fn naive_rules(states: usize, mut index: u64) -> Vec<Rule> {
    let base = (4 * states + 2) as u64;
    let mut rules = Vec::new();
    for _ in 0..2 * states {
        let d = (index % base) as usize;
        index /= base;
        rules.push(if d >= 4 * states {
            Rule {
                write: (d - 4 * states) as u8,
                step: None,
            }
        } else {
            let dir = if (d >> 1) & 1 == 1 { 1 } else { -1 };
            Rule {
                write: (d & 1) as u8,
                step: Some((dir, d >> 2)),
            }
        });
    }
    rules
}

/// Sparse-tape simulation; returns the visited cells if the machine halts.
pub fn naive_run(states: usize, index: u64, budget: u32) -> Option<String> {
    let rules = naive_rules(states, index);
    let mut tape: HashMap<i64, u8> = HashMap::new();
    let (mut pos, mut state) = (0i64, 0usize);
    let (mut left, mut right) = (0i64, 0i64);
    for _ in 0..budget {
        let read = *tape.get(&pos).unwrap_or(&0) as usize;
        let rule = rules[state * 2 + read];
        tape.insert(pos, rule.write);
        match rule.step {
            None => {
                return Some(
                    (left..=right)
                        .map(|p| if tape.get(&p) == Some(&1) { '1' } else { '0' })
                        .collect(),
                );
            }
            Some((dir, next)) => {
                pos += dir;
                left = left.min(pos);
                right = right.max(pos);
                state = next;
            }
        }
    }
    None
}
