//! Per-length tables of valid formula encodings.
//!
//! The assignment-language rankers need, for a given bit length m, the sum
//! of satisfying-assignment counts over all valid encodings of that length:
//! both the full-length total and the prefix sum below a given value.
//! Valid encodings are enumerated directly from the grammar (header plus
//! postfix token stream) instead of filtering all 2^m strings, which keeps
//! the build cost proportional to the number of formulas. Tables are
//! cached per length and shared.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::constructions::formula::{sat_total, FormulaAst, FormulaBody};
use crate::error::Error;

/// All valid encodings of one bit length, sorted by value, with prefix
/// sums of their satisfying-assignment counts.
#[derive(Debug)]
pub struct LengthTable {
    vals: Vec<u64>,
    prefix: Vec<BigUint>,
}

impl LengthTable {
    /// Σ #SAT over every valid encoding of this length.
    pub fn total(&self) -> &BigUint {
        self.prefix.last().expect("prefix always has a zero entry")
    }

    /// Σ #SAT over valid encodings with value strictly below `v`.
    pub fn sum_below(&self, v: u64) -> BigUint {
        let idx = self.vals.partition_point(|&val| val < v);
        self.prefix[idx].clone()
    }

    /// Number of valid encodings of this length.
    pub fn formula_count(&self) -> usize {
        self.vals.len()
    }

    /// Number of valid encodings with value strictly below `v`.
    pub fn count_below(&self, v: u64) -> u64 {
        self.vals.partition_point(|&val| val < v) as u64
    }
}

struct Enumerator {
    k: u8,
    total_bits: usize,
    entries: Vec<(u64, BigUint)>,
}

impl Enumerator {
    /// Extends a partial token stream. `used` counts bits emitted so far
    /// (including the 8-bit header), `val` is their big-endian value, and
    /// `stack` holds the sub-formulas built so far.
    fn walk(&mut self, used: usize, val: u64, stack: &mut Vec<FormulaBody>) {
        let remaining = self.total_bits - used;
        if remaining == 0 {
            if stack.len() == 1 {
                let ast = FormulaAst::new(self.k, stack[0].clone());
                let sat = sat_total(&ast).expect("enumerated formulas have small support");
                self.entries.push((val, sat));
            }
            return;
        }
        // Closing the expression needs two bits per pending binary join.
        if stack.len() > 1 && remaining < 2 * (stack.len() - 1) {
            return;
        }
        if remaining >= 10 {
            for i in 0..self.k {
                let tok = (val << 10) | (i as u64);
                stack.push(FormulaBody::Var(i));
                self.walk(used + 10, tok, stack);
                stack.pop();
            }
        }
        if remaining >= 2 && stack.len() >= 2 {
            for (code, op) in [(0b01u64, true), (0b10u64, false)] {
                let b = stack.pop().unwrap();
                let a = stack.pop().unwrap();
                let node = if op {
                    FormulaBody::and(a.clone(), b.clone())
                } else {
                    FormulaBody::or(a.clone(), b.clone())
                };
                stack.push(node);
                self.walk(used + 2, (val << 2) | code, stack);
                stack.pop();
                stack.push(a);
                stack.push(b);
            }
        }
        if remaining >= 2 && !stack.is_empty() {
            let a = stack.pop().unwrap();
            stack.push(FormulaBody::not(a.clone()));
            self.walk(used + 2, (val << 2) | 0b11, stack);
            stack.pop();
            stack.push(a);
        }
    }
}

fn build_table(m: usize) -> LengthTable {
    let mut entries: Vec<(u64, BigUint)> = Vec::new();
    // Token streams use 10- and 2-bit pieces, so only even body lengths
    // can parse; odd m − 8 has no valid encodings.
    if m >= 18 && (m - 8) % 2 == 0 {
        let max_k = m.min(255) as u8;
        for k in 1..=max_k {
            let mut e = Enumerator { k, total_bits: m, entries: Vec::new() };
            let mut stack = Vec::new();
            e.walk(8, k as u64, &mut stack);
            entries.extend(e.entries);
        }
    }
    entries.sort_unstable_by_key(|&(v, _)| v);
    let mut prefix = Vec::with_capacity(entries.len() + 1);
    prefix.push(BigUint::zero());
    for (_, sat) in &entries {
        let next = prefix.last().unwrap() + sat;
        prefix.push(next);
    }
    LengthTable { vals: entries.into_iter().map(|(v, _)| v).collect(), prefix }
}

/// The table for encodings of bit length `m`, built on first use and
/// cached. Lengths above 36 are refused: the enumeration grows too fast
/// and the values would no longer fit the table's u64 keys comfortably.
pub fn length_table(m: usize) -> Result<Arc<LengthTable>, Error> {
    if m > 36 {
        return Err(Error::resource(format!(
            "formula table for length {m} exceeds the build budget"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<LengthTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("table cache poisoned");
    Ok(guard.entry(m).or_insert_with(|| Arc::new(build_table(m))).clone())
}
