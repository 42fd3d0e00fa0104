//! A satisfiability-counting language whose strong ranker needs no
//! counting at all.
//!
//! Strings of even length 2m+2 with a 1 at position m parse as x·1·y·b.
//! For every pair (x, y) exactly one of x1y0 and x1y1 joins the set: the
//! 1-tagged string when x encodes a formula that y satisfies (family A1),
//! the 0-tagged one otherwise (family A0). Because the choice only moves
//! a member by one value step, ranking A0 ∪ A1 reduces to counting pairs
//! under an affine bound plus a single membership test. The anchor family
//! A2 = {x·0^(|x|+1)·1} is disjoint by the bit at position m and makes
//! every block locatable, so A = A0 ∪ A1 ∪ A2 has a cheap strong ranker.
//! Intersecting with B = Σ*1 strips A0 away, and the A∩B rank gap between
//! consecutive anchors is exactly the satisfying-assignment count.

use num_bigint::BigUint;
use num_traits::{CheckedSub, One, Zero};

use crate::constructions::formula::{decode_formula, padded_sat, sat_below};
use crate::constructions::tables::length_table;
use crate::constructions::witnesses::rank_ends_in_one;
use crate::error::Error;
use crate::lexorder::{shift, BStr, Rank};
use crate::setmodel::{RankedSet, Ranker};

struct PairParse<'a> {
    x: &'a [u8],
    y: &'a [u8],
    last: u8,
}

fn parse_pair(v: &BStr) -> Option<PairParse<'_>> {
    let bits = v.bits();
    let l = bits.len();
    if l < 2 || l % 2 != 0 {
        return None;
    }
    let m = (l - 2) / 2;
    if bits[m] != 1 {
        return None;
    }
    Some(PairParse { x: &bits[..m], y: &bits[m + 1..2 * m + 1], last: bits[2 * m + 1] })
}

fn pair_is_sat(x: &[u8], y: &[u8]) -> bool {
    match decode_formula(&BStr::from_bits(x)) {
        Some(f) => padded_sat(&f, y),
        None => false,
    }
}

fn in_a01(v: &BStr) -> bool {
    match parse_pair(v) {
        Some(p) => pair_is_sat(p.x, p.y) == (p.last == 1),
        None => false,
    }
}

fn in_a1(v: &BStr) -> bool {
    matches!(parse_pair(v), Some(p) if p.last == 1 && pair_is_sat(p.x, p.y))
}

fn in_a2(v: &BStr) -> bool {
    let bits = v.bits();
    let l = bits.len();
    if l < 2 || l % 2 != 0 {
        return false;
    }
    let m = (l - 2) / 2;
    bits[m..2 * m + 1].iter().all(|&b| b == 0) && bits[2 * m + 1] == 1
}

fn in_a(v: &BStr) -> bool {
    in_a01(v) || in_a2(v)
}

fn in_a_cap_b(v: &BStr) -> bool {
    in_a1(v) || in_a2(v)
}

/// Number of pairs (a, b) in [0, 2^m)² with a·s + b·g + off ≤ t. Assumes
/// g ≥ 1 and non-interleaving rows, s > g·(2^m − 1): then the count is a
/// run of full rows followed by at most one partial row.
fn count_affine_pairs(m: usize, s: &BigUint, g: &BigUint, off: &BigUint, t: &BigUint) -> BigUint {
    let size = BigUint::one() << m;
    let Some(budget) = t.checked_sub(off) else {
        return BigUint::zero();
    };
    let row_span = g * (&size - 1u32);
    debug_assert!(s > &row_span);
    let full = match budget.checked_sub(&row_span) {
        Some(extra) => (extra / s + 1u32).min(size.clone()),
        None => BigUint::zero(),
    };
    let mut count = &full * &size;
    if full < size {
        if let Some(rem) = budget.checked_sub(&(&full * s)) {
            count += (rem / g + 1u32).min(size);
        }
    }
    count
}

fn val_u64(bits: &[u8]) -> u64 {
    bits.iter().fold(0, |v, &b| (v << 1) | b as u64)
}

fn rank_pairs(v: &BStr) -> Rank {
    let l = v.len();
    let mut r = BigUint::zero();
    let mut k = 0usize;
    while 2 * k + 2 < l {
        r += BigUint::one() << (2 * k);
        k += 1;
    }
    if l >= 2 && l % 2 == 0 {
        let m = (l - 2) / 2;
        let s = BigUint::one() << (m + 2);
        let g = BigUint::from(2u32);
        // Treating every pair as if its 1-tagged string were the member
        // overshoots by one exactly when v itself is a 0-tagged member.
        let off = (BigUint::one() << (m + 1)) + 1u32;
        r += count_affine_pairs(m, &s, &g, &off, &v.value());
        if let Some(p) = parse_pair(v) {
            if p.last == 0 && !pair_is_sat(p.x, p.y) {
                r += 1u32;
            }
        }
    }
    Rank::from_biguint(r)
}

fn rank_a2(v: &BStr) -> Rank {
    let l = v.len();
    let mut r = BigUint::zero();
    let mut k = 0usize;
    while 2 * k + 2 < l {
        r += BigUint::one() << k;
        k += 1;
    }
    if l >= 2 && l % 2 == 0 {
        let m = (l - 2) / 2;
        if let Some(less) = v.value().checked_sub(&BigUint::one()) {
            r += ((less >> (m + 2)) + 1u32).min(BigUint::one() << m);
        }
    }
    Rank::from_biguint(r)
}

/// Strong rank within A = A0 ∪ A1 ∪ A2; the families are disjoint, so
/// their ranks add.
pub fn rank_thm11_a(v: &BStr) -> Rank {
    rank_pairs(v) + rank_a2(v)
}

/// Strong rank within A ∩ B = A1 ∪ A2. Unlike the full set, this one
/// counts satisfying assignments through the per-length tables.
pub fn rank_thm11_a_cap_b(v: &BStr) -> Result<Rank, Error> {
    let l = v.len();
    let mut r = BigUint::zero();
    let mut k = 0usize;
    while 2 * k + 2 < l {
        r += length_table(k)?.total();
        k += 1;
    }
    if l >= 2 && l % 2 == 0 {
        let m = (l - 2) / 2;
        let table = length_table(m)?;
        let bits = v.bits();
        r += table.sum_below(val_u64(&bits[..m]));
        if let Some(f) = decode_formula(&BStr::from_bits(&bits[..m])) {
            let rest = val_u64(&bits[m..]);
            let threshold = (1u64 << (m + 1)) + 1;
            if rest >= threshold {
                r += sat_below(&f, m, (rest - threshold) / 2)?;
            }
        }
    }
    Ok(rank_a2(v) + Rank::from_biguint(r))
}

/// The language, its Σ*1 companion, and their intersection, each with its
/// strong ranker.
pub struct Thm11Sets {
    pub a: RankedSet,
    pub b: RankedSet,
    pub a_cap_b: RankedSet,
}

pub fn thm11_sets() -> Thm11Sets {
    Thm11Sets {
        a: RankedSet::new("thm11_A", in_a).with_ranker(Ranker::strong(rank_thm11_a)),
        b: RankedSet::new("thm11_B", |v: &BStr| v.last_bit() == Some(1))
            .with_ranker(Ranker::strong(rank_ends_in_one)),
        a_cap_b: RankedSet::new("thm11_A_cap_B", in_a_cap_b)
            .with_ranker(Ranker::strong_fallible(rank_thm11_a_cap_b)),
    }
}

/// Reads the satisfying-assignment count of the formula encoded by `x`
/// from any ranker correct on (A ∩ B)'s members: between the anchors of x
/// and its shortlex successor lie exactly the A1 strings of x's block,
/// plus the successor anchor itself.
pub fn thm11_extract(r_ab: &Ranker, x: &BStr) -> Result<Rank, Error> {
    let anchor = |u: &BStr| {
        let mut bits = u.bits().to_vec();
        bits.resize(2 * u.len() + 1, 0);
        bits.push(1);
        BStr::from_bits(&bits)
    };
    let lo = r_ab.rank_on_member(&anchor(x))?;
    let hi = r_ab.rank_on_member(&anchor(&shift(x, 1)))?;
    hi.checked_sub(&lo)
        .and_then(|gap| gap.checked_sub(&Rank::one()))
        .ok_or_else(|| {
            Error::contract(format!("anchor ranks out of order at {x}: {lo} then {hi}"))
        })
}
