//! Paired satisfiability-counting languages over a shared beacon skeleton.
//!
//! A string of even length 2m+2 parses as alpha, a 2-bit separator, and an
//! m-bit tail beta. Beacons pin the separator to 00 or 11 and the tail to
//! all zeros; they sit at the bottom and top of every alpha block. The
//! assignment family A1 pins the separator to 01 and asks that alpha be a
//! valid formula encoding and beta a padded satisfying assignment; B1 is
//! the rest of the separator-01 strings. A = A1 ∪ Beacons and B = B1 ∪
//! Beacons then intersect exactly in the beacons, and the rank gap between
//! the two beacons of an alpha block reveals the formula's count of
//! satisfying assignments through either ranker.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::constructions::formula::{decode_formula, padded_sat, sat_below, sat_total};
use crate::constructions::tables::length_table;
use crate::error::Error;
use crate::lexorder::{BStr, Rank};
use crate::setmodel::{RankedSet, Ranker};

struct Parse<'a> {
    m: usize,
    alpha: &'a [u8],
    sep: u8,
    tail: &'a [u8],
}

fn parse(x: &BStr) -> Option<Parse<'_>> {
    let bits = x.bits();
    let l = bits.len();
    if l < 2 || l % 2 != 0 {
        return None;
    }
    let m = (l - 2) / 2;
    Some(Parse {
        m,
        alpha: &bits[..m],
        sep: bits[m] * 2 + bits[m + 1],
        tail: &bits[m + 2..],
    })
}

fn val_big(bits: &[u8]) -> BigUint {
    let mut v = BigUint::zero();
    for &b in bits {
        v <<= 1;
        if b == 1 {
            v += 1u32;
        }
    }
    v
}

fn val_u64(bits: &[u8]) -> u64 {
    bits.iter().fold(0, |v, &b| (v << 1) | b as u64)
}

fn is_beacon(x: &BStr) -> bool {
    match parse(x) {
        Some(p) => (p.sep == 0b00 || p.sep == 0b11) && p.tail.iter().all(|&b| b == 0),
        None => false,
    }
}

fn in_a1(x: &BStr) -> bool {
    match parse(x) {
        Some(p) if p.sep == 0b01 => match decode_formula(&BStr::from_bits(p.alpha)) {
            Some(f) => padded_sat(&f, p.tail),
            None => false,
        },
        _ => false,
    }
}

fn in_b1(x: &BStr) -> bool {
    matches!(parse(x), Some(p) if p.sep == 0b01) && !in_a1(x)
}

fn in_a(x: &BStr) -> bool {
    in_a1(x) || is_beacon(x)
}

fn in_b(x: &BStr) -> bool {
    in_b1(x) || is_beacon(x)
}

/// Strong rank within the beacon family. On a beacon alpha·00·0^m this is
/// 2·rank_sigma_star(alpha) − 1, and on alpha·11·0^m it is
/// 2·rank_sigma_star(alpha); the general form below extends those values
/// to every input.
pub fn rank_beacons(x: &BStr) -> Rank {
    let l = x.len();
    let mut r = BigUint::zero();
    let mut k = 0usize;
    while 2 * k + 2 < l {
        r += BigUint::one() << (k + 1);
        k += 1;
    }
    if let Some(p) = parse(x) {
        r += val_big(p.alpha) << 1;
        r += 1u32;
        if p.sep == 0b11 {
            r += 1u32;
        }
    }
    Rank::from_biguint(r)
}

/// Strong rank within A ∪ B: all separator-01 strings plus the beacons.
/// Each alpha block holds 2^m + 2 members, so the rank walks whole lengths,
/// then whole blocks, then the position inside alpha's own block.
pub fn rank_thm30_union(x: &BStr) -> Rank {
    let l = x.len();
    let mut r = BigUint::zero();
    let mut k = 0usize;
    while 2 * k + 2 < l {
        r += (BigUint::one() << k) * ((BigUint::one() << k) + 2u32);
        k += 1;
    }
    if let Some(p) = parse(x) {
        let block = (BigUint::one() << p.m) + 2u32;
        r += val_big(p.alpha) * &block;
        r += match p.sep {
            0b00 => BigUint::one(),
            0b01 => BigUint::from(2u32) + val_big(p.tail),
            0b10 => BigUint::one() + (BigUint::one() << p.m),
            _ => block,
        };
    }
    Rank::from_biguint(r)
}

fn rank_a1(x: &BStr) -> Result<Rank, Error> {
    let l = x.len();
    let mut r = BigUint::zero();
    let mut k = 0usize;
    while 2 * k + 2 < l {
        r += length_table(k)?.total();
        k += 1;
    }
    if let Some(p) = parse(x) {
        let table = length_table(p.m)?;
        r += table.sum_below(val_u64(p.alpha));
        if p.sep >= 0b01 {
            if let Some(f) = decode_formula(&BStr::from_bits(p.alpha)) {
                if p.sep == 0b01 {
                    r += sat_below(&f, p.m, val_u64(p.tail))?;
                } else {
                    r += sat_total(&f)?;
                }
            }
        }
    }
    Ok(Rank::from_biguint(r))
}

fn rank_b1(x: &BStr) -> Result<Rank, Error> {
    let l = x.len();
    let mut r = BigUint::zero();
    let mut k = 0usize;
    while 2 * k + 2 < l {
        r += (BigUint::one() << (2 * k)) - length_table(k)?.total();
        k += 1;
    }
    if let Some(p) = parse(x) {
        let table = length_table(p.m)?;
        r += (val_big(p.alpha) << p.m) - table.sum_below(val_u64(p.alpha));
        let formula = decode_formula(&BStr::from_bits(p.alpha));
        match p.sep {
            0b00 => {}
            0b01 => {
                let vt = val_u64(p.tail);
                let sat = match &formula {
                    Some(f) => sat_below(f, p.m, vt)?,
                    None => 0,
                };
                r += vt + 1 - sat;
            }
            _ => {
                let sat = match &formula {
                    Some(f) => sat_total(f)?,
                    None => BigUint::zero(),
                };
                r += (BigUint::one() << p.m) - sat;
            }
        }
    }
    Ok(Rank::from_biguint(r))
}

/// Strong rank within A = A1 ∪ Beacons. The two parts are disjoint, so
/// their ranks add.
pub fn rank_thm30_a(x: &BStr) -> Result<Rank, Error> {
    Ok(rank_beacons(x) + rank_a1(x)?)
}

/// Strong rank within B = B1 ∪ Beacons.
pub fn rank_thm30_b(x: &BStr) -> Result<Rank, Error> {
    Ok(rank_beacons(x) + rank_b1(x)?)
}

/// Strong rank within the join {y0 : y ∈ A} ∪ {y1 : y ∈ B}: rank(y1) is
/// rank-union(y) + rank-intersect(y), and rank(y0) subtracts one exactly
/// when y1 itself is a member, i.e. when y ∈ B.
pub fn rank_thm30_join(x: &BStr) -> Rank {
    let Some(y) = x.parent() else {
        return Rank::zero();
    };
    let at_one = rank_thm30_union(&y) + rank_beacons(&y);
    if x.last_bit() == Some(0) && in_b(&y) {
        at_one
            .checked_sub(&Rank::one())
            .expect("a member's one-branch has positive rank")
    } else {
        at_one
    }
}

/// The paired languages with their shared closed-form rankers.
pub struct Thm30Sets {
    pub a: RankedSet,
    pub b: RankedSet,
    pub r_intersect: Ranker,
    pub r_union: Ranker,
    pub r_join: Ranker,
}

pub fn thm30_sets() -> Thm30Sets {
    Thm30Sets {
        a: RankedSet::new("thm30_A", in_a).with_ranker(Ranker::strong_fallible(rank_thm30_a)),
        b: RankedSet::new("thm30_B", in_b).with_ranker(Ranker::strong_fallible(rank_thm30_b)),
        r_intersect: Ranker::strong(rank_beacons),
        r_union: Ranker::strong(rank_thm30_union),
        r_join: Ranker::strong(rank_thm30_join),
    }
}

/// The beacon family on its own, with its strong ranker.
pub fn beacons_set() -> RankedSet {
    RankedSet::new("beacons", is_beacon).with_ranker(Ranker::strong(rank_beacons))
}

fn beacon_pair(alpha: &BStr) -> (BStr, BStr) {
    let m = alpha.len();
    let mut lo = alpha.bits().to_vec();
    let mut hi = lo.clone();
    lo.extend_from_slice(&[0, 0]);
    hi.extend_from_slice(&[1, 1]);
    lo.resize(2 * m + 2, 0);
    hi.resize(2 * m + 2, 0);
    (BStr::from_bits(&lo), BStr::from_bits(&hi))
}

/// Reads the satisfying-assignment count of the formula encoded by `alpha`
/// out of any ranker that is correct on A's members: the gap between the
/// two beacons of alpha's block, minus the high beacon itself.
pub fn extract_sat_count_a(r_a: &Ranker, alpha: &BStr) -> Result<Rank, Error> {
    let (lo, hi) = beacon_pair(alpha);
    let r_lo = r_a.rank_on_member(&lo)?;
    let r_hi = r_a.rank_on_member(&hi)?;
    r_hi.checked_sub(&r_lo)
        .and_then(|gap| gap.checked_sub(&Rank::one()))
        .ok_or_else(|| {
            Error::contract(format!(
                "beacon ranks out of order at {alpha}: {r_lo} then {r_hi}"
            ))
        })
}

/// The same count through B's side: the block's gap counts the falsifying
/// assignments plus the high beacon, so the count is 1 + 2^|alpha| − gap.
pub fn extract_sat_count_b(r_b: &Ranker, alpha: &BStr) -> Result<Rank, Error> {
    let (lo, hi) = beacon_pair(alpha);
    let r_lo = r_b.rank_on_member(&lo)?;
    let r_hi = r_b.rank_on_member(&hi)?;
    let gap = r_hi.checked_sub(&r_lo).ok_or_else(|| {
        Error::contract(format!(
            "beacon ranks out of order at {alpha}: {r_lo} then {r_hi}"
        ))
    })?;
    (Rank::one() + Rank::two_pow(alpha.len() as u64))
        .checked_sub(&gap)
        .ok_or_else(|| {
            Error::contract(format!(
                "beacon rank gap {gap} at {alpha} exceeds the block size"
            ))
        })
}
