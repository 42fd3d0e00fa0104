//! Parameterized families that separate ranking notions.
//!
//! Each family takes an arbitrary predicate as a parameter and forces
//! enough structure that some combination of the built sets has an easy
//! closed-form ranker even though the individual sets inherit the
//! parameter's difficulty. The decoders at the bottom run the other way:
//! they read a parameter membership back out of the gap between ranks of
//! forced members.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::Error;
use crate::lexorder::{rank_sigma_star, shift, BStr, Rank};
use crate::setmodel::{MemberFn, RankedSet, Ranker, VerifyReport};

/// Strong rank within Σ*1: whole shorter lengths contribute 2^(L−1) − 1
/// members, and odd values at x's own length count as (v − 1)/2 + 1.
pub fn rank_ends_in_one(x: &BStr) -> Rank {
    let l = x.len();
    if l == 0 {
        return Rank::zero();
    }
    let mut r = (BigUint::one() << (l - 1)) - 1u32;
    let v = x.value();
    if v >= BigUint::one() {
        r += (v - 1u32) / 2u32 + 1u32;
    }
    Rank::from_biguint(r)
}

/// Strong rank within Σ+.
pub fn rank_nonempty(x: &BStr) -> Rank {
    rank_sigma_star(x)
        .checked_sub(&Rank::one())
        .expect("every string has positive rank")
}

fn with_suffix(c: &MemberFn, suffix: &'static [u8]) -> impl Fn(&BStr) -> bool {
    let c = c.clone();
    move |x: &BStr| {
        let bits = x.bits();
        bits.len() >= suffix.len()
            && &bits[bits.len() - suffix.len()..] == suffix
            && c(&BStr::from_bits(&bits[..bits.len() - suffix.len()]))
    }
}

/// Two pairs of sets built over one parameter predicate C. The first
/// pair unions to Σ+ and the primed pair intersects to Σ*1, so both
/// combinations carry closed-form strong rankers no matter what C is,
/// while the parts are exactly as hard as C itself.
pub struct GreenWitnesses {
    pub a: RankedSet,
    pub b: RankedSet,
    pub a_prime: RankedSet,
    pub b_prime: RankedSet,
    pub r_union: Ranker,
    pub r_intersect: Ranker,
}

pub fn green_witnesses(c: MemberFn) -> GreenWitnesses {
    let c0 = with_suffix(&c, &[0]);
    let c1 = with_suffix(&c, &[1]);
    let c00 = with_suffix(&c, &[0, 0]);
    let c10 = with_suffix(&c, &[1, 0]);
    GreenWitnesses {
        a: RankedSet::new("green_A", move |x: &BStr| x.last_bit() == Some(1) || c0(x)),
        b: RankedSet::new("green_B", move |x: &BStr| x.last_bit() == Some(0) || c1(x)),
        a_prime: RankedSet::new("green_Aprime", move |x: &BStr| {
            x.last_bit() == Some(1) || c00(x)
        }),
        b_prime: RankedSet::new("green_Bprime", move |x: &BStr| {
            x.last_bit() == Some(1) || c10(x)
        }),
        r_union: Ranker::strong(rank_nonempty),
        r_intersect: Ranker::strong(rank_ends_in_one),
    }
}

/// The shape shared by diagonalized sets: strings shorter than the suffix
/// width are excluded and every block x·{suffixes} holds exactly one
/// member. Any set with this shape is weakly ranked by the block prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairPattern {
    pub arity: usize,
}

impl PairPattern {
    fn suffix_len(&self) -> usize {
        self.arity.trailing_zeros() as usize
    }

    /// Exhaustively checks the pattern over all blocks of strings with
    /// length at most `max_len`.
    pub fn check(&self, member: &MemberFn, max_len: usize) -> VerifyReport {
        let w = self.suffix_len();
        let mut report = VerifyReport::new(format!("exactly one member per {}-block", self.arity));
        for x in crate::lexorder::strings_up_to_len(max_len) {
            if x.len() < w {
                report.checked += 1;
                if member(&x) {
                    report.fail(&x, "not in set", "in set", "short strings are excluded");
                }
            }
        }
        if max_len < w {
            return report;
        }
        for prefix in crate::lexorder::strings_up_to_len(max_len - w) {
            let mut hits = Vec::new();
            for s in 0..self.arity {
                let v = prefix.concat(&BStr::from_value(w, &BigUint::from(s)));
                if member(&v) {
                    hits.push(v);
                }
            }
            report.checked += 1;
            if hits.len() != 1 {
                report.fail(
                    &prefix,
                    "one member in the block",
                    format!("{} members", hits.len()),
                    "block selection",
                );
            }
        }
        report
    }
}

/// The weak ranker every pattern-conforming set shares: a member x·s maps
/// to rank_sigma_star(x), short strings to 0. Only the pattern widths 2
/// and 4 are supported.
pub fn paired_weak_ranker(arity: usize) -> Result<(PairPattern, Ranker), Error> {
    if arity != 2 && arity != 4 {
        return Err(Error::config(format!(
            "block width {arity} is not supported; use 2 or 4"
        )));
    }
    let w = arity.trailing_zeros() as usize;
    let ranker = Ranker::weak(move |x: &BStr| {
        if x.len() < w {
            Rank::zero()
        } else {
            rank_sigma_star(&BStr::from_bits(&x.bits()[..x.len() - w]))
        }
    });
    Ok((PairPattern { arity }, ranker))
}

/// A set that forces x·000 and x·010 for every x and adds x·001 and
/// x·100 exactly when x lies in the parameter set. Membership in the
/// parameter set is then one rank gap away.
pub fn cpo_set(param: MemberFn) -> RankedSet {
    RankedSet::new("cpo_A", move |v: &BStr| {
        let bits = v.bits();
        if bits.len() < 3 {
            return false;
        }
        let x = BStr::from_bits(&bits[..bits.len() - 3]);
        match &bits[bits.len() - 3..] {
            [0, 0, 0] | [0, 1, 0] => true,
            [0, 0, 1] | [1, 0, 0] => param(&x),
            _ => false,
        }
    })
}

/// Decides the parameter set behind `cpo_set` from any ranker correct on
/// its members: both probes are forced members, and the gap between them
/// exceeds one exactly when x·001 sits in between.
pub fn cpo_decode(r_a: &Ranker, x: &BStr) -> Result<bool, Error> {
    let lo = r_a.rank_on_member(&x.appended(0).appended(0).appended(0))?;
    let hi = r_a.rank_on_member(&x.appended(0).appended(1).appended(0))?;
    let gap = hi.checked_sub(&lo).ok_or_else(|| {
        Error::contract(format!("ranks out of order at the block of {x}: {lo} then {hi}"))
    })?;
    Ok(gap > Rank::one())
}

/// Builds A′ = {y0 : y ∈ A} ∪ {y1 : y ∉ A} and B = Σ*0 ∪ {y1 : y ∈ A′}.
/// A′ follows the width-2 block pattern, and B's rank structure lets a
/// single membership in A′ be read off two forced probes.
pub fn tyef_sets(a: MemberFn) -> (RankedSet, RankedSet) {
    let a_prime_member = move |v: &BStr| match (v.parent(), v.last_bit()) {
        (Some(y), Some(0)) => a(&y),
        (Some(y), Some(1)) => !a(&y),
        _ => false,
    };
    let a_prime = RankedSet::new("tyef_Aprime", a_prime_member.clone());
    let b = RankedSet::new("tyef_B", move |v: &BStr| match (v.parent(), v.last_bit()) {
        (Some(_), Some(0)) => true,
        (Some(y), Some(1)) => a_prime_member(&y),
        _ => false,
    });
    (a_prime, b)
}

/// Detects x ∈ A′ through B's ranker: x0 and shift(x,1)·0 are both in B,
/// and x1 lies strictly between them in B exactly when x ∈ A′.
pub fn tyef_detect(r_b: &Ranker, x: &BStr) -> Result<bool, Error> {
    let lo = r_b.rank_on_member(&x.appended(0))?;
    let hi = r_b.rank_on_member(&shift(x, 1).appended(0))?;
    let gap = hi.checked_sub(&lo).ok_or_else(|| {
        Error::contract(format!("ranks out of order around {x}: {lo} then {hi}"))
    })?;
    Ok(gap == Rank::from(2u64))
}
