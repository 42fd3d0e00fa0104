//! Higher-order operations on rankers and compressions.
//!
//! Each operation here takes certified structure for one or two sets and
//! returns the corresponding structure for a derived set: complements,
//! joins, symmetric differences, unions with disjoint sets, and the
//! decoding/strengthening procedures that exploit a ranker's arithmetic.
//! The returned closures re-check the arithmetic facts they rely on and
//! report a contract violation instead of producing a wrong rank.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::lexorder::{rank_sigma_star, shift, unrank, BStr, Rank, ShortlexIter};
use crate::setmodel::{
    brute_rank, nth_member, Compression, MapFn, MemberFn, Partial, RankFn, RankOrOut, RankedSet,
    Ranker,
};

/// A polynomial with non-negative integer coefficients `c_0..c_d`,
/// evaluated at naturals. Non-negative coefficients make it monotonically
/// non-decreasing, which the length-bound arguments below depend on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<u64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<u64>) -> Self {
        Polynomial { coeffs }
    }

    /// `c_0 + c_1 n + … + c_d n^d`.
    pub fn eval(&self, n: u64) -> u64 {
        let mut acc: u128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * n as u128 + c as u128;
        }
        u64::try_from(acc).expect("polynomial value exceeds u64")
    }

    pub fn eval_len(&self, n: usize) -> usize {
        self.eval(n as u64) as usize
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

fn strong_fn(r: &Ranker, what: &str) -> Result<RankFn, Error> {
    match r {
        Ranker::Strong(f) => Ok(f.clone()),
        other => Err(Error::config(format!(
            "{what} must be a strong ranker, got {}",
            other.kind()
        ))),
    }
}

/// Which of the two boolean combinations a known ranker covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BooleanMode {
    HaveUnion,
    HaveIntersection,
}

/// Derives a strong ranker for A∩B from strong rankers of A, B, and A∪B
/// (mode `HaveUnion`), or for A∪B from A, B, and A∩B (`HaveIntersection`),
/// using rank_{A∩B}(x) + rank_{A∪B}(x) = rank_A(x) + rank_B(x).
pub fn boolean_identity_rank(
    ra: &Ranker,
    rb: &Ranker,
    known: &Ranker,
    mode: BooleanMode,
) -> Result<Ranker, Error> {
    let ra = strong_fn(ra, "rank of the first set")?;
    let rb = strong_fn(rb, "rank of the second set")?;
    let known = strong_fn(
        known,
        match mode {
            BooleanMode::HaveUnion => "rank of the union",
            BooleanMode::HaveIntersection => "rank of the intersection",
        },
    )?;
    Ok(Ranker::strong_fallible(move |x| {
        let a = ra(x)?;
        let b = rb(x)?;
        let k = known(x)?;
        (a.clone() + &b).checked_sub(&k).ok_or_else(|| {
            Error::contract(format!(
                "rank identity violated at {x}: {a} + {b} < {k}"
            ))
        })
    }))
}

/// Strong ranker for the complement: rank_{Ā}(x) = rank_{Σ*}(x) − rank_A(x).
pub fn complement_strong(ra: &Ranker) -> Result<Ranker, Error> {
    let ra = strong_fn(ra, "complement input")?;
    Ok(Ranker::strong_fallible(move |x| {
        let r = ra(x)?;
        rank_sigma_star(x).checked_sub(&r).ok_or_else(|| {
            Error::contract(format!(
                "rank {r} at {x} exceeds the rank of the whole order"
            ))
        })
    }))
}

/// Membership predicate for the join A⊕B = {x0 : x∈A} ∪ {x1 : x∈B}.
pub fn join_member(ma: MemberFn, mb: MemberFn) -> MemberFn {
    Arc::new(move |w: &BStr| match (w.parent(), w.last_bit()) {
        (Some(x), Some(0)) => ma(&x),
        (Some(x), Some(1)) => mb(&x),
        _ => false,
    })
}

/// Strong ranker for A⊕B from strong rankers of A and B.
///
/// rank(ε) = 0, rank(x1) = rank_A(x) + rank_B(x), and
/// rank(x0) = rank_A(x) + rank_B(shift(x,−1)) except at x = ε, where the
/// shift would clamp back to ε and double-count; there rank(0) = rank_A(ε).
pub fn join_strong(ra: &Ranker, rb: &Ranker) -> Result<Ranker, Error> {
    let ra = strong_fn(ra, "join left input")?;
    let rb = strong_fn(rb, "join right input")?;
    Ok(Ranker::strong_fallible(move |w| {
        let Some(x) = w.parent() else {
            return Ok(Rank::zero());
        };
        match w.last_bit() {
            Some(1) => Ok(ra(&x)? + rb(&x)?),
            _ => {
                if x.is_empty() {
                    ra(&x)
                } else {
                    Ok(ra(&x)? + rb(&shift(&x, -1))?)
                }
            }
        }
    }))
}

/// Compression of A⊕B onto the full order from compressions of A and B:
/// h(x0) = f_A(x)·0 lands on the strings ending in 0, and
/// h(x1) = shift(g_B(x)·0, −1) lands on their shortlex predecessors, which
/// are exactly the remaining strings (ε and those ending in 1).
pub fn join_compress(fa: &Compression, gb: &Compression) -> Compression {
    let fmap = fa.map.clone();
    let gmap = gb.map.clone();
    let mut out = Compression::new(move |w: &BStr| {
        let Some(x) = w.parent() else {
            return Ok(Partial::Undefined);
        };
        match w.last_bit() {
            Some(0) => Ok(fmap(&x)?.map(|v| v.appended(0))),
            _ => Ok(gmap(&x)?.map(|v| shift(&v.appended(0), -1))),
        }
    });
    if let (Some(fw), Some(gw)) = (fa.witness.clone(), gb.witness.clone()) {
        out = out.with_witness(move |z: &BStr| {
            if z.last_bit() == Some(0) {
                let v = z.parent().expect("a string ending in 0 is nonempty");
                Ok(fw(&v)?.map(|x| x.appended(0)))
            } else {
                // The successor of z ends in 0; its prefix is g_B's target.
                let w0 = shift(z, 1);
                let v = w0.parent().expect("the successor of any string is nonempty");
                Ok(gw(&v)?.map(|y| y.appended(1)))
            }
        });
    }
    out
}

/// Assembles the join of two sets, carrying over whatever certified
/// structure both sides have.
pub fn join_sets(a: &RankedSet, b: &RankedSet) -> RankedSet {
    let mut out = RankedSet::with_member_fn(
        format!("join({},{})", a.name, b.name),
        join_member(a.member.clone(), b.member.clone()),
    );
    if let (Some(ra), Some(rb)) = (&a.ranker, &b.ranker) {
        if let Ok(r) = join_strong(ra, rb) {
            out = out.with_ranker(r);
        }
    }
    if let (Some(fa), Some(gb)) = (&a.compressor, &b.compressor) {
        out = out.with_compressor(join_compress(fa, gb));
    }
    out
}

/// Semistrong ranker for Ā from a semistrong ranker of A and any ranker
/// correct on members of X = Σ*⊕A (the probe shift(x,1)·0 is always a
/// member of X, so a weak ranker suffices):
///
/// rank_{Ā}(x) = 2·rank_{Σ*}(x) + 1 − rank_X(shift(x,1)·0).
pub fn complement_semistrong_via_join(ha: &Ranker, fx: &Ranker) -> Result<Ranker, Error> {
    let ha = match ha {
        Ranker::Semistrong(f) => f.clone(),
        other => {
            return Err(Error::config(format!(
                "complement input must be a semistrong ranker, got {}",
                other.kind()
            )))
        }
    };
    let fx = fx.clone();
    Ok(Ranker::semistrong(move |x| {
        match ha(x)? {
            RankOrOut::Rank(_) => Ok(RankOrOut::NotInSet),
            RankOrOut::NotInSet => {
                let probe = shift(x, 1).appended(0);
                let fv = match fx.eval(&probe)? {
                    RankOrOut::Rank(r) => r,
                    RankOrOut::NotInSet => {
                        return Err(Error::contract(format!(
                            "join ranker rejected {probe}, which is always a member"
                        )))
                    }
                };
                let t = rank_sigma_star(x);
                let total = t.clone() + t + Rank::one();
                let r = total.checked_sub(&fv).ok_or_else(|| {
                    Error::contract(format!("complement rank went negative at {x}"))
                })?;
                Ok(RankOrOut::Rank(r))
            }
        }
    }))
}

/// Ranker for the symmetric difference A△(B1∪B2), where B1 ⊆ A is removed
/// and B2 ⊆ Ā is added: rank(x) = rank_A(x) + rank_{B2}(x) − rank_{B1}(x).
///
/// The kind of `f` is preserved. Strong input gives a strong output. A weak
/// input gives a weak output, with the extra requirement that `f` also
/// reports true ranks of A at the members of B2 (the formula evaluates `f`
/// there, outside A); a weak ranker that is junk on B2 produces junk.
/// Semistrong inputs are rejected: the formula needs a rank at every new
/// member, which a semistrong ranker refuses to give off A.
pub fn symdiff_rank(f: &Ranker, rb1: &Ranker, rb2: &Ranker) -> Result<Ranker, Error> {
    let rb1 = strong_fn(rb1, "rank of the removed part")?;
    let rb2 = strong_fn(rb2, "rank of the added part")?;
    let adjust = move |fv: Rank, x: &BStr| -> Result<Rank, Error> {
        let plus = fv + rb2(x)?;
        plus.checked_sub(&rb1(x)?).ok_or_else(|| {
            Error::contract(format!(
                "symmetric-difference rank went negative at {x}"
            ))
        })
    };
    match f {
        Ranker::Strong(g) => {
            let g = g.clone();
            Ok(Ranker::strong_fallible(move |x| adjust(g(x)?, x)))
        }
        Ranker::Weak(g) => {
            let g = g.clone();
            Ok(Ranker::weak_fallible(move |x| adjust(g(x)?, x)))
        }
        Ranker::Semistrong(_) => Err(Error::config(
            "symmetric-difference preserves strong and weak rankers only",
        )),
    }
}

/// The rearrangement map underlying [`subtract_compress`]: with
/// b_1 < b_2 < … the members of B1 and c_1 < c_2 < … the members of B2,
///
/// g(x) = x off B1∪B2, g(c_i) = b_{⌈i/2⌉} for odd i, g(c_i) = c_{i/2} for
/// even i. It maps A−B1 bijectively onto A; on B1 (outside its domain) it
/// is undefined.
fn subtract_rearrange(b1: MemberFn, b2: MemberFn, scan_max_len: usize) -> MapFn {
    Arc::new(move |x: &BStr| {
        let in_b1 = b1(x);
        let in_b2 = b2(x);
        match (in_b1, in_b2) {
            (true, true) => Err(Error::contract(format!(
                "{x} is in both the removed and the relocated set"
            ))),
            (true, false) => Ok(Partial::Undefined),
            (false, false) => Ok(Partial::Defined(x.clone())),
            (false, true) => {
                let i = brute_rank(&*b2, x)
                    .to_u64()
                    .ok_or_else(|| Error::resource("relocation index exceeds u64".to_string()))?;
                let img = if i % 2 == 1 {
                    nth_member(&b1, &Rank::from(i.div_ceil(2)), scan_max_len)?
                } else {
                    nth_member(&b2, &Rank::from(i / 2), scan_max_len)?
                };
                Ok(Partial::Defined(img))
            }
        }
    })
}

/// Compression of A−B1 onto the full order, given a compression `h` of A,
/// a decider for an infinite B1 ⊆ A, and an infinite B2 ⊆ A−B1. The map is
/// h composed with a rearrangement of A−B1 onto A: untouched members stay
/// put, and B2's members are split between filling B1's holes and covering
/// B2 itself. Member indices come from brute-force enumeration scanning up
/// to `scan_max_len`; a B1/B2 overlap found on that prefix is rejected.
pub fn subtract_compress(
    h: &Compression,
    b1: MemberFn,
    b2: &RankedSet,
    scan_max_len: usize,
) -> Result<Compression, Error> {
    let b2m = b2.member.clone();
    for x in ShortlexIter::up_to_len(scan_max_len.min(12)) {
        if b1(&x) && b2m(&x) {
            return Err(Error::contract(format!(
                "removed and relocated sets overlap at {x}"
            )));
        }
    }
    let g = subtract_rearrange(b1.clone(), b2m.clone(), scan_max_len);
    let hmap = h.map.clone();
    let mut out = Compression::new(move |x: &BStr| match g(x)? {
        Partial::Defined(v) => hmap(&v),
        Partial::Undefined => Ok(Partial::Undefined),
    });
    if let Some(hw) = h.witness.clone() {
        // The inverse rearrangement: w stays put off B1∪B2, b_j came from
        // c_{2j−1}, and c_j came from c_{2j}.
        out = out.with_witness(move |z: &BStr| {
            let w = match hw(z)? {
                Partial::Defined(w) => w,
                Partial::Undefined => return Ok(Partial::Undefined),
            };
            let in_b1 = b1(&w);
            let in_b2 = b2m(&w);
            if !in_b1 && !in_b2 {
                return Ok(Partial::Defined(w));
            }
            let which = if in_b1 { &b1 } else { &b2m };
            let j = brute_rank(&**which, &w)
                .to_u64()
                .ok_or_else(|| Error::resource("relocation index exceeds u64".to_string()))?;
            let i = if in_b1 { 2 * j - 1 } else { 2 * j };
            Ok(Partial::Defined(nth_member(&b2m, &Rank::from(i), scan_max_len)?))
        });
    }
    Ok(out)
}

/// Compression of A∪B2 onto the full order, given a compression `f` of A
/// and a B2 disjoint from A.
///
/// Finite B2 (all members within `scan_max_len`): B2's k members take the
/// first k positions in shortlex order and A's image shifts up by k.
/// Infinite B2: A's image moves to the strings starting with 1, and B2's
/// members cover ε and the strings starting with 0 through their own ranks.
pub fn union_compress(
    f: &Compression,
    b2: &RankedSet,
    finite: bool,
    scan_max_len: usize,
) -> Result<Compression, Error> {
    let fmap = f.map.clone();
    let b2m = b2.member.clone();
    if finite {
        let members = b2.members_up_to(scan_max_len);
        let k = i64::try_from(members.len())
            .map_err(|_| Error::resource("finite set too large to index".to_string()))?;
        let b2m2 = b2m.clone();
        let mut out = Compression::new(move |x: &BStr| {
            if b2m2(x) {
                let r = brute_rank(&*b2m2, x)
                    .to_u64()
                    .ok_or_else(|| Error::resource("rank exceeds u64".to_string()))?;
                Ok(Partial::Defined(shift(&BStr::empty(), r as i64 - 1)))
            } else {
                Ok(fmap(x)?.map(|v| shift(&v, k)))
            }
        });
        if let Some(fw) = f.witness.clone() {
            out = out.with_witness(move |z: &BStr| {
                let idx = rank_sigma_star(z)
                    .checked_sub(&Rank::one())
                    .expect("every rank is at least 1")
                    .to_u64()
                    .ok_or_else(|| Error::resource("index exceeds u64".to_string()))?;
                if idx < k as u64 {
                    Ok(Partial::Defined(members[idx as usize].clone()))
                } else {
                    fw(&shift(z, -k))
                }
            });
        }
        Ok(out)
    } else {
        let b2m2 = b2m.clone();
        let mut out = Compression::new(move |x: &BStr| {
            if b2m2(x) {
                let g = unrank(&brute_rank(&*b2m2, x))?;
                if g.is_empty() {
                    Ok(Partial::Defined(BStr::empty()))
                } else {
                    Ok(Partial::Defined(BStr::from_bits(&[0]).concat(&shift(&g, -1))))
                }
            } else {
                Ok(fmap(x)?.map(|v| BStr::from_bits(&[1]).concat(&v)))
            }
        });
        if let Some(fw) = f.witness.clone() {
            out = out.with_witness(move |z: &BStr| {
                if z.is_empty() {
                    return Ok(Partial::Defined(nth_member(&b2m, &Rank::one(), scan_max_len)?));
                }
                let rest = BStr::from_bits(&z.bits()[1..]);
                if z.bits()[0] == 1 {
                    fw(&rest)
                } else {
                    let n = rank_sigma_star(&shift(&rest, 1));
                    Ok(Partial::Defined(nth_member(&b2m, &n, scan_max_len)?))
                }
            });
        }
        Ok(out)
    }
}

/// Recovers the per-string payload of a two-members-per-block language
/// B = {x·f(x)·1} ∪ {x·0^{p(|x|)+1}} from its strong ranker alone, by
/// binary search for the least suffix z of length p(|x|)+1 with
/// rank_B(x·z) = 2·rank_{Σ*}(x). Uses at most p(|x|)+2 ranker calls.
pub fn decode_witness(rb: &Ranker, x: &BStr, p: &Polynomial) -> Result<BStr, Error> {
    let rb = strong_fn(rb, "decoder input")?;
    let suffix_len = p.eval_len(x.len()) + 1;
    let target = {
        let r = rank_sigma_star(x);
        r.clone() + r
    };
    let rank_at = |v: &BigUint| -> Result<Rank, Error> {
        rb(&x.concat(&BStr::from_value(suffix_len, v)))
    };
    let mut lo = BigUint::zero();
    let mut hi = (BigUint::one() << suffix_len) - 1u32;
    while lo < hi {
        let mid = (&lo + &hi) / 2u32;
        if rank_at(&mid)? >= target {
            hi = mid;
        } else {
            lo = &mid + 1u32;
        }
    }
    if rank_at(&lo)? != target {
        return Err(Error::contract(format!(
            "no string in the block of {x} attains rank {target}"
        )));
    }
    Ok(BStr::from_value(suffix_len, &lo))
}

/// Upgrades a semistrong ranker of a nongappy set (every member is
/// followed by another within a polynomial length bound) to a strong one.
///
/// rank(x) is 0 when no member is ≤ x; otherwise it is r(y) for the
/// greatest member y ≤ x. y is recovered bit by bit through queries
/// "is b a prefix of the greatest member ≤ x?" against an exhaustively
/// computed oracle, which certifies its answer by locating the next member
/// z > x with |z| ≤ p(|x|+1) and checking r(y)+1 = r(z).
pub fn strongify_nongappy(
    r: &Ranker,
    p: &Polynomial,
    member: MemberFn,
) -> Result<Ranker, Error> {
    let r = match r {
        Ranker::Semistrong(_) => r.clone(),
        other => {
            return Err(Error::config(format!(
                "strongify input must be a semistrong ranker, got {}",
                other.kind()
            )))
        }
    };
    let p = p.clone();
    Ok(Ranker::strong_fallible(move |x| {
        let mut greatest: Option<BStr> = None;
        for y in ShortlexIter::up_to_len(x.len()) {
            if y > *x {
                break;
            }
            if member(&y) {
                greatest = Some(y);
            }
        }
        if let Some(y) = &greatest {
            let bound = p.eval_len(x.len() + 1);
            let mut next = None;
            for z in ShortlexIter::from(x.successor()) {
                if z.len() > bound {
                    break;
                }
                if member(&z) {
                    next = Some(z);
                    break;
                }
            }
            let z = next.ok_or_else(|| {
                Error::contract(format!(
                    "nongappiness violated: no member follows {x} within length {bound}"
                ))
            })?;
            let ry = r.rank_on_member(y)?;
            let rz = r.rank_on_member(&z)?;
            if ry.clone() + Rank::one() != rz {
                return Err(Error::contract(format!(
                    "ranks of consecutive members {y} and {z} are {ry} and {rz}"
                )));
            }
        }
        let l_oracle = |b: &BStr| -> bool {
            match &greatest {
                Some(y) => y.starts_with(b),
                None => false,
            }
        };
        if !l_oracle(&BStr::empty()) {
            return Ok(Rank::zero());
        }
        let mut b = BStr::empty();
        loop {
            if l_oracle(&b.appended(0)) {
                b.push(0);
            } else if l_oracle(&b.appended(1)) {
                b.push(1);
            } else {
                break;
            }
        }
        r.rank_on_member(&b)
    }))
}
