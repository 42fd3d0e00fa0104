//! Retargeting compressions between the full string space and other
//! target sets, plus honesty normalization, collision scans, and the
//! selector/co-enumerator decision procedures, all at step-budgeted
//! desk scale.
//!
//! A compression into the full space can be redirected into any
//! infinite target set by reading its output ordinally: the value's
//! shortlex rank picks the same-positioned member of the target. The
//! reverse direction reads a target member's position inside the
//! target and emits the string of that shortlex rank. Both directions
//! come in a decidable-target flavor (`retarget_rec`/`untarget_rec`)
//! and an enumerated-target flavor (`retarget_re`/`untarget_re`) where
//! partiality is a value, never an exception.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::combinators::Polynomial;
use crate::error::Error;
use crate::lexorder::{rank_sigma_star, shortlex_cmp, unrank, BStr, Rank, ShortlexIter};
use crate::setmodel::{Compression, MemberFn, Partial, PartialFn, RankedSet};

/// A (possibly gappy) enumeration of a set: slot `i` either produces a
/// string or stays silent. The output sequence is the subsequence of
/// produced strings; `distinct` promises it has no repetitions.
#[derive(Clone)]
pub struct Enumerator {
    pub at: Arc<dyn Fn(u64) -> Option<BStr> + Send + Sync>,
    pub distinct: bool,
}

impl Enumerator {
    pub fn new(at: impl Fn(u64) -> Option<BStr> + Send + Sync + 'static, distinct: bool) -> Self {
        Enumerator { at: Arc::new(at), distinct }
    }

    /// Enumerates a decidable set in shortlex order: slot `i` produces
    /// the `i`-th string of the full space exactly when it is a member.
    pub fn from_member(member: MemberFn) -> Self {
        Enumerator::new(
            move |i| {
                let x = BStr::from_index(&BigUint::from(i));
                member(&x).then_some(x)
            },
            true,
        )
    }
}

/// 1-based position of `v` inside the decidable set `member`, or
/// `None` when `v` is not a member. Always terminates: only strings up
/// to `v` in shortlex order are inspected.
fn position_in(member: &MemberFn, v: &BStr) -> Option<u64> {
    if !member(v) {
        return None;
    }
    let count = ShortlexIter::up_to_len(v.len())
        .filter(|y| shortlex_cmp(y, v) != std::cmp::Ordering::Greater && member(y))
        .count();
    Some(count as u64)
}

/// Redirects a compression into the full space so it lands in the
/// decidable set `b` instead: the new map sends `x` to the `n`-th
/// member of `b`, where `n` is the shortlex rank of the old value.
/// Members are searched among strings up to `scan_max_len`; running
/// out of them is a resource error. When the original carries a
/// witness, the redirected compression does too.
pub fn retarget_rec(f: &Compression, b: &RankedSet, scan_max_len: usize) -> Compression {
    let map = f.map.clone();
    let member = b.member.clone();
    let name = b.name.clone();
    let new_map = move |x: &BStr| -> Result<Partial<BStr>, Error> {
        let v = match map(x)? {
            Partial::Undefined => return Ok(Partial::Undefined),
            Partial::Defined(v) => v,
        };
        let n = rank_sigma_star(&v);
        let Some(n) = n.to_u64() else {
            return Err(Error::resource(format!(
                "rank of {v} exceeds the searchable range of {name}"
            )));
        };
        let mut count = 0u64;
        for y in ShortlexIter::up_to_len(scan_max_len) {
            if member(&y) {
                count += 1;
                if count == n {
                    return Ok(Partial::Defined(y));
                }
            }
        }
        Err(Error::resource(format!(
            "{name} has only {count} members up to length {scan_max_len}, position {n} needed"
        )))
    };
    match &f.witness {
        None => Compression::new(new_map),
        Some(w) => {
            let w = w.clone();
            let member = b.member.clone();
            let witness = move |z: &BStr| -> Result<Partial<BStr>, Error> {
                let Some(pos) = position_in(&member, z) else {
                    return Ok(Partial::Undefined);
                };
                w(&unrank(&Rank::from(pos))?)
            };
            Compression::new(new_map).with_witness(witness)
        }
    }
}

/// Reverses a redirection: a compression into the decidable set `b`
/// becomes one into the full space. A value outside `b` maps to the
/// empty string; a member maps to the string whose shortlex rank is
/// the member's position inside `b`.
pub fn untarget_rec(f: &Compression, b: &RankedSet) -> Compression {
    let map = f.map.clone();
    let member = b.member.clone();
    Compression::new(move |x| {
        let v = match map(x)? {
            Partial::Undefined => return Ok(Partial::Undefined),
            Partial::Defined(v) => v,
        };
        match position_in(&member, &v) {
            None => Ok(Partial::Defined(BStr::empty())),
            Some(pos) => Ok(Partial::Defined(unrank(&Rank::from(pos))?)),
        }
    })
}

/// Enumerated-target version of `retarget_rec`: the new map scans the
/// enumerator for the `n`-th produced string, giving up with an
/// undefined value (not an error) once `step_cap` slots are spent. The
/// enumerator must be repetition-free.
pub fn retarget_re(f: &Compression, e: &Enumerator, step_cap: u64) -> Result<Compression, Error> {
    if !e.distinct {
        return Err(Error::config(
            "retarget_re needs a repetition-free enumerator: positions in a repeating \
             enumeration do not line up with membership positions",
        ));
    }
    let map = f.map.clone();
    let at = e.at.clone();
    Ok(Compression::new(move |x| {
        let v = match map(x)? {
            Partial::Undefined => return Ok(Partial::Undefined),
            Partial::Defined(v) => v,
        };
        let Some(n) = rank_sigma_star(&v).to_u64() else {
            return Ok(Partial::Undefined);
        };
        let mut count = 0u64;
        for i in 0..step_cap {
            if let Some(y) = at(i) {
                count += 1;
                if count == n {
                    return Ok(Partial::Defined(y));
                }
            }
        }
        Ok(Partial::Undefined)
    }))
}

/// Enumerated-target version of `untarget_rec`: the new map scans the
/// enumerator for the first slot producing the old value and emits the
/// string whose shortlex rank is that slot's position in the output
/// sequence. A value the enumerator has not produced within `step_cap`
/// slots yields an undefined value.
pub fn untarget_re(f: &Compression, e: &Enumerator, step_cap: u64) -> Compression {
    let map = f.map.clone();
    let at = e.at.clone();
    Compression::new(move |x| {
        let v = match map(x)? {
            Partial::Undefined => return Ok(Partial::Undefined),
            Partial::Defined(v) => v,
        };
        let mut count = 0u64;
        for i in 0..step_cap {
            if let Some(y) = at(i) {
                count += 1;
                if y == v {
                    return Ok(Partial::Defined(unrank(&Rank::from(count))?));
                }
            }
        }
        Ok(Partial::Undefined)
    })
}

/// Makes a map honest everywhere without disturbing it where its bound
/// already holds: `x` maps to `f(x)` when `g(|f(x)|) >= |x|` and to
/// itself otherwise. The returned bound dominates both `g` and the
/// identity (the pointwise max of a polynomial and the identity need
/// not be a polynomial, so a dominating one is returned instead).
pub fn honest_normalize(
    f: impl Fn(&BStr) -> BStr + Send + Sync + 'static,
    g: &Polynomial,
) -> (Arc<dyn Fn(&BStr) -> BStr + Send + Sync>, Polynomial) {
    let g_prime = if g.coeffs().iter().skip(1).any(|&c| c > 0) {
        g.clone()
    } else {
        let mut coeffs = g.coeffs().to_vec();
        coeffs.resize(2, 0);
        coeffs[1] += 1;
        Polynomial::new(coeffs)
    };
    let bound = g.clone();
    let map = Arc::new(move |x: &BStr| {
        let v = f(x);
        if bound.eval_len(v.len()) >= x.len() {
            v
        } else {
            x.clone()
        }
    });
    (map, g_prime)
}

/// Scans all strings up to `horizon` in shortlex order and greedily
/// pairs each still-unpaired string with the next one sharing its
/// `f`-value. Pairs are disjoint, `f`-equal inside, and listed in scan
/// order of their first components.
pub fn collision_pairs(f: impl Fn(&BStr) -> BStr, horizon: usize) -> Vec<(BStr, BStr)> {
    let mut groups: HashMap<BStr, Vec<BStr>> = HashMap::new();
    for x in ShortlexIter::up_to_len(horizon) {
        groups.entry(f(&x)).or_default().push(x);
    }
    let mut pairs: Vec<(BStr, BStr)> = groups
        .into_values()
        .flat_map(|group| {
            group
                .chunks_exact(2)
                .map(|pair| (pair[0].clone(), pair[1].clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    pairs.sort_by(|a, b| shortlex_cmp(&a.0, &b.0));
    pairs
}

/// A total choice function on pairs of strings. The contract is that
/// the choice is one of its two arguments, and that a member of the
/// set under discussion is never passed over in favor of a nonmember.
#[derive(Clone)]
pub struct Selector {
    pub choose: Arc<dyn Fn(&BStr, &BStr) -> BStr + Send + Sync>,
}

impl Selector {
    pub fn new(choose: impl Fn(&BStr, &BStr) -> BStr + Send + Sync + 'static) -> Self {
        Selector { choose: Arc::new(choose) }
    }

    /// The canonical selector for a decidable set: prefers a member
    /// over a nonmember and breaks ties toward its first argument.
    pub fn preferring(member: MemberFn) -> Self {
        Selector::new(move |x, y| if member(x) || !member(y) { x.clone() } else { y.clone() })
    }
}

/// The elements the selector passes over, one per pair. A choice
/// outside its pair is a contract violation.
pub fn selector_complement_subset(
    pairs: &[(BStr, BStr)],
    s: &Selector,
) -> Result<Vec<BStr>, Error> {
    pairs
        .iter()
        .map(|(a, b)| {
            let c = (s.choose)(a, b);
            if c == *a {
                Ok(b.clone())
            } else if c == *b {
                Ok(a.clone())
            } else {
                Err(Error::contract(format!(
                    "selector chose {c}, which is neither {a} nor {b}"
                )))
            }
        })
        .collect()
}

/// All strings of length at most `g(|z|)` that the compressor sends to
/// `z`. Undefined or failing map values simply do not qualify.
fn candidate_pool(f: &Compression, g: &Polynomial, z: &BStr) -> Result<Vec<BStr>, Error> {
    let pool: Vec<BStr> = ShortlexIter::up_to_len(g.eval_len(z.len()))
        .filter(|w| matches!((f.map)(w), Ok(Partial::Defined(v)) if v == *z))
        .collect();
    if pool.is_empty() {
        return Err(Error::contract(format!(
            "no string of length at most {} compresses to {z}",
            g.eval_len(z.len())
        )));
    }
    Ok(pool)
}

fn compress_at(f: &Compression, x: &BStr) -> Result<BStr, Error> {
    match (f.map)(x)? {
        Partial::Defined(v) => Ok(v),
        Partial::Undefined => {
            Err(Error::contract(format!("compressor undefined at {x}")))
        }
    }
}

/// Decides membership through an honest compressor and a selector: `x`
/// belongs to the set exactly when it survives a tournament of the
/// selector over every string that compresses to the same value within
/// the honesty bound.
pub fn decide_via_selector(
    f: &Compression,
    g: &Polynomial,
    s: &Selector,
    x: &BStr,
) -> Result<bool, Error> {
    let z = compress_at(f, x)?;
    let pool = candidate_pool(f, g, &z)?;
    let mut winner = pool[0].clone();
    for w in &pool[1..] {
        let c = (s.choose)(&winner, w);
        if c != winner && c != *w {
            return Err(Error::contract(format!(
                "selector chose {c}, which is neither {winner} nor {w}"
            )));
        }
        winner = c;
    }
    Ok(winner == *x)
}

/// Decides membership through an honest compressor and a machine that
/// halts exactly on non-members: candidates sharing `x`'s compressed
/// value are run in lockstep and removed as the machine accepts them;
/// when a single candidate remains, membership is `x`-equality with
/// it. An exhausted budget is an undefined answer, not an error.
pub fn decide_via_coenumerator(
    f: &Compression,
    g: &Polynomial,
    m: &PartialFn,
    x: &BStr,
    budget: u64,
) -> Result<Partial<bool>, Error> {
    let z = compress_at(f, x)?;
    let mut pool = candidate_pool(f, g, &z)?;
    for steps in 0..=budget {
        if steps > 0 {
            pool.retain(|w| m.eval_opt(w, steps).is_none());
        }
        match pool.len() {
            1 => return Ok(Partial::Defined(pool[0] == *x)),
            0 => {
                return Err(Error::contract(format!(
                    "the co-enumerator accepted every string compressing to {z}"
                )))
            }
            _ => {}
        }
    }
    Ok(Partial::Undefined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexorder::{shift, strings_up_to_len};
    use crate::setmodel::verify_compression;

    fn bs(s: &str) -> BStr {
        if s == "eps" { BStr::empty() } else { s.parse().unwrap() }
    }

    fn ends_in_one(x: &BStr) -> bool {
        x.bits().last() == Some(&1)
    }

    fn all_zero_set() -> RankedSet {
        RankedSet::new("zeros", |x: &BStr| x.bits().iter().all(|&b| b == 0))
    }

    fn apply(c: &Compression, x: &BStr) -> Partial<BStr> {
        (c.map)(x).unwrap()
    }

    #[test]
    fn retarget_into_the_full_space_is_the_identity_redirection() {
        let f = Compression::identity();
        let b = RankedSet::new("sigma_star", |_| true);
        let f2 = retarget_rec(&f, &b, 10);
        for x in strings_up_to_len(8) {
            assert_eq!(apply(&f2, &x), Partial::Defined(x.clone()));
        }
    }

    #[test]
    fn retarget_lands_on_the_nth_member_of_the_target() {
        let f = Compression::identity();
        let ones = RankedSet::new("sigma_star1", ends_in_one);
        let f2 = retarget_rec(&f, &ones, 10);
        assert_eq!(apply(&f2, &BStr::empty()), Partial::Defined(bs("1")));

        let zeros = all_zero_set();
        let f3 = retarget_rec(&f, &zeros, 10);
        assert_eq!(apply(&f3, &bs("1")), Partial::Defined(bs("00")));
    }

    #[test]
    fn retarget_runs_out_of_members_with_a_resource_error() {
        let f = Compression::identity();
        let zeros = all_zero_set();
        let f2 = retarget_rec(&f, &zeros, 3);
        let err = (f2.map)(&bs("11")).unwrap_err();
        assert!(matches!(err, Error::Resource(_)), "{err}");
    }

    #[test]
    fn untarget_maps_strays_to_the_empty_string() {
        let evens = RankedSet::new("evens", |x: &BStr| x.len() % 2 == 0);
        let f = Compression::identity();
        let back = untarget_rec(&f, &evens);
        assert_eq!(apply(&back, &bs("0")), Partial::Defined(BStr::empty()));
        assert_eq!(apply(&back, &bs("00")), Partial::Defined(bs("0")));
    }

    #[test]
    fn untarget_of_the_full_space_is_the_original() {
        let f = Compression::total(|x| shift(x, 2));
        let b = RankedSet::new("sigma_star", |_| true);
        let back = untarget_rec(&f, &b);
        for x in strings_up_to_len(8) {
            assert_eq!(apply(&back, &x), Partial::Defined(shift(&x, 2)));
        }
    }

    #[test]
    fn redirect_then_reverse_restores_the_original_map() {
        let targets = vec![
            RankedSet::new("sigma_star1", ends_in_one),
            RankedSet::new("evens", |x: &BStr| x.len() % 2 == 0),
            all_zero_set(),
        ];
        let maps: Vec<(&str, Compression)> = vec![
            ("identity", Compression::identity()),
            ("shift1", Compression::total(|x| shift(x, 1))),
        ];
        for b in &targets {
            for (name, f) in &maps {
                let max_len = if b.name == "zeros" { 3 } else { 8 };
                let scan = if b.name == "zeros" { 40 } else { 12 };
                let there = retarget_rec(f, b, scan);
                let back = untarget_rec(&there, b);
                for x in strings_up_to_len(max_len) {
                    assert_eq!(
                        apply(&back, &x),
                        (f.map)(&x).unwrap(),
                        "round trip through {} broke {name} at {x}",
                        b.name
                    );
                }
            }
        }
    }

    #[test]
    fn retargeted_witness_still_verifies() {
        let ones = RankedSet::new("sigma_star1", ends_in_one);
        let f2 = retarget_rec(&Compression::identity(), &ones, 12);
        let carrier = RankedSet::new("sigma_star", |_| true).with_compressor(f2);
        let target = ones.member.clone();
        let report = verify_compression(&carrier, &target, 6).unwrap();
        assert!(report.clean(), "{}", report.to_table());
    }

    #[test]
    fn enumerated_retarget_agrees_with_the_decidable_one() {
        let f = Compression::identity();
        let ones = RankedSet::new("sigma_star1", ends_in_one);
        let e = Enumerator::from_member(ones.member.clone());
        let via_e = retarget_re(&f, &e, 1 << 14).unwrap();
        let via_b = retarget_rec(&f, &ones, 13);
        for x in strings_up_to_len(8) {
            assert_eq!(apply(&via_e, &x), apply(&via_b, &x), "at {x}");
        }
    }

    #[test]
    fn enumerated_untarget_is_undefined_beyond_the_scanned_prefix() {
        let ones = RankedSet::new("sigma_star1", ends_in_one);
        let append_one = Compression::total(|x| x.concat(&bs("1")));
        let e = Enumerator::from_member(ones.member.clone());

        let back = untarget_re(&append_one, &e, 4);
        assert_eq!(apply(&back, &BStr::empty()), Partial::Defined(BStr::empty()));
        assert_eq!(apply(&back, &bs("11")), Partial::Undefined);

        let wide = untarget_re(&append_one, &e, 1 << 12);
        let direct = untarget_rec(&append_one, &ones);
        for x in strings_up_to_len(6) {
            assert_eq!(apply(&wide, &x), apply(&direct, &x), "at {x}");
        }
    }

    #[test]
    fn repeating_enumerators_are_rejected_for_retargeting() {
        let e = Enumerator::new(|_| Some(BStr::empty()), false);
        let err = retarget_re(&Compression::identity(), &e, 8).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn honest_normalization_keeps_honest_maps_and_patches_the_rest() {
        let g = Polynomial::new(vec![0, 1]);
        let (f2, g2) = honest_normalize(|x| x.clone(), &g);
        assert_eq!(g2, g);
        for x in strings_up_to_len(10) {
            assert_eq!(f2(&x), x);
        }

        let g = Polynomial::new(vec![2, 1]);
        let (f2, _) = honest_normalize(|_| BStr::empty(), &g);
        for x in strings_up_to_len(8) {
            let want = if x.len() <= 2 { BStr::empty() } else { x.clone() };
            assert_eq!(f2(&x), want, "at {x}");
        }

        let constant = Polynomial::new(vec![2]);
        let (f3, g3) = honest_normalize(|_| BStr::empty(), &constant);
        for x in strings_up_to_len(12) {
            assert!(g3.eval_len(f3(&x).len()) >= x.len(), "bound broken at {x}");
        }
    }

    #[test]
    fn collision_scan_pairs_equal_values_in_order() {
        let parity = |x: &BStr| bs(if x.len() % 2 == 0 { "0" } else { "1" });
        let pairs = collision_pairs(parity, 3);
        let want: Vec<(BStr, BStr)> = [
            ("eps", "00"),
            ("0", "1"),
            ("01", "10"),
            ("000", "001"),
            ("010", "011"),
            ("100", "101"),
            ("110", "111"),
        ]
        .iter()
        .map(|(a, b)| (bs(a), bs(b)))
        .collect();
        assert_eq!(pairs, want);

        assert!(collision_pairs(|x| x.clone(), 4).is_empty());

        let first_bit = |x: &BStr| x.bits().first().map_or(BStr::empty(), |&b| bs(if b == 0 { "0" } else { "1" }));
        let pairs = collision_pairs(first_bit, 5);
        let mut seen = std::collections::HashSet::new();
        for (a, b) in &pairs {
            assert_eq!(first_bit(a), first_bit(b));
            assert!(seen.insert(a.clone()) && seen.insert(b.clone()), "{a} or {b} reused");
        }
    }

    #[test]
    fn selector_complement_emits_the_passed_over_elements() {
        let ones: MemberFn = Arc::new(ends_in_one);
        let s = Selector::preferring(ones);
        let pairs = vec![(bs("0"), bs("1")), (bs("01"), bs("10"))];
        let rest = selector_complement_subset(&pairs, &s).unwrap();
        assert_eq!(rest, vec![bs("0"), bs("10")]);

        let broken = Selector::new(|_, _| bs("0101"));
        let err = selector_complement_subset(&pairs, &broken).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn selector_decision_matches_membership() {
        let full = Compression::identity();
        let g = Polynomial::new(vec![0, 1]);
        let s = Selector::preferring(Arc::new(|_: &BStr| true));
        for x in strings_up_to_len(6) {
            assert!(decide_via_selector(&full, &g, &s, &x).unwrap());
        }

        let drop_last = Compression::total_with_witness(
            |x| {
                if x.is_empty() { x.clone() } else { BStr::from_bits(&x.bits()[..x.len() - 1]) }
            },
            |z| z.concat(&bs("1")),
        );
        let g = Polynomial::new(vec![1, 1]);
        let s = Selector::preferring(Arc::new(ends_in_one));
        for x in strings_up_to_len(8) {
            let got = decide_via_selector(&drop_last, &g, &s, &x).unwrap();
            assert_eq!(got, ends_in_one(&x), "at {x}");
        }
    }

    #[test]
    fn empty_candidate_pools_are_contract_violations() {
        let far = Compression::total(|x| {
            BStr::from_bits(&vec![1; x.len() + 5])
        });
        let g = Polynomial::new(vec![]);
        let s = Selector::preferring(Arc::new(|_: &BStr| true));
        let err = decide_via_selector(&far, &g, &s, &bs("0")).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn coenumerator_decision_narrows_to_the_member() {
        let reject_all = PartialFn::from_cost("reject_all", |_| None, BStr::clone);
        let full = Compression::identity();
        let g = Polynomial::new(vec![0, 1]);
        for x in strings_up_to_len(5) {
            let got = decide_via_coenumerator(&full, &g, &reject_all, &x, 3).unwrap();
            assert_eq!(got, Partial::Defined(true));
        }

        let drop_last = Compression::total(|x: &BStr| {
            if x.is_empty() { x.clone() } else { BStr::from_bits(&x.bits()[..x.len() - 1]) }
        });
        let g = Polynomial::new(vec![1, 1]);
        let accepts_non_members = PartialFn::from_cost(
            "accepts_outside",
            |x| (!ends_in_one(x)).then(|| x.len() as u64 + 1),
            BStr::clone,
        );
        for x in strings_up_to_len(7) {
            let got = decide_via_coenumerator(&drop_last, &g, &accepts_non_members, &x, 64).unwrap();
            assert_eq!(got, Partial::Defined(ends_in_one(&x)), "at {x}");
        }
        let slow = decide_via_coenumerator(&drop_last, &g, &accepts_non_members, &bs("01"), 1).unwrap();
        assert_eq!(slow, Partial::Undefined);
    }
}
