//! Block languages that hide a length-bounded map behind a ranker.
//!
//! For a total map f with |f(x)| = p(|x|), the language
//! B = {x·f(x)·1} ∪ {x·0^(p(|x|)+1)} places exactly two members in the
//! block of every x: the all-zeros anchor at rank 2·rank_sigma_star(x) − 1
//! and the payload string at 2·rank_sigma_star(x). Block lengths
//! n + p(n) + 1 are strictly increasing, so every string parses into at
//! most one block and the ranker is semistrong by reparsing. A strong
//! closed form follows from the same layout, and `decode_witness` runs
//! the construction backwards, reading f out of any strong ranker of B.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::combinators::Polynomial;
use crate::error::Error;
use crate::lexorder::{rank_sigma_star, strings_up_to_len, BStr, Rank};
use crate::setmodel::{RankOrOut, RankedSet, Ranker};

pub type PayloadFn = Arc<dyn Fn(&BStr) -> BStr + Send + Sync>;

/// The block language along with the pieces it was built from.
pub struct Thm16Language {
    pub set: RankedSet,
    pub strong: Ranker,
    pub f: PayloadFn,
    pub p: Polynomial,
}

fn block_prefix_len(p: &Polynomial, l: usize) -> Option<usize> {
    for n in 0..=l {
        let block = n + p.eval_len(n) + 1;
        if block == l {
            return Some(n);
        }
        if block > l {
            return None;
        }
    }
    None
}

fn contract_error(x: &BStr, got: usize, want: usize) -> Error {
    Error::domain(format!(
        "map length contract broken at {x}: |f(x)| = {got} but p(|x|) = {want}"
    ))
}

/// Builds B = {x·f(x)·1} ∪ {x·0^(p(|x|)+1)} with its semistrong ranker
/// attached, plus the strong closed form. The map's length contract is
/// spot-checked eagerly on short strings and re-checked on every ranker
/// call that reaches a payload.
pub fn thm16_language(f: PayloadFn, p: Polynomial) -> Result<Thm16Language, Error> {
    for x in strings_up_to_len(3) {
        let got = f(&x).len();
        let want = p.eval_len(x.len());
        if got != want {
            return Err(contract_error(&x, got, want));
        }
    }

    let member = {
        let f = f.clone();
        let p = p.clone();
        move |v: &BStr| {
            let Some(n) = block_prefix_len(&p, v.len()) else {
                return false;
            };
            let x = BStr::from_bits(&v.bits()[..n]);
            let tail = &v.bits()[n..];
            tail.iter().all(|&b| b == 0) || tail == f(&x).appended(1).bits()
        }
    };

    let semistrong = {
        let f = f.clone();
        let p = p.clone();
        Ranker::semistrong(move |v: &BStr| {
            let Some(n) = block_prefix_len(&p, v.len()) else {
                return Ok(RankOrOut::NotInSet);
            };
            let x = BStr::from_bits(&v.bits()[..n]);
            let tail = &v.bits()[n..];
            if tail.iter().all(|&b| b == 0) {
                let anchor = (rank_sigma_star(&x) + rank_sigma_star(&x))
                    .checked_sub(&Rank::one())
                    .expect("doubled rank is positive");
                return Ok(RankOrOut::Rank(anchor));
            }
            let payload = f(&x);
            if payload.len() + 1 != tail.len() {
                return Err(contract_error(&x, payload.len(), tail.len() - 1));
            }
            if tail == payload.appended(1).bits() {
                Ok(RankOrOut::Rank(rank_sigma_star(&x) + rank_sigma_star(&x)))
            } else {
                Ok(RankOrOut::NotInSet)
            }
        })
    };

    let strong = {
        let f = f.clone();
        let p = p.clone();
        Ranker::strong_fallible(move |v: &BStr| {
            let l = v.len();
            let mut r = BigUint::zero();
            for n in 0..l {
                if n + p.eval_len(n) + 1 >= l {
                    break;
                }
                r += BigUint::one() << (n + 1);
            }
            if let Some(n) = block_prefix_len(&p, l) {
                let x = BStr::from_bits(&v.bits()[..n]);
                let payload = f(&x);
                if payload.len() != p.eval_len(n) {
                    return Err(contract_error(&x, payload.len(), p.eval_len(n)));
                }
                r += x.value() << 1;
                r += 1u32;
                let tail_val = BStr::from_bits(&v.bits()[n..]).value();
                let hi_val = (payload.value() << 1) + 1u32;
                if tail_val >= hi_val {
                    r += 1u32;
                }
            }
            Ok(Rank::from_biguint(r))
        })
    };

    Ok(Thm16Language {
        set: RankedSet::new("thm16_B", member).with_ranker(semistrong),
        strong,
        f,
        p,
    })
}

/// Three simple length-exact maps with p(n) = n + 1: constant zeros, copy
/// with a zero pad, constant ones.
pub fn toy_maps() -> Vec<(&'static str, PayloadFn, Polynomial)> {
    let p = || Polynomial::new(vec![1, 1]);
    let zeros: PayloadFn = Arc::new(|x: &BStr| BStr::from_value(x.len() + 1, &BigUint::zero()));
    let copy: PayloadFn = Arc::new(|x: &BStr| x.appended(0));
    let ones: PayloadFn = Arc::new(|x: &BStr| BStr::from_bits(&vec![1; x.len() + 1]));
    vec![("zeros", zeros, p()), ("copy", copy, p()), ("ones", ones, p())]
}
