//! A named catalog of ready-made sets for tests and the command line.
//!
//! Every entry couples a membership predicate with whatever certified
//! structure it supports: a ranker where a closed form exists, and a
//! compressor where the set is dense enough for witness scans to stay
//! cheap. Sparse block languages keep their rankers but skip compression,
//! and each entry records how far its checks can comfortably go.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::constructions::{
    beacons_set, green_witnesses, paired_weak_ranker, thm11_sets, thm16_language, thm30_sets,
    toy_maps,
};
use crate::error::Error;
use crate::lexorder::{rank_sigma_star, BStr, Rank};
use crate::setmodel::{rank_to_compression, Compression, MemberFn, RankedSet, Ranker};

/// One catalog row: the set's name, how far rank checks run by default,
/// and how far compression checks run (`None` when the set carries no
/// compressor because its members are too sparse to scan for witnesses).
pub struct CatalogEntry {
    pub name: &'static str,
    pub rank_max_len: usize,
    pub compress_max_len: Option<usize>,
    build: fn() -> Result<RankedSet, Error>,
}

impl CatalogEntry {
    pub fn build(&self) -> Result<RankedSet, Error> {
        (self.build)()
    }
}

fn member_last_bit(bit: u8) -> MemberFn {
    Arc::new(move |x: &BStr| x.last_bit() == Some(bit))
}

fn member_even_len() -> MemberFn {
    Arc::new(|x: &BStr| x.len() % 2 == 0)
}

fn member_all_zeros() -> MemberFn {
    Arc::new(|x: &BStr| x.bits().iter().all(|&b| b == 0))
}

/// Running count of strings with last bit 0: full lengths below `|x|`
/// contribute `2^(|x|-1) - 1`, and even values at length `|x|` contribute
/// `floor(v/2) + 1`.
fn rank_last_zero(x: &BStr) -> Rank {
    if x.is_empty() {
        return Rank::zero();
    }
    let r = (BigUint::from(1u32) << (x.len() - 1)) + (x.value() >> 1u32);
    Rank::from_biguint(r)
}

/// Running count of strings with last bit 1: full lengths below `|x|`
/// contribute `2^(|x|-1) - 1`, and odd values at length `|x|` contribute
/// `ceil(v/2) = (v+1) >> 1`.
fn rank_last_one(x: &BStr) -> Rank {
    if x.is_empty() {
        return Rank::zero();
    }
    let r = (BigUint::from(1u32) << (x.len() - 1)) - 1u32 + ((x.value() + 1u32) >> 1u32);
    Rank::from_biguint(r)
}

/// Running count of even-length strings: `2^L` per full even length below
/// `|x|`, plus `v + 1` at length `|x|` when that length is itself even.
fn rank_even_len(x: &BStr) -> Rank {
    let n = x.len();
    let mut r = BigUint::zero();
    for l in (0..n).step_by(2) {
        r += BigUint::from(1u32) << l;
    }
    if n % 2 == 0 {
        r += x.value() + 1u32;
    }
    Rank::from_biguint(r)
}

/// Running count of all-zero strings: one per length, so always `|x| + 1`.
fn rank_all_zeros(x: &BStr) -> Rank {
    Rank::from(x.len() + 1)
}

fn build_sigma_star() -> Result<RankedSet, Error> {
    Ok(RankedSet::new("sigma_star", |_: &BStr| true)
        .with_ranker(Ranker::strong(rank_sigma_star))
        .with_compressor(Compression::identity()))
}

fn build_empty() -> Result<RankedSet, Error> {
    Ok(RankedSet::new("empty", |_: &BStr| false)
        .with_ranker(Ranker::strong(|_: &BStr| Rank::zero()))
        .with_compressor(Compression::total(|x: &BStr| x.clone())))
}

fn build_sigma_star0() -> Result<RankedSet, Error> {
    let ranker = Ranker::strong(rank_last_zero);
    let compressor = rank_to_compression(&ranker, member_last_bit(0), 12);
    Ok(RankedSet::with_member_fn("sigma_star0", member_last_bit(0))
        .with_ranker(ranker)
        .with_compressor(compressor))
}

fn build_sigma_star1() -> Result<RankedSet, Error> {
    let ranker = Ranker::strong(rank_last_one);
    let compressor = rank_to_compression(&ranker, member_last_bit(1), 12);
    Ok(RankedSet::with_member_fn("sigma_star1", member_last_bit(1))
        .with_ranker(ranker)
        .with_compressor(compressor))
}

fn build_evens() -> Result<RankedSet, Error> {
    let ranker = Ranker::strong(rank_even_len);
    let compressor = rank_to_compression(&ranker, member_even_len(), 12);
    Ok(RankedSet::with_member_fn("evens", member_even_len())
        .with_ranker(ranker)
        .with_compressor(compressor))
}

fn build_zeros() -> Result<RankedSet, Error> {
    let ranker = Ranker::strong(rank_all_zeros);
    // The scanning witness would walk 2^n strings to reach the n-th all-zero
    // string, so replace it with the closed form.
    let compressor =
        rank_to_compression(&ranker, member_all_zeros(), 12).with_witness(|z: &BStr| {
            let n = rank_sigma_star(z).to_u64().ok_or_else(|| {
                Error::resource(format!("witness for {z} needs an impractically long string"))
            })?;
            Ok(crate::setmodel::Partial::Defined(BStr::from_value(
                (n - 1) as usize,
                &BigUint::zero(),
            )))
        });
    Ok(RankedSet::with_member_fn("zeros", member_all_zeros())
        .with_ranker(ranker)
        .with_compressor(compressor))
}

fn build_beacons() -> Result<RankedSet, Error> {
    let set = beacons_set();
    let ranker = set.ranker.clone().expect("beacons ship with a ranker");
    let compressor = rank_to_compression(&ranker, set.member.clone(), 18);
    Ok(set.with_compressor(compressor))
}

fn build_paired_zeros() -> Result<RankedSet, Error> {
    let (_, ranker) = paired_weak_ranker(2)?;
    let compressor = rank_to_compression(&ranker, member_last_bit(0), 12);
    Ok(RankedSet::with_member_fn("paired_zeros", member_last_bit(0))
        .with_ranker(ranker)
        .with_compressor(compressor))
}

fn build_thm30_a() -> Result<RankedSet, Error> {
    Ok(thm30_sets().a)
}

fn build_thm30_b() -> Result<RankedSet, Error> {
    Ok(thm30_sets().b)
}

fn build_thm30_union() -> Result<RankedSet, Error> {
    let parts = thm30_sets();
    let (ma, mb) = (parts.a.member.clone(), parts.b.member.clone());
    Ok(
        RankedSet::new("thm30_union", move |x: &BStr| ma(x) || mb(x))
            .with_ranker(parts.r_union),
    )
}

fn build_thm30_join() -> Result<RankedSet, Error> {
    let parts = thm30_sets();
    let member = crate::combinators::join_member(parts.a.member.clone(), parts.b.member.clone());
    Ok(RankedSet::with_member_fn("thm30_join", member).with_ranker(parts.r_join))
}

fn build_thm11_a() -> Result<RankedSet, Error> {
    Ok(thm11_sets().a)
}

fn build_thm11_b() -> Result<RankedSet, Error> {
    let set = thm11_sets().b;
    let ranker = set.ranker.clone().expect("thm11_B ships with a ranker");
    let compressor = rank_to_compression(&ranker, set.member.clone(), 12);
    Ok(set.with_compressor(compressor))
}

fn build_thm11_a_cap_b() -> Result<RankedSet, Error> {
    Ok(thm11_sets().a_cap_b)
}

fn build_thm16_b() -> Result<RankedSet, Error> {
    let (_, copy, p) = toy_maps().swap_remove(1);
    let lang = thm16_language(copy, p)?;
    Ok(lang.set.with_ranker(lang.strong))
}

fn build_green_a() -> Result<RankedSet, Error> {
    Ok(green_witnesses(member_even_len()).a)
}

fn build_green_b() -> Result<RankedSet, Error> {
    Ok(green_witnesses(member_even_len()).b)
}

fn build_green_a_prime() -> Result<RankedSet, Error> {
    Ok(green_witnesses(member_even_len()).a_prime)
}

fn build_green_b_prime() -> Result<RankedSet, Error> {
    Ok(green_witnesses(member_even_len()).b_prime)
}

fn build_green_union() -> Result<RankedSet, Error> {
    let ranker = green_witnesses(member_even_len()).r_union;
    let member: MemberFn = Arc::new(|x: &BStr| !x.is_empty());
    let compressor = rank_to_compression(&ranker, member.clone(), 12);
    Ok(RankedSet::with_member_fn("green_union", member)
        .with_ranker(ranker)
        .with_compressor(compressor))
}

fn build_green_intersect() -> Result<RankedSet, Error> {
    let ranker = green_witnesses(member_even_len()).r_intersect;
    let compressor = rank_to_compression(&ranker, member_last_bit(1), 12);
    Ok(RankedSet::with_member_fn("green_intersect", member_last_bit(1))
        .with_ranker(ranker)
        .with_compressor(compressor))
}

/// Every named set the tools know how to build.
pub fn catalog() -> Vec<CatalogEntry> {
    let dense = |name, build| CatalogEntry {
        name,
        rank_max_len: 10,
        compress_max_len: Some(8),
        build,
    };
    let sparse = |name, build| CatalogEntry {
        name,
        rank_max_len: 10,
        compress_max_len: None,
        build,
    };
    vec![
        dense("sigma_star", build_sigma_star),
        dense("empty", build_empty),
        dense("sigma_star0", build_sigma_star0),
        dense("sigma_star1", build_sigma_star1),
        dense("evens", build_evens),
        dense("zeros", build_zeros),
        // Beacons thin out fast: the 128th beacon already has length 16, so
        // witness scans stay affordable only for short targets.
        CatalogEntry {
            name: "beacons",
            rank_max_len: 10,
            compress_max_len: Some(6),
            build: build_beacons,
        },
        dense("paired_zeros", build_paired_zeros),
        sparse("thm30_A", build_thm30_a),
        sparse("thm30_B", build_thm30_b),
        sparse("thm30_union", build_thm30_union),
        sparse("thm30_join", build_thm30_join),
        sparse("thm11_A", build_thm11_a),
        dense("thm11_B", build_thm11_b),
        sparse("thm11_A_cap_B", build_thm11_a_cap_b),
        sparse("thm16_B", build_thm16_b),
        sparse("green_A", build_green_a),
        sparse("green_B", build_green_b),
        sparse("green_Aprime", build_green_a_prime),
        sparse("green_Bprime", build_green_b_prime),
        dense("green_union", build_green_union),
        dense("green_intersect", build_green_intersect),
    ]
}

/// Builds the named set, or a configuration error listing what exists.
pub fn build_set(name: &str) -> Result<RankedSet, Error> {
    for entry in catalog() {
        if entry.name == name {
            return entry.build();
        }
    }
    let known: Vec<&str> = catalog().iter().map(|e| e.name).collect();
    Err(Error::config(format!(
        "unknown set name {name:?}; known names: {}",
        known.join(", ")
    )))
}

/// Looks up the catalog row for a named set without building it.
pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}
