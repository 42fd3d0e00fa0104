//! Binary strings under the shortlex (length, then value) order.
//!
//! Every string over {0,1} has a 1-based shortlex rank: the empty string is
//! 1st, then 0, 1, 00, 01, 10, 11, 000, ... The rank of `x` is
//! `2^|x| + value(x)`; the 0-based index is that minus one. All counting in
//! this crate is exact, so ranks are arbitrary-precision naturals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A finite binary string. Bits are stored most-significant first, so the
/// natural lexicographic comparison of equal-length strings coincides with
/// comparing their values as binary numerals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BStr {
    bits: Vec<u8>,
}

impl BStr {
    pub fn empty() -> Self {
        BStr { bits: Vec::new() }
    }

    /// Builds a string from a slice of 0/1 bit values.
    pub fn from_bits(bits: &[u8]) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BStr { bits: bits.to_vec() }
    }

    /// The string of given length whose numeric value is `value`.
    /// Truncates `value` to `len` bits.
    pub fn from_value(len: usize, value: &BigUint) -> Self {
        let mut bits = vec![0u8; len];
        for (i, bit) in bits.iter_mut().rev().enumerate() {
            if value.bit(i as u64) {
                *bit = 1;
            }
        }
        BStr { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits.push(bit);
    }

    /// `self` followed by `bit`.
    pub fn appended(&self, bit: u8) -> BStr {
        let mut out = self.clone();
        out.push(bit);
        out
    }

    /// `self` followed by all of `other`.
    pub fn concat(&self, other: &BStr) -> BStr {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BStr { bits }
    }

    /// Drops the last bit; `None` on the empty string.
    pub fn parent(&self) -> Option<BStr> {
        if self.bits.is_empty() {
            None
        } else {
            Some(BStr {
                bits: self.bits[..self.bits.len() - 1].to_vec(),
            })
        }
    }

    pub fn last_bit(&self) -> Option<u8> {
        self.bits.last().copied()
    }

    pub fn starts_with(&self, prefix: &BStr) -> bool {
        self.bits.len() >= prefix.bits.len() && self.bits[..prefix.bits.len()] == prefix.bits[..]
    }

    /// The numeric value of the string read as a big-endian binary numeral.
    /// The empty string has value 0.
    pub fn value(&self) -> BigUint {
        let mut v = BigUint::zero();
        for &b in &self.bits {
            v <<= 1u8;
            if b == 1 {
                v |= BigUint::one();
            }
        }
        v
    }

    /// 0-based shortlex index: `2^|x| - 1 + value(x)`.
    pub fn index(&self) -> BigUint {
        let mut idx = (BigUint::one() << self.bits.len()) - BigUint::one();
        idx += self.value();
        idx
    }

    /// Inverse of [`BStr::index`].
    pub fn from_index(index: &BigUint) -> BStr {
        let n = index + BigUint::one();
        let len = (n.bits() - 1) as usize;
        let value = &n - (BigUint::one() << len);
        BStr::from_value(len, &value)
    }

    /// The next string in shortlex order.
    pub fn successor(&self) -> BStr {
        let mut bits = self.bits.clone();
        for b in bits.iter_mut().rev() {
            if *b == 0 {
                *b = 1;
                return BStr { bits };
            }
            *b = 0;
        }
        // All ones (or empty): wrap to the all-zero string one longer.
        bits.push(0);
        BStr { bits }
    }
}

impl Ord for BStr {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex_cmp(self, other)
    }
}

impl PartialOrd for BStr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("eps");
        }
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

impl FromStr for BStr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "eps" {
            return Ok(BStr::empty());
        }
        if s.is_empty() {
            return Err(Error::domain(
                "empty string literal; write the empty string as `eps`",
            ));
        }
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => {
                    return Err(Error::domain(format!(
                        "invalid character {c:?} in binary string literal {s:?}"
                    )))
                }
            }
        }
        Ok(BStr { bits })
    }
}

impl Serialize for BStr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BStr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shortlex comparison: shorter strings first, equal lengths by value.
pub fn shortlex_cmp(x: &BStr, y: &BStr) -> Ordering {
    x.len().cmp(&y.len()).then_with(|| x.bits.cmp(&y.bits))
}

/// An exact, arbitrary-precision rank (a natural number).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rank(BigUint);

impl Rank {
    pub fn zero() -> Self {
        Rank(BigUint::zero())
    }

    pub fn one() -> Self {
        Rank(BigUint::one())
    }

    pub fn from_biguint(v: BigUint) -> Self {
        Rank(v)
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    /// `2^exp`.
    pub fn two_pow(exp: u64) -> Self {
        Rank(BigUint::one() << exp)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Subtraction that fails instead of wrapping when the result would be
    /// negative; counting identities in this crate must never go negative.
    pub fn checked_sub(&self, other: &Rank) -> Option<Rank> {
        if self.0 >= other.0 {
            Some(Rank(&self.0 - &other.0))
        } else {
            None
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for Rank {
    fn from(v: u64) -> Self {
        Rank(BigUint::from(v))
    }
}

impl From<usize> for Rank {
    fn from(v: usize) -> Self {
        Rank(BigUint::from(v))
    }
}

impl Add for Rank {
    type Output = Rank;
    fn add(self, rhs: Rank) -> Rank {
        Rank(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Rank> for Rank {
    type Output = Rank;
    fn add(self, rhs: &'a Rank) -> Rank {
        Rank(self.0 + &rhs.0)
    }
}

impl AddAssign<Rank> for Rank {
    fn add_assign(&mut self, rhs: Rank) {
        self.0 += rhs.0;
    }
}

impl<'a> AddAssign<&'a Rank> for Rank {
    fn add_assign(&mut self, rhs: &'a Rank) {
        self.0 += &rhs.0;
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // Decimal string: ranks easily exceed what a JSON number can hold.
        serializer.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rank {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let v = BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid rank literal {s:?}")))?;
        Ok(Rank(v))
    }
}

/// 1-based shortlex rank of `x` among all binary strings: `2^|x| + value(x)`.
pub fn rank_sigma_star(x: &BStr) -> Rank {
    let mut r = BigUint::one() << x.len();
    r += x.value();
    Rank(r)
}

/// The `n`-th binary string in shortlex order (1-based). There is no 0th
/// string, so `n = 0` is a domain error.
pub fn unrank(n: &Rank) -> Result<BStr, Error> {
    if n.is_zero() {
        return Err(Error::domain("unrank(0): shortlex ranks are 1-based"));
    }
    let index = n.as_biguint() - BigUint::one();
    Ok(BStr::from_index(&index))
}

/// Moves `n` positions through the shortlex order, clamping at the empty
/// string when a negative move runs off the bottom.
pub fn shift(x: &BStr, n: i64) -> BStr {
    shift_big(x, &BigInt::from(n))
}

/// [`shift`] with an arbitrary-precision displacement.
pub fn shift_big(x: &BStr, n: &BigInt) -> BStr {
    let idx = BigInt::from(x.index()) + n;
    match idx.to_biguint() {
        Some(i) => BStr::from_index(&i),
        None => {
            debug_assert_eq!(idx.sign(), Sign::Minus);
            BStr::empty()
        }
    }
}

/// Iterates every binary string in shortlex order, starting from the empty
/// string.
#[derive(Clone)]
pub struct ShortlexIter {
    next: Option<BStr>,
    max_len: Option<usize>,
}

impl ShortlexIter {
    /// Unbounded iteration from the empty string.
    pub fn new() -> Self {
        ShortlexIter { next: Some(BStr::empty()), max_len: None }
    }

    /// Iterates exactly the strings of length at most `max_len`.
    pub fn up_to_len(max_len: usize) -> Self {
        ShortlexIter { next: Some(BStr::empty()), max_len: Some(max_len) }
    }

    /// Iteration starting from `start` (inclusive).
    pub fn from(start: BStr) -> Self {
        ShortlexIter { next: Some(start), max_len: None }
    }
}

impl Default for ShortlexIter {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for ShortlexIter {
    type Item = BStr;

    fn next(&mut self) -> Option<BStr> {
        let cur = self.next.take()?;
        if let Some(max) = self.max_len {
            if cur.len() > max {
                return None;
            }
        }
        self.next = Some(cur.successor());
        Some(cur)
    }
}

/// All strings of length at most `max_len`, in shortlex order.
pub fn strings_up_to_len(max_len: usize) -> Vec<BStr> {
    ShortlexIter::up_to_len(max_len).collect()
}
