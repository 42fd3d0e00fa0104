//! Sets of binary strings and the contracts attached to them.
//!
//! A set is represented by a decidable membership predicate plus optional
//! certified structure: a ranker (weak, semistrong, or strong) and a
//! compression map. Every contract here is checked against the brute-force
//! counting oracle [`brute_rank`], which knows nothing about closed forms:
//! it just walks the shortlex order and counts members.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lexorder::{rank_sigma_star, unrank, BStr, Rank, ShortlexIter};

/// A possibly-undefined value. Partiality is data here, never a panic:
/// step-bounded evaluation and enumerator-backed maps return `Undefined`
/// when they run out of budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Partial<T> {
    Defined(T),
    Undefined,
}

impl<T> Partial<T> {
    pub fn defined(self) -> Option<T> {
        match self {
            Partial::Defined(v) => Some(v),
            Partial::Undefined => None,
        }
    }

    pub fn as_ref(&self) -> Partial<&T> {
        match self {
            Partial::Defined(v) => Partial::Defined(v),
            Partial::Undefined => Partial::Undefined,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Partial<U> {
        match self {
            Partial::Defined(v) => Partial::Defined(f(v)),
            Partial::Undefined => Partial::Undefined,
        }
    }
}

/// Result of a semistrong ranker: a rank on members, an explicit
/// "not in the set" answer off them. `NotInSet` is a first-class value,
/// not an error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankOrOut {
    Rank(Rank),
    NotInSet,
}

impl fmt::Display for RankOrOut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankOrOut::Rank(r) => write!(f, "{r}"),
            RankOrOut::NotInSet => f.write_str("not-in-set"),
        }
    }
}

pub type MemberFn = Arc<dyn Fn(&BStr) -> bool + Send + Sync>;
pub type RankFn = Arc<dyn Fn(&BStr) -> Result<Rank, Error> + Send + Sync>;
pub type SemiRankFn = Arc<dyn Fn(&BStr) -> Result<RankOrOut, Error> + Send + Sync>;
pub type MapFn = Arc<dyn Fn(&BStr) -> Result<Partial<BStr>, Error> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankerKind {
    Strong,
    Semistrong,
    Weak,
}

impl fmt::Display for RankerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankerKind::Strong => f.write_str("strong"),
            RankerKind::Semistrong => f.write_str("semistrong"),
            RankerKind::Weak => f.write_str("weak"),
        }
    }
}

/// A ranking function for some set A, tagged by how much it promises:
///
/// * `Strong` — returns `rank_A(x)` on every input.
/// * `Semistrong` — returns `rank_A(x)` on members and `NotInSet` off them.
/// * `Weak` — returns `rank_A(x)` on members; anywhere else the value is
///   unconstrained.
#[derive(Clone)]
pub enum Ranker {
    Strong(RankFn),
    Semistrong(SemiRankFn),
    Weak(RankFn),
}

impl Ranker {
    pub fn strong(f: impl Fn(&BStr) -> Rank + Send + Sync + 'static) -> Self {
        Ranker::Strong(Arc::new(move |x| Ok(f(x))))
    }

    pub fn strong_fallible(f: impl Fn(&BStr) -> Result<Rank, Error> + Send + Sync + 'static) -> Self {
        Ranker::Strong(Arc::new(f))
    }

    pub fn weak(f: impl Fn(&BStr) -> Rank + Send + Sync + 'static) -> Self {
        Ranker::Weak(Arc::new(move |x| Ok(f(x))))
    }

    pub fn weak_fallible(f: impl Fn(&BStr) -> Result<Rank, Error> + Send + Sync + 'static) -> Self {
        Ranker::Weak(Arc::new(f))
    }

    pub fn semistrong(
        f: impl Fn(&BStr) -> Result<RankOrOut, Error> + Send + Sync + 'static,
    ) -> Self {
        Ranker::Semistrong(Arc::new(f))
    }

    /// Wraps a strong ranker as a semistrong one using a membership
    /// predicate; a strong ranker refines a semistrong one.
    pub fn semistrong_from_strong(strong: Ranker, member: MemberFn) -> Result<Self, Error> {
        let f = match strong {
            Ranker::Strong(f) => f,
            other => {
                return Err(Error::config(format!(
                    "semistrong_from_strong needs a strong ranker, got {}",
                    other.kind()
                )))
            }
        };
        Ok(Ranker::Semistrong(Arc::new(move |x| {
            if member(x) {
                Ok(RankOrOut::Rank(f(x)?))
            } else {
                Ok(RankOrOut::NotInSet)
            }
        })))
    }

    pub fn kind(&self) -> RankerKind {
        match self {
            Ranker::Strong(_) => RankerKind::Strong,
            Ranker::Semistrong(_) => RankerKind::Semistrong,
            Ranker::Weak(_) => RankerKind::Weak,
        }
    }

    /// Evaluates the ranker, normalizing all kinds into [`RankOrOut`].
    pub fn eval(&self, x: &BStr) -> Result<RankOrOut, Error> {
        match self {
            Ranker::Strong(f) | Ranker::Weak(f) => Ok(RankOrOut::Rank(f(x)?)),
            Ranker::Semistrong(f) => f(x),
        }
    }

    /// Evaluates at a point the caller asserts is a member, where every
    /// kind must produce a rank. A semistrong `NotInSet` on a member is a
    /// contract violation.
    pub fn rank_on_member(&self, x: &BStr) -> Result<Rank, Error> {
        match self.eval(x)? {
            RankOrOut::Rank(r) => Ok(r),
            RankOrOut::NotInSet => Err(Error::contract(format!(
                "semistrong ranker answered not-in-set on asserted member {x}"
            ))),
        }
    }
}

impl fmt::Debug for Ranker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ranker::{}", self.kind())
    }
}

/// A compression for a set A onto a target set: a map that is injective on
/// A with image exactly the target. The optional witness sends each target
/// string z to some member of A that maps to z; surjectivity is only
/// checkable when it is present.
#[derive(Clone)]
pub struct Compression {
    pub map: MapFn,
    pub witness: Option<MapFn>,
}

impl Compression {
    pub fn new(
        map: impl Fn(&BStr) -> Result<Partial<BStr>, Error> + Send + Sync + 'static,
    ) -> Self {
        Compression { map: Arc::new(map), witness: None }
    }

    pub fn with_witness(
        mut self,
        witness: impl Fn(&BStr) -> Result<Partial<BStr>, Error> + Send + Sync + 'static,
    ) -> Self {
        self.witness = Some(Arc::new(witness));
        self
    }

    /// A total map wrapped as a compression (no witness).
    pub fn total(f: impl Fn(&BStr) -> BStr + Send + Sync + 'static) -> Self {
        Compression::new(move |x| Ok(Partial::Defined(f(x))))
    }

    pub fn total_with_witness(
        f: impl Fn(&BStr) -> BStr + Send + Sync + 'static,
        w: impl Fn(&BStr) -> BStr + Send + Sync + 'static,
    ) -> Self {
        Compression::total(f).with_witness(move |z| Ok(Partial::Defined(w(z))))
    }

    /// The identity compression of the full string set onto itself.
    pub fn identity() -> Self {
        Compression::total_with_witness(|x| x.clone(), |z| z.clone())
    }
}

impl fmt::Debug for Compression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Compression {{ witness: {} }}", self.witness.is_some())
    }
}

/// A named set with a decidable membership predicate and whatever certified
/// structure it carries.
#[derive(Clone)]
pub struct RankedSet {
    pub name: String,
    pub member: MemberFn,
    pub ranker: Option<Ranker>,
    pub compressor: Option<Compression>,
}

impl RankedSet {
    pub fn new(name: impl Into<String>, member: impl Fn(&BStr) -> bool + Send + Sync + 'static) -> Self {
        RankedSet {
            name: name.into(),
            member: Arc::new(member),
            ranker: None,
            compressor: None,
        }
    }

    pub fn with_member_fn(name: impl Into<String>, member: MemberFn) -> Self {
        RankedSet { name: name.into(), member, ranker: None, compressor: None }
    }

    pub fn with_ranker(mut self, ranker: Ranker) -> Self {
        self.ranker = Some(ranker);
        self
    }

    pub fn with_compressor(mut self, c: Compression) -> Self {
        self.compressor = Some(c);
        self
    }

    pub fn is_member(&self, x: &BStr) -> bool {
        (self.member)(x)
    }

    /// Members of the set with length at most `max_len`, in shortlex order.
    pub fn members_up_to(&self, max_len: usize) -> Vec<BStr> {
        ShortlexIter::up_to_len(max_len).filter(|x| self.is_member(x)).collect()
    }
}

impl fmt::Debug for RankedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RankedSet {{ name: {:?}, ranker: {:?}, compressor: {} }}",
            self.name,
            self.ranker.as_ref().map(|r| r.kind()),
            self.compressor.is_some()
        )
    }
}

/// One step-bounded evaluation outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepResult {
    Halted(BStr),
    StillRunning,
}

pub type StepFn = Arc<dyn Fn(&BStr, u64) -> StepResult + Send + Sync>;

/// A deterministic partial function evaluated under a step budget.
/// Evaluation is monotone in the budget: once halted with a value, larger
/// budgets return the same value.
#[derive(Clone)]
pub struct PartialFn {
    pub name: String,
    eval: StepFn,
}

impl PartialFn {
    /// Builds a partial function from a cost model: `cost(x) = None` means
    /// divergence on `x`; otherwise the function halts with `out(x)` once
    /// the budget reaches the cost. Monotonicity holds by construction.
    pub fn from_cost(
        name: impl Into<String>,
        cost: impl Fn(&BStr) -> Option<u64> + Send + Sync + 'static,
        out: impl Fn(&BStr) -> BStr + Send + Sync + 'static,
    ) -> Self {
        PartialFn {
            name: name.into(),
            eval: Arc::new(move |x, steps| match cost(x) {
                Some(c) if steps >= c => StepResult::Halted(out(x)),
                _ => StepResult::StillRunning,
            }),
        }
    }

    pub fn eval(&self, x: &BStr, steps: u64) -> StepResult {
        (self.eval)(x, steps)
    }

    /// Convenience view: `Some(value)` iff the function halts within
    /// `steps`.
    pub fn eval_opt(&self, x: &BStr, steps: u64) -> Option<BStr> {
        match self.eval(x, steps) {
            StepResult::Halted(v) => Some(v),
            StepResult::StillRunning => None,
        }
    }
}

impl fmt::Debug for PartialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialFn({:?})", self.name)
    }
}

/// Exact rank of `x` in the set given by `member`, computed by walking the
/// whole shortlex order up to `x`. Exponential in `|x|`; this is the
/// ground-truth oracle everything else is judged against.
pub fn brute_rank(member: &dyn Fn(&BStr) -> bool, x: &BStr) -> Rank {
    let mut count = Rank::zero();
    for y in ShortlexIter::new() {
        if y > *x {
            break;
        }
        if member(&y) {
            count += Rank::one();
        }
    }
    count
}

/// The 1-based `n`-th member of the set in shortlex order, found by
/// scanning strings of length at most `max_len`.
pub fn nth_member(member: &MemberFn, n: &Rank, max_len: usize) -> Result<BStr, Error> {
    if n.is_zero() {
        return Err(Error::domain("member indices start at 1"));
    }
    let mut seen = Rank::zero();
    for y in ShortlexIter::up_to_len(max_len) {
        if member(&y) {
            seen += Rank::one();
            if &seen == n {
                return Ok(y);
            }
        }
    }
    Err(Error::resource(format!(
        "no {n}-th member found among strings of length at most {max_len}"
    )))
}

/// One contract failure found by a verification scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyFailure {
    pub input: String,
    pub expected: String,
    pub actual: String,
    pub contract: String,
}

/// Outcome of a verification scan: empty `failures` iff the contract holds
/// on the whole checked prefix. Warnings record checks that had to be
/// skipped (e.g. surjectivity without a witness).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub contract: String,
    pub checked: u64,
    pub failures: Vec<VerifyFailure>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn new(contract: impl Into<String>) -> Self {
        VerifyReport { contract: contract.into(), checked: 0, failures: Vec::new(), warnings: Vec::new() }
    }

    pub fn clean(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(
        &mut self,
        input: impl fmt::Display,
        expected: impl fmt::Display,
        actual: impl fmt::Display,
        contract: impl Into<String>,
    ) {
        self.failures.push(VerifyFailure {
            input: input.to_string(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            contract: contract.into(),
        });
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    /// Merges another report into this one, keeping its failures and
    /// warnings and summing checked counts.
    pub fn absorb(&mut self, other: VerifyReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self.warnings.extend(other.warnings);
    }

    /// Line-oriented rendering for terminals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("contract: {}\n", self.contract));
        out.push_str(&format!("checked:  {}\n", self.checked));
        out.push_str(&format!("failures: {}\n", self.failures.len()));
        for f in &self.failures {
            out.push_str(&format!(
                "  input={} expected={} actual={} [{}]\n",
                f.input, f.expected, f.actual, f.contract
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

fn require_kind(set: &RankedSet, kind: RankerKind) -> Result<&Ranker, Error> {
    match &set.ranker {
        None => Err(Error::config(format!("set {:?} has no ranker attached", set.name))),
        Some(r) if r.kind() == kind => Ok(r),
        Some(r) => Err(Error::config(format!(
            "set {:?} has a {} ranker, expected {}",
            set.name,
            r.kind(),
            kind
        ))),
    }
}

/// Scans the shortlex order once, handing each string and its exact
/// brute-force rank to `check`. This keeps whole-prefix verification at
/// one membership test per string instead of one full enumeration per
/// string.
fn scan_with_brute_ranks(
    set: &RankedSet,
    max_len: usize,
    mut check: impl FnMut(&BStr, bool, &Rank),
) -> u64 {
    let mut rank = Rank::zero();
    let mut checked = 0u64;
    for x in ShortlexIter::up_to_len(max_len) {
        let is_member = set.is_member(&x);
        if is_member {
            rank += Rank::one();
        }
        check(&x, is_member, &rank);
        checked += 1;
    }
    checked
}

/// Checks a strong ranker against the brute-force oracle on every string of
/// length at most `max_len`.
pub fn verify_strong(set: &RankedSet, max_len: usize) -> Result<VerifyReport, Error> {
    let ranker = require_kind(set, RankerKind::Strong)?.clone();
    let mut report = VerifyReport::new(format!("strong-rank:{}", set.name));
    report.checked = scan_with_brute_ranks(set, max_len, |x, _m, expected| {
        match ranker.eval(x) {
            Ok(RankOrOut::Rank(r)) if &r == expected => {}
            Ok(v) => report.fail(x, expected, v, "strong-rank"),
            Err(e) => report.fail(x, expected, format!("error: {e}"), "strong-rank"),
        }
    });
    Ok(report)
}

/// Checks a semistrong ranker: exact rank on members, `NotInSet` off them.
pub fn verify_semistrong(set: &RankedSet, max_len: usize) -> Result<VerifyReport, Error> {
    let ranker = require_kind(set, RankerKind::Semistrong)?.clone();
    let mut report = VerifyReport::new(format!("semistrong-rank:{}", set.name));
    report.checked = scan_with_brute_ranks(set, max_len, |x, is_member, expected| {
        let want = if is_member {
            RankOrOut::Rank(expected.clone())
        } else {
            RankOrOut::NotInSet
        };
        match ranker.eval(x) {
            Ok(v) if v == want => {}
            Ok(v) => report.fail(x, &want, v, "semistrong-rank"),
            Err(e) => report.fail(x, &want, format!("error: {e}"), "semistrong-rank"),
        }
    });
    Ok(report)
}

/// Checks a weak ranker on members only; off-member values are
/// unconstrained by the weak contract.
pub fn verify_weak(set: &RankedSet, max_len: usize) -> Result<VerifyReport, Error> {
    let ranker = match &set.ranker {
        None => return Err(Error::config(format!("set {:?} has no ranker attached", set.name))),
        // Any kind can be checked against the weak contract; strong and
        // semistrong refine it.
        Some(r) => r.clone(),
    };
    let mut report = VerifyReport::new(format!("weak-rank:{}", set.name));
    let mut members = 0u64;
    scan_with_brute_ranks(set, max_len, |x, is_member, expected| {
        if !is_member {
            return;
        }
        members += 1;
        match ranker.rank_on_member(x) {
            Ok(r) if &r == expected => {}
            Ok(r) => report.fail(x, expected, r, "weak-rank"),
            Err(e) => report.fail(x, expected, format!("error: {e}"), "weak-rank"),
        }
    });
    report.checked = members;
    Ok(report)
}

/// Checks a compression of `set` onto the target predicate:
/// defined and injective on members up to `max_len`, and (when a witness is
/// attached) surjective onto targets up to `max_len`. Without a witness the
/// surjectivity half is skipped with an explicit warning.
pub fn verify_compression(
    set: &RankedSet,
    target: &MemberFn,
    max_len: usize,
) -> Result<VerifyReport, Error> {
    let comp = set
        .compressor
        .as_ref()
        .ok_or_else(|| Error::config(format!("set {:?} has no compressor attached", set.name)))?;
    let mut report = VerifyReport::new(format!("compression:{}", set.name));
    let mut seen: HashMap<BStr, BStr> = HashMap::new();
    let mut checked = 0u64;
    for x in set.members_up_to(max_len) {
        checked += 1;
        match (comp.map)(&x) {
            Ok(Partial::Defined(v)) => {
                if !target(&v) {
                    report.fail(&x, "value inside the target set", &v, "compression-image");
                }
                if let Some(prev) = seen.get(&v) {
                    report.fail(
                        &x,
                        format!("value distinct from map({prev})"),
                        &v,
                        "compression-injective",
                    );
                } else {
                    seen.insert(v, x.clone());
                }
            }
            Ok(Partial::Undefined) => {
                report.fail(&x, "defined on every member", "undefined", "compression-domain");
            }
            Err(e) => {
                report.fail(&x, "defined on every member", format!("error: {e}"), "compression-domain");
            }
        }
    }
    match &comp.witness {
        None => report.warn(
            "no witness attached: surjectivity check skipped".to_string(),
        ),
        Some(w) => {
            for z in ShortlexIter::up_to_len(max_len).filter(|z| target(z)) {
                checked += 1;
                match w(&z) {
                    Ok(Partial::Defined(x)) => {
                        if !set.is_member(&x) {
                            report.fail(&z, "witness inside the set", &x, "compression-witness-member");
                            continue;
                        }
                        match (comp.map)(&x) {
                            Ok(Partial::Defined(v)) if v == z => {}
                            Ok(Partial::Defined(v)) => {
                                report.fail(&z, format!("map({x}) = {z}"), v, "compression-witness-maps")
                            }
                            Ok(Partial::Undefined) => {
                                report.fail(&z, format!("map({x}) = {z}"), "undefined", "compression-witness-maps")
                            }
                            Err(e) => report.fail(
                                &z,
                                format!("map({x}) = {z}"),
                                format!("error: {e}"),
                                "compression-witness-maps",
                            ),
                        }
                    }
                    Ok(Partial::Undefined) => {
                        report.fail(&z, "a witness member", "undefined", "compression-witness")
                    }
                    Err(e) => {
                        report.fail(&z, "a witness member", format!("error: {e}"), "compression-witness")
                    }
                }
            }
        }
    }
    report.checked = checked;
    Ok(report)
}

/// Turns any ranker for a set A into a compression of A onto the full
/// string set: map `x` to the `r(x)`-th string (to the empty string when a
/// strong ranker legitimately answers 0 off-members). The witness scans
/// members in shortlex order: the preimage of the n-th string is the n-th
/// member.
pub fn rank_to_compression(ranker: &Ranker, member: MemberFn, scan_max_len: usize) -> Compression {
    let r = ranker.clone();
    let map = move |x: &BStr| -> Result<Partial<BStr>, Error> {
        match r.eval(x)? {
            RankOrOut::Rank(n) => {
                if n.is_zero() {
                    Ok(Partial::Defined(BStr::empty()))
                } else {
                    Ok(Partial::Defined(unrank(&n)?))
                }
            }
            RankOrOut::NotInSet => Ok(Partial::Defined(BStr::empty())),
        }
    };
    let witness = move |z: &BStr| -> Result<Partial<BStr>, Error> {
        let n = rank_sigma_star(z);
        let mut seen = Rank::zero();
        for y in ShortlexIter::new() {
            if y.len() > scan_max_len {
                return Err(Error::resource(format!(
                    "no {n}-th member found within scan length {scan_max_len}"
                )));
            }
            if member(&y) {
                seen += Rank::one();
                if seen == n {
                    return Ok(Partial::Defined(y));
                }
            }
        }
        unreachable!("shortlex iteration is unbounded")
    };
    Compression::new(map).with_witness(witness)
}
