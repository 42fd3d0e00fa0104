//! Stagewise diagonalization against a finite roster of partial
//! functions, producing replayable traces.
//!
//! `diag_run` grows finite prefixes of two sets `A` and `B` (only `A`
//! in complement mode) one stage per function. Each stage extends the
//! prefixes below a moving frontier `m` so that the stage's function
//! cannot rank the diagonal set, which is `A ∩ B`, `A ∪ B`, or the
//! complement of `A` depending on the mode. The stage records which
//! obstruction it found: the function's value at a probe string is
//! left unclaimed by the diagonal set (`NonSurjective`), the function
//! fails to halt on a tracked string (`Undefined`), or two tracked
//! strings collide under it (`Collision`).
//!
//! The prefixes keep a block discipline: in intersection and union
//! mode, every string `z` below the frontier has exactly one of `z0`,
//! `z1` in `A` (and likewise in `B`); in complement mode exactly one
//! of `z00`, `z01`, `z10`, `z11` is in `A`. This is what makes the
//! prefixes rankable by the paired weak ranker while the diagonal set
//! defeats the roster.
//!
//! Every quantifier is bounded: halting is judged at `step_budget`
//! steps, and searches range over strings of length at most
//! `horizon_len`. Witnesses are therefore relative to those bounds,
//! and `diag_verify` re-checks each one under the same bounds.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::constructions::paired_weak_ranker;
use crate::error::Error;
use crate::lexorder::{shift, BStr, ShortlexIter};
use crate::setmodel::{verify_weak, PartialFn, RankedSet, VerifyReport};

/// Which diagonal set the run defeats the roster on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagMode {
    Intersection,
    Union,
    Complement,
}

impl DiagMode {
    /// Suffix width of the block discipline: 1 bit for pairs, 2 bits
    /// for quads.
    fn suffix_bits(self) -> usize {
        match self {
            DiagMode::Intersection | DiagMode::Union => 1,
            DiagMode::Complement => 2,
        }
    }

    /// The probe string of a stage whose frontier is `m`.
    fn probe(self, m: &BStr) -> BStr {
        match self {
            DiagMode::Intersection | DiagMode::Union => m.appended(0),
            DiagMode::Complement => m.appended(0).appended(0),
        }
    }

    /// The exclusive lower edge of the stage's forward search.
    fn scan_floor(self, m: &BStr) -> BStr {
        match self {
            DiagMode::Intersection => m.appended(1),
            DiagMode::Union => m.appended(0),
            DiagMode::Complement => m.appended(0).appended(0),
        }
    }
}

impl fmt::Display for DiagMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DiagMode::Intersection => "intersection",
            DiagMode::Union => "union",
            DiagMode::Complement => "complement",
        };
        f.write_str(name)
    }
}

impl FromStr for DiagMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "intersection" => Ok(DiagMode::Intersection),
            "union" => Ok(DiagMode::Union),
            "complement" => Ok(DiagMode::Complement),
            other => Err(Error::config(format!(
                "unknown diagonal mode {other:?}; expected intersection, union, or complement"
            ))),
        }
    }
}

/// The obstruction a stage found, re-checkable from the trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagWitness {
    /// `phi(probe) = target`, yet no member of the diagonal set maps
    /// to `target` within the bounds, and the `excluded` strings were
    /// deliberately kept out of the diagonal set.
    NonSurjective { target: BStr, probe: BStr, excluded: Vec<BStr> },
    /// Two distinct members of the diagonal set on which the function
    /// takes the same value.
    Collision { first: BStr, second: BStr, value: BStr },
    /// A member of the diagonal set on which the function is still
    /// running at the step budget.
    Undefined { input: BStr },
}

/// One stage of a run: which case fired, how the frontier moved, and
/// what was added.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagStage {
    pub index: usize,
    pub phi: String,
    pub case_taken: u8,
    pub m_before: BStr,
    pub m_after: BStr,
    pub added_to_a: Vec<BStr>,
    pub added_to_b: Vec<BStr>,
    pub witness: DiagWitness,
}

/// A complete, replayable record of a diagonalization run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagTrace {
    pub mode: DiagMode,
    pub phi_names: Vec<String>,
    pub step_budget: u64,
    pub horizon_len: usize,
    pub stages: Vec<DiagStage>,
    pub a_prefix: BTreeSet<BStr>,
    pub b_prefix: BTreeSet<BStr>,
    pub m_final: BStr,
}

struct StageOutcome {
    case: u8,
    witness: DiagWitness,
    add_a: Vec<BStr>,
    add_b: Vec<BStr>,
    m_next: BStr,
}

/// First string strictly above `floor`, of length at most `horizon`,
/// that the function maps to `v` within `budget` steps.
fn scan_above(phi: &PartialFn, budget: u64, horizon: usize, floor: &BStr, v: &BStr) -> Option<BStr> {
    ShortlexIter::from(floor.successor())
        .take_while(|x| x.len() <= horizon)
        .find(|x| phi.eval_opt(x, budget).as_ref() == Some(v))
}

/// The strings `z` with `lo <= z < hi` in shortlex order.
fn blocks_between(lo: &BStr, hi: &BStr) -> impl Iterator<Item = BStr> {
    let hi = hi.clone();
    ShortlexIter::from(lo.clone()).take_while(move |z| *z < hi)
}

fn intersection_stage(
    phi: &PartialFn,
    budget: u64,
    horizon: usize,
    m: &BStr,
    a: &BTreeSet<BStr>,
    b: &BTreeSet<BStr>,
) -> StageOutcome {
    let probe = m.appended(0);
    let Some(v) = phi.eval_opt(&probe, budget) else {
        return StageOutcome {
            case: 2,
            witness: DiagWitness::Undefined { input: probe.clone() },
            add_a: vec![probe.clone()],
            add_b: vec![probe],
            m_next: shift(m, 1),
        };
    };
    if let Some(x) = a
        .intersection(b)
        .find(|x| phi.eval_opt(x, budget).as_ref() == Some(&v))
    {
        return StageOutcome {
            case: 2,
            witness: DiagWitness::Collision { first: x.clone(), second: probe.clone(), value: v },
            add_a: vec![probe.clone()],
            add_b: vec![probe],
            m_next: shift(m, 1),
        };
    }
    // The forward search starts strictly above m1. A hit exactly at m1
    // would fit no case: m1 never joins the diagonal set, so leaving
    // it unexamined is sound, and the non-surjectivity argument never
    // consults phi(m1).
    if let Some(x) = scan_above(phi, budget, horizon, &m.appended(1), &v) {
        let y = x.parent().expect("strings above the probe block are nonempty");
        let mut add: Vec<BStr> = blocks_between(m, &y).map(|z| z.appended(0)).collect();
        add.push(x.clone());
        return StageOutcome {
            case: 3,
            witness: DiagWitness::Collision { first: probe, second: x, value: v },
            add_a: add.clone(),
            add_b: add,
            m_next: shift(&y, 1),
        };
    }
    let carrier = shift(m, 1).appended(0);
    StageOutcome {
        case: 1,
        witness: DiagWitness::NonSurjective {
            target: v,
            probe: probe.clone(),
            excluded: vec![probe.clone(), m.appended(1)],
        },
        add_a: vec![probe, carrier.clone()],
        add_b: vec![m.appended(1), carrier],
        m_next: shift(m, 2),
    }
}

fn union_stage(
    phi: &PartialFn,
    budget: u64,
    horizon: usize,
    m: &BStr,
    a: &BTreeSet<BStr>,
    b: &BTreeSet<BStr>,
) -> StageOutcome {
    let probe = m.appended(0);
    let Some(v) = phi.eval_opt(&probe, budget) else {
        return StageOutcome {
            case: 2,
            witness: DiagWitness::Undefined { input: probe.clone() },
            add_a: vec![probe.clone()],
            add_b: vec![probe],
            m_next: shift(m, 1),
        };
    };
    if let Some(x) = a.union(b).find(|x| phi.eval_opt(x, budget).as_ref() == Some(&v)) {
        return StageOutcome {
            case: 2,
            witness: DiagWitness::Collision { first: x.clone(), second: probe.clone(), value: v },
            add_a: vec![probe.clone()],
            add_b: vec![probe],
            m_next: shift(m, 1),
        };
    }
    if let Some(x) = scan_above(phi, budget, horizon, &probe, &v) {
        let y = x.parent().expect("strings above the probe are nonempty");
        let m_next = shift(&y, 1);
        let add_a: Vec<BStr> = blocks_between(m, &m_next).map(|z| z.appended(0)).collect();
        let add_b: Vec<BStr> = blocks_between(m, &m_next).map(|z| z.appended(1)).collect();
        return StageOutcome {
            case: 3,
            witness: DiagWitness::Collision { first: probe, second: x, value: v },
            add_a,
            add_b,
            m_next,
        };
    }
    StageOutcome {
        case: 1,
        witness: DiagWitness::NonSurjective {
            target: v,
            probe: probe.clone(),
            excluded: vec![probe],
        },
        add_a: vec![m.appended(1)],
        add_b: vec![m.appended(1)],
        m_next: shift(m, 1),
    }
}

fn complement_stage(
    phi: &PartialFn,
    budget: u64,
    horizon: usize,
    m: &BStr,
    a: &BTreeSet<BStr>,
) -> StageOutcome {
    let probe = m.appended(0).appended(0);
    let keep_probe_out = || vec![m.appended(0).appended(1)];
    let Some(v) = phi.eval_opt(&probe, budget) else {
        return StageOutcome {
            case: 2,
            witness: DiagWitness::Undefined { input: probe.clone() },
            add_a: keep_probe_out(),
            add_b: Vec::new(),
            m_next: shift(m, 1),
        };
    };
    if let Some(x) = ShortlexIter::new()
        .take_while(|x| *x < probe)
        .filter(|x| !a.contains(x))
        .find(|x| phi.eval_opt(x, budget).as_ref() == Some(&v))
    {
        return StageOutcome {
            case: 2,
            witness: DiagWitness::Collision { first: x, second: probe.clone(), value: v },
            add_a: keep_probe_out(),
            add_b: Vec::new(),
            m_next: shift(m, 1),
        };
    }
    if let Some(x) = scan_above(phi, budget, horizon, &probe, &v) {
        let block_top = m.appended(1).appended(1);
        if x <= block_top {
            let fill = [m.appended(0).appended(1), m.appended(1).appended(0), block_top]
                .into_iter()
                .find(|c| *c != x)
                .expect("two of the three candidates differ from x");
            return StageOutcome {
                case: 3,
                witness: DiagWitness::Collision { first: probe, second: x, value: v },
                add_a: vec![fill],
                add_b: Vec::new(),
                m_next: shift(m, 1),
            };
        }
        let y = x
            .parent()
            .and_then(|p| p.parent())
            .expect("strings above the probe block have length at least two");
        let fill = [
            y.appended(0).appended(0),
            y.appended(0).appended(1),
            y.appended(1).appended(0),
            y.appended(1).appended(1),
        ]
        .into_iter()
        .find(|c| *c != x)
        .expect("three of the four candidates differ from x");
        let mut add = keep_probe_out();
        add.extend(blocks_between(&shift(m, 1), &y).map(|z| z.appended(1).appended(1)));
        add.push(fill);
        return StageOutcome {
            case: 4,
            witness: DiagWitness::Collision { first: probe, second: x, value: v },
            add_a: add,
            add_b: Vec::new(),
            m_next: shift(&y, 1),
        };
    }
    StageOutcome {
        case: 1,
        witness: DiagWitness::NonSurjective {
            target: v,
            probe: probe.clone(),
            excluded: vec![probe.clone()],
        },
        add_a: vec![probe],
        add_b: Vec::new(),
        m_next: shift(m, 1),
    }
}

/// Runs one diagonalization stage per function in `phis`, in order,
/// and returns the full trace. The run is deterministic: tracked sets
/// are scanned in shortlex order and forward searches take the first
/// hit. Fails with a resource error when the frontier outgrows the
/// horizon.
pub fn diag_run(
    mode: DiagMode,
    phis: &[PartialFn],
    step_budget: u64,
    horizon_len: usize,
) -> Result<DiagTrace, Error> {
    let mut a: BTreeSet<BStr> = BTreeSet::new();
    let mut b: BTreeSet<BStr> = BTreeSet::new();
    let mut m = BStr::empty();
    let mut stages = Vec::with_capacity(phis.len());
    for (i, phi) in phis.iter().enumerate() {
        let index = i + 1;
        if m.len() + 2 > horizon_len {
            return Err(Error::resource(format!(
                "stage {index} works with strings of length {} but the horizon is {horizon_len}",
                m.len() + 2
            )));
        }
        let outcome = match mode {
            DiagMode::Intersection => intersection_stage(phi, step_budget, horizon_len, &m, &a, &b),
            DiagMode::Union => union_stage(phi, step_budget, horizon_len, &m, &a, &b),
            DiagMode::Complement => complement_stage(phi, step_budget, horizon_len, &m, &a),
        };
        a.extend(outcome.add_a.iter().cloned());
        b.extend(outcome.add_b.iter().cloned());
        stages.push(DiagStage {
            index,
            phi: phi.name.clone(),
            case_taken: outcome.case,
            m_before: m.clone(),
            m_after: outcome.m_next.clone(),
            added_to_a: outcome.add_a,
            added_to_b: outcome.add_b,
            witness: outcome.witness,
        });
        m = outcome.m_next;
    }
    Ok(DiagTrace {
        mode,
        phi_names: phis.iter().map(|p| p.name.clone()).collect(),
        step_budget,
        horizon_len,
        stages,
        a_prefix: a,
        b_prefix: b,
        m_final: m,
    })
}

/// Membership of `x` in the diagonal set determined by the trace. In
/// complement mode only strings below the final frontier block are
/// decided; everything at or above it reports false.
fn diagonal_contains(trace: &DiagTrace, x: &BStr) -> bool {
    match trace.mode {
        DiagMode::Intersection => trace.a_prefix.contains(x) && trace.b_prefix.contains(x),
        DiagMode::Union => trace.a_prefix.contains(x) || trace.b_prefix.contains(x),
        DiagMode::Complement => {
            *x < trace.m_final.appended(0).appended(0) && !trace.a_prefix.contains(x)
        }
    }
}

/// The diagonal set's members decided by the trace, in shortlex order.
fn diagonal_members(trace: &DiagTrace) -> Vec<BStr> {
    match trace.mode {
        DiagMode::Intersection => trace
            .a_prefix
            .intersection(&trace.b_prefix)
            .cloned()
            .collect(),
        DiagMode::Union => trace.a_prefix.union(&trace.b_prefix).cloned().collect(),
        DiagMode::Complement => {
            let frontier = trace.m_final.appended(0).appended(0);
            ShortlexIter::new()
                .take_while(|x| *x < frontier)
                .filter(|x| !trace.a_prefix.contains(x))
                .collect()
        }
    }
}

/// Checks the block discipline of a prefix set: every element sits in
/// a suffix block below the frontier, and every block below the
/// frontier holds exactly one element.
fn block_discipline(
    label: &str,
    set: &BTreeSet<BStr>,
    m_final: &BStr,
    suffix_bits: usize,
) -> VerifyReport {
    let width = 1u32 << suffix_bits;
    let mut report = VerifyReport::new(format!(
        "{label}: exactly one member among the {width} extensions of each string below the frontier"
    ));
    for e in set {
        let prefix = (0..suffix_bits).try_fold(e.clone(), |p, _| p.parent());
        let in_range = prefix.map(|p| p < *m_final).unwrap_or(false);
        report.checked += 1;
        if !in_range {
            report.fail(e, "a block element below the frontier", "outside every block", "element placement");
        }
    }
    for z in ShortlexIter::new().take_while(|z| *z < *m_final) {
        let count = (0..width)
            .filter(|&s| set.contains(&z.concat(&BStr::from_value(suffix_bits, &BigUint::from(s)))))
            .count();
        report.checked += 1;
        if count != 1 {
            report.fail(&z, "exactly one member in its block", count, "block occupancy");
        }
    }
    report
}

/// Re-checks a trace against the functions it claims to defeat: the
/// stage chain is coherent, the prefixes keep the block discipline
/// below the final frontier, every witness is genuine when re-evaluated
/// at the trace's step budget and horizon, and the paired weak ranker
/// ranks the prefixes. All judgements are relative to the recorded
/// bounds.
pub fn diag_verify(trace: &DiagTrace, phis: &[PartialFn]) -> VerifyReport {
    let mut report = VerifyReport::new(format!(
        "diagonal trace in {} mode: {} stages judged at step budget {} and horizon {}",
        trace.mode,
        trace.stages.len(),
        trace.step_budget,
        trace.horizon_len
    ));

    if trace.phi_names.len() != phis.len() || trace.stages.len() != phis.len() {
        report.fail(
            "roster",
            format!("{} functions and as many stages", phis.len()),
            format!("{} names, {} stages", trace.phi_names.len(), trace.stages.len()),
            "roster size",
        );
    }
    for (name, phi) in trace.phi_names.iter().zip(phis) {
        report.checked += 1;
        if *name != phi.name {
            report.fail(name, &phi.name, name, "roster order");
        }
    }

    let mut m = BStr::empty();
    let mut replay_a: BTreeSet<BStr> = BTreeSet::new();
    let mut replay_b: BTreeSet<BStr> = BTreeSet::new();
    for stage in &trace.stages {
        report.checked += 1;
        if stage.m_before != m {
            report.fail(stage.index, &m, &stage.m_before, "frontier chain");
        }
        if stage.m_after <= stage.m_before {
            report.fail(stage.index, "a strictly larger frontier", &stage.m_after, "frontier advance");
        }
        let floor = trace.mode.probe(&stage.m_before);
        for x in stage.added_to_a.iter().chain(&stage.added_to_b) {
            if *x < floor {
                report.fail(x, format!("nothing below {floor}"), x, "addition placement");
            }
        }
        if stage.added_to_a.is_empty() && stage.added_to_b.is_empty() {
            report.fail(stage.index, "at least one addition", "none", "stage growth");
        }
        replay_a.extend(stage.added_to_a.iter().cloned());
        replay_b.extend(stage.added_to_b.iter().cloned());
        m = stage.m_after.clone();
    }
    if trace.m_final != m {
        report.fail("m_final", &m, &trace.m_final, "frontier chain");
    }
    if replay_a != trace.a_prefix {
        report.fail("a_prefix", "the union of stage additions", "a different set", "prefix replay");
    }
    if replay_b != trace.b_prefix {
        report.fail("b_prefix", "the union of stage additions", "a different set", "prefix replay");
    }

    let bits = trace.mode.suffix_bits();
    report.absorb(block_discipline("a_prefix", &trace.a_prefix, &trace.m_final, bits));
    match trace.mode {
        DiagMode::Intersection | DiagMode::Union => {
            report.absorb(block_discipline("b_prefix", &trace.b_prefix, &trace.m_final, bits));
        }
        DiagMode::Complement => {
            report.checked += 1;
            if !trace.b_prefix.is_empty() {
                report.fail("b_prefix", "empty in complement mode", trace.b_prefix.len(), "prefix shape");
            }
        }
    }

    let members = diagonal_members(trace);
    for stage in &trace.stages {
        let Some(phi) = stage.index.checked_sub(1).and_then(|i| phis.get(i)) else {
            continue;
        };
        report.checked += 1;
        match &stage.witness {
            DiagWitness::Undefined { input } => {
                if phi.eval_opt(input, trace.step_budget).is_some() {
                    report.fail(input, "still running at the step budget", "halted", "undefined witness");
                }
                if !diagonal_contains(trace, input) {
                    report.fail(input, "a diagonal-set member", "outside the diagonal set", "undefined witness");
                }
            }
            DiagWitness::Collision { first, second, value } => {
                if first == second {
                    report.fail(first, "two distinct strings", "the same string twice", "collision witness");
                }
                for x in [first, second] {
                    if phi.eval_opt(x, trace.step_budget).as_ref() != Some(value) {
                        report.fail(x, format!("maps to {value}"), "a different value or divergence", "collision witness");
                    }
                    if !diagonal_contains(trace, x) {
                        report.fail(x, "a diagonal-set member", "outside the diagonal set", "collision witness");
                    }
                }
            }
            DiagWitness::NonSurjective { target, probe, excluded } => {
                if phi.eval_opt(probe, trace.step_budget).as_ref() != Some(target) {
                    report.fail(probe, format!("maps to {target}"), "a different value or divergence", "non-surjectivity witness");
                }
                for e in excluded {
                    if diagonal_contains(trace, e) {
                        report.fail(e, "kept out of the diagonal set", "a member", "non-surjectivity witness");
                    }
                }
                for x in &members {
                    if phi.eval_opt(x, trace.step_budget).as_ref() == Some(target) {
                        report.fail(x, format!("no diagonal member maps to {target}"), "a member that does", "non-surjectivity witness");
                    }
                }
                let floor = trace.mode.scan_floor(&stage.m_before);
                if let Some(x) =
                    scan_above(phi, trace.step_budget, trace.horizon_len, &floor, target)
                {
                    report.fail(x, format!("no hit on {target} above {floor} within the horizon"), "a hit", "non-surjectivity witness");
                }
            }
        }
    }

    let arity = 1usize << bits;
    let sides: &[(&str, &BTreeSet<BStr>)] = match trace.mode {
        DiagMode::Complement => &[("a_prefix", &trace.a_prefix)],
        _ => &[("a_prefix", &trace.a_prefix), ("b_prefix", &trace.b_prefix)],
    };
    for (label, set) in sides {
        match paired_weak_ranker(arity) {
            Ok((_, ranker)) => {
                let owned = (*set).clone();
                let ranked = RankedSet::new(format!("diag_{label}"), move |x: &BStr| owned.contains(x))
                    .with_ranker(ranker);
                match verify_weak(&ranked, trace.m_final.len() + bits) {
                    Ok(sub) => report.absorb(sub),
                    Err(e) => report.fail(label, "a weak-rankable prefix", e, "paired weak ranker"),
                }
            }
            Err(e) => report.fail(label, "a supported block width", e, "paired weak ranker"),
        }
    }

    report
}

/// A small roster of step-counted partial functions exercising every
/// case of the diagonalization: an injective total function, a
/// constant, a shift, a function diverging on half the inputs, and a
/// finite table that is undefined almost everywhere.
pub fn diag_phi_catalog() -> Vec<PartialFn> {
    vec![
        PartialFn::from_cost("identity", |x| Some(x.len() as u64 + 1), BStr::clone),
        PartialFn::from_cost("const_eps", |_| Some(1), |_| BStr::empty()),
        PartialFn::from_cost("shift_by_2", |x| Some(x.len() as u64 + 2), |x| shift(x, 2)),
        PartialFn::from_cost(
            "diverge_even_len",
            |x| (x.len() % 2 == 1).then_some(x.len() as u64 + 1),
            BStr::clone,
        ),
        PartialFn::from_cost(
            "finite_table",
            |x| (x.len() <= 1).then_some(2),
            |x| {
                if x.is_empty() {
                    BStr::from_bits(&[1])
                } else {
                    BStr::from_bits(&[1, 1, 1])
                }
            },
        ),
    ]
}
