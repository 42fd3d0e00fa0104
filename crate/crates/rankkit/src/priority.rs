//! A deterministic, desk-scale simulator of a finite-injury priority
//! construction over triples.
//!
//! The carrier is the set of triples `(t,j,k)` with `t < 4`, identified
//! with binary strings through a fixed pairing. A map `f_map` turns the
//! triples into a forest of chains: `t = 3` climbs, `t < 3` descends
//! toward the column roots, and the roots feed into the `t = 3` chain
//! of the same column `k`. A 2-coloring `color` alternates along every
//! edge.
//!
//! The enumerator interleaves evaluation stages and printing stages.
//! Printing stages print initial segments of the chains selected by the
//! queue `Q`. Evaluation stages run the supplied partial functions on
//! column roots under a step budget, and when one halts, one of six
//! cases decides which chain (if any) joins `Q` so that the function
//! fails to map the color-0 part of the printed set onto the color-1
//! part. The requirement bookkeeping (`R`, the counter `b`) follows the
//! construction literally, including the non-monotone reset of `b`;
//! `validate_state` checks the invariants the argument needs, so runs
//! where the literal reset misbehaves are flagged rather than silently
//! accepted.
//!
//! `path_set_check` certifies the printed set is closed under `f_map`
//! with unique printed preimages away from the frontier, which is what
//! makes the two color classes compressible to each other by `f_map`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lexorder::BStr;
use crate::setmodel::{Compression, PartialFn, VerifyReport};

/// A triple `(t,j,k)` with `t < 4`, in bijection with binary strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub t: u8,
    pub j: u64,
    pub k: u64,
}

impl Triple {
    pub fn new(t: u8, j: u64, k: u64) -> Self {
        debug_assert!(t < 4);
        Triple { t, j, k }
    }

    /// The string identified with this triple: the pairing sends
    /// `(t,j,k)` to the string of 0-based index `4*cantor(j,k) + t`,
    /// where `cantor` is the diagonal pairing of naturals.
    pub fn to_bstr(&self) -> BStr {
        let s = BigUint::from(self.j) + self.k;
        let idx = (&s * (&s + 1u32) / 2u32 + self.k) * 4u32 + self.t;
        BStr::from_index(&idx)
    }

    /// Decodes a string back into a triple. Fails only when a
    /// coordinate overflows the supported range.
    pub fn from_bstr(x: &BStr) -> Result<Self, Error> {
        let idx = x.index();
        let t = (&idx % 4u32).try_into().expect("a residue mod 4 fits in u8");
        let c = idx >> 2;
        let s8: BigUint = &c * 8u32 + 1u32;
        let s = s8.sqrt();
        let d = (s - BigUint::one()) / 2u32;
        let k_big = &c - &d * (&d + 1u32) / 2u32;
        let j_big = &d - &k_big;
        let as_u64 = |v: BigUint| -> Result<u64, Error> {
            u64::try_from(v).map_err(|_| {
                Error::resource(format!(
                    "a string of length {} decodes to a triple beyond the supported coordinate range",
                    x.len()
                ))
            })
        };
        Ok(Triple { t, j: as_u64(j_big)?, k: as_u64(k_big)? })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.t, self.j, self.k)
    }
}

/// The chain map: `t = 3` ascends in `j`; `t < 3` with `j > 0` descends;
/// the roots map by `(0,0,k) -> (3,0,k)`, `(1,0,k) -> (0,0,k)`,
/// `(2,0,k) -> (3,0,k)`.
pub fn f_map(x: Triple) -> Triple {
    match (x.t, x.j) {
        (3, j) => Triple::new(3, j + 1, x.k),
        (t, j) if j > 0 => Triple::new(t, j - 1, x.k),
        (0, _) => Triple::new(3, 0, x.k),
        (1, _) => Triple::new(0, 0, x.k),
        (2, _) => Triple::new(3, 0, x.k),
        _ => unreachable!("t is always at most 3"),
    }
}

/// The unique 2-coloring with `color((0,0,k)) = 0` that flips along
/// every `f_map` edge.
pub fn color(x: Triple) -> u8 {
    match x.t {
        0 | 2 => (x.j % 2) as u8,
        _ => ((x.j + 1) % 2) as u8,
    }
}

/// Whether `w` would eventually be printed if the queue were frozen and
/// only printing stages ran from now on.
pub fn would_print(q: &[(u8, u64)], w: &Triple) -> bool {
    if w.t == 3 {
        return q.iter().any(|&(_, k)| k == w.k);
    }
    q.contains(&(w.t, w.k)) || (w.t == 0 && w.j == 0 && q.contains(&(1, w.k)))
}

/// One fired evaluation case: which requirement fired on which column,
/// what the function answered, and how the bookkeeping moved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseEvent {
    pub n: u64,
    pub k: u64,
    pub w: Triple,
    pub case: u8,
    pub b_at_dispatch: u64,
    pub q_added: Option<(u8, u64)>,
    pub r_removed: Vec<(u64, u64)>,
    pub r_refilled: Vec<(u64, u64)>,
    /// Requirements whose standing case-2 witness this event's queue
    /// addition destroyed.
    pub injured: Vec<u64>,
}

/// One stage in the log: an evaluation stage or a printing stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageEvent {
    Eval { stage: u64, added_to_r: (u64, u64), fired: Option<CaseEvent>, b_after: u64 },
    Print { stage: u64, printed_total: u64 },
}

/// The complete state of a finished run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorityState {
    pub q: Vec<(u8, u64)>,
    pub r: BTreeSet<(u64, u64)>,
    pub b: u64,
    pub printed: BTreeSet<Triple>,
    pub stage_log: Vec<StageEvent>,
    pub stages: u64,
}

/// Runs `stages` evaluation/printing stage pairs against the supplied
/// functions. Function indices beyond the list are treated as
/// everywhere-divergent. Deterministic in its inputs.
pub fn priority_run(phis: &[PartialFn], stages: u64) -> Result<PriorityState, Error> {
    if stages == 0 {
        return Err(Error::config("priority_run needs at least one stage"));
    }
    let mut state = PriorityState {
        q: Vec::new(),
        r: BTreeSet::new(),
        b: 0,
        printed: BTreeSet::new(),
        stage_log: Vec::new(),
        stages: 0,
    };
    let mut active_case2: HashMap<u64, Triple> = HashMap::new();
    for i in 1..=stages {
        let added_to_r = (i, state.b);
        state.r.insert(added_to_r);
        state.b += 1;

        let mut hit: Option<(u64, u64, BStr)> = None;
        for &(n, k) in state.r.iter() {
            let Some(phi) = usize::try_from(n - 1).ok().and_then(|ix| phis.get(ix)) else {
                continue;
            };
            if let Some(out) = phi.eval_opt(&Triple::new(0, 0, k).to_bstr(), i) {
                hit = Some((n, k, out));
                break;
            }
        }

        let fired = match hit {
            None => None,
            Some((n, k, out)) => {
                let w = Triple::from_bstr(&out)?;
                let b_at_dispatch = state.b;
                active_case2.remove(&n);
                let (case, q_added) = if color(w) == 0 {
                    (1, Some((0u8, k)))
                } else if w.k != k {
                    if would_print(&state.q, &w) {
                        (3, None)
                    } else {
                        (2, Some((0, k)))
                    }
                } else {
                    match w.t {
                        0 => (4, Some((1, k))),
                        1 | 2 => (5, Some((0, k))),
                        _ => (6, Some((2, k))),
                    }
                };
                let mut injured = Vec::new();
                if let Some(entry) = q_added {
                    state.q.push(entry);
                    let hit_by_entry: Vec<u64> = active_case2
                        .iter()
                        .filter(|(_, witness)| would_print(&[entry], witness))
                        .map(|(&n2, _)| n2)
                        .collect();
                    for n2 in hit_by_entry {
                        active_case2.remove(&n2);
                        injured.push(n2);
                    }
                    injured.sort_unstable();
                }
                if case == 2 {
                    active_case2.insert(n, w);
                }
                state.b = w.k.max(k) + 1;
                let r_removed: Vec<(u64, u64)> =
                    state.r.iter().copied().filter(|&(rn, _)| rn >= n).collect();
                for pair in &r_removed {
                    state.r.remove(pair);
                }
                let mut r_refilled = Vec::new();
                for refill_n in n + 1..=i {
                    let pair = (refill_n, state.b);
                    state.r.insert(pair);
                    r_refilled.push(pair);
                    state.b += 1;
                }
                Some(CaseEvent {
                    n,
                    k,
                    w,
                    case,
                    b_at_dispatch,
                    q_added,
                    r_removed,
                    r_refilled,
                    injured,
                })
            }
        };
        state.stage_log.push(StageEvent::Eval { stage: i, added_to_r, fired, b_after: state.b });

        for &(t, k) in &state.q {
            for j in 0..=i {
                state.printed.insert(Triple::new(3, j, k));
                state.printed.insert(Triple::new(t, j, k));
            }
            if t == 1 {
                state.printed.insert(Triple::new(0, 0, k));
            }
        }
        state
            .stage_log
            .push(StageEvent::Print { stage: i, printed_total: state.printed.len() as u64 });
        state.stages = i;
        debug_assert!(validate_state(&state).clean(), "{}", validate_state(&state).to_table());
    }
    Ok(state)
}

/// Re-checks a finished (or in-progress) state against the invariants
/// the construction's argument relies on: queue columns are distinct
/// and claimed at strictly increasing values of `b`, the requirement
/// set holds one pair per index, every fired case moved the
/// bookkeeping exactly as its case prescribes, injuries only flow from
/// stronger (smaller-index) requirements, and the printed set equals
/// the print of the final queue up to the last stage.
pub fn validate_state(state: &PriorityState) -> VerifyReport {
    let mut report = VerifyReport::new(format!(
        "priority state after {} stages: queue discipline, case bookkeeping, printed reconstruction",
        state.stages
    ));

    let mut seen_k = BTreeSet::new();
    for &(_, k) in &state.q {
        report.checked += 1;
        if !seen_k.insert(k) {
            report.fail(k, "a fresh queue column", "a repeated column", "queue columns");
        }
    }
    let mut ns = BTreeSet::new();
    for &(n, _) in &state.r {
        report.checked += 1;
        if !ns.insert(n) {
            report.fail(n, "one pair per requirement", "a duplicate", "requirement set");
        }
    }

    let mut expected_stage = 1;
    let mut want_eval = true;
    let mut q_replay: Vec<(u8, u64)> = Vec::new();
    let mut last_claim_b: Option<u64> = None;
    for event in &state.stage_log {
        report.checked += 1;
        match event {
            StageEvent::Eval { stage, fired, .. } => {
                if !want_eval || *stage != expected_stage {
                    report.fail(stage, "alternating stages in order", "out of order", "stage order");
                }
                want_eval = false;
                if let Some(ev) = fired {
                    let expected_entry: Option<(u8, u64)> = match ev.case {
                        1 | 2 | 5 => Some((0, ev.k)),
                        3 => None,
                        4 => Some((1, ev.k)),
                        6 => Some((2, ev.k)),
                        other => {
                            report.fail(other, "a case between 1 and 6", other, "case range");
                            None
                        }
                    };
                    if ev.q_added != expected_entry {
                        report.fail(
                            format!("case {} at stage {stage}", ev.case),
                            format!("{expected_entry:?}"),
                            format!("{:?}", ev.q_added),
                            "case bookkeeping",
                        );
                    }
                    if let Some(entry) = ev.q_added {
                        q_replay.push(entry);
                        if let Some(prev) = last_claim_b {
                            if ev.b_at_dispatch <= prev {
                                report.fail(
                                    stage,
                                    format!("a queue claim above {prev}"),
                                    ev.b_at_dispatch,
                                    "queue claims must happen at increasing b",
                                );
                            }
                        }
                        last_claim_b = Some(ev.b_at_dispatch);
                    }
                    for &(rn, _) in &ev.r_removed {
                        if rn < ev.n {
                            report.fail(rn, format!("removals at indices >= {}", ev.n), rn, "pruning discipline");
                        }
                    }
                    let want_refills: Vec<u64> = (ev.n + 1..=*stage).collect();
                    let got_refills: Vec<u64> = ev.r_refilled.iter().map(|&(n, _)| n).collect();
                    if got_refills != want_refills {
                        report.fail(
                            stage,
                            format!("refills {want_refills:?}"),
                            format!("{got_refills:?}"),
                            "refill discipline",
                        );
                    }
                    if ev.r_refilled.windows(2).any(|w| w[1].1 != w[0].1 + 1) {
                        report.fail(stage, "consecutive refill columns", "a gap", "refill discipline");
                    }
                    for &n2 in &ev.injured {
                        if n2 <= ev.n {
                            report.fail(
                                n2,
                                format!("injuries only to requirements weaker than {}", ev.n),
                                n2,
                                "injury direction",
                            );
                        }
                    }
                }
            }
            StageEvent::Print { stage, printed_total } => {
                if want_eval || *stage != expected_stage {
                    report.fail(stage, "alternating stages in order", "out of order", "stage order");
                }
                want_eval = true;
                expected_stage += 1;
                if *stage == state.stages && *printed_total != state.printed.len() as u64 {
                    report.fail(stage, state.printed.len(), printed_total, "printed count");
                }
            }
        }
    }
    if q_replay != state.q {
        report.fail("q", "the queue assembled by the log", "a different queue", "queue replay");
    }

    let mut reconstructed = BTreeSet::new();
    for &(t, k) in &state.q {
        for j in 0..=state.stages {
            reconstructed.insert(Triple::new(3, j, k));
            reconstructed.insert(Triple::new(t, j, k));
        }
        if t == 1 {
            reconstructed.insert(Triple::new(0, 0, k));
        }
    }
    report.checked += 1;
    if reconstructed != state.printed {
        report.fail(
            "printed",
            format!("{} reconstructed triples", reconstructed.len()),
            format!("{} stored triples", state.printed.len()),
            "printed reconstruction",
        );
    }
    report
}

/// Checks the path-set property of a printed set: away from the
/// frontier (`j` within `margin` of the last stage), `f_map` stays
/// inside the set and every element has exactly one printed preimage.
pub fn path_set_check(printed: &BTreeSet<Triple>, last_stage: u64, margin: u64) -> VerifyReport {
    let bound = last_stage.saturating_sub(margin);
    let mut report = VerifyReport::new(format!(
        "path set: closure under the chain map and unique preimages for j <= {bound}"
    ));
    let mut preimages: HashMap<Triple, u32> = HashMap::new();
    for y in printed {
        *preimages.entry(f_map(*y)).or_insert(0) += 1;
    }
    let mut frontier = 0u64;
    for x in printed {
        if x.j > bound {
            frontier += 1;
            continue;
        }
        report.checked += 1;
        if !printed.contains(&f_map(*x)) {
            report.fail(x, format!("{} printed", f_map(*x)), "missing", "closure under the chain map");
        }
        let count = preimages.get(x).copied().unwrap_or(0);
        if count != 1 {
            report.fail(x, "exactly one printed preimage", count, "preimage uniqueness");
        }
    }
    if frontier > 0 {
        report.warn(format!("{frontier} frontier elements with j > {bound} exempted"));
    }
    report
}

/// Splits a printed set into its color classes.
pub fn split_by_color(printed: &BTreeSet<Triple>) -> (BTreeSet<Triple>, BTreeSet<Triple>) {
    let mut c0 = BTreeSet::new();
    let mut c1 = BTreeSet::new();
    for &x in printed {
        if color(x) == 0 {
            c0.insert(x);
        } else {
            c1.insert(x);
        }
    }
    (c0, c1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReqStatus {
    Satisfied,
    Injured,
    Pending,
}

impl fmt::Display for ReqStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ReqStatus::Satisfied => "satisfied",
            ReqStatus::Injured => "injured",
            ReqStatus::Pending => "pending",
        };
        f.write_str(name)
    }
}

/// Lifecycle of one requirement over a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementStatus {
    pub n: u64,
    pub status: ReqStatus,
    pub injury_count: u64,
    /// Indices of the requirements whose events destroyed a standing
    /// case-2 witness of this one.
    pub injured_by: Vec<u64>,
}

/// Extracts the per-requirement lifecycle from a run's log: which
/// requirements fired, which were injured and by whom, and which are
/// still pending.
pub fn requirement_report(state: &PriorityState) -> Vec<RequirementStatus> {
    let mut last_firing: HashMap<u64, &CaseEvent> = HashMap::new();
    let mut injuries: HashMap<u64, Vec<u64>> = HashMap::new();
    for event in &state.stage_log {
        if let StageEvent::Eval { fired: Some(ev), .. } = event {
            for &n2 in &ev.injured {
                injuries.entry(n2).or_default().push(ev.n);
            }
            last_firing.insert(ev.n, ev);
        }
    }
    (1..=state.stages)
        .map(|n| {
            let injured_by = injuries.get(&n).cloned().unwrap_or_default();
            let status = match last_firing.get(&n) {
                None => ReqStatus::Pending,
                Some(ev) if ev.case == 2 && would_print(&state.q, &ev.w) => ReqStatus::Injured,
                Some(_) => ReqStatus::Satisfied,
            };
            RequirementStatus { n, status, injury_count: injured_by.len() as u64, injured_by }
        })
        .collect()
}

/// Turns a bijection of strings and its inverse into a matched pair of
/// compressions, one per direction, each carrying the other map as its
/// witness. Both compositions are checked on all strings up to
/// `check_len`; a mismatch is a contract violation.
pub fn iso_to_compressions(
    g: impl Fn(&BStr) -> BStr + Send + Sync + 'static,
    g_inv: impl Fn(&BStr) -> BStr + Send + Sync + 'static,
    check_len: usize,
) -> Result<(Compression, Compression), Error> {
    use crate::lexorder::strings_up_to_len;
    use std::sync::Arc;

    let g = Arc::new(g);
    let g_inv = Arc::new(g_inv);
    for x in strings_up_to_len(check_len) {
        let round = g_inv(&g(&x));
        if round != x {
            return Err(Error::contract(format!(
                "inverse check failed: g_inv(g({x})) = {round}"
            )));
        }
        let round = g(&g_inv(&x));
        if round != x {
            return Err(Error::contract(format!(
                "inverse check failed: g(g_inv({x})) = {round}"
            )));
        }
    }
    let (g2, gi2) = (g.clone(), g_inv.clone());
    let forward = Compression::total_with_witness(move |x| g(x), move |z| g_inv(z));
    let backward = Compression::total_with_witness(move |x| gi2(x), move |z| g2(z));
    Ok((forward, backward))
}

/// The shipped roster: five functions that drive the run through every
/// evaluation case, plus one that never halts. Each decodes its input
/// as a triple and answers with a fixed reshaping of it.
pub fn priority_phi_catalog() -> Vec<PartialFn> {
    fn on_triple(
        name: &str,
        cost: u64,
        out: impl Fn(Triple) -> Triple + Send + Sync + 'static,
    ) -> PartialFn {
        let decode = |x: &BStr| Triple::from_bstr(x).ok();
        PartialFn::from_cost(
            name,
            move |x| decode(x).map(|_| cost),
            move |x| out(decode(x).expect("cost gate already decoded the input")).to_bstr(),
        )
    }
    vec![
        on_triple("tri_ident", 2, |w| w),
        on_triple("tri_flag3", 3, |w| Triple::new(3, 0, w.k)),
        on_triple("tri_flag1", 4, |w| Triple::new(1, 0, w.k)),
        on_triple("tri_bump_j", 5, |w| Triple::new(0, 1, w.k)),
        on_triple("tri_next_col", 6, |w| Triple::new(3, 0, w.k + 1)),
        PartialFn::from_cost("diverge", |_| None, BStr::clone),
    ]
}
