//! Exact ranking algebra over binary strings.
//!
//! The crate is organized around one invariant: every closed-form ranking,
//! compression, or simulation it ships is checkable against a brute-force
//! oracle that shares no code with it. `lexorder` fixes the shortlex order
//! and its arithmetic; `setmodel` defines sets, rankers, compressions, and
//! the verification scans; the remaining modules build specific families of
//! sets and the procedures that manipulate them.

pub mod catalog;
pub mod combinators;
pub mod constructions;
pub mod diagonal;
pub mod error;
pub mod lexorder;
pub mod priority;
pub mod retarget;
pub mod setmodel;

pub use catalog::{build_set, catalog, catalog_entry, CatalogEntry};
pub use combinators::{
    boolean_identity_rank, complement_semistrong_via_join, complement_strong, decode_witness,
    join_compress, join_member, join_sets, join_strong, strongify_nongappy, subtract_compress,
    symdiff_rank, union_compress, BooleanMode, Polynomial,
};
pub use constructions::{
    beacons_set, count_sat, cpo_decode, cpo_set, decode_formula, encode_formula,
    extract_sat_count_a, extract_sat_count_b, formula_corpus, green_witnesses,
    paired_weak_ranker, thm11_extract, thm11_sets, thm16_language, thm30_sets, toy_maps,
    tyef_detect, tyef_sets, FormulaAst, FormulaBody, GreenWitnesses, PairPattern, PayloadFn,
    Thm11Sets, Thm16Language, Thm30Sets,
};
pub use diagonal::{
    diag_phi_catalog, diag_run, diag_verify, DiagMode, DiagStage, DiagTrace, DiagWitness,
};
pub use error::Error;
pub use lexorder::{
    rank_sigma_star, shift, shift_big, shortlex_cmp, strings_up_to_len, unrank, BStr, Rank,
    ShortlexIter,
};
pub use priority::{
    color, f_map, iso_to_compressions, path_set_check, priority_phi_catalog, priority_run,
    requirement_report, split_by_color, validate_state, would_print, CaseEvent, PriorityState,
    ReqStatus, RequirementStatus, StageEvent, Triple,
};
pub use retarget::{
    collision_pairs, decide_via_coenumerator, decide_via_selector, honest_normalize, retarget_re,
    retarget_rec, selector_complement_subset, untarget_re, untarget_rec, Enumerator, Selector,
};
pub use setmodel::{
    brute_rank, rank_to_compression, verify_compression, verify_semistrong, verify_strong,
    verify_weak, Compression, MapFn, MemberFn, Partial, PartialFn, RankFn, RankOrOut, RankedSet,
    Ranker, RankerKind, SemiRankFn, StepFn, StepResult, VerifyFailure, VerifyReport,
};
