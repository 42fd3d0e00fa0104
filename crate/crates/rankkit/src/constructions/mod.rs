//! Concrete ranked-set constructions.
//!
//! Everything here builds explicit languages with exact rank formulas:
//! satisfiability-counting languages whose rankers expose #SAT, block
//! languages that package a length-bounded function behind a ranker,
//! and small witness families that separate ranker notions.

pub mod formula;
pub mod tables;
pub mod thm11;
pub mod thm16;
pub mod thm30;
pub mod witnesses;

pub use formula::{
    count_sat, decode_formula, encode_formula, formula_corpus, FormulaAst, FormulaBody,
};
pub use thm11::{rank_thm11_a, rank_thm11_a_cap_b, thm11_extract, thm11_sets, Thm11Sets};
pub use thm16::{thm16_language, toy_maps, PayloadFn, Thm16Language};
pub use thm30::{
    beacons_set, extract_sat_count_a, extract_sat_count_b, rank_beacons, rank_thm30_a,
    rank_thm30_b, rank_thm30_join, rank_thm30_union, thm30_sets, Thm30Sets,
};
pub use witnesses::{
    cpo_decode, cpo_set, green_witnesses, paired_weak_ranker, rank_ends_in_one, rank_nonempty,
    tyef_detect, tyef_sets, GreenWitnesses, PairPattern,
};
