//! Boolean formulas and their bit-string encoding.
//!
//! A formula is a variable count `k` (1..=255) plus an expression tree
//! over `VAR(i)` with `i < k`, `AND`, `OR`, `NOT`. The encoding is an
//! 8-bit big-endian `k` header followed by a postfix token stream with
//! 2-bit opcodes: `00` = VAR plus an 8-bit index, `01` = AND, `10` = OR,
//! `11` = NOT. A string is a valid encoding iff the stream parses with
//! exactly one value left on the stack, no bits remain, every index is
//! below `k`, and `k` does not exceed the total bit length.

use num_bigint::BigUint;

use crate::error::Error;
use crate::lexorder::{BStr, Rank};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaBody {
    Var(u8),
    Not(Box<FormulaBody>),
    And(Box<FormulaBody>, Box<FormulaBody>),
    Or(Box<FormulaBody>, Box<FormulaBody>),
}

impl FormulaBody {
    pub fn var(i: u8) -> Self {
        FormulaBody::Var(i)
    }

    pub fn not(a: FormulaBody) -> Self {
        FormulaBody::Not(Box::new(a))
    }

    pub fn and(a: FormulaBody, b: FormulaBody) -> Self {
        FormulaBody::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: FormulaBody, b: FormulaBody) -> Self {
        FormulaBody::Or(Box::new(a), Box::new(b))
    }

    fn eval(&self, assignment: &dyn Fn(u8) -> bool) -> bool {
        match self {
            FormulaBody::Var(i) => assignment(*i),
            FormulaBody::Not(a) => !a.eval(assignment),
            FormulaBody::And(a, b) => a.eval(assignment) && b.eval(assignment),
            FormulaBody::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }

    fn collect_vars(&self, out: &mut Vec<u8>) {
        match self {
            FormulaBody::Var(i) => {
                if !out.contains(i) {
                    out.push(*i);
                }
            }
            FormulaBody::Not(a) => a.collect_vars(out),
            FormulaBody::And(a, b) | FormulaBody::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn max_var(&self) -> u8 {
        match self {
            FormulaBody::Var(i) => *i,
            FormulaBody::Not(a) => a.max_var(),
            FormulaBody::And(a, b) | FormulaBody::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaAst {
    pub var_count: u8,
    pub body: FormulaBody,
}

impl FormulaAst {
    pub fn new(var_count: u8, body: FormulaBody) -> Self {
        FormulaAst { var_count, body }
    }

    /// Evaluates under the assignment whose value is `sigma` when the k
    /// assignment bits are read as a big-endian number (variable 0 is the
    /// most significant bit). This matches the padded-assignment strings:
    /// bit i of the string assigns variable i.
    pub fn eval_value(&self, sigma: u64) -> bool {
        let k = self.var_count as u32;
        self.body.eval(&|i| (sigma >> (k - 1 - i as u32)) & 1 == 1)
    }

    /// Evaluates under the assignment read off a padded bit string: bit i
    /// assigns variable i. The slice must be at least k bits long.
    pub(crate) fn eval_bits(&self, beta: &[u8]) -> bool {
        self.body.eval(&|i| beta[i as usize] == 1)
    }

    /// Variables that actually occur in the body.
    pub fn support(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.body.collect_vars(&mut out);
        out.sort_unstable();
        out
    }
}

fn push_byte(bits: &mut Vec<u8>, byte: u8) {
    for shift in (0..8).rev() {
        bits.push((byte >> shift) & 1);
    }
}

fn emit_body(body: &FormulaBody, bits: &mut Vec<u8>) {
    match body {
        FormulaBody::Var(i) => {
            bits.extend_from_slice(&[0, 0]);
            push_byte(bits, *i);
        }
        FormulaBody::And(a, b) => {
            emit_body(a, bits);
            emit_body(b, bits);
            bits.extend_from_slice(&[0, 1]);
        }
        FormulaBody::Or(a, b) => {
            emit_body(a, bits);
            emit_body(b, bits);
            bits.extend_from_slice(&[1, 0]);
        }
        FormulaBody::Not(a) => {
            emit_body(a, bits);
            bits.extend_from_slice(&[1, 1]);
        }
    }
}

/// Serializes a formula. Fails on a zero variable count or an index at or
/// above it.
pub fn encode_formula(f: &FormulaAst) -> Result<BStr, Error> {
    if f.var_count == 0 {
        return Err(Error::domain("a formula needs at least one variable"));
    }
    if f.body.max_var() >= f.var_count {
        return Err(Error::domain(format!(
            "variable {} out of range for a {}-variable formula",
            f.body.max_var(),
            f.var_count
        )));
    }
    let mut bits = Vec::new();
    push_byte(&mut bits, f.var_count);
    emit_body(&f.body, &mut bits);
    Ok(BStr::from_bits(&bits))
}

fn read_byte(bits: &[u8], pos: usize) -> Option<u8> {
    if pos + 8 > bits.len() {
        return None;
    }
    let mut v = 0u8;
    for &b in &bits[pos..pos + 8] {
        v = (v << 1) | b;
    }
    Some(v)
}

/// Parses a bit string as a formula encoding; `None` on anything invalid.
pub fn decode_formula(alpha: &BStr) -> Option<FormulaAst> {
    let bits = alpha.bits();
    let k = read_byte(bits, 0)?;
    if k == 0 || (k as usize) > bits.len() {
        return None;
    }
    let mut pos = 8;
    let mut stack: Vec<FormulaBody> = Vec::new();
    while pos < bits.len() {
        if pos + 2 > bits.len() {
            return None;
        }
        let op = (bits[pos], bits[pos + 1]);
        pos += 2;
        match op {
            (0, 0) => {
                let i = read_byte(bits, pos)?;
                pos += 8;
                if i >= k {
                    return None;
                }
                stack.push(FormulaBody::Var(i));
            }
            (0, 1) | (1, 0) => {
                let b = stack.pop()?;
                let a = stack.pop()?;
                stack.push(if op == (0, 1) {
                    FormulaBody::and(a, b)
                } else {
                    FormulaBody::or(a, b)
                });
            }
            (1, 1) => {
                let a = stack.pop()?;
                stack.push(FormulaBody::not(a));
            }
            _ => unreachable!("bits are 0 or 1"),
        }
    }
    if stack.len() == 1 {
        Some(FormulaAst::new(k, stack.pop().unwrap()))
    } else {
        None
    }
}

/// Exact number of satisfying assignments by full enumeration over 2^k
/// assignments; refuses k > 20.
pub fn count_sat(f: &FormulaAst) -> Result<Rank, Error> {
    let k = f.var_count as u32;
    if k > 20 {
        return Err(Error::resource(format!(
            "satisfying-assignment enumeration over 2^{k} assignments refused"
        )));
    }
    let mut count = 0u64;
    for sigma in 0..(1u64 << k) {
        if f.eval_value(sigma) {
            count += 1;
        }
    }
    Ok(Rank::from(count))
}

/// Exact satisfying-assignment count with no bound on k: a truth table
/// over the variables that actually occur, times 2^(k − occurring).
pub(crate) fn sat_total(f: &FormulaAst) -> Result<BigUint, Error> {
    let support = f.support();
    let t = support.len() as u32;
    if t > 24 {
        return Err(Error::resource(format!(
            "formula touches {t} variables; truth-table counting refused"
        )));
    }
    let k = f.var_count as u32;
    let mut rows = 0u64;
    for pattern in 0..(1u64 << t) {
        let assignment = |i: u8| -> bool {
            match support.iter().position(|&v| v == i) {
                Some(idx) => (pattern >> (t - 1 - idx as u32)) & 1 == 1,
                None => false,
            }
        };
        if f.body.eval(&assignment) {
            rows += 1;
        }
    }
    Ok(BigUint::from(rows) << (k - t))
}

/// Does `beta` encode a satisfying assignment of `f` padded with zeros?
/// The first k bits assign the variables; the rest must all be zero.
pub(crate) fn padded_sat(f: &FormulaAst, beta: &[u8]) -> bool {
    let k = f.var_count as usize;
    beta.len() >= k && beta[k..].iter().all(|&b| b == 0) && f.eval_bits(beta)
}

/// Number of padded assignment strings β of length `pad_len` (the first k
/// bits assign the variables, the rest are 0) that satisfy `f` and have
/// value at most `bound`.
pub(crate) fn sat_below(f: &FormulaAst, pad_len: usize, bound: u64) -> Result<u64, Error> {
    let k = f.var_count as u32;
    if (k as usize) > pad_len {
        return Err(Error::domain(format!(
            "{k} assignment bits do not fit in a {pad_len}-bit string"
        )));
    }
    if k > 20 {
        return Err(Error::resource(format!(
            "bounded satisfying-assignment enumeration over 2^{k} assignments refused"
        )));
    }
    let sigma_bound = bound >> (pad_len - k as usize);
    let mut count = 0u64;
    for sigma in 0..(1u64 << k) {
        if sigma > sigma_bound {
            break;
        }
        if f.eval_value(sigma) {
            count += 1;
        }
    }
    Ok(count)
}

/// A fixed family of small formulas: every shape over at most two variable
/// occurrences with depth at most 3, for k ∈ {1, 2}. Their encodings stay
/// short enough for the per-length ranking tables.
pub fn formula_corpus() -> Vec<FormulaAst> {
    use FormulaBody as B;
    let mut out = Vec::new();
    for k in 1u8..=2 {
        let vars: Vec<u8> = (0..k).collect();
        for &v in &vars {
            out.push(FormulaAst::new(k, B::var(v)));
            out.push(FormulaAst::new(k, B::not(B::var(v))));
            out.push(FormulaAst::new(k, B::not(B::not(B::var(v)))));
        }
        for &a in &vars {
            for &b in &vars {
                for op in [B::and, B::or] {
                    out.push(FormulaAst::new(k, op(B::var(a), B::var(b))));
                    out.push(FormulaAst::new(k, B::not(op(B::var(a), B::var(b)))));
                    out.push(FormulaAst::new(k, op(B::not(B::var(a)), B::var(b))));
                    out.push(FormulaAst::new(k, op(B::var(a), B::not(B::var(b)))));
                    out.push(FormulaAst::new(k, op(B::not(B::var(a)), B::not(B::var(b)))));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits_of(s: &str) -> Vec<u8> {
        s.chars().map(|c| c as u8 - b'0').collect()
    }

    #[test]
    fn encode_single_variable() {
        let f = FormulaAst::new(1, FormulaBody::var(0));
        let enc = encode_formula(&f).unwrap();
        // 8-bit k = 1, VAR opcode 00, 8-bit index 0.
        assert_eq!(enc.bits(), &bits_of("000000010000000000")[..]);
        assert_eq!(enc.len(), 18);
        assert_eq!(decode_formula(&enc), Some(f));
    }

    #[test]
    fn decode_rejects_garbage() {
        assert_eq!(decode_formula(&BStr::empty()), None);
        // Header only, no body.
        assert_eq!(decode_formula(&BStr::from_bits(&[0; 8])), None);
        // Opcode cut off mid-token.
        let f = FormulaAst::new(1, FormulaBody::var(0));
        let mut bits = encode_formula(&f).unwrap().bits().to_vec();
        bits.pop();
        assert_eq!(decode_formula(&BStr::from_bits(&bits)), None);
        // Index out of range.
        let g = FormulaAst::new(2, FormulaBody::var(1));
        let enc = encode_formula(&g).unwrap();
        let mut bits = enc.bits().to_vec();
        for b in &mut bits[..8] {
            *b = 0;
        }
        bits[7] = 1; // k = 1, but the body names variable 1
        assert_eq!(decode_formula(&BStr::from_bits(&bits)), None);
    }

    #[test]
    fn decode_enforces_var_count_at_most_length() {
        // k = 255 with an 18-bit string: structurally fine, but k > |bits|.
        let mut bits = vec![1; 8];
        bits.extend_from_slice(&[0, 0]);
        bits.extend_from_slice(&[0; 8]);
        assert_eq!(decode_formula(&BStr::from_bits(&bits)), None);
    }

    #[test]
    fn encode_rejects_bad_formulas() {
        assert!(matches!(
            encode_formula(&FormulaAst::new(0, FormulaBody::var(0))),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            encode_formula(&FormulaAst::new(1, FormulaBody::var(1))),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn count_sat_examples() {
        use FormulaBody as B;
        let v = FormulaAst::new(1, B::var(0));
        assert_eq!(count_sat(&v).unwrap(), Rank::from(1u64));

        let contradiction = FormulaAst::new(1, B::and(B::not(B::var(0)), B::var(0)));
        assert_eq!(count_sat(&contradiction).unwrap(), Rank::zero());

        let either = FormulaAst::new(2, B::or(B::var(0), B::var(1)));
        assert_eq!(count_sat(&either).unwrap(), Rank::from(3u64));

        let big = FormulaAst::new(30, B::var(0));
        assert!(matches!(count_sat(&big), Err(Error::Resource(_))));
    }

    #[test]
    fn sat_total_agrees_with_enumeration() {
        for f in formula_corpus() {
            assert_eq!(
                sat_total(&f).unwrap(),
                count_sat(&f).unwrap().into_biguint(),
                "{f:?}"
            );
        }
        // Unbounded k: one free variable doubles the count.
        let f = FormulaAst::new(40, FormulaBody::var(3));
        assert_eq!(sat_total(&f).unwrap(), BigUint::from(1u64) << 39);
    }

    #[test]
    fn sat_below_counts_prefixes() {
        use FormulaBody as B;
        // OR over two variables, padded to 4 bits: satisfying strings are
        // 0100, 1000, 1100 as values 4, 8, 12.
        let f = FormulaAst::new(2, B::or(B::var(0), B::var(1)));
        assert_eq!(sat_below(&f, 4, 0).unwrap(), 0);
        assert_eq!(sat_below(&f, 4, 4).unwrap(), 1);
        assert_eq!(sat_below(&f, 4, 11).unwrap(), 2);
        assert_eq!(sat_below(&f, 4, 15).unwrap(), 3);
    }

    #[test]
    fn corpus_shape() {
        let corpus = formula_corpus();
        assert_eq!(corpus.len(), 59);
        for f in &corpus {
            let enc = encode_formula(f).unwrap();
            assert!(enc.len() <= 34, "{f:?} encodes to {} bits", enc.len());
            assert_eq!(decode_formula(&enc).as_ref(), Some(f));
        }
    }

    fn arb_body(k: u8, depth: u32) -> impl Strategy<Value = FormulaBody> {
        let leaf = (0..k).prop_map(FormulaBody::var);
        leaf.prop_recursive(depth, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(FormulaBody::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| FormulaBody::and(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| FormulaBody::or(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn prop_encode_decode_roundtrip(k in 1u8..=3, body_seed in arb_body(3, 4)) {
            // Clamp variable indices below k so the AST is valid for it.
            fn clamp(b: &FormulaBody, k: u8) -> FormulaBody {
                match b {
                    FormulaBody::Var(i) => FormulaBody::Var(i % k),
                    FormulaBody::Not(a) => FormulaBody::not(clamp(a, k)),
                    FormulaBody::And(a, b) => FormulaBody::and(clamp(a, k), clamp(b, k)),
                    FormulaBody::Or(a, b) => FormulaBody::or(clamp(a, k), clamp(b, k)),
                }
            }
            let f = FormulaAst::new(k, clamp(&body_seed, k));
            let enc = encode_formula(&f).unwrap();
            prop_assert_eq!(decode_formula(&enc), Some(f));
        }
    }
}
