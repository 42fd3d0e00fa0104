//! The set-expression language of the command line: catalog names, the
//! four combinators, and finite literals.
//!
//! Grammar, with whitespace insignificant everywhere:
//!
//! ```text
//! expr := NAME | FUNC '(' expr (',' expr)* ')' | 'finite' '{' STR (',' STR)* '}'
//! FUNC := 'union' | 'intersect' | 'complement' | 'join'
//! STR  := ('0'|'1')+ | 'eps'
//! ```
//!
//! Unknown catalog names are rejected at parse time, so an expression that
//! parses always evaluates. Evaluation carries over whatever certified
//! structure survives the operation: joins keep strong rankers and
//! compressors, complements keep strong rankers, unions and intersections
//! keep membership only. Finite literals get a table ranker but no
//! compressor, since no finite set maps onto the full string set.

use std::fmt;
use std::sync::Arc;

use rankkit::{
    build_set, catalog, catalog_entry, complement_strong, join_sets, BStr, Error, Rank, RankedSet,
    Ranker,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    Name(String),
    Union(Box<SetExpr>, Box<SetExpr>),
    Intersect(Box<SetExpr>, Box<SetExpr>),
    Complement(Box<SetExpr>),
    Join(Box<SetExpr>, Box<SetExpr>),
    Finite(Vec<BStr>),
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Name(n) => f.write_str(n),
            SetExpr::Union(a, b) => write!(f, "union({a},{b})"),
            SetExpr::Intersect(a, b) => write!(f, "intersect({a},{b})"),
            SetExpr::Complement(a) => write!(f, "complement({a})"),
            SetExpr::Join(a, b) => write!(f, "join({a},{b})"),
            SetExpr::Finite(ms) => {
                f.write_str("finite{")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("}")
            }
        }
    }
}

pub fn parse_expr(text: &str) -> Result<SetExpr, Error> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl fmt::Display) -> Error {
        Error::domain(format!("syntax error at byte {}: {msg}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<(), Error> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> Result<(String, usize), Error> {
        self.skip_ws();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a name"));
        }
        Ok((String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned(), start))
    }

    fn expr(&mut self) -> Result<SetExpr, Error> {
        let (name, start) = self.word()?;
        match (name.as_str(), self.peek()) {
            ("finite", Some(b'{')) => self.finite(),
            ("union", Some(b'(')) => {
                let mut a = self.args("union", 2)?;
                let b = a.pop().unwrap();
                Ok(SetExpr::Union(Box::new(a.pop().unwrap()), Box::new(b)))
            }
            ("intersect", Some(b'(')) => {
                let mut a = self.args("intersect", 2)?;
                let b = a.pop().unwrap();
                Ok(SetExpr::Intersect(Box::new(a.pop().unwrap()), Box::new(b)))
            }
            ("join", Some(b'(')) => {
                let mut a = self.args("join", 2)?;
                let b = a.pop().unwrap();
                Ok(SetExpr::Join(Box::new(a.pop().unwrap()), Box::new(b)))
            }
            ("complement", Some(b'(')) => {
                let mut a = self.args("complement", 1)?;
                Ok(SetExpr::Complement(Box::new(a.pop().unwrap())))
            }
            (_, Some(b'(')) => Err(Error::domain(format!(
                "syntax error at byte {start}: unknown function {name:?}; \
                 the functions are union, intersect, complement, join"
            ))),
            _ => {
                if catalog_entry(&name).is_none() {
                    let known: Vec<&str> = catalog().iter().map(|e| e.name).collect();
                    return Err(Error::domain(format!(
                        "unknown set name {name:?} at byte {start}; known names: {}",
                        known.join(", ")
                    )));
                }
                Ok(SetExpr::Name(name))
            }
        }
    }

    fn args(&mut self, func: &str, arity: usize) -> Result<Vec<SetExpr>, Error> {
        self.eat(b'(')?;
        let mut out = vec![self.expr()?];
        loop {
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    out.push(self.expr()?);
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
        if out.len() != arity {
            return Err(Error::domain(format!(
                "syntax error at byte {}: {func} takes {arity} argument{}, got {}",
                self.pos,
                if arity == 1 { "" } else { "s" },
                out.len()
            )));
        }
        Ok(out)
    }

    fn finite(&mut self) -> Result<SetExpr, Error> {
        self.eat(b'{')?;
        let mut members = vec![self.member_token()?];
        loop {
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    members.push(self.member_token()?);
                }
                Some(b'}') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("expected ',' or '}'")),
            }
        }
        members.sort();
        members.dedup();
        Ok(SetExpr::Finite(members))
    }

    fn member_token(&mut self) -> Result<BStr, Error> {
        let (word, start) = self.word()?;
        if word == "eps" {
            return Ok(BStr::empty());
        }
        if !word.is_empty() && word.bytes().all(|b| b == b'0' || b == b'1') {
            return Ok(word.parse().expect("checked digits"));
        }
        Err(Error::domain(format!(
            "syntax error at byte {start}: expected a 0/1 string or eps, got {word:?}"
        )))
    }
}

pub fn eval_expr(expr: &SetExpr) -> Result<RankedSet, Error> {
    match expr {
        SetExpr::Name(n) => build_set(n),
        SetExpr::Finite(members) => Ok(finite_set(members)),
        SetExpr::Complement(inner) => {
            let s = eval_expr(inner)?;
            let m = s.member.clone();
            let mut out = RankedSet::with_member_fn(
                format!("complement({})", s.name),
                Arc::new(move |x: &BStr| !m(x)),
            );
            if let Some(r) = &s.ranker {
                if let Ok(c) = complement_strong(r) {
                    out = out.with_ranker(c);
                }
            }
            Ok(out)
        }
        SetExpr::Join(a, b) => Ok(join_sets(&eval_expr(a)?, &eval_expr(b)?)),
        SetExpr::Union(a, b) => {
            let (sa, sb) = (eval_expr(a)?, eval_expr(b)?);
            let (ma, mb) = (sa.member.clone(), sb.member.clone());
            Ok(RankedSet::with_member_fn(
                format!("union({},{})", sa.name, sb.name),
                Arc::new(move |x: &BStr| ma(x) || mb(x)),
            ))
        }
        SetExpr::Intersect(a, b) => {
            let (sa, sb) = (eval_expr(a)?, eval_expr(b)?);
            let (ma, mb) = (sa.member.clone(), sb.member.clone());
            Ok(RankedSet::with_member_fn(
                format!("intersect({},{})", sa.name, sb.name),
                Arc::new(move |x: &BStr| ma(x) && mb(x)),
            ))
        }
    }
}

fn finite_set(members: &[BStr]) -> RankedSet {
    let mut sorted = members.to_vec();
    sorted.sort();
    sorted.dedup();
    let name = SetExpr::Finite(sorted.clone()).to_string();
    let for_member = sorted.clone();
    let ranker = Ranker::strong(move |x: &BStr| {
        Rank::from(sorted.iter().filter(|m| *m <= x).count())
    });
    RankedSet::with_member_fn(
        name,
        Arc::new(move |x: &BStr| for_member.binary_search(x).is_ok()),
    )
    .with_ranker(ranker)
}

/// The catalog's recorded verification bound for a bare name, if the
/// expression is one: padding-heavy sets record smaller bounds than the
/// global defaults.
pub fn catalog_bound(expr: &SetExpr, compression: bool) -> Option<usize> {
    match expr {
        SetExpr::Name(n) => {
            let entry = catalog_entry(n)?;
            if compression {
                entry.compress_max_len
            } else {
                Some(entry.rank_max_len)
            }
        }
        _ => None,
    }
}
