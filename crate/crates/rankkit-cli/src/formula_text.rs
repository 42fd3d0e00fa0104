//! Textual propositional formulas for the satcount subcommand.
//!
//! Grammar, whitespace insignificant:
//!
//! ```text
//! formula := 'x'INDEX | 'not' '(' formula ')'
//!          | 'and' '(' formula ',' formula ')' | 'or' '(' formula ',' formula ')'
//! ```
//!
//! The variable count defaults to one past the highest index used; an
//! explicit count may widen it (extra variables double the assignment
//! space without touching satisfaction).

use rankkit::{Error, FormulaAst, FormulaBody};

pub fn parse_formula(text: &str, var_count: Option<u8>) -> Result<FormulaAst, Error> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    let body = p.formula()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.error("unexpected trailing input"));
    }
    let needed = max_var(&body) + 1;
    let var_count = var_count.unwrap_or(needed);
    if var_count < needed {
        return Err(Error::domain(format!(
            "the formula uses variable x{}, so it needs at least {needed} variables, got {var_count}",
            needed - 1
        )));
    }
    Ok(FormulaAst { var_count, body })
}

fn max_var(body: &FormulaBody) -> u8 {
    match body {
        FormulaBody::Var(i) => *i,
        FormulaBody::Not(a) => max_var(a),
        FormulaBody::And(a, b) | FormulaBody::Or(a, b) => max_var(a).max(max_var(b)),
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl std::fmt::Display) -> Error {
        Error::domain(format!("formula syntax error at byte {}: {msg}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<(), Error> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn formula(&mut self) -> Result<FormulaBody, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("");
        match word {
            "not" => {
                self.eat(b'(')?;
                let a = self.formula()?;
                self.eat(b')')?;
                Ok(FormulaBody::not(a))
            }
            "and" | "or" => {
                self.eat(b'(')?;
                let a = self.formula()?;
                self.eat(b',')?;
                let b = self.formula()?;
                self.eat(b')')?;
                Ok(if word == "and" {
                    FormulaBody::and(a, b)
                } else {
                    FormulaBody::or(a, b)
                })
            }
            _ => {
                let Some(digits) = word.strip_prefix('x') else {
                    return Err(Error::domain(format!(
                        "formula syntax error at byte {start}: expected x<index>, not, and, or; got {word:?}"
                    )));
                };
                let index: u8 = digits.parse().map_err(|_| {
                    Error::domain(format!(
                        "formula syntax error at byte {start}: variable index {digits:?} is not a number below 256"
                    ))
                })?;
                Ok(FormulaBody::var(index))
            }
        }
    }
}
