//! Linear couplings between sweep parameters, e.g. `E2 = E1 + E3` or
//! `Th = 10 * E3`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FridgeError, Result};
use crate::models::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    /// `None` for a constant term.
    pub source: Option<String>,
}

/// `target = sum of coeff * source`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DerivedRule {
    pub target: String,
    pub terms: Vec<Term>,
}

impl DerivedRule {
    pub fn parse(text: &str) -> Result<Self> {
        let err = |reason: &str| FridgeError::RuleSyntax {
            rule: text.to_string(),
            reason: reason.to_string(),
        };
        let (lhs, rhs) = text.split_once('=').ok_or_else(|| err("missing `=`"))?;
        let target = lhs.trim();
        if !is_name(target) {
            return Err(err("left-hand side must be a parameter name"));
        }
        let tokens = tokenize(rhs).map_err(|e| err(&e))?;
        let mut terms = Vec::new();
        let mut i = 0;
        let mut sign = 1.0;
        let mut expect_term = true;
        while i < tokens.len() {
            match &tokens[i] {
                Token::Op(op @ ('+' | '-')) if expect_term => {
                    if *op == '-' {
                        sign = -sign;
                    }
                    i += 1;
                }
                Token::Op(op @ ('+' | '-')) => {
                    sign = if *op == '-' { -1.0 } else { 1.0 };
                    expect_term = true;
                    i += 1;
                }
                Token::Num(_) | Token::Name(_) if expect_term => {
                    let (term, used) = parse_term(&tokens[i..]).map_err(|e| err(&e))?;
                    terms.push(Term {
                        coeff: sign * term.coeff,
                        source: term.source,
                    });
                    i += used;
                    sign = 1.0;
                    expect_term = false;
                }
                _ => return Err(err("unexpected token")),
            }
        }
        if expect_term {
            return Err(err("expression is empty or ends with an operator"));
        }
        Ok(Self {
            target: target.to_string(),
            terms,
        })
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(|t| t.source.as_deref())
    }

    pub fn evaluate(&self, params: &ModelParams) -> Result<f64> {
        self.terms.iter().try_fold(0.0, |acc, t| {
            Ok(acc
                + t.coeff
                    * match &t.source {
                        Some(name) => params.get(name)?,
                        None => 1.0,
                    })
        })
    }
}

impl fmt::Display for DerivedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.target)?;
        for (k, t) in self.terms.iter().enumerate() {
            let (sep, c) = match (k, t.coeff < 0.0) {
                (0, false) => (" ", t.coeff),
                (0, true) => (" -", -t.coeff),
                (_, false) => (" + ", t.coeff),
                (_, true) => (" - ", -t.coeff),
            };
            match &t.source {
                Some(name) if c == 1.0 => write!(f, "{sep}{name}")?,
                Some(name) => write!(f, "{sep}{c}*{name}")?,
                None => write!(f, "{sep}{c}")?,
            }
        }
        Ok(())
    }
}

impl TryFrom<String> for DerivedRule {
    type Error = FridgeError;
    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<DerivedRule> for String {
    fn from(r: DerivedRule) -> String {
        r.to_string()
    }
}

impl std::str::FromStr for DerivedRule {
    type Err = FridgeError;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Orders rules so every rule runs after the rules producing its sources.
/// A rule whose target feeds one of its own sources is a cycle.
pub fn order_rules(rules: &[DerivedRule]) -> Result<Vec<DerivedRule>> {
    let mut pending: Vec<&DerivedRule> = rules.iter().collect();
    let mut ordered = Vec::with_capacity(rules.len());
    while !pending.is_empty() {
        let ready = pending.iter().position(|r| {
            r.sources()
                .all(|s| !pending.iter().any(|other| overlaps(&written(&other.target), &read(s))))
        });
        match ready {
            Some(k) => ordered.push(pending.remove(k).clone()),
            None => return Err(FridgeError::CyclicRules(pending[0].target.clone())),
        }
    }
    Ok(ordered)
}

/// Applies already-ordered rules in place.
pub fn apply_rules(params: &mut ModelParams, ordered: &[DerivedRule]) -> Result<()> {
    for rule in ordered {
        let value = rule.evaluate(params)?;
        params.set(&rule.target, value)?;
    }
    Ok(())
}

const RATES: [&str; 5] = ["p1", "p2", "p3", "ph", "pr"];

/// Stored parameters changed by setting `name`.
fn written(name: &str) -> Vec<&str> {
    match name {
        "E3" => vec!["E2"],
        "E" => vec!["E1", "E2"],
        "p" => RATES.to_vec(),
        _ => vec![name],
    }
}

/// Stored parameters whose values determine `name`.
fn read(name: &str) -> Vec<&str> {
    match name {
        "E3" | "E" => vec!["E1", "E2"],
        "p" => RATES.to_vec(),
        _ => vec![name],
    }
}

fn overlaps(a: &[&str], b: &[&str]) -> bool {
    a.iter().any(|x| b.contains(x))
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Name(String),
    Op(char),
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn tokenize(s: &str) -> std::result::Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+-*/".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(
                text.parse().map_err(|_| format!("bad number `{text}`"))?,
            ));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Name(chars[start..i].iter().collect()));
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

/// `num`, `name`, `num * name`, `name * num` or `name / num`.
fn parse_term(tokens: &[Token]) -> std::result::Result<(Term, usize), String> {
    match tokens {
        [Token::Num(c), Token::Op('*'), Token::Name(n), ..]
        | [Token::Name(n), Token::Op('*'), Token::Num(c), ..] => Ok((
            Term {
                coeff: *c,
                source: Some(n.clone()),
            },
            3,
        )),
        [Token::Name(n), Token::Op('/'), Token::Num(c), ..] => {
            if *c == 0.0 {
                return Err("division by zero".into());
            }
            Ok((
                Term {
                    coeff: 1.0 / c,
                    source: Some(n.clone()),
                },
                3,
            ))
        }
        [Token::Num(c), ..] => Ok((
            Term {
                coeff: *c,
                source: None,
            },
            1,
        )),
        [Token::Name(n), ..] => Ok((
            Term {
                coeff: 1.0,
                source: Some(n.clone()),
            },
            1,
        )),
        _ => Err("expected a term".into()),
    }
}
