//! Text form of space expressions.
//!
//! ```text
//! expr    := term { "+" term }
//! term    := factor { ("x" | "xl") factor }
//! factor  := seg[ord] | half[ord] | L[ord] | rev(expr) | reorder(expr)
//!          | omit(expr, pred) | cut(expr, ord, ord) | sub(expr, spec)
//!          | derived(expr) | union(expr, ...) | (expr) | ord
//! pred    := isolated | limits | range[ord, ord] | range[ord, *]
//!          | lcat[ord] | {ord, ...} | not(pred) | and(pred, pred)
//!          | or(pred, pred)
//! spec    := keepmin | keepmax | isomax
//! ```
//!
//! A bare ordinal literal is a half-open segment; the literal is munched
//! greedily, so `w+1 x seg[w]` reads the whole `w+1` as one bound. The
//! carrier form produced by some internal constructions prints but does
//! not parse.

use crate::ordinal::Ordinal;
use crate::space::{PredicateSpec, SpaceExpr, SubsetSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    /// Raw contents of a [...] group.
    Bracket(String),
    /// Raw contents of a {...} group.
    Braces(String),
    Lit(String),
    LParen,
    RParen,
    Comma,
    Plus,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '[' | '{' => {
                let close = if c == '[' { ']' } else { '}' };
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j] as char != close {
                    j += 1;
                }
                if j == bytes.len() {
                    return Err(Error::Invalid(format!(
                        "unclosed '{c}' at offset {i}"
                    )));
                }
                let raw = src[start..j].to_string();
                toks.push((
                    i,
                    if c == '[' { Tok::Bracket(raw) } else { Tok::Braces(raw) },
                ));
                i = j + 1;
            }
            'w' | '0'..='9' => {
                let start = i;
                loop {
                    if i < bytes.len()
                        && matches!(bytes[i] as char, 'w' | '0'..='9' | '^' | '*' | '+')
                    {
                        i += 1;
                        continue;
                    }
                    // a parenthesized exponent group belongs to the literal
                    if i < bytes.len()
                        && bytes[i] as char == '('
                        && bytes[i - 1] as char == '^'
                    {
                        let open = i;
                        let mut depth = 0usize;
                        while i < bytes.len() {
                            match bytes[i] as char {
                                '(' => depth += 1,
                                ')' => {
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                                _ => {}
                            }
                            i += 1;
                        }
                        if i == bytes.len() {
                            return Err(Error::Invalid(format!(
                                "unclosed '(' at offset {open}"
                            )));
                        }
                        i += 1;
                        continue;
                    }
                    break;
                }
                // operators cannot end a literal; give them back
                while i > start && matches!(bytes[i - 1] as char, '^' | '*' | '+') {
                    i -= 1;
                }
                toks.push((start, Tok::Lit(src[start..i].to_string())));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                    i += 1;
                }
                toks.push((start, Tok::Ident(src[start..i].to_string())));
            }
            _ => {
                return Err(Error::Invalid(format!(
                    "unexpected character '{c}' at offset {i}"
                )))
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    lx: Lexer<'a>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Result<(usize, Tok)> {
        let t = self.lx.toks.get(self.pos).cloned().ok_or_else(|| {
            Error::Invalid(format!("unexpected end of input in '{}'", self.lx.src))
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<()> {
        let (off, t) = self.next()?;
        if t == *want {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "expected {what} at offset {off}, found {t:?}"
            )))
        }
    }

    fn ordinal(raw: &str, off: usize) -> Result<Ordinal> {
        raw.trim()
            .parse()
            .map_err(|e| Error::Invalid(format!("bad ordinal near offset {off}: {e}")))
    }

    fn expr(&mut self) -> Result<SpaceExpr> {
        let mut parts = vec![self.term()?];
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            SpaceExpr::OrderedSum(parts)
        })
    }

    fn term(&mut self) -> Result<SpaceExpr> {
        let mut e = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Ident(op)) if op == "x" => {
                    self.pos += 1;
                    e = SpaceExpr::product(e, self.factor()?);
                }
                Some(Tok::Ident(op)) if op == "xl" => {
                    self.pos += 1;
                    e = SpaceExpr::lex(e, self.factor()?);
                }
                _ => return Ok(e),
            }
        }
    }

    fn bracket_ordinal(&mut self, form: &str) -> Result<Ordinal> {
        let (off, t) = self.next()?;
        let Tok::Bracket(raw) = t else {
            return Err(Error::Invalid(format!(
                "{form} needs [bound] at offset {off}"
            )));
        };
        Self::ordinal(&raw, off)
    }

    fn lit_ordinal(&mut self, what: &str) -> Result<Ordinal> {
        let (off, t) = self.next()?;
        let Tok::Lit(raw) = t else {
            return Err(Error::Invalid(format!(
                "expected {what} at offset {off}, found {t:?}"
            )));
        };
        Self::ordinal(&raw, off)
    }

    fn factor(&mut self) -> Result<SpaceExpr> {
        let (off, t) = self.next()?;
        match t {
            Tok::Lit(raw) => Ok(SpaceExpr::HalfOpenSeg(Self::ordinal(&raw, off)?)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "seg" => Ok(SpaceExpr::ClosedSeg(self.bracket_ordinal("seg")?)),
                "half" => Ok(SpaceExpr::HalfOpenSeg(self.bracket_ordinal("half")?)),
                "L" => Ok(SpaceExpr::LGamma(self.bracket_ordinal("L")?)),
                "rev" => {
                    self.expect(&Tok::LParen, "'('")?;
                    let e = self.expr()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(SpaceExpr::rev(e))
                }
                "reorder" => {
                    self.expect(&Tok::LParen, "'('")?;
                    let e = self.expr()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(SpaceExpr::reorder(e))
                }
                "derived" => {
                    self.expect(&Tok::LParen, "'('")?;
                    let e = self.expr()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(SpaceExpr::Derived(Box::new(e)))
                }
                "omit" => {
                    self.expect(&Tok::LParen, "'('")?;
                    let e = self.expr()?;
                    self.expect(&Tok::Comma, "','")?;
                    let p = self.predicate()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(SpaceExpr::omit(e, p))
                }
                "cut" => {
                    self.expect(&Tok::LParen, "'('")?;
                    let e = self.expr()?;
                    self.expect(&Tok::Comma, "','")?;
                    let lo = self.lit_ordinal("a low bound")?;
                    self.expect(&Tok::Comma, "','")?;
                    let hi = self.lit_ordinal("a high bound")?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(SpaceExpr::interval(e, lo, hi))
                }
                "sub" => {
                    self.expect(&Tok::LParen, "'('")?;
                    let e = self.expr()?;
                    self.expect(&Tok::Comma, "','")?;
                    let (soff, st) = self.next()?;
                    let Tok::Ident(kw) = st else {
                        return Err(Error::Invalid(format!(
                            "expected a subset keyword at offset {soff}"
                        )));
                    };
                    let spec = match kw.as_str() {
                        "keepmin" => SubsetSpec::TopCopyKeepMin,
                        "keepmax" => SubsetSpec::TopCopyKeepMax,
                        "isomax" => SubsetSpec::IsolatedMajorOrMinorMax,
                        other => {
                            return Err(Error::Invalid(format!(
                                "unknown subset keyword '{other}' at offset {soff}"
                            )))
                        }
                    };
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(SpaceExpr::sub(e, spec))
                }
                "union" => {
                    self.expect(&Tok::LParen, "'('")?;
                    let mut parts = vec![self.expr()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        parts.push(self.expr()?);
                    }
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(SpaceExpr::Union(parts))
                }
                other => Err(Error::Invalid(format!(
                    "unknown form '{other}' at offset {off}"
                ))),
            },
            other => Err(Error::Invalid(format!(
                "expected a space at offset {off}, found {other:?}"
            ))),
        }
    }

    fn predicate(&mut self) -> Result<PredicateSpec> {
        let (off, t) = self.next()?;
        match t {
            Tok::Braces(raw) => {
                let mut pts = Vec::new();
                for part in raw.split(',') {
                    if part.trim().is_empty() {
                        continue;
                    }
                    pts.push(Self::ordinal(part, off)?);
                }
                Ok(PredicateSpec::ExplicitSet(pts))
            }
            Tok::Ident(name) => match name.as_str() {
                "isolated" => Ok(PredicateSpec::IsolatedInAmbient),
                "limits" => Ok(PredicateSpec::LimitInAmbient),
                "lcat" => Ok(PredicateSpec::LGammaCategory(self.bracket_ordinal("lcat")?)),
                "range" => {
                    let (boff, bt) = self.next()?;
                    let Tok::Bracket(raw) = bt else {
                        return Err(Error::Invalid(format!(
                            "range needs [lo, hi] at offset {boff}"
                        )));
                    };
                    let parts: Vec<&str> = raw.split(',').collect();
                    if parts.len() != 2 {
                        return Err(Error::Invalid(format!(
                            "range needs two bounds at offset {boff}"
                        )));
                    }
                    let lo = Self::ordinal(parts[0], boff)?;
                    let hi = match parts[1].trim() {
                        "*" => None,
                        h => Some(Self::ordinal(h, boff)?),
                    };
                    Ok(PredicateSpec::Range { lo, hi })
                }
                "not" => {
                    self.expect(&Tok::LParen, "'('")?;
                    let p = self.predicate()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(PredicateSpec::Not(Box::new(p)))
                }
                "and" | "or" => {
                    self.expect(&Tok::LParen, "'('")?;
                    let p = self.predicate()?;
                    self.expect(&Tok::Comma, "','")?;
                    let q = self.predicate()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(if name == "and" {
                        PredicateSpec::And(Box::new(p), Box::new(q))
                    } else {
                        PredicateSpec::Or(Box::new(p), Box::new(q))
                    })
                }
                other => Err(Error::Invalid(format!(
                    "unknown predicate '{other}' at offset {off}"
                ))),
            },
            other => Err(Error::Invalid(format!(
                "expected a predicate at offset {off}, found {other:?}"
            ))),
        }
    }
}

/// Parse the text form of a space expression.
pub fn parse_space(input: &str) -> Result<SpaceExpr> {
    let toks = lex(input)?;
    let mut p = Parser { lx: Lexer { src: input, toks }, pos: 0 };
    let e = p.expr()?;
    if let Some((off, t)) = p.lx.toks.get(p.pos) {
        return Err(Error::Invalid(format!(
            "trailing input at offset {off}: {t:?}"
        )));
    }
    Ok(e)
}
