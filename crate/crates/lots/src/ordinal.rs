//! Ordinals below epsilon_0 in Cantor normal form.
//!
//! An ordinal is stored as its CNF term list: pairs `(exponent, coefficient)`
//! with strictly decreasing exponents and coefficients >= 1. The empty list is
//! zero. Lexicographic comparison of term lists agrees with ordinal order
//! (leading terms dominate, a proper prefix is smaller), so the derived `Ord`
//! is the ordinal order.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrdinalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a successor")]
    NotASuccessor(Ordinal),
    #[error("{0} is not a limit")]
    NotALimit(Ordinal),
    #[error("no x with {base} + x = {target}")]
    NoLeftDifference { base: Ordinal, target: Ordinal },
    #[error("bad ordinal literal: {0}")]
    Literal(String),
}

/// Zero, successor, or limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Zero,
    Successor,
    Limit,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Ordinal(Vec<(Ordinal, u64)>);

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal(Vec::new())
    }

    pub fn one() -> Self {
        Ordinal::from_nat(1)
    }

    pub fn omega() -> Self {
        Ordinal(vec![(Ordinal::from_nat(1), 1)])
    }

    pub fn from_nat(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal(vec![(Ordinal::zero(), n)])
        }
    }

    /// omega^e
    pub fn pow_omega(e: &Ordinal) -> Self {
        Ordinal(vec![(e.clone(), 1)])
    }

    /// Trusts the caller: exponents strictly decreasing, coefficients >= 1.
    pub fn from_terms(terms: Vec<(Ordinal, u64)>) -> Self {
        let o = Ordinal(terms);
        debug_assert!(o.is_canonical());
        o
    }

    fn is_canonical(&self) -> bool {
        self.0.iter().all(|(_, c)| *c >= 1)
            && self.0.windows(2).all(|w| w[0].0 > w[1].0)
            && self.0.iter().all(|(e, _)| e.is_canonical())
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.0.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.0.first().map(|(e, _)| e)
    }

    pub fn leading_coefficient(&self) -> Option<u64> {
        self.0.first().map(|(_, c)| *c)
    }

    /// Exponent of the final CNF term; zero for zero. Positive x is a
    /// multiple of omega^d exactly when d <= last_exponent(x).
    pub fn last_exponent(&self) -> Ordinal {
        self.0.last().map_or_else(Ordinal::zero, |(e, _)| e.clone())
    }

    /// Terms with exponent >= d: the largest multiple of omega^d that is <= self.
    pub fn truncate_at(&self, d: &Ordinal) -> Ordinal {
        Ordinal(self.0.iter().take_while(|(e, _)| e >= d).cloned().collect())
    }

    pub fn classify(&self) -> Kind {
        match self.0.last() {
            None => Kind::Zero,
            Some((e, _)) if e.is_zero() => Kind::Successor,
            Some(_) => Kind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.classify() == Kind::Limit
    }

    pub fn is_successor(&self) -> bool {
        self.classify() == Kind::Successor
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    pub fn pred(&self) -> Result<Ordinal, OrdinalError> {
        let mut terms = self.0.clone();
        match terms.last_mut() {
            Some((e, c)) if e.is_zero() => {
                *c -= 1;
                if *c == 0 {
                    terms.pop();
                }
                Ok(Ordinal(terms))
            }
            _ => Err(OrdinalError::NotASuccessor(self.clone())),
        }
    }

    /// Ordinal addition. Terms of self below the lead exponent of rhs are
    /// absorbed.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some((lead, lead_c)) = rhs.0.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, u64)> = self
            .0
            .iter()
            .take_while(|(e, _)| e > lead)
            .cloned()
            .collect();
        let merged = match self.0.get(terms.len()) {
            Some((e, c)) if e == lead => *c,
            _ => 0,
        };
        terms.push((lead.clone(), merged.checked_add(*lead_c).expect("coefficient overflow")));
        terms.extend(rhs.0[1..].iter().cloned());
        Ordinal(terms)
    }

    /// Ordinal multiplication, self * rhs: the order type of rhs copies of
    /// self laid end to end.
    pub fn mul(&self, rhs: &Ordinal) -> Ordinal {
        if self.is_zero() || rhs.is_zero() {
            return Ordinal::zero();
        }
        let (lead_e, lead_c) = &self.0[0];
        let mut terms = Vec::with_capacity(rhs.0.len() + self.0.len());
        for (e, c) in &rhs.0 {
            if e.is_zero() {
                terms.push((lead_e.clone(), lead_c.checked_mul(*c).expect("coefficient overflow")));
                terms.extend(self.0[1..].iter().cloned());
            } else {
                terms.push((lead_e.add(e), *c));
            }
        }
        Ordinal(terms)
    }

    /// The n-th member of the canonical increasing sequence converging to a
    /// limit ordinal: the final term omega^b*c becomes omega^b*(c-1) followed
    /// by omega^p*n when b = p+1, or by omega^(b_n) when b is itself a limit.
    pub fn fundamental(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        let Some((beta, c)) = self.0.last().cloned() else {
            return Err(OrdinalError::NotALimit(self.clone()));
        };
        if beta.is_zero() {
            return Err(OrdinalError::NotALimit(self.clone()));
        }
        let mut terms = self.0[..self.0.len() - 1].to_vec();
        if c > 1 {
            terms.push((beta.clone(), c - 1));
        }
        let base = Ordinal(terms);
        let step = match beta.classify() {
            Kind::Successor => {
                let rho = beta.pred().expect("successor");
                Ordinal::pow_omega(&rho).mul(&Ordinal::from_nat(n))
            }
            Kind::Limit => Ordinal::pow_omega(&beta.fundamental(n)?),
            Kind::Zero => unreachable!(),
        };
        Ok(base.add(&step))
    }

    /// Size of the notation: zero for zero, otherwise the sum over terms of
    /// complexity(exponent) + coefficient.
    pub fn complexity(&self) -> u64 {
        self.0.iter().map(|(e, c)| e.complexity() + c).sum()
    }

    /// The unique x with self + x = target; errors when self > target.
    pub fn left_sub(&self, target: &Ordinal) -> Result<Ordinal, OrdinalError> {
        if self > target {
            return Err(OrdinalError::NoLeftDifference {
                base: self.clone(),
                target: target.clone(),
            });
        }
        let mut i = 0;
        while i < self.0.len() && i < target.0.len() && self.0[i] == target.0[i] {
            i += 1;
        }
        if i == self.0.len() {
            return Ok(Ordinal(target.0[i..].to_vec()));
        }
        // Terms differ at i and self <= target, so target's term is larger.
        let (es, cs) = &self.0[i];
        let (et, ct) = &target.0[i];
        if et > es {
            Ok(Ordinal(target.0[i..].to_vec()))
        } else {
            debug_assert!(et == es && ct > cs);
            let mut terms = vec![(et.clone(), ct - cs)];
            terms.extend(target.0[i + 1..].iter().cloned());
            Ok(Ordinal(terms))
        }
    }

    /// Division with remainder: self = divisor*q + r with r < divisor.
    pub fn div_rem(&self, divisor: &Ordinal) -> Result<(Ordinal, Ordinal), OrdinalError> {
        if divisor.is_zero() {
            return Err(OrdinalError::DivisionByZero);
        }
        let (de, dc) = &divisor.0[0];
        let mut q_terms: Vec<(Ordinal, u64)> = Vec::new();
        let mut r = self.clone();
        while r >= *divisor {
            let (re, rc) = r.0[0].clone();
            if re > *de {
                // divisor * (omega^h * rc) = omega^re * rc, the lead term of r.
                let h = de.left_sub(&re).expect("re > de");
                q_terms.push((h, rc));
                r = Ordinal(r.0[1..].to_vec());
            } else {
                debug_assert_eq!(re, *de);
                let mut k = rc / dc;
                if k * dc == rc {
                    let dt = Ordinal(divisor.0[1..].to_vec());
                    let rt = Ordinal(r.0[1..].to_vec());
                    if dt > rt {
                        k -= 1;
                    }
                }
                debug_assert!(k >= 1);
                let dk = divisor.mul(&Ordinal::from_nat(k));
                r = dk.left_sub(&r).expect("dk <= r");
                q_terms.push((Ordinal::zero(), k));
                break;
            }
        }
        Ok((Ordinal(q_terms), r))
    }

    /// All ordinals of complexity <= k, ascending. Grows roughly like 2^k;
    /// intended for the small depths used by space enumeration.
    pub fn enumerate_up_to(k: u64) -> Vec<Ordinal> {
        fn gen(budget: u64, cap: Option<&Ordinal>) -> Vec<Ordinal> {
            let mut out = vec![Ordinal::zero()];
            if budget == 0 {
                return out;
            }
            for e in gen(budget - 1, None) {
                if let Some(cap) = cap {
                    if e >= *cap {
                        continue;
                    }
                }
                let ce = e.complexity();
                if ce + 1 > budget {
                    continue;
                }
                for c in 1..=(budget - ce) {
                    for tail in gen(budget - ce - c, Some(&e)) {
                        let mut terms = vec![(e.clone(), c)];
                        terms.extend(tail.0);
                        out.push(Ordinal(terms));
                    }
                }
            }
            out
        }
        let mut all = gen(k, None);
        all.sort();
        all.dedup();
        all
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::from_nat(n)
    }
}

impl Add for &Ordinal {
    type Output = Ordinal;
    fn add(self, rhs: &Ordinal) -> Ordinal {
        Ordinal::add(self, rhs)
    }
}

impl Mul for &Ordinal {
    type Output = Ordinal;
    fn mul(self, rhs: &Ordinal) -> Ordinal {
        Ordinal::mul(self, rhs)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            write!(f, "w")?;
            if *e != Ordinal::one() {
                match e.as_nat() {
                    Some(n) => write!(f, "^{n}")?,
                    None if *e == Ordinal::omega() => write!(f, "^w")?,
                    None => write!(f, "^({e})")?,
                }
            }
            if *c > 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Literal grammar: sum of terms, term = "w" ("^" exponent)? ("*" nat)? | nat,
/// exponent = nat | "w" | "(" sum ")". Sums are evaluated with ordinal
/// addition, so non-canonical spellings like "1+w" normalize.
impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Lit { src: s.as_bytes(), pos: 0 };
        let o = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(o)
    }
}

struct Lit<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Lit<'_> {
    fn err(&self, msg: &str) -> OrdinalError {
        OrdinalError::Literal(format!("{msg} at byte {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn sum(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            acc = acc.add(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'w') => {
                self.pos += 1;
                let e = if self.eat(b'^') { self.exponent()? } else { Ordinal::one() };
                let c = if self.eat(b'*') { self.nat()? } else { 1 };
                if c == 0 {
                    return Err(self.err("zero coefficient"));
                }
                Ok(Ordinal::pow_omega(&e).mul(&Ordinal::from_nat(c)))
            }
            Some(b) if b.is_ascii_digit() => Ok(Ordinal::from_nat(self.nat()?)),
            _ => Err(self.err("expected a term")),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, OrdinalError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() => Ok(Ordinal::from_nat(self.nat()?)),
            _ => Err(self.err("expected an exponent")),
        }
    }
}
