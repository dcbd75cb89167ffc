//! Exact multivariable polynomial calculus: multidegree truncation,
//! homogeneous-part extraction by inclusion-exclusion over coordinate
//! decrements, and the total-degree tower comparison identity.
//!
//! Coefficients are exact rationals; finite limits become signed sums at
//! this level, so every identity is an equality of polynomials.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poset::MultiIndex;
use crate::ring::{Rat, Ring};

/// A sparse polynomial in `m` variables with rational coefficients; zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPolynomial {
    m: usize,
    terms: BTreeMap<Vec<i64>, Rat>,
}

impl MultiPolynomial {
    pub fn zero(m: usize) -> Self {
        MultiPolynomial {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn new(m: usize, terms: BTreeMap<Vec<i64>, Rat>) -> Result<Self> {
        for expo in terms.keys() {
            if expo.len() != m {
                return Err(Error::LengthMismatch(expo.len(), m));
            }
            if let Some(&bad) = expo.iter().find(|&&e| e < 0) {
                return Err(Error::NegativeEntry(bad));
            }
        }
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(MultiPolynomial { m, terms })
    }

    pub fn variables(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, expo: &[i64]) -> Rat {
        self.terms.get(expo).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &MultiPolynomial) -> Result<MultiPolynomial> {
        if self.m != other.m {
            return Err(Error::LengthMismatch(self.m, other.m));
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c.clone();
        }
        MultiPolynomial::new(self.m, terms)
    }

    pub fn scale(&self, c: &Rat) -> MultiPolynomial {
        if c.is_zero() {
            return MultiPolynomial::zero(self.m);
        }
        MultiPolynomial {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &MultiPolynomial) -> Result<MultiPolynomial> {
        let minus_one: Rat = -<Rat as num_traits::One>::one();
        self.add(&other.scale(&minus_one))
    }

    /// The componentwise maximum of the exponents, or all `-1` for the
    /// zero polynomial.
    pub fn degree(&self) -> Vec<i64> {
        let mut deg = vec![-1i64; self.m];
        for expo in self.terms.keys() {
            for (d, &e) in deg.iter_mut().zip(expo) {
                *d = (*d).max(e);
            }
        }
        deg
    }

    /// Keeps the terms with exponent tuple componentwise at most `jvec`.
    /// Any negative bound kills every term.
    pub fn truncate(&self, jvec: &MultiIndex) -> Result<MultiPolynomial> {
        if jvec.len() != self.m {
            return Err(Error::LengthMismatch(jvec.len(), self.m));
        }
        let terms = self
            .terms
            .iter()
            .filter(|(expo, _)| expo.iter().zip(jvec.entries()).all(|(&e, &j)| e <= j))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        MultiPolynomial::new(self.m, terms)
    }

    /// Keeps the terms of total degree at most `k`.
    pub fn truncate_total(&self, k: i64) -> MultiPolynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(expo, _)| expo.iter().sum::<i64>() <= k)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        MultiPolynomial { m: self.m, terms }
    }

    /// The homogeneous multidegree-`jvec` part, extracted by
    /// inclusion-exclusion over the coordinate decrements: the signed sum
    /// over subsets `R` of the truncations at `jvec` decremented on `R`.
    /// Equals the single term with exponent `jvec`.
    pub fn homogeneous_part(&self, jvec: &MultiIndex) -> Result<MultiPolynomial> {
        if jvec.len() != self.m {
            return Err(Error::LengthMismatch(jvec.len(), self.m));
        }
        jvec.require_nonnegative()?;
        let mut acc = MultiPolynomial::zero(self.m);
        for mask in 0u64..(1 << self.m) {
            let r: BTreeSet<usize> = (0..self.m).filter(|i| (mask >> i) & 1 == 1).collect();
            let jr = jvec.decrement_on(&r)?;
            let part = self.truncate(&jr)?;
            if r.len().is_multiple_of(2) {
                acc = acc.add(&part)?;
            } else {
                acc = acc.sub(&part)?;
            }
        }
        Ok(acc)
    }

    /// Direct single-term filter; the independent oracle for
    /// [`Self::homogeneous_part`].
    pub fn monomial_at(&self, jvec: &MultiIndex) -> MultiPolynomial {
        let mut terms = BTreeMap::new();
        if let Some(c) = self.terms.get(jvec.entries()) {
            terms.insert(jvec.entries().to_vec(), c.clone());
        }
        MultiPolynomial { m: self.m, terms }
    }

    /// Parses the polynomial grammar: integer or rational coefficients,
    /// `*`, `^`, variables `x1..xm`, and `+`/`-`.
    pub fn parse(m: usize, input: &str) -> Result<MultiPolynomial> {
        Parser {
            m,
            bytes: input.as_bytes(),
            pos: 0,
        }
        .parse()
    }

    /// Canonical rendering: terms by descending total degree, then
    /// reverse-lexicographic exponents.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&Vec<i64>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let ta: i64 = a.iter().sum();
            let tb: i64 = b.iter().sum();
            tb.cmp(&ta).then_with(|| b.cmp(a))
        });
        let mut out = String::new();
        for (pos, expo) in keys.iter().enumerate() {
            let coeff = &self.terms[*expo];
            let negative = coeff < &Rat::zero();
            let abs = if negative {
                -coeff.clone()
            } else {
                coeff.clone()
            };
            if pos == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            let is_constant = expo.iter().all(|&e| e == 0);
            if !num_traits::One::is_one(&abs) || is_constant {
                factors.push(abs.render());
            }
            for (i, &e) in expo.iter().enumerate() {
                if e == 1 {
                    factors.push(format!("x{}", i + 1));
                } else if e > 1 {
                    factors.push(format!("x{}^{}", i + 1, e));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl std::fmt::Display for MultiPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render())
    }
}

struct Parser<'a> {
    m: usize,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::PolySyntax(self.pos, msg.to_string())
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<Rat> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a number"));
        }
        let numer = std::str::from_utf8(&self.bytes[start..self.pos]).expect("digits");
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let dstart = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == dstart {
                return Err(self.error("expected a denominator"));
            }
            let denom = std::str::from_utf8(&self.bytes[dstart..self.pos]).expect("digits");
            if denom.chars().all(|c| c == '0') {
                return Err(self.error("zero denominator"));
            }
            return Rat::parse(&format!("{numer}/{denom}"));
        }
        Rat::parse(numer)
    }

    fn factor(&mut self) -> Result<(Rat, Vec<i64>)> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(self.error("expected a variable index after `x`"));
                }
                let idx: usize = std::str::from_utf8(&self.bytes[start..self.pos])
                    .expect("digits")
                    .parse()
                    .map_err(|_| self.error("variable index out of range"))?;
                if idx == 0 || idx > self.m {
                    return Err(Error::VariableRange(idx, self.m));
                }
                let mut exp = 1i64;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let estart = self.pos;
                    while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if self.pos == estart {
                        return Err(self.error("expected an exponent after `^`"));
                    }
                    exp = std::str::from_utf8(&self.bytes[estart..self.pos])
                        .expect("digits")
                        .parse()
                        .map_err(|_| self.error("exponent out of range"))?;
                }
                let mut expo = vec![0i64; self.m];
                expo[idx - 1] = exp;
                Ok((num_traits::One::one(), expo))
            }
            Some(c) if c.is_ascii_digit() => Ok((self.number()?, vec![0; self.m])),
            _ => Err(self.error("expected a coefficient or a variable")),
        }
    }

    fn term(&mut self) -> Result<(Rat, Vec<i64>)> {
        let (mut coeff, mut expo) = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let (c, e) = self.factor()?;
            coeff *= c;
            for (a, b) in expo.iter_mut().zip(e) {
                *a += b;
            }
        }
        Ok((coeff, expo))
    }

    fn parse(mut self) -> Result<MultiPolynomial> {
        let mut terms: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
        let mut sign = Rat::parse("1")?;
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
            }
            Some(b'-') => {
                sign = -sign;
                self.pos += 1;
            }
            _ => {}
        }
        loop {
            let (coeff, expo) = self.term()?;
            let entry = terms.entry(expo).or_insert_with(Rat::zero);
            *entry += sign.clone() * coeff;
            match self.peek() {
                Some(b'+') => {
                    sign = Rat::parse("1")?;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = Rat::parse("-1")?;
                    self.pos += 1;
                }
                None => break,
                Some(c) => return Err(self.error(&format!("unexpected character `{}`", c as char))),
            }
        }
        MultiPolynomial::new(self.m, terms)
    }
}

/// Truncating at `kvec` then `jvec` (either order) equals truncating at
/// the componentwise minimum.
pub fn verify_iterated_truncation(
    p: &MultiPolynomial,
    jvec: &MultiIndex,
    kvec: &MultiIndex,
) -> Result<bool> {
    let meet = jvec.meet(kvec)?;
    let a = p.truncate(kvec)?.truncate(jvec)?;
    let b = p.truncate(jvec)?.truncate(kvec)?;
    let c = p.truncate(&meet)?;
    Ok(a == c && b == c)
}

/// The total-degree truncation at `k` equals the inclusion-exclusion over
/// nonempty sets of multidegrees of total degree exactly `k`, truncating
/// at their componentwise minima. Mirrors covering the total-degree
/// downset by the componentwise ones.
pub fn verify_twotowers_identity(p: &MultiPolynomial, k: i64) -> Result<bool> {
    if k < 0 {
        return Err(Error::NegativeEntry(k));
    }
    let m = p.variables();
    let level = level_multidegrees(m, k);
    let mut rhs = MultiPolynomial::zero(m);
    // subsets of the level set; the level is small for the suite sizes
    if level.len() > 20 {
        return Err(Error::Input(format!(
            "level set of size {} too large for inclusion-exclusion",
            level.len()
        )));
    }
    for mask in 1u64..(1 << level.len()) {
        let mut min: Option<MultiIndex> = None;
        for (i, j) in level.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                min = Some(match min {
                    None => j.clone(),
                    Some(prev) => prev.meet(j)?,
                });
            }
        }
        let part = p.truncate(&min.expect("nonempty"))?;
        if mask.count_ones() % 2 == 1 {
            rhs = rhs.add(&part)?;
        } else {
            rhs = rhs.sub(&part)?;
        }
    }
    Ok(p.truncate_total(k) == rhs)
}

fn level_multidegrees(m: usize, k: i64) -> Vec<MultiIndex> {
    fn rec(m: usize, k: i64, prefix: &mut Vec<i64>, out: &mut Vec<MultiIndex>) {
        if m == 1 {
            prefix.push(k);
            out.push(MultiIndex::new(prefix.clone()).expect("valid"));
            prefix.pop();
            return;
        }
        for v in 0..=k {
            prefix.push(v);
            rec(m - 1, k - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn mi(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn parse_and_render() {
        let p = MultiPolynomial::parse(2, "7*x1*x2+3*x1+5*x2+2").unwrap();
        assert_eq!(p.coefficient(&[1, 1]), rat(7));
        assert_eq!(p.coefficient(&[1, 0]), rat(3));
        assert_eq!(p.coefficient(&[0, 1]), rat(5));
        assert_eq!(p.coefficient(&[0, 0]), rat(2));
        assert_eq!(p.render(), "7*x1*x2 + 3*x1 + 5*x2 + 2");
        let q = MultiPolynomial::parse(2, "-1/2*x1^2 + x2 - 3").unwrap();
        assert_eq!(q.coefficient(&[2, 0]), -rat(1) / rat(2));
        assert_eq!(q.render(), "-1/2*x1^2 + x2 - 3");
        assert!(MultiPolynomial::parse(2, "x3").is_err());
        assert!(MultiPolynomial::parse(2, "4**x1").is_err());
        assert!(MultiPolynomial::parse(1, "x1 + ").is_err());
        // cancellation normalizes away
        let z = MultiPolynomial::parse(1, "x1 - x1").unwrap();
        assert!(z.is_zero());
        assert_eq!(z.render(), "0");
    }

    #[test]
    fn truncation_examples() {
        let p = MultiPolynomial::parse(2, "7*x1^2*x2+3*x1+2").unwrap();
        let t = p.truncate(&mi(&[1, 1])).unwrap();
        assert_eq!(t, MultiPolynomial::parse(2, "3*x1+2").unwrap());
        // truncating above the degree changes nothing
        assert_eq!(p.truncate(&mi(&[5, 5])).unwrap(), p);
        // truncating at zero keeps the constant term
        assert_eq!(
            p.truncate(&mi(&[0, 0])).unwrap(),
            MultiPolynomial::parse(2, "2").unwrap()
        );
        // a negative bound kills everything
        assert!(p.truncate(&mi(&[-1, 1])).unwrap().is_zero());
    }

    #[test]
    fn homogeneous_part_bidegree_example() {
        let p = MultiPolynomial::parse(2, "7*x1*x2+3*x1+5*x2+2").unwrap();
        let h = p.homogeneous_part(&mi(&[1, 1])).unwrap();
        assert_eq!(h, MultiPolynomial::parse(2, "7*x1*x2").unwrap());
        assert_eq!(h, p.monomial_at(&mi(&[1, 1])));
        // missing top coefficient extracts zero
        let q = MultiPolynomial::parse(2, "3*x1+5*x2+2").unwrap();
        assert!(q.homogeneous_part(&mi(&[1, 1])).unwrap().is_zero());
    }

    #[test]
    fn homogeneous_parts_reassemble() {
        let p = MultiPolynomial::parse(2, "x1^2*x2 + 4*x1*x2 - 2*x2 + 9").unwrap();
        let deg = p.degree();
        let mut sum = MultiPolynomial::zero(2);
        for a in 0..=deg[0] {
            for b in 0..=deg[1] {
                sum = sum.add(&p.homogeneous_part(&mi(&[a, b])).unwrap()).unwrap();
            }
        }
        assert_eq!(sum, p);
    }

    #[test]
    fn iterated_truncation() {
        let p = MultiPolynomial::parse(2, "x1^2*x2 + x1*x2^2").unwrap();
        assert!(verify_iterated_truncation(&p, &mi(&[2, 1]), &mi(&[1, 2])).unwrap());
        let t = p
            .truncate(&mi(&[2, 1]))
            .unwrap()
            .truncate(&mi(&[1, 2]))
            .unwrap();
        assert_eq!(t, p.truncate(&mi(&[1, 1])).unwrap());
        assert!(verify_iterated_truncation(&p, &mi(&[3, 3]), &mi(&[3, 3])).unwrap());
    }

    #[test]
    fn twotowers_identity_examples() {
        // one variable: a single truncation
        let p = MultiPolynomial::parse(1, "x1^3 + 2*x1 + 1").unwrap();
        assert!(verify_twotowers_identity(&p, 2).unwrap());
        // the worked bidegree example at k = 1
        let p = MultiPolynomial::parse(2, "7*x1*x2+3*x1+5*x2+2").unwrap();
        assert!(verify_twotowers_identity(&p, 1).unwrap());
        let lhs = p.truncate_total(1);
        assert_eq!(lhs, MultiPolynomial::parse(2, "3*x1+5*x2+2").unwrap());
    }

    #[test]
    fn truncation_idempotent_and_monotone() {
        let p = MultiPolynomial::parse(3, "x1*x2*x3 + x1^2 + x2 + 5").unwrap();
        let j = mi(&[1, 1, 0]);
        let once = p.truncate(&j).unwrap();
        assert_eq!(once.truncate(&j).unwrap(), once);
    }
}
