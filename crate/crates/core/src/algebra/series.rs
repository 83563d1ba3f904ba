use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::nil::{Levels, NilMonomial};
use crate::error::{domain, Error, Result};

const MAX_SERIES_ORDER: usize = 1024;

/// Truncation ideal: monomials beyond either bound are discarded.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cap {
    /// Componentwise upper bound on exponents.
    pub exponent: Option<Vec<i64>>,
    /// Upper bound on the total degree.
    pub degree: Option<i64>,
}

impl Cap {
    pub fn none() -> Self {
        Cap::default()
    }

    pub fn degree(d: i64) -> Self {
        Cap {
            exponent: None,
            degree: Some(d),
        }
    }

    pub fn exponent(e: Vec<i64>) -> Self {
        Cap {
            exponent: Some(e),
            degree: None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.exponent.is_some() || self.degree.is_some()
    }

    pub fn admits(&self, exp: &[i64]) -> bool {
        if let Some(d) = self.degree {
            if exp.iter().sum::<i64>() > d {
                return false;
            }
        }
        if let Some(e) = &self.exponent {
            if exp.iter().zip(e).any(|(a, b)| a > b) {
                return false;
            }
        }
        true
    }

    /// Intersection of the two truncation ideals' complements.
    pub fn meet(&self, other: &Cap) -> Cap {
        let degree = match (self.degree, other.degree) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let exponent = match (&self.exponent, &other.exponent) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| *x.min(y)).collect()),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        Cap { exponent, degree }
    }
}

/// A monomial `u_I x^e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub exp: Box<[i64]>,
    pub nil: NilMonomial,
}

/// Finite sum of monomials `c u_I x^e` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    n: usize,
    cap: Cap,
    terms: BTreeMap<Term, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl TruncSeries {
    pub fn zero(n: usize, cap: Cap) -> Self {
        TruncSeries {
            n,
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, cap: Cap) -> Self {
        let mut s = TruncSeries::zero(n, cap);
        s.add_term(vec![0; n].into(), NilMonomial::EMPTY, BigRational::one());
        s
    }

    pub fn monomial(n: usize, cap: Cap, exp: &[i64], nil: NilMonomial, coef: BigRational) -> Self {
        let mut s = TruncSeries::zero(n, cap);
        s.add_term(exp.into(), nil, coef);
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> &Cap {
        &self.cap
    }

    pub fn with_cap(mut self, cap: Cap) -> Self {
        self.terms.retain(|t, _| cap.admits(&t.exp));
        self.cap = cap;
        self
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[i64], nil: NilMonomial) -> BigRational {
        let key = Term {
            exp: exp.into(),
            nil,
        };
        self.terms
            .get(&key)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&vec![0; self.n], NilMonomial::EMPTY)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    /// Adds `coef u_I x^e`, dropping it when truncated.
    pub fn add_term(&mut self, exp: Box<[i64]>, nil: NilMonomial, coef: BigRational) {
        if coef.is_zero() || !self.cap.admits(&exp) {
            return;
        }
        let key = Term { exp, nil };
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c += coef;
                if c.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coef);
            }
        }
    }

    fn check_same(&self, other: &TruncSeries) -> Result<()> {
        if self.n != other.n {
            return domain(format!("series over {} and {} variables", self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.cap = self.cap.meet(&other.cap);
        out.terms.retain(|t, _| out.cap.admits(&t.exp));
        for (t, c) in &other.terms {
            out.add_term(t.exp.clone(), t.nil, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, k: &BigRational) -> TruncSeries {
        let mut out = TruncSeries::zero(self.n, self.cap.clone());
        if k.is_zero() {
            return out;
        }
        for (t, c) in &self.terms {
            out.terms.insert(t.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_same(other)?;
        let mut out = TruncSeries::zero(self.n, self.cap.meet(&other.cap));
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                let Some(nil) = ta.nil.mul(tb.nil) else {
                    continue;
                };
                let exp: Box<[i64]> = ta
                    .exp
                    .iter()
                    .zip(tb.exp.iter())
                    .map(|(a, b)| a + b)
                    .collect();
                out.add_term(exp, nil, ca * cb);
            }
        }
        Ok(out)
    }

    /// `self` without its constant term.
    pub fn augmentation(&self) -> TruncSeries {
        let mut out = self.clone();
        out.terms.remove(&Term {
            exp: vec![0; self.n].into(),
            nil: NilMonomial::EMPTY,
        });
        out
    }

    /// Power series `sum_j a_j s^j` in a series `s` without constant term.
    fn power_series(&self, coeff: impl Fn(usize) -> BigRational) -> Result<TruncSeries> {
        if !self.constant_term().is_zero() {
            return domain("power series substitution needs a zero constant term");
        }
        let truncating = |t: &Term| {
            !t.nil.is_empty()
                || (self.cap.degree.is_some() && t.exp.iter().sum::<i64>() > 0)
                || (self.cap.exponent.is_some()
                    && t.exp.iter().all(|&e| e >= 0)
                    && t.exp.iter().any(|&e| e > 0))
        };
        if !self.terms.keys().all(truncating) {
            return domain("series is not nilpotent under its truncation");
        }
        let mut out = TruncSeries::one(self.n, self.cap.clone()).scale(&coeff(0));
        let mut power = TruncSeries::one(self.n, self.cap.clone());
        for j in 1..=MAX_SERIES_ORDER {
            power = power.mul(self)?;
            if power.is_empty() {
                return Ok(out);
            }
            let a = coeff(j);
            if !a.is_zero() {
                out = out.add(&power.scale(&a))?;
            }
        }
        Err(Error::Domain(
            "series is not nilpotent under its truncation".into(),
        ))
    }

    /// `exp(s)` for `s` without constant term.
    pub fn exp(&self) -> Result<TruncSeries> {
        let mut fact = BigInt::one();
        let mut facts = vec![BigInt::one()];
        for j in 1..=MAX_SERIES_ORDER {
            fact *= j;
            facts.push(fact.clone());
            if j > 200 {
                break;
            }
        }
        self.power_series(|j| {
            let f = facts
                .get(j)
                .cloned()
                .unwrap_or_else(|| (1..=j).map(BigInt::from).product());
            BigRational::new(BigInt::one(), f)
        })
    }

    /// `log(s)` for `s` with constant term 1.
    pub fn log(&self) -> Result<TruncSeries> {
        if !self.constant_term().is_one() {
            return domain("log needs constant term 1");
        }
        self.augmentation().power_series(|j| {
            if j == 0 {
                BigRational::zero()
            } else {
                let sign = if j % 2 == 1 { 1 } else { -1 };
                BigRational::new(BigInt::from(sign), BigInt::from(j))
            }
        })
    }

    /// `(1 + y)^alpha` for `self = 1 + y`, `y` nilpotent, `alpha` rational.
    pub fn pow_rational(&self, alpha: &BigRational) -> Result<TruncSeries> {
        if !self.constant_term().is_one() {
            return domain("power needs constant term 1");
        }
        let alpha = alpha.clone();
        self.augmentation()
            .power_series(move |j| binomial(&alpha, j))
    }

    pub fn pow(&self, k: i64) -> Result<TruncSeries> {
        if k >= 0 && !self.constant_term().is_one() {
            let mut out = TruncSeries::one(self.n, self.cap.clone());
            for _ in 0..k {
                out = out.mul(self)?;
            }
            return Ok(out);
        }
        self.pow_rational(&rat(k))
    }

    pub fn inverse(&self) -> Result<TruncSeries> {
        self.pow_rational(&rat(-1))
    }

    /// Exponents shifted by `shift` (multiplication by a Laurent monomial).
    pub fn shift(&self, shift: &[i64]) -> TruncSeries {
        let mut out = TruncSeries::zero(self.n, self.cap.clone());
        for (t, c) in &self.terms {
            let exp: Box<[i64]> = t.exp.iter().zip(shift).map(|(a, b)| a + b).collect();
            out.add_term(exp, t.nil, c.clone());
        }
        out
    }

    /// Sorted text form: one `exponent <TAB> index set <TAB> coefficient` line per term.
    pub fn to_text(&self, levels: Option<&Levels>) -> String {
        let mut out = String::new();
        for (t, c) in &self.terms {
            let exps: Vec<String> = t.exp.iter().map(|e| e.to_string()).collect();
            let nil = match levels {
                Some(l) => l.display(t.nil).to_string(),
                None => format!("#{:x}", t.nil.0),
            };
            let coef = if c.denom().is_one() {
                c.numer().to_string()
            } else {
                format!("{}/{}", c.numer(), c.denom())
            };
            let _ = writeln!(out, "[{}]\t{}\t{}", exps.join(","), nil, coef);
        }
        out
    }

    /// Parses [`TruncSeries::to_text`] output written without a level layout.
    pub fn from_text(n: usize, cap: Cap, text: &str) -> Result<TruncSeries> {
        let bad = |line: &str| Error::Format(format!("bad series line {line:?}"));
        let mut out = TruncSeries::zero(n, cap);
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split('\t');
            let (Some(e), Some(u), Some(c)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad(line));
            };
            let inner = e.trim().trim_start_matches('[').trim_end_matches(']');
            let exp: Vec<i64> = if inner.is_empty() {
                vec![]
            } else {
                inner
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|_| bad(line)))
                    .collect::<Result<_>>()?
            };
            if exp.len() != n {
                return Err(bad(line));
            }
            let bits = u128::from_str_radix(u.trim().trim_start_matches('#'), 16)
                .map_err(|_| bad(line))?;
            let coef: BigRational = c.trim().parse().map_err(|_| bad(line))?;
            out.add_term(exp.into(), NilMonomial(bits), coef);
        }
        Ok(out)
    }

    /// Largest absolute numerator, for diagnostics.
    pub fn max_abs_coefficient(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

/// Generalized binomial coefficient `alpha choose j`.
pub fn binomial(alpha: &BigRational, j: usize) -> BigRational {
    let mut out = BigRational::one();
    for i in 0..j {
        out = out * (alpha - rat(i as i64)) / rat(i as i64 + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, cap: Cap, exp: &[i64], c: i64) -> TruncSeries {
        TruncSeries::monomial(n, cap, exp, NilMonomial::EMPTY, rat(c))
    }

    #[test]
    fn truncation_drops_terms() {
        let cap = Cap::degree(2);
        let s = x(2, cap.clone(), &[1, 0], 1)
            .add(&x(2, cap.clone(), &[1, 1], 1))
            .unwrap();
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq.len(), 1);
        assert_eq!(sq.coefficient(&[2, 0], NilMonomial::EMPTY), rat(1));
    }

    #[test]
    fn exp_log_roundtrip_naive() {
        let cap = Cap::degree(6);
        let one = TruncSeries::one(2, cap.clone());
        let s = one
            .add(&x(2, cap.clone(), &[1, 1], 3))
            .unwrap()
            .add(&x(2, cap.clone(), &[2, 1], -2))
            .unwrap();
        let back = s.log().unwrap().exp().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn nilpotent_exp_is_finite() {
        let a = TruncSeries::monomial(1, Cap::none(), &[1], NilMonomial(1), rat(2));
        let b = TruncSeries::monomial(1, Cap::none(), &[1], NilMonomial(2), rat(5));
        let s = a.add(&b).unwrap();
        let e = s.exp().unwrap();
        // 1 + a + b + ab
        assert_eq!(e.len(), 4);
        assert_eq!(e.coefficient(&[2], NilMonomial(3)), rat(10));
        assert_eq!(e.log().unwrap(), s);
    }

    #[test]
    fn inverse_of_geometric() {
        // (1 - xy)^(-2) = sum (n+1)(xy)^n
        let cap = Cap::degree(10);
        let s = TruncSeries::one(2, cap.clone())
            .sub(&x(2, cap.clone(), &[1, 1], 1))
            .unwrap();
        let p = s.pow(-2).unwrap();
        for n in 0..=5 {
            assert_eq!(p.coefficient(&[n, n], NilMonomial::EMPTY), rat(n + 1));
        }
    }

    #[test]
    fn unbounded_series_is_rejected() {
        let s = x(1, Cap::none(), &[1], 1);
        assert!(s.exp().is_err());
    }

    #[test]
    fn text_roundtrip() {
        let cap = Cap::degree(4);
        let s = TruncSeries::monomial(
            2,
            cap.clone(),
            &[1, 2],
            NilMonomial(5),
            BigRational::new(3.into(), 4.into()),
        )
        .add(&x(2, cap.clone(), &[0, 0], -1))
        .unwrap();
        let text = s.to_text(None);
        assert_eq!(TruncSeries::from_text(2, cap, &text).unwrap(), s);
        assert!(text.contains("3/4"));
    }
}
