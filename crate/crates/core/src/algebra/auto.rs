use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::nil::{Levels, NilMonomial};
use super::series::{binomial, rat, Cap, TruncSeries};
use crate::error::{domain, Error, Result};
use crate::quiver::{DimVec, Quiver, Slope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Naive,
    Nilpotent,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Mode::Naive),
            "nilpotent" => Ok(Mode::Nilpotent),
            _ => Err(Error::Format(format!(
                "mode must be naive or nilpotent, got {s:?}"
            ))),
        }
    }
}

/// `x_p -> x_p (1 + c u_I x^{r d})^{power <d, p>}`.
///
/// `power` is `1` except for inverses of naive operators, which cannot be
/// written by changing `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElemAuto {
    pub c: BigRational,
    pub nil: NilMonomial,
    pub r: u32,
    pub d: DimVec,
    pub mode: Mode,
    pub power: i32,
}

impl ElemAuto {
    /// The Kontsevich–Soibelman operator `T_d` of naive mode.
    pub fn naive(d: DimVec) -> Result<Self> {
        ElemAuto::new(BigRational::one(), NilMonomial::EMPTY, 1, d, Mode::Naive)
    }

    pub fn nilpotent(c: BigRational, nil: NilMonomial, r: u32, d: DimVec) -> Result<Self> {
        ElemAuto::new(c, nil, r, d, Mode::Nilpotent)
    }

    pub fn new(c: BigRational, nil: NilMonomial, r: u32, d: DimVec, mode: Mode) -> Result<Self> {
        if c.is_zero() {
            return domain("operator coefficient must be nonzero");
        }
        if r == 0 {
            return domain("operator multiplicity r must be positive");
        }
        if !d.is_nonnegative() || d.is_zero() || !d.is_primitive() {
            return domain(format!(
                "operator direction {d} must be primitive and non-negative"
            ));
        }
        if mode == Mode::Nilpotent && nil.is_empty() {
            return domain("nilpotent-mode operator needs a nonempty index set");
        }
        Ok(ElemAuto {
            c,
            nil,
            r,
            d,
            mode,
            power: 1,
        })
    }

    /// The operator whose exponent is `e = r d` with `r = ind(e)`.
    pub fn from_exponent(c: BigRational, nil: NilMonomial, e: &DimVec, mode: Mode) -> Result<Self> {
        let (d, r) = e.primitive_part()?;
        ElemAuto::new(c, nil, r as u32, d, mode)
    }

    pub fn exponent(&self) -> DimVec {
        self.d.scale(self.r as i64)
    }

    pub fn slope(&self, q: &Quiver) -> Result<Slope> {
        q.slope(&self.d)
    }

    pub fn inverse(&self) -> ElemAuto {
        let mut out = self.clone();
        match self.mode {
            Mode::Nilpotent => out.c = -self.c.clone(),
            Mode::Naive => out.power = -self.power,
        }
        out
    }

    /// `(1 + c u_I x^{rd})^{power * n}` truncated by `cap`.
    pub fn factor(&self, n: i64, cap: &Cap) -> Result<TruncSeries> {
        let len = self.d.len();
        let mut out = TruncSeries::one(len, cap.clone());
        let total = n * self.power as i64;
        if total == 0 {
            return Ok(out);
        }
        if self.nil.is_empty() && !cap.is_finite() {
            return domain("naive-mode substitution needs a degree or exponent cap");
        }
        let e = self.exponent();
        let alpha = rat(total);
        let mut cpow = BigRational::one();
        for j in 1usize.. {
            if !self.nil.is_empty() && j > 1 {
                break;
            }
            let b = binomial(&alpha, j);
            if total > 0 && j as i64 > total {
                break;
            }
            cpow *= &self.c;
            let exp: Vec<i64> = e.entries().iter().map(|x| x * j as i64).collect();
            if !cap.admits(&exp) {
                break;
            }
            out.add_term(exp.into(), self.nil, b * &cpow);
        }
        Ok(out)
    }

    /// Weight function `(c/r) u_I x^{rd}`.
    pub fn weight_function(&self) -> WeightFunction {
        WeightFunction {
            coeff: &self.c / rat(self.r as i64) * rat(self.power as i64),
            nil: self.nil,
            exponent: self.exponent(),
        }
    }

    /// Whether the exponent equals the row counts of the index set.
    pub fn is_row_consistent(&self, levels: &Levels) -> bool {
        self.mode == Mode::Nilpotent && levels.row_counts(self.nil) == self.exponent().entries()
    }
}

impl fmt::Display for ElemAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T[{}", self.exponent())?;
        if !self.c.is_one() {
            write!(f, "; c={}", self.c)?;
        }
        if !self.nil.is_empty() {
            write!(f, "; #{:x}", self.nil.0)?;
        }
        if self.power != 1 {
            write!(f, "; ^{}", self.power)?;
        }
        f.write_str("]")
    }
}

/// `alpha u_I x^e`; the Hamiltonian of an elementary operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightFunction {
    pub coeff: BigRational,
    pub nil: NilMonomial,
    pub exponent: DimVec,
}

impl WeightFunction {
    pub fn to_elem_auto(&self, mode: Mode) -> Result<ElemAuto> {
        let (d, r) = self.exponent.primitive_part()?;
        ElemAuto::new(&self.coeff * rat(r as i64), self.nil, r as u32, d, mode)
    }

    pub fn to_series(&self, cap: &Cap) -> TruncSeries {
        TruncSeries::monomial(
            self.exponent.len(),
            cap.clone(),
            self.exponent.entries(),
            self.nil,
            self.coeff.clone(),
        )
    }
}

/// All `T_{q,J}` for nonempty `J`, in the order `{1}, {2}, {1,2}, {3}, ...`.
pub fn factor_initial(q: usize, levels: &Levels) -> Result<Vec<ElemAuto>> {
    let k = levels.cap(q);
    if k == 0 {
        return domain(format!("no levels at i{}", q + 1));
    }
    if k > 20 {
        return domain("more than 2^20 subsets per vertex");
    }
    let n = levels.n();
    let mut out = Vec::with_capacity((1usize << k) - 1);
    for mask in 1u32..(1u32 << k) {
        let size = mask.count_ones() as i64;
        let mut c = BigRational::one();
        for j in 1..size {
            c *= rat(j);
        }
        if size % 2 == 0 {
            c = -c;
        }
        out.push(ElemAuto::nilpotent(
            c,
            levels.subset(q, mask)?,
            size as u32,
            DimVec::unit(n, q),
        )?);
    }
    Ok(out)
}

/// `B = A2^-1 A1 A2 A1^-1` in closed form; `None` is the identity.
pub fn commutator(q: &Quiver, a1: &ElemAuto, a2: &ElemAuto) -> Result<Option<ElemAuto>> {
    if a1.mode != Mode::Nilpotent || a2.mode != Mode::Nilpotent {
        return domain("commutator needs nilpotent-mode operators");
    }
    if a1.power != 1 || a2.power != 1 {
        return domain("commutator expects normalized operators");
    }
    if a1.nil.intersects(a2.nil) {
        return Ok(None);
    }
    let w = q.dsz(&a1.d, &a2.d)?;
    if w == 0 {
        return Ok(None);
    }
    let e = a1.exponent().add(&a2.exponent());
    let (d, ind) = e.primitive_part()?;
    let c = &a1.c * &a2.c * rat(ind as i64 * w);
    Ok(Some(ElemAuto::nilpotent(
        c,
        a1.nil.union(a2.nil),
        ind as u32,
        d,
    )?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NaiveCommutation {
    Identity,
    Op(ElemAuto),
    Violation {
        d1: DimVec,
        d2: DimVec,
        bracket: i64,
    },
}

/// Pentagon rule: `T_{d1} T_{d2} = T_{d2} T_{d1+d2} T_{d1}` when `<d1,d2> = 1`.
pub fn naive_commutator(q: &Quiver, a1: &ElemAuto, a2: &ElemAuto) -> Result<NaiveCommutation> {
    for a in [a1, a2] {
        if a.mode != Mode::Naive || !a.c.is_one() || a.r != 1 || a.power != 1 {
            return domain("naive commutator needs plain T_d operators");
        }
    }
    let w = q.dsz(&a1.d, &a2.d)?;
    Ok(match w {
        0 => NaiveCommutation::Identity,
        1 => NaiveCommutation::Op(ElemAuto::naive(a1.d.add(&a2.d))?),
        _ => NaiveCommutation::Violation {
            d1: a1.d.clone(),
            d2: a2.d.clone(),
            bracket: w,
        },
    })
}

/// Substitutes the action of `a` into every monomial of `s`.
pub fn apply(q: &Quiver, a: &ElemAuto, s: &TruncSeries) -> Result<TruncSeries> {
    if s.n() != q.n() {
        return domain("series and quiver disagree on the vertex count");
    }
    let mut cache: HashMap<i64, TruncSeries> = HashMap::new();
    let mut out = TruncSeries::zero(s.n(), s.cap().clone());
    for (t, c) in s.terms() {
        let n = q.bracket(a.d.entries(), &t.exp);
        if n == 0 {
            out.add_term(t.exp.clone(), t.nil, c.clone());
            continue;
        }
        let f = match cache.entry(n) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(a.factor(n, s.cap())?),
        };
        for (ft, fc) in f.terms() {
            let Some(nil) = t.nil.mul(ft.nil) else {
                continue;
            };
            let exp: Box<[i64]> = t
                .exp
                .iter()
                .zip(ft.exp.iter())
                .map(|(x, y)| x + y)
                .collect();
            out.add_term(exp, nil, c * fc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::tests::q1;

    #[test]
    fn factor_initial_coefficients() {
        let l = Levels::uniform(3, 3).unwrap();
        let ops = factor_initial(0, &l).unwrap();
        assert_eq!(ops.len(), 7);
        let cr: Vec<(BigRational, u32)> = ops.iter().map(|o| (o.c.clone(), o.r)).collect();
        assert_eq!(cr[0], (rat(1), 1));
        assert_eq!(cr[1], (rat(1), 1));
        assert_eq!(cr[2], (rat(-1), 2));
        assert_eq!(cr[6], (rat(2), 3));
        let l1 = Levels::uniform(3, 1).unwrap();
        assert_eq!(factor_initial(2, &l1).unwrap().len(), 1);
    }

    #[test]
    fn commutator_closed_form_examples() {
        let q = q1();
        let l = Levels::uniform(3, 1).unwrap();
        let a1 = ElemAuto::nilpotent(rat(1), l.var(0, 1).unwrap(), 1, DimVec::unit(3, 0)).unwrap();
        let a2 = ElemAuto::nilpotent(rat(1), l.var(2, 1).unwrap(), 1, DimVec::unit(3, 2)).unwrap();
        let b = commutator(&q, &a1, &a2).unwrap().unwrap();
        assert_eq!(b.c, rat(1));
        assert_eq!(b.r, 1);
        assert_eq!(b.d.to_string(), "i1+i3");
        assert_eq!(b.nil, a1.nil.union(a2.nil));
        let a3 = ElemAuto::nilpotent(rat(1), l.var(2, 1).unwrap(), 1, DimVec::unit(3, 1)).unwrap();
        assert_eq!(commutator(&q, &a2, &a3).unwrap(), None);
        let s2 = ElemAuto::nilpotent(rat(1), l.var(1, 1).unwrap(), 1, DimVec::unit(3, 1)).unwrap();
        assert_eq!(commutator(&q, &a1, &s2).unwrap(), None);
        let naive = ElemAuto::naive(DimVec::unit(3, 0)).unwrap();
        assert!(commutator(&q, &naive, &a2).is_err());
    }

    #[test]
    fn naive_commutator_examples() {
        let q = q1();
        let t = |v| ElemAuto::naive(DimVec::unit(3, v)).unwrap();
        match naive_commutator(&q, &t(1), &t(2)).unwrap() {
            NaiveCommutation::Op(op) => assert_eq!(op.d.to_string(), "i2+i3"),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            naive_commutator(&q, &t(0), &t(1)).unwrap(),
            NaiveCommutation::Identity
        );
        assert!(matches!(
            naive_commutator(&q, &t(2), &t(1)).unwrap(),
            NaiveCommutation::Violation { bracket: -1, .. }
        ));
    }

    #[test]
    fn apply_one_step() {
        // T_{i3,{1}} on x_{i1}: x_{i1}(1 - u x_{i3})
        let q = q1();
        let l = Levels::uniform(3, 1).unwrap();
        let a = ElemAuto::nilpotent(rat(1), l.var(2, 1).unwrap(), 1, DimVec::unit(3, 2)).unwrap();
        let x1 = TruncSeries::monomial(3, Cap::none(), &[1, 0, 0], NilMonomial::EMPTY, rat(1));
        let img = apply(&q, &a, &x1).unwrap();
        assert_eq!(img.len(), 2);
        assert_eq!(img.coefficient(&[1, 0, 1], a.nil), rat(-1));
        let back = apply(&q, &a.inverse(), &img).unwrap();
        assert_eq!(back, x1);
    }

    #[test]
    fn naive_apply_needs_cap() {
        let q = q1();
        let a = ElemAuto::naive(DimVec::unit(3, 2)).unwrap();
        let x1 = TruncSeries::monomial(3, Cap::none(), &[1, 0, 0], NilMonomial::EMPTY, rat(1));
        assert!(apply(&q, &a, &x1).is_err());
        let x1 = x1.with_cap(Cap::degree(4));
        let img = apply(&q, &a, &x1).unwrap();
        // x1 (1 + x3)^{-1} up to degree 4
        assert_eq!(img.len(), 4);
        assert_eq!(img.coefficient(&[1, 0, 3], NilMonomial::EMPTY), rat(-1));
    }

    #[test]
    fn weight_function_roundtrip() {
        let l = Levels::uniform(3, 2).unwrap();
        let op = &factor_initial(0, &l).unwrap()[2];
        let w = op.weight_function();
        assert_eq!(w.coeff, BigRational::new((-1).into(), 2.into()));
        assert_eq!(&w.to_elem_auto(Mode::Nilpotent).unwrap(), op);
    }
}
