//! Slope factorization of the ordered product of the `T_{i_q}`, truncated at
//! a dimension vector.
//!
//! Per vertex, the symmetric part of the nilpotent algebra is a divided-power
//! ring, so the `t x` form of a nilpotent slope block is the slope factor of
//! the plain product with exponents capped by `d`. Factors are found degree
//! by degree: the lowest-degree discrepancy between the target and the
//! current ordered product is linear in the missing Hamiltonian terms.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::oracle::brute_force_product;
use crate::algebra::{Cap, ElemAuto, Mode, NilMonomial, TruncSeries};
use crate::error::{Error, Result};
use crate::quiver::{DimVec, Quiver, Slope};

/// Operators of every slope, each block in product order.
#[derive(Clone, Debug)]
pub struct SlopeFactors {
    pub cap: Cap,
    pub blocks: BTreeMap<Slope, Vec<ElemAuto>>,
}

impl SlopeFactors {
    /// Slope-descending sequence.
    pub fn ordered(&self) -> Vec<ElemAuto> {
        self.blocks
            .iter()
            .rev()
            .flat_map(|(_, ops)| ops.iter().cloned())
            .collect()
    }

    /// `theta_mu(x_p) / x_p` for the listed vertices.
    pub fn block_ratios(
        &self,
        q: &Quiver,
        mu: Slope,
        gens: &[usize],
    ) -> Result<BTreeMap<usize, TruncSeries>> {
        let ops = self.blocks.get(&mu).cloned().unwrap_or_default();
        let images = brute_force_product(q, &ops, &self.cap)?;
        Ok(gens
            .iter()
            .map(|&p| (p, images.ratios[p].clone()))
            .collect())
    }
}

fn unit(n: usize, p: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[p] = 1;
    e
}

/// Factors `T_{i_1} ... T_{i_n}` (vertex order) into slope blocks with every
/// exponent at most `d`.
pub fn slope_factors(q: &Quiver, d: &DimVec) -> Result<SlopeFactors> {
    let n = q.n();
    let cap = Cap::exponent(d.entries().to_vec());
    let initial: Vec<ElemAuto> = (0..n)
        .filter(|&v| d.get(v) > 0)
        .map(|v| ElemAuto::naive(DimVec::unit(n, v)))
        .collect::<Result<_>>()?;
    let target = brute_force_product(q, &initial, &cap)?.ratios;
    let mut out = SlopeFactors {
        cap: cap.clone(),
        blocks: BTreeMap::new(),
    };
    for degree in 1..=d.total() {
        let current = brute_force_product(q, &out.ordered(), &cap)?.ratios;
        let mut missing: BTreeMap<Vec<i64>, Vec<BigRational>> = BTreeMap::new();
        for p in 0..n {
            let diff = target[p].sub(&current[p])?;
            for (term, c) in diff.terms() {
                let e = term.exp.to_vec();
                if c.is_zero() || e.iter().sum::<i64>() != degree {
                    continue;
                }
                missing
                    .entry(e)
                    .or_insert_with(|| vec![BigRational::zero(); n])[p] = c.clone();
            }
        }
        for (e, coeffs) in missing {
            let e = DimVec::from_entries(e);
            let (prim, _) = e.primitive_part()?;
            // leading action of x^e on x_p is <prim, p> c x^e
            let pairing: Vec<i64> = (0..n)
                .map(|p| q.bracket(prim.entries(), &unit(n, p)))
                .collect();
            let Some(p0) = (0..n).find(|&p| pairing[p] != 0) else {
                return Err(Error::Consistency(format!(
                    "discrepancy at {e} with trivial action"
                )));
            };
            let c = &coeffs[p0] / BigRational::from_integer(pairing[p0].into());
            if (0..n).any(|p| coeffs[p] != &c * BigRational::from_integer(pairing[p].into())) {
                return Err(Error::Consistency(format!(
                    "discrepancy at {e} is not a Hamiltonian term"
                )));
            }
            let op = ElemAuto::from_exponent(c, NilMonomial::EMPTY, &e, Mode::Naive)?;
            out.blocks.entry(q.slope(&prim)?).or_default().push(op);
        }
    }
    if brute_force_product(q, &out.ordered(), &cap)?.ratios != target {
        return Err(Error::Consistency(
            "slope factorization does not reproduce the product".into(),
        ));
    }
    Ok(out)
}
