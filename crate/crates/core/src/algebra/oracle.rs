//! Ground truth for every identity between operator products.
//!
//! A product `A_1 ∘ A_2 ∘ ... ∘ A_n` means `A_1(A_2(...A_n(x)))`: the
//! rightmost substitution is performed first. Images are stored in ratio form
//! `x_p -> x_p F_p`, which keeps every exponent non-negative.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use super::auto::{apply, ElemAuto, Mode};
use super::nil::{Levels, NilMonomial};
use super::series::{rat, Cap, TruncSeries};
use crate::error::{Error, Result};
use crate::quiver::Quiver;

/// Images of all generators under an automorphism, `x_p -> x_p * ratios[p]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorImages {
    pub ratios: Vec<TruncSeries>,
}

impl GeneratorImages {
    pub fn identity(n: usize, cap: &Cap) -> Self {
        GeneratorImages {
            ratios: (0..n).map(|_| TruncSeries::one(n, cap.clone())).collect(),
        }
    }

    /// The image of `x_p` itself.
    pub fn image(&self, p: usize) -> TruncSeries {
        let mut e = vec![0; self.ratios.len()];
        e[p] = 1;
        self.ratios[p].shift(&e)
    }

    pub fn is_identity(&self) -> bool {
        self.ratios.iter().all(|r| r.is_one())
    }
}

/// Composes `ops` left to right and returns the images of all generators.
pub fn brute_force_product(q: &Quiver, ops: &[ElemAuto], cap: &Cap) -> Result<GeneratorImages> {
    let n = q.n();
    let ratios = (0..n)
        .into_par_iter()
        .map(|p| {
            let mut f = TruncSeries::one(n, cap.clone());
            for a in ops.iter().rev() {
                let np = q.bracket(a.d.entries(), &unit(n, p));
                let moved = apply(q, a, &f)?;
                f = a.factor(np, cap)?.mul(&moved)?;
            }
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorImages { ratios })
}

fn unit(n: usize, p: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[p] = 1;
    e
}

/// Integer images for products of row-consistent nilpotent operators.
///
/// Every term of such a product is `u_J x^{rows(J)}`, so a ratio is a map
/// from index sets to integers. Arithmetic is checked and fails loudly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilImages {
    pub ratios: Vec<HashMap<u128, i128>>,
}

struct FastOp {
    nil: u128,
    c: i128,
    /// `<d, p>` for each vertex `p`.
    pairing: Vec<i128>,
}

pub fn nil_product(q: &Quiver, ops: &[ElemAuto], levels: &Levels) -> Result<NilImages> {
    nil_product_for(q, ops, levels, &(0..q.n()).collect::<Vec<_>>())
}

/// Like [`nil_product`] but only for the listed generators (others stay empty).
pub fn nil_product_for(
    q: &Quiver,
    ops: &[ElemAuto],
    levels: &Levels,
    gens: &[usize],
) -> Result<NilImages> {
    let n = q.n();
    let mut fast = Vec::with_capacity(ops.len());
    for a in ops {
        if !a.is_row_consistent(levels) || a.power != 1 || !a.c.denom().is_one() {
            return Err(Error::Domain(format!(
                "operator {a} is not row-consistent with integer coefficient"
            )));
        }
        let c =
            a.c.numer()
                .to_i128()
                .ok_or(Error::Overflow("nil_product"))?;
        let pairing = (0..n)
            .map(|p| q.bracket(a.d.entries(), &unit(n, p)) as i128)
            .collect();
        fast.push(FastOp {
            nil: a.nil.0,
            c,
            pairing,
        });
    }
    let bit_weight: Vec<usize> = (0..levels.total_bits()).map(|b| levels.owner(b)).collect();
    let images = gens
        .par_iter()
        .map(|&p| nil_ratio(&fast, &bit_weight, p))
        .collect::<Result<Vec<_>>>()?;
    let mut ratios = vec![HashMap::new(); n];
    for (&p, img) in gens.iter().zip(images) {
        ratios[p] = img;
    }
    Ok(NilImages { ratios })
}

fn nil_ratio(ops: &[FastOp], owner: &[usize], p: usize) -> Result<HashMap<u128, i128>> {
    let mut f: HashMap<u128, i128> = HashMap::from([(0u128, 1i128)]);
    let mut updates: Vec<(u128, i128)> = Vec::new();
    for a in ops.iter().rev() {
        updates.clear();
        for (&j, &coef) in &f {
            if j & a.nil != 0 {
                continue;
            }
            // <d_A, p + rows(J)>
            let mut w = a.pairing[p];
            let mut rest = j;
            while rest != 0 {
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                w += a.pairing[owner[b as usize]];
            }
            if w == 0 {
                continue;
            }
            let delta = coef
                .checked_mul(a.c)
                .and_then(|x| x.checked_mul(w))
                .ok_or(Error::Overflow("nil_product"))?;
            updates.push((j | a.nil, delta));
        }
        for &(k, delta) in &updates {
            let slot = f.entry(k).or_insert(0);
            *slot = slot
                .checked_add(delta)
                .ok_or(Error::Overflow("nil_product"))?;
            if *slot == 0 {
                f.remove(&k);
            }
        }
    }
    Ok(f)
}

impl NilImages {
    pub fn to_generator_images(&self, levels: &Levels) -> GeneratorImages {
        let n = self.ratios.len();
        let ratios = self
            .ratios
            .iter()
            .map(|m| {
                let mut s = TruncSeries::zero(n, Cap::none());
                for (&j, &c) in m {
                    let nil = NilMonomial(j);
                    s.add_term(
                        levels.row_counts(nil).into(),
                        nil,
                        BigRational::from_integer(BigInt::from(c)),
                    );
                }
                s
            })
            .collect();
        GeneratorImages { ratios }
    }
}

/// `(Phi - 1)^k` style application of an automorphism to a whole series.
pub fn apply_images(images: &GeneratorImages, s: &TruncSeries) -> Result<TruncSeries> {
    let n = s.n();
    let mut out = TruncSeries::zero(n, s.cap().clone());
    for (t, c) in s.terms() {
        let mut term = TruncSeries::monomial(n, s.cap().clone(), &t.exp, t.nil, c.clone());
        for (p, &e) in t.exp.iter().enumerate() {
            if e != 0 {
                let r = images.ratios[p].clone().with_cap(s.cap().clone());
                term = term.mul(&r.pow(e)?)?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Hamiltonian `H` with `Phi = exp(ad_H)` for a unipotent automorphism.
///
/// Computes `D = log Phi` on each generator and reads `H` off
/// `D(x_p) = x_p * sum_a <a, p> h_a x^a`. Terms whose exponent pairs to zero
/// with every generator act trivially and are not recoverable; they are
/// reported as absent.
pub fn hamiltonian(q: &Quiver, images: &GeneratorImages, cap: &Cap) -> Result<TruncSeries> {
    let n = q.n();
    let mut logs = Vec::with_capacity(n);
    for p in 0..n {
        // log Phi (x_p) = sum (-1)^{k+1} (Phi - 1)^k x_p / k
        let x = TruncSeries::monomial(
            n,
            cap.clone(),
            &unit(n, p),
            NilMonomial::EMPTY,
            BigRational::one(),
        );
        let mut acc = TruncSeries::zero(n, cap.clone());
        let mut cur = x.clone();
        for k in 1..=256 {
            let next = apply_images(images, &cur)?.sub(&cur)?;
            if next.is_empty() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&next.scale(&BigRational::new(BigInt::from(sign), BigInt::from(k))))?;
            cur = next;
            if k == 256 {
                return Err(Error::Domain(
                    "automorphism is not unipotent under the cap".into(),
                ));
            }
        }
        let mut minus = vec![0; n];
        minus[p] = -1;
        logs.push(acc.shift(&minus));
    }
    let mut h = TruncSeries::zero(n, cap.clone());
    let mut seen = std::collections::BTreeSet::new();
    for p in 0..n {
        for (t, c) in logs[p].terms() {
            if !seen.insert((t.exp.clone(), t.nil)) {
                continue;
            }
            let w = q.bracket(&t.exp, &unit(n, p));
            if w == 0 {
                seen.remove(&(t.exp.clone(), t.nil));
                continue;
            }
            h.add_term(t.exp.clone(), t.nil, c / rat(w));
        }
    }
    Ok(h)
}

/// Mode-agnostic check that two operator lists compose to the same map.
pub fn products_agree(q: &Quiver, lhs: &[ElemAuto], rhs: &[ElemAuto], cap: &Cap) -> Result<bool> {
    Ok(brute_force_product(q, lhs, cap)? == brute_force_product(q, rhs, cap)?)
}

pub fn all_nilpotent(ops: &[ElemAuto]) -> bool {
    ops.iter().all(|a| a.mode == Mode::Nilpotent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::auto::{commutator, factor_initial};
    use crate::quiver::tests::{q1, q2};
    use crate::quiver::DimVec;

    fn t(n: usize, v: usize) -> ElemAuto {
        ElemAuto::naive(DimVec::unit(n, v)).unwrap()
    }

    #[test]
    fn empty_product_is_identity() {
        let q = q1();
        let img = brute_force_product(&q, &[], &Cap::degree(3)).unwrap();
        assert!(img.is_identity());
    }

    #[test]
    fn pentagon_fixes_composition_order() {
        // T_{i2} T_{i3} = T_{i3} T_{i2+i3} T_{i2} on Q1
        let q = q1();
        let cap = Cap::degree(8);
        let lhs = [t(3, 1), t(3, 2)];
        let rhs = [
            t(3, 2),
            ElemAuto::naive(DimVec::from_sparse(3, &[(1, 1), (2, 1)])).unwrap(),
            t(3, 1),
        ];
        assert!(products_agree(&q, &lhs, &rhs, &cap).unwrap());
        // and the reversed reading fails
        let rev: Vec<ElemAuto> = rhs.iter().rev().cloned().collect();
        assert!(!products_agree(&q, &lhs, &rev, &cap).unwrap());
    }

    #[test]
    fn nilpotent_commutator_matches_brute_force() {
        let q = q2();
        let l = Levels::uniform(5, 2).unwrap();
        let ops: Vec<ElemAuto> = (0..5)
            .flat_map(|v| factor_initial(v, &l).unwrap())
            .collect();
        for a1 in &ops {
            for a2 in &ops {
                let b = commutator(&q, a1, a2).unwrap();
                // A1 A2 = A2 B A1
                let lhs = vec![a1.clone(), a2.clone()];
                let mut rhs = vec![a2.clone()];
                rhs.extend(b);
                rhs.push(a1.clone());
                assert!(
                    products_agree(&q, &lhs, &rhs, &Cap::none()).unwrap(),
                    "{a1} {a2}"
                );
            }
        }
    }

    #[test]
    fn fast_product_matches_general() {
        let q = q2();
        let l = Levels::uniform(5, 2).unwrap();
        let ops: Vec<ElemAuto> = (0..5)
            .rev()
            .flat_map(|v| factor_initial(v, &l).unwrap())
            .collect();
        let fast = nil_product(&q, &ops, &l).unwrap().to_generator_images(&l);
        let slow = brute_force_product(&q, &ops, &Cap::none()).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn hamiltonian_of_single_operator() {
        let q = q1();
        let l = Levels::uniform(3, 2).unwrap();
        let a = factor_initial(2, &l).unwrap()[2].clone();
        let img = brute_force_product(&q, std::slice::from_ref(&a), &Cap::none()).unwrap();
        let h = hamiltonian(&q, &img, &Cap::none()).unwrap();
        assert_eq!(h, a.weight_function().to_series(&Cap::none()));
    }
}
