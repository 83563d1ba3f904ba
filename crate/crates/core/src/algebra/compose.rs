use num_rational::BigRational;
use num_traits::Zero;

use super::auto::{ElemAuto, WeightFunction};
use super::series::rat;
use crate::error::{domain, Result};
use crate::quiver::Quiver;

/// Weight functions of all ordered chains in a same-slope block.
///
/// A chain `j1 < ... < jl` with pairwise disjoint index sets contributes the
/// iterated half bracket `f_{1..l} = 1/2 <e_{1..l-1}, e_l> f_{1..l-1} f_l`;
/// chains whose coefficient vanishes are dropped. Output is ordered by the
/// last element, then by creation.
pub fn compose_same_slope(q: &Quiver, ops: &[ElemAuto]) -> Result<Vec<WeightFunction>> {
    if let Some(first) = ops.first() {
        let mu = first.slope(q)?;
        for op in ops {
            if op.slope(q)? != mu {
                return domain(format!("slope mismatch in same-slope block: {op}"));
            }
        }
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut chains: Vec<WeightFunction> = Vec::new();
    for op in ops {
        let f = op.weight_function();
        let mut fresh = vec![f.clone()];
        for g in &chains {
            if g.nil.intersects(f.nil) {
                continue;
            }
            let w = q.bracket(g.exponent.entries(), f.exponent.entries());
            if w == 0 {
                continue;
            }
            let coeff = &half * rat(w) * &g.coeff * &f.coeff;
            if coeff.is_zero() {
                continue;
            }
            fresh.push(WeightFunction {
                coeff,
                nil: g.nil.union(f.nil),
                exponent: g.exponent.add(&f.exponent),
            });
        }
        chains.extend(fresh);
    }
    Ok(chains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::auto::Mode;
    use crate::algebra::nil::{Levels, NilMonomial};
    use crate::algebra::oracle::{brute_force_product, hamiltonian};
    use crate::algebra::series::{Cap, TruncSeries};
    use crate::quiver::tests::q2;
    use crate::quiver::DimVec;

    fn op(q: &Quiver, l: &Levels, verts: &[usize]) -> ElemAuto {
        let mut nil = NilMonomial::EMPTY;
        for &v in verts {
            nil = nil.union(l.var(v, 1).unwrap());
        }
        let e = DimVec::from_sparse(q.n(), &verts.iter().map(|&v| (v, 1)).collect::<Vec<_>>());
        ElemAuto::from_exponent(rat(1), nil, &e, Mode::Nilpotent).unwrap()
    }

    #[test]
    fn single_and_commuting_pairs() {
        let q = q2();
        let l = Levels::uniform(5, 1).unwrap();
        let a = op(&q, &l, &[0, 3]);
        assert_eq!(
            compose_same_slope(&q, std::slice::from_ref(&a)).unwrap(),
            vec![a.weight_function()]
        );
        // i1+i4 and i3+i5 do not interact
        let b = op(&q, &l, &[2, 4]);
        assert_eq!(compose_same_slope(&q, &[a, b]).unwrap().len(), 2);
    }

    #[test]
    fn slope_mismatch_is_rejected() {
        let q = q2();
        let l = Levels::uniform(5, 1).unwrap();
        assert!(compose_same_slope(&q, &[op(&q, &l, &[0, 3]), op(&q, &l, &[0])]).is_err());
    }

    #[test]
    fn pair_term_against_bch_oracle() {
        // i1+i4 and i2+i5 at slope 1/2 have bracket -1
        let q = q2();
        let l = Levels::uniform(5, 1).unwrap();
        let a = op(&q, &l, &[0, 3]);
        let b = op(&q, &l, &[1, 4]);
        assert_eq!(q.dsz(&a.exponent(), &b.exponent()).unwrap(), -1);
        let fs = compose_same_slope(&q, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(fs.len(), 3);
        let mut sum = TruncSeries::zero(5, Cap::none());
        for f in &fs {
            sum = sum.add(&f.to_series(&Cap::none())).unwrap();
        }
        let img = brute_force_product(&q, &[a, b], &Cap::none()).unwrap();
        let h = hamiltonian(&q, &img, &Cap::none()).unwrap();
        assert_eq!(h, sum);
    }
}
