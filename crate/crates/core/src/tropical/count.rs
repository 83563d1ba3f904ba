use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::curve::{leaf_key, leg_factor};
use super::weights::WeightVector;
use crate::algebra::{rat, Levels};
use crate::error::{domain, Error, Result};
use crate::quiver::{DimVec, Quiver, Slope};
use crate::sorting::{OpId, SortOptions, SortingDiagram};

pub type Family = Vec<(usize, u32)>;

/// Combinatorial data of one curve of `S_{Q,k}(mu)`.
#[derive(Clone, Debug)]
pub struct CurveSummary {
    pub ops: Vec<OpId>,
    pub family: Family,
    pub d_out: DimVec,
    pub mult_q: BigRational,
}

impl CurveSummary {
    /// `Mult_Q(h) prod_J (-1)^(#J-1)/#J (#J-1)!`.
    pub fn weight(&self) -> BigRational {
        self.family
            .iter()
            .fold(self.mult_q.clone(), |acc, &(_, m)| {
                acc * leg_factor(m.count_ones())
            })
    }
}

/// All curves of one slope of a stable diagram, with counts per leg family.
#[derive(Clone, Debug)]
pub struct CurveCatalog {
    pub slope: Slope,
    pub curves: Vec<CurveSummary>,
    counts: HashMap<Family, BigRational>,
}

impl CurveCatalog {
    /// Connected curves of the block, then every chain `j1 < ... < jl` with
    /// disjoint legs and nonzero weight.
    pub fn new(d: &SortingDiagram, mu: Slope) -> Result<Self> {
        if !d.is_stable() {
            return domain("curve catalog needs a stable diagram");
        }
        let q = d.quiver();
        let block = d.slope_block(mu);
        let half = BigRational::new(1.into(), 2.into());
        let mut memo: HashMap<OpId, (Family, BigRational)> = HashMap::new();
        let mut curves: Vec<CurveSummary> = Vec::new();
        for &id in &block {
            let (family, mult) = connected(d, id, &mut memo)?;
            let d_out = d.node(id).op.exponent();
            let mut fresh = vec![CurveSummary {
                ops: vec![id],
                family: family.clone(),
                d_out: d_out.clone(),
                mult_q: mult.clone(),
            }];
            for g in &curves {
                if overlaps(&g.family, &family) {
                    continue;
                }
                let w = q.bracket(g.d_out.entries(), d_out.entries());
                if w == 0 || g.mult_q.is_zero() || mult.is_zero() {
                    continue;
                }
                let mut ops = g.ops.clone();
                ops.push(id);
                let mut fam = g.family.clone();
                fam.extend(family.iter().copied());
                fam.sort_unstable();
                fresh.push(CurveSummary {
                    ops,
                    family: fam,
                    d_out: g.d_out.add(&d_out),
                    mult_q: &half * &g.mult_q * &mult * rat(w),
                });
            }
            curves.extend(fresh);
        }
        let mut counts: HashMap<Family, BigRational> = HashMap::new();
        for c in &curves {
            *counts
                .entry(c.family.clone())
                .or_insert_with(BigRational::zero) += &c.mult_q;
        }
        Ok(CurveCatalog {
            slope: mu,
            curves,
            counts,
        })
    }

    /// `sum Mult_Q(h)` over curves whose legs are exactly `family`.
    pub fn count_family(&self, family: &[(usize, u32)]) -> BigRational {
        let mut f = family.to_vec();
        f.sort_unstable();
        self.counts
            .get(&f)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `N^trop(w)` on the canonical family of `w`.
    pub fn count(&self, w: &WeightVector) -> BigRational {
        self.count_family(&w.canonical_family())
    }

    /// Families that occur, with their counts.
    pub fn families(&self) -> impl Iterator<Item = (&Family, &BigRational)> {
        self.counts.iter()
    }

    /// Groups the occurring families by shape; each value lists every
    /// family's count.
    pub fn by_shape(&self, n: usize) -> Result<HashMap<WeightVector, Vec<(Family, BigRational)>>> {
        let mut out: HashMap<WeightVector, Vec<(Family, BigRational)>> = HashMap::new();
        for (f, c) in &self.counts {
            out.entry(WeightVector::from_family(n, f)?)
                .or_default()
                .push((f.clone(), c.clone()));
        }
        Ok(out)
    }
}

fn overlaps(a: &[(usize, u32)], b: &[(usize, u32)]) -> bool {
    a.iter()
        .any(|&(q, m)| b.iter().any(|&(p, n)| p == q && m & n != 0))
}

fn connected(
    d: &SortingDiagram,
    id: OpId,
    memo: &mut HashMap<OpId, (Family, BigRational)>,
) -> Result<(Family, BigRational)> {
    if let Some(v) = memo.get(&id) {
        return Ok(v.clone());
    }
    let out = match d.parents(id) {
        None => (vec![leaf_key(d, id)?], BigRational::one()),
        Some((p1, p2)) => {
            let (f1, m1) = connected(d, p1, memo)?;
            let (f2, m2) = connected(d, p2, memo)?;
            if overlaps(&f1, &f2) {
                return Err(Error::Consistency(format!(
                    "legs of the parents of {} overlap",
                    d.node(id).op
                )));
            }
            let w = d.quiver().bracket(
                d.node(p1).op.exponent().entries(),
                d.node(p2).op.exponent().entries(),
            );
            let mut f = f1;
            f.extend(f2);
            f.sort_unstable();
            (f, m1 * m2 * rat(w))
        }
    };
    memo.insert(id, out.clone());
    Ok(out)
}

/// Stable nilpotent diagram with `k` levels everywhere, pruned above `cap`.
pub fn stable_diagram(q: &Quiver, k: u32, cap: Option<DimVec>) -> Result<SortingDiagram> {
    let levels = Levels::uniform(q.n(), k)?;
    let mut d = SortingDiagram::new(
        q,
        Some(levels),
        SortOptions {
            exponent_cap: cap,
            max_steps: Some(200_000_000),
            ..Default::default()
        },
    )?;
    d.stabilize()?;
    Ok(d)
}

/// `N^trop_{Q,k}(w)`.
pub fn tropical_count(q: &Quiver, k: u32, w: &WeightVector) -> Result<BigRational> {
    if w.n() != q.n() {
        return domain("weight vector and quiver disagree on the vertex count");
    }
    if w.parts().iter().flatten().any(|&p| p > k) {
        return domain(format!("a leg weight of {w} exceeds k = {k}"));
    }
    // no pairwise-disjoint family fits
    if w.sizes().iter().any(|&s| s > k) {
        return Ok(BigRational::zero());
    }
    let d = stable_diagram(q, k, Some(w.d_out()))?;
    Ok(CurveCatalog::new(&d, w.slope(q)?)?.count(w))
}
