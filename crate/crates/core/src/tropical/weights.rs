use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{domain, Result};
use crate::quiver::{DimVec, Quiver, Slope};

/// Leg weights per vertex: `w_q = (w_q1, ..., w_ql_q)`, kept ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector {
    parts: Vec<Vec<u32>>,
}

impl WeightVector {
    pub fn new(mut parts: Vec<Vec<u32>>) -> Result<Self> {
        for p in &mut parts {
            if p.contains(&0) {
                return domain("leg weights must be positive");
            }
            p.sort_unstable();
        }
        if parts.iter().all(|p| p.is_empty()) {
            return domain("weight vector has no legs");
        }
        Ok(WeightVector { parts })
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.parts
    }

    /// `|w_q|` per vertex.
    pub fn sizes(&self) -> Vec<u32> {
        self.parts.iter().map(|p| p.iter().sum()).collect()
    }

    /// `sum_q |w_q| i_q`.
    pub fn d_out(&self) -> DimVec {
        DimVec::from_entries(self.sizes().into_iter().map(i64::from).collect())
    }

    pub fn slope(&self, q: &Quiver) -> Result<Slope> {
        q.slope(&self.d_out())
    }

    /// `(sum over sources, sum over sinks)`.
    pub fn reduce(&self, q: &Quiver) -> (i64, i64) {
        q.reduce(&self.d_out())
    }

    /// `|Aut(w)| = prod_q |Aut(w_q)|`, permutations of equal weights at a vertex.
    pub fn aut(&self) -> BigInt {
        let mut out = BigInt::one();
        for p in &self.parts {
            let mut i = 0;
            while i < p.len() {
                let mut j = i;
                while j < p.len() && p[j] == p[i] {
                    j += 1;
                }
                for f in 2..=(j - i) {
                    out *= f;
                }
                i = j;
            }
        }
        out
    }

    /// `R_w = prod (-1)^(w_qj - 1) / w_qj^2`.
    pub fn r_w(&self) -> BigRational {
        let mut out = BigRational::one();
        for &w in self.parts.iter().flatten() {
            let sq = BigInt::from(w) * BigInt::from(w);
            let sign = if w % 2 == 0 { -1 } else { 1 };
            out *= BigRational::new(BigInt::from(sign), sq);
        }
        out
    }

    /// `R_w / |Aut(w)|`.
    pub fn weight_factor(&self) -> BigRational {
        self.r_w() / BigRational::from_integer(self.aut())
    }

    /// Level sets realizing `w` with consecutive levels from `1`, as
    /// `(vertex, mask)` pairs sorted.
    pub fn canonical_family(&self) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (q, p) in self.parts.iter().enumerate() {
            let mut start = 0u32;
            for &w in p {
                let mask = ((1u64 << (start + w)) - (1u64 << start)) as u32;
                out.push((q, mask));
                start += w;
            }
        }
        out.sort_unstable();
        out
    }

    /// Every family of level sets inside `1..=k` with shape `w`, each sorted.
    pub fn all_families(&self, k: u32) -> Vec<Vec<(usize, u32)>> {
        let mut out: Vec<Vec<(usize, u32)>> = vec![Vec::new()];
        for (q, p) in self.parts.iter().enumerate() {
            let mut local = Vec::new();
            blocks(p, 0, 0, k, &mut Vec::new(), &mut local);
            let mut next = Vec::new();
            for f in &out {
                for l in &local {
                    let mut g = f.clone();
                    g.extend(l.iter().map(|&m| (q, m)));
                    next.push(g);
                }
            }
            out = next;
        }
        for f in &mut out {
            f.sort_unstable();
        }
        out
    }

    /// The shape of a family of level sets.
    pub fn from_family(n: usize, family: &[(usize, u32)]) -> Result<Self> {
        let mut parts = vec![Vec::new(); n];
        for &(q, mask) in family {
            if q >= n {
                return domain(format!("vertex i{} outside the quiver", q + 1));
            }
            parts[q].push(mask.count_ones());
        }
        WeightVector::new(parts)
    }

    /// All shapes with `d_out = e`: an integer partition of each entry.
    pub fn with_d_out(e: &[i64]) -> Vec<WeightVector> {
        let per: Vec<Vec<Vec<u32>>> = e.iter().map(|&c| partitions(c.max(0) as u32)).collect();
        let mut out = Vec::new();
        let mut pick = vec![0usize; e.len()];
        if e.iter().all(|&c| c <= 0) {
            return out;
        }
        loop {
            let parts = pick
                .iter()
                .enumerate()
                .map(|(q, &i)| per[q][i].clone())
                .collect();
            out.push(WeightVector { parts });
            let mut q = 0;
            loop {
                if q == e.len() {
                    return out;
                }
                pick[q] += 1;
                if pick[q] < per[q].len() {
                    break;
                }
                pick[q] = 0;
                q += 1;
            }
        }
    }
}

/// Disjoint level masks of the given sizes; equal sizes in increasing mask order.
fn blocks(sizes: &[u32], i: usize, used: u32, k: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i == sizes.len() {
        out.push(cur.clone());
        return;
    }
    let floor = if i > 0 && sizes[i] == sizes[i - 1] {
        cur[i - 1] + 1
    } else {
        1
    };
    for m in floor.max(1)..(1u32 << k) {
        if m.count_ones() != sizes[i] || m & used != 0 {
            continue;
        }
        cur.push(m);
        blocks(sizes, i + 1, used | m, k, cur, out);
        cur.pop();
    }
}

/// Integer partitions of `n`, each ascending; `[[]]` for `n = 0`.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in min..=n {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (q, p) in self.parts.iter().enumerate() {
            if p.is_empty() {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let ws: Vec<String> = p.iter().map(u32::to_string).collect();
            write!(f, "i{}:({})", q + 1, ws.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(parts: &[&[u32]]) -> WeightVector {
        WeightVector::new(parts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn aut_and_r() {
        let w = wv(&[&[1, 1], &[2], &[1, 1, 1]]);
        assert_eq!(w.aut(), BigInt::from(12));
        assert_eq!(w.r_w(), BigRational::new(BigInt::from(-1), BigInt::from(4)));
        assert_eq!(w.d_out().entries(), [2, 2, 3]);
    }

    #[test]
    fn canonical_family_uses_consecutive_levels() {
        let w = wv(&[&[2, 1], &[], &[1]]);
        assert_eq!(
            w.canonical_family(),
            vec![(0, 0b001), (0, 0b110), (2, 0b001)]
        );
        assert_eq!(
            WeightVector::from_family(3, &w.canonical_family()).unwrap(),
            w
        );
    }

    #[test]
    fn family_enumeration() {
        // {1},{2} at one vertex; pairs of singletons in 1..=3
        assert_eq!(wv(&[&[1, 1]]).all_families(2).len(), 1);
        assert_eq!(wv(&[&[1, 1]]).all_families(3).len(), 3);
        assert_eq!(wv(&[&[1, 2]]).all_families(3).len(), 3);
        assert_eq!(wv(&[&[1], &[2]]).all_families(2).len(), 2);
        assert!(wv(&[&[3]]).all_families(2).is_empty());
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..8).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, [1, 1, 2, 3, 5, 7, 11, 15]);
        assert_eq!(WeightVector::with_d_out(&[2, 0, 3]).len(), 6);
    }

    #[test]
    fn rejects_empty_and_zero() {
        assert!(WeightVector::new(vec![vec![], vec![]]).is_err());
        assert!(WeightVector::new(vec![vec![0]]).is_err());
    }
}
