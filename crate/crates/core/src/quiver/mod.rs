//! Bipartite tree quivers embedded in a covering Kronecker quiver.
//!
//! Vertices are dense `0..n` with sinks first; they print as `i1..in`.
//! Every constructor recomputes the minimal labeling, so sources are
//! ordered by their lowest-labeled target sink.

mod classes;
mod dimvec;
mod fragment;
mod io;

pub use classes::{
    canonical_form, enumerate_compatible_classes, shape_form, small_fragments, EquivClass,
};
pub use dimvec::{index, DimVec, Slope};
pub use fragment::{build_covering_fragment, RootKind};
pub use io::QuiverFile;

use std::collections::VecDeque;

use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    /// Which of the `m` parallel arrows of `K(m)` this arrow covers.
    pub color: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    m: u32,
    sinks: usize,
    sources: usize,
    arrows: Vec<Arrow>,
    incident: Vec<Vec<usize>>,
}

impl Quiver {
    /// Builds a quiver from arbitrary vertex ids and relabels it minimally.
    ///
    /// Returns the quiver and, for each new vertex, the id it had on input.
    /// Arrows are `(source id, sink id, color)`; colors must be given for all
    /// arrows or for none, in which case a proper coloring is chosen greedily.
    pub fn from_ids(
        m: u32,
        sink_ids: &[u64],
        source_ids: &[u64],
        arrows: &[(u64, u64, Option<u32>)],
    ) -> Result<(Quiver, Vec<u64>)> {
        if m == 0 {
            return domain("m must be positive");
        }
        let s = sink_ids.len();
        let lookup = |id: u64, pool: &[u64]| pool.iter().position(|&x| x == id);
        let mut all: Vec<u64> = sink_ids.iter().chain(source_ids).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return domain("duplicate vertex id");
        }

        let mut raw = Vec::with_capacity(arrows.len());
        for &(a, b, c) in arrows {
            let Some(src) = lookup(a, source_ids) else {
                return domain(format!("arrow tail {a} is not a source"));
            };
            let Some(dst) = lookup(b, sink_ids) else {
                return domain(format!("arrow head {b} is not a sink"));
            };
            raw.push((src, dst, c));
        }

        // sources sorted by lowest target sink, ties by input order
        let mut order: Vec<usize> = (0..source_ids.len()).collect();
        let min_target = |p: usize| {
            raw.iter()
                .filter(|a| a.0 == p)
                .map(|a| a.1)
                .min()
                .unwrap_or(usize::MAX)
        };
        order.sort_by_key(|&p| (min_target(p), p));
        let mut new_pos = vec![0; source_ids.len()];
        for (rank, &p) in order.iter().enumerate() {
            new_pos[p] = s + rank;
        }

        let explicit = raw.iter().filter(|a| a.2.is_some()).count();
        if explicit != 0 && explicit != raw.len() {
            return domain("arrow colors must be given for all arrows or none");
        }
        let mut list: Vec<Arrow> = raw
            .iter()
            .map(|&(src, dst, c)| Arrow {
                source: new_pos[src],
                target: dst,
                color: c.unwrap_or(u32::MAX),
            })
            .collect();
        list.sort_by_key(|a| (a.source, a.target, a.color));

        let labels: Vec<u64> = sink_ids
            .iter()
            .copied()
            .chain(order.iter().map(|&p| source_ids[p]))
            .collect();
        let q = Quiver::assemble(m, s, source_ids.len(), list, explicit == 0)?;
        Ok((q, labels))
    }

    /// Builds a quiver whose vertices are already `0..s+S` with sinks first.
    pub fn from_arrows(
        m: u32,
        sinks: usize,
        sources: usize,
        arrows: &[(usize, usize)],
    ) -> Result<Quiver> {
        let sink_ids: Vec<u64> = (1..=sinks as u64).collect();
        let source_ids: Vec<u64> = (sinks as u64 + 1..=(sinks + sources) as u64).collect();
        let arrows: Vec<_> = arrows
            .iter()
            .map(|&(a, b)| (a as u64 + 1, b as u64 + 1, None))
            .collect();
        Ok(Quiver::from_ids(m, &sink_ids, &source_ids, &arrows)?.0)
    }

    fn assemble(
        m: u32,
        sinks: usize,
        sources: usize,
        arrows: Vec<Arrow>,
        recolor: bool,
    ) -> Result<Quiver> {
        let n = sinks + sources;
        let mut incident = vec![Vec::new(); n];
        for (k, a) in arrows.iter().enumerate() {
            incident[a.source].push(k);
            incident[a.target].push(k);
        }
        for (v, inc) in incident.iter().enumerate() {
            if inc.len() > m as usize {
                return domain(format!(
                    "vertex i{} has degree {} > m = {m}",
                    v + 1,
                    inc.len()
                ));
            }
        }
        let mut q = Quiver {
            m,
            sinks,
            sources,
            arrows,
            incident,
        };
        if q.component_count() + q.arrows.len() != n {
            return domain("quiver is not a forest");
        }
        if recolor {
            q.color_greedily();
        }
        for v in 0..n {
            let mut seen = Vec::new();
            for &k in &q.incident[v] {
                let c = q.arrows[k].color;
                if c >= m || seen.contains(&c) {
                    return domain(format!("bad arrow coloring at i{}", v + 1));
                }
                seen.push(c);
            }
        }
        Ok(q)
    }

    fn color_greedily(&mut self) {
        let n = self.n();
        let mut done = vec![false; n];
        for start in 0..n {
            if done[start] {
                continue;
            }
            done[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                let mut used: Vec<u32> = self.incident[v]
                    .iter()
                    .map(|&k| self.arrows[k].color)
                    .filter(|&c| c != u32::MAX)
                    .collect();
                for &k in &self.incident[v].clone() {
                    if self.arrows[k].color == u32::MAX {
                        let c = (0..).find(|c| !used.contains(c)).unwrap();
                        self.arrows[k].color = c;
                        used.push(c);
                    }
                    let w = self.other_end(k, v);
                    if !done[w] {
                        done[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }

    fn component_count(&self) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut count = 0;
        for v in 0..n {
            if !seen[v] {
                count += 1;
                self.flood(v, &mut seen, |_| true);
            }
        }
        count
    }

    fn flood(&self, start: usize, seen: &mut [bool], allowed: impl Fn(usize) -> bool) {
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] && allowed(w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.sinks + self.sources
    }

    pub fn num_sinks(&self) -> usize {
        self.sinks
    }

    pub fn num_sources(&self) -> usize {
        self.sources
    }

    pub fn is_sink(&self, v: usize) -> bool {
        v < self.sinks
    }

    pub fn is_source(&self, v: usize) -> bool {
        v >= self.sinks && v < self.n()
    }

    pub fn sink_range(&self) -> std::ops::Range<usize> {
        0..self.sinks
    }

    pub fn source_range(&self) -> std::ops::Range<usize> {
        self.sinks..self.n()
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    fn other_end(&self, k: usize, v: usize) -> usize {
        let a = self.arrows[k];
        if a.source == v {
            a.target
        } else {
            a.source
        }
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v].iter().map(move |&k| self.other_end(k, v))
    }

    /// Neighbors together with the color of the connecting arrow.
    pub fn colored_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.incident[v]
            .iter()
            .map(move |&k| (self.other_end(k, v), self.arrows[k].color))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    /// Sources with an arrow into sink `j`.
    pub fn sources_into(&self, j: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incident[j]
            .iter()
            .map(|&k| self.arrows[k])
            .filter(|a| a.target == j)
            .map(|a| a.source)
            .collect();
        out.sort_unstable();
        out
    }

    /// Sinks that source `i` maps to.
    pub fn targets_of(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incident[i]
            .iter()
            .map(|&k| self.arrows[k])
            .filter(|a| a.source == i)
            .map(|a| a.target)
            .collect();
        out.sort_unstable();
        out
    }

    /// Vertices of degree at most one.
    pub fn boundary(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.degree(v) <= 1).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.component_count() == 1
    }

    /// Whether the given vertices span a connected subgraph.
    pub fn is_connected_subset(&self, vertices: &[usize]) -> bool {
        let Some(&start) = vertices.first() else {
            return false;
        };
        let mut inside = vec![false; self.n()];
        for &v in vertices {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n()];
        self.flood(start, &mut seen, |w| inside[w]);
        vertices.iter().all(|&v| seen[v])
    }

    pub fn vertex_label(v: usize) -> String {
        format!("i{}", v + 1)
    }

    fn check_len(&self, d: &DimVec) -> Result<()> {
        if d.len() != self.n() {
            return domain(format!(
                "dimension vector of length {} on a quiver with {} vertices",
                d.len(),
                self.n()
            ));
        }
        Ok(())
    }

    /// Euler form `e(d1, d2)`.
    pub fn euler_form(&self, d1: &DimVec, d2: &DimVec) -> Result<i64> {
        self.check_len(d1)?;
        self.check_len(d2)?;
        let a = d1.entries();
        let b = d2.entries();
        let diag: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let off: i64 = self.arrows.iter().map(|r| a[r.source] * b[r.target]).sum();
        Ok(diag - off)
    }

    /// Skew-symmetrized Euler form `<d1, d2> = e(d1,d2) - e(d2,d1)`.
    pub fn dsz(&self, d1: &DimVec, d2: &DimVec) -> Result<i64> {
        self.check_len(d1)?;
        self.check_len(d2)?;
        Ok(self.bracket(d1.entries(), d2.entries()))
    }

    /// `<a, b>` on raw slices of length `n`.
    pub fn bracket(&self, a: &[i64], b: &[i64]) -> i64 {
        self.arrows
            .iter()
            .map(|r| b[r.source] * a[r.target] - a[r.source] * b[r.target])
            .sum()
    }

    /// Source mass over total mass.
    pub fn slope(&self, d: &DimVec) -> Result<Slope> {
        self.check_len(d)?;
        if !d.is_nonnegative() || d.is_zero() {
            return domain(format!("slope of {d} is undefined"));
        }
        let (a, b) = self.reduce(d);
        Slope::new(a, a + b)
    }

    /// Reduction `(source mass, sink mass)` to the Kronecker quiver.
    pub fn reduce(&self, d: &DimVec) -> (i64, i64) {
        let e = d.entries();
        let sink: i64 = e[..self.sinks].iter().sum();
        let source: i64 = e[self.sinks..].iter().sum();
        (source, sink)
    }

    /// The subquiver induced on `vertices`, relabeled minimally.
    ///
    /// The second component maps each new vertex to its old index.
    pub fn induced(&self, vertices: &[usize]) -> Result<(Quiver, Vec<usize>)> {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        vs.dedup();
        let sink_ids: Vec<u64> = vs
            .iter()
            .filter(|&&v| self.is_sink(v))
            .map(|&v| v as u64)
            .collect();
        let source_ids: Vec<u64> = vs
            .iter()
            .filter(|&&v| self.is_source(v))
            .map(|&v| v as u64)
            .collect();
        let arrows: Vec<_> = self
            .arrows
            .iter()
            .filter(|a| vs.binary_search(&a.source).is_ok() && vs.binary_search(&a.target).is_ok())
            .map(|a| (a.source as u64, a.target as u64, Some(a.color)))
            .collect();
        let (q, labels) = Quiver::from_ids(self.m, &sink_ids, &source_ids, &arrows)?;
        Ok((q, labels.into_iter().map(|x| x as usize).collect()))
    }

    /// Copy with every arrow reversed, so sources become sinks.
    pub fn reversed(&self) -> Result<(Quiver, Vec<usize>)> {
        let sink_ids: Vec<u64> = self.source_range().map(|v| v as u64).collect();
        let source_ids: Vec<u64> = self.sink_range().map(|v| v as u64).collect();
        let arrows: Vec<_> = self
            .arrows
            .iter()
            .map(|a| (a.target as u64, a.source as u64, Some(a.color)))
            .collect();
        let (q, labels) = Quiver::from_ids(self.m, &sink_ids, &source_ids, &arrows)?;
        Ok((q, labels.into_iter().map(|x| x as usize).collect()))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn q1() -> Quiver {
        Quiver::from_arrows(2, 2, 1, &[(2, 0), (2, 1)]).unwrap()
    }

    pub fn q2() -> Quiver {
        Quiver::from_arrows(2, 3, 2, &[(3, 0), (3, 1), (4, 1), (4, 2)]).unwrap()
    }

    pub fn q3() -> Quiver {
        Quiver::from_arrows(3, 4, 3, &[(4, 0), (4, 1), (5, 1), (5, 2), (6, 1), (6, 3)]).unwrap()
    }

    fn v(n: usize, pairs: &[(usize, i64)]) -> DimVec {
        DimVec::from_sparse(n, pairs)
    }

    #[test]
    fn euler_form_examples() {
        let q = q1();
        assert_eq!(
            q.euler_form(&v(3, &[(2, 1)]), &v(3, &[(0, 1)])).unwrap(),
            -1
        );
        assert_eq!(q.euler_form(&v(3, &[(0, 1)]), &v(3, &[(2, 1)])).unwrap(), 0);
        let d = v(3, &[(0, 1), (1, 1), (2, 1)]);
        assert_eq!(q.euler_form(&d, &d).unwrap(), 1);
        assert!(q.euler_form(&DimVec::zeros(2), &d).is_err());
    }

    #[test]
    fn dsz_examples() {
        let q = q1();
        assert_eq!(q.dsz(&v(3, &[(1, 1)]), &v(3, &[(2, 1)])).unwrap(), 1);
        assert_eq!(q.dsz(&v(3, &[(0, 1)]), &v(3, &[(1, 1)])).unwrap(), 0);
        let q = q3();
        let xi = v(7, &[(0, 1), (1, 1), (2, 1), (4, 1), (5, 1)]);
        let eta = v(7, &[(0, 1), (1, 2), (2, 1), (4, 1), (5, 1), (6, 1)]);
        assert_eq!(q.dsz(&xi, &eta).unwrap(), -1);
    }

    #[test]
    fn slope_and_reduce() {
        let q = q1();
        assert_eq!(
            q.slope(&v(3, &[(0, 1)])).unwrap(),
            Slope::new(0, 1).unwrap()
        );
        assert_eq!(
            q.slope(&v(3, &[(2, 1)])).unwrap(),
            Slope::new(1, 1).unwrap()
        );
        let all = v(3, &[(0, 1), (1, 1), (2, 1)]);
        assert_eq!(q.slope(&all).unwrap(), Slope::new(1, 3).unwrap());
        assert_eq!(q.reduce(&all), (1, 2));
        assert!(q.slope(&DimVec::zeros(3)).is_err());
        assert_eq!(
            q2().reduce(&v(5, &[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)])),
            (2, 3)
        );
        assert_eq!(q.reduce(&DimVec::zeros(3)), (0, 0));
    }

    #[test]
    fn index_of_reduction_bounds_index() {
        let q = q1();
        let d = v(3, &[(0, 2), (2, 2)]);
        assert_eq!(d.index().unwrap(), 2);
        let (a, b) = q.reduce(&d);
        assert_eq!(index(&[a, b]).unwrap(), 2);
    }

    #[test]
    fn relabeling_is_minimal() {
        // sources listed in the "wrong" order are reordered by lowest target
        let (q, labels) = Quiver::from_ids(
            2,
            &[10, 20, 30],
            &[5, 4],
            &[(5, 20, None), (5, 30, None), (4, 10, None), (4, 20, None)],
        )
        .unwrap();
        assert_eq!(labels, vec![10, 20, 30, 4, 5]);
        assert_eq!(q.targets_of(3), vec![0, 1]);
        assert_eq!(q.targets_of(4), vec![1, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Quiver::from_ids(2, &[1], &[2], &[(1, 2, None)]).is_err());
        assert!(Quiver::from_ids(1, &[1, 2], &[3], &[(3, 1, None), (3, 2, None)]).is_err());
        // a cycle i3 -> i1, i3 -> i2, i4 -> i1, i4 -> i2
        assert!(Quiver::from_ids(
            2,
            &[1, 2],
            &[3, 4],
            &[(3, 1, None), (3, 2, None), (4, 1, None), (4, 2, None)]
        )
        .is_err());
        assert!(Quiver::from_ids(2, &[1, 2], &[3], &[(3, 1, Some(0)), (3, 2, Some(0))]).is_err());
    }

    #[test]
    fn greedy_coloring_is_proper() {
        let q = q3();
        for v in 0..q.n() {
            let mut cs: Vec<u32> = q.colored_neighbors(v).map(|(_, c)| c).collect();
            let len = cs.len();
            cs.sort_unstable();
            cs.dedup();
            assert_eq!(cs.len(), len);
        }
    }

    #[test]
    fn m2_euler_form_is_positive() {
        let q = q2();
        let mut d = vec![0i64; 5];
        loop {
            let mut k = 0;
            while k < 5 && d[k] == 2 {
                d[k] = 0;
                k += 1;
            }
            if k == 5 {
                break;
            }
            d[k] += 1;
            let dv = DimVec::from_entries(d.clone());
            let e = q.euler_form(&dv, &dv).unwrap();
            assert!(e >= 1, "{dv}");
            if e == 1 {
                assert!(d.iter().all(|&x| x <= 1), "{dv}");
            }
        }
    }
}
