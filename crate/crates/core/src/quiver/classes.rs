use std::collections::BTreeMap;

use super::{DimVec, Quiver};
use crate::error::{domain, Result};

/// One orbit of dimension vectors under color-preserving tree isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivClass {
    pub representative: DimVec,
    /// Minimal serialization of the weighted colored tree over all roots.
    pub canonical: String,
}

/// Dimension vectors with connected support and reduction `dbar`, one per class.
///
/// Classes are ordered by canonical form, so the output is deterministic.
pub fn enumerate_compatible_classes(q: &Quiver, dbar: (i64, i64)) -> Result<Vec<EquivClass>> {
    let (a, b) = dbar;
    if a < 0 || b < 0 || a + b == 0 {
        return domain(format!("dbar {dbar:?} must be non-negative and nonzero"));
    }
    let mut found: BTreeMap<String, DimVec> = BTreeMap::new();
    for subset in connected_subsets(q, a as usize, b as usize) {
        let srcs: Vec<usize> = subset.iter().copied().filter(|&v| q.is_source(v)).collect();
        let snks: Vec<usize> = subset.iter().copied().filter(|&v| q.is_sink(v)).collect();
        if (srcs.is_empty() && a > 0) || (snks.is_empty() && b > 0) {
            continue;
        }
        for ws in compositions(a, srcs.len()) {
            for wt in compositions(b, snks.len()) {
                let mut d = DimVec::zeros(q.n());
                for (&v, &w) in srcs.iter().zip(&ws) {
                    d.set(v, w);
                }
                for (&v, &w) in snks.iter().zip(&wt) {
                    d.set(v, w);
                }
                let key = canonical_form(q, &d);
                found.entry(key).or_insert(d);
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|(canonical, representative)| EquivClass {
            representative,
            canonical,
        })
        .collect())
}

/// Connected vertex subsets with at most `max_src` sources and `max_snk` sinks.
pub(crate) fn connected_subsets(q: &Quiver, max_src: usize, max_snk: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for root in 0..q.n() {
        let fits = |v: usize, src: usize, snk: usize| {
            if q.is_source(v) {
                src < max_src
            } else {
                snk < max_snk
            }
        };
        if !fits(root, 0, 0) {
            continue;
        }
        let ext: Vec<usize> = q.neighbors(root).filter(|&u| u > root).collect();
        let (s0, k0) = if q.is_source(root) { (1, 0) } else { (0, 1) };
        grow(q, root, vec![root], ext, s0, k0, &fits, &mut out);
    }
    out
}

/// Connected subsets containing `root` with at most `max_size` vertices.
fn subsets_through(q: &Quiver, root: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut seen: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    let mut layer = vec![vec![root]];
    seen.insert(vec![root]);
    while let Some(next) = (!layer.is_empty()).then(|| {
        let mut next = Vec::new();
        for sub in &layer {
            if sub.len() >= max_size {
                continue;
            }
            for &v in sub {
                for w in q.neighbors(v) {
                    if sub.binary_search(&w).is_ok() {
                        continue;
                    }
                    let mut grown = sub.clone();
                    let at = grown.binary_search(&w).unwrap_err();
                    grown.insert(at, w);
                    if seen.insert(grown.clone()) {
                        next.push(grown);
                    }
                }
            }
        }
        next
    }) {
        layer = next;
    }
    seen.into_iter().collect()
}

/// Vertex of minimal eccentricity.
fn center(q: &Quiver) -> usize {
    let ecc = |r: usize| {
        let mut dist = vec![usize::MAX; q.n()];
        dist[r] = 0;
        let mut queue = std::collections::VecDeque::from([r]);
        let mut far = 0;
        while let Some(v) = queue.pop_front() {
            far = far.max(dist[v]);
            for w in q.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        far
    };
    (0..q.n()).min_by_key(|&r| (ecc(r), r)).unwrap_or(0)
}

#[allow(clippy::too_many_arguments)]
fn grow(
    q: &Quiver,
    root: usize,
    sub: Vec<usize>,
    mut ext: Vec<usize>,
    src: usize,
    snk: usize,
    fits: &impl Fn(usize, usize, usize) -> bool,
    out: &mut Vec<Vec<usize>>,
) {
    let mut sorted = sub.clone();
    sorted.sort_unstable();
    out.push(sorted);
    while let Some(w) = ext.pop() {
        if !fits(w, src, snk) {
            continue;
        }
        let mut next_ext = ext.clone();
        for u in q.neighbors(w) {
            let excluded = u <= root
                || sub.contains(&u)
                || ext.contains(&u)
                || sub.iter().any(|&s| q.neighbors(s).any(|x| x == u));
            if !excluded {
                next_ext.push(u);
            }
        }
        let mut next = sub.clone();
        next.push(w);
        let (s1, k1) = if q.is_source(w) {
            (src + 1, snk)
        } else {
            (src, snk + 1)
        };
        grow(q, root, next, next_ext, s1, k1, fits, out);
    }
}

/// Compositions of `total` into `parts` positive integers.
pub(crate) fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if total < parts as i64 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts);
    fn rec(left: i64, parts: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 1..=left - (parts as i64 - 1) {
            cur.push(first);
            rec(left - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    rec(total, parts, &mut cur, &mut out);
    out
}

/// Canonical string of the support of `d` as a vertex-weighted, arrow-colored tree.
pub fn canonical_form(q: &Quiver, d: &DimVec) -> String {
    let support = d.support();
    support
        .iter()
        .map(|&r| serialize(q, d, r, None))
        .min()
        .unwrap_or_default()
}

fn serialize(q: &Quiver, d: &DimVec, v: usize, parent: Option<usize>) -> String {
    let mut kids: Vec<(u32, String)> = q
        .colored_neighbors(v)
        .filter(|&(w, _)| Some(w) != parent && d.get(w) != 0)
        .map(|(w, c)| (c, serialize(q, d, w, Some(v))))
        .collect();
    kids.sort();
    let mut s = format!("{}{}", if q.is_source(v) { 'S' } else { 'K' }, d.get(v));
    s.push('(');
    for (c, sub) in kids {
        s.push_str(&format!("{c}:{sub}"));
    }
    s.push(')');
    s
}

/// Canonical string of an unweighted, uncolored tree quiver.
pub fn shape_form(q: &Quiver) -> String {
    (0..q.n())
        .map(|r| shape(q, r, None))
        .min()
        .unwrap_or_default()
}

fn shape(q: &Quiver, v: usize, parent: Option<usize>) -> String {
    let mut kids: Vec<String> = q
        .neighbors(v)
        .filter(|&w| Some(w) != parent)
        .map(|w| shape(q, w, Some(v)))
        .collect();
    kids.sort();
    format!(
        "{}({})",
        if q.is_source(v) { 'S' } else { 'K' },
        kids.concat()
    )
}

/// Connected subquivers of `K~(m)` with `2..=max_vertices` vertices, one per
/// isomorphism class of oriented tree.
pub fn small_fragments(m: u32, max_vertices: usize) -> Result<Vec<Quiver>> {
    let depth = max_vertices as u32;
    let mut found: BTreeMap<String, Quiver> = BTreeMap::new();
    for root in [super::RootKind::Source, super::RootKind::Sink] {
        let ball = super::build_covering_fragment(m, depth, root)?;
        for sub in subsets_through(&ball, center(&ball), max_vertices) {
            if sub.len() < 2 {
                continue;
            }
            let (q, _) = ball.induced(&sub)?;
            found.entry(shape_form(&q)).or_insert(q);
        }
    }
    Ok(found.into_values().collect())
}
