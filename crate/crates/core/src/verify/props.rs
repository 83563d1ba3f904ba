use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::oracle::{brute_force_product, products_agree};
use crate::algebra::{factor_initial, rat, Cap, ElemAuto, Levels, TruncSeries};
use crate::error::Result;
use crate::euler::{framed_coefficient, Route};
use crate::quiver::{build_covering_fragment, DimVec, Quiver, RootKind};
use crate::sorting::SortingDiagram;
use crate::tropical::curve_skeleton;

/// Cases run and failures seen for one property.
#[derive(Clone, Debug)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first: Option<String>,
}

impl PropertyOutcome {
    fn new(name: &'static str) -> Self {
        PropertyOutcome {
            name,
            cases: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

impl fmt::Display for PropertyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}",
            self.name,
            self.cases - self.failures,
            self.cases
        )?;
        if let Some(w) = &self.first {
            write!(f, " (first failure: {w})")?;
        }
        Ok(())
    }
}

fn random_fragment(rng: &mut ChaCha8Rng) -> Result<Quiver> {
    let m = rng.gen_range(2..=3);
    let depth = rng.gen_range(2..=3);
    let root = if rng.gen_bool(0.5) {
        RootKind::Sink
    } else {
        RootKind::Source
    };
    build_covering_fragment(m, depth, root)
}

/// `T_j T_i = T_i T_{i+j} T_j` for a random arrow `i -> j`, where
/// `<j, i> = 1`.
pub fn pentagon_check(rng: &mut ChaCha8Rng, cases: usize) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("pentagon");
    let cap = Cap::degree(6);
    for _ in 0..cases {
        let q = random_fragment(rng)?;
        let a = q.arrows()[rng.gen_range(0..q.arrows().len())];
        let n = q.n();
        let sink = DimVec::unit(n, a.target);
        let source = DimVec::unit(n, a.source);
        let ok = q.dsz(&sink, &source)? == 1 && {
            let lhs = [
                ElemAuto::naive(sink.clone())?,
                ElemAuto::naive(source.clone())?,
            ];
            let rhs = [
                ElemAuto::naive(source.clone())?,
                ElemAuto::naive(sink.add(&source))?,
                ElemAuto::naive(sink.clone())?,
            ];
            products_agree(&q, &lhs, &rhs, &cap)?
        };
        out.record(ok, || {
            format!(
                "{} -> {} on a {}-vertex fragment",
                Quiver::vertex_label(a.source),
                Quiver::vertex_label(a.target),
                n
            )
        });
    }
    Ok(out)
}

/// `<a, b> = -<b, a>` on random integer vectors.
pub fn antisymmetry_check(rng: &mut ChaCha8Rng, cases: usize) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("dsz antisymmetry");
    for _ in 0..cases {
        let q = random_fragment(rng)?;
        let a: Vec<i64> = (0..q.n()).map(|_| rng.gen_range(-3..=3)).collect();
        let b: Vec<i64> = (0..q.n()).map(|_| rng.gen_range(-3..=3)).collect();
        let ok = q.bracket(&a, &b) == -q.bracket(&b, &a) && q.bracket(&a, &a) == 0;
        out.record(ok, || format!("{a:?} {b:?}"));
    }
    Ok(out)
}

/// Balancing at every vertex of the curve of every operator.
pub fn balancing_sweep(diagrams: &[SortingDiagram]) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("balancing");
    for d in diagrams {
        for &id in d.seq() {
            let h = curve_skeleton(d, id)?;
            out.record(h.is_balanced(), || format!("{}", d.node(id).op));
        }
    }
    Ok(out)
}

/// `Legs(sigma) = Legs(sigma1) + Legs(sigma2)` (disjoint) at every commutator.
pub fn legs_partition_sweep(diagrams: &[SortingDiagram]) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("legs partition");
    for d in diagrams {
        for (id, _) in d.nodes().iter().enumerate() {
            let Some((p1, p2)) = d.parents(id) else {
                continue;
            };
            let f = curve_skeleton(d, id)?.family();
            let f1 = curve_skeleton(d, p1)?.family();
            let f2 = curve_skeleton(d, p2)?.family();
            let disjoint = f1
                .iter()
                .all(|&(v, m)| f2.iter().all(|&(w, n)| v != w || m & n == 0));
            let mut union = f1;
            union.extend(f2);
            union.sort_unstable();
            out.record(disjoint && union == f, || format!("{}", d.node(id).op));
        }
    }
    Ok(out)
}

/// The coefficient of `(t x)^d` does not move from `k = max d` to `k + 1`.
pub fn truncation_check(rng: &mut ChaCha8Rng, cases: usize) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("truncation monotonicity");
    let q = build_covering_fragment(2, 4, RootKind::Source)?;
    let n = q.n();
    for _ in 0..cases {
        // connected window of the zigzag with a source inside
        let lo = rng.gen_range(0..n - 2);
        let len = rng.gen_range(3..=(n - lo).min(5));
        let mut entries = vec![0i64; n];
        let line = line_order(&q);
        for &v in &line[lo..lo + len] {
            entries[v] = rng.gen_range(1..=2);
        }
        let d = DimVec::from_entries(entries);
        let Some(p) = d.support().into_iter().find(|&v| q.is_source(v)) else {
            continue;
        };
        let k = *d.entries().iter().max().unwrap_or(&1) as u32;
        let a = framed_coefficient(&q, &Levels::uniform(n, k)?, p, &d, Route::Direct)?;
        let b = framed_coefficient(&q, &Levels::uniform(n, k + 1)?, p, &d, Route::Direct)?;
        out.record(a == b, || {
            format!("{d} at {}: {a} vs {b}", Quiver::vertex_label(p))
        });
    }
    Ok(out)
}

/// Vertices of a path quiver from one end to the other.
fn line_order(q: &Quiver) -> Vec<usize> {
    let start = (0..q.n()).find(|&v| q.degree(v) <= 1).unwrap_or(0);
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(next) = q.neighbors(cur).find(|&w| w != prev) {
        order.push(next);
        prev = cur;
        cur = next;
    }
    order
}

/// `T_q = prod_J T_{q,J}` for `k` levels, on every vertex of a small fragment.
pub fn factorization_check(max_k: u32) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("initial factorization");
    let q = build_covering_fragment(2, 2, RootKind::Source)?;
    let n = q.n();
    for k in 1..=max_k {
        let levels = Levels::uniform(n, k)?;
        for v in 0..n {
            let ops = factor_initial(v, &levels)?;
            let got = brute_force_product(&q, &ops, &Cap::none())?;
            // x_p -> x_p (1 + sum_j u_vj x_v)^<v, p>
            let mut base = TruncSeries::one(n, Cap::none());
            for j in 1..=k {
                base = base.add(&TruncSeries::monomial(
                    n,
                    Cap::none(),
                    DimVec::unit(n, v).entries(),
                    levels.var(v, j)?,
                    rat(1),
                ))?;
            }
            let ok = (0..n).all(|p| {
                let e = q.bracket(DimVec::unit(n, v).entries(), DimVec::unit(n, p).entries());
                base.pow(e).map(|s| s == got.ratios[p]).unwrap_or(false)
            });
            out.record(ok, || {
                format!("vertex {} at k={k}", Quiver::vertex_label(v))
            });
        }
    }
    Ok(out)
}
