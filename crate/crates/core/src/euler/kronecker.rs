use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{framed_coefficients, to_euler, Route};

/// Sorting budget per class before the direct route gives way to the
/// factorization.
const DIRECT_STEPS: usize = 2_000_000;
use crate::algebra::Levels;
use crate::error::{domain, Error, Result};
use crate::quiver::{
    build_covering_fragment, enumerate_compatible_classes, DimVec, EquivClass, Quiver, RootKind,
};

/// Default bound on `a + b` for `kronecker_euler`; `KSCATTER_CAP` overrides it.
pub const DEFAULT_CAP: i64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Framing {
    /// Framing at the source of `K(m)`.
    B,
    /// Framing at the sink.
    F,
}

impl std::str::FromStr for Framing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(Framing::B),
            "F" | "f" => Ok(Framing::F),
            _ => Err(Error::Format(format!("framing must be B or F, got {s:?}"))),
        }
    }
}

impl fmt::Display for Framing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Framing::B => "B",
            Framing::F => "F",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerRow {
    /// Canonical form of the class.
    pub class: String,
    /// Representative on the fragment.
    pub representative: DimVec,
    /// Framing vertex on the fragment.
    pub vertex: usize,
    pub value: i64,
    pub running: i64,
    /// Route that produced the value.
    pub route: Route,
}

#[derive(Clone, Debug)]
pub struct EulerReport {
    pub m: u32,
    pub dbar: (i64, i64),
    pub framing: Framing,
    pub route: Route,
    pub fragment: Quiver,
    pub rows: Vec<EulerRow>,
    pub total: i64,
}

impl fmt::Display for EulerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# chi m={} dbar=({},{}) framing={} route={} fragment_vertices={}",
            self.m,
            self.dbar.0,
            self.dbar.1,
            self.framing,
            self.route,
            self.fragment.n()
        )?;
        writeln!(
            f,
            "class\trepresentative\tvertex\tcoefficient\trunning\troute"
        )?;
        for r in &self.rows {
            let rep: Vec<String> = r
                .representative
                .entries()
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(v, &c)| {
                    if c == 1 {
                        Quiver::vertex_label(v)
                    } else {
                        format!("{c}{}", Quiver::vertex_label(v))
                    }
                })
                .collect();
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.class,
                rep.join("+"),
                Quiver::vertex_label(r.vertex),
                r.value,
                r.running,
                r.route
            )?;
        }
        writeln!(f, "total\t{}", self.total)
    }
}

fn size_cap() -> i64 {
    std::env::var("KSCATTER_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// `supp(d)` together with every neighbor of a source in the support.
///
/// Sources on the rim of the fragment get fresh sinks for their missing
/// colors, so every source has valency `m`. The map sends each local vertex
/// to its fragment index; added sinks map to indices `>= q.n()`.
pub fn local_quiver(q: &Quiver, d: &DimVec) -> Result<(Quiver, DimVec, Vec<usize>)> {
    let supp = d.support();
    let mut sinks: Vec<u64> = Vec::new();
    let mut sources: Vec<u64> = Vec::new();
    let mut arrows: Vec<(u64, u64, Option<u32>)> = Vec::new();
    let mut fresh = q.n() as u64;
    for &v in &supp {
        if q.is_sink(v) {
            sinks.push(v as u64);
            continue;
        }
        sources.push(v as u64);
        let mut seen = vec![false; q.m() as usize];
        for (j, c) in q.colored_neighbors(v) {
            seen[c as usize] = true;
            arrows.push((v as u64, j as u64, Some(c)));
            if !sinks.contains(&(j as u64)) {
                sinks.push(j as u64);
            }
        }
        for (c, _) in seen.iter().enumerate().filter(|(_, &s)| !s) {
            sinks.push(fresh);
            arrows.push((v as u64, fresh, Some(c as u32)));
            fresh += 1;
        }
    }
    sinks.sort_unstable();
    sinks.dedup();
    let (local, labels) = Quiver::from_ids(q.m(), &sinks, &sources, &arrows)?;
    let map: Vec<usize> = labels.into_iter().map(|x| x as usize).collect();
    let dl = DimVec::from_entries(
        map.iter()
            .map(|&v| if v < q.n() { d.get(v) } else { 0 })
            .collect(),
    );
    Ok((local, dl, map))
}

/// `chi(M^{s,B}_{K(m)}(a,b))` by the direct route.
pub fn kronecker_euler(m: u32, dbar: (i64, i64), framing: Framing) -> Result<i64> {
    Ok(kronecker_euler_with(m, dbar, framing, Route::Direct)?.total)
}

/// One framed coefficient of a class.
#[derive(Clone, Debug)]
pub struct KroneckerTerm {
    pub class: EquivClass,
    /// Framing vertex on the fragment.
    pub vertex: usize,
    pub coefficient: BigRational,
    /// `Factor` when the direct route ran out of sorting steps.
    pub route: Route,
}

/// Raw framed coefficients on a covering fragment: one entry per class and
/// framing source in the support, with the fragment used.
pub fn kronecker_terms(
    m: u32,
    dbar: (i64, i64),
    framing: Framing,
    route: Route,
) -> Result<(Quiver, Vec<KroneckerTerm>)> {
    let (a, b) = dbar;
    if m < 2 {
        return domain("kronecker_euler needs m >= 2");
    }
    if a < 0 || b < 0 || a + b == 0 {
        return domain(format!("dbar {dbar:?} must be non-negative and nonzero"));
    }
    let cap = size_cap();
    if a + b > cap {
        return Err(Error::Cap(format!(
            "|dbar| = {} exceeds the cap {cap}; raise KSCATTER_CAP to allow it",
            a + b
        )));
    }
    // framing at the sink is framing at the source of the reversed quiver
    let work = match framing {
        Framing::B => (a, b),
        Framing::F => (b, a),
    };
    let depth = (a + b + 1)
        .to_u32()
        .ok_or(Error::Overflow("fragment depth"))?;
    let q = match framing {
        Framing::B => build_covering_fragment(m, depth, RootKind::Source)?,
        Framing::F => {
            build_covering_fragment(m, depth, RootKind::Sink)?
                .reversed()?
                .0
        }
    };
    let mut terms = Vec::new();
    if work.0 == 0 {
        return Ok((q, terms));
    }
    for class in enumerate_compatible_classes(&q, work)? {
        let (local, dl, map) = local_quiver(&q, &class.representative)?;
        let levels = Levels::new(dl.entries().iter().map(|&x| x as u32).collect())?;
        let sources: Vec<usize> = local.source_range().filter(|&p| dl.get(p) > 0).collect();
        let (used, values) =
            match framed_coefficients(&local, &levels, &sources, &dl, route, DIRECT_STEPS) {
                Err(Error::Cap(_)) if route == Route::Direct => (
                    Route::Factor,
                    framed_coefficients(
                        &local,
                        &levels,
                        &sources,
                        &dl,
                        Route::Factor,
                        DIRECT_STEPS,
                    )?,
                ),
                v => (route, v?),
            };
        for (p, coefficient) in sources.into_iter().zip(values) {
            terms.push(KroneckerTerm {
                class: class.clone(),
                vertex: map[p],
                coefficient,
                route: used,
            });
        }
    }
    Ok((q, terms))
}

/// Sum over classes of dimension vectors on a covering fragment and over
/// framing sources in the support; every term must be a non-negative integer.
pub fn kronecker_euler_with(
    m: u32,
    dbar: (i64, i64),
    framing: Framing,
    route: Route,
) -> Result<EulerReport> {
    let (q, terms) = kronecker_terms(m, dbar, framing, route)?;
    let mut rows = Vec::new();
    let mut total = 0i64;
    for t in terms {
        let value = to_euler(
            &t.coefficient,
            format_args!(
                "{} framed at {}",
                t.class.canonical,
                Quiver::vertex_label(t.vertex)
            ),
        )?;
        total += value;
        rows.push(EulerRow {
            class: t.class.canonical,
            representative: t.class.representative,
            vertex: t.vertex,
            value,
            running: total,
            route: t.route,
        });
    }
    Ok(EulerReport {
        m,
        dbar,
        framing,
        route,
        fragment: q,
        rows,
        total,
    })
}
