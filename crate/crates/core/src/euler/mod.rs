//! Framed Euler characteristics from slope blocks: the sink-tree vectors
//! `epsilon(i)`, theta series by direct composition or from tropical counts,
//! and the summation to Kronecker quivers.

mod closed;
mod factor;
mod kronecker;

pub use closed::{closed_form_k2, K2Kind};
pub use factor::{slope_factors, SlopeFactors};
pub use kronecker::{
    kronecker_euler, kronecker_euler_with, kronecker_terms, local_quiver, EulerReport, EulerRow,
    Framing, KroneckerTerm,
};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::oracle::nil_product_for;
use crate::algebra::{rat, Cap, Levels, NilMonomial, TruncSeries};
use crate::error::{domain, Error, Result};
use crate::quiver::{DimVec, Quiver, Slope};
use crate::sorting::{SortOptions, SortingDiagram};
use crate::tropical::{CurveCatalog, WeightVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    /// Exact composition of the slope block.
    Direct,
    /// The log formula over tropical counts.
    Counts,
    /// Slope factorization of the plain product with exponents capped by `d`.
    Factor,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Direct => "direct",
            Route::Counts => "counts",
            Route::Factor => "factor",
        })
    }
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Route::Direct),
            "counts" => Ok(Route::Counts),
            "factor" => Ok(Route::Factor),
            _ => Err(Error::Format(format!(
                "route must be direct, counts or factor, got {s:?}"
            ))),
        }
    }
}

/// `theta_{Q,mu,i}` in the variables `t x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSeries {
    pub source: usize,
    pub slope: Slope,
    pub series: TruncSeries,
    pub route: Route,
}

/// `epsilon(i) = i^11 - (i^21 + ...) + ...` as a signed vector over the sinks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonVector {
    pub source: usize,
    pub vector: Vec<i64>,
    /// `d(i, boundary)`.
    pub distance: usize,
    /// The sink `i^11` used at the first step.
    pub head: usize,
}

impl EpsilonVector {
    /// `<epsilon(i), w>`.
    pub fn pair(&self, q: &Quiver, w: &[i64]) -> i64 {
        q.bracket(&self.vector, w)
    }
}

impl fmt::Display for EpsilonVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in self.vector.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = if c.abs() == 1 {
                String::new()
            } else {
                c.abs().to_string()
            };
            write!(f, "{sign}{mag}{}", Quiver::vertex_label(v))?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Sources of valency one.
pub fn boundary_sources(q: &Quiver) -> Vec<usize> {
    q.source_range().filter(|&v| q.degree(v) == 1).collect()
}

/// `d(i, boundary)` for every source, from the sets `X_n`.
pub fn source_distances(q: &Quiver) -> Result<Vec<Option<usize>>> {
    if let Some(&b) = boundary_sources(q).first() {
        return domain(format!(
            "{} is a boundary source; enlarge the fragment so that only sinks lie on the boundary",
            Quiver::vertex_label(b)
        ));
    }
    let mut dist: Vec<Option<usize>> = vec![None; q.n()];
    for i in q.source_range() {
        if q.targets_of(i).iter().any(|&j| q.degree(j) == 1) {
            dist[i] = Some(1);
        }
    }
    for n in 2..=q.num_sources().max(1) {
        let prev = dist.clone();
        for i in q.source_range() {
            if dist[i].is_some() {
                continue;
            }
            let reached = q.targets_of(i).iter().any(|&j| {
                q.sources_into(j)
                    .iter()
                    .all(|&o| o == i || prev[o].is_some_and(|x| x < n))
            });
            if reached {
                dist[i] = Some(n);
            }
        }
    }
    if let Some(i) = q.source_range().find(|&i| dist[i].is_none()) {
        return Err(Error::Consistency(format!(
            "{} is not reached by the sink-tree recursion",
            Quiver::vertex_label(i)
        )));
    }
    Ok(dist)
}

/// The signed sink vector `epsilon(i)` of a source.
pub fn epsilon(q: &Quiver, i: usize) -> Result<EpsilonVector> {
    if !q.is_source(i) {
        return domain(format!("{} is not a source", Quiver::vertex_label(i)));
    }
    let dist = source_distances(q)?;
    let mut memo = BTreeMap::new();
    epsilon_rec(q, i, &dist, &mut memo)
}

fn epsilon_rec(
    q: &Quiver,
    i: usize,
    dist: &[Option<usize>],
    memo: &mut BTreeMap<usize, EpsilonVector>,
) -> Result<EpsilonVector> {
    if let Some(e) = memo.get(&i) {
        return Ok(e.clone());
    }
    let di = dist[i].ok_or_else(|| Error::Consistency("missing distance".into()))?;
    let mut targets = q.targets_of(i);
    targets.sort_unstable();
    let head = targets
        .iter()
        .copied()
        .find(|&j| {
            if di == 1 {
                q.degree(j) == 1
            } else {
                q.sources_into(j)
                    .iter()
                    .all(|&o| o == i || dist[o].is_some_and(|x| x < di))
            }
        })
        .ok_or_else(|| {
            Error::Consistency(format!("no head sink for {}", Quiver::vertex_label(i)))
        })?;
    let mut vector = vec![0i64; q.n()];
    vector[head] = 1;
    for o in q.sources_into(head) {
        if o == i {
            continue;
        }
        let e = epsilon_rec(q, o, dist, memo)?;
        for (v, c) in vector.iter_mut().zip(&e.vector) {
            *v -= c;
        }
    }
    let out = EpsilonVector {
        source: i,
        vector,
        distance: di,
        head,
    };
    memo.insert(i, out.clone());
    Ok(out)
}

fn factorial(n: i64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Stable nilpotent diagram on a level layout, pruned above `cap`.
pub fn stable_with_levels(
    q: &Quiver,
    levels: &Levels,
    cap: Option<DimVec>,
) -> Result<SortingDiagram> {
    stable_within(q, levels, cap, 200_000_000)
}

fn stable_within(
    q: &Quiver,
    levels: &Levels,
    cap: Option<DimVec>,
    max_steps: usize,
) -> Result<SortingDiagram> {
    let mut d = SortingDiagram::new(
        q,
        Some(levels.clone()),
        SortOptions {
            exponent_cap: cap,
            max_steps: Some(max_steps),
            ..Default::default()
        },
    )?;
    d.stabilize()?;
    Ok(d)
}

fn t_cap(levels: &Levels, cap: Option<&DimVec>) -> Cap {
    let mut e: Vec<i64> = levels.caps().iter().map(|&c| c as i64).collect();
    if let Some(c) = cap {
        for (x, &y) in e.iter_mut().zip(c.entries()) {
            *x = (*x).min(y);
        }
    }
    Cap::exponent(e)
}

/// `theta_mu(x_p) / x_p` for each listed vertex, rewritten in `t x`.
///
/// The coefficient of `(t x)^e` is read from `u_I` with `I` the first `e_q`
/// levels at every vertex, divided by `prod e_q!`.
pub fn block_ratios(
    d: &SortingDiagram,
    mu: Slope,
    gens: &[usize],
    cap: Option<&DimVec>,
) -> Result<BTreeMap<usize, TruncSeries>> {
    let q = d.quiver();
    let levels = d
        .levels()
        .ok_or_else(|| Error::Domain("block ratios need a nilpotent diagram".into()))?;
    let ops: Vec<_> = d
        .slope_block(mu)
        .iter()
        .map(|&i| d.node(i).op.clone())
        .collect();
    let images = nil_product_for(q, &ops, levels, gens)?;
    let tc = t_cap(levels, cap);
    let mut out = BTreeMap::new();
    for &p in gens {
        let mut s = TruncSeries::zero(q.n(), tc.clone());
        for (&bits, &c) in &images.ratios[p] {
            let rows = levels.row_counts(NilMonomial(bits));
            if levels.initial_pattern(&rows) != Some(NilMonomial(bits)) || !tc.admits(&rows) {
                continue;
            }
            let den: BigInt = rows.iter().map(|&r| factorial(r)).product();
            s.add_term(
                rows.into(),
                NilMonomial::EMPTY,
                BigRational::new(BigInt::from(c), den),
            );
        }
        out.insert(p, s);
    }
    Ok(out)
}

/// `theta_{Q,mu}(x_j) / x_j` for every sink, by composing the slope block of
/// the stable diagram with `k` levels.
pub fn theta_direct(q: &Quiver, k: u32, mu: Slope) -> Result<BTreeMap<usize, TruncSeries>> {
    let levels = Levels::uniform(q.n(), k)?;
    let d = stable_with_levels(q, &levels, None)?;
    let sinks: Vec<usize> = q.sink_range().collect();
    block_ratios(&d, mu, &sinks, None)
}

/// `prod_j F_j^{-epsilon(i)_j}`.
pub fn theta_from_ratios(
    q: &Quiver,
    eps: &EpsilonVector,
    ratios: &BTreeMap<usize, TruncSeries>,
    cap: Cap,
) -> Result<TruncSeries> {
    let mut out = TruncSeries::one(q.n(), cap);
    for (j, &c) in eps.vector.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let f = ratios.get(&j).ok_or_else(|| {
            Error::Consistency(format!("missing ratio at {}", Quiver::vertex_label(j)))
        })?;
        out = out.mul(&f.pow(-c)?)?;
    }
    Ok(out)
}

/// `theta_{Q,mu,i}` by direct composition.
pub fn theta_series_direct(q: &Quiver, k: u32, mu: Slope, i: usize) -> Result<ThetaSeries> {
    let eps = epsilon(q, i)?;
    let ratios = theta_direct(q, k, mu)?;
    let cap = Cap::exponent(vec![k as i64; q.n()]);
    Ok(ThetaSeries {
        source: i,
        slope: mu,
        series: theta_from_ratios(q, &eps, &ratios, cap)?,
        route: Route::Direct,
    })
}

/// `sum_w <v, w> R_w / |Aut(w)| N(w) (t x)^w` over the shapes present in the
/// catalog; `v` is paired on the left.
pub fn log_from_counts(
    q: &Quiver,
    catalog: &CurveCatalog,
    v: &[i64],
    cap: Cap,
) -> Result<TruncSeries> {
    let mut out = TruncSeries::zero(q.n(), cap.clone());
    let mut shapes: Vec<WeightVector> = catalog.by_shape(q.n())?.into_keys().collect();
    shapes.sort();
    for w in shapes {
        let e = w.d_out();
        if !cap.admits(e.entries()) {
            continue;
        }
        let pair = q.bracket(v, e.entries());
        if pair == 0 {
            continue;
        }
        let n = catalog.count(&w);
        if n.is_zero() {
            continue;
        }
        out.add_term(
            e.entries().into(),
            NilMonomial::EMPTY,
            rat(pair) * w.weight_factor() * n,
        );
    }
    Ok(out)
}

/// `log f_p` per vertex from the tropical counts; `f_p = theta_mu(x_p)/x_p`.
pub fn log_ratio_from_counts(
    q: &Quiver,
    catalog: &CurveCatalog,
    p: usize,
    cap: Cap,
) -> Result<TruncSeries> {
    let mut unit = vec![0i64; q.n()];
    unit[p] = 1;
    // <w, i_p> = -<i_p, w>
    Ok(log_from_counts(q, catalog, &unit, cap)?.scale(&rat(-1)))
}

/// `theta_{Q,mu,i}` from `log theta = sum <epsilon(i), w> R_w/|Aut(w)| N(w) (t x)^w`.
pub fn theta_from_counts(q: &Quiver, k: u32, mu: Slope, i: usize) -> Result<ThetaSeries> {
    let eps = epsilon(q, i)?;
    let d = crate::tropical::stable_diagram(q, k, None)?;
    let catalog = CurveCatalog::new(&d, mu)?;
    let cap = Cap::exponent(vec![k as i64; q.n()]);
    let log = log_from_counts(q, &catalog, &eps.vector, cap)?;
    Ok(ThetaSeries {
        source: i,
        slope: mu,
        series: log.exp()?,
        route: Route::Counts,
    })
}

fn to_euler(c: &BigRational, what: impl fmt::Display) -> Result<i64> {
    if !c.denom().is_one() {
        return Err(Error::Consistency(format!(
            "non-integral coefficient {c} for {what}"
        )));
    }
    let v = c
        .numer()
        .to_i64()
        .ok_or(Error::Overflow("euler characteristic"))?;
    if v.is_negative() {
        return Err(Error::Consistency(format!(
            "negative Euler characteristic {v} for {what}"
        )));
    }
    Ok(v)
}

/// Coefficient of `(t x)^d` in `theta_{Q,mu(d),i}` on a level layout that
/// covers `d`, by either route.
pub fn framed_coefficient(
    q: &Quiver,
    levels: &Levels,
    i: usize,
    d: &DimVec,
    route: Route,
) -> Result<BigRational> {
    framed_coefficient_within(q, levels, i, d, route, 200_000_000)
}

/// As [`framed_coefficient`], sorting at most `max_steps` steps.
pub fn framed_coefficient_within(
    q: &Quiver,
    levels: &Levels,
    i: usize,
    d: &DimVec,
    route: Route,
    max_steps: usize,
) -> Result<BigRational> {
    Ok(framed_coefficients(q, levels, &[i], d, route, max_steps)?.remove(0))
}

/// Coefficients of `x^d` for several framing sources, sharing one stable
/// diagram or one factorization.
pub fn framed_coefficients(
    q: &Quiver,
    levels: &Levels,
    sources: &[usize],
    d: &DimVec,
    route: Route,
    max_steps: usize,
) -> Result<Vec<BigRational>> {
    if d.len() != q.n() || !d.is_nonnegative() || d.is_zero() {
        return domain(format!("bad dimension vector {d}"));
    }
    if d.entries()
        .iter()
        .zip(levels.caps())
        .any(|(&x, &c)| x > c as i64)
    {
        return domain(format!("levels {:?} do not cover {d}", levels.caps()));
    }
    let eps: Vec<EpsilonVector> = sources
        .iter()
        .map(|&i| epsilon(q, i))
        .collect::<Result<_>>()?;
    let live: Vec<bool> = sources.iter().map(|&i| d.get(i) > 0).collect();
    if !q.is_connected_subset(&d.support()) || !live.contains(&true) {
        return Ok(vec![BigRational::zero(); sources.len()]);
    }
    let mu = q.slope(d)?;
    let cap = t_cap(levels, Some(d));
    let gens: Vec<usize> = (0..q.n())
        .filter(|&j| eps.iter().zip(&live).any(|(e, &l)| l && e.vector[j] != 0))
        .collect();
    let ratios = match route {
        Route::Direct => {
            let dia = stable_within(q, levels, Some(d.clone()), max_steps)?;
            Some(block_ratios(&dia, mu, &gens, Some(d))?)
        }
        Route::Factor => Some(slope_factors(q, d)?.block_ratios(q, mu, &gens)?),
        Route::Counts => None,
    };
    let catalog = match route {
        Route::Counts => {
            let dia = stable_within(q, levels, Some(d.clone()), max_steps)?;
            Some(CurveCatalog::new(&dia, mu)?)
        }
        _ => None,
    };
    let mut out = Vec::with_capacity(sources.len());
    for (e, &l) in eps.iter().zip(&live) {
        if !l {
            out.push(BigRational::zero());
            continue;
        }
        let series = match (&ratios, &catalog) {
            (Some(r), _) => theta_from_ratios(q, e, r, cap.clone())?,
            (None, Some(c)) => log_from_counts(q, c, &e.vector, cap.clone())?.exp()?,
            (None, None) => unreachable!(),
        };
        out.push(series.coefficient(d.entries(), NilMonomial::EMPTY));
    }
    Ok(out)
}

/// `chi(M^{s,i}_Q(d))` with `k` levels at every vertex.
pub fn euler_char_framed(q: &Quiver, k: u32, i: usize, d: &DimVec) -> Result<i64> {
    if d.entries().iter().any(|&x| x > k as i64) {
        return domain(format!("k = {k} does not cover {d}"));
    }
    let levels = Levels::uniform(q.n(), k)?;
    let c = framed_coefficient(q, &levels, i, d, Route::Direct)?;
    to_euler(
        &c,
        format_args!("{d} framed at {}", Quiver::vertex_label(i)),
    )
}

#[cfg(test)]
mod tests;
