use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::arrangement::LineArrangement;
use crate::algebra::{rat, NilMonomial, WeightFunction};
use crate::error::{domain, Error, Result};
use crate::quiver::{DimVec, Quiver};
use crate::sorting::{OpId, SortingDiagram};

pub type Point = (BigRational, BigRational);

/// An unbounded leg: the initial operator `T_{q,J}` and its line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leg {
    pub vertex: usize,
    pub levels: u32,
    pub op: OpId,
    /// Index into the arrangement; `None` on an unembedded skeleton.
    pub line: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeEnd {
    Vertex(usize),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveEdge {
    pub op: OpId,
    pub weight: u64,
    /// Primitive direction from `tail` to `head`.
    pub direction: (i64, i64),
    pub tail: EdgeEnd,
    pub head: EdgeEnd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveVertex {
    /// The operator `sigma'` whose parents meet here.
    pub op: OpId,
    /// Position in the plane; `None` on an unembedded skeleton.
    pub point: Option<Point>,
    /// `<r1 d1, r2 d2>` with the lower-slope parent first.
    pub mult_q: i64,
    /// `w1 w2 |m1 ^ m2|`.
    pub mult_std: u64,
}

#[derive(Clone, Debug)]
enum Outgoing {
    Line { point: Point, dir: (i64, i64) },
    Ray { start: Point, dir: (i64, i64) },
    Abstract { dir: (i64, i64) },
}

/// The connected curve `h(E_sigma)` of one operator.
#[derive(Clone, Debug)]
pub struct Component {
    pub root: OpId,
    pub vertices: Vec<CurveVertex>,
    pub edges: Vec<CurveEdge>,
    pub legs: Vec<Leg>,
    pub d_out: DimVec,
    outgoing: Outgoing,
}

impl Component {
    pub fn mult_q(&self) -> BigInt {
        self.vertices
            .iter()
            .map(|v| BigInt::from(v.mult_q))
            .product()
    }

    pub fn mult_std(&self) -> BigInt {
        self.vertices
            .iter()
            .map(|v| BigInt::from(v.mult_std))
            .product()
    }

    /// Start of the outgoing edge; `None` for a bare line or a skeleton.
    pub fn out_start(&self) -> Option<&Point> {
        match &self.outgoing {
            Outgoing::Ray { start, .. } => Some(start),
            _ => None,
        }
    }

    pub fn out_direction(&self) -> (i64, i64) {
        match &self.outgoing {
            Outgoing::Ray { dir, .. } | Outgoing::Line { dir, .. } | Outgoing::Abstract { dir } => {
                *dir
            }
        }
    }

    pub fn is_embedded(&self) -> bool {
        !matches!(self.outgoing, Outgoing::Abstract { .. })
    }

    /// `sum w_i m_i = 0` at every vertex, outward directions.
    pub fn is_balanced(&self) -> bool {
        (0..self.vertices.len()).all(|v| {
            let mut sx = 0i64;
            let mut sy = 0i64;
            for e in &self.edges {
                let w = e.weight as i64;
                if e.tail == EdgeEnd::Vertex(v) {
                    sx += w * e.direction.0;
                    sy += w * e.direction.1;
                }
                if e.head == EdgeEnd::Vertex(v) {
                    sx -= w * e.direction.0;
                    sy -= w * e.direction.1;
                }
            }
            sx == 0 && sy == 0
        })
    }

    /// Every bounded vertex is trivalent.
    pub fn is_trivalent(&self) -> bool {
        (0..self.vertices.len()).all(|v| {
            self.edges
                .iter()
                .filter(|e| e.tail == EdgeEnd::Vertex(v) || e.head == EdgeEnd::Vertex(v))
                .count()
                == 3
        })
    }
}

/// A curve of `S_{Q,k}`: one component, or an ordered chain of same-slope
/// components with disjoint legs.
#[derive(Clone, Debug)]
pub struct TropicalCurve {
    pub ops: Vec<OpId>,
    pub components: Vec<Component>,
    pub legs: Vec<Leg>,
    pub d_out: DimVec,
    pub mult_q: BigRational,
    pub mult_std: BigInt,
    pub weight: WeightFunction,
}

impl TropicalCurve {
    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    /// Zero-weight chains are not curves of the set.
    pub fn contributes(&self) -> bool {
        !self.weight.coeff.is_zero()
    }

    /// `(vertex, level mask)` of the legs, sorted.
    pub fn family(&self) -> Vec<(usize, u32)> {
        let mut f: Vec<(usize, u32)> = self.legs.iter().map(|l| (l.vertex, l.levels)).collect();
        f.sort_unstable();
        f
    }

    pub fn is_balanced(&self) -> bool {
        self.components.iter().all(Component::is_balanced)
    }

    /// `Mult_Q(h) prod_J ((-1)^(#J-1)/#J (#J-1)! u_J) x^{d_out}`.
    pub fn reconstructed_weight(&self) -> BigRational {
        let mut out = self.mult_q.clone();
        for l in &self.legs {
            out *= leg_factor(l.levels.count_ones());
        }
        out
    }
}

/// `(-1)^(n-1) (n-1)! / n`, the weight of an initial operator `T_{q,J}` with `#J = n`.
pub fn leg_factor(n: u32) -> BigRational {
    let mut f = BigInt::one();
    for j in 1..n {
        f *= j;
    }
    let sign = if n.is_multiple_of(2) { -f } else { f };
    BigRational::new(sign, BigInt::from(n))
}

fn leaf_levels(d: &SortingDiagram, id: OpId, vertex: usize) -> u32 {
    match d.levels() {
        Some(l) => l.levels_at(d.node(id).op.nil, vertex),
        None => 1,
    }
}

/// `(vertex, level mask)` of an initial operator.
pub fn leaf_key(d: &SortingDiagram, id: OpId) -> Result<(usize, u32)> {
    let op = &d.node(id).op;
    let support = op.d.support();
    if d.parents(id).is_some() || support.len() != 1 {
        return domain(format!("{op} is not an initial operator"));
    }
    Ok((support[0], leaf_levels(d, id, support[0])))
}

fn primitive(q: &Quiver, e: &DimVec) -> Result<((i64, i64), u64)> {
    let (a, b) = q.reduce(e);
    let g = a.gcd(&b);
    if g == 0 {
        return Err(Error::Consistency(format!("zero exponent {e}")));
    }
    Ok(((a / g, b / g), g as u64))
}

fn cross(a: (&BigRational, &BigRational), b: (&BigRational, &BigRational)) -> BigRational {
    a.0 * b.1 - a.1 * b.0
}

fn to_rat(v: (i64, i64)) -> (BigRational, BigRational) {
    (rat(v.0), rat(v.1))
}

/// Intersection of two outgoing rays or lines.
fn meet(a: &Outgoing, b: &Outgoing) -> Result<Point> {
    let parts = |o: &Outgoing| match o {
        Outgoing::Line { point, dir } => Ok((point.clone(), *dir, false)),
        Outgoing::Ray { start, dir } => Ok((start.clone(), *dir, true)),
        Outgoing::Abstract { .. } => Err(Error::Consistency("meeting an unembedded ray".into())),
    };
    let (pa, da, ra) = parts(a)?;
    let (pb, db, rb) = parts(b)?;
    let (dax, day) = to_rat(da);
    let (dbx, dby) = to_rat(db);
    let den = cross((&dax, &day), (&dbx, &dby));
    if den.is_zero() {
        return Err(Error::Consistency("parent rays are parallel".into()));
    }
    let wx = &pb.0 - &pa.0;
    let wy = &pb.1 - &pa.1;
    let s = cross((&wx, &wy), (&dbx, &dby)) / &den;
    let t = cross((&wx, &wy), (&dax, &day)) / &den;
    if (ra && s.is_zero()) || (rb && t.is_zero()) {
        return Err(Error::Degenerate("a vertex lands on another ray".into()));
    }
    if (ra && s.is_negative()) || (rb && t.is_negative()) {
        return Err(Error::Consistency(format!(
            "parent rays do not meet ahead of their vertices (s = {s}, t = {t})"
        )));
    }
    Ok((&pa.0 + &s * &dax, &pa.1 + &s * &day))
}

/// Builds `h(E_sigma)` recursively from the parents' outgoing rays.
pub fn build_component(
    d: &SortingDiagram,
    arr: &LineArrangement,
    sigma: OpId,
) -> Result<Component> {
    component(d, Some(arr), sigma)
}

/// The combinatorial curve of `sigma`: genealogy, weights, directions and
/// multiplicities, without positions.
pub fn skeleton_component(d: &SortingDiagram, sigma: OpId) -> Result<Component> {
    component(d, None, sigma)
}

fn component(d: &SortingDiagram, arr: Option<&LineArrangement>, sigma: OpId) -> Result<Component> {
    let q = d.quiver();
    let node = d.node(sigma);
    let e = node.op.exponent();
    let (dir, weight) = primitive(q, &e)?;
    match node.parents {
        None => {
            let (vertex, levels) = leaf_key(d, sigma)?;
            let line = match arr {
                Some(a) => Some(
                    a.find(vertex, levels)
                        .ok_or_else(|| Error::Consistency(format!("no line for {}", node.op)))?,
                ),
                None => None,
            };
            Ok(Component {
                root: sigma,
                vertices: Vec::new(),
                edges: vec![CurveEdge {
                    op: sigma,
                    weight,
                    direction: dir,
                    tail: EdgeEnd::Infinity,
                    head: EdgeEnd::Infinity,
                }],
                legs: vec![Leg {
                    vertex,
                    levels,
                    op: sigma,
                    line,
                }],
                d_out: e,
                outgoing: match (arr, line) {
                    (Some(a), Some(l)) => Outgoing::Line {
                        point: a.line(l).anchor(),
                        dir,
                    },
                    _ => Outgoing::Abstract { dir },
                },
            })
        }
        Some((p1, p2)) => {
            let c1 = component(d, arr, p1)?;
            let c2 = component(d, arr, p2)?;
            if c1.legs.iter().any(|l| {
                c2.legs
                    .iter()
                    .any(|m| l.vertex == m.vertex && l.levels & m.levels != 0)
            }) {
                return Err(Error::Consistency(format!(
                    "legs of the parents of {} overlap",
                    node.op
                )));
            }
            let point = match arr {
                Some(_) => Some(meet(&c1.outgoing, &c2.outgoing)?),
                None => None,
            };
            let e1 = d.node(p1).op.exponent();
            let e2 = d.node(p2).op.exponent();
            let mult_q = q.bracket(e1.entries(), e2.entries());
            let (a1, b1) = q.reduce(&e1);
            let (a2, b2) = q.reduce(&e2);
            let mult_std = (a1 * b2 - a2 * b1).unsigned_abs();

            let shift = c1.vertices.len();
            let mut vertices = c1.vertices;
            vertices.extend(c2.vertices);
            let here = vertices.len();
            vertices.push(CurveVertex {
                op: sigma,
                point: point.clone(),
                mult_q,
                mult_std,
            });
            let mut edges = Vec::new();
            for (mut es, root, off) in [(c1.edges, c1.root, 0), (c2.edges, c2.root, shift)] {
                for edge in &mut es {
                    for end in [&mut edge.tail, &mut edge.head] {
                        if let EdgeEnd::Vertex(v) = end {
                            *v += off;
                        }
                    }
                    if edge.op == root {
                        edge.head = EdgeEnd::Vertex(here);
                    }
                }
                edges.extend(es);
            }
            edges.push(CurveEdge {
                op: sigma,
                weight,
                direction: dir,
                tail: EdgeEnd::Vertex(here),
                head: EdgeEnd::Infinity,
            });
            let mut legs = c1.legs;
            legs.extend(c2.legs);
            legs.sort();
            Ok(Component {
                root: sigma,
                vertices,
                edges,
                legs,
                d_out: e,
                outgoing: match point {
                    Some(start) => Outgoing::Ray { start, dir },
                    None => Outgoing::Abstract { dir },
                },
            })
        }
    }
}

/// Perturbation sizes tried when a vertex lands on another ray.
fn deltas() -> impl Iterator<Item = BigRational> {
    std::iter::once(BigRational::zero()).chain(
        [7i64, 61, 997, 10007]
            .into_iter()
            .map(|p| BigRational::new(1.into(), p.into())),
    )
}

/// `h(E_sigma)` on the first perturbation of `arr` that is generic for it.
pub fn build_generic_component(
    d: &SortingDiagram,
    arr: &LineArrangement,
    sigma: OpId,
) -> Result<Component> {
    let mut last = None;
    for delta in deltas() {
        match build_component(d, &arr.perturbed(&delta), sigma) {
            Err(Error::Degenerate(m)) => last = Some(m),
            other => return other,
        }
    }
    Err(Error::Consistency(format!(
        "no generic perturbation for {}: {}",
        d.node(sigma).op,
        last.unwrap_or_default()
    )))
}

/// The connected curve of a single operator, embedded in `arr` or a
/// generic perturbation of it.
pub fn build_curve(
    d: &SortingDiagram,
    arr: &LineArrangement,
    sigma: OpId,
) -> Result<TropicalCurve> {
    Ok(curve_of(d, build_generic_component(d, arr, sigma)?, sigma))
}

/// The connected curve of a single operator without an embedding.
pub fn curve_skeleton(d: &SortingDiagram, sigma: OpId) -> Result<TropicalCurve> {
    Ok(curve_of(d, skeleton_component(d, sigma)?, sigma))
}

fn curve_of(d: &SortingDiagram, c: Component, sigma: OpId) -> TropicalCurve {
    let mult_q = BigRational::from_integer(c.mult_q());
    TropicalCurve {
        ops: vec![sigma],
        legs: c.legs.clone(),
        d_out: c.d_out.clone(),
        mult_q,
        mult_std: c.mult_std(),
        weight: d.node(sigma).op.weight_function(),
        components: vec![c],
    }
}

/// The disconnected curve `h_{j1..jl}` of a same-slope chain.
///
/// `Mult_Q(h_{1..l}) = 1/2 Mult_Q(h_{1..l-1}) Mult_Q(h_l) <d_out(h_{1..l-1}), d_out(h_l)>`;
/// the factor `Mult_Q(h_l)` keeps the weight reconstruction exact when `h_l`
/// is itself a nontrivial curve. Components are embedded when `arr` is given.
pub fn assemble_disconnected(
    d: &SortingDiagram,
    arr: Option<&LineArrangement>,
    chain: &[OpId],
) -> Result<TropicalCurve> {
    let one = |id| match arr {
        Some(a) => build_curve(d, a, id),
        None => curve_skeleton(d, id),
    };
    let Some((&first, rest)) = chain.split_first() else {
        return domain("empty chain");
    };
    let pos: HashMap<OpId, usize> = d.seq().iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mu = d.node(first).slope;
    let mut last = *pos
        .get(&first)
        .ok_or_else(|| Error::Domain(format!("{} is not in the sequence", d.node(first).op)))?;
    let mut curve = one(first)?;
    let mut nil = d.node(first).op.nil;
    let half = BigRational::new(1.into(), 2.into());
    for &next in rest {
        let node = d.node(next);
        let p = *pos
            .get(&next)
            .ok_or_else(|| Error::Domain(format!("{} is not in the sequence", node.op)))?;
        if p <= last {
            return domain("chain must follow the sequence order");
        }
        if node.slope != mu {
            return domain("chain mixes slopes");
        }
        if nil.intersects(node.op.nil) {
            return domain("chain legs overlap");
        }
        last = p;
        nil = nil.union(node.op.nil);
        let h = one(next)?;
        let w = d.quiver().bracket(curve.d_out.entries(), h.d_out.entries());
        curve.mult_q = &half * &curve.mult_q * &h.mult_q * rat(w);
        curve.mult_std *= &h.mult_std;
        curve.weight = WeightFunction {
            coeff: &half * rat(w) * &curve.weight.coeff * &h.weight.coeff,
            nil: NilMonomial(curve.weight.nil.0 | h.weight.nil.0),
            exponent: curve.weight.exponent.add(&h.weight.exponent),
        };
        curve.d_out = curve.d_out.add(&h.d_out);
        curve.legs.extend(h.legs);
        curve.legs.sort();
        curve.ops.push(next);
        curve.components.extend(h.components);
    }
    Ok(curve)
}
