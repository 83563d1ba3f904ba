use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::Levels;
use crate::error::{domain, Result};
use crate::quiver::Quiver;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub vertex: usize,
    /// Level set `J` as a mask over `1..=k` (bit `j-1` for level `j`).
    pub levels: u32,
    /// 1-based position among lines of the same orientation.
    pub rank: usize,
    pub vertical: bool,
    /// `x` of a vertical line, `y` of a horizontal one.
    pub offset: BigRational,
}

impl Line {
    /// A point on the line.
    pub fn anchor(&self) -> (BigRational, BigRational) {
        if self.vertical {
            (self.offset.clone(), BigRational::zero())
        } else {
            (BigRational::zero(), self.offset.clone())
        }
    }

    /// `(i_q, J)` with 1-based vertex and levels.
    pub fn label(&self) -> String {
        let js: Vec<String> = (0..32)
            .filter(|b| self.levels >> b & 1 == 1)
            .map(|b| (b + 1).to_string())
            .collect();
        format!("(i{}, {{{}}})", self.vertex + 1, js.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct LineArrangement {
    lines: Vec<Line>,
    index: HashMap<(usize, u32), usize>,
}

/// Vertical lines `x = -rank` for sinks and horizontal lines `y = rank` for
/// sources, ranked by vertex and then by level set in mask order.
pub fn build_arrangement(q: &Quiver, k: u32) -> Result<LineArrangement> {
    if k < 1 {
        return domain("arrangement needs k >= 1");
    }
    LineArrangement::from_levels(q, &Levels::uniform(q.n(), k)?)
}

impl LineArrangement {
    pub fn from_levels(q: &Quiver, levels: &Levels) -> Result<Self> {
        if levels.n() != q.n() {
            return domain("level layout and quiver disagree on the vertex count");
        }
        let mut lines = Vec::new();
        let mut index = HashMap::new();
        for vertical in [true, false] {
            let mut rank = 0;
            let range = if vertical {
                q.sink_range()
            } else {
                q.source_range()
            };
            for v in range {
                for mask in 1u32..(1u32 << levels.cap(v)) {
                    rank += 1;
                    let r = BigRational::from_integer(BigInt::from(rank as i64));
                    index.insert((v, mask), lines.len());
                    lines.push(Line {
                        vertex: v,
                        levels: mask,
                        rank,
                        vertical,
                        offset: if vertical { -r } else { r },
                    });
                }
            }
        }
        Ok(LineArrangement { lines, index })
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn find(&self, vertex: usize, levels: u32) -> Option<usize> {
        self.index.get(&(vertex, levels)).copied()
    }

    pub fn line(&self, i: usize) -> &Line {
        &self.lines[i]
    }

    /// Moves vertical lines by `rank^2 delta` and horizontal lines by
    /// `rank^3 delta`, away from the origin.
    pub fn perturb(&mut self, delta: &BigRational) {
        for l in &mut self.lines {
            let r = BigRational::from_integer(BigInt::from(l.rank as i64));
            let shift = &r * &r * delta;
            if l.vertical {
                l.offset -= shift;
            } else {
                l.offset += shift * r;
            }
        }
    }

    /// A copy with every horizontal offset multiplied by `factor`.
    pub fn stretched(&self, factor: &BigRational) -> Self {
        let mut out = self.clone();
        for l in &mut out.lines {
            if !l.vertical {
                l.offset *= factor;
            }
        }
        out
    }

    /// A copy with `perturb(delta)` applied.
    pub fn perturbed(&self, delta: &BigRational) -> Self {
        let mut out = self.clone();
        out.perturb(delta);
        out
    }

    /// Clockwise from the rightmost vertical line: verticals right to left,
    /// then horizontals bottom to top.
    pub fn clockwise(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.lines.len())
            .filter(|&i| self.lines[i].vertical)
            .collect();
        v.sort_by(|&a, &b| self.lines[b].offset.cmp(&self.lines[a].offset));
        let mut h: Vec<usize> = (0..self.lines.len())
            .filter(|&i| !self.lines[i].vertical)
            .collect();
        h.sort_by(|&a, &b| self.lines[a].offset.cmp(&self.lines[b].offset));
        v.extend(h);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::tests::{q1, q2};

    #[test]
    fn single_arrow_k2() {
        let q = Quiver::from_arrows(1, 1, 1, &[(1, 0)]).unwrap();
        let a = build_arrangement(&q, 2).unwrap();
        assert_eq!(a.len(), 6);
        let labels: Vec<String> = a
            .clockwise()
            .into_iter()
            .map(|i| a.line(i).label())
            .collect();
        assert_eq!(
            labels,
            [
                "(i1, {1})",
                "(i1, {2})",
                "(i1, {1,2})",
                "(i2, {1})",
                "(i2, {2})",
                "(i2, {1,2})"
            ]
        );
    }

    #[test]
    fn q2_k1_has_three_vertical_two_horizontal() {
        let a = build_arrangement(&q2(), 1).unwrap();
        assert_eq!(a.lines().iter().filter(|l| l.vertical).count(), 3);
        assert_eq!(a.lines().iter().filter(|l| !l.vertical).count(), 2);
        // i1 is the rightmost vertical line
        assert_eq!(a.line(a.clockwise()[0]).vertex, 0);
    }

    #[test]
    fn k1_has_one_line_per_vertex() {
        for q in [q1(), q2()] {
            assert_eq!(build_arrangement(&q, 1).unwrap().len(), q.n());
        }
    }

    #[test]
    fn perturbation_keeps_order() {
        let mut a = build_arrangement(&q2(), 2).unwrap();
        let before = a.clockwise();
        a.perturb(&BigRational::new(1.into(), 225.into()));
        assert_eq!(a.clockwise(), before);
    }
}
