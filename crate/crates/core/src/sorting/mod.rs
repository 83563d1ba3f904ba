//! Sorting diagrams: operator sequences driven to slope-descending order by
//! repeated commutation, with the genealogy of every commutator recorded.

mod trees;

pub use trees::{build_trees, SortingTree, TreeEdge};

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::One;

use crate::algebra::{
    commutator, factor_initial, naive_commutator, ElemAuto, Levels, Mode, NaiveCommutation,
};
use crate::error::{domain, AssumptionViolation, Error, Result};
use crate::quiver::{index, DimVec, Quiver, Slope};

pub type OpId = usize;

#[derive(Clone, Debug)]
pub struct OpNode {
    pub op: ElemAuto,
    pub slope: Slope,
    /// `(sigma_p, sigma_p')`: the lower-slope operator that moved right, then
    /// the one it moved past. `None` for initial operators.
    pub parents: Option<(OpId, OpId)>,
    /// Step index `i` such that the operator first appears in `S^(i+1)`.
    pub born: usize,
    /// Length of the longest parent chain down to an initial operator.
    pub generation: usize,
    /// `<d, i_p>` for every vertex `p`.
    pairing: Box<[i64]>,
}

impl OpNode {
    fn new(
        q: &Quiver,
        op: ElemAuto,
        parents: Option<(OpId, OpId)>,
        born: usize,
        generation: usize,
    ) -> Result<Self> {
        let n = q.n();
        let mut unit = vec![0; n];
        let mut pairing = Vec::with_capacity(n);
        for p in 0..n {
            unit[p] = 1;
            pairing.push(q.bracket(op.d.entries(), &unit));
            unit[p] = 0;
        }
        Ok(OpNode {
            slope: op.slope(q)?,
            op,
            parents,
            born,
            generation,
            pairing: pairing.into(),
        })
    }

    /// `<d_self, d_other>`.
    fn bracket(&self, other: &OpNode) -> i64 {
        self.pairing
            .iter()
            .zip(other.op.d.entries())
            .map(|(a, b)| a * b)
            .sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SortOptions {
    /// Commutators whose exponent is not componentwise below this are dropped.
    pub exponent_cap: Option<DimVec>,
    /// Keep every intermediate sequence.
    pub keep_history: bool,
    /// Abort after this many steps (default 1_000_000).
    pub max_steps: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Advanced,
    Stable,
    Violation(AssumptionViolation),
}

#[derive(Clone, Debug)]
pub struct SortingDiagram {
    quiver: Quiver,
    mode: Mode,
    levels: Option<Levels>,
    nodes: Vec<OpNode>,
    seq: Vec<OpId>,
    step: usize,
    stable: bool,
    /// Everything before this position is already descending.
    scan_from: usize,
    options: SortOptions,
    history: Vec<Vec<OpId>>,
}

/// `S^0`: one `T_{i_q}` per vertex, or the blocks of [`factor_initial`].
pub fn initial_diagram(q: &Quiver, k: u32, mode: Mode) -> Result<SortingDiagram> {
    match mode {
        Mode::Naive => SortingDiagram::new(q, None, SortOptions::default()),
        Mode::Nilpotent => {
            if k < 1 {
                return domain("nilpotent mode needs k >= 1");
            }
            SortingDiagram::new(q, Some(Levels::uniform(q.n(), k)?), SortOptions::default())
        }
    }
}

impl SortingDiagram {
    /// Naive mode when `levels` is `None`, nilpotent mode otherwise.
    ///
    /// Vertices with zero levels get no operators in nilpotent mode.
    pub fn new(q: &Quiver, levels: Option<Levels>, options: SortOptions) -> Result<Self> {
        let mut nodes = Vec::new();
        let mode = if levels.is_some() {
            Mode::Nilpotent
        } else {
            Mode::Naive
        };
        for v in 0..q.n() {
            let ops = match &levels {
                None => vec![ElemAuto::naive(DimVec::unit(q.n(), v))?],
                Some(l) if l.cap(v) == 0 => vec![],
                Some(l) => factor_initial(v, l)?,
            };
            for op in ops {
                nodes.push(OpNode::new(q, op, None, 0, 0)?);
            }
        }
        if let Some(l) = &levels {
            if l.n() != q.n() {
                return domain("level layout and quiver disagree on the vertex count");
            }
        }
        if let Some(cap) = &options.exponent_cap {
            if cap.len() != q.n() {
                return domain("exponent cap has the wrong length");
            }
        }
        let seq: Vec<OpId> = (0..nodes.len()).collect();
        let history = if options.keep_history {
            vec![seq.clone()]
        } else {
            vec![]
        };
        Ok(SortingDiagram {
            quiver: q.clone(),
            mode,
            levels,
            nodes,
            seq,
            step: 0,
            stable: false,
            scan_from: 0,
            options,
            history,
        })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn levels(&self) -> Option<&Levels> {
        self.levels.as_ref()
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn is_stable(&self) -> bool {
        self.stable
    }

    pub fn seq(&self) -> &[OpId] {
        &self.seq
    }

    pub fn node(&self, id: OpId) -> &OpNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[OpNode] {
        &self.nodes
    }

    pub fn ops(&self) -> Vec<ElemAuto> {
        self.seq.iter().map(|&i| self.nodes[i].op.clone()).collect()
    }

    pub fn history(&self) -> &[Vec<OpId>] {
        &self.history
    }

    /// Exponents `r d` of the current sequence.
    pub fn exponents(&self) -> Vec<DimVec> {
        self.seq
            .iter()
            .map(|&i| self.nodes[i].op.exponent())
            .collect()
    }

    /// Deepest genealogy among all operators created so far.
    pub fn max_generation(&self) -> usize {
        self.nodes.iter().map(|n| n.generation).max().unwrap_or(0)
    }

    /// `(s+S) k` in nilpotent mode. Every commutator strictly enlarges the
    /// index set, so [`SortingDiagram::max_generation`] stays below it; the
    /// step count itself is not bounded by it.
    pub fn step_bound(&self) -> Option<usize> {
        self.levels
            .as_ref()
            .map(|l| self.quiver.n() * l.caps().iter().copied().max().unwrap_or(0) as usize)
    }

    fn commute(
        &self,
        a1: OpId,
        a2: OpId,
    ) -> Result<std::result::Result<Option<ElemAuto>, AssumptionViolation>> {
        let (x, y) = (&self.nodes[a1].op, &self.nodes[a2].op);
        if self.mode == Mode::Nilpotent
            && (x.nil.intersects(y.nil) || self.nodes[a1].bracket(&self.nodes[a2]) == 0)
        {
            return Ok(Ok(None));
        }
        match self.mode {
            Mode::Nilpotent => Ok(Ok(commutator(&self.quiver, x, y)?)),
            Mode::Naive => Ok(match naive_commutator(&self.quiver, x, y)? {
                NaiveCommutation::Identity => Ok(None),
                NaiveCommutation::Op(op) => Ok(Some(op)),
                NaiveCommutation::Violation { d1, d2, bracket } => Err(AssumptionViolation {
                    step: self.step,
                    d1,
                    d2,
                    bracket,
                }),
            }),
        }
    }

    /// One sorting step: the leftmost ascending pair is resolved by moving
    /// its left member right past everything of larger slope.
    pub fn sort_step(&mut self) -> Result<StepOutcome> {
        if self.stable {
            return Ok(StepOutcome::Stable);
        }
        let slope = |id: OpId| self.nodes[id].slope;
        let Some(p) = (self.scan_from..self.seq.len().saturating_sub(1))
            .find(|&i| slope(self.seq[i]) < slope(self.seq[i + 1]))
        else {
            self.stable = true;
            return Ok(StepOutcome::Stable);
        };
        let mover = self.seq[p];
        let mu = slope(mover);
        let mut end = p + 1;
        while end < self.seq.len() && mu < slope(self.seq[end]) {
            end += 1;
        }
        let mut segment = Vec::with_capacity(2 * (end - p));
        let mut fresh = Vec::new();
        for j in p + 1..end {
            let other = self.seq[j];
            segment.push(other);
            match self.commute(mover, other)? {
                Err(v) => return Ok(StepOutcome::Violation(v)),
                Ok(None) => {}
                Ok(Some(op)) => {
                    if let Some(cap) = &self.options.exponent_cap {
                        if !op.exponent().le(cap) {
                            continue;
                        }
                    }
                    let id = self.nodes.len() + fresh.len();
                    let generation = 1 + self.nodes[mover]
                        .generation
                        .max(self.nodes[other].generation);
                    fresh.push(OpNode::new(
                        &self.quiver,
                        op,
                        Some((mover, other)),
                        self.step,
                        generation,
                    )?);
                    segment.push(id);
                }
            }
        }
        segment.push(mover);
        self.nodes.extend(fresh);
        self.seq.splice(p..end, segment);
        self.scan_from = p.saturating_sub(1);
        self.step += 1;
        if self.options.keep_history {
            self.history.push(self.seq.clone());
        }
        Ok(StepOutcome::Advanced)
    }

    /// Runs [`SortingDiagram::sort_step`] until the sequence is stable.
    pub fn stabilize(&mut self) -> Result<()> {
        let limit = self.options.max_steps.unwrap_or(1_000_000);
        loop {
            match self.sort_step()? {
                StepOutcome::Stable => return Ok(()),
                StepOutcome::Violation(v) => return Err(Error::Assumption(v)),
                StepOutcome::Advanced => {
                    if self.step > limit {
                        return Err(Error::Cap(format!(
                            "sorting did not stabilize in {limit} steps"
                        )));
                    }
                }
            }
        }
    }

    /// Number of steps that changed the sequence; stable diagrams equal `S^i`
    /// for every `i` at least this.
    pub fn stabilization_index(&self) -> usize {
        self.step
    }

    /// Whether the sequence is weakly descending in slope.
    pub fn is_descending(&self) -> bool {
        self.seq
            .windows(2)
            .all(|w| self.nodes[w[0]].slope >= self.nodes[w[1]].slope)
    }

    /// Operators of the stable diagram with the given slope, in order.
    pub fn slope_block(&self, mu: Slope) -> Vec<OpId> {
        self.seq
            .iter()
            .copied()
            .filter(|&i| self.nodes[i].slope == mu)
            .collect()
    }

    /// Distinct slopes of the current sequence, descending.
    pub fn slopes(&self) -> Vec<Slope> {
        let mut out: Vec<Slope> = self.seq.iter().map(|&i| self.nodes[i].slope).collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        out.dedup();
        out
    }

    /// `Parents(sigma)`.
    pub fn parents(&self, id: OpId) -> Option<(OpId, OpId)> {
        self.nodes[id].parents
    }

    /// `Ancestors(sigma)` including `sigma`, children before parents.
    pub fn ancestors(&self, id: OpId) -> Vec<OpId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            if out.contains(&x) {
                continue;
            }
            out.push(x);
            if let Some((a, b)) = self.nodes[x].parents {
                stack.push(b);
                stack.push(a);
            }
        }
        out
    }

    /// `Leaves(sigma)`: initial operators among the ancestors, sorted.
    pub fn leaves(&self, id: OpId) -> Vec<OpId> {
        let mut out: Vec<OpId> = self
            .ancestors(id)
            .into_iter()
            .filter(|&x| self.nodes[x].parents.is_none())
            .collect();
        out.sort_unstable();
        out
    }

    /// Edge weight `r * ind(dbar)`.
    pub fn edge_weight(&self, id: OpId) -> Result<u64> {
        let op = &self.nodes[id].op;
        let (a, b) = self.quiver.reduce(&op.d);
        Ok(op.r as u64 * index(&[a, b])?)
    }

    /// One line per operator: slope, c, r, d (sparse), I (sorted pairs).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for &id in &self.seq {
            let _ = writeln!(out, "{}", self.op_line(id));
        }
        out
    }

    pub fn op_line(&self, id: OpId) -> String {
        let node = &self.nodes[id];
        let op = &node.op;
        let nil = match &self.levels {
            Some(l) => l.display(op.nil).to_string(),
            None => "{}".to_string(),
        };
        let c = if op.c.denom().is_one() {
            op.c.numer().to_string()
        } else {
            format!("{}/{}", op.c.numer(), op.c.denom())
        };
        format!("{}\t{}\t{}\t{}\t{}", node.slope, c, op.r, op.d, nil)
    }

    /// Coefficient of the operator, for callers that only need integers.
    pub fn coefficient(&self, id: OpId) -> &BigRational {
        &self.nodes[id].op.c
    }
}

#[cfg(test)]
mod tests;
