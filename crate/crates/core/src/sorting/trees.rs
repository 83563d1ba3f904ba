use super::{OpId, SortingDiagram};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    /// The ancestor `sigma'` indexing `E_{sigma'}`.
    pub op: OpId,
    /// `V_{sigma'}`, or `None` for the unbounded end at a leaf.
    pub tail: Option<OpId>,
    /// `V_{Child(sigma')}`, or `None` for the outgoing edge `E_sigma`.
    pub head: Option<OpId>,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortingTree {
    pub root: OpId,
    pub bounded: bool,
    pub vertices: Vec<OpId>,
    pub edges: Vec<TreeEdge>,
    pub leaves: Vec<OpId>,
}

impl SortingTree {
    /// Interior vertices with their three incident edges.
    pub fn is_trivalent(&self) -> bool {
        self.vertices.iter().all(|&v| {
            let deg = self
                .edges
                .iter()
                .filter(|e| e.tail == Some(v) || e.head == Some(v))
                .count();
            deg == 3 || deg <= 1
        })
    }
}

/// `Child(sigma')` for every strict ancestor of `root`, checked to be unique.
pub(crate) fn children(d: &SortingDiagram, root: OpId) -> Result<Vec<(OpId, OpId)>> {
    let anc = d.ancestors(root);
    let mut out = Vec::with_capacity(anc.len());
    for &a in &anc {
        if a == root {
            continue;
        }
        let kids: Vec<OpId> = anc
            .iter()
            .copied()
            .filter(|&x| matches!(d.parents(x), Some((p, q)) if p == a || q == a))
            .collect();
        if kids.len() != 1 {
            return Err(Error::Genealogy(format!(
                "{} is parent to {} ancestors of {}",
                d.node(a).op,
                kids.len(),
                d.node(root).op
            )));
        }
        out.push((a, kids[0]));
    }
    Ok(out)
}

/// The bounded tree and the unbounded tree of `root`.
pub fn build_trees(d: &SortingDiagram, root: OpId) -> Result<(SortingTree, SortingTree)> {
    let kids = children(d, root)?;
    let mut anc = d.ancestors(root);
    anc.sort_unstable();
    let leaves = d.leaves(root);
    let weight = |id| d.edge_weight(id);

    let mut bounded_edges = Vec::new();
    for &(a, c) in &kids {
        bounded_edges.push(TreeEdge {
            op: a,
            tail: Some(a),
            head: Some(c),
            weight: weight(a)?,
        });
    }
    bounded_edges.sort_by_key(|e| e.op);
    let bounded = SortingTree {
        root,
        bounded: true,
        vertices: anc.clone(),
        edges: bounded_edges.clone(),
        leaves: leaves.clone(),
    };

    let mut edges: Vec<TreeEdge> = bounded_edges
        .into_iter()
        .map(|mut e| {
            if leaves.contains(&e.op) {
                e.tail = None;
            }
            e
        })
        .collect();
    edges.push(TreeEdge {
        op: root,
        tail: if leaves.contains(&root) {
            None
        } else {
            Some(root)
        },
        head: None,
        weight: weight(root)?,
    });
    edges.sort_by_key(|e| e.op);
    let unbounded = SortingTree {
        root,
        bounded: false,
        vertices: anc.into_iter().filter(|a| !leaves.contains(a)).collect(),
        edges,
        leaves,
    };
    Ok((bounded, unbounded))
}
