use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Quiver;
use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootKind {
    Sink,
    Source,
}

impl FromStr for RootKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sink" => Ok(RootKind::Sink),
            "source" => Ok(RootKind::Source),
            _ => Err(Error::Format(format!(
                "root kind must be sink or source, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for RootKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootKind::Sink => "sink",
            RootKind::Source => "source",
        })
    }
}

struct Node {
    is_source: bool,
    /// (parent, color of the connecting arrow)
    parent: Option<(usize, u32)>,
    layer: u32,
}

/// Ball of `depth` vertex layers around a root of the `m`-regular oriented tree.
///
/// `depth = 1` is the root alone, `depth = 2` adds its `m` neighbors, and so on.
/// Sinks are numbered along a depth-first walk that starts at a leaf, so
/// zigzag fragments for `m = 2` come out labeled along the line.
pub fn build_covering_fragment(m: u32, depth: u32, root: RootKind) -> Result<Quiver> {
    if m == 0 || depth == 0 {
        return domain("build_covering_fragment needs m >= 1 and depth >= 1");
    }
    let mut nodes = vec![Node {
        is_source: root == RootKind::Source,
        parent: None,
        layer: 1,
    }];
    let mut head = 0;
    while head < nodes.len() {
        let (is_source, parent, layer) =
            (nodes[head].is_source, nodes[head].parent, nodes[head].layer);
        if layer < depth {
            for c in 0..m {
                if parent.map(|p| p.1) == Some(c) {
                    continue;
                }
                nodes.push(Node {
                    is_source: !is_source,
                    parent: Some((head, c)),
                    layer: layer + 1,
                });
            }
        }
        head += 1;
        if nodes.len() > 100_000 {
            return Err(Error::Cap(format!(
                "fragment with more than {} vertices",
                100_000
            )));
        }
    }

    let n = nodes.len();
    let mut children: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
    for (v, node) in nodes.iter().enumerate() {
        if let Some((p, c)) = node.parent {
            children[p].push((c, v));
        }
    }
    // depth-first walk from the first leaf of the outermost layer
    let start = (0..n)
        .find(|&v| nodes[v].layer == nodes[n - 1].layer)
        .unwrap();
    let mut adj: Vec<Vec<(u32, usize)>> = children.clone();
    for (v, node) in nodes.iter().enumerate() {
        if let Some((p, c)) = node.parent {
            adj[v].push((c, p));
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        order.push(v);
        for &(_, w) in adj[v].iter().rev() {
            if !seen[w] {
                stack.push(w);
            }
        }
    }

    let id = |v: usize| v as u64 + 1;
    let sinks: Vec<u64> = order
        .iter()
        .filter(|&&v| !nodes[v].is_source)
        .map(|&v| id(v))
        .collect();
    let sources: Vec<u64> = order
        .iter()
        .filter(|&&v| nodes[v].is_source)
        .map(|&v| id(v))
        .collect();
    let arrows: Vec<(u64, u64, Option<u32>)> = nodes
        .iter()
        .enumerate()
        .filter_map(|(v, node)| {
            node.parent.map(|(p, c)| {
                if node.is_source {
                    (id(v), id(p), Some(c))
                } else {
                    (id(p), id(v), Some(c))
                }
            })
        })
        .collect();
    Ok(Quiver::from_ids(m, &sinks, &sources, &arrows)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q1_from_generator() {
        let q = build_covering_fragment(2, 2, RootKind::Source).unwrap();
        assert_eq!((q.num_sinks(), q.num_sources()), (2, 1));
        assert_eq!(q.targets_of(2), vec![0, 1]);
    }

    #[test]
    fn small_balls() {
        let q = build_covering_fragment(3, 1, RootKind::Source).unwrap();
        assert_eq!((q.num_sinks(), q.num_sources()), (0, 1));
        let q = build_covering_fragment(2, 1, RootKind::Sink).unwrap();
        assert_eq!((q.num_sinks(), q.num_sources()), (1, 0));
        let q = build_covering_fragment(3, 2, RootKind::Source).unwrap();
        assert_eq!(
            (q.num_sinks(), q.num_sources(), q.arrows().len()),
            (3, 1, 3)
        );
        assert!((0..3).all(|v| q.degree(v) == 1));
    }

    #[test]
    fn zigzag_labels_follow_the_line() {
        let q = build_covering_fragment(2, 4, RootKind::Source).unwrap();
        assert_eq!((q.num_sinks(), q.num_sources()), (4, 3));
        assert_eq!(q.targets_of(4), vec![0, 1]);
        assert_eq!(q.targets_of(5), vec![1, 2]);
        assert_eq!(q.targets_of(6), vec![2, 3]);
        let q = build_covering_fragment(2, 5, RootKind::Sink).unwrap();
        assert_eq!(q.n(), 9);
    }

    #[test]
    fn ball_sizes() {
        // 1 + m + m(m-1) + m(m-1)^2 + ...
        for m in 1..=4u32 {
            for depth in 1..=4u32 {
                let q = build_covering_fragment(m, depth, RootKind::Sink).unwrap();
                let mut expected = 1usize;
                let mut layer = m as usize;
                for _ in 1..depth {
                    expected += layer;
                    layer *= (m as usize).saturating_sub(1);
                }
                assert_eq!(q.n(), expected, "m={m} depth={depth}");
                assert!(q.is_connected());
            }
        }
    }
}
