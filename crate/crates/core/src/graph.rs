//! Undirected, connected simulation topologies.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{arg_err, Error, Result};

pub type NodeId = u32;

/// An undirected connected graph stored in compressed adjacency form.
///
/// The diameter is computed once at construction (one BFS per node).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    diameter: u32,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects self-loops, duplicate
    /// edges (in either orientation), out-of-range endpoints and
    /// disconnected topologies.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::Graph("graph must have at least one node".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::Graph("too many nodes".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Graph(format!("edge ({u}, {v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop at node {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Graph(format!("duplicate edge ({u}, {v})")));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for u in 0..n {
            targets[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        let mut g = Graph {
            offsets,
            targets,
            diameter: 0,
        };
        let mut diameter = 0;
        for s in 0..n as NodeId {
            let dist = g.bfs_from(&[s], u32::MAX);
            for d in dist {
                match d {
                    Some(d) => diameter = diameter.max(d),
                    None => return Err(Error::Graph("graph is not connected".into())),
                }
            }
        }
        g.diameter = diameter;
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.neighbors(u).len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.node_count() as NodeId
    }

    /// Edges with `u < v`, in ascending order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in self.nodes() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Multi-source BFS. `None` marks nodes farther than `limit` hops.
    pub fn bfs_from(&self, sources: &[NodeId], limit: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s as usize].is_none() {
                dist[s as usize] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].unwrap();
            if du >= limit {
                continue;
            }
            for &v in self.neighbors(u) {
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Parses the text format: first line `n`, then one `u v` edge per
    /// line (0-indexed, whitespace separated). Blank lines are skipped.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing node count".into(),
        })?;
        let n: usize = first.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad node count {first:?}"),
        })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let mut parts = l.split_whitespace();
            let mut next = || -> Result<NodeId> {
                let tok = parts.next().ok_or(Error::Parse {
                    line,
                    msg: "expected two endpoints".into(),
                })?;
                tok.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad endpoint {tok:?}"),
                })
            };
            let u = next()?;
            let v = next()?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line,
                    msg: "trailing tokens".into(),
                });
            }
            edges.push((u, v));
        }
        Graph::from_edges(n, &edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.node_count());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

/// Minimum hop distance from any node of `sources` to every node.
pub fn bfs_distances(graph: &Graph, sources: &[NodeId]) -> Result<Vec<u32>> {
    if sources.is_empty() {
        return arg_err("bfs_distances needs at least one source");
    }
    if let Some(&s) = sources.iter().find(|&&s| s as usize >= graph.node_count()) {
        return arg_err(format!("source {s} out of range"));
    }
    Ok(graph
        .bfs_from(sources, u32::MAX)
        .into_iter()
        .map(|d| d.expect("graph is connected"))
        .collect())
}
