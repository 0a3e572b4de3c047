//! Graph families used by experiments.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::{tag, RandomSource};

const MAX_RETRIES: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Path,
    Cycle,
    Star,
    Complete,
    /// `r x c` grid with `r` the largest divisor of `n` not above `sqrt(n)`.
    Grid,
    /// G(n, p) redrawn until connected.
    RandomConnected,
    /// Two copies of a path on `(n + 1) / 2` nodes sharing an end node.
    TwoCopies,
}

impl GraphKind {
    pub const ALL: [GraphKind; 7] = [
        GraphKind::Path,
        GraphKind::Cycle,
        GraphKind::Star,
        GraphKind::Complete,
        GraphKind::Grid,
        GraphKind::RandomConnected,
        GraphKind::TwoCopies,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphKind::Path => "path",
            GraphKind::Cycle => "cycle",
            GraphKind::Star => "star",
            GraphKind::Complete => "complete",
            GraphKind::Grid => "grid",
            GraphKind::RandomConnected => "random_connected",
            GraphKind::TwoCopies => "two_copies",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<GraphKind> {
        let s = s.to_ascii_lowercase().replace('-', "_");
        GraphKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown graph kind {s:?}")))
    }
}

/// Default edge probability for random graphs: twice the connectivity
/// threshold.
pub fn default_edge_probability(n: usize) -> f64 {
    if n <= 2 {
        1.0
    } else {
        (2.0 * (n as f64).ln() / n as f64).min(1.0)
    }
}

fn grid_shape(n: usize) -> (usize, usize) {
    let mut r = (n as f64).sqrt() as usize;
    while r > 1 && !n.is_multiple_of(r) {
        r -= 1;
    }
    let r = r.max(1);
    (r, n / r)
}

pub fn path_edges(n: usize) -> Vec<(NodeId, NodeId)> {
    (1..n as NodeId).map(|i| (i - 1, i)).collect()
}

/// A connected graph of the requested family with `n` nodes. `p` is only
/// read for random graphs.
pub fn generate_graph(kind: GraphKind, n: usize, p: Option<f64>, seed: &RandomSource) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Argument("graphs need at least one node".into()));
    }
    let m = n as NodeId;
    match kind {
        GraphKind::Path => Graph::from_edges(n, &path_edges(n)),
        GraphKind::Cycle => {
            let mut e = path_edges(n);
            if n >= 3 {
                e.push((m - 1, 0));
            }
            Graph::from_edges(n, &e)
        }
        GraphKind::Star => Graph::from_edges(n, &(1..m).map(|i| (0, i)).collect::<Vec<_>>()),
        GraphKind::Complete => {
            let e: Vec<_> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
            Graph::from_edges(n, &e)
        }
        GraphKind::Grid => {
            let (r, c) = grid_shape(n);
            let mut e = Vec::new();
            for i in 0..r {
                for j in 0..c {
                    let v = (i * c + j) as NodeId;
                    if j + 1 < c {
                        e.push((v, v + 1));
                    }
                    if i + 1 < r {
                        e.push((v, v + c as NodeId));
                    }
                }
            }
            Graph::from_edges(n, &e)
        }
        GraphKind::RandomConnected => {
            let p = p.unwrap_or_else(|| default_edge_probability(n));
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Argument(format!("edge probability {p} outside [0, 1]")));
            }
            for attempt in 0..MAX_RETRIES {
                let mut rng = seed.rng(&[tag::GRAPH, attempt]);
                let e: Vec<_> = (0..m)
                    .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
                    .filter(|_| rng.gen_bool(p))
                    .collect();
                if spans(n, &e) {
                    return Graph::from_edges(n, &e);
                }
            }
            Err(Error::Argument(format!(
                "no connected G({n}, {p}) in {MAX_RETRIES} draws"
            )))
        }
        GraphKind::TwoCopies => {
            let half = n.div_ceil(2);
            two_copies(&Graph::from_edges(half, &path_edges(half))?, 0)
        }
    }
}

fn spans(n: usize, edges: &[(NodeId, NodeId)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parts = n;
    for &(a, b) in edges {
        let (ra, rb) = (root(&mut parent, a as usize), root(&mut parent, b as usize));
        if ra != rb {
            parent[ra] = rb;
            parts -= 1;
        }
    }
    parts == 1
}

/// Two disjoint copies of `graph` with the two copies of `v` identified.
/// Node `u` of the first copy keeps index `u`; in the second copy it gets
/// index `n + u` for `u < v` and `n + u - 1` for `u > v`.
pub fn two_copies(graph: &Graph, v: NodeId) -> Result<Graph> {
    let n = graph.node_count();
    if v as usize >= n {
        return Err(Error::Argument(format!("node {v} not in a {n}-node graph")));
    }
    let second = |u: NodeId| second_copy(n, v, u);
    let mut e = Vec::new();
    for (a, b) in graph.edges() {
        e.push((a, b));
        e.push((second(a), second(b)));
    }
    Graph::from_edges(2 * n - 1, &e)
}

/// Index of the second copy of `u` in [`two_copies`].
pub fn second_copy(n: usize, v: NodeId, u: NodeId) -> NodeId {
    use std::cmp::Ordering::*;
    match u.cmp(&v) {
        Equal => v,
        Less => n as NodeId + u,
        Greater => n as NodeId + u - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(kind: GraphKind, n: usize) -> Graph {
        generate_graph(kind, n, None, &RandomSource::new(1)).unwrap()
    }

    #[test]
    fn families() {
        let p = gen(GraphKind::Path, 5);
        assert_eq!((p.node_count(), p.edge_count(), p.diameter()), (5, 4, 4));
        assert_eq!(gen(GraphKind::Complete, 8).diameter(), 1);
        assert_eq!(gen(GraphKind::Cycle, 10).diameter(), 5);
        assert_eq!(gen(GraphKind::Star, 9).diameter(), 2);
        let g = gen(GraphKind::Grid, 64);
        assert_eq!((g.edge_count(), g.diameter()), (112, 14));
        assert_eq!(gen(GraphKind::Grid, 128).diameter(), 7 + 15);
        assert_eq!(gen(GraphKind::RandomConnected, 100).node_count(), 100);
        assert_eq!(gen(GraphKind::TwoCopies, 9).diameter(), 8);
    }

    #[test]
    fn two_copies_of_a_small_graph() {
        let g = generate_graph(GraphKind::RandomConnected, 10, Some(0.4), &RandomSource::new(3)).unwrap();
        for v in 0..10 {
            let t = two_copies(&g, v).unwrap();
            assert_eq!(t.node_count(), 19);
            assert_eq!(t.edge_count(), 2 * g.edge_count());
            assert!(t.diameter() <= 2 * g.diameter());
            for (a, b) in g.edges() {
                assert!(t.has_edge(second_copy(10, v, a), second_copy(10, v, b)));
            }
        }
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in GraphKind::ALL {
            assert_eq!(k.name().parse::<GraphKind>().unwrap(), k);
        }
        assert!("torus".parse::<GraphKind>().is_err());
    }
}
