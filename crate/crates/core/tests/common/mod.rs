#![allow(dead_code)]

use std::collections::VecDeque;

use radiole::harness::{generate_graph, GraphKind};
use radiole::nocd::Candidate;
use radiole::{Graph, NodeId, RandomSource};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n as NodeId).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Multi-source BFS written out by hand, kept apart from the library's.
pub fn bfs(graph: &Graph, sources: &[NodeId]) -> Vec<Option<u32>> {
    let mut dist = vec![None; graph.node_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s as usize].is_none() {
            dist[s as usize] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u as usize].unwrap();
        for &v in graph.neighbors(u) {
            if dist[v as usize].is_none() {
                dist[v as usize] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// A connected random graph on `lo..=hi` nodes with a random density.
pub fn random_connected(seed: &RandomSource, key: u64, lo: usize, hi: usize) -> Graph {
    let mut rng = seed.rng(&[key]);
    let n = rng.gen_range(lo..=hi);
    let p = rng
        .gen_range(0.05..0.5f64)
        .max(2.0 * (n as f64).ln() / n as f64)
        .min(1.0);
    generate_graph(GraphKind::RandomConnected, n, Some(p), &seed.derive(&[key, 1])).unwrap()
}

/// `count` distinct nodes, each with a distinct ID below `2^id_bits`.
pub fn random_candidates(seed: &RandomSource, key: u64, graph: &Graph, count: usize, id_bits: u32) -> Vec<Candidate> {
    let mut rng = seed.rng(&[key, 2]);
    let mut nodes: Vec<NodeId> = graph.nodes().collect();
    nodes.shuffle(&mut rng);
    let mut ids: Vec<u64> = Vec::new();
    while ids.len() < count.min(nodes.len()) {
        let id = rng.gen_range(0..1u64 << id_bits);
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    nodes
        .iter()
        .zip(ids)
        .map(|(&node, id)| Candidate { node, id })
        .collect()
}
