//! Per-debate and per-election results shared by both models.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::nocd::Candidate;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebateOutcome {
    /// 1-based.
    pub index: u32,
    pub radius: u32,
    pub incoming: usize,
    /// Incoming candidates with another candidate within twice the radius.
    pub non_isolated: usize,
    pub survivors: Vec<Candidate>,
    pub rounds: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectionOutcome {
    /// Leader ID output by each node, `None` where nothing arrived.
    pub outputs: Vec<Option<u64>>,
    pub candidates: Vec<Candidate>,
    /// Debates that were simulated; once a single candidate remains the
    /// rest are accounted for without simulation.
    pub debates: Vec<DebateOutcome>,
    pub debate_count: u32,
    pub rounds: u64,
}

impl ElectionOutcome {
    /// All nodes output the same ID, and that ID belongs to a candidate.
    pub fn agreed_leader(&self) -> Option<u64> {
        let first = (*self.outputs.first()?)?;
        let agree = self.outputs.iter().all(|&o| o == Some(first));
        (agree && self.candidates.iter().any(|c| c.id == first)).then_some(first)
    }
}

/// Candidates with another candidate within `hops`.
pub fn non_isolated_count(graph: &Graph, candidates: &[Candidate], hops: u32) -> usize {
    if candidates.len() < 2 {
        return 0;
    }
    let mut is_cand = vec![false; graph.node_count()];
    for c in candidates {
        is_cand[c.node as usize] = true;
    }
    candidates
        .iter()
        .filter(|c| {
            let dist = graph.bfs_from(&[c.node], hops);
            graph
                .nodes()
                .any(|v| v != c.node && is_cand[v as usize] && dist[v as usize].is_some())
        })
        .count()
}
