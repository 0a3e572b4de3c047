//! Leader election in radio networks without collision detection.

pub mod cluster;
pub mod comm;
pub mod debate;
pub mod elimination;
pub mod overlay;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::channel::RadioChannel;
use crate::config::Constants;
use crate::decay::{DecayConfig, RepeatedDecay};
use crate::engine::Packet;
use crate::graph::{Graph, NodeId};
use crate::log2_ceil;
use crate::rng::{tag, RandomSource};

pub use crate::outcome::{DebateOutcome, ElectionOutcome};
pub use cluster::{cluster_refine, fast_cluster};
pub use comm::{cluster_cast, intercommunicate, Direction};
pub use debate::{elect_leader_nocd, elect_on, run_debate_nocd};
pub use elimination::{elimination, modified_elimination, CandidatePair};
pub use overlay::{build_overlay, Overlay};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub node: NodeId,
    pub id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    Candidate,
    Internal,
    BoundaryActive,
    BoundaryInactive,
    Undecided { marked: bool },
    Unclustered,
}

/// Per-node cluster assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub status: Vec<NodeStatus>,
    /// Candidate ID of the node's cluster.
    pub cluster: Vec<Option<u64>>,
    /// The neighbor whose transmission first recruited the node.
    pub recruiter: Vec<Option<NodeId>>,
}

impl Clustering {
    /// Every candidate is its own cluster; everyone else is unclustered.
    pub fn trivial(n: usize, candidates: &[Candidate]) -> Clustering {
        let mut c = Clustering {
            status: vec![NodeStatus::Unclustered; n],
            cluster: vec![None; n],
            recruiter: vec![None; n],
        };
        for cand in candidates {
            c.status[cand.node as usize] = NodeStatus::Candidate;
            c.cluster[cand.node as usize] = Some(cand.id);
        }
        c
    }

    pub fn is_internal(&self, v: NodeId) -> bool {
        matches!(self.status[v as usize], NodeStatus::Internal | NodeStatus::Candidate)
    }

    pub fn is_boundary(&self, v: NodeId) -> bool {
        matches!(
            self.status[v as usize],
            NodeStatus::BoundaryActive | NodeStatus::BoundaryInactive
        )
    }

    pub fn is_clustered(&self, v: NodeId) -> bool {
        self.cluster[v as usize].is_some()
    }

    /// Clustered nodes that cannot reach their own candidate through
    /// internal nodes of their cluster.
    pub fn integrity_violations(&self, graph: &Graph, candidates: &[Candidate]) -> Vec<NodeId> {
        let n = graph.node_count();
        let mut ok = vec![false; n];
        for cand in candidates {
            if self.cluster[cand.node as usize] != Some(cand.id) {
                continue;
            }
            let mut queue = VecDeque::from([cand.node]);
            ok[cand.node as usize] = true;
            while let Some(u) = queue.pop_front() {
                if !self.is_internal(u) {
                    continue;
                }
                for &v in graph.neighbors(u) {
                    if !ok[v as usize] && self.cluster[v as usize] == Some(cand.id) {
                        ok[v as usize] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        graph
            .nodes()
            .filter(|&v| self.is_clustered(v) && !ok[v as usize])
            .collect()
    }

    /// Largest distance from a cluster's internal nodes to the internal
    /// nodes of the nearest other cluster. `None` with fewer than two
    /// clusters.
    pub fn connectivity_gap(&self, graph: &Graph) -> Option<u32> {
        let mut members: HashMap<u64, Vec<NodeId>> = HashMap::new();
        for v in graph.nodes() {
            if self.is_internal(v) {
                if let Some(c) = self.cluster[v as usize] {
                    members.entry(c).or_default().push(v);
                }
            }
        }
        if members.len() < 2 {
            return None;
        }
        let mut gap = 0;
        for (&c, sources) in &members {
            let dist = graph.bfs_from(sources, u32::MAX);
            let nearest = graph
                .nodes()
                .filter(|&v| self.is_internal(v) && self.cluster[v as usize].is_some_and(|x| x != c))
                .filter_map(|v| dist[v as usize])
                .min()?;
            gap = gap.max(nearest);
        }
        Some(gap)
    }
}

/// Constants and derived lengths shared by every sub-protocol of a run.
#[derive(Debug, Clone)]
pub struct Context<'g> {
    pub graph: &'g Graph,
    pub constants: Constants,
    pub decay: DecayConfig,
    pub id_bits: u32,
}

impl<'g> Context<'g> {
    pub fn new(graph: &'g Graph, constants: &Constants) -> Context<'g> {
        let n = graph.node_count();
        Context {
            graph,
            constants: constants.clone(),
            decay: DecayConfig::for_graph(graph, constants),
            id_bits: (constants.id_factor * log2_ceil(n)).min(60),
        }
    }

    pub fn phase_len(&self) -> u32 {
        self.decay.phase_len
    }

    pub fn schedule(&self) -> RepeatedDecay {
        RepeatedDecay {
            phase_len: self.decay.phase_len,
        }
    }

    pub fn channel(&self) -> RadioChannel<'g> {
        RadioChannel::new(self.graph, self.constants.packet_limit(self.graph.node_count()))
    }

    /// Rounds given to one cluster-restricted Fast-Decay over `reach` hops.
    pub fn cast_budget(&self, reach: u64) -> u64 {
        self.decay.broadcast_budget(reach)
    }

    pub fn id_packet(&self, id: u64) -> Packet {
        Packet::new().push(id, self.id_bits)
    }
}

/// Each node becomes a candidate with probability `min(1, c log2(n) / n)`
/// and draws a random identifier.
pub fn sample_candidates(n: usize, constants: &Constants, seed: &RandomSource) -> Vec<Candidate> {
    let p = if n <= 1 {
        1.0
    } else {
        (constants.candidate_factor * (n as f64).log2() / n as f64).min(1.0)
    };
    let id_bits = (constants.id_factor * log2_ceil(n)).min(60);
    (0..n as NodeId)
        .filter(|&u| seed.bernoulli(p, &[tag::CANDIDATE, u as u64]))
        .map(|u| Candidate {
            node: u,
            id: seed.draw(&[tag::CANDIDATE_ID, u as u64]) >> (64 - id_bits),
        })
        .collect()
}

/// `min(D, ceil(4 n 1.05^i / log2 n))`.
pub fn debate_radius(n: usize, diameter: u32, debate: u32) -> u32 {
    if n <= 1 {
        return diameter;
    }
    let r = (4.0 * n as f64 * 1.05f64.powi(debate as i32) / (n as f64).log2()).ceil();
    (r.min(diameter as f64)) as u32
}

/// Number of debates that shrink `20 log2 n` candidates to one when each
/// removes at least a `1 - keep` fraction.
pub fn debate_count(n: usize, keep: f64) -> u32 {
    let start = 20.0 * (n.max(2) as f64).log2();
    (start.ln() / (1.0 / keep).ln()).ceil().max(1.0) as u32
}
