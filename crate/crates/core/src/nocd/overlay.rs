//! The sparse candidate overlay: one parent edge per candidate, and up to
//! five children each candidate knows about.

use std::collections::{HashMap, HashSet};

use crate::channel::RadioChannel;
use crate::config::Constants;
use crate::graph::{Graph, NodeId};
use crate::rng::{tag, RandomSource};

use super::comm::{cluster_cast_on, intercommunicate_on, Direction};
use super::{Candidate, Clustering, Context};

/// How many children a candidate needs to know to tell its degree apart
/// from "at least five".
pub const KNOWN_CHILDREN_CAP: usize = 5;

/// Indices refer to positions in `candidates`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlay {
    pub candidates: Vec<Candidate>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub known_children: Vec<Vec<usize>>,
}

impl Overlay {
    /// Overlay with the given parent choices where every candidate knows
    /// its first five children.
    pub fn from_parents(candidates: Vec<Candidate>, parent: Vec<Option<usize>>) -> Overlay {
        let k = candidates.len();
        let mut children = vec![Vec::new(); k];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(i);
            }
        }
        let known_children = children
            .iter()
            .map(|c| c.iter().copied().take(KNOWN_CHILDREN_CAP).collect())
            .collect();
        Overlay {
            candidates,
            parent,
            children,
            known_children,
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Children plus the parent edge.
    pub fn degree(&self, i: usize) -> usize {
        self.children[i].len() + usize::from(self.parent[i].is_some())
    }

    /// What the candidate itself can tell: `min(degree, 5)` computed from
    /// the children it knows.
    pub fn flat_degree(&self, i: usize) -> u8 {
        let d = self.known_children[i].len() + usize::from(self.parent[i].is_some());
        d.min(KNOWN_CHILDREN_CAP) as u8
    }

    /// Undirected neighbors in the sparse overlay.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.parent[i]
            .into_iter()
            .chain(self.children[i].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.parent[i].is_none() && self.children[i].is_empty()
    }

    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            if self.parent[i] == Some(i) {
                out.push(format!("candidate {i} is its own parent"));
            }
            let kc = &self.known_children[i];
            if kc.iter().any(|c| !self.children[i].contains(c)) {
                out.push(format!("candidate {i} knows a non-child"));
            }
            if kc.len() != self.children[i].len().min(KNOWN_CHILDREN_CAP) {
                out.push(format!(
                    "candidate {i} knows {} of {} children",
                    kc.len(),
                    self.children[i].len()
                ));
            }
        }
        out
    }
}

/// Radio construction of the overlay on top of a refined clustering.
/// `reach` bounds the hop distance of every cluster cast.
pub fn build_overlay_on(
    ch: &mut RadioChannel,
    ctx: &Context,
    cl: &Clustering,
    candidates: &[Candidate],
    reach: u64,
    seed: &RandomSource,
) -> Overlay {
    let n = ctx.graph.node_count();
    let bits = ctx.id_bits;
    let seed = seed.derive(&[tag::OVERLAY]);
    let mut index: HashMap<u64, usize> = HashMap::new();
    for (i, c) in candidates.iter().enumerate() {
        index.entry(c.id).or_insert(i);
    }
    let cast = |ch: &mut RadioChannel, dir, msgs: &[(NodeId, u64)], step: u64| {
        cluster_cast_on(ch, ctx, cl, dir, msgs, bits, reach, &seed.derive(&[step]))
    };

    // Candidate IDs up, then across cluster borders.
    let ids: Vec<(NodeId, u64)> = candidates.iter().map(|c| (c.node, c.id)).collect();
    let own = cast(ch, Direction::Up, &ids, 0);
    let heard = intercommunicate_on(ch, ctx, cl, &own, bits, &seed.derive(&[1]));

    // The first foreign ID to reach the candidate becomes its parent.
    let offers: Vec<(NodeId, u64)> = (0..n)
        .filter_map(|v| heard[v].first().map(|&(c, _)| (v as NodeId, c)))
        .collect();
    let down = cast(ch, Direction::Down, &offers, 2);
    let parent: Vec<Option<usize>> = candidates
        .iter()
        .map(|c| {
            down[c.node as usize]
                .and_then(|p| index.get(&p).copied())
                .filter(|&p| candidates[p].id != c.id)
        })
        .collect();

    // Parents up, then announced across borders so parents learn children.
    let announce: Vec<(NodeId, u64)> = candidates
        .iter()
        .zip(&parent)
        .filter_map(|(c, p)| p.map(|p| (c.node, candidates[p].id)))
        .collect();
    let my_parent = cast(ch, Direction::Up, &announce, 3);
    let announced = intercommunicate_on(ch, ctx, cl, &my_parent, bits, &seed.derive(&[4]));
    // child IDs each internal node has heard about, in order
    let child_reports: Vec<Vec<u64>> = (0..n)
        .map(|v| match cl.cluster[v] {
            Some(c) if cl.is_internal(v as NodeId) => announced[v]
                .iter()
                .filter(|&&(_, p)| p == c)
                .map(|&(child, _)| child)
                .collect(),
            _ => Vec::new(),
        })
        .collect();

    // Tell me something new: each turn one unknown child goes down and the
    // candidate acknowledges it up.
    let mut known: Vec<Vec<usize>> = vec![Vec::new(); candidates.len()];
    let mut acked: Vec<HashSet<u64>> = vec![HashSet::new(); n];
    for turn in 0..KNOWN_CHILDREN_CAP as u64 {
        let reports: Vec<(NodeId, u64)> = (0..n)
            .filter_map(|v| {
                let c = child_reports[v].iter().find(|c| !acked[v].contains(c))?;
                Some((v as NodeId, *c))
            })
            .collect();
        let got = cast(ch, Direction::Down, &reports, 5 + 2 * turn);
        let mut acks = Vec::new();
        for (i, c) in candidates.iter().enumerate() {
            let Some(child) = got[c.node as usize] else { continue };
            let Some(&j) = index.get(&child) else { continue };
            if j != i && !known[i].contains(&j) && known[i].len() < KNOWN_CHILDREN_CAP {
                known[i].push(j);
                acks.push((c.node, child));
            }
        }
        let up = cast(ch, Direction::Up, &acks, 6 + 2 * turn);
        for v in 0..n {
            if let Some(child) = up[v] {
                acked[v].insert(child);
            }
        }
    }

    let mut overlay = Overlay::from_parents(candidates.to_vec(), parent);
    overlay.known_children = known;
    overlay
}

pub fn build_overlay(
    graph: &Graph,
    clustering: &Clustering,
    candidates: &[Candidate],
    constants: &Constants,
    seed: &RandomSource,
) -> Overlay {
    let ctx = Context::new(graph, constants);
    let mut ch = ctx.channel();
    build_overlay_on(
        &mut ch,
        &ctx,
        clustering,
        candidates,
        graph.diameter().max(1) as u64,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::super::NodeStatus;
    use super::*;

    /// Star of clusters: a center candidate 0 with `leaves` paths of length
    /// 4 hanging off it, each ending in a candidate. Boundaries sit at hop
    /// 2 and 3 of each arm.
    fn star(leaves: u32) -> (Graph, Clustering, Vec<Candidate>) {
        let n = 1 + 4 * leaves;
        let mut edges = Vec::new();
        for a in 0..leaves {
            let base = 1 + 4 * a;
            edges.push((0, base));
            for k in 0..3 {
                edges.push((base + k, base + k + 1));
            }
        }
        let g = Graph::from_edges(n as usize, &edges).unwrap();
        let mut cands = vec![Candidate { node: 0, id: 500 }];
        for a in 0..leaves {
            cands.push(Candidate {
                node: 4 + 4 * a,
                id: 10 + a as u64,
            });
        }
        let mut cl = Clustering::trivial(n as usize, &cands);
        for a in 0..leaves {
            let base = 1 + 4 * a;
            let leaf_id = 10 + a as u64;
            cl.cluster[base as usize] = Some(500);
            cl.status[base as usize] = NodeStatus::Internal;
            cl.cluster[base as usize + 1] = Some(500);
            cl.status[base as usize + 1] = NodeStatus::BoundaryInactive;
            cl.cluster[base as usize + 2] = Some(leaf_id);
            cl.status[base as usize + 2] = NodeStatus::BoundaryInactive;
        }
        (g, cl, cands)
    }

    #[test]
    fn two_clusters_pick_each_other() {
        let (g, cl, cands) = star(1);
        let o = build_overlay(&g, &cl, &cands, &Constants::default(), &RandomSource::new(1));
        assert_eq!(o.parent, vec![Some(1), Some(0)]);
        assert_eq!(o.known_children, vec![vec![1], vec![0]]);
        assert!(o.invariant_violations().is_empty());
    }

    #[test]
    fn star_center_knows_five_of_seven() {
        let (g, cl, cands) = star(7);
        let o = build_overlay(&g, &cl, &cands, &Constants::default(), &RandomSource::new(2));
        for i in 1..8 {
            assert_eq!(o.parent[i], Some(0));
        }
        assert_eq!(o.children[0].len() + usize::from(o.parent[0].is_some()), o.degree(0));
        assert_eq!(o.children[0].len(), 7);
        assert_eq!(o.known_children[0].len(), 5);
        assert_eq!(o.flat_degree(0), 5);
        assert!(o.invariant_violations().is_empty(), "{:?}", o.invariant_violations());
    }

    #[test]
    fn isolated_cluster_has_no_edges() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let cands = [Candidate { node: 1, id: 5 }];
        let mut cl = Clustering::trivial(3, &cands);
        for v in [0, 2] {
            cl.cluster[v] = Some(5);
            cl.status[v] = NodeStatus::Internal;
        }
        let o = build_overlay(&g, &cl, &cands, &Constants::default(), &RandomSource::new(3));
        assert_eq!(o.parent, vec![None]);
        assert!(o.children[0].is_empty() && o.is_isolated(0));
    }
}
