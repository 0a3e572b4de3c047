//! The elimination rule, in its original and degree-capped forms, and its
//! radio implementation on the overlay.

use serde::{Deserialize, Serialize};

use crate::channel::RadioChannel;
use crate::graph::NodeId;
use crate::rng::{tag, RandomSource};

use super::comm::{cluster_cast_on, intercommunicate_on, Direction};
use super::overlay::{Overlay, KNOWN_CHILDREN_CAP};
use super::Context;

/// Compared by degree first, then ID.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CandidatePair {
    pub degree: u8,
    pub id: u64,
}

const DEGREE_BITS: u32 = 3;

impl CandidatePair {
    fn pack(self, id_bits: u32) -> u64 {
        ((self.degree as u64) << id_bits) | self.id
    }

    fn unpack(word: u64, id_bits: u32) -> CandidatePair {
        CandidatePair {
            degree: (word >> id_bits) as u8,
            id: word & ((1 << id_bits) - 1),
        }
    }
}

/// The plain rule on an undirected graph given as adjacency lists: a node
/// survives iff no neighbor has a larger (degree, ID) pair. Returns the
/// survival flag per node.
pub fn elimination(adjacency: &[Vec<usize>], ids: &[u64]) -> Vec<bool> {
    let pair = |i: usize| (adjacency[i].len(), ids[i]);
    (0..adjacency.len())
        .map(|i| adjacency[i].iter().all(|&j| pair(j) < pair(i)))
        .collect()
}

/// The degree-capped rule on the overlay, assuming every message arrives:
/// flattened degree 5 survives, otherwise the candidate must beat its
/// parent and its known children.
pub fn modified_elimination(overlay: &Overlay) -> Vec<bool> {
    let pair = |i: usize| CandidatePair {
        degree: overlay.flat_degree(i),
        id: overlay.candidates[i].id,
    };
    (0..overlay.len())
        .map(|i| {
            let own = pair(i);
            own.degree as usize >= KNOWN_CHILDREN_CAP
                || overlay.parent[i]
                    .into_iter()
                    .chain(overlay.known_children[i].iter().copied())
                    .all(|j| pair(j) < own)
        })
        .collect()
}

/// The same rule run over the radio: each cluster learns its candidate's
/// pair and parent, pairs cross borders, the parent's pair goes down to
/// each child and the known children's pairs go down to each parent, one
/// per turn. Returns the survival flag per candidate.
pub fn radio_elimination_on(
    ch: &mut RadioChannel,
    ctx: &Context,
    cl: &super::Clustering,
    overlay: &Overlay,
    reach: u64,
    seed: &RandomSource,
) -> Vec<bool> {
    let n = ctx.graph.node_count();
    let bits = ctx.id_bits;
    let wide = bits + DEGREE_BITS;
    let seed = seed.derive(&[tag::ELIMINATION]);
    let cands = &overlay.candidates;
    let own: Vec<CandidatePair> = (0..overlay.len())
        .map(|i| CandidatePair {
            degree: overlay.flat_degree(i),
            id: cands[i].id,
        })
        .collect();
    // Up: (flattened degree, parent ID), the cluster ID being the own ID.
    let up_msgs: Vec<(NodeId, u64)> = (0..overlay.len())
        .map(|i| {
            let parent_id = overlay.parent[i].map_or(cands[i].id, |p| cands[p].id);
            (
                cands[i].node,
                CandidatePair {
                    degree: own[i].degree,
                    id: parent_id,
                }
                .pack(bits),
            )
        })
        .collect();
    let held = cluster_cast_on(ch, ctx, cl, Direction::Up, &up_msgs, wide, reach, &seed.derive(&[0]));
    let heard = intercommunicate_on(ch, ctx, cl, &held, wide, &seed.derive(&[1]));
    // (foreign cluster, its degree, its parent) per internal node
    let heard: Vec<Vec<(u64, u8, u64)>> = heard
        .iter()
        .map(|list| {
            list.iter()
                .map(|&(c, w)| {
                    let p = CandidatePair::unpack(w, bits);
                    (c, p.degree, p.id)
                })
                .collect()
        })
        .collect();
    let my_parent = |v: usize| held[v].map(|w| CandidatePair::unpack(w, bits).id);

    let mut received: Vec<Vec<CandidatePair>> = vec![Vec::new(); overlay.len()];

    // Parent's pair down to each child.
    let from_parent: Vec<(NodeId, u64)> = (0..n)
        .filter_map(|v| {
            let parent = my_parent(v).filter(|&p| Some(p) != cl.cluster[v])?;
            let &(c, d, _) = heard[v].iter().find(|&&(c, _, _)| c == parent)?;
            Some((v as NodeId, CandidatePair { degree: d, id: c }.pack(bits)))
        })
        .collect();
    let got = cluster_cast_on(
        ch,
        ctx,
        cl,
        Direction::Down,
        &from_parent,
        wide,
        reach,
        &seed.derive(&[2]),
    );
    for (i, c) in cands.iter().enumerate() {
        if overlay.parent[i].is_some() {
            if let Some(w) = got[c.node as usize] {
                received[i].push(CandidatePair::unpack(w, bits));
            }
        }
    }

    // Known children's pairs, one per turn: the candidate names the child
    // and nodes that heard it send its pair down.
    for turn in 0..KNOWN_CHILDREN_CAP {
        let ask: Vec<(NodeId, u64)> = (0..overlay.len())
            .filter_map(|i| {
                overlay.known_children[i]
                    .get(turn)
                    .map(|&j| (cands[i].node, cands[j].id))
            })
            .collect();
        let step = 3 + 2 * turn as u64;
        let asked = cluster_cast_on(ch, ctx, cl, Direction::Up, &ask, bits, reach, &seed.derive(&[step]));
        let answers: Vec<(NodeId, u64)> = (0..n)
            .filter_map(|v| {
                let child = asked[v]?;
                let &(c, d, _) = heard[v].iter().find(|&&(c, _, _)| c == child)?;
                Some((v as NodeId, CandidatePair { degree: d, id: c }.pack(bits)))
            })
            .collect();
        let got = cluster_cast_on(
            ch,
            ctx,
            cl,
            Direction::Down,
            &answers,
            wide,
            reach,
            &seed.derive(&[step + 1]),
        );
        for (i, c) in cands.iter().enumerate() {
            if overlay.known_children[i].get(turn).is_some() {
                if let Some(w) = got[c.node as usize] {
                    received[i].push(CandidatePair::unpack(w, bits));
                }
            }
        }
    }

    (0..overlay.len())
        .map(|i| own[i].degree as usize >= KNOWN_CHILDREN_CAP || received[i].iter().all(|p| *p < own[i]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::Candidate;
    use super::*;
    use proptest::prelude::*;

    fn cand(i: u32, id: u64) -> Candidate {
        Candidate { node: i, id }
    }

    #[test]
    fn path_of_three() {
        // v = 1 is the parent of u = 0 and w = 2
        let o = Overlay::from_parents(vec![cand(0, 1), cand(1, 2), cand(2, 3)], vec![Some(1), None, Some(1)]);
        assert_eq!((o.degree(0), o.degree(1), o.degree(2)), (1, 2, 1));
        assert_eq!(modified_elimination(&o), vec![false, true, false]);
    }

    #[test]
    fn path_of_three_with_parent_edge() {
        // degrees (1, 3, 1): v also has a parent of its own, u
        let o = Overlay::from_parents(
            vec![cand(0, 1), cand(1, 2), cand(2, 3)],
            vec![Some(1), Some(0), Some(1)],
        );
        assert_eq!(o.degree(1), 3);
        assert_eq!(modified_elimination(&o), vec![false, true, false]);
    }

    #[test]
    fn high_degree_survives() {
        let mut parent = vec![Some(0); 7];
        parent[0] = Some(1);
        let cands: Vec<_> = (0..7)
            .map(|i| cand(i, if i == 0 { 0 } else { 100 + i as u64 }))
            .collect();
        let o = Overlay::from_parents(cands, parent);
        assert_eq!(o.degree(0), 7);
        assert!(modified_elimination(&o)[0]);
    }

    #[test]
    fn isolated_survives() {
        let o = Overlay::from_parents(vec![cand(0, 9)], vec![None]);
        assert_eq!(modified_elimination(&o), vec![true]);
    }

    fn adjacency(k: usize, mask: u64) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); k];
        let mut bit = 0;
        for i in 0..k {
            for j in i + 1..k {
                if mask >> bit & 1 == 1 {
                    adj[i].push(j);
                    adj[j].push(i);
                }
                bit += 1;
            }
        }
        adj
    }

    fn check_half(adj: &[Vec<usize>], ids: &[u64]) {
        let alive = elimination(adj, ids);
        let non_isolated = adj.iter().filter(|a| !a.is_empty()).count();
        let removed = alive.iter().filter(|&&a| !a).count();
        assert!(2 * removed >= non_isolated, "{adj:?} {ids:?}");
        let best = (0..adj.len()).max_by_key(|&i| (adj[i].len(), ids[i])).unwrap();
        assert!(alive[best]);
    }

    #[test]
    fn elimination_removes_half_on_all_small_graphs() {
        for k in 1..=5usize {
            let pairs = k * (k - 1) / 2;
            for mask in 0..1u64 << pairs {
                let adj = adjacency(k, mask);
                let ids: Vec<u64> = (0..k as u64).map(|i| (i * 7 + 3) % k as u64).collect();
                check_half(&adj, &ids);
            }
        }
    }

    proptest! {
        #[test]
        fn elimination_removes_half(k in 6usize..=10, mask in any::<u64>(), perm_seed in any::<u64>()) {
            let adj = adjacency(k, mask);
            let mut ids: Vec<u64> = (0..k as u64).collect();
            let mut s = perm_seed;
            for i in (1..k).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ids.swap(i, (s >> 33) as usize % (i + 1));
            }
            check_half(&adj, &ids);
        }

        #[test]
        fn modified_removes_a_tenth(k in 2usize..40, parents in proptest::collection::vec(any::<u32>(), 40), ids in proptest::collection::vec(any::<u32>(), 40)) {
            // arbitrary parent choices; a parent is never the node itself
            let parent: Vec<Option<usize>> = (0..k)
                .map(|i| {
                    let r = parents[i] as usize % (k + 1);
                    (r < k && r != i).then_some(r)
                })
                .collect();
            let cands: Vec<Candidate> = (0..k).map(|i| cand(i as u32, ids[i] as u64 * 64 + i as u64)).collect();
            let o = Overlay::from_parents(cands, parent);
            let alive = modified_elimination(&o);
            let non_isolated = (0..k).filter(|&i| !o.neighbors(i).is_empty()).count();
            let removed = alive.iter().filter(|&&a| !a).count();
            prop_assert!(10 * removed >= non_isolated);
            // the overall best pair survives, as does every capped one
            let best = (0..k).max_by_key(|&i| (o.flat_degree(i), o.candidates[i].id)).unwrap();
            prop_assert!(alive[best]);
            for i in 0..k {
                if o.flat_degree(i) >= 5 {
                    prop_assert!(alive[i]);
                }
            }
        }
    }
}
