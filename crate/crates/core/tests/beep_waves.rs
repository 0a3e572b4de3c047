//! Layered wave evaluation against round-by-round runs and hand-written
//! oracles on random graphs.

mod common;

use proptest::prelude::*;
use radiole::beep::{self, literal, waves, BeepClustering, Numbering};
use radiole::channel::BeepChannel;
use radiole::codes::{Codeword, HashedSiCode};
use radiole::nocd::Candidate;
use radiole::{Graph, NodeId, RandomSource};
use rand::Rng;

use common::{bfs, random_candidates, random_connected};

const ID_BITS: u32 = 12;

struct Instance {
    graph: Graph,
    cands: Vec<Candidate>,
    num: Numbering,
    cl: BeepClustering,
}

fn instance(seed: u64, horizon_cut: bool) -> Instance {
    let src = RandomSource::new(seed);
    let graph = random_connected(&src, 0, 4, 40);
    let count = src.rng(&[1]).gen_range(1..=graph.node_count().min(7));
    let cands = random_candidates(&src, 0, &graph, count, ID_BITS);
    let nodes: Vec<NodeId> = cands.iter().map(|c| c.node).collect();
    let horizon = horizon_cut.then(|| src.rng(&[2]).gen_range(0..=graph.diameter()));
    let num = beep::numbering(&graph, &nodes, horizon);
    let code = HashedSiCode::new(ID_BITS, 1, src.derive(&[3])).unwrap();
    let cl = beep::beep_cluster(&graph, &num, &cands, &code);
    Instance { graph, cands, num, cl }
}

fn random_word(src: &RandomSource, key: &[u64], len: usize) -> Codeword {
    let mut rng = src.rng(key);
    Codeword::from_words(len, (0..len.div_ceil(64)).map(|_| rng.gen()).collect())
}

fn messages(graph: &Graph, seed: u64, len: usize) -> Vec<Option<Codeword>> {
    let src = RandomSource::new(seed ^ 0x5eed);
    graph
        .nodes()
        .map(|v| Some(random_word(&src, &[v as u64], len)))
        .collect()
}

/// Boundaries heard by `b` in an intercommunication: adjacent ones and
/// those one unclustered node away.
fn reach(inst: &Instance, b: NodeId) -> Vec<NodeId> {
    let g = &inst.graph;
    let mut out = Vec::new();
    for &w in g.neighbors(b) {
        if inst.cl.is_boundary(w) {
            out.push(w);
        } else if !inst.cl.is_clustered(w) {
            out.extend(
                g.neighbors(w)
                    .iter()
                    .copied()
                    .filter(|&u| u != b && inst.cl.is_boundary(u)),
            );
        }
    }
    out
}

fn as_number(word: &Codeword) -> u64 {
    (0..word.len()).fold(0, |acc, i| acc << 1 | word.get(i) as u64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn numbering_is_bfs(seed in any::<u64>(), cut in any::<bool>()) {
        let inst = instance(seed, cut);
        let nodes: Vec<NodeId> = inst.cands.iter().map(|c| c.node).collect();
        let want: Vec<Option<u32>> = bfs(&inst.graph, &nodes)
            .into_iter()
            .map(|d| d.filter(|&d| d <= inst.num.horizon))
            .collect();
        prop_assert_eq!(&inst.num.dist, &want);
    }

    #[test]
    fn uplink_delivers_nearest_candidates(seed in any::<u64>(), len in 1usize..20, cut in any::<bool>()) {
        let inst = instance(seed, cut);
        let src = RandomSource::new(seed);
        let msgs: Vec<(NodeId, Codeword)> =
            inst.cands.iter().map(|c| (c.node, random_word(&src, &[9, c.id], len))).collect();
        let layered = waves::beep_uplink(&inst.graph, &inst.num, &msgs, len);
        let mut ch = BeepChannel::new(&inst.graph);
        let stepped = literal::uplink(&mut ch, &inst.num, &msgs, len);
        prop_assert_eq!(&layered, &stepped);
        prop_assert_eq!(ch.rounds(), waves::wave_rounds(inst.num.horizon, len));
        let per_cand: Vec<Vec<Option<u32>>> = msgs.iter().map(|(c, _)| bfs(&inst.graph, &[*c])).collect();
        for v in inst.graph.nodes() {
            let mut want = Codeword::zeros(len);
            if let Some(d) = inst.num.get(v) {
                for (i, (_, m)) in msgs.iter().enumerate() {
                    if per_cand[i][v as usize] == Some(d) {
                        want.or_assign(m);
                    }
                }
            }
            prop_assert_eq!(&layered[v as usize], &want, "node {}", v);
        }
    }

    #[test]
    fn clustering_matches_round_by_round(seed in any::<u64>(), cut in any::<bool>()) {
        let inst = instance(seed, cut);
        let code = HashedSiCode::new(ID_BITS, 1, RandomSource::new(seed).derive(&[3])).unwrap();
        let stepped = literal::cluster(&mut BeepChannel::new(&inst.graph), &inst.num, &inst.cands, &code);
        prop_assert_eq!(&inst.cl, &stepped);
        // clustered nodes belong to their unique nearest candidate
        let ids: Vec<u64> = inst.cands.iter().map(|c| c.id).collect();
        for v in inst.graph.nodes() {
            if let Some(id) = inst.cl.cluster[v as usize] {
                prop_assert!(ids.contains(&id));
                prop_assert!(inst.num.get(v).is_some());
            }
        }
    }

    #[test]
    fn downlink_is_the_cluster_or(seed in any::<u64>(), len in 1usize..20, cut in any::<bool>()) {
        let inst = instance(seed, cut);
        let msgs = messages(&inst.graph, seed, len);
        let layered = waves::beep_downlink(&inst.graph, &inst.num, &inst.cl, &msgs, len);
        let mut ch = BeepChannel::new(&inst.graph);
        let stepped = literal::downlink(&mut ch, &inst.num, &inst.cl, &msgs, len);
        prop_assert_eq!(ch.rounds(), waves::wave_rounds(inst.num.horizon, len));
        for c in &inst.cands {
            prop_assert_eq!(&layered[c.node as usize], &stepped[c.node as usize]);
            let mut want = Codeword::zeros(len);
            for v in inst.graph.nodes() {
                if inst.cl.is_boundary(v) && inst.cl.cluster[v as usize] == Some(c.id) {
                    want.or_assign(msgs[v as usize].as_ref().unwrap());
                }
            }
            if inst.cl.cluster[c.node as usize] == Some(c.id) {
                prop_assert_eq!(layered[c.node as usize].as_ref(), Some(&want));
            }
        }
    }

    #[test]
    fn intercom_reaches_two_hops_through_gaps(seed in any::<u64>(), len in 1usize..20) {
        let inst = instance(seed, false);
        let msgs = messages(&inst.graph, seed, len);
        let layered = waves::beep_intercommunicate(&inst.graph, &inst.cl, &msgs, len);
        let mut ch = BeepChannel::new(&inst.graph);
        let stepped = literal::intercom(&mut ch, &inst.cl, &msgs, len);
        prop_assert_eq!(&layered, &stepped);
        prop_assert_eq!(ch.rounds(), waves::paired_rounds(len));
        for v in inst.graph.nodes() {
            if !inst.cl.is_boundary(v) {
                prop_assert!(layered[v as usize].is_none());
                continue;
            }
            let mut want = msgs[v as usize].clone().unwrap();
            for u in reach(&inst, v) {
                want.or_assign(msgs[u as usize].as_ref().unwrap());
            }
            prop_assert_eq!(layered[v as usize].as_ref(), Some(&want));
        }
    }

    #[test]
    fn max_detect_marks_only_dominated(seed in any::<u64>(), len in 1usize..8) {
        let inst = instance(seed, false);
        let msgs = messages(&inst.graph, seed, len);
        let marked = waves::max_detect_intercommunicate(&inst.graph, &inst.cl, &msgs, len);
        let value = |v: NodeId| as_number(msgs[v as usize].as_ref().unwrap());
        let boundaries: Vec<NodeId> = inst.graph.nodes().filter(|&v| inst.cl.is_boundary(v)).collect();
        for v in inst.graph.nodes() {
            if !inst.cl.is_boundary(v) {
                prop_assert!(!marked[v as usize]);
                continue;
            }
            let reached = reach(&inst, v);
            // sound: a marked node has a larger message within reach
            if marked[v as usize] {
                prop_assert!(reached.iter().any(|&u| value(u) > value(v)), "node {}", v);
            }
            // complete relative to dominators that stayed unmarked
            if reached.iter().any(|&u| value(u) > value(v) && !marked[u as usize]) {
                prop_assert!(marked[v as usize], "node {}", v);
            }
        }
        if let Some(&top) = boundaries.iter().max_by_key(|&&v| value(v)) {
            prop_assert!(!marked[top as usize]);
        }
    }

    #[test]
    fn probe_flags_differing_neighbors(seed in any::<u64>(), len in 1usize..10, classes in 1usize..4) {
        let src = RandomSource::new(seed);
        let graph = random_connected(&src, 0, 2, 30);
        let mut rng = src.rng(&[7]);
        let pool: Vec<Codeword> = (0..classes).map(|i| random_word(&src, &[8, i as u64], len)).collect();
        let words: Vec<Codeword> = graph.nodes().map(|_| pool[rng.gen_range(0..classes)].clone()).collect();
        let flagged = literal::probe(&mut BeepChannel::new(&graph), &words, len);
        for v in graph.nodes() {
            let differs = graph.neighbors(v).iter().any(|&u| words[u as usize] != words[v as usize]);
            prop_assert_eq!(flagged[v as usize], differs);
            // symmetric: a flagged node has a flagged neighbor
            if differs {
                prop_assert!(graph.neighbors(v).iter().any(|&u| flagged[u as usize]));
            }
        }
    }
}
