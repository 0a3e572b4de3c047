//! Numbering, uplink, intercommunication, downlink, boundary probing and
//! max-detection.
//!
//! Uplink, intercommunication and downlink only ever OR bits together
//! along fixed paths, so their outputs are computed hop layer by hop layer
//! and the channel is charged the rounds of the pipelined schedule.
//! Numbering and max-detection run round by round.

use std::collections::HashMap;

use crate::channel::BeepChannel;
use crate::codes::{Codeword, DecodeResult, HashedSiCode};
use crate::graph::{Graph, NodeId};
use crate::nocd::Candidate;

use super::{BeepClustering, Numbering};

/// Rounds of an uplink or downlink of `len` bits over `horizon` hops.
pub fn wave_rounds(horizon: u32, len: usize) -> u64 {
    if len == 0 {
        0
    } else {
        horizon as u64 + 3 * len as u64 - 2
    }
}

/// Rounds of intercommunication, max-detection or boundary probing.
pub fn paired_rounds(len: usize) -> u64 {
    2 * len as u64
}

/// Activation wave from the candidates for `horizon` rounds.
pub fn numbering_on(ch: &mut BeepChannel, candidates: &[NodeId], horizon: u32) -> Numbering {
    let graph = ch.graph();
    let n = graph.node_count();
    let mut dist = vec![None; n];
    let mut active = vec![false; n];
    for &c in candidates {
        dist[c as usize] = Some(0);
        active[c as usize] = true;
    }
    let mut heard = vec![false; n];
    for t in 1..=horizon {
        let frontier = graph
            .nodes()
            .any(|v| !active[v as usize] && graph.neighbors(v).iter().any(|&u| active[u as usize]));
        if !frontier {
            ch.idle((horizon - t + 1) as u64);
            break;
        }
        ch.round(&active, &mut heard);
        for v in 0..n {
            if heard[v] && !active[v] {
                active[v] = true;
                dist[v] = Some(t);
            }
        }
    }
    Numbering { dist, horizon }
}

/// Nodes grouped by distance, nearest first.
fn layers(numbering: &Numbering) -> Vec<Vec<NodeId>> {
    let mut out: Vec<Vec<NodeId>> = Vec::new();
    for (v, d) in numbering.dist.iter().enumerate() {
        if let Some(d) = *d {
            let d = d as usize;
            if out.len() <= d {
                out.resize(d + 1, Vec::new());
            }
            out[d].push(v as NodeId);
        }
    }
    out
}

/// What every node records during an uplink: the OR of the messages of the
/// candidates at its own distance. Candidates keep their own message.
pub fn uplink_words(
    graph: &Graph,
    numbering: &Numbering,
    messages: &[(NodeId, Codeword)],
    len: usize,
) -> Vec<Codeword> {
    let n = graph.node_count();
    let mut got = vec![Codeword::zeros(len); n];
    for (v, m) in messages {
        if numbering.get(*v) == Some(0) {
            got[*v as usize].or_assign(m);
        }
    }
    for layer in layers(numbering).iter().skip(1) {
        for &v in layer {
            let d = numbering.dist[v as usize];
            let mut acc = Codeword::zeros(len);
            for &u in graph.neighbors(v) {
                if numbering.dist[u as usize].map(|x| x + 1) == d {
                    acc.or_assign(&got[u as usize]);
                }
            }
            got[v as usize] = acc;
        }
    }
    got
}

pub fn uplink_on(
    ch: &mut BeepChannel,
    numbering: &Numbering,
    messages: &[(NodeId, Codeword)],
    len: usize,
) -> Vec<Codeword> {
    ch.idle(wave_rounds(numbering.horizon, len));
    uplink_words(ch.graph(), numbering, messages, len)
}

/// Uplink of `len`-bit messages from candidates.
pub fn beep_uplink(graph: &Graph, numbering: &Numbering, messages: &[(NodeId, Codeword)], len: usize) -> Vec<Codeword> {
    uplink_words(graph, numbering, messages, len)
}

/// Boundary outputs of intercommunication: own message OR'd with those of
/// boundary nodes adjacent directly or through one unclustered node.
pub fn intercom_words(
    graph: &Graph,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    let n = graph.node_count();
    let zero = Codeword::zeros(len);
    let sent = |v: NodeId| -> Option<&Codeword> {
        cl.is_boundary(v)
            .then(|| messages[v as usize].as_ref().unwrap_or(&zero))
    };
    // round-1 hearing of unclustered relays
    let mut relay: Vec<Option<Codeword>> = vec![None; n];
    for x in graph.nodes() {
        if cl.is_clustered(x) {
            continue;
        }
        let mut acc: Option<Codeword> = None;
        for &b in graph.neighbors(x) {
            if let Some(m) = sent(b) {
                acc.get_or_insert_with(|| zero.clone()).or_assign(m);
            }
        }
        relay[x as usize] = acc;
    }
    graph
        .nodes()
        .map(|b| {
            let own = sent(b)?;
            let mut acc = own.clone();
            for &w in graph.neighbors(b) {
                if let Some(m) = sent(w) {
                    acc.or_assign(m);
                } else if let Some(r) = &relay[w as usize] {
                    acc.or_assign(r);
                }
            }
            Some(acc)
        })
        .collect()
}

pub fn intercom_on(
    ch: &mut BeepChannel,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    ch.idle(paired_rounds(len));
    intercom_words(ch.graph(), cl, messages, len)
}

pub fn beep_intercommunicate(
    graph: &Graph,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    intercom_words(graph, cl, messages, len)
}

/// Candidate outputs of a downlink: the OR of the messages of the boundary
/// nodes below them, including their own when they are boundaries.
/// Unclustered nodes stay silent, so nothing crosses into another cluster.
pub fn downlink_words(
    graph: &Graph,
    numbering: &Numbering,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    let n = graph.node_count();
    let mut acc = vec![Codeword::zeros(len); n];
    let lay = layers(numbering);
    for layer in lay.iter().rev() {
        for &v in layer {
            if !cl.is_clustered(v) {
                continue;
            }
            let d = numbering.dist[v as usize];
            let mut a = Codeword::zeros(len);
            if cl.is_boundary(v) {
                if let Some(m) = &messages[v as usize] {
                    a.or_assign(m);
                }
            }
            for &w in graph.neighbors(v) {
                if numbering.dist[w as usize] == d.map(|x| x + 1) {
                    a.or_assign(&acc[w as usize]);
                }
            }
            acc[v as usize] = a;
        }
    }
    (0..n)
        .map(|v| (numbering.dist[v] == Some(0)).then(|| std::mem::replace(&mut acc[v], Codeword::zeros(0))))
        .collect()
}

pub fn downlink_on(
    ch: &mut BeepChannel,
    numbering: &Numbering,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    ch.idle(wave_rounds(numbering.horizon, len));
    downlink_words(ch.graph(), numbering, cl, messages, len)
}

pub fn beep_downlink(
    graph: &Graph,
    numbering: &Numbering,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    downlink_words(graph, numbering, cl, messages, len)
}

/// Each node beeps-then-listens on its one bits and listens-then-beeps on
/// its zero bits, so it hears something iff a neighbor recorded a
/// different string. Strings are given by class: equal classes mean equal
/// strings.
pub fn probe_classes(graph: &Graph, class: &[usize]) -> Vec<bool> {
    graph
        .nodes()
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .any(|&u| class[u as usize] != class[v as usize])
        })
        .collect()
}

/// Clustering from an SI(1) uplink of candidate IDs. Returns the
/// clustering and the per-node string class used by the boundary probe.
pub fn beep_cluster_on(
    ch: &mut BeepChannel,
    numbering: &Numbering,
    candidates: &[Candidate],
    code: &HashedSiCode,
) -> BeepClustering {
    let graph = ch.graph();
    let n = graph.node_count();
    let k = candidates.len();
    let len = code.length();
    ch.idle(wave_rounds(numbering.horizon, len));
    // uplink the unit sets, then turn each distinct set into its word
    let units: Vec<(NodeId, Codeword)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut s = Codeword::zeros(k);
            s.set(i, true);
            (c.node, s)
        })
        .collect();
    let sets = uplink_words(graph, numbering, &units, k);
    let book = code.codebook(&candidates.iter().map(|c| c.id).collect::<Vec<_>>());
    let mut word_class: HashMap<Codeword, usize> = HashMap::new();
    let mut set_class: HashMap<&Codeword, (usize, Option<u64>)> = HashMap::new();
    let mut class = vec![0; n];
    let mut cluster = vec![None; n];
    for v in 0..n {
        let entry = set_class.entry(&sets[v]).or_insert_with(|| {
            let word = superimpose_members(&sets[v], &book, len);
            let id = match code.decode_in(&word, &book).expect("lengths agree") {
                DecodeResult::ExactSet(ids) if ids.len() == 1 => Some(ids[0]),
                _ => None,
            };
            let next = word_class.len();
            (*word_class.entry(word).or_insert(next), id)
        });
        class[v] = entry.0;
        cluster[v] = if numbering.dist[v].is_some() { entry.1 } else { None };
    }
    ch.idle(paired_rounds(len));
    let heard = probe_classes(graph, &class);
    let boundary = (0..n).map(|v| cluster[v].is_some() && heard[v]).collect();
    BeepClustering { cluster, boundary }
}

pub fn beep_cluster(
    graph: &Graph,
    numbering: &Numbering,
    candidates: &[Candidate],
    code: &HashedSiCode,
) -> BeepClustering {
    beep_cluster_on(&mut BeepChannel::new(graph), numbering, candidates, code)
}

/// OR of the book entries selected by the set bits of `set`.
pub fn superimpose_members(set: &Codeword, book: &[(u64, Codeword)], len: usize) -> Codeword {
    let mut w = Codeword::zeros(len);
    for (i, (_, c)) in book.iter().enumerate() {
        if set.get(i) {
            w.or_assign(c);
        }
    }
    w
}

/// Max-detection among boundary nodes, bit by bit from the first bit.
/// Unmarked boundaries beep twice on a one and listen twice on a zero;
/// unclustered nodes repeat in the second round what they heard in the
/// first. A listening boundary that hears a beep is marked and drops out.
pub fn max_detect_on(
    ch: &mut BeepChannel,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<bool> {
    let graph = ch.graph();
    let n = graph.node_count();
    let mut marked = vec![false; n];
    let bit = |v: usize, t: usize| messages[v].as_ref().is_some_and(|m| m.get(t));
    let mut beep = vec![false; n];
    let mut heard1 = vec![false; n];
    let mut heard2 = vec![false; n];
    for t in 0..len {
        let live: Vec<bool> = (0..n).map(|v| cl.is_boundary(v as NodeId) && !marked[v]).collect();
        for v in 0..n {
            beep[v] = live[v] && bit(v, t);
        }
        ch.round(&beep, &mut heard1);
        for v in 0..n {
            beep[v] = (live[v] && bit(v, t)) || (!cl.is_clustered(v as NodeId) && heard1[v]);
        }
        ch.round(&beep, &mut heard2);
        for v in 0..n {
            if live[v] && !bit(v, t) && (heard1[v] || heard2[v]) {
                marked[v] = true;
            }
        }
    }
    marked
}

pub fn max_detect_intercommunicate(
    graph: &Graph,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<bool> {
    max_detect_on(&mut BeepChannel::new(graph), cl, messages, len)
}

/// Numbering over `horizon` hops, or the diameter when `None`.
pub fn numbering(graph: &Graph, candidates: &[NodeId], horizon: Option<u32>) -> Numbering {
    let h = horizon.unwrap_or(graph.diameter());
    numbering_on(&mut BeepChannel::new(graph), candidates, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bfs_distances;
    use crate::rng::RandomSource;

    fn path(n: u32) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n as usize, &edges).unwrap()
    }

    fn word(s: &str) -> Codeword {
        Codeword::from_bit_str(s).unwrap()
    }

    #[test]
    fn numbering_on_small_graphs() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let num = numbering(&star, &[0], None);
        assert_eq!(num.dist, vec![Some(0), Some(1), Some(1), Some(1), Some(1)]);
        let p = path(4);
        let num = numbering(&p, &[0], None);
        assert_eq!(num.dist, vec![Some(0), Some(1), Some(2), Some(3)]);
        let want = bfs_distances(&p, &[0]).unwrap();
        assert_eq!(num.dist.iter().map(|d| d.unwrap()).collect::<Vec<_>>(), want);
        let mut ch = BeepChannel::new(&p);
        numbering_on(&mut ch, &[1], 3);
        assert_eq!(ch.rounds(), 3);
    }

    #[test]
    fn equidistant_node_gets_the_or() {
        // candidates at both ends of a 7-node path; node 3 is in the middle
        let p = path(7);
        let num = numbering(&p, &[0, 6], None);
        let got = beep_uplink(&p, &num, &[(0, word("101101")), (6, word("101011"))], 6);
        assert_eq!(got[3].to_string(), "101111");
        assert_eq!(got[2].to_string(), "101101");
        assert_eq!(got[4].to_string(), "101011");
    }

    #[test]
    fn clustering_on_a_path() {
        // candidates at distance 4: node 2 ties, nodes 1 and 3 are boundaries
        let p = path(5);
        let cands = [Candidate { node: 0, id: 5 }, Candidate { node: 4, id: 9 }];
        let num = numbering(&p, &[0, 4], None);
        let code = HashedSiCode::new(9, 1, RandomSource::new(1)).unwrap();
        let cl = beep_cluster(&p, &num, &cands, &code);
        assert_eq!(cl.cluster, vec![Some(5), Some(5), None, Some(9), Some(9)]);
        assert_eq!(cl.boundary, vec![false, true, false, true, false]);
    }

    #[test]
    fn intercom_touching_and_bridged() {
        let g = path(2);
        let cl = BeepClustering {
            cluster: vec![Some(1), Some(2)],
            boundary: vec![true, true],
        };
        let out = beep_intercommunicate(&g, &cl, &[Some(word("100")), Some(word("001"))], 3);
        assert_eq!(out[0].as_ref().unwrap().to_string(), "101");
        assert_eq!(out[1].as_ref().unwrap().to_string(), "101");
        let g = path(3);
        let cl = BeepClustering {
            cluster: vec![Some(1), None, Some(2)],
            boundary: vec![true, false, true],
        };
        let out = beep_intercommunicate(&g, &cl, &[Some(word("100")), None, Some(word("001"))], 3);
        assert_eq!(out[0].as_ref().unwrap().to_string(), "101");
        assert_eq!(out[1], None);
        let g = path(4);
        let cl = BeepClustering {
            cluster: vec![Some(1), None, None, Some(2)],
            boundary: vec![true, false, false, true],
        };
        let out = beep_intercommunicate(&g, &cl, &[Some(word("100")), None, None, Some(word("001"))], 3);
        assert_eq!(out[0].as_ref().unwrap().to_string(), "100");
    }

    #[test]
    fn downlink_ors_boundaries() {
        // star cluster: candidate 0, boundaries 1 and 2
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let num = numbering(&g, &[0], None);
        let cl = BeepClustering {
            cluster: vec![Some(7); 3],
            boundary: vec![false, true, true],
        };
        let out = beep_downlink(&g, &num, &cl, &[None, Some(word("100")), Some(word("001"))], 3);
        assert_eq!(out[0].as_ref().unwrap().to_string(), "101");
        let out = beep_downlink(&g, &num, &cl, &[None, None, None], 3);
        assert_eq!(out[0].as_ref().unwrap().to_string(), "000");
        assert_eq!(out[1], None);
    }

    #[test]
    fn max_detect_cases() {
        let g = path(2);
        let cl = BeepClustering {
            cluster: vec![Some(1), Some(2)],
            boundary: vec![true, true],
        };
        let m = max_detect_intercommunicate(&g, &cl, &[Some(word("110")), Some(word("101"))], 3);
        assert_eq!(m, vec![false, true]);
        let m = max_detect_intercommunicate(&g, &cl, &[Some(word("101")), Some(word("101"))], 3);
        assert_eq!(m, vec![false, false]);
        // triangle of boundaries from three clusters
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let cl = BeepClustering {
            cluster: vec![Some(1), Some(2), Some(3)],
            boundary: vec![true; 3],
        };
        let m = max_detect_intercommunicate(&g, &cl, &[Some(word("111")), Some(word("101")), Some(word("100"))], 3);
        assert_eq!(m, vec![false, true, true]);
    }
}
