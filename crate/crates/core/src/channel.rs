//! Fast round evaluation for protocols that drive the network directly.
//!
//! `RadioChannel` and `BeepChannel` implement the same per-round rules as
//! [`crate::engine::step`] but only touch the neighborhoods of active
//! nodes, and they keep the round counter for the whole run.

use std::ops::{BitAnd, BitOr, Not};

use crate::engine::Packet;
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub to: NodeId,
    pub from: NodeId,
    pub packet: Packet,
}

/// No-collision-detection channel.
pub struct RadioChannel<'g> {
    graph: &'g Graph,
    rounds: u64,
    packet_limit: u32,
    epoch: u64,
    hit_epoch: Vec<u64>,
    hit_count: Vec<u32>,
    hit_from: Vec<u32>,
    tx_epoch: Vec<u64>,
    touched: Vec<NodeId>,
    out: Vec<Delivery>,
    log: Option<Vec<Vec<NodeId>>>,
    carry: Option<Vec<bool>>,
}

impl<'g> RadioChannel<'g> {
    pub fn new(graph: &'g Graph, packet_limit: u32) -> Self {
        let n = graph.node_count();
        RadioChannel {
            graph,
            rounds: 0,
            packet_limit,
            epoch: 0,
            hit_epoch: vec![0; n],
            hit_count: vec![0; n],
            hit_from: vec![0; n],
            tx_epoch: vec![0; n],
            touched: Vec::new(),
            out: Vec::new(),
            log: None,
            carry: None,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn packet_limit(&self) -> u32 {
        self.packet_limit
    }

    /// Counts `k` rounds in which nothing observable can happen.
    pub fn idle(&mut self, k: u64) {
        self.rounds += k;
        if let Some(log) = &mut self.log {
            log.extend((0..k).map(|_| Vec::new()));
        }
    }

    /// Starts recording the transmitter set of every later round.
    pub fn record_transmitters(&mut self) {
        self.log = Some(Vec::new());
    }

    pub fn transmitter_log(&self) -> Option<&[Vec<NodeId>]> {
        self.log.as_deref()
    }

    /// Tracks an extra payload piggy-backed on every transmission: a node
    /// starts holding it once it receives from a holder.
    pub fn start_carrying(&mut self, holders: Vec<bool>) {
        assert_eq!(holders.len(), self.graph.node_count());
        self.carry = Some(holders);
    }

    pub fn carried(&self) -> Option<&[bool]> {
        self.carry.as_deref()
    }

    /// One round. Each transmitter appears at most once; every other node
    /// listens. Returns the successful deliveries.
    pub fn round(&mut self, tx: &[(NodeId, Packet)]) -> &[Delivery] {
        self.rounds += 1;
        self.epoch += 1;
        let e = self.epoch;
        self.touched.clear();
        self.out.clear();
        for (i, &(u, p)) in tx.iter().enumerate() {
            assert!(
                p.len() <= self.packet_limit,
                "{}-bit packet exceeds the {}-bit limit",
                p.len(),
                self.packet_limit
            );
            debug_assert!(self.tx_epoch[u as usize] != e, "node {u} transmits twice");
            self.tx_epoch[u as usize] = e;
            for &v in self.graph.neighbors(u) {
                let vi = v as usize;
                if self.hit_epoch[vi] != e {
                    self.hit_epoch[vi] = e;
                    self.hit_count[vi] = 1;
                    self.hit_from[vi] = i as u32;
                    self.touched.push(v);
                } else {
                    self.hit_count[vi] += 1;
                }
            }
        }
        for &v in &self.touched {
            let vi = v as usize;
            if self.hit_count[vi] == 1 && self.tx_epoch[vi] != e {
                let (from, packet) = tx[self.hit_from[vi] as usize];
                self.out.push(Delivery { to: v, from, packet });
            }
        }
        if let Some(log) = &mut self.log {
            log.push(tx.iter().map(|t| t.0).collect());
        }
        if let Some(carry) = &mut self.carry {
            for d in &self.out {
                if carry[d.from as usize] {
                    carry[d.to as usize] = true;
                }
            }
        }
        &self.out
    }
}

/// A set of parallel beep lanes. `bool` is one wave; `u64` carries 64
/// independent waves over the same topology in one pass.
pub trait Lane: Copy + Default + PartialEq + BitOr<Output = Self> + BitAnd<Output = Self> + Not<Output = Self> {
    fn is_zero(self) -> bool;
}

impl Lane for bool {
    #[inline]
    fn is_zero(self) -> bool {
        !self
    }
}

impl Lane for u64 {
    #[inline]
    fn is_zero(self) -> bool {
        self == 0
    }
}

/// Beep channel. A lane of a node hears iff it is not beeping in that lane
/// and some neighbor beeps in it.
pub struct BeepChannel<'g> {
    graph: &'g Graph,
    rounds: u64,
}

impl<'g> BeepChannel<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        BeepChannel { graph, rounds: 0 }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn idle(&mut self, k: u64) {
        self.rounds += k;
    }

    pub fn round<L: Lane>(&mut self, beep: &[L], heard: &mut [L]) {
        debug_assert_eq!(beep.len(), self.graph.node_count());
        self.rounds += 1;
        heard.fill(L::default());
        for (u, &b) in beep.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            for &v in self.graph.neighbors(u as NodeId) {
                heard[v as usize] = heard[v as usize] | b;
            }
        }
        for (h, &b) in heard.iter_mut().zip(beep) {
            *h = *h & !b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{step, Model, Reception, RoundAction};
    use proptest::prelude::*;

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..14).prop_flat_map(|n| {
            let extra = proptest::collection::vec((0..n as u32, 0..n as u32), 0..2 * n);
            let parents = proptest::collection::vec(any::<u32>(), n - 1);
            (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
                let mut edges = std::collections::BTreeSet::new();
                for (i, p) in parents.into_iter().enumerate() {
                    let v = i as u32 + 1;
                    edges.insert((p % v, v));
                }
                for (a, b) in extra {
                    if a != b {
                        edges.insert((a.min(b), a.max(b)));
                    }
                }
                let edges: Vec<_> = edges.into_iter().collect();
                Graph::from_edges(n, &edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn radio_matches_step(g in arb_graph(), mask in any::<u64>(), vals in any::<u64>()) {
            let n = g.node_count();
            let tx: Vec<(NodeId, Packet)> = (0..n as u32)
                .filter(|&u| mask >> u & 1 == 1)
                .map(|u| (u, Packet::new().push(vals.rotate_left(u) & 0xff, 8)))
                .collect();
            let actions: Vec<RoundAction> = (0..n as u32)
                .map(|u| match tx.iter().find(|t| t.0 == u) {
                    Some(&(_, p)) => RoundAction::Transmit(p),
                    None => RoundAction::Listen,
                })
                .collect();
            let want = step(&g, Model::NoCD, &actions).unwrap();
            let mut ch = RadioChannel::new(&g, 128);
            let mut got = vec![Reception::Nothing; n];
            for d in ch.round(&tx) {
                prop_assert!(g.has_edge(d.from, d.to));
                prop_assert_eq!(RoundAction::Transmit(d.packet), actions[d.from as usize]);
                got[d.to as usize] = Reception::Received(d.packet);
            }
            prop_assert_eq!(got, want);
            prop_assert_eq!(ch.rounds(), 1);
        }

        #[test]
        fn beep_lanes_match_step(g in arb_graph(), lanes in proptest::collection::vec(any::<u64>(), 14)) {
            let n = g.node_count();
            let beep = &lanes[..n];
            let mut heard = vec![0u64; n];
            let mut ch = BeepChannel::new(&g);
            ch.round(beep, &mut heard);
            for bit in 0..64 {
                let actions: Vec<RoundAction> = beep
                    .iter()
                    .map(|w| if w >> bit & 1 == 1 { RoundAction::Beep } else { RoundAction::Listen })
                    .collect();
                let want = step(&g, Model::Beep, &actions).unwrap();
                let single: Vec<bool> = beep.iter().map(|w| w >> bit & 1 == 1).collect();
                let mut heard1 = vec![false; n];
                BeepChannel::new(&g).round(&single, &mut heard1);
                for u in 0..n {
                    let h = want[u] == Reception::HeardBeep;
                    prop_assert_eq!(heard[u] >> bit & 1 == 1, h);
                    prop_assert_eq!(heard1[u], h);
                }
            }
        }
    }
}
