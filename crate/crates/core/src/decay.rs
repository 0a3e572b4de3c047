//! The Decay family: single phases, long-phases and Fast-Decay broadcast.
//!
//! The `*_rounds` functions drive a shared [`RadioChannel`] so protocols can
//! chain them; the plain functions build a fresh channel and are what
//! tests and the harness call directly.

use crate::channel::{Delivery, RadioChannel};
use crate::config::Constants;
use crate::engine::Packet;
use crate::error::{arg_err, Result};
use crate::graph::{Graph, NodeId};
use crate::log2_ceil;
use crate::rng::{tag, RandomSource};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConfig {
    pub phase_len: u32,
    pub long_phase_factor: u32,
    pub alpha: f64,
    pub delta: u32,
}

impl DecayConfig {
    pub fn for_graph(graph: &Graph, constants: &Constants) -> DecayConfig {
        let n = graph.node_count();
        DecayConfig {
            phase_len: log2_ceil(n),
            long_phase_factor: constants.long_phase_factor,
            alpha: constants.alpha,
            delta: default_delta(n, graph.diameter() as usize),
        }
    }

    pub fn long_phase_len(&self) -> u64 {
        self.long_phase_factor as u64 * self.phase_len as u64
    }

    /// `ceil(alpha * (reach * delta + L^2))`.
    pub fn broadcast_budget(&self, reach: u64) -> u64 {
        let l = self.phase_len as f64;
        (self.alpha * (reach as f64 * self.delta as f64 + l * l)).ceil() as u64
    }
}

/// `max(1, ceil(log2(n / D)))`.
pub fn default_delta(n: usize, diameter: usize) -> u32 {
    let ratio = n as f64 / diameter.max(1) as f64;
    (ratio.log2() - 1e-9).ceil().max(1.0) as u32
}

/// Transmission probability as a function of rounds since a node started
/// transmitting.
pub trait ProbabilitySchedule {
    fn probability(&self, offset: u64) -> f64;

    fn transmits(&self, src: &RandomSource, node: NodeId, round: u64, offset: u64) -> bool {
        src.bernoulli(self.probability(offset), &[tag::FAST_DECAY, node as u64, round])
    }
}

/// Repeated basic Decay: `1/2, 1/4, ..., 2^-L`, then again.
#[derive(Debug, Clone, Copy)]
pub struct RepeatedDecay {
    pub phase_len: u32,
}

impl ProbabilitySchedule for RepeatedDecay {
    fn probability(&self, offset: u64) -> f64 {
        0.5f64.powi((offset % self.phase_len as u64) as i32 + 1)
    }

    fn transmits(&self, src: &RandomSource, node: NodeId, round: u64, offset: u64) -> bool {
        let exp = (offset % self.phase_len as u64) as u32 + 1;
        src.coin_pow2(exp, &[tag::FAST_DECAY, node as u64, round])
    }
}

/// Exact probability that a listener with `m` sending neighbors receives
/// during one phase of `phase_len` rounds.
pub fn phase_success_oracle(m: u64, phase_len: u32) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mut miss = 1.0;
    for i in 1..=phase_len {
        let q = 0.5f64.powi(i as i32);
        let single = m as f64 * q * (1.0 - q).powf(m as f64 - 1.0);
        miss *= 1.0 - single;
    }
    1.0 - miss
}

/// Runs `phases` back-to-back Decay phases with a frozen sender set.
///
/// `deliver` sees every successful delivery and returns whether it changed
/// the receiver's state. Once `pending` such changes have happened nothing
/// more can change and the remaining rounds are only counted.
pub fn decay_rounds(
    ch: &mut RadioChannel,
    senders: &[(NodeId, Packet)],
    phase_len: u32,
    phases: u32,
    seed: &RandomSource,
    mut pending: usize,
    mut deliver: impl FnMut(&Delivery) -> bool,
) {
    let total = phase_len as u64 * phases as u64;
    let mut tx = Vec::with_capacity(senders.len());
    for r in 0..total {
        if pending == 0 || senders.is_empty() {
            ch.idle(total - r);
            return;
        }
        let exp = (r % phase_len as u64) as u32 + 1;
        tx.clear();
        tx.extend(
            senders
                .iter()
                .filter(|(u, _)| seed.coin_pow2(exp, &[tag::DECAY, *u as u64, r]))
                .copied(),
        );
        for d in ch.round(&tx) {
            if deliver(d) {
                pending = pending.saturating_sub(1);
            }
        }
    }
}

/// What a listener does with a message it hears during Fast-Decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adopt {
    Ignore,
    /// Record the message but never forward it.
    Keep,
    /// Record it and forward this packet after the delay.
    Relay(Packet),
}

/// Per-node result of Fast-Decay: first adopted message and its round
/// (relative to the start of the call; sources report round 0).
pub type FirstReceptions = Vec<Option<(u64, Packet)>>;

/// Fast-Decay over `budget` rounds. Sources transmit from round 0; a node
/// that adopts a message in round `r` transmits from round `r + delta`,
/// following `schedule`.
///
/// `adopt` decides what a listener does with its first acceptable message.
/// `could_adopt` must agree with `adopt` on which (node, packet) pairs are
/// acceptable; it is used to stop simulating once no node can change.
#[allow(clippy::too_many_arguments)]
pub fn fast_decay_rounds(
    ch: &mut RadioChannel,
    sources: &[(NodeId, Packet)],
    delta: u32,
    schedule: &dyn ProbabilitySchedule,
    budget: u64,
    check_every: u64,
    seed: &RandomSource,
    could_adopt: impl Fn(NodeId, &Packet) -> bool,
    mut adopt: impl FnMut(&Delivery) -> Adopt,
) -> FirstReceptions {
    let graph = ch.graph();
    let n = graph.node_count();
    let mut first: FirstReceptions = vec![None; n];
    // (node, packet, first round it may transmit)
    let mut relays: Vec<(NodeId, Packet, u64)> = Vec::new();
    for &(u, p) in sources {
        if first[u as usize].is_none() {
            first[u as usize] = Some((0, p));
            relays.push((u, p, 0));
        }
    }
    let check_every = check_every.max(1);
    let mut tx = Vec::new();
    let mut adopted = Vec::new();
    for r in 0..budget {
        if r % check_every == 0 {
            let stuck = relays.iter().all(|&(u, p, _)| {
                graph
                    .neighbors(u)
                    .iter()
                    .all(|&v| first[v as usize].is_some() || !could_adopt(v, &p))
            });
            if stuck {
                ch.idle(budget - r);
                return first;
            }
        }
        tx.clear();
        for &(u, p, start) in &relays {
            if r >= start && schedule.transmits(seed, u, r, r - start) {
                tx.push((u, p));
            }
        }
        if tx.is_empty() {
            ch.idle(1);
            continue;
        }
        adopted.clear();
        for d in ch.round(&tx) {
            if first[d.to as usize].is_some() {
                continue;
            }
            match adopt(d) {
                Adopt::Ignore => {}
                Adopt::Keep => adopted.push((d.to, d.packet, None)),
                Adopt::Relay(q) => adopted.push((d.to, d.packet, Some(q))),
            }
        }
        for &(v, p, relay) in &adopted {
            first[v as usize] = Some((r, p));
            if let Some(q) = relay {
                relays.push((v, q, r + delta as u64));
            }
        }
    }
    first
}

fn check_senders(graph: &Graph, senders: &[(NodeId, Packet)]) -> Result<()> {
    if senders.is_empty() {
        return arg_err("sender set must be nonempty");
    }
    let mut seen = vec![false; graph.node_count()];
    for &(u, _) in senders {
        if u as usize >= graph.node_count() {
            return arg_err(format!("sender {u} out of range"));
        }
        if std::mem::replace(&mut seen[u as usize], true) {
            return arg_err(format!("sender {u} listed twice"));
        }
    }
    Ok(())
}

fn listeners_in_reach(graph: &Graph, senders: &[(NodeId, Packet)]) -> usize {
    let mut sender = vec![false; graph.node_count()];
    for &(u, _) in senders {
        sender[u as usize] = true;
    }
    graph
        .nodes()
        .filter(|&v| !sender[v as usize] && graph.neighbors(v).iter().any(|&u| sender[u as usize]))
        .count()
}

fn first_of_phases(
    graph: &Graph,
    senders: &[(NodeId, Packet)],
    phases: u32,
    seed: &RandomSource,
) -> Result<Vec<Option<Packet>>> {
    check_senders(graph, senders)?;
    let mut ch = RadioChannel::new(graph, 128);
    let mut got = vec![None; graph.node_count()];
    let pending = listeners_in_reach(graph, senders);
    decay_rounds(
        &mut ch,
        senders,
        log2_ceil(graph.node_count()),
        phases,
        seed,
        pending,
        |d| {
            let slot = &mut got[d.to as usize];
            slot.is_none() && slot.replace(d.packet).is_none()
        },
    );
    Ok(got)
}

/// One Decay phase: in its `i`-th round each sender transmits with
/// probability `2^-i`. Returns each listener's first packet.
pub fn decay_phase(graph: &Graph, senders: &[(NodeId, Packet)], seed: &RandomSource) -> Result<Vec<Option<Packet>>> {
    first_of_phases(graph, senders, 1, seed)
}

/// `long_phase_factor` phases by the original senders only.
pub fn long_phase(
    graph: &Graph,
    senders: &[(NodeId, Packet)],
    long_phase_factor: u32,
    seed: &RandomSource,
) -> Result<Vec<Option<Packet>>> {
    first_of_phases(graph, senders, long_phase_factor, seed)
}

/// Network-wide Fast-Decay broadcast; every node relays the first message
/// it hears. Errors if `budget` is below `alpha * (D * delta + L^2)`.
pub fn fast_decay_broadcast(
    graph: &Graph,
    sources: &[(NodeId, Packet)],
    config: &DecayConfig,
    schedule: &dyn ProbabilitySchedule,
    budget: u64,
    seed: &RandomSource,
) -> Result<FirstReceptions> {
    check_senders(graph, sources)?;
    let need = config.broadcast_budget(graph.diameter() as u64);
    if budget < need {
        return arg_err(format!("budget {budget} below the minimum {need}"));
    }
    let mut ch = RadioChannel::new(graph, 128);
    Ok(fast_decay_rounds(
        &mut ch,
        sources,
        config.delta,
        schedule,
        budget,
        config.phase_len as u64,
        seed,
        |_, _| true,
        |d| Adopt::Relay(d.packet),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(leaves: u32) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves as usize + 1, &edges).unwrap()
    }

    fn path(n: u32) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n as usize, &edges).unwrap()
    }

    fn msg(x: u64) -> Packet {
        Packet::new().push(x, 16)
    }

    #[test]
    fn oracle_values() {
        assert!((phase_success_oracle(1, 4) - 0.69238).abs() < 1e-4);
        assert_eq!(phase_success_oracle(0, 4), 0.0);
        for l in 1..=10u32 {
            for m in 1..=(1u64 << l) {
                assert!(phase_success_oracle(m, l) >= 0.1, "m={m} l={l}");
            }
        }
    }

    #[test]
    fn single_sender_rate_matches_oracle() {
        let g = star(15);
        let trials = 10_000;
        let hits = (0..trials)
            .filter(|&t| {
                let got = decay_phase(&g, &[(1, msg(1))], &RandomSource::new(t)).unwrap();
                got[0].is_some()
            })
            .count();
        let rate = hits as f64 / trials as f64;
        assert!((rate - phase_success_oracle(1, 4)).abs() < 0.02, "{rate}");
    }

    #[test]
    fn silent_without_neighbors_sending() {
        let g = path(5);
        let got = long_phase(&g, &[(0, msg(3))], 24, &RandomSource::new(1)).unwrap();
        assert!(got[2].is_none() && got[3].is_none() && got[4].is_none());
        assert_eq!(got[1], Some(msg(3)));
        assert!(decay_phase(&g, &[], &RandomSource::new(1)).is_err());
    }

    #[test]
    fn long_phase_from_five_leaves() {
        let g = star(63);
        let senders: Vec<_> = (1..=5).map(|i| (i, msg(i as u64))).collect();
        let misses = (0..1000)
            .filter(|&t| long_phase(&g, &senders, 24, &RandomSource::new(t)).unwrap()[0].is_none())
            .count();
        assert!(misses <= 1, "{misses}");
    }

    #[test]
    fn fast_decay_respects_delay_and_budget() {
        let g = path(64);
        let cfg = DecayConfig::for_graph(&g, &Constants::default());
        assert_eq!(cfg.delta, 1);
        let sched = RepeatedDecay {
            phase_len: cfg.phase_len,
        };
        let budget = cfg.broadcast_budget(g.diameter() as u64);
        assert!(fast_decay_broadcast(&g, &[(0, msg(9))], &cfg, &sched, budget - 1, &RandomSource::new(0)).is_err());
        let got = fast_decay_broadcast(&g, &[(0, msg(9))], &cfg, &sched, budget, &RandomSource::new(0)).unwrap();
        for (d, slot) in got.iter().enumerate() {
            let (round, p) = slot.expect("informed");
            assert_eq!(p, msg(9));
            assert!(d == 0 || round >= (d as u64 - 1) * cfg.delta as u64);
        }
        let single = Graph::from_edges(1, &[]).unwrap();
        let cfg1 = DecayConfig::for_graph(&single, &Constants::default());
        let got = fast_decay_broadcast(&single, &[(0, msg(1))], &cfg1, &sched, 100, &RandomSource::new(0)).unwrap();
        assert_eq!(got, vec![Some((0, msg(1)))]);
    }

    #[test]
    fn delta_values() {
        assert_eq!(default_delta(1024, 500), 2);
        assert_eq!(default_delta(64, 63), 1);
        assert_eq!(default_delta(64, 2), 5);
        assert_eq!(default_delta(1, 0), 1);
    }
}
