//! Communication inside clusters (casts) and between neighboring clusters.

use std::collections::HashSet;

use crate::channel::RadioChannel;
use crate::config::Constants;
use crate::decay::{fast_decay_rounds, Adopt};
use crate::engine::Packet;
use crate::graph::{Graph, NodeId};
use crate::rng::{tag, RandomSource};

use super::{Clustering, Context};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Candidate to its cluster's internal nodes.
    Up,
    /// Internal nodes to their candidate.
    Down,
}

/// Fast-Decay restricted to the internal nodes of each cluster.
///
/// `messages` lists (node, payload) pairs: candidates for `Up`, internal
/// nodes for `Down`. Every message travels as (cluster ID, payload) and is
/// only adopted by internal nodes of the same cluster; boundary and
/// unclustered nodes never transmit. Returns the payload each node ends up
/// holding: for `Up` every reached internal node, for `Down` the first
/// payload each candidate received (or its own).
#[allow(clippy::too_many_arguments)]
pub fn cluster_cast_on(
    ch: &mut RadioChannel,
    ctx: &Context,
    cl: &Clustering,
    direction: Direction,
    messages: &[(NodeId, u64)],
    payload_bits: u32,
    reach: u64,
    seed: &RandomSource,
) -> Vec<Option<u64>> {
    let n = ctx.graph.node_count();
    let is_candidate = |v: NodeId| cl.status[v as usize] == super::NodeStatus::Candidate;
    let mut held: Vec<Option<u64>> = vec![None; n];
    let mut sources = Vec::new();
    for &(v, payload) in messages {
        let Some(c) = cl.cluster[v as usize] else { continue };
        if !cl.is_internal(v) || held[v as usize].is_some() {
            continue;
        }
        held[v as usize] = Some(payload);
        let send = match direction {
            Direction::Up => is_candidate(v),
            Direction::Down => !is_candidate(v),
        };
        if send {
            sources.push((v, ctx.id_packet(c).push(payload, payload_bits)));
        }
    }
    let decode = |p: &Packet| {
        let mut r = p.reader();
        let c = r.take(ctx.id_bits);
        (c, r.take(payload_bits))
    };
    let accepts = |v: NodeId, c: u64| -> bool {
        if !cl.is_internal(v) || cl.cluster[v as usize] != Some(c) || held[v as usize].is_some() {
            return false;
        }
        match direction {
            Direction::Up => !is_candidate(v),
            Direction::Down => true,
        }
    };
    let mut got = Vec::new();
    fast_decay_rounds(
        ch,
        &sources,
        ctx.decay.delta,
        &ctx.schedule(),
        ctx.cast_budget(reach),
        ctx.phase_len() as u64,
        seed,
        |v, p| accepts(v, decode(p).0),
        |d| {
            let (c, payload) = decode(&d.packet);
            if !accepts(d.to, c) {
                return Adopt::Ignore;
            }
            got.push((d.to, payload));
            if is_candidate(d.to) {
                Adopt::Keep
            } else {
                Adopt::Relay(d.packet)
            }
        },
    );
    for (v, payload) in got {
        held[v as usize] = Some(payload);
    }
    if direction == Direction::Down {
        for v in 0..n {
            if !is_candidate(v as NodeId) {
                held[v] = None;
            }
        }
    }
    held
}

/// Per-node list of (cluster ID, payload) heard from other clusters, in
/// the order first heard.
pub type ForeignMessages = Vec<Vec<(u64, u64)>>;

pub fn intercom_epochs(ctx: &Context) -> u64 {
    let l = ctx.phase_len() as f64;
    (ctx.constants.intercom_factor * l * l).ceil().max(1.0) as u64
}

pub fn intercom_rounds(ctx: &Context) -> u64 {
    intercom_epochs(ctx) * 3 * ctx.phase_len() as u64
}

/// For each internal node, the foreign clusters whose originating internal
/// nodes are within three hops over non-internal relays. Nothing else can
/// ever be delivered by [`intercommunicate_on`].
pub fn reachable_foreign(ctx: &Context, cl: &Clustering, originators: &[Option<u64>]) -> Vec<HashSet<u64>> {
    let graph = ctx.graph;
    let n = graph.node_count();
    let mut out = vec![HashSet::new(); n];
    let mut depth = vec![u32::MAX; n];
    let mut clusters: Vec<u64> = (0..n)
        .filter(|&v| originators[v].is_some())
        .filter_map(|v| cl.cluster[v])
        .collect();
    clusters.sort_unstable();
    clusters.dedup();
    for c in clusters {
        depth.fill(u32::MAX);
        let mut frontier: Vec<NodeId> = graph
            .nodes()
            .filter(|&v| originators[v as usize].is_some() && cl.cluster[v as usize] == Some(c) && cl.is_internal(v))
            .collect();
        for &v in &frontier {
            depth[v as usize] = 0;
        }
        for d in 1..=3 {
            let mut next = Vec::new();
            for &u in &frontier {
                if d > 1 && cl.is_internal(u) {
                    continue;
                }
                for &w in graph.neighbors(u) {
                    if depth[w as usize] == u32::MAX {
                        depth[w as usize] = d;
                        next.push(w);
                        if cl.is_internal(w) && cl.cluster[w as usize].is_some_and(|x| x != c) {
                            out[w as usize].insert(c);
                        }
                    }
                }
            }
            frontier = next;
        }
    }
    out
}

/// Intercommunication: in each epoch every cluster is active with
/// probability `1/L` (decided by a coin shared inside the cluster); active
/// clusters' internal nodes holding the cluster message run three Decay
/// phases, and boundary or unclustered nodes forward the first message
/// they hear in later phases of the same epoch.
pub fn intercommunicate_on(
    ch: &mut RadioChannel,
    ctx: &Context,
    cl: &Clustering,
    originators: &[Option<u64>],
    payload_bits: u32,
    seed: &RandomSource,
) -> ForeignMessages {
    let graph = ctx.graph;
    let n = graph.node_count();
    let l = ctx.phase_len() as u64;
    let epochs = intercom_epochs(ctx);
    let reachable = reachable_foreign(ctx, cl, originators);
    let mut missing: usize = reachable.iter().map(|s| s.len()).sum();
    let mut learned: ForeignMessages = vec![Vec::new(); n];
    let mut known: Vec<HashSet<u64>> = vec![HashSet::new(); n];
    let origin: Vec<(NodeId, Packet)> = graph
        .nodes()
        .filter(|&v| cl.is_internal(v))
        .filter_map(|v| {
            let payload = originators[v as usize]?;
            Some((v, ctx.id_packet(cl.cluster[v as usize]?).push(payload, payload_bits)))
        })
        .collect();
    let local = seed.derive(&[tag::INTERCOM]);
    let p_active = 1.0 / l as f64;
    let mut relay_at: Vec<Option<(u64, Packet)>> = vec![None; n];
    let mut relays: Vec<NodeId> = Vec::new();
    let mut tx = Vec::new();
    for epoch in 0..epochs {
        if missing == 0 {
            ch.idle((epochs - epoch) * 3 * l);
            return learned;
        }
        let active: Vec<(NodeId, Packet)> = origin
            .iter()
            .filter(|(v, _)| {
                let c = cl.cluster[*v as usize].unwrap();
                seed.bernoulli(p_active, &[tag::INTERCOM_SHARED, c, epoch])
            })
            .copied()
            .collect();
        for &v in &relays {
            relay_at[v as usize] = None;
        }
        relays.clear();
        for phase in 0..3u64 {
            for i in 0..l {
                let r = (epoch * 3 + phase) * l + i;
                let exp = i as u32 + 1;
                tx.clear();
                tx.extend(
                    active
                        .iter()
                        .filter(|(u, _)| local.coin_pow2(exp, &[*u as u64, r]))
                        .copied(),
                );
                for &u in &relays {
                    if let Some((from_phase, p)) = relay_at[u as usize] {
                        if from_phase < phase && local.coin_pow2(exp, &[u as u64, r]) {
                            tx.push((u, p));
                        }
                    }
                }
                if tx.is_empty() {
                    ch.idle(1);
                    continue;
                }
                for d in ch.round(&tx) {
                    let v = d.to;
                    if cl.is_internal(v) {
                        let mut rd = d.packet.reader();
                        let c = rd.take(ctx.id_bits);
                        let payload = rd.take(payload_bits);
                        if cl.cluster[v as usize] != Some(c) && known[v as usize].insert(c) {
                            learned[v as usize].push((c, payload));
                            if reachable[v as usize].contains(&c) {
                                missing -= 1;
                            }
                        }
                    } else if relay_at[v as usize].is_none() {
                        relay_at[v as usize] = Some((phase, d.packet));
                        relays.push(v);
                    }
                }
            }
        }
    }
    learned
}

/// Standalone cast over the whole graph, with the diameter as reach.
pub fn cluster_cast(
    graph: &Graph,
    clustering: &Clustering,
    direction: Direction,
    messages: &[(NodeId, u64)],
    payload_bits: u32,
    constants: &Constants,
    seed: &RandomSource,
) -> Vec<Option<u64>> {
    let ctx = Context::new(graph, constants);
    let mut ch = ctx.channel();
    let reach = graph.diameter().max(1) as u64;
    cluster_cast_on(
        &mut ch,
        &ctx,
        clustering,
        direction,
        messages,
        payload_bits,
        reach,
        seed,
    )
}

/// Standalone intercommunication; `originators[v]` is the message node `v`
/// starts with (normally its cluster's message after an `Up` cast).
pub fn intercommunicate(
    graph: &Graph,
    clustering: &Clustering,
    originators: &[Option<u64>],
    payload_bits: u32,
    constants: &Constants,
    seed: &RandomSource,
) -> ForeignMessages {
    let ctx = Context::new(graph, constants);
    let mut ch = ctx.channel();
    intercommunicate_on(&mut ch, &ctx, clustering, originators, payload_bits, seed)
}
