//! Cluster growth: fast growth with trimming, then one-hop refinement.

use crate::channel::RadioChannel;
use crate::config::Constants;
use crate::decay::{decay_rounds, fast_decay_rounds, Adopt};
use crate::engine::Packet;
use crate::graph::{Graph, NodeId};
use crate::rng::{tag, RandomSource};

use super::{Candidate, Clustering, Context, NodeStatus};

/// Number of fast-growth epochs needed to cover `radius` hops.
pub fn fast_cluster_epochs(ctx: &Context, radius: u32) -> u32 {
    let l2 = (ctx.phase_len() * ctx.phase_len()) as u64;
    let need = (radius as u64 * ctx.decay.delta as u64).div_ceil(l2);
    need as u32 + ctx.constants.cluster_extra_epochs
}

pub fn step1_rounds(ctx: &Context) -> u64 {
    let l = ctx.phase_len() as f64;
    (ctx.constants.step1_factor * ctx.constants.alpha * l * l).ceil() as u64
}

pub fn parts(ctx: &Context) -> u32 {
    ctx.constants.parts_factor * ctx.phase_len()
}

/// Refinement epochs: `ceil(refine_factor * L^2 / delta)`.
pub fn refine_epochs(ctx: &Context) -> u32 {
    let l = ctx.phase_len() as f64;
    (ctx.constants.refine_factor * l * l / ctx.decay.delta as f64)
        .ceil()
        .max(1.0) as u32
}

/// Rounds of one fast-growth epoch, all four steps.
pub fn fast_epoch_rounds(ctx: &Context) -> u64 {
    let l = ctx.phase_len() as u64;
    2 * step1_rounds(ctx) + parts(ctx) as u64 * l + ctx.decay.long_phase_len()
}

/// Rounds of one refinement epoch.
pub fn refine_epoch_rounds(ctx: &Context) -> u64 {
    ctx.decay.long_phase_len() + parts(ctx) as u64 * ctx.phase_len() as u64
}

fn shared_half(seed: &RandomSource, purpose: u64, cluster: u64, epoch: u64, part: u64) -> bool {
    seed.draw(&[tag::CLUSTER_SHARED, purpose, cluster, epoch, part]) & 1 == 1
}

/// Marks every listed node and its neighbors in `stamp` and returns them.
fn closed_neighborhood(graph: &Graph, nodes: &[NodeId], stamp: &mut [u64], mark: u64) -> Vec<NodeId> {
    let mut out = Vec::new();
    for &v in nodes {
        for &w in std::iter::once(&v).chain(graph.neighbors(v)) {
            if stamp[w as usize] != mark {
                stamp[w as usize] = mark;
                out.push(w);
            }
        }
    }
    out
}

/// Parts of one Decay phase in which the clusters' nodes transmit their
/// cluster ID when their cluster's shared coin says so, while unclustered
/// nodes keep running Decay with an "unclustered" flag. `hear` sees each
/// delivery to a node in `pending` and returns whether that node is done.
#[allow(clippy::too_many_arguments)]
fn run_parts(
    ch: &mut RadioChannel,
    ctx: &Context,
    cl: &Clustering,
    seed: &RandomSource,
    purpose: u64,
    epoch: u64,
    mut pending: Vec<NodeId>,
    mut hear: impl FnMut(NodeId, Option<u64>) -> bool,
) {
    let graph = ctx.graph;
    let l = ctx.phase_len() as u64;
    let total_parts = parts(ctx) as u64;
    let local = seed.derive(&[purpose, epoch]);
    let mut stamp = vec![0u64; graph.node_count()];
    let mut done = vec![false; graph.node_count()];
    let mut tx: Vec<(NodeId, Packet)> = Vec::new();
    let unclustered_packet = Packet::new().push_bool(true).push(0, ctx.id_bits);
    for part in 0..total_parts {
        pending.retain(|&v| !done[v as usize]);
        if pending.is_empty() {
            ch.idle((total_parts - part) * l);
            return;
        }
        // Only nodes next to a pending listener can influence it.
        let relevant = closed_neighborhood(graph, &pending, &mut stamp, part + 1);
        let active: Vec<(NodeId, Packet)> = relevant
            .iter()
            .filter_map(|&u| match cl.cluster[u as usize] {
                None => Some((u, unclustered_packet)),
                Some(c) if shared_half(seed, purpose, c, epoch, part) => {
                    Some((u, Packet::new().push_bool(false).push(c, ctx.id_bits)))
                }
                Some(_) => None,
            })
            .collect();
        for i in 0..l {
            let r = part * l + i;
            tx.clear();
            tx.extend(
                active
                    .iter()
                    .filter(|(u, _)| local.coin_pow2(i as u32 + 1, &[*u as u64, r]))
                    .copied(),
            );
            for d in ch.round(&tx) {
                if stamp[d.to as usize] != part + 1 || done[d.to as usize] {
                    continue;
                }
                let mut rd = d.packet.reader();
                let unclustered = rd.take_bool();
                let id = rd.take(ctx.id_bits);
                if hear(d.to, if unclustered { None } else { Some(id) }) {
                    done[d.to as usize] = true;
                }
            }
        }
    }
}

fn has_foreign_neighbor(graph: &Graph, cl: &Clustering, v: NodeId) -> bool {
    let own = cl.cluster[v as usize];
    graph
        .neighbors(v)
        .iter()
        .any(|&w| cl.cluster[w as usize].is_some_and(|c| Some(c) != own))
}

fn has_unclustered_neighbor(graph: &Graph, cl: &Clustering, v: NodeId) -> bool {
    graph.neighbors(v).iter().any(|&w| cl.cluster[w as usize].is_none())
}

/// Fast growth on a shared channel. Runs enough epochs for clusters to
/// advance `radius` hops.
pub fn fast_cluster_on(
    ch: &mut RadioChannel,
    ctx: &Context,
    candidates: &[Candidate],
    radius: u32,
    seed: &RandomSource,
) -> Clustering {
    let graph = ctx.graph;
    let n = graph.node_count();
    let l = ctx.phase_len();
    let sched = ctx.schedule();
    let mut cl = Clustering::trivial(n, candidates);
    let budget1 = step1_rounds(ctx);
    for epoch in 0..fast_cluster_epochs(ctx, radius) as u64 {
        for s in cl.status.iter_mut() {
            if matches!(s, NodeStatus::BoundaryActive | NodeStatus::BoundaryInactive) {
                *s = NodeStatus::Undecided { marked: false };
            }
        }

        // Step 1: Fast-Decay growth from candidates and undecided nodes.
        let open: Vec<bool> = cl.cluster.iter().map(|c| c.is_none()).collect();
        let sources: Vec<(NodeId, Packet)> = graph
            .nodes()
            .filter(|&v| {
                matches!(
                    cl.status[v as usize],
                    NodeStatus::Candidate | NodeStatus::Undecided { .. }
                )
            })
            .map(|v| (v, ctx.id_packet(cl.cluster[v as usize].unwrap())))
            .collect();
        let s1 = seed.derive(&[tag::CLUSTER_STEP1, epoch]);
        let mut recruited = Vec::new();
        fast_decay_rounds(
            ch,
            &sources,
            ctx.decay.delta,
            &sched,
            budget1,
            l as u64,
            &s1,
            |v, _| open[v as usize],
            |d| {
                if open[d.to as usize] {
                    recruited.push((d.to, d.from, d.packet.reader().take(ctx.id_bits)));
                    Adopt::Relay(d.packet)
                } else {
                    Adopt::Ignore
                }
            },
        );
        for &(v, from, id) in &recruited {
            cl.status[v as usize] = NodeStatus::Undecided { marked: false };
            cl.cluster[v as usize] = Some(id);
            cl.recruiter[v as usize] = Some(from);
        }

        // Step 2: mark undecided nodes next to unclustered or foreign nodes.
        let pending: Vec<NodeId> = graph
            .nodes()
            .filter(|&v| matches!(cl.status[v as usize], NodeStatus::Undecided { .. }))
            .filter(|&v| has_foreign_neighbor(graph, &cl, v) || has_unclustered_neighbor(graph, &cl, v))
            .collect();
        let mut marked = vec![false; n];
        {
            let own = &cl.cluster;
            run_parts(ch, ctx, &cl, seed, tag::CLUSTER_STEP2, epoch, pending, |v, heard| {
                if heard.is_none() || heard != own[v as usize] {
                    marked[v as usize] = true;
                }
                marked[v as usize]
            });
        }

        // Step 3: replay Step 1 with a mark bit; recruits of marked nodes
        // become marked.
        let sources: Vec<(NodeId, Packet)> = sources
            .iter()
            .map(|&(v, p)| (v, p.push_bool(marked[v as usize])))
            .collect();
        let mut inherited = Vec::new();
        fast_decay_rounds(
            ch,
            &sources,
            ctx.decay.delta,
            &sched,
            budget1,
            l as u64,
            &s1,
            |v, _| open[v as usize],
            |d| {
                if open[d.to as usize] {
                    let mut rd = d.packet.reader();
                    let id = rd.take(ctx.id_bits);
                    let bit = rd.take_bool() || marked[d.to as usize];
                    inherited.push((d.to, bit));
                    Adopt::Relay(ctx.id_packet(id).push_bool(bit))
                } else {
                    Adopt::Ignore
                }
            },
        );
        for &(v, bit) in &inherited {
            marked[v as usize] |= bit;
        }
        for v in graph.nodes() {
            if let NodeStatus::Undecided { .. } = cl.status[v as usize] {
                cl.status[v as usize] = NodeStatus::Undecided {
                    marked: marked[v as usize],
                };
            }
        }

        // Step 4: unmarked undecided nodes become internal; internal nodes
        // then recruit boundary nodes with one long-phase.
        for s in cl.status.iter_mut() {
            if *s == (NodeStatus::Undecided { marked: false }) {
                *s = NodeStatus::Internal;
            }
        }
        let can_join = |v: NodeId, c: u64| match cl.status[v as usize] {
            NodeStatus::Unclustered => true,
            NodeStatus::Undecided { marked: true } => cl.cluster[v as usize] == Some(c),
            _ => false,
        };
        let mut listeners = 0;
        let mut senders = Vec::new();
        let mut sender_mark = vec![false; n];
        for v in graph.nodes() {
            let mut any = false;
            for &u in graph.neighbors(v) {
                if cl.is_internal(u) && can_join(v, cl.cluster[u as usize].unwrap()) {
                    any = true;
                    if !std::mem::replace(&mut sender_mark[u as usize], true) {
                        senders.push((u, ctx.id_packet(cl.cluster[u as usize].unwrap())));
                    }
                }
            }
            listeners += any as usize;
        }
        senders.sort_unstable_by_key(|s| s.0);
        let s4 = seed.derive(&[tag::CLUSTER_STEP4, epoch]);
        let mut joined: Vec<Option<(u64, NodeId)>> = vec![None; n];
        decay_rounds(ch, &senders, l, ctx.constants.long_phase_factor, &s4, listeners, |d| {
            let c = d.packet.reader().take(ctx.id_bits);
            if joined[d.to as usize].is_none() && can_join(d.to, c) {
                joined[d.to as usize] = Some((c, d.from));
                true
            } else {
                false
            }
        });
        for v in 0..n {
            match (cl.status[v], joined[v]) {
                (NodeStatus::Unclustered | NodeStatus::Undecided { marked: true }, Some((c, from))) => {
                    cl.status[v] = NodeStatus::BoundaryActive;
                    cl.cluster[v] = Some(c);
                    cl.recruiter[v] = Some(from);
                }
                (NodeStatus::Undecided { marked: true }, None) => {
                    cl.status[v] = NodeStatus::Unclustered;
                    cl.cluster[v] = None;
                    cl.recruiter[v] = None;
                }
                _ => {}
            }
        }
    }
    cl
}

/// Grows every cluster by at most one hop per epoch and re-derives
/// boundary statuses after each growth.
pub fn cluster_refine_on(
    ch: &mut RadioChannel,
    ctx: &Context,
    clustering: &Clustering,
    epochs: u32,
    seed: &RandomSource,
) -> Clustering {
    let graph = ctx.graph;
    let n = graph.node_count();
    let l = ctx.phase_len();
    let mut cl = clustering.clone();
    for epoch in 0..epochs as u64 {
        // Growth: internal and active boundary nodes recruit unclustered
        // neighbors.
        let mut senders = Vec::new();
        let mut listeners = 0;
        let mut is_sender = vec![false; n];
        for v in graph.nodes() {
            if cl.is_clustered(v) {
                continue;
            }
            let mut any = false;
            for &u in graph.neighbors(v) {
                let grows = cl.is_internal(u) || cl.status[u as usize] == NodeStatus::BoundaryActive;
                if grows {
                    any = true;
                    if !std::mem::replace(&mut is_sender[u as usize], true) {
                        senders.push((u, ctx.id_packet(cl.cluster[u as usize].unwrap())));
                    }
                }
            }
            listeners += any as usize;
        }
        senders.sort_unstable_by_key(|s| s.0);
        let sg = seed.derive(&[tag::REFINE_GROW, epoch]);
        let mut joined: Vec<Option<(u64, NodeId)>> = vec![None; n];
        {
            let clustered: Vec<bool> = cl.cluster.iter().map(|c| c.is_some()).collect();
            decay_rounds(ch, &senders, l, ctx.constants.long_phase_factor, &sg, listeners, |d| {
                if clustered[d.to as usize] || joined[d.to as usize].is_some() {
                    return false;
                }
                joined[d.to as usize] = Some((d.packet.reader().take(ctx.id_bits), d.from));
                true
            });
        }
        for v in 0..n {
            if let Some((c, from)) = joined[v] {
                cl.cluster[v] = Some(c);
                cl.status[v] = NodeStatus::BoundaryActive;
                cl.recruiter[v] = Some(from);
            }
        }

        // Boundary determination for active boundaries and joiners.
        let eligible: Vec<NodeId> = graph
            .nodes()
            .filter(|&v| cl.status[v as usize] == NodeStatus::BoundaryActive)
            .collect();
        // 0 internal, 1 active boundary, 2 inactive boundary
        let mut level = vec![0u8; n];
        let target = |v: NodeId| -> u8 {
            if has_foreign_neighbor(graph, &cl, v) {
                2
            } else if has_unclustered_neighbor(graph, &cl, v) {
                1
            } else {
                0
            }
        };
        let targets: Vec<u8> = (0..n as NodeId)
            .map(|v| {
                if cl.status[v as usize] == NodeStatus::BoundaryActive {
                    target(v)
                } else {
                    0
                }
            })
            .collect();
        let pending: Vec<NodeId> = eligible.iter().copied().filter(|&v| targets[v as usize] > 0).collect();
        {
            let own = &cl.cluster;
            run_parts(ch, ctx, &cl, seed, tag::REFINE_BOUNDARY, epoch, pending, |v, heard| {
                let lv = &mut level[v as usize];
                match heard {
                    None => *lv = (*lv).max(1),
                    Some(c) if Some(c) != own[v as usize] => *lv = 2,
                    Some(_) => {}
                }
                *lv >= targets[v as usize]
            });
        }
        for &v in &eligible {
            cl.status[v as usize] = match level[v as usize] {
                0 => NodeStatus::Internal,
                1 => NodeStatus::BoundaryActive,
                _ => NodeStatus::BoundaryInactive,
            };
        }
    }
    cl
}

/// Fast growth on a fresh channel.
pub fn fast_cluster(
    graph: &Graph,
    candidates: &[Candidate],
    radius: u32,
    constants: &Constants,
    seed: &RandomSource,
) -> Clustering {
    let ctx = Context::new(graph, constants);
    let mut ch = ctx.channel();
    fast_cluster_on(&mut ch, &ctx, candidates, radius, seed)
}

/// Refinement on a fresh channel; `epochs = None` uses the default count.
pub fn cluster_refine(
    graph: &Graph,
    clustering: &Clustering,
    epochs: Option<u32>,
    constants: &Constants,
    seed: &RandomSource,
) -> Clustering {
    let ctx = Context::new(graph, constants);
    let mut ch = ctx.channel();
    let e = epochs.unwrap_or_else(|| refine_epochs(&ctx));
    cluster_refine_on(&mut ch, &ctx, clustering, e, seed)
}
