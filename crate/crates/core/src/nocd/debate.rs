//! Debates and the full election without collision detection.

use crate::channel::RadioChannel;
use crate::config::Constants;
use crate::decay::fast_decay_rounds;
use crate::graph::Graph;
use crate::outcome::{non_isolated_count, DebateOutcome, ElectionOutcome};
use crate::rng::{tag, RandomSource};

use super::cluster::{
    cluster_refine_on, fast_cluster_epochs, fast_cluster_on, fast_epoch_rounds, refine_epoch_rounds, refine_epochs,
};
use super::comm::intercom_rounds;
use super::elimination::radio_elimination_on;
use super::overlay::{build_overlay_on, KNOWN_CHILDREN_CAP};
use super::{debate_count, debate_radius, sample_candidates, Candidate, Context};

/// Cluster casts per debate: 3 + 2 per known child while building the
/// overlay, 2 + 2 per known child during elimination.
const CASTS_PER_DEBATE: u64 = 5 + 4 * KNOWN_CHILDREN_CAP as u64;
const INTERCOMS_PER_DEBATE: u64 = 3;

fn reach_for(graph: &Graph, radius: u32) -> u64 {
    (2 * radius as u64).min(graph.diameter() as u64).max(1)
}

/// Rounds one debate takes, whatever happens inside it.
pub fn debate_rounds(ctx: &Context, index: u32) -> u64 {
    let graph = ctx.graph;
    let radius = debate_radius(graph.node_count(), graph.diameter(), index);
    fast_cluster_epochs(ctx, radius) as u64 * fast_epoch_rounds(ctx)
        + refine_epochs(ctx) as u64 * refine_epoch_rounds(ctx)
        + CASTS_PER_DEBATE * ctx.cast_budget(reach_for(graph, radius))
        + INTERCOMS_PER_DEBATE * intercom_rounds(ctx)
}

/// Number of debates the election runs.
pub fn election_debates(n: usize, constants: &Constants) -> u32 {
    constants.debates.unwrap_or_else(|| debate_count(n, 19.0 / 20.0))
}

/// Total rounds of a full election.
pub fn election_rounds(graph: &Graph, constants: &Constants) -> u64 {
    let ctx = Context::new(graph, constants);
    let debates: u64 = (1..=election_debates(graph.node_count(), constants))
        .map(|i| debate_rounds(&ctx, i))
        .sum();
    debates + ctx.cast_budget(graph.diameter() as u64)
}

pub fn run_debate_on(
    ch: &mut RadioChannel,
    ctx: &Context,
    candidates: &[Candidate],
    index: u32,
    seed: &RandomSource,
) -> DebateOutcome {
    let graph = ctx.graph;
    let start = ch.rounds();
    let radius = debate_radius(graph.node_count(), graph.diameter(), index);
    let reach = reach_for(graph, radius);
    let seed = seed.derive(&[index as u64]);
    let cl = fast_cluster_on(ch, ctx, candidates, radius, &seed.derive(&[0]));
    let cl = cluster_refine_on(ch, ctx, &cl, refine_epochs(ctx), &seed.derive(&[1]));
    let overlay = build_overlay_on(ch, ctx, &cl, candidates, reach, &seed.derive(&[2]));
    let alive = radio_elimination_on(ch, ctx, &cl, &overlay, reach, &seed.derive(&[3]));
    DebateOutcome {
        index,
        radius,
        incoming: candidates.len(),
        non_isolated: non_isolated_count(graph, candidates, 2 * radius),
        survivors: candidates
            .iter()
            .zip(alive)
            .filter(|(_, a)| *a)
            .map(|(c, _)| *c)
            .collect(),
        rounds: ch.rounds() - start,
    }
}

/// One debate with radius schedule index `index` (1-based).
pub fn run_debate_nocd(
    graph: &Graph,
    candidates: &[Candidate],
    index: u32,
    constants: &Constants,
    seed: &RandomSource,
) -> DebateOutcome {
    let ctx = Context::new(graph, constants);
    let mut ch = ctx.channel();
    run_debate_on(&mut ch, &ctx, candidates, index, seed)
}

/// Sample candidates, run the debates, then broadcast the survivor's ID.
pub fn elect_leader_nocd(graph: &Graph, constants: &Constants, seed: &RandomSource) -> ElectionOutcome {
    let ctx = Context::new(graph, constants);
    elect_on(&mut ctx.channel(), &ctx, seed)
}

/// [`elect_leader_nocd`] on a caller-owned channel.
pub fn elect_on(ch: &mut RadioChannel, ctx: &Context, seed: &RandomSource) -> ElectionOutcome {
    let graph = ctx.graph;
    let constants = &ctx.constants;
    let n = graph.node_count();
    let candidates = sample_candidates(n, constants, seed);
    let count = election_debates(n, constants);
    let mut alive = candidates.clone();
    let mut debates = Vec::new();
    for i in 1..=count {
        if alive.len() <= 1 {
            // a lone candidate is isolated in every overlay and survives
            ch.idle(debate_rounds(ctx, i));
            continue;
        }
        let d = run_debate_on(ch, ctx, &alive, i, seed);
        alive = d.survivors.clone();
        debates.push(d);
    }
    let budget = ctx.cast_budget(graph.diameter() as u64);
    let mut outputs = vec![None; n];
    if alive.is_empty() {
        ch.idle(budget);
    } else {
        let sources: Vec<_> = alive.iter().map(|c| (c.node, ctx.id_packet(c.id))).collect();
        let first = fast_decay_rounds(
            ch,
            &sources,
            ctx.decay.delta,
            &ctx.schedule(),
            budget,
            ctx.phase_len() as u64,
            &seed.derive(&[tag::FINAL]),
            |_, _| true,
            |d| crate::decay::Adopt::Relay(d.packet),
        );
        for (v, f) in first.into_iter().enumerate() {
            outputs[v] = f.map(|(_, p)| p.reader().take(ctx.id_bits));
        }
    }
    ElectionOutcome {
        outputs,
        candidates,
        debates,
        debate_count: count,
        rounds: ch.rounds(),
    }
}
