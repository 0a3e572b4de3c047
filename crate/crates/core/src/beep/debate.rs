//! Beep debates and the beep election.

use crate::channel::BeepChannel;
use crate::codes::{ApproxCode, Codeword, DecodeResult, HashedSiCode};
use crate::config::Constants;
use crate::graph::{Graph, NodeId};
use crate::log2_ceil;
use crate::nocd::{debate_count, debate_radius, sample_candidates, Candidate};
use crate::outcome::{non_isolated_count, DebateOutcome, ElectionOutcome};
use crate::rng::RandomSource;

use super::waves::{self, max_detect_on, numbering_on, paired_rounds, wave_rounds};
use super::{bits_msb_first, literal, value_msb_first, BeepClustering, Numbering, Variant};

/// How the wave steps are simulated. Both give identical results and
/// round counts; `RoundByRound` is slow and meant for checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    #[default]
    Layered,
    RoundByRound,
}

/// Lengths and codes fixed for a whole election.
#[derive(Debug, Clone)]
pub struct BeepContext<'g> {
    pub graph: &'g Graph,
    pub constants: Constants,
    pub id_bits: u32,
    pub approx: ApproxCode,
    /// Strength of the SI code used by the full variant.
    pub strength: usize,
}

impl<'g> BeepContext<'g> {
    pub fn new(graph: &'g Graph, constants: &Constants) -> BeepContext<'g> {
        let n = graph.node_count();
        let l = log2_ceil(n);
        let id_bits = (constants.id_factor * l).min(60);
        let max_count = (20.0 * (n.max(2) as f64).log2()).ceil() as usize;
        let universe = (1usize << id_bits).max(max_count + 1);
        let approx = ApproxCode::new(universe, max_count, constants.approx_delta, constants.c_b_debate)
            .expect("counting code parameters are valid");
        BeepContext {
            graph,
            constants: constants.clone(),
            id_bits,
            approx,
            strength: (l + constants.si_slack) as usize,
        }
    }

    fn degree_bits(&self) -> u32 {
        usize::BITS - (self.strength + 1).leading_zeros()
    }

    fn pair_bits(&self) -> u32 {
        (self.id_bits + self.degree_bits()).min(63)
    }

    fn si1_len(&self) -> usize {
        4 * 4 * self.id_bits as usize
    }

    fn si_len(&self, bits: u32) -> usize {
        4 * (self.strength + 1) * (self.strength + 1) * bits as usize
    }

    fn compare_len(&self) -> usize {
        (self.approx.level_bits() + self.id_bits) as usize
    }

    pub fn radius(&self, index: u32) -> u32 {
        debate_radius(self.graph.node_count(), self.graph.diameter(), index)
    }
}

/// Rounds one debate takes, whatever happens inside it.
pub fn debate_rounds(ctx: &BeepContext, variant: Variant, index: u32) -> u64 {
    let h = ctx.radius(index);
    let exchange = |len: usize| 2 * wave_rounds(h, len) + paired_rounds(len);
    let head = h as u64 + wave_rounds(h, ctx.si1_len()) + paired_rounds(ctx.si1_len());
    head + match variant {
        Variant::Fast => {
            let lc = ctx.compare_len();
            exchange(ctx.approx.length()) + wave_rounds(h, lc) + paired_rounds(lc) + wave_rounds(h, 1)
        }
        Variant::Full => exchange(ctx.si_len(ctx.id_bits)) + exchange(ctx.si_len(ctx.pair_bits())),
    }
}

pub fn election_debates(n: usize, constants: &Constants) -> u32 {
    constants.debates.unwrap_or_else(|| debate_count(n, 0.9))
}

/// Total rounds of a full election.
pub fn election_rounds(graph: &Graph, constants: &Constants, variant: Variant) -> u64 {
    let ctx = BeepContext::new(graph, constants);
    let debates: u64 = (1..=election_debates(graph.node_count(), constants))
        .map(|i| debate_rounds(&ctx, variant, i))
        .sum();
    let d = graph.diameter();
    debates + d as u64 + wave_rounds(d, ctx.id_bits as usize)
}

fn up(
    ch: &mut BeepChannel,
    eval: Evaluation,
    num: &Numbering,
    msgs: &[(NodeId, Codeword)],
    len: usize,
) -> Vec<Codeword> {
    match eval {
        Evaluation::Layered => waves::uplink_on(ch, num, msgs, len),
        Evaluation::RoundByRound => literal::uplink(ch, num, msgs, len),
    }
}

fn across(
    ch: &mut BeepChannel,
    eval: Evaluation,
    cl: &BeepClustering,
    msgs: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    match eval {
        Evaluation::Layered => waves::intercom_on(ch, cl, msgs, len),
        Evaluation::RoundByRound => literal::intercom(ch, cl, msgs, len),
    }
}

fn down(
    ch: &mut BeepChannel,
    eval: Evaluation,
    num: &Numbering,
    cl: &BeepClustering,
    msgs: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    match eval {
        Evaluation::Layered => waves::downlink_on(ch, num, cl, msgs, len),
        Evaluation::RoundByRound => literal::downlink(ch, num, cl, msgs, len),
    }
}

fn at_boundaries(cl: &BeepClustering, words: &[Codeword]) -> Vec<Option<Codeword>> {
    words
        .iter()
        .enumerate()
        .map(|(v, w)| cl.is_boundary(v as NodeId).then(|| w.clone()))
        .collect()
}

/// Uplink, intercommunication and downlink of one message per candidate.
/// Returns the OR each candidate ends up with.
fn exchange(
    ch: &mut BeepChannel,
    eval: Evaluation,
    num: &Numbering,
    cl: &BeepClustering,
    msgs: &[(NodeId, Codeword)],
    len: usize,
) -> Vec<Option<Codeword>> {
    let held = up(ch, eval, num, msgs, len);
    let heard = across(ch, eval, cl, &at_boundaries(cl, &held), len);
    down(ch, eval, num, cl, &heard, len)
}

fn concat(a: &Codeword, b: &Codeword) -> Codeword {
    let mut c = Codeword::zeros(a.len() + b.len());
    for i in 0..a.len() {
        c.set(i, a.get(i));
    }
    for i in 0..b.len() {
        c.set(a.len() + i, b.get(i));
    }
    c
}

fn fast_survivors(
    ch: &mut BeepChannel,
    ctx: &BeepContext,
    eval: Evaluation,
    num: &Numbering,
    cl: &BeepClustering,
    candidates: &[Candidate],
    seed: &RandomSource,
) -> Vec<bool> {
    let n = ctx.graph.node_count();
    let approx = &ctx.approx;
    let la = approx.length();
    let msgs: Vec<_> = candidates
        .iter()
        .map(|c| (c.node, approx.sample(seed, &[c.id])))
        .collect();
    let got = exchange(ch, eval, num, cl, &msgs, la);
    let lb = approx.level_bits();
    let lc = ctx.compare_len();
    let strings: Vec<_> = candidates
        .iter()
        .map(|c| {
            let word = got[c.node as usize].as_ref().expect("candidates receive a downlink");
            let level = approx.level(word).expect("lengths agree") as u64;
            (
                c.node,
                concat(&bits_msb_first(level, lb), &bits_msb_first(c.id, ctx.id_bits)),
            )
        })
        .collect();
    let held = up(ch, eval, num, &strings, lc);
    let marked = max_detect_on(ch, cl, &at_boundaries(cl, &held), lc);
    let flags: Vec<Option<Codeword>> = (0..n)
        .map(|v| cl.is_boundary(v as NodeId).then(|| bits_msb_first(marked[v] as u64, 1)))
        .collect();
    let got = down(ch, eval, num, cl, &flags, 1);
    candidates
        .iter()
        .map(|c| !got[c.node as usize].as_ref().is_some_and(|w| w.get(0)))
        .collect()
}

fn full_survivors(
    ch: &mut BeepChannel,
    ctx: &BeepContext,
    eval: Evaluation,
    num: &Numbering,
    cl: &BeepClustering,
    candidates: &[Candidate],
    seed: &RandomSource,
) -> Vec<bool> {
    let k = ctx.strength;
    let ids: Vec<u64> = candidates.iter().map(|c| c.id).collect();
    let code = HashedSiCode::new(ctx.id_bits, k, seed.derive(&[1])).expect("valid SI parameters");
    let len = code.length();
    let msgs: Vec<_> = candidates.iter().map(|c| (c.node, code.codeword(c.id))).collect();
    let got = exchange(ch, eval, num, cl, &msgs, len);
    let book = code.codebook(&ids);
    let degree: Vec<u64> = candidates
        .iter()
        .map(|c| {
            let word = got[c.node as usize].as_ref().expect("candidates receive a downlink");
            match code.decode_in(word, &book).expect("lengths agree") {
                DecodeResult::ExactSet(set) => set.iter().filter(|&&id| id != c.id).count() as u64,
                DecodeResult::MoreThanK => k as u64 + 1,
            }
        })
        .collect();

    let pair = |d: u64, id: u64| d << ctx.id_bits | id;
    let code = HashedSiCode::new(ctx.pair_bits(), k, seed.derive(&[2])).expect("valid SI parameters");
    let len = code.length();
    let msgs: Vec<_> = candidates
        .iter()
        .zip(&degree)
        .map(|(c, &d)| (c.node, code.codeword(pair(d, c.id))))
        .collect();
    let got = exchange(ch, eval, num, cl, &msgs, len);
    let all_pairs: Vec<u64> = (0..=k as u64 + 1)
        .flat_map(|d| ids.iter().map(move |&id| pair(d, id)))
        .collect();
    let book = code.codebook(&all_pairs);
    candidates
        .iter()
        .zip(&degree)
        .map(|(c, &d)| {
            let word = got[c.node as usize].as_ref().expect("candidates receive a downlink");
            match code.decode_in(word, &book).expect("lengths agree") {
                DecodeResult::ExactSet(set) => set.iter().all(|&p| p <= pair(d, c.id)),
                DecodeResult::MoreThanK => true,
            }
        })
        .collect()
}

pub fn run_debate_on(
    ch: &mut BeepChannel,
    ctx: &BeepContext,
    candidates: &[Candidate],
    index: u32,
    variant: Variant,
    eval: Evaluation,
    seed: &RandomSource,
) -> DebateOutcome {
    let start = ch.rounds();
    let radius = ctx.radius(index);
    let seed = seed.derive(&[index as u64]);
    let nodes: Vec<NodeId> = candidates.iter().map(|c| c.node).collect();
    let num = numbering_on(ch, &nodes, radius);
    let si1 = HashedSiCode::new(ctx.id_bits, 1, seed.derive(&[0])).expect("valid SI parameters");
    let cl = match eval {
        Evaluation::Layered => waves::beep_cluster_on(ch, &num, candidates, &si1),
        Evaluation::RoundByRound => literal::cluster(ch, &num, candidates, &si1),
    };
    let alive = match variant {
        Variant::Fast => fast_survivors(ch, ctx, eval, &num, &cl, candidates, &seed),
        Variant::Full => full_survivors(ch, ctx, eval, &num, &cl, candidates, &seed),
    };
    DebateOutcome {
        index,
        radius,
        incoming: candidates.len(),
        non_isolated: non_isolated_count(ctx.graph, candidates, 2 * radius),
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
pub fn run_debate_beep(
    graph: &Graph,
    candidates: &[Candidate],
    index: u32,
    variant: Variant,
    constants: &Constants,
    seed: &RandomSource,
) -> DebateOutcome {
    let ctx = BeepContext::new(graph, constants);
    run_debate_on(
        &mut BeepChannel::new(graph),
        &ctx,
        candidates,
        index,
        variant,
        Evaluation::Layered,
        seed,
    )
}

pub fn elect_leader_beep(
    graph: &Graph,
    constants: &Constants,
    variant: Variant,
    seed: &RandomSource,
) -> ElectionOutcome {
    elect_leader_beep_with(graph, constants, variant, Evaluation::Layered, seed)
}

/// Sample candidates, run the debates, then send the survivor's ID out on
/// a wave from every survivor.
pub fn elect_leader_beep_with(
    graph: &Graph,
    constants: &Constants,
    variant: Variant,
    eval: Evaluation,
    seed: &RandomSource,
) -> ElectionOutcome {
    let ctx = BeepContext::new(graph, constants);
    let mut ch = BeepChannel::new(graph);
    let n = graph.node_count();
    let candidates = sample_candidates(n, constants, seed);
    let count = election_debates(n, constants);
    let mut alive = candidates.clone();
    let mut debates = Vec::new();
    for i in 1..=count {
        if alive.len() <= 1 {
            ch.idle(debate_rounds(&ctx, variant, i));
            continue;
        }
        let d = run_debate_on(&mut ch, &ctx, &alive, i, variant, eval, seed);
        alive = d.survivors.clone();
        debates.push(d);
    }
    let d = graph.diameter();
    let bits = ctx.id_bits as usize;
    let mut outputs = vec![None; n];
    if alive.is_empty() {
        ch.idle(d as u64 + wave_rounds(d, bits));
    } else {
        let nodes: Vec<NodeId> = alive.iter().map(|c| c.node).collect();
        let num = numbering_on(&mut ch, &nodes, d);
        let msgs: Vec<_> = alive
            .iter()
            .map(|c| (c.node, bits_msb_first(c.id, ctx.id_bits)))
            .collect();
        let got = up(&mut ch, eval, &num, &msgs, bits);
        for v in 0..n {
            if num.dist[v].is_some() {
                outputs[v] = Some(value_msb_first(&got[v]));
            }
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
