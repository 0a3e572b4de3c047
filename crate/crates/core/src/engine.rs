//! Round semantics of the two collision models and a generic driver for
//! per-node state machines.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    #[serde(rename = "nocd")]
    NoCD,
    Beep,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::NoCD => "nocd",
            Model::Beep => "beep",
        })
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Model> {
        match s.to_ascii_lowercase().as_str() {
            "nocd" => Ok(Model::NoCD),
            "beep" => Ok(Model::Beep),
            _ => Err(Error::Argument(format!("unknown model {s:?}"))),
        }
    }
}

/// An opaque bit string of at most 128 bits. Bits are appended
/// most-significant first and read back in the same order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Packet {
    bits: u128,
    len: u8,
}

impl Packet {
    pub fn new() -> Packet {
        Packet::default()
    }

    pub fn len(&self) -> u32 {
        self.len as u32
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Appends the low `width` bits of `value`.
    pub fn push(mut self, value: u64, width: u32) -> Packet {
        assert!(width <= 64 && self.len as u32 + width <= 128, "packet overflow");
        let masked = if width == 64 {
            value
        } else {
            value & ((1u64 << width) - 1)
        };
        self.bits = (self.bits << width) | masked as u128;
        self.len += width as u8;
        self
    }

    pub fn push_bool(self, b: bool) -> Packet {
        self.push(b as u64, 1)
    }

    pub fn reader(&self) -> PacketReader {
        PacketReader { packet: *self, pos: 0 }
    }
}

pub struct PacketReader {
    packet: Packet,
    pos: u32,
}

impl PacketReader {
    pub fn take(&mut self, width: u32) -> u64 {
        assert!(self.pos + width <= self.packet.len as u32, "read past end of packet");
        self.pos += width;
        let shift = self.packet.len as u32 - self.pos;
        let v = self.packet.bits >> shift;
        if width == 64 {
            v as u64
        } else {
            (v as u64) & ((1u64 << width) - 1)
        }
    }

    pub fn take_bool(&mut self) -> bool {
        self.take(1) == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundAction {
    Listen,
    Transmit(Packet),
    Beep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reception {
    Nothing,
    Received(Packet),
    Quiet,
    HeardBeep,
}

impl Reception {
    pub fn packet(&self) -> Option<Packet> {
        match self {
            Reception::Received(p) => Some(*p),
            _ => None,
        }
    }
}

/// Computes every node's reception for one synchronous round.
pub fn step(graph: &Graph, model: Model, actions: &[RoundAction]) -> Result<Vec<Reception>> {
    let n = graph.node_count();
    if actions.len() != n {
        return Err(Error::Config(format!("expected {n} actions, got {}", actions.len())));
    }
    for (u, a) in actions.iter().enumerate() {
        match (model, a) {
            (Model::NoCD, RoundAction::Beep) => return Err(Error::Config(format!("node {u} beeps in the nocd model"))),
            (Model::Beep, RoundAction::Transmit(_)) => {
                return Err(Error::Config(format!("node {u} transmits a packet in the beep model")))
            }
            _ => {}
        }
    }
    let out = (0..n as NodeId)
        .map(|u| {
            let listening = matches!(actions[u as usize], RoundAction::Listen);
            match model {
                Model::NoCD => {
                    if !listening {
                        return Reception::Nothing;
                    }
                    let mut heard = None;
                    let mut count = 0;
                    for &v in graph.neighbors(u) {
                        if let RoundAction::Transmit(p) = actions[v as usize] {
                            count += 1;
                            heard = Some(p);
                        }
                    }
                    match (count, heard) {
                        (1, Some(p)) => Reception::Received(p),
                        _ => Reception::Nothing,
                    }
                }
                Model::Beep => {
                    let any = graph
                        .neighbors(u)
                        .iter()
                        .any(|&v| actions[v as usize] == RoundAction::Beep);
                    if listening && any {
                        Reception::HeardBeep
                    } else {
                        Reception::Quiet
                    }
                }
            }
        })
        .collect();
    Ok(out)
}

/// A synchronous per-node state machine.
pub trait Protocol {
    type State: Clone + fmt::Debug;

    fn init(&self, node: NodeId, graph: &Graph, rng: &RandomSource) -> Self::State;

    fn act(&self, node: NodeId, state: &Self::State, round: u64, rng: &RandomSource) -> RoundAction;

    fn update(&self, node: NodeId, state: &mut Self::State, round: u64, reception: Reception, rng: &RandomSource);

    /// Checked before each round; `true` ends the run.
    fn finished(&self, states: &[Self::State], round: u64) -> bool;

    fn output(&self, state: &Self::State) -> Option<u64>;

    /// Longest packet, in bits, a node may transmit.
    fn max_packet_bits(&self, graph: &Graph) -> u32 {
        128.min(12 * crate::log2_ceil(graph.node_count()) + 8)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub actions: Vec<RoundAction>,
    pub receptions: Vec<Reception>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub rounds: Vec<RoundRecord>,
    pub outputs: Vec<Option<u64>>,
    pub round_count: u64,
    pub timed_out: bool,
}

/// Drives `protocol` round by round until it reports completion or
/// `round_limit` rounds have elapsed.
pub fn run_protocol<P: Protocol>(
    graph: &Graph,
    model: Model,
    protocol: &P,
    seed: &RandomSource,
    round_limit: u64,
) -> Result<Trace> {
    let mut states: Vec<P::State> = graph.nodes().map(|u| protocol.init(u, graph, seed)).collect();
    let max_bits = protocol.max_packet_bits(graph);
    let mut rounds = Vec::new();
    let mut round = 0u64;
    let mut timed_out = false;
    loop {
        if protocol.finished(&states, round) {
            break;
        }
        if round >= round_limit {
            timed_out = true;
            break;
        }
        let actions: Vec<RoundAction> = graph
            .nodes()
            .map(|u| protocol.act(u, &states[u as usize], round, seed))
            .collect();
        for (u, a) in actions.iter().enumerate() {
            if let RoundAction::Transmit(p) = a {
                if p.len() > max_bits {
                    return Err(Error::Config(format!(
                        "node {u} sent a {}-bit packet, limit is {max_bits}",
                        p.len()
                    )));
                }
            }
        }
        let receptions = step(graph, model, &actions)?;
        for u in graph.nodes() {
            protocol.update(u, &mut states[u as usize], round, receptions[u as usize], seed);
        }
        rounds.push(RoundRecord { actions, receptions });
        round += 1;
    }
    Ok(Trace {
        outputs: states.iter().map(|s| protocol.output(s)).collect(),
        round_count: round,
        timed_out,
        rounds,
    })
}
