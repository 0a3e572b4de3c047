//! Broadcast from leader election: run the election on two copies of the
//! graph glued at the source, with the message riding along on every
//! transmission.

use serde::{Deserialize, Serialize};

use crate::config::Constants;
use crate::engine::Model;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::nocd::{elect_on, Context};
use crate::outcome::ElectionOutcome;
use crate::rng::RandomSource;

use super::generators::{second_copy, two_copies};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadcastOutcome {
    /// The message at each original node, `None` where it never arrived.
    pub received: Vec<Option<u64>>,
    /// Rounds on the original graph: two per simulated round.
    pub rounds: u64,
    pub election: ElectionOutcome,
}

impl BroadcastOutcome {
    pub fn all_informed(&self) -> bool {
        self.received.iter().all(Option::is_some)
    }
}

/// Every node of `graph` plays both of its copies, one in odd and one in
/// even rounds; the source plays its single merged copy and counts a
/// reception in both halves of a simulated round as a collision. That is
/// exactly a radio round on the doubled graph, so the doubled graph is
/// simulated directly. Only the no-collision-detection model is supported:
/// beeps carry no payload to piggy-back on.
pub fn bc_from_le(
    graph: &Graph,
    source: NodeId,
    message: u64,
    model: Model,
    constants: &Constants,
    seed: &RandomSource,
) -> Result<BroadcastOutcome> {
    if model != Model::NoCD {
        return Err(Error::Unsupported(
            "broadcast from leader election needs the nocd model".into(),
        ));
    }
    let n = graph.node_count();
    let doubled = two_copies(graph, source)?;
    let ctx = Context::new(&doubled, constants);
    let mut ch = ctx.channel();
    let mut holders = vec![false; doubled.node_count()];
    holders[source as usize] = true;
    ch.start_carrying(holders);
    let election = elect_on(&mut ch, &ctx, seed);
    let carried = ch.carried().expect("carrying was started");
    let received = (0..n as NodeId)
        .map(|u| (carried[u as usize] || carried[second_copy(n, source, u) as usize]).then_some(message))
        .collect();
    Ok(BroadcastOutcome {
        received,
        rounds: 2 * election.rounds,
        election,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generators::{generate_graph, GraphKind};

    #[test]
    fn single_node_is_vacuous() {
        let g = Graph::from_edges(1, &[]).unwrap();
        let out = bc_from_le(&g, 0, 7, Model::NoCD, &Constants::default(), &RandomSource::new(1)).unwrap();
        assert_eq!(out.received, vec![Some(7)]);
    }

    #[test]
    fn edge_from_either_end() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        for s in 0..2 {
            for seed in 0..10 {
                let out = bc_from_le(&g, s, 5, Model::NoCD, &Constants::default(), &RandomSource::new(seed)).unwrap();
                assert!(out.all_informed());
            }
        }
    }

    #[test]
    fn path_of_sixteen() {
        let g = generate_graph(GraphKind::Path, 16, None, &RandomSource::new(0)).unwrap();
        let out = bc_from_le(&g, 3, 1, Model::NoCD, &Constants::default(), &RandomSource::new(4)).unwrap();
        assert!(out.all_informed());
        assert!(bc_from_le(&g, 3, 1, Model::Beep, &Constants::default(), &RandomSource::new(4)).is_err());
    }
}
