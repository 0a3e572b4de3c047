//! Radio-network simulation and randomized leader election.
//!
//! Two collision models are supported: radio without collision detection,
//! where a listener receives only when exactly one neighbor transmits, and
//! the beep model, where a listener only learns whether some neighbor
//! beeped. On top of the round engine sit the Decay broadcast family,
//! superimposed codes, and a leader election protocol for each model.

pub mod beep;
pub mod channel;
pub mod codes;
pub mod config;
pub mod decay;
pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod nocd;
pub mod outcome;
pub mod rng;

pub use config::Constants;
pub use engine::{run_protocol, step, Model, Packet, Reception, RoundAction, Trace};
pub use error::{Error, Result};
pub use graph::{bfs_distances, Graph, NodeId};
pub use rng::RandomSource;

/// `max(1, ceil(log2 n))`, the length of a Decay phase.
pub fn log2_ceil(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::log2_ceil;

    #[test]
    fn log2_ceil_values() {
        let got: Vec<u32> = [1, 2, 3, 4, 5, 16, 17, 1024].iter().map(|&n| log2_ceil(n)).collect();
        assert_eq!(got, vec![1, 1, 2, 2, 3, 4, 5, 10]);
    }
}
