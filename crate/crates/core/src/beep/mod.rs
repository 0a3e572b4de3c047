//! Leader election in the beep model.
//!
//! Every communication step except max-detection is an OR network over
//! the BFS layering around the candidates, so [`waves`] evaluates it layer
//! by layer and charges the rounds the pipelined schedule would take.
//! [`literal`] runs the same schedules one round at a time on a
//! [`BeepChannel`](crate::channel::BeepChannel).

pub mod debate;
pub mod literal;
pub mod waves;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codes::Codeword;
use crate::error::{Error, Result};
use crate::graph::NodeId;

pub use debate::{elect_leader_beep, run_debate_beep};
pub use waves::{
    beep_cluster, beep_downlink, beep_intercommunicate, beep_uplink, max_detect_intercommunicate, numbering,
};

/// A bit string carried by beep waves.
pub type BeepMessage = Codeword;

/// Hop distance to the nearest candidate; `None` beyond the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Numbering {
    pub dist: Vec<Option<u32>>,
    pub horizon: u32,
}

impl Numbering {
    pub fn get(&self, v: NodeId) -> Option<u32> {
        self.dist[v as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeepClustering {
    pub cluster: Vec<Option<u64>>,
    pub boundary: Vec<bool>,
}

impl BeepClustering {
    pub fn is_clustered(&self, v: NodeId) -> bool {
        self.cluster[v as usize].is_some()
    }

    /// Clustered and next to a node outside the cluster.
    pub fn is_boundary(&self, v: NodeId) -> bool {
        self.is_clustered(v) && self.boundary[v as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Exact neighbor sets through SI codes.
    Full,
    /// Approximate degrees and max-detection.
    #[default]
    Fast,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Full => "full",
            Variant::Fast => "fast",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Variant::Full),
            "fast" => Ok(Variant::Fast),
            _ => Err(Error::Argument(format!("unknown variant {s:?}"))),
        }
    }
}

/// Writes `value` as a `width`-bit string, most significant bit first.
pub fn bits_msb_first(value: u64, width: u32) -> Codeword {
    let mut c = Codeword::zeros(width as usize);
    for i in 0..width {
        c.set(i as usize, value >> (width - 1 - i) & 1 == 1);
    }
    c
}

/// Inverse of [`bits_msb_first`].
pub fn value_msb_first(word: &Codeword) -> u64 {
    (0..word.len()).fold(0, |acc, i| acc << 1 | word.get(i) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_roundtrip() {
        let c = bits_msb_first(0b1011, 6);
        assert_eq!(c.to_string(), "001011");
        assert_eq!(value_msb_first(&c), 11);
        assert_eq!("fast".parse::<Variant>().unwrap(), Variant::Fast);
        assert!("slow".parse::<Variant>().is_err());
    }
}
