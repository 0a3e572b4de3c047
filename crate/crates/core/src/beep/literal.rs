//! Round-by-round versions of the wave schedules, one beep or listen per
//! node per round. Used as the reference the layered versions in
//! [`waves`](super::waves) are checked against.

use crate::channel::BeepChannel;
use crate::codes::{Codeword, DecodeResult, HashedSiCode};
use crate::graph::NodeId;
use crate::nocd::Candidate;

use super::waves::wave_rounds;
use super::{BeepClustering, Numbering};

/// Uplink: a node at distance `d` relays bit `j` in round `d + 3j` and
/// records it one round earlier from the nodes at distance `d - 1`.
pub fn uplink(
    ch: &mut BeepChannel,
    numbering: &Numbering,
    messages: &[(NodeId, Codeword)],
    len: usize,
) -> Vec<Codeword> {
    let n = ch.graph().node_count();
    let mut own: Vec<Option<&Codeword>> = vec![None; n];
    for (v, m) in messages {
        own[*v as usize] = Some(m);
    }
    let mut got = vec![Codeword::zeros(len); n];
    let mut active = vec![false; n];
    let mut beep = vec![false; n];
    let mut heard = vec![false; n];
    let total = wave_rounds(numbering.horizon, len) as i64;
    for t in 0..total {
        for v in 0..n {
            beep[v] = false;
            let Some(d) = numbering.dist[v] else { continue };
            let off = t - d as i64;
            if d == 0 {
                let j = (t / 3) as usize;
                active[v] = j < len && own[v].is_some_and(|m| m.get(j));
            }
            beep[v] = off >= 0 && off % 3 == 0 && active[v];
        }
        ch.round(&beep, &mut heard);
        for v in 0..n {
            let Some(d) = numbering.dist[v] else { continue };
            let off = t - d as i64;
            if d == 0 || off < -1 || off.rem_euclid(3) != 2 {
                continue;
            }
            let j = ((off + 1) / 3) as usize;
            if j < len {
                got[v].set(j, heard[v]);
            }
            active[v] = heard[v];
        }
    }
    for v in 0..n {
        if numbering.dist[v] == Some(0) {
            got[v] = own[v].cloned().unwrap_or_else(|| Codeword::zeros(len));
        }
    }
    got
}

/// Downlink: the uplink schedule run backwards in time. Boundaries OR their
/// own bit into what they relay; unclustered nodes stay silent.
pub fn downlink(
    ch: &mut BeepChannel,
    numbering: &Numbering,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    let n = ch.graph().node_count();
    let own_bit = |v: usize, j: usize| cl.is_boundary(v as NodeId) && messages[v].as_ref().is_some_and(|m| m.get(j));
    // a boundary candidate starts from its own bits; at horizon 0 the
    // schedule ends before its last listening slot
    let mut got: Vec<Option<Codeword>> = (0..n)
        .map(|v| {
            (numbering.dist[v] == Some(0)).then(|| {
                let mut w = Codeword::zeros(len);
                (0..len).filter(|&j| own_bit(v, j)).for_each(|j| w.set(j, true));
                w
            })
        })
        .collect();
    let mut active = vec![false; n];
    let mut beep = vec![false; n];
    let mut heard = vec![false; n];
    let total = wave_rounds(numbering.horizon, len) as i64;
    for t in (0..total).rev() {
        for v in 0..n {
            beep[v] = false;
            let Some(d) = numbering.dist[v] else { continue };
            let off = t - d as i64;
            if off < 0 || off % 3 != 0 || !cl.is_clustered(v as NodeId) {
                continue;
            }
            let j = (off / 3) as usize;
            if j < len && own_bit(v, j) {
                active[v] = true;
            }
            beep[v] = active[v];
        }
        ch.round(&beep, &mut heard);
        for v in 0..n {
            let Some(d) = numbering.dist[v] else { continue };
            let off = t - d as i64;
            if off < 0 || off % 3 != 1 || !cl.is_clustered(v as NodeId) {
                continue;
            }
            active[v] = heard[v];
            if d == 0 {
                let j = (off / 3) as usize;
                if j < len && heard[v] {
                    got[v].as_mut().expect("candidate").set(j, true);
                }
            }
        }
    }
    got
}

/// Two rounds per bit: boundaries with a one beep twice, unclustered nodes
/// repeat in the second round what they heard in the first.
pub fn intercom(
    ch: &mut BeepChannel,
    cl: &BeepClustering,
    messages: &[Option<Codeword>],
    len: usize,
) -> Vec<Option<Codeword>> {
    let n = ch.graph().node_count();
    let bit = |v: usize, t: usize| cl.is_boundary(v as NodeId) && messages[v].as_ref().is_some_and(|m| m.get(t));
    let mut out: Vec<Option<Codeword>> = (0..n)
        .map(|v| cl.is_boundary(v as NodeId).then(|| Codeword::zeros(len)))
        .collect();
    let mut beep = vec![false; n];
    let mut heard1 = vec![false; n];
    let mut heard2 = vec![false; n];
    for t in 0..len {
        for v in 0..n {
            beep[v] = bit(v, t);
        }
        ch.round(&beep, &mut heard1);
        for v in 0..n {
            beep[v] = bit(v, t) || (!cl.is_clustered(v as NodeId) && heard1[v]);
        }
        ch.round(&beep, &mut heard2);
        for (v, o) in out.iter_mut().enumerate() {
            if let Some(o) = o {
                o.set(t, bit(v, t) || heard1[v] || heard2[v]);
            }
        }
    }
    out
}

/// Per bit, ones beep then listen and zeros listen then beep. Returns
/// whether each node heard a beep while listening.
pub fn probe(ch: &mut BeepChannel, words: &[Codeword], len: usize) -> Vec<bool> {
    let n = ch.graph().node_count();
    let mut flagged = vec![false; n];
    let mut beep = vec![false; n];
    let mut heard = vec![false; n];
    for t in 0..len {
        for first in [true, false] {
            for v in 0..n {
                beep[v] = words[v].get(t) == first;
            }
            ch.round(&beep, &mut heard);
            for v in 0..n {
                flagged[v] |= heard[v];
            }
        }
    }
    flagged
}

/// Clustering from an uplink of the candidates' SI(1) codewords.
pub fn cluster(
    ch: &mut BeepChannel,
    numbering: &Numbering,
    candidates: &[Candidate],
    code: &HashedSiCode,
) -> BeepClustering {
    let len = code.length();
    let msgs: Vec<(NodeId, Codeword)> = candidates.iter().map(|c| (c.node, code.codeword(c.id))).collect();
    let words = uplink(ch, numbering, &msgs, len);
    let book = code.codebook(&candidates.iter().map(|c| c.id).collect::<Vec<_>>());
    let cluster: Vec<Option<u64>> = words
        .iter()
        .zip(&numbering.dist)
        .map(|(w, d)| match code.decode_in(w, &book).expect("lengths agree") {
            DecodeResult::ExactSet(ids) if ids.len() == 1 && d.is_some() => Some(ids[0]),
            _ => None,
        })
        .collect();
    let heard = probe(ch, &words, len);
    let boundary = cluster.iter().zip(heard).map(|(c, h)| c.is_some() && h).collect();
    BeepClustering { cluster, boundary }
}
