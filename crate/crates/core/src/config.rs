//! Tunable protocol constants.
//!
//! The protocols only fix these up to a constant factor; every one can be
//! overridden with `KEY=VALUE` strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Fast-Decay budget factor: a broadcast gets `alpha * (D*delta + L^2)` rounds.
    pub alpha: f64,
    /// Phases per long-phase.
    pub long_phase_factor: u32,
    /// Packet limit is `packet_factor * L + 8` bits.
    pub packet_factor: u32,
    /// Step 1 of clustering lasts `step1_factor * L^2` rounds.
    pub step1_factor: f64,
    /// Clustering epochs beyond the ones needed to cover the radius.
    pub cluster_extra_epochs: u32,
    /// Step 2 and boundary detection use `parts_factor * L` one-phase parts.
    pub parts_factor: u32,
    /// Refinement runs `refine_factor * L^2 / delta` epochs.
    pub refine_factor: f64,
    /// Intercommunication runs `intercom_factor * L^2` epochs.
    pub intercom_factor: f64,
    /// Candidate probability is `candidate_factor * log2(n) / n`.
    pub candidate_factor: f64,
    /// Candidate IDs have `id_factor * L` bits.
    pub id_factor: u32,
    /// Block-length constant of the approximate counting code.
    pub c_b: f64,
    /// Block-length constant for the counting codes used inside beep debates.
    pub c_b_debate: f64,
    /// Accuracy of the counting codes used inside beep debates.
    pub approx_delta: f64,
    /// Extra strength of the SI code used by the full beep debate.
    pub si_slack: u32,
    /// Overrides the number of debates when set.
    pub debates: Option<u32>,
    /// Round limit as a multiple of the protocol's own budget.
    pub round_limit_mult: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            alpha: 12.0,
            long_phase_factor: 24,
            packet_factor: 12,
            step1_factor: 4.0,
            cluster_extra_epochs: 2,
            parts_factor: 12,
            refine_factor: 1.0,
            intercom_factor: 8.0,
            candidate_factor: 10.0,
            id_factor: 3,
            c_b: 48.0,
            c_b_debate: 2.0,
            approx_delta: 0.1,
            si_slack: 4,
            debates: None,
            round_limit_mult: 50.0,
        }
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("{key} must be positive, got {v}")))
    }
}

impl Constants {
    /// Applies one `KEY=VALUE` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got {assignment:?}")))?;
        let key = key.trim();
        let value = value.trim();
        let real = || -> Result<f64> {
            let v: f64 = value
                .parse()
                .map_err(|_| Error::Config(format!("{key}: bad number {value:?}")))?;
            positive(key, v)
        };
        let count = || -> Result<u32> {
            let v: u32 = value
                .parse()
                .map_err(|_| Error::Config(format!("{key}: bad count {value:?}")))?;
            if v == 0 {
                return Err(Error::Config(format!("{key} must be positive")));
            }
            Ok(v)
        };
        match key {
            "alpha" => self.alpha = real()?,
            "long_phase_factor" => self.long_phase_factor = count()?,
            "packet_factor" => self.packet_factor = count()?,
            "step1_factor" => self.step1_factor = real()?,
            "cluster_extra_epochs" => self.cluster_extra_epochs = count()?,
            "parts_factor" => self.parts_factor = count()?,
            "refine_factor" => self.refine_factor = real()?,
            "intercom_factor" => self.intercom_factor = real()?,
            "candidate_factor" => self.candidate_factor = real()?,
            "id_factor" => self.id_factor = count()?,
            "c_b" => self.c_b = real()?,
            "c_b_debate" => self.c_b_debate = real()?,
            "approx_delta" => self.approx_delta = real()?,
            "si_slack" => self.si_slack = count()?,
            "debates" => self.debates = Some(count()?),
            "round_limit_mult" => self.round_limit_mult = real()?,
            _ => return Err(Error::Config(format!("unknown constant {key:?}"))),
        }
        Ok(())
    }

    pub fn with(mut self, assignment: &str) -> Result<Self> {
        self.set(assignment)?;
        Ok(self)
    }

    pub fn packet_limit(&self, n: usize) -> u32 {
        (self.packet_factor * crate::log2_ceil(n) + 8).min(128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let c = Constants::default()
            .with("alpha=3.5")
            .unwrap()
            .with(" debates = 7")
            .unwrap();
        assert_eq!(c.alpha, 3.5);
        assert_eq!(c.debates, Some(7));
        assert!(Constants::default().with("alpha=-1").is_err());
        assert!(Constants::default().with("nope=1").is_err());
        assert!(Constants::default().with("alpha").is_err());
        assert!(Constants::default().with("long_phase_factor=0").is_err());
    }
}
