//! Seeded batches of election trials.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beep::{self, Variant};
use crate::config::Constants;
use crate::engine::Model;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::nocd;
use crate::outcome::ElectionOutcome;
use crate::rng::{tag, RandomSource};

use super::generators::{generate_graph, GraphKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GraphSource {
    File(PathBuf),
    Generated { kind: GraphKind, n: usize, p: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: Model,
    pub graph: GraphSource,
    pub trials: usize,
    pub seed: u64,
    /// Beep only.
    pub variant: Variant,
    pub constants: Constants,
}

impl ExperimentConfig {
    pub fn generated(model: Model, kind: GraphKind, n: usize, trials: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            model,
            graph: GraphSource::Generated { kind, n, p: None },
            trials,
            seed,
            variant: Variant::Fast,
            constants: Constants::default(),
        }
    }

    /// Reads or generates the graph every trial runs on.
    pub fn load_graph(&self) -> Result<Graph> {
        match &self.graph {
            GraphSource::File(path) => Graph::parse(&std::fs::read_to_string(path)?),
            GraphSource::Generated { kind, n, p } => {
                generate_graph(*kind, *n, *p, &RandomSource::new(self.seed).derive(&[tag::GRAPH]))
            }
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        RandomSource::new(self.seed).draw(&[tag::TRIAL, trial as u64])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    #[serde(rename = "D")]
    pub diameter: u32,
    pub candidates: usize,
    /// Debates the election is scheduled to run.
    pub debates: u32,
    /// Survivors after each simulated debate.
    pub survivors_per_debate: Vec<usize>,
    pub rounds: u64,
    pub success: bool,
    pub reason: Option<String>,
}

/// Round budget of one election on `graph`.
pub fn election_budget(graph: &Graph, model: Model, variant: Variant, constants: &Constants) -> u64 {
    match model {
        Model::NoCD => nocd::debate::election_rounds(graph, constants),
        Model::Beep => beep::debate::election_rounds(graph, constants, variant),
    }
}

pub fn elect(
    graph: &Graph,
    model: Model,
    variant: Variant,
    constants: &Constants,
    seed: &RandomSource,
) -> ElectionOutcome {
    match model {
        Model::NoCD => nocd::elect_leader_nocd(graph, constants, seed),
        Model::Beep => beep::elect_leader_beep(graph, constants, variant, seed),
    }
}

/// Success iff every node output the same ID, it is a candidate's, and
/// exactly one candidate was left. Otherwise the first reason found.
pub fn judge(outcome: &ElectionOutcome, round_limit: u64) -> std::result::Result<(), String> {
    if outcome.candidates.is_empty() {
        return Err("no candidates".into());
    }
    if outcome.rounds > round_limit {
        return Err(format!("{} rounds exceed the limit of {round_limit}", outcome.rounds));
    }
    let left = outcome
        .debates
        .last()
        .map_or(outcome.candidates.len(), |d| d.survivors.len());
    if left != 1 {
        return Err(format!("{left} candidates left"));
    }
    let Some(&first) = outcome.outputs.first() else {
        return Err("no nodes".into());
    };
    if let Some(v) = outcome.outputs.iter().position(Option::is_none) {
        return Err(format!("node {v} output nothing"));
    }
    if outcome.outputs.iter().any(|&o| o != first) {
        return Err("outputs disagree".into());
    }
    let id = first.expect("checked above");
    if !outcome.candidates.iter().any(|c| c.id == id) {
        return Err(format!("{id} is not a candidate ID"));
    }
    Ok(())
}

pub fn record(trial: usize, seed: u64, graph: &Graph, outcome: &ElectionOutcome, round_limit: u64) -> ResultRecord {
    let verdict = judge(outcome, round_limit);
    ResultRecord {
        trial,
        seed,
        n: graph.node_count(),
        diameter: graph.diameter(),
        candidates: outcome.candidates.len(),
        debates: outcome.debate_count,
        survivors_per_debate: outcome.debates.iter().map(|d| d.survivors.len()).collect(),
        rounds: outcome.rounds,
        success: verdict.is_ok(),
        reason: verdict.err(),
    }
}

/// Runs every trial and keeps the full election outcomes alongside the
/// records, in trial order.
pub fn run_experiment_detailed(config: &ExperimentConfig) -> Result<Vec<(ResultRecord, ElectionOutcome)>> {
    let c = &config.constants;
    if !(c.round_limit_mult.is_finite() && c.round_limit_mult > 0.0) {
        return Err(Error::Config("round limit multiplier must be positive".into()));
    }
    let graph = config.load_graph()?;
    let budget = election_budget(&graph, config.model, config.variant, c);
    let limit = (c.round_limit_mult * budget as f64).ceil() as u64;
    Ok((0..config.trials)
        .into_par_iter()
        .map(|t| {
            let seed = config.trial_seed(t);
            let outcome = elect(&graph, config.model, config.variant, c, &RandomSource::new(seed));
            (record(t, seed, &graph, &outcome, limit), outcome)
        })
        .collect())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    Ok(run_experiment_detailed(config)?.into_iter().map(|(r, _)| r).collect())
}

fn log2_floor1(x: f64) -> f64 {
    x.log2().max(1.0)
}

/// Shape of the round bound without collision detection, constants
/// dropped: `(D log(n/D) + log^3 n) * min(log log n, log(n/D))`. Every
/// logarithm is clamped below at 1.
pub fn nocd_bound(n: usize, diameter: u32) -> f64 {
    let n = n.max(2) as f64;
    let d = diameter.max(1) as f64;
    let ln = log2_floor1(n);
    let lnd = log2_floor1(n / d);
    (d * lnd + ln.powi(3)) * log2_floor1(ln).min(lnd)
}

/// Shape of the beep round bound: `(D + log n log log n) * min(log log n,
/// log(n/D))`, logarithms clamped below at 1.
pub fn beep_bound(n: usize, diameter: u32) -> f64 {
    let n = n.max(2) as f64;
    let d = diameter.max(1) as f64;
    let ln = log2_floor1(n);
    let lln = log2_floor1(ln);
    (d + ln * lln) * lln.min(log2_floor1(n / d))
}
