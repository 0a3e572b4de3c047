//! Election round budgets against the asymptotic round formulas, per
//! graph family and size.

use radiole::beep::Variant;
use radiole::harness::experiment::{beep_bound, election_budget, nocd_bound};
use radiole::harness::{generate_graph, GraphKind};
use radiole::{Constants, Model, RandomSource};

fn main() {
    let c = Constants::default();
    for kind in [GraphKind::Path, GraphKind::Grid] {
        for n in [64, 128, 256, 512] {
            let g = generate_graph(kind, n, None, &RandomSource::new(0)).unwrap();
            let d = g.diameter();
            let rn = election_budget(&g, Model::NoCD, Variant::Fast, &c);
            let rb = election_budget(&g, Model::Beep, Variant::Fast, &c);
            println!(
                "{kind} n={n} D={d} nocd={rn} ratio={:.0} beep={rb} ratio={:.0}",
                rn as f64 / nocd_bound(n, d),
                rb as f64 / beep_bound(n, d)
            );
        }
    }
}
