//! Experiment batches, reports and graph files end to end.

use std::path::PathBuf;

use radiole::beep::Variant;
use radiole::harness::report::{render, CSV_HEADER};
use radiole::harness::{
    bc_from_le, emit_report, generate_graph, run_experiment, ExperimentConfig, Format, GraphKind, GraphSource,
};
use radiole::{Constants, Error, Model, RandomSource};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("radiole-harness-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn csv_report_round_trips_through_a_reader() {
    let config = ExperimentConfig::generated(Model::NoCD, GraphKind::Grid, 36, 3, 4);
    let records = run_experiment(&config).unwrap();
    let text = render(&records, Format::Csv).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for (row, rec) in rows.iter().zip(&records) {
        assert_eq!(&row[0], rec.trial.to_string());
        assert_eq!(&row[2], "36");
        assert_eq!(&row[3], "10");
        assert_eq!(&row[7], rec.rounds.to_string());
        assert_eq!(&row[8], "true");
        assert_eq!(&row[9], "");
    }
}

#[test]
fn graph_files_match_generated_graphs() {
    let g = generate_graph(
        GraphKind::RandomConnected,
        20,
        None,
        &RandomSource::new(9).derive(&[0x50]),
    )
    .unwrap();
    let path = scratch("g.txt");
    std::fs::write(&path, g.to_text()).unwrap();
    let mut from_file = ExperimentConfig::generated(Model::Beep, GraphKind::RandomConnected, 20, 2, 9);
    let generated = from_file.clone();
    from_file.graph = GraphSource::File(path.clone());
    assert_eq!(from_file.load_graph().unwrap(), generated.load_graph().unwrap());
    assert_eq!(run_experiment(&from_file).unwrap(), run_experiment(&generated).unwrap());

    let out = scratch("report.json");
    let records = run_experiment(&generated).unwrap();
    emit_report(&records, Format::Json, &out).unwrap();
    let back: Vec<radiole::harness::ResultRecord> =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(back, records);
}

#[test]
fn bad_configs_are_rejected() {
    let mut config = ExperimentConfig::generated(Model::NoCD, GraphKind::Path, 8, 1, 0);
    config.constants.round_limit_mult = 0.0;
    assert!(matches!(run_experiment(&config), Err(Error::Config(_))));
    config.constants = Constants::default();
    config.graph = GraphSource::File(scratch("missing.txt"));
    assert!(run_experiment(&config).is_err());
    config.graph = GraphSource::Generated {
        kind: GraphKind::Path,
        n: 0,
        p: None,
    };
    assert!(run_experiment(&config).is_err());
}

#[test]
fn full_variant_batches_elect() {
    let mut config = ExperimentConfig::generated(Model::Beep, GraphKind::Cycle, 32, 3, 2);
    config.variant = Variant::Full;
    assert!(run_experiment(&config).unwrap().iter().all(|r| r.success));
}

#[test]
fn broadcast_reaches_every_node_of_a_cycle() {
    let g = generate_graph(GraphKind::Cycle, 12, None, &RandomSource::new(0)).unwrap();
    for t in 0..5 {
        let out = bc_from_le(
            &g,
            t as u32,
            99,
            Model::NoCD,
            &Constants::default(),
            &RandomSource::new(t),
        )
        .unwrap();
        assert!(out.all_informed());
        assert_eq!(out.rounds, 2 * out.election.rounds);
    }
    assert!(matches!(
        bc_from_le(&g, 0, 1, Model::Beep, &Constants::default(), &RandomSource::new(0)),
        Err(Error::Unsupported(_))
    ));
}
