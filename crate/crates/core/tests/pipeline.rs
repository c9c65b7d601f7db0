use std::fs;

use sparse_dtm::dtm::MassParameter;
use sparse_dtm::experiments::{run_pipeline, Dataset, ExperimentConfig, Mode};
use sparse_dtm::persistence::PersistenceDiagram;
use sparse_dtm::Error;

fn cube_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Dataset::CubeSkeleton, vec![Mode::WeightedRips, Mode::SparseWeightedRips]);
    cfg.mass = Some(MassParameter::Count(5.0));
    cfg.epsilon = Some(0.5);
    cfg.snr = vec![(1, 5)];
    cfg
}

#[test]
fn cube_diagrams_and_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cube_config();
    cfg.out_dir = Some(dir.path().to_path_buf());
    let report = run_pipeline(&cfg).unwrap();
    assert_eq!(report.n, 120);
    assert_eq!(report.diagrams.len(), 2);
    assert_eq!(report.bottleneck.overall.len(), 2);
    let m = &report.bottleneck.overall;
    assert_eq!(m[0][0], 0.0);
    assert_eq!(m[0][1], m[1][0]);
    assert!(m[0][1].is_finite());

    for mode in ["weighted-rips", "sparse-weighted-rips"] {
        let text = fs::read(dir.path().join(format!("{mode}.diagram.csv"))).unwrap();
        let d = PersistenceDiagram::read_csv(&text[..]).unwrap();
        assert!(!d.is_empty());
        assert!(dir.path().join(format!("{mode}.stats.json")).exists());
    }
    let table = fs::read_to_string(dir.path().join("bottleneck.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert_eq!(table.lines().next().unwrap(), ",weighted-rips,sparse-weighted-rips");
    let snr = fs::read_to_string(dir.path().join("snr.csv")).unwrap();
    assert_eq!(snr.lines().count(), 3);
}

#[test]
fn runs_are_byte_identical() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let mut cfg = ExperimentConfig::new(Dataset::torus_spiral(200), vec![Mode::SparseRips, Mode::WeightedRips]);
        cfg.noise = 0.05;
        cfg.seed = 11;
        cfg.mass = Some(MassParameter::Fraction(0.02));
        cfg.epsilon = Some(0.4);
        cfg.sweep = vec![0.2, 0.6];
        cfg.record_timing = false;
        cfg.out_dir = Some(dir.path().to_path_buf());
        run_pipeline(&cfg).unwrap();
    }
    let mut names: Vec<_> = fs::read_dir(dirs[0].path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "sweep.json"));
    for n in &names {
        let a = fs::read(dirs[0].path().join(n)).unwrap();
        let b = fs::read(dirs[1].path().join(n)).unwrap();
        assert_eq!(a, b, "{n:?}");
    }
}

#[test]
fn different_seeds_differ() {
    let run = |seed| {
        let mut cfg = ExperimentConfig::new(Dataset::torus_spiral(100), vec![Mode::Rips]);
        cfg.noise = 0.1;
        cfg.seed = seed;
        run_pipeline(&cfg).unwrap().diagrams.remove(0).1
    };
    assert_eq!(run(1), run(1));
    assert_ne!(run(1), run(2));
}

#[test]
fn failing_stage_is_named() {
    let mut cfg = cube_config();
    cfg.mass = Some(MassParameter::Count(500.0));
    match run_pipeline(&cfg) {
        Err(Error::Stage { stage, .. }) => assert_eq!(stage, "filtration"),
        other => panic!("unexpected {other:?}"),
    }
    let cfg = ExperimentConfig::new(Dataset::Matrix(vec![vec![0.0]]), vec![]);
    assert!(matches!(run_pipeline(&cfg), Err(Error::Stage { stage: "config", .. })));
}
