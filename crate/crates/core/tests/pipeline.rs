mod common;

use combocopy::catalog::Combination;
use combocopy::pipeline::{run_pipeline, Artifacts, PipelineResult};
use combocopy::selection::select_pattern;
use combocopy::Error;

fn without_timings(results: &[PipelineResult]) -> Vec<PipelineResult> {
    results
        .iter()
        .cloned()
        .map(|mut r| {
            r.timings = Default::default();
            r
        })
        .collect()
}

#[test]
fn pipeline_contract() {
    let fx = common::small_fixture(5);
    let artifacts = Artifacts::load(fx.config.clone()).unwrap();
    assert_eq!(artifacts.checksums.len(), 6);

    assert!(run_pipeline(&artifacts, "kitchen", 0).unwrap().is_empty());

    let a = run_pipeline(&artifacts, "kitchen", 6).unwrap();
    let b = run_pipeline(&artifacts, "kitchen", 6).unwrap();
    assert_eq!(without_timings(&a), without_timings(&b));

    assert!(!a.is_empty());
    let selected = select_pattern(
        &artifacts.catalog,
        &artifacts.patterns,
        "kitchen",
        6,
        fx.config.seed,
    )
    .unwrap();
    let threshold = artifacts.strict_threshold();
    for r in &a {
        assert!(selected.contains(&r.combination));
        assert!(r.score >= threshold);
        assert!(r.attempts >= 1 && r.attempts <= 1 + fx.config.retries);
        if !r.verdict.approved {
            assert_eq!(r.attempts, 1 + fx.config.retries);
        }
        assert!(r.timings.generate_ms >= 0.0);
    }

    match run_pipeline(&artifacts, "no-such-topic", 3) {
        Err(Error::Stage { stage, .. }) => assert_eq!(stage, "select"),
        other => panic!("expected a select stage error, got {other:?}"),
    }
}

#[test]
fn assess_and_generate_on_explicit_products() {
    let fx = common::small_fixture(6);
    let artifacts = Artifacts::load(fx.config.clone()).unwrap();
    let ids: Vec<String> = artifacts
        .catalog
        .in_topic("digital")
        .take(2)
        .map(|p| p.id.clone())
        .collect();
    let combo: Combination = artifacts.combination_of(&ids).unwrap();
    assert_eq!(combo.topic, "digital");
    let decode = fx.config.decode.clone();
    let (g1, _) = artifacts.generate(&combo, &decode, 3).unwrap();
    let (g2, _) = artifacts.generate(&combo, &decode, 3).unwrap();
    assert_eq!(g1.copy, g2.copy);
    let verdict = artifacts.assess(&combo, "再加99元享超值好礼").unwrap();
    assert!(!verdict.approved);
    assert!(artifacts.combination_of(&[]).is_err());
    assert!(artifacts.combination_of(&["missing".to_string()]).is_err());
}

#[test]
fn missing_artifact_is_reported() {
    let fx = common::small_fixture(7);
    std::fs::remove_file(&fx.config.model).unwrap();
    let err = Artifacts::load(fx.config.clone()).err().unwrap();
    assert!(err.to_string().contains("model"), "{err}");
}
