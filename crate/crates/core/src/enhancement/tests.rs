use proptest::prelude::*;

use super::*;
use crate::catalog::{Combination, CopywritingRecord};
use crate::testutil::*;

fn lexicon() -> ForbiddenLexicon {
    ForbiddenLexicon::new(vec![
        LexiconEntry {
            pattern: "再加*元".into(),
            alterable: false,
            replacement: None,
        },
        LexiconEntry {
            pattern: "最好".into(),
            alterable: true,
            replacement: Some("很好".into()),
        },
    ])
    .unwrap()
}

fn record(ids: &[&str], topic: &str, content: &str) -> CopywritingRecord {
    CopywritingRecord {
        combination: combo(ids, topic),
        content: content.into(),
        title: String::new(),
    }
}

fn coverage(copy: &str, c: &Combination, min: usize) -> bool {
    let cat = table2_catalog();
    let model = word_model(&cat);
    check_coverage(copy, c, &cat, &model, min, 3, 0.5).unwrap()
}

#[test]
fn sofa_original_lacks_coverage() {
    let c = combo(&["l1", "l3"], "living");
    assert!(!coverage(SOFA_ORIGINAL, &c, 1));
    assert!(coverage(SOFA_GENERATED, &c, 1));
    assert!(coverage("沙发和茶几", &c, 1));
}

#[test]
fn water_filter_original_is_too_simple() {
    let cat = table2_catalog();
    let c = combo(&["k1", "k2"], "kitchen");
    assert!(!check_creative(FILTER_ORIGINAL, &c, &cat, 5).unwrap());
    assert!(check_creative(FILTER_GENERATED, &c, &cat, 5).unwrap());
}

#[test]
fn concatenated_titles_are_too_simple() {
    let cat = table2_catalog();
    let c = combo(&["l1", "l3"], "living");
    assert_eq!(extra_token_count("真皮沙发玻璃茶几", &c, &cat).unwrap(), 0);
    assert!(!check_creative("真皮沙发 玻璃茶几", &c, &cat, 1).unwrap());
}

#[test]
fn extra_tokens_counted_by_hand() {
    let cat = table2_catalog();
    let c = combo(&["l1", "l3"], "living");
    // 搭 配 让 客 厅 更 温 馨
    let copy = "真皮沙发搭配玻璃茶几，让客厅更温馨";
    assert_eq!(extra_token_count(copy, &c, &cat).unwrap(), 8);
    assert!(check_creative(copy, &c, &cat, 8).unwrap());
    assert!(!check_creative(copy, &c, &cat, 9).unwrap());
}

#[test]
fn unknown_product_is_an_error() {
    let cat = table2_catalog();
    let model = word_model(&cat);
    let c = combo(&["l1", "zz"], "living");
    assert!(check_coverage("x", &c, &cat, &model, 1, 3, 0.5).is_err());
}

#[test]
fn dataset_verdicts() {
    let cat = table2_catalog();
    let model = word_model(&cat);
    let records = vec![
        record(&["l1", "l3"], "living", SOFA_ORIGINAL),
        record(&["k1", "k2"], "kitchen", FILTER_ORIGINAL),
        record(&["l1", "l3"], "living", SOFA_GENERATED),
        record(&["k1", "k2"], "kitchen", FILTER_GENERATED),
        record(
            &["l2", "l4"],
            "living",
            "周末窝在沙发里，茶几上摆一壶清茶，这款最好看的组合让生活慢下来。",
        ),
    ];
    let (cleaned, report) = enhance_dataset(
        &records,
        &cat,
        &lexicon(),
        &model,
        &EnhanceConfig::default(),
    )
    .unwrap();
    let v = &report.verdicts;
    assert!(!v[0].approved && !v[0].coverage && v[0].forbidden == ForbiddenStatus::Clean);
    assert!(!v[1].approved && v[1].forbidden == ForbiddenStatus::Dropped && !v[1].creative);
    assert!(v[2].approved && v[3].approved);
    assert!(v[4].approved && v[4].forbidden == ForbiddenStatus::Altered);
    assert_eq!(cleaned.len(), 3);
    assert!(cleaned[2].content.contains("很好看"));
    assert_eq!(report.approved, 3);
    assert_eq!(report.approval_rate, 0.6);
    for verdict in v {
        assert_eq!(
            verdict.approved,
            verdict.forbidden != ForbiddenStatus::Dropped && verdict.coverage && verdict.creative
        );
    }

    let (again, report2) = enhance_dataset(
        &cleaned,
        &cat,
        &lexicon(),
        &model,
        &EnhanceConfig::default(),
    )
    .unwrap();
    assert_eq!(again, cleaned);
    assert_eq!(report2.approval_rate, 1.0);
}

#[test]
fn empty_dataset() {
    let cat = table2_catalog();
    let model = word_model(&cat);
    let (cleaned, report) =
        enhance_dataset(&[], &cat, &lexicon(), &model, &EnhanceConfig::default()).unwrap();
    assert!(cleaned.is_empty());
    assert_eq!(
        (report.total, report.approved, report.approval_rate),
        (0, 0, 0.0)
    );
}

#[test]
fn report_has_summary_line() {
    let report = EnhancementReport::from_verdicts(vec![]);
    let mut buf = Vec::new();
    report.write(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.trim_end().ends_with("}}"));
    assert!(text.contains("\"approval_rate\":0.0"));
}

proptest! {
    #[test]
    fn coverage_monotone_in_products_and_threshold(
        picks in proptest::collection::vec(0usize..4, 0..6),
        extra in prop::sample::select(vec!["l2", "l4", "l5", "k1", "k2"]),
        min in 0usize..3,
    ) {
        let pieces = ["沙发", "茶几", "落地灯", "温馨"];
        let copy: String = picks.iter().map(|&i| pieces[i]).collect();
        let two = combo(&["l1", "l3"], "living");
        let three = combo(&["l1", "l3", extra], "living");
        if coverage(&copy, &three, 1) {
            prop_assert!(coverage(&copy, &two, 1));
        }
        if coverage(&copy, &two, min + 1) {
            prop_assert!(coverage(&copy, &two, min));
        }
    }

    #[test]
    fn creative_monotone_in_threshold(copy in "[真皮沙发搭配玻璃茶几让客厅更温馨 ]{0,20}", t in 0usize..10) {
        let cat = table2_catalog();
        let c = combo(&["l1", "l3"], "living");
        if check_creative(&copy, &c, &cat, t + 1).unwrap() {
            prop_assert!(check_creative(&copy, &c, &cat, t).unwrap());
        }
    }
}
