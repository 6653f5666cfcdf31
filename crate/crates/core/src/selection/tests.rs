use std::collections::HashSet;

use proptest::prelude::*;

use super::*;
use crate::catalog::Provenance;
use crate::testutil::{combo, product, small_catalog, word_model};

fn dataset() -> Vec<crate::catalog::Combination> {
    vec![
        combo(&["s1", "t1"], "living"),
        combo(&["t2", "s2"], "living"),
        combo(&["ph1", "e1"], "digital"),
    ]
}

#[test]
fn counts_patterns_per_topic() {
    let cat = small_catalog();
    let model = word_model(&cat);
    let table = extract_patterns(&dataset(), &cat, &model, 1).unwrap();
    assert_eq!(table.patterns("living").len(), 1);
    assert_eq!(table.patterns("living")[0].support, 2);
    assert_eq!(table.patterns("digital")[0].support, 1);
    let key = &table.patterns("living")[0].key;
    assert_eq!(
        key.slots()[0],
        Slot {
            cid: "11".into(),
            word: "sofa".into()
        }
    );
}

#[test]
fn min_support_filters() {
    let cat = small_catalog();
    let model = word_model(&cat);
    let table = extract_patterns(&dataset(), &cat, &model, 2).unwrap();
    assert_eq!(table.topics().collect::<Vec<_>>(), vec!["living"]);
    assert_eq!(table.len(), 1);
}

#[test]
fn empty_dataset_and_unknown_product() {
    let cat = small_catalog();
    let model = word_model(&cat);
    assert!(extract_patterns(&[], &cat, &model, 1).unwrap().is_empty());
    let err = extract_patterns(&[combo(&["s1", "nope"], "living")], &cat, &model, 1).unwrap_err();
    assert!(err.to_string().contains("nope"), "{err}");
}

#[test]
fn total_support_equals_dataset_size_per_topic() {
    let cat = small_catalog();
    let counts = count_patterns(&dataset(), &cat, &word_model(&cat)).unwrap();
    assert_eq!(counts["living"].values().sum::<usize>(), 2);
    assert_eq!(counts["digital"].values().sum::<usize>(), 1);
}

#[test]
fn table_round_trips_through_file() {
    let cat = small_catalog();
    let table = extract_patterns(&dataset(), &cat, &word_model(&cat), 1).unwrap();
    let dir = std::env::temp_dir().join(format!("patterns-{}.json", std::process::id()));
    save_pattern_table(&table, &dir).unwrap();
    assert_eq!(load_pattern_table(&dir).unwrap(), table);
    std::fs::remove_file(dir).ok();
}

#[test]
fn random_forced_pair_and_errors() {
    let cat = small_catalog();
    let out = select_random(&cat, "digital", 2, 1, 3).unwrap();
    let ids: HashSet<_> = out[0].products.iter().cloned().collect();
    assert_eq!(ids, HashSet::from(["ph1".to_string(), "e1".to_string()]));
    assert_eq!(out[0].provenance, Provenance::Random);
    assert!(select_random(&cat, "digital", 3, 1, 3).is_err());
    assert_eq!(
        select_random(&cat, "living", 2, 20, 9).unwrap(),
        select_random(&cat, "living", 2, 20, 9).unwrap()
    );
}

#[test]
fn cid_selector_crosses_categories() {
    let cat = small_catalog();
    let out = select_cid(&cat, "living", 2, 50, 1).unwrap();
    for c in &out {
        let cids: HashSet<_> = c
            .products
            .iter()
            .map(|id| cat.get(id).unwrap().cid.clone())
            .collect();
        assert_eq!(cids.len(), 2);
        assert_eq!(c.provenance, Provenance::CidBased);
    }
    assert_eq!(out, select_cid(&cat, "living", 2, 50, 1).unwrap());
    let one_cid = crate::catalog::Catalog::new(vec![
        product("a", "x", "1", "t", "w"),
        product("b", "y", "1", "t", "w"),
    ])
    .unwrap();
    assert!(select_cid(&one_cid, "t", 2, 1, 0).is_err());
}

#[test]
fn pattern_selector_forced_pair() {
    let cat = crate::catalog::Catalog::new(vec![
        product("s", "sofa", "11", "living", "sofa"),
        product("t", "coffee table", "12", "living", "coffee table"),
        product("x", "lamp", "13", "living", "lamp"),
    ])
    .unwrap();
    let key = PatternKey::new(vec![
        Slot {
            cid: "11".into(),
            word: "sofa".into(),
        },
        Slot {
            cid: "12".into(),
            word: "coffee table".into(),
        },
    ]);
    let mut counts = std::collections::BTreeMap::new();
    counts.insert(
        "living".to_string(),
        std::collections::BTreeMap::from([(key.clone(), 3)]),
    );
    let table = PatternTable::from_counts(counts, 1);
    let out = select_pattern(&cat, &table, "living", 4, 0).unwrap();
    for c in &out {
        let ids: HashSet<_> = c.products.iter().map(String::as_str).collect();
        assert_eq!(ids, HashSet::from(["s", "t"]));
        assert_eq!(c.pattern.as_ref(), Some(&key));
        c.validate().unwrap();
    }
    assert!(select_pattern(&cat, &table, "kitchen", 1, 0).is_err());
}

#[test]
fn unsatisfiable_pattern_is_an_error() {
    let cat = small_catalog();
    let key = PatternKey::new(vec![
        Slot {
            cid: "21".into(),
            word: "phone".into(),
        },
        Slot {
            cid: "21".into(),
            word: "phone".into(),
        },
    ]);
    let mut counts = std::collections::BTreeMap::new();
    counts.insert(
        "digital".to_string(),
        std::collections::BTreeMap::from([(key, 1)]),
    );
    let table = PatternTable::from_counts(counts, 1);
    assert!(select_pattern(&cat, &table, "digital", 1, 0).is_err());
}

proptest! {
    #[test]
    fn selectors_never_repeat_products(seed in any::<u64>()) {
        let cat = small_catalog();
        let table = extract_patterns(&dataset(), &cat, &word_model(&cat), 1).unwrap();
        let outs = [
            select_random(&cat, "living", 3, 10, seed).unwrap(),
            select_cid(&cat, "living", 2, 10, seed).unwrap(),
            select_pattern(&cat, &table, "living", 10, seed).unwrap(),
        ];
        for c in outs.iter().flatten() {
            let distinct: HashSet<_> = c.products.iter().collect();
            prop_assert_eq!(distinct.len(), c.products.len());
        }
    }

    #[test]
    fn pattern_outputs_match_their_keys(seed in any::<u64>()) {
        let cat = small_catalog();
        let table = extract_patterns(&dataset(), &cat, &word_model(&cat), 1).unwrap();
        let keys: HashSet<_> = table.patterns("living").iter().map(|p| p.key.clone()).collect();
        for c in select_pattern(&cat, &table, "living", 10, seed).unwrap() {
            let sig = PatternKey::of_products(c.products.iter().map(|id| cat.get(id).unwrap()));
            prop_assert_eq!(Some(&sig), c.pattern.as_ref());
            prop_assert!(keys.contains(&sig));
        }
    }
}
