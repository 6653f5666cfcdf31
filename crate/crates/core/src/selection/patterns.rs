use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, Combination, Product, ProductWordModel, UNASSIGNED};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One slot of a pattern: detailed category plus top product word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub cid: String,
    pub word: String,
}

/// Order-insensitive multiset of slots, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternKey(Vec<Slot>);

impl PatternKey {
    pub fn new(mut slots: Vec<Slot>) -> Self {
        slots.sort();
        Self(slots)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Signature of a list of products using their annotated top words.
    pub fn of_products<'a>(products: impl IntoIterator<Item = &'a Product>) -> Self {
        Self::new(
            products
                .into_iter()
                .map(|p| Slot {
                    cid: p.cid.clone(),
                    word: p.top_word().unwrap_or_default().to_string(),
                })
                .collect(),
        )
    }
}

impl std::fmt::Display for PatternKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}/{}", s.cid, s.word)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributePattern {
    pub key: PatternKey,
    pub support: usize,
}

/// Patterns per topic, each list sorted by support (descending) then key.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternTable {
    topics: BTreeMap<String, Vec<AttributePattern>>,
}

impl PatternTable {
    pub fn from_counts(
        counts: BTreeMap<String, BTreeMap<PatternKey, usize>>,
        min_support: usize,
    ) -> Self {
        let mut topics = BTreeMap::new();
        for (topic, keys) in counts {
            let mut list: Vec<AttributePattern> = keys
                .into_iter()
                .filter(|(_, s)| *s >= min_support.max(1))
                .map(|(key, support)| AttributePattern { key, support })
                .collect();
            if list.is_empty() {
                continue;
            }
            list.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.key.cmp(&b.key)));
            topics.insert(topic, list);
        }
        Self { topics }
    }

    pub fn patterns(&self, topic: &str) -> &[AttributePattern] {
        self.topics.get(topic).map_or(&[], Vec::as_slice)
    }

    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.topics.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    pub fn len(&self) -> usize {
        self.topics.values().map(Vec::len).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for (topic, list) in &self.topics {
            for p in list {
                if p.support == 0 || p.key.len() < 2 {
                    return Err(Error::invalid(
                        "pattern table",
                        format!("topic `{topic}` pattern {} is degenerate", p.key),
                    ));
                }
            }
            if list.windows(2).any(|w| w[0].support < w[1].support) {
                return Err(Error::invalid(
                    "pattern table",
                    format!("topic `{topic}` not sorted by support"),
                ));
            }
        }
        Ok(())
    }
}

pub fn save_pattern_table(table: &PatternTable, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(table)? + "\n")?;
    Ok(())
}

pub fn load_pattern_table(path: impl AsRef<Path>) -> Result<PatternTable> {
    let table: PatternTable = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    table.validate()?;
    Ok(table)
}

/// Slot for a product under the word model's top-1 prediction.
pub fn slot_of<T: Scalar>(product: &Product, model: &ProductWordModel<T>) -> Result<Slot> {
    let words = model.score_all(&product.title, &product.attributes)?;
    Ok(Slot {
        cid: product.cid.clone(),
        word: words.into_iter().next().map(|w| w.word).unwrap_or_default(),
    })
}

fn combination_topic<'a>(combo: &'a Combination, products: &[&'a Product]) -> &'a str {
    if !combo.topic.is_empty() && combo.topic != UNASSIGNED {
        &combo.topic
    } else {
        products
            .first()
            .map_or(UNASSIGNED, |p| p.topic_or_unassigned())
    }
}

/// Unfiltered per-topic key counts.
pub fn count_patterns<T: Scalar>(
    dataset: &[Combination],
    catalog: &Catalog,
    model: &ProductWordModel<T>,
) -> Result<BTreeMap<String, BTreeMap<PatternKey, usize>>> {
    let mut counts: BTreeMap<String, BTreeMap<PatternKey, usize>> = BTreeMap::new();
    for (index, combo) in dataset.iter().enumerate() {
        let products = combo
            .products
            .iter()
            .map(|id| {
                catalog
                    .get(id)
                    .ok_or_else(|| Error::UnknownProductInCombination {
                        index,
                        id: id.clone(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let key = PatternKey::new(
            products
                .iter()
                .map(|p| slot_of(p, model))
                .collect::<Result<_>>()?,
        );
        let topic = combination_topic(combo, &products).to_string();
        *counts.entry(topic).or_default().entry(key).or_default() += 1;
    }
    Ok(counts)
}

/// Mines `(cid, top word)` multisets from curated combinations.
pub fn extract_patterns<T: Scalar>(
    dataset: &[Combination],
    catalog: &Catalog,
    model: &ProductWordModel<T>,
    min_support: usize,
) -> Result<PatternTable> {
    Ok(PatternTable::from_counts(
        count_patterns(dataset, catalog, model)?,
        min_support,
    ))
}
