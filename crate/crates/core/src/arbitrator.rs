//! Strict and normal combination arbitrators.
//!
//! Both are logistic models over joint features of a combination. They
//! differ only in how negatives are sampled: the normal arbitrator sees random
//! in-topic pairs, the strict one sees same-category look-alikes and
//! cross-topic pairs.

use std::collections::BTreeMap;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::artifact;
use crate::catalog::{Catalog, Combination, Product, UNASSIGNED};
use crate::error::{Error, Result};
use crate::features::{char_ngrams, train_logistic, FeatureSpace, Logistic, LogisticConfig};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Strict,
    Normal,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Strict => "strict",
            Variant::Normal => "normal",
        }
    }

    pub fn negative_sampling(self) -> &'static str {
        match self {
            Variant::Strict => "same-cid-in-topic+cross-topic",
            Variant::Normal => "random-in-topic",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Variant::Strict),
            "normal" => Ok(Variant::Normal),
            other => Err(Error::invalid("arbitrator variant", other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    Dataset,
    SampledNegative,
}

/// The parts of a product the arbitrator looks at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemView {
    pub id: String,
    pub title: String,
    pub cid: String,
    pub topic: String,
    pub word: String,
}

impl From<&Product> for ItemView {
    fn from(p: &Product) -> Self {
        Self {
            id: p.id.clone(),
            title: p.title.clone(),
            cid: p.cid.clone(),
            topic: p.topic_or_unassigned().to_string(),
            word: p.top_word().unwrap_or_default().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub items: Vec<ItemView>,
    pub label: Label,
    pub source: PairSource,
}

impl TrainingPair {
    /// Human-readable rendering of the combination.
    pub fn text(&self) -> String {
        self.items
            .iter()
            .map(|i| format!("{} [{}/{}]", i.title, i.cid, i.word))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

struct Pools<'a> {
    by_topic: BTreeMap<&'a str, Vec<&'a Product>>,
    by_topic_cid: BTreeMap<(&'a str, &'a str), Vec<&'a Product>>,
}

impl<'a> Pools<'a> {
    fn new(catalog: &'a Catalog) -> Self {
        let mut by_topic: BTreeMap<&str, Vec<&Product>> = BTreeMap::new();
        let mut by_topic_cid: BTreeMap<(&str, &str), Vec<&Product>> = BTreeMap::new();
        for p in catalog.products() {
            let t = p.topic_or_unassigned();
            if t == UNASSIGNED {
                continue;
            }
            by_topic.entry(t).or_default().push(p);
            by_topic_cid.entry((t, p.cid.as_str())).or_default().push(p);
        }
        Self {
            by_topic,
            by_topic_cid,
        }
    }

    fn random_in_topic(
        &self,
        topic: &str,
        size: usize,
        rng: &mut ChaCha8Rng,
    ) -> Option<Vec<&'a Product>> {
        let pool = self.by_topic.get(topic)?;
        (pool.len() >= size).then(|| {
            rand::seq::index::sample(rng, pool.len(), size)
                .into_iter()
                .map(|i| pool[i])
                .collect()
        })
    }

    fn same_cid(&self, topic: &str, size: usize, rng: &mut ChaCha8Rng) -> Option<Vec<&'a Product>> {
        let cids: Vec<&Vec<&Product>> = self
            .by_topic_cid
            .range((topic, "")..)
            .take_while(|((t, _), _)| *t == topic)
            .map(|(_, v)| v)
            .filter(|v| v.len() >= size)
            .collect();
        let pool = cids.choose(rng)?;
        Some(
            rand::seq::index::sample(rng, pool.len(), size)
                .into_iter()
                .map(|i| pool[i])
                .collect(),
        )
    }

    fn cross_topic(
        &self,
        topic: &str,
        size: usize,
        rng: &mut ChaCha8Rng,
    ) -> Option<Vec<&'a Product>> {
        let own = self.by_topic.get(topic)?;
        let others: Vec<&Product> = self
            .by_topic
            .iter()
            .filter(|(t, _)| **t != topic)
            .flat_map(|(_, v)| v.iter().copied())
            .collect();
        if own.is_empty() || others.len() + 1 < size {
            return None;
        }
        let mut out = vec![*own.choose(rng)?];
        out.extend(
            rand::seq::index::sample(rng, others.len(), size - 1)
                .into_iter()
                .map(|i| others[i]),
        );
        Some(out)
    }
}

/// Positives from the curated dataset plus `ratio` sampled negatives each.
pub fn build_training_pairs(
    dataset: &[Combination],
    catalog: &Catalog,
    variant: Variant,
    ratio: usize,
    seed: u64,
) -> Result<Vec<TrainingPair>> {
    if dataset.is_empty() {
        return Err(Error::Empty("arbitrator dataset"));
    }
    let pools = Pools::new(catalog);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(dataset.len() * (ratio + 1));
    let mut strict_turn = 0usize;
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
        out.push(TrainingPair {
            items: products.iter().map(|p| ItemView::from(*p)).collect(),
            label: Label::Positive,
            source: PairSource::Dataset,
        });
        let topic = if combo.topic.is_empty() {
            products[0].topic_or_unassigned()
        } else {
            combo.topic.as_str()
        };
        let size = products.len();
        for _ in 0..ratio {
            let negative = match variant {
                Variant::Normal => pools.random_in_topic(topic, size, &mut rng),
                Variant::Strict => {
                    strict_turn += 1;
                    if strict_turn % 2 == 1 {
                        pools
                            .same_cid(topic, size, &mut rng)
                            .or_else(|| pools.cross_topic(topic, size, &mut rng))
                    } else {
                        pools
                            .cross_topic(topic, size, &mut rng)
                            .or_else(|| pools.same_cid(topic, size, &mut rng))
                    }
                }
            };
            let negative = negative.ok_or_else(|| {
                Error::Insufficient(format!(
                    "cannot sample a {} negative of size {size} for topic `{topic}`",
                    variant.name()
                ))
            })?;
            out.push(TrainingPair {
                items: negative.into_iter().map(ItemView::from).collect(),
                label: Label::Negative,
                source: PairSource::SampledNegative,
            });
        }
    }
    Ok(out)
}

fn ordered(a: &str, b: &str) -> String {
    if a <= b {
        format!("{a}|{b}")
    } else {
        format!("{b}|{a}")
    }
}

/// Joint feature names: per-item category, word and title n-grams, plus
/// pairwise interactions.
pub fn combination_features(items: &[ItemView]) -> Vec<String> {
    let mut names = Vec::new();
    for it in items {
        names.push(format!("c:{}", it.cid));
        names.push(format!("w:{}", it.word));
        names.extend(char_ngrams("t:", &it.title, 1, 2));
    }
    for (i, a) in items.iter().enumerate() {
        for b in &items[i + 1..] {
            names.push(format!("cc:{}", ordered(&a.cid, &b.cid)));
            names.push(format!("ww:{}", ordered(&a.word, &b.word)));
            names.push(format!("tp:{}", ordered(&a.topic, &b.topic)));
        }
    }
    names
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArbitratorConfig {
    pub training: LogisticConfig,
    /// Decision threshold in (0, 1).
    pub threshold: f64,
}

impl Default for ArbitratorConfig {
    fn default() -> Self {
        Self {
            training: LogisticConfig {
                epochs: 40,
                learning_rate: 0.5,
                l2: 1e-5,
                balanced: true,
                seed: 11,
            },
            threshold: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ArbitratorModel<T = f64> {
    pub variant: Variant,
    pub negative_sampling: String,
    pub threshold: f64,
    features: FeatureSpace,
    scorer: Logistic<T>,
}

const FORMAT: &str = "combocopy-arbitrator";

pub fn train_arbitrator<T: Scalar>(
    pairs: &[TrainingPair],
    variant: Variant,
    config: &ArbitratorConfig,
) -> Result<ArbitratorModel<T>> {
    let has = |l: Label| pairs.iter().any(|p| p.label == l);
    if !has(Label::Positive) || !has(Label::Negative) {
        return Err(Error::invalid(
            "arbitrator training pairs",
            "need both labels",
        ));
    }
    if !(config.threshold > 0.0 && config.threshold < 1.0) {
        return Err(Error::invalid(
            "arbitrator threshold",
            config.threshold.to_string(),
        ));
    }
    let docs: Vec<Vec<String>> = pairs
        .iter()
        .map(|p| combination_features(&p.items))
        .collect();
    let features = FeatureSpace::fit(&docs);
    let examples: Vec<_> = docs
        .iter()
        .zip(pairs)
        .map(|(d, p)| (features.vectorize::<T>(d), p.label == Label::Positive))
        .collect();
    let scorer = train_logistic(&examples, features.dim(), &config.training);
    Ok(ArbitratorModel {
        variant,
        negative_sampling: variant.negative_sampling().to_string(),
        threshold: config.threshold,
        features,
        scorer,
    })
}

impl<T: Scalar> ArbitratorModel<T> {
    pub fn score_items(&self, items: &[ItemView]) -> f64 {
        let x = self.features.vectorize::<T>(&combination_features(items));
        self.scorer.prob(&x).as_f64().clamp(0.0, 1.0)
    }

    pub fn score(&self, combo: &Combination, catalog: &Catalog) -> Result<f64> {
        let items: Vec<ItemView> = catalog
            .resolve(combo)?
            .into_iter()
            .map(ItemView::from)
            .collect();
        Ok(self.score_items(&items))
    }

    /// Fraction of pairs whose predicted label matches.
    pub fn pair_accuracy(&self, pairs: &[TrainingPair]) -> f64 {
        if pairs.is_empty() {
            return 0.0;
        }
        let hits = pairs
            .iter()
            .filter(|p| {
                (self.score_items(&p.items) >= self.threshold) == (p.label == Label::Positive)
            })
            .count();
        hits as f64 / pairs.len() as f64
    }

    /// Percentage of combinations accepted at the model's threshold.
    pub fn acceptance_percent(&self, combos: &[Combination], catalog: &Catalog) -> Result<f64> {
        if combos.is_empty() {
            return Ok(0.0);
        }
        let mut accepted = 0usize;
        for c in combos {
            if self.score(c, catalog)? >= self.threshold {
                accepted += 1;
            }
        }
        Ok(100.0 * accepted as f64 / combos.len() as f64)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        artifact::save(&format!("{FORMAT}-{}", T::NAME), 1, self, path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        artifact::load(&format!("{FORMAT}-{}", T::NAME), 1, path)
    }
}

pub fn score_combination<T: Scalar>(
    model: &ArbitratorModel<T>,
    combo: &Combination,
    catalog: &Catalog,
) -> Result<f64> {
    model.score(combo, catalog)
}

/// Keeps combinations the strict arbitrator scores at or above `threshold`, in input order.
pub fn filter_combinations<T: Scalar>(
    strict: &ArbitratorModel<T>,
    combos: &[Combination],
    catalog: &Catalog,
    threshold: f64,
) -> Result<Vec<Combination>> {
    Ok(filter_scored(strict, combos, catalog, threshold)?
        .into_iter()
        .map(|(c, _)| c)
        .collect())
}

/// As [`filter_combinations`], keeping each survivor's score.
pub fn filter_scored<T: Scalar>(
    strict: &ArbitratorModel<T>,
    combos: &[Combination],
    catalog: &Catalog,
    threshold: f64,
) -> Result<Vec<(Combination, f64)>> {
    if strict.variant != Variant::Strict {
        return Err(Error::invalid(
            "filter model",
            "the final filter must be the strict arbitrator",
        ));
    }
    let mut out = Vec::new();
    for c in combos {
        let s = strict.score(c, catalog)?;
        if s >= threshold {
            out.push((c.clone(), s));
        }
    }
    Ok(out)
}
