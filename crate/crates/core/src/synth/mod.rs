//! Seeded synthetic corpus: catalog, topic rules, curated combinations,
//! raw copywriting with realistic defects, domain pretraining texts and a
//! demonstration forbidden-pattern lexicon.

mod world;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{Combination, CopywritingRecord, Product, ProductWord, Provenance, TopicRule};
use crate::enhancement::LexiconEntry;
use crate::error::Result;

use world::{ProductType, Topic, ALTERABLE, COLORS, CONNECTORS, FORBIDDEN, STYLES, TOPICS, VAGUE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub seed: u64,
    pub products_per_type: usize,
    /// Share of products shipped with a gold product word.
    pub labeled_fraction: f64,
    pub combinations: usize,
    pub copies_per_combination: usize,
    pub pretrain_texts: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 2023,
            products_per_type: 33,
            labeled_fraction: 0.6,
            combinations: 300,
            copies_per_combination: 2,
            pretrain_texts: 500,
        }
    }
}

/// Defect planted in a raw copywriting record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Defect {
    None,
    Alterable,
    Forbidden,
    LowCoverage,
    TooSimple,
}

const DEFECT_WEIGHTS: [(Defect, u32); 5] = [
    (Defect::None, 18),
    (Defect::Alterable, 6),
    (Defect::Forbidden, 6),
    (Defect::LowCoverage, 5),
    (Defect::TooSimple, 5),
];

#[derive(Clone, Debug, PartialEq)]
pub struct SynthCorpus {
    /// Products without topics; some carry a gold product word.
    pub products: Vec<Product>,
    pub topic_rules: Vec<TopicRule>,
    pub combinations: Vec<Combination>,
    pub records: Vec<CopywritingRecord>,
    /// Planted defect of each record, parallel to `records`.
    pub defects: Vec<Defect>,
    pub pretrain_texts: Vec<String>,
    pub lexicon: Vec<LexiconEntry>,
}

/// File names written by [`SynthCorpus::write`].
pub mod files {
    pub const CATALOG: &str = "catalog.jsonl";
    pub const TOPIC_RULES: &str = "topics.toml";
    pub const COMBINATIONS: &str = "combinations.jsonl";
    pub const COPYWRITING: &str = "copywriting.jsonl";
    pub const PRETRAIN: &str = "pretrain.txt";
    pub const LEXICON: &str = "lexicon.jsonl";
}

pub fn topic_rules() -> Vec<TopicRule> {
    TOPICS
        .iter()
        .map(|t| TopicRule {
            topic: t.id.to_string(),
            match_terms: Vec::new(),
            match_cids: t.types.iter().map(|p| p.cid.to_string()).collect(),
        })
        .collect()
}

pub fn demo_lexicon() -> Vec<LexiconEntry> {
    let mut out: Vec<LexiconEntry> = ["再加*元", "全网最低", "假一赔十", "国家级"]
        .iter()
        .map(|p| LexiconEntry {
            pattern: p.to_string(),
            alterable: false,
            replacement: None,
        })
        .collect();
    out.extend(ALTERABLE.iter().map(|(p, r)| LexiconEntry {
        pattern: p.to_string(),
        alterable: true,
        replacement: Some(r.to_string()),
    }));
    out
}

struct Item {
    id: String,
    topic: usize,
    kind: usize,
    modifier: &'static str,
    title: String,
}

fn kind(item: &Item) -> &'static ProductType {
    &TOPICS[item.topic].types[item.kind]
}

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &'a [&'a str]) -> &'a str {
    xs.choose(rng).copied().unwrap_or_default()
}

/// Copy naming each product by modifier and word, with one selling point each.
fn clean_copy(rng: &mut ChaCha8Rng, topic: &Topic, items: &[&Item]) -> String {
    let mut s = pick(rng, topic.openers).to_string();
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            s.push_str(pick(rng, CONNECTORS));
        }
        if rng.gen_bool(0.6) {
            s.push_str(it.modifier);
        }
        s.push_str(kind(it).word);
        s.push_str(pick(rng, kind(it).points));
    }
    s.push('，');
    s.push_str(pick(rng, topic.closings));
    s
}

fn defective_copy(rng: &mut ChaCha8Rng, topic: &Topic, items: &[&Item], defect: Defect) -> String {
    match defect {
        Defect::None => clean_copy(rng, topic, items),
        Defect::Alterable => {
            let (word, _) = ALTERABLE.choose(rng).copied().unwrap_or(ALTERABLE[0]);
            let base = clean_copy(rng, topic, items);
            let cut = base.rfind('，').unwrap_or(0);
            format!("{}，{word}的搭配{}", &base[..cut], &base[cut..])
        }
        Defect::Forbidden => format!(
            "{}！{}",
            pick(rng, FORBIDDEN),
            clean_copy(rng, topic, items)
        ),
        Defect::LowCoverage => format!("{}{}", pick(rng, topic.openers), pick(rng, VAGUE)),
        Defect::TooSimple => items
            .iter()
            .map(|i| i.title.as_str())
            .collect::<Vec<_>>()
            .join("+"),
    }
}

fn pretrain_text(rng: &mut ChaCha8Rng, item: &Item) -> String {
    let topic = &TOPICS[item.topic];
    let k = kind(item);
    let mut points: Vec<&str> = k.points.to_vec();
    points.shuffle(rng);
    match rng.gen_range(0..3) {
        0 => format!(
            "{}，{}，{}。{}",
            item.title,
            points[0],
            points[1],
            pick(rng, topic.closings)
        ),
        1 => format!(
            "{}这款{}{}{}，{}",
            pick(rng, topic.openers),
            item.modifier,
            k.word,
            points[0],
            pick(rng, topic.closings)
        ),
        _ => format!(
            "{}{}，{}又{}，{}",
            item.modifier,
            k.word,
            points[0],
            points[1],
            pick(rng, topic.closings)
        ),
    }
}

pub fn generate(config: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut items = Vec::new();
    let mut products = Vec::new();
    let mut by_kind: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (ti, topic) in TOPICS.iter().enumerate() {
        for (ki, k) in topic.types.iter().enumerate() {
            for _ in 0..config.products_per_type {
                let modifier = pick(&mut rng, k.modifiers);
                let mut title = modifier.to_string();
                if rng.gen_bool(0.3) {
                    title.insert_str(0, pick(&mut rng, STYLES));
                }
                title.push_str(k.word);
                title.push_str(pick(&mut rng, k.suffixes));
                let id = format!("p{:04}", items.len() + 1);
                let mut attributes = BTreeMap::new();
                attributes.insert("风格".to_string(), pick(&mut rng, STYLES).to_string());
                attributes.insert("颜色".to_string(), pick(&mut rng, COLORS).to_string());
                let labeled = rng.gen_bool(config.labeled_fraction);
                products.push(Product {
                    id: id.clone(),
                    title: title.clone(),
                    attributes,
                    cid: k.cid.to_string(),
                    topic: None,
                    product_words: if labeled {
                        vec![ProductWord::new(k.word, 1.0)]
                    } else {
                        Vec::new()
                    },
                });
                by_kind.entry((ti, ki)).or_default().push(items.len());
                items.push(Item {
                    id,
                    topic: ti,
                    kind: ki,
                    modifier,
                    title,
                });
            }
        }
    }

    let defect_dist =
        WeightedIndex::new(DEFECT_WEIGHTS.iter().map(|(_, w)| *w)).expect("positive weights");
    let mut combinations = Vec::with_capacity(config.combinations);
    let mut records = Vec::new();
    let mut defects = Vec::new();
    for _ in 0..config.combinations {
        let ti = rng.gen_range(0..TOPICS.len());
        let topic = &TOPICS[ti];
        let bundle_dist =
            WeightedIndex::new(topic.bundles.iter().map(|(_, w)| *w)).expect("positive weights");
        let (kinds, _) = topic.bundles[bundle_dist.sample(&mut rng)];
        let chosen: Vec<&Item> = kinds
            .iter()
            .map(|&ki| {
                let pool = &by_kind[&(ti, ki)];
                &items[*pool.choose(&mut rng).expect("non-empty type pool")]
            })
            .collect();
        let combo = Combination::new(
            chosen.iter().map(|i| i.id.clone()).collect(),
            topic.id,
            Provenance::Dataset,
        );
        let title: String = chosen
            .iter()
            .map(|i| kind(i).word)
            .collect::<Vec<_>>()
            .join("+")
            + "组合";
        for _ in 0..config.copies_per_combination {
            let defect = DEFECT_WEIGHTS[defect_dist.sample(&mut rng)].0;
            records.push(CopywritingRecord {
                combination: combo.clone(),
                content: defective_copy(&mut rng, topic, &chosen, defect),
                title: title.clone(),
            });
            defects.push(defect);
        }
        combinations.push(combo);
    }

    let pretrain_texts = (0..config.pretrain_texts)
        .map(|_| {
            let item = items.choose(&mut rng).expect("non-empty catalog");
            pretrain_text(&mut rng, item)
        })
        .collect();

    SynthCorpus {
        products,
        topic_rules: topic_rules(),
        combinations,
        records,
        defects,
        pretrain_texts,
        lexicon: demo_lexicon(),
    }
}

#[derive(Serialize)]
struct RuleFile<'a> {
    rules: &'a [TopicRule],
}

impl SynthCorpus {
    /// Writes every part under `dir` using the names in [`files`].
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let path = |name: &str| dir.join(name);
        crate::catalog::save_jsonl(&self.products, path(files::CATALOG))?;
        let rules = toml::to_string(&RuleFile {
            rules: &self.topic_rules,
        })
        .map_err(|e| crate::Error::Format(e.to_string()))?;
        fs::write(path(files::TOPIC_RULES), rules)?;
        crate::catalog::save_jsonl(&self.combinations, path(files::COMBINATIONS))?;
        crate::catalog::save_jsonl(&self.records, path(files::COPYWRITING))?;
        fs::write(path(files::PRETRAIN), self.pretrain_texts.join("\n") + "\n")?;
        crate::catalog::save_jsonl(&self.lexicon, path(files::LEXICON))?;
        Ok([
            files::CATALOG,
            files::TOPIC_RULES,
            files::COMBINATIONS,
            files::COPYWRITING,
            files::PRETRAIN,
            files::LEXICON,
        ]
        .iter()
        .map(|n| path(n))
        .collect())
    }
}
