//! Product catalog, curated combinations and copywriting records.

mod topics;
mod words;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selection::PatternKey;

pub use topics::{assign_topics, load_topic_rules, parse_topic_rules, TopicRule, UNASSIGNED};
pub use words::{
    annotate_product_words, train_product_word_model, ProductWordConfig, ProductWordModel,
};

/// A predicted or gold product word with its confidence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductWord {
    pub word: String,
    pub confidence: f64,
}

impl ProductWord {
    pub fn new(word: impl Into<String>, confidence: f64) -> Self {
        Self {
            word: word.into(),
            confidence,
        }
    }
}

// Gold labels may be written as bare strings.
impl<'de> Deserialize<'de> for ProductWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Bare(String),
            Scored { word: String, confidence: f64 },
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Bare(word) => ProductWord::new(word, 1.0),
            Repr::Scored { word, confidence } => ProductWord::new(word, confidence),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Product {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
    pub cid: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub product_words: Vec<ProductWord>,
}

impl Product {
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::invalid("product", "empty id"));
        }
        if self.title.trim().is_empty() {
            return Err(Error::invalid(
                "product",
                format!("`{}` has an empty title", self.id),
            ));
        }
        for w in &self.product_words {
            if !(0.0..=1.0).contains(&w.confidence) {
                return Err(Error::invalid(
                    "product",
                    format!("`{}`: confidence {} outside [0, 1]", self.id, w.confidence),
                ));
            }
        }
        if self
            .product_words
            .windows(2)
            .any(|w| w[0].confidence < w[1].confidence)
        {
            return Err(Error::invalid(
                "product",
                format!("`{}`: product words not sorted by confidence", self.id),
            ));
        }
        Ok(())
    }

    /// Highest-confidence product word, if any.
    pub fn top_word(&self) -> Option<&str> {
        self.product_words.first().map(|w| w.word.as_str())
    }

    pub fn topic_or_unassigned(&self) -> &str {
        self.topic.as_deref().unwrap_or(UNASSIGNED)
    }
}

/// Validated products with an id index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Catalog {
    products: Vec<Product>,
    index: HashMap<String, usize>,
}

impl Catalog {
    pub fn new(products: Vec<Product>) -> Result<Self> {
        let mut index = HashMap::with_capacity(products.len());
        for (i, p) in products.iter().enumerate() {
            p.validate()?;
            if index.insert(p.id.clone(), i).is_some() {
                return Err(Error::DuplicateProduct(p.id.clone()));
            }
        }
        Ok(Self { products, index })
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn into_products(self) -> Vec<Product> {
        self.products
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Product> {
        self.index.get(id).map(|&i| &self.products[i])
    }

    pub fn require(&self, id: &str) -> Result<&Product> {
        self.get(id)
            .ok_or_else(|| Error::UnknownProduct(id.to_string()))
    }

    /// Resolves every product of a combination, in order.
    pub fn resolve(&self, combo: &Combination) -> Result<Vec<&Product>> {
        combo.products.iter().map(|id| self.require(id)).collect()
    }

    /// Products in a topic, in catalog order.
    pub fn in_topic<'a>(&'a self, topic: &'a str) -> impl Iterator<Item = &'a Product> + 'a {
        self.products
            .iter()
            .filter(move |p| p.topic.as_deref() == Some(topic))
    }

    /// Sorted, de-duplicated topic ids (excluding the unassigned bucket).
    pub fn topics(&self) -> Vec<String> {
        let mut t: Vec<String> = self
            .products
            .iter()
            .filter_map(|p| p.topic.clone())
            .filter(|t| t != UNASSIGNED)
            .collect();
        t.sort();
        t.dedup();
        t
    }
}

/// Parses a line-delimited catalog. `origin` is only used in error messages.
pub fn parse_catalog(reader: impl BufRead, origin: &Path) -> Result<Catalog> {
    let mut products = Vec::new();
    let mut seen = HashSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let at = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            line: n + 1,
            message,
        };
        let product: Product = serde_json::from_str(&line).map_err(|e| at(e.to_string()))?;
        product.validate().map_err(|e| at(e.to_string()))?;
        if !seen.insert(product.id.clone()) {
            return Err(at(Error::DuplicateProduct(product.id).to_string()));
        }
        products.push(product);
    }
    Catalog::new(products)
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog> {
    let path = path.as_ref();
    parse_catalog(BufReader::new(File::open(path)?), path)
}

pub fn write_catalog(catalog: &Catalog, out: impl Write) -> Result<()> {
    write_jsonl(catalog.products(), out)
}

pub fn save_catalog(catalog: &Catalog, path: impl AsRef<Path>) -> Result<()> {
    write_catalog(catalog, BufWriter::new(File::create(path)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Dataset,
    Random,
    CidBased,
    Pattern,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Combination {
    pub products: Vec<String>,
    pub topic: String,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternKey>,
}

impl Combination {
    pub fn new(products: Vec<String>, topic: impl Into<String>, provenance: Provenance) -> Self {
        Self {
            products,
            topic: topic.into(),
            provenance,
            pattern: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.products.len() < 2 {
            return Err(Error::invalid("combination", "needs at least two products"));
        }
        let distinct: HashSet<&String> = self.products.iter().collect();
        if distinct.len() != self.products.len() {
            return Err(Error::invalid("combination", "repeated product id"));
        }
        if self.provenance == Provenance::Pattern && self.pattern.is_none() {
            return Err(Error::invalid(
                "combination",
                "pattern provenance without a pattern key",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopywritingRecord {
    pub combination: Combination,
    pub content: String,
    #[serde(default)]
    pub title: String,
}

impl CopywritingRecord {
    pub fn validate(&self) -> Result<()> {
        self.combination.validate()?;
        if self.content.trim().is_empty() {
            return Err(Error::invalid("copywriting record", "empty content"));
        }
        Ok(())
    }
}

/// Reads one JSON document per non-blank line.
pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(items: &[T], mut out: impl Write) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_jsonl<T: Serialize>(items: &[T], path: impl AsRef<Path>) -> Result<()> {
    write_jsonl(items, BufWriter::new(File::create(path)?))
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<CopywritingRecord>> {
    let records: Vec<CopywritingRecord> = read_jsonl(path)?;
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}
