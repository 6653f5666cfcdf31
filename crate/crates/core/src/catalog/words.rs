use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Catalog, Product, ProductWord};
use crate::error::{Error, Result};
use crate::features::{char_ngrams, train_logistic, FeatureSpace, Logistic, LogisticConfig};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProductWordConfig {
    pub min_ngram: usize,
    pub max_ngram: usize,
    /// Maximum number of words returned by a prediction.
    pub top_k: usize,
    /// Predictions below this confidence are dropped.
    pub min_confidence: f64,
    pub training: LogisticConfig,
}

impl Default for ProductWordConfig {
    fn default() -> Self {
        Self {
            min_ngram: 1,
            max_ngram: 3,
            top_k: 3,
            min_confidence: 0.0,
            training: LogisticConfig::default(),
        }
    }
}

/// One logistic scorer per candidate product word over title/attribute n-grams.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProductWordModel<T = f64> {
    pub config: ProductWordConfig,
    pub vocabulary: Vec<String>,
    features: FeatureSpace,
    scorers: Vec<Logistic<T>>,
}

fn feature_names(
    config: &ProductWordConfig,
    title: &str,
    attributes: &BTreeMap<String, String>,
) -> Vec<String> {
    let mut names = char_ngrams("t:", title, config.min_ngram, config.max_ngram);
    for value in attributes.values() {
        names.extend(char_ngrams("a:", value, config.min_ngram, config.max_ngram));
    }
    names
}

/// Trains the per-word scorers from `(product, gold words)` pairs.
pub fn train_product_word_model<T: Scalar>(
    labeled: &[(Product, Vec<String>)],
    config: ProductWordConfig,
) -> Result<ProductWordModel<T>> {
    if labeled.is_empty() || labeled.iter().all(|(_, w)| w.is_empty()) {
        return Err(Error::Empty("product word training set"));
    }
    let vocabulary: Vec<String> = labeled
        .iter()
        .flat_map(|(_, w)| w.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let docs: Vec<Vec<String>> = labeled
        .iter()
        .map(|(p, _)| feature_names(&config, &p.title, &p.attributes))
        .collect();
    let features = FeatureSpace::fit(&docs);
    let xs: Vec<_> = docs.iter().map(|d| features.vectorize::<T>(d)).collect();
    let scorers = vocabulary
        .iter()
        .map(|word| {
            let examples: Vec<_> = xs
                .iter()
                .zip(labeled)
                .map(|(x, (_, gold))| (x.clone(), gold.contains(word)))
                .collect();
            train_logistic(&examples, features.dim(), &config.training)
        })
        .collect();
    Ok(ProductWordModel {
        config,
        vocabulary,
        features,
        scorers,
    })
}

impl<T: Scalar> ProductWordModel<T> {
    /// Every vocabulary word with its confidence, best first.
    pub fn score_all(
        &self,
        title: &str,
        attributes: &BTreeMap<String, String>,
    ) -> Result<Vec<ProductWord>> {
        if title.trim().is_empty() {
            return Err(Error::invalid("title", "empty"));
        }
        let x = self
            .features
            .vectorize::<T>(&feature_names(&self.config, title, attributes));
        let mut scored: Vec<ProductWord> = self
            .vocabulary
            .iter()
            .zip(&self.scorers)
            .map(|(w, s)| ProductWord::new(w.clone(), s.prob(&x).as_f64().clamp(0.0, 1.0)))
            .collect();
        scored.sort_by(|a, b| {
            b.confidence
                .total_cmp(&a.confidence)
                .then_with(|| a.word.cmp(&b.word))
        });
        Ok(scored)
    }

    /// Ranked words, truncated to `top_k` and filtered by `min_confidence`.
    pub fn predict(
        &self,
        title: &str,
        attributes: &BTreeMap<String, String>,
    ) -> Result<Vec<ProductWord>> {
        let mut out = self.score_all(title, attributes)?;
        out.retain(|w| w.confidence >= self.config.min_confidence);
        out.truncate(self.config.top_k);
        Ok(out)
    }

    pub fn predict_product(&self, product: &Product) -> Result<Vec<ProductWord>> {
        self.predict(&product.title, &product.attributes)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        crate::artifact::save(
            &format!("combocopy-product-words-{}", T::NAME),
            1,
            self,
            path,
        )
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        crate::artifact::load(&format!("combocopy-product-words-{}", T::NAME), 1, path)
    }
}

/// Replaces each product's words with the model's ranked predictions.
pub fn annotate_product_words<T: Scalar>(
    catalog: &Catalog,
    model: &ProductWordModel<T>,
) -> Result<Catalog> {
    let products = catalog
        .products()
        .iter()
        .map(|p| {
            Ok(Product {
                product_words: model.predict_product(p)?,
                ..p.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Catalog::new(products)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(id: &str, title: &str) -> Product {
        Product {
            id: id.into(),
            title: title.into(),
            attributes: Default::default(),
            cid: "c".into(),
            topic: None,
            product_words: vec![],
        }
    }

    fn toy_corpus() -> Vec<(Product, Vec<String>)> {
        let words = ["sofa", "lamp", "rug", "table"];
        let mods = ["leather", "modern", "small", "grey", "oak", "three-seat"];
        let mut out = Vec::new();
        for (wi, w) in words.iter().enumerate() {
            for (mi, m) in mods.iter().enumerate() {
                let title = format!("{m} {w} {}", mods[(mi + wi + 1) % mods.len()]);
                out.push((product(&format!("{w}{mi}"), &title), vec![w.to_string()]));
            }
        }
        out
    }

    #[test]
    fn deterministic_corpus_top1_matches_gold() {
        let corpus = toy_corpus();
        let model: ProductWordModel =
            train_product_word_model(&corpus, ProductWordConfig::default()).unwrap();
        for (p, gold) in &corpus {
            let pred = model.predict_product(p).unwrap();
            assert_eq!(pred[0].word, gold[0], "{}", p.title);
        }
        let pred = model
            .predict("leather sofa three-seat", &Default::default())
            .unwrap();
        assert_eq!(pred[0].word, "sofa");
    }

    #[test]
    fn output_contract() {
        let corpus = toy_corpus();
        let config = ProductWordConfig {
            top_k: 2,
            ..Default::default()
        };
        let model: ProductWordModel = train_product_word_model(&corpus, config).unwrap();
        let a = model.predict("oak table", &Default::default()).unwrap();
        let b = model.predict("oak table", &Default::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.len() <= 2);
        assert!(a.windows(2).all(|w| w[0].confidence >= w[1].confidence));
        assert!(a.iter().all(|w| (0.0..=1.0).contains(&w.confidence)));
        assert!(model.predict("  ", &Default::default()).is_err());
    }

    #[test]
    fn single_example_overfits() {
        let corpus = vec![(
            product("a", "glass coffee table"),
            vec!["coffee table".to_string()],
        )];
        let model: ProductWordModel =
            train_product_word_model(&corpus, ProductWordConfig::default()).unwrap();
        let pred = model
            .predict("glass coffee table", &Default::default())
            .unwrap();
        assert_eq!(pred[0].word, "coffee table");
        assert!(pred[0].confidence > 0.5);
    }

    #[test]
    fn empty_training_set_errors() {
        assert!(train_product_word_model::<f64>(&[], ProductWordConfig::default()).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let model: ProductWordModel<f32> =
            train_product_word_model(&toy_corpus(), ProductWordConfig::default()).unwrap();
        assert_eq!(
            model.predict("grey rug", &Default::default()).unwrap()[0].word,
            "rug"
        );
    }
}
