use std::collections::HashSet;

use crate::catalog::{Catalog, Combination, ProductWordModel};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::text::{is_numeric_token, mentions, normalized_tokens};

/// Product words of one product that count toward coverage.
pub fn coverage_words<T: Scalar>(
    model: &ProductWordModel<T>,
    product: &crate::catalog::Product,
    top_k: usize,
    min_confidence: f64,
) -> Result<Vec<String>> {
    Ok(model
        .score_all(&product.title, &product.attributes)?
        .into_iter()
        .filter(|w| w.confidence >= min_confidence)
        .take(top_k)
        .map(|w| w.word)
        .collect())
}

/// True iff every product has at least `min_per_product` of its qualifying
/// product words mentioned in `copy`.
pub fn check_coverage<T: Scalar>(
    copy: &str,
    combo: &Combination,
    catalog: &Catalog,
    model: &ProductWordModel<T>,
    min_per_product: usize,
    top_k: usize,
    min_confidence: f64,
) -> Result<bool> {
    for product in catalog.resolve(combo)? {
        let words = coverage_words(model, product, top_k, min_confidence)?;
        if words.iter().filter(|w| mentions(copy, w)).count() < min_per_product {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Number of non-numeric copy tokens that appear in no title or attribute value.
pub fn extra_token_count(copy: &str, combo: &Combination, catalog: &Catalog) -> Result<usize> {
    let mut known: HashSet<String> = HashSet::new();
    for p in catalog.resolve(combo)? {
        known.extend(normalized_tokens(&p.title));
        for v in p.attributes.values() {
            known.extend(normalized_tokens(v));
        }
    }
    Ok(normalized_tokens(copy)
        .into_iter()
        .filter(|t| !is_numeric_token(t) && !known.contains(t))
        .count())
}

/// False when the copy adds fewer than `min_extra_tokens` tokens beyond titles and attributes.
pub fn check_creative(
    copy: &str,
    combo: &Combination,
    catalog: &Catalog,
    min_extra_tokens: usize,
) -> Result<bool> {
    Ok(extra_token_count(copy, combo, catalog)? >= min_extra_tokens)
}
