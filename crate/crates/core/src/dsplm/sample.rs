use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::vocab::{is_special, Vocab, EOS, MASK, SEP};
use crate::catalog::{Catalog, Combination, CopywritingRecord};
use crate::error::{Error, Result};

/// Model input: a bidirectionally encoded prefix and an EOS-terminated target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixSample {
    pub prefix: Vec<u32>,
    pub target: Vec<u32>,
}

impl PrefixSample {
    pub fn new(prefix: Vec<u32>, target: Vec<u32>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::Empty("prefix"));
        }
        if target.last() != Some(&EOS) {
            return Err(Error::invalid("sample", "target must end with EOS"));
        }
        Ok(Self { prefix, target })
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Prefix followed by target.
    pub fn tokens(&self) -> Vec<u32> {
        let mut t = self.prefix.clone();
        t.extend_from_slice(&self.target);
        t
    }

    pub fn check_len(&self, limit: usize) -> Result<()> {
        if self.len() > limit {
            return Err(Error::TooLong {
                len: self.len(),
                limit,
            });
        }
        Ok(())
    }
}

/// Serializes a combination as `topic SEP title₁ SEP words₁ SEP title₂ SEP words₂ ...`.
pub fn encode_prefix(
    combo: &Combination,
    catalog: &Catalog,
    vocab: &Vocab,
    words_per_product: usize,
) -> Result<Vec<u32>> {
    let products = catalog.resolve(combo)?;
    let mut out = vocab.encode(&combo.topic)?;
    for p in products {
        out.push(SEP);
        out.extend(vocab.encode(&p.title)?);
        out.push(SEP);
        let words: Vec<&str> = p
            .product_words
            .iter()
            .take(words_per_product)
            .map(|w| w.word.as_str())
            .collect();
        out.extend(vocab.encode(&words.join(" "))?);
    }
    Ok(out)
}

pub fn encode_sample(
    combo: &Combination,
    catalog: &Catalog,
    copy: &str,
    vocab: &Vocab,
    words_per_product: usize,
    max_len: usize,
) -> Result<PrefixSample> {
    let prefix = encode_prefix(combo, catalog, vocab, words_per_product)?;
    let mut target = vocab.encode(copy)?;
    target.push(EOS);
    let s = PrefixSample::new(prefix, target)?;
    s.check_len(max_len)?;
    Ok(s)
}

/// Encodes every record, skipping those with unknown characters or over `max_len`.
/// Returns the samples and the number skipped.
pub fn encode_records(
    records: &[CopywritingRecord],
    catalog: &Catalog,
    vocab: &Vocab,
    words_per_product: usize,
    max_len: usize,
) -> Result<(Vec<PrefixSample>, usize)> {
    let mut out = Vec::with_capacity(records.len());
    let mut skipped = 0;
    for r in records {
        match encode_sample(
            &r.combination,
            catalog,
            &r.content,
            vocab,
            words_per_product,
            max_len,
        ) {
            Ok(s) => out.push(s),
            Err(Error::TooLong { .. } | Error::UnknownCharacter(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((out, skipped))
}

/// Catalog strings that can appear in a prefix: titles, product words, topics.
pub fn catalog_texts(catalog: &Catalog) -> Vec<String> {
    let mut out = Vec::new();
    for p in catalog.products() {
        out.push(p.title.clone());
        out.extend(p.product_words.iter().map(|w| w.word.clone()));
    }
    out.extend(catalog.topics());
    out
}

/// Splits a plain text into a prefix sample at character `split`.
pub fn split_text_sample(ids: &[u32], split: usize) -> Result<PrefixSample> {
    if split == 0 || split >= ids.len() {
        return Err(Error::invalid(
            "split point",
            format!("{split} outside 1..{}", ids.len()),
        ));
    }
    let mut target = ids[split..].to_vec();
    target.push(EOS);
    PrefixSample::new(ids[..split].to_vec(), target)
}

/// Row-major `n × n` mask: position `i` may attend to `j` iff `j < p` or `j <= i`.
pub fn attention_mask(p: usize, n: usize) -> Result<Vec<Vec<bool>>> {
    if p < 1 || p > n {
        return Err(Error::invalid(
            "attention mask",
            format!("prefix length {p} outside 1..={n}"),
        ));
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| j < p || j <= i).collect())
        .collect())
}

/// Corrupted prefix plus `(position, original id)` reconstruction targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corruption {
    pub tokens: Vec<u32>,
    pub targets: Vec<(usize, u32)>,
}

impl Corruption {
    pub fn restore(&self) -> Vec<u32> {
        let mut t = self.tokens.clone();
        for &(i, id) in &self.targets {
            t[i] = id;
        }
        t
    }
}

/// Replaces `ceil(ratio * len)` non-special positions (at most all of them) with MASK.
pub fn corrupt_input(prefix: &[u32], ratio: f64, seed: u64) -> Result<Corruption> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(
            "corruption ratio",
            format!("{ratio} outside (0, 1)"),
        ));
    }
    let eligible: Vec<usize> = (0..prefix.len())
        .filter(|&i| !is_special(prefix[i]))
        .collect();
    if eligible.is_empty() {
        return Err(Error::invalid("prefix", "no maskable tokens"));
    }
    let k = ((ratio * prefix.len() as f64).ceil() as usize).min(eligible.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = sample(&mut rng, eligible.len(), k)
        .into_iter()
        .map(|i| eligible[i])
        .collect();
    picked.sort_unstable();
    let mut tokens = prefix.to_vec();
    let targets = picked
        .into_iter()
        .map(|i| {
            tokens[i] = MASK;
            (i, prefix[i])
        })
        .collect();
    Ok(Corruption { tokens, targets })
}
