//! Corpus-level text generation metrics.
//!
//! Texts are tokenized with [`crate::text::metric_tokens`]: one token per CJK
//! character, alphanumeric runs for Latin text, punctuation kept as tokens.

mod bleu;
mod meteor;
mod rouge;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use bleu::{bleu_n, bleu_stats, sacrebleu_like, BleuStats};
pub use meteor::{
    align as meteor_alignment, count_chunks, meteor_from_alignment, meteor_pair, meteor_simplified,
};
pub use rouge::{lcs_len, rouge_l, rouge_l_pair, rouge_n, rouge_n_pair};

use crate::error::{Error, Result};
use crate::text::metric_tokens;

/// A tokenized candidate with one or more references.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPair {
    pub candidate: Vec<String>,
    pub references: Vec<Vec<String>>,
}

impl EvalPair {
    pub fn new(candidate: Vec<String>, references: Vec<Vec<String>>) -> Result<Self> {
        if references.is_empty() {
            return Err(Error::Empty("references"));
        }
        Ok(Self {
            candidate,
            references,
        })
    }

    pub fn from_texts(candidate: &str, references: &[impl AsRef<str>]) -> Result<Self> {
        Self::new(
            metric_tokens(candidate),
            references
                .iter()
                .map(|r| metric_tokens(r.as_ref()))
                .collect(),
        )
    }
}

/// Column names in report order.
pub const COLUMNS: [&str; 7] = [
    "sacrebleu",
    "rouge-1",
    "rouge-2",
    "rouge-l",
    "bleu-1",
    "bleu-4",
    "meteor-simplified",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub struct MetricReport {
    pub sacrebleu: f64,
    pub rouge_1: f64,
    pub rouge_2: f64,
    pub rouge_l: f64,
    pub bleu_1: f64,
    pub bleu_4: f64,
    pub meteor_simplified: f64,
}

impl MetricReport {
    pub fn values(&self) -> [f64; 7] {
        [
            self.sacrebleu,
            self.rouge_1,
            self.rouge_2,
            self.rouge_l,
            self.bleu_1,
            self.bleu_4,
            self.meteor_simplified,
        ]
    }

    pub fn tsv_header(with_label: bool) -> String {
        let mut s = String::new();
        if with_label {
            s.push_str("model\t");
        }
        s.push_str(&COLUMNS.join("\t"));
        s
    }

    /// One tab-separated row with two decimals, optionally prefixed by a label.
    pub fn tsv_row(&self, label: Option<&str>) -> String {
        let mut s = String::new();
        if let Some(l) = label {
            s.push_str(l);
            s.push('\t');
        }
        for (i, v) in self.values().iter().enumerate() {
            if i > 0 {
                s.push('\t');
            }
            let _ = write!(s, "{v:.2}");
        }
        s
    }

    pub fn to_tsv(&self, label: Option<&str>) -> String {
        format!(
            "{}\n{}\n",
            Self::tsv_header(label.is_some()),
            self.tsv_row(label)
        )
    }
}

pub fn evaluate_pairs(pairs: &[EvalPair]) -> MetricReport {
    MetricReport {
        sacrebleu: sacrebleu_like(pairs),
        rouge_1: rouge_n(pairs, 1),
        rouge_2: rouge_n(pairs, 2),
        rouge_l: rouge_l(pairs),
        bleu_1: bleu_n(pairs, 1),
        bleu_4: bleu_n(pairs, 4),
        meteor_simplified: meteor_simplified(pairs),
    }
}

/// Scores raw candidate texts against their references.
pub fn evaluate_suite<S: AsRef<str>, R: AsRef<str>>(
    candidates: &[S],
    references: &[Vec<R>],
) -> Result<MetricReport> {
    if candidates.len() != references.len() {
        return Err(Error::invalid(
            "evaluation corpus",
            format!(
                "{} candidates but {} reference sets",
                candidates.len(),
                references.len()
            ),
        ));
    }
    if candidates.is_empty() {
        return Err(Error::Empty("evaluation corpus"));
    }
    let pairs = candidates
        .iter()
        .zip(references)
        .map(|(c, r)| EvalPair::from_texts(c.as_ref(), r))
        .collect::<Result<Vec<_>>>()?;
    Ok(evaluate_pairs(&pairs))
}
