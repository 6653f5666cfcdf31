//! Knowledge-based data enhancement: forbidden-pattern filtering, product
//! coverage checking and creative-information checking.

mod checks;
mod lexicon;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, CopywritingRecord, ProductWordModel};
use crate::error::Result;
use crate::scalar::Scalar;

pub use checks::{check_coverage, check_creative, coverage_words, extra_token_count};
pub use lexicon::{filter_forbidden, FilterOutcome, ForbiddenLexicon, LexiconEntry, MAX_GAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnhanceConfig {
    pub min_per_product: usize,
    /// How many ranked product words per product are considered.
    pub top_k: usize,
    /// Words below this confidence never count toward coverage.
    pub min_word_confidence: f64,
    pub min_extra_tokens: usize,
}

impl Default for EnhanceConfig {
    fn default() -> Self {
        Self {
            min_per_product: 1,
            top_k: 3,
            min_word_confidence: 0.5,
            min_extra_tokens: 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForbiddenStatus {
    Clean,
    Altered,
    Dropped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub record: usize,
    pub forbidden: ForbiddenStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden_pattern: Option<String>,
    pub coverage: bool,
    pub creative: bool,
    pub approved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnhancementReport {
    pub verdicts: Vec<Verdict>,
    pub total: usize,
    pub approved: usize,
    pub approval_rate: f64,
}

impl EnhancementReport {
    pub fn from_verdicts(verdicts: Vec<Verdict>) -> Self {
        let total = verdicts.len();
        let approved = verdicts.iter().filter(|v| v.approved).count();
        let approval_rate = if total == 0 {
            0.0
        } else {
            approved as f64 / total as f64
        };
        Self {
            verdicts,
            total,
            approved,
            approval_rate,
        }
    }

    /// One JSON verdict per line followed by a `summary` line.
    pub fn write(&self, mut out: impl Write) -> Result<()> {
        for v in &self.verdicts {
            serde_json::to_writer(&mut out, v)?;
            out.write_all(b"\n")?;
        }
        serde_json::to_writer(
            &mut out,
            &serde_json::json!({
                "summary": {
                    "total": self.total,
                    "approved": self.approved,
                    "approval_rate": self.approval_rate,
                }
            }),
        )?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

/// Checks everything the enhancement pipeline needs in one place.
pub struct Enhancer<'a, T: Scalar = f64> {
    pub catalog: &'a Catalog,
    pub lexicon: &'a ForbiddenLexicon,
    pub words: &'a ProductWordModel<T>,
    pub config: &'a EnhanceConfig,
}

impl<T: Scalar> Enhancer<'_, T> {
    /// Verdict for one record plus its cleaned text (absent when dropped).
    pub fn assess(
        &self,
        index: usize,
        record: &CopywritingRecord,
    ) -> Result<(Verdict, Option<String>)> {
        let (status, pattern, text) = match self.lexicon.filter(&record.content) {
            FilterOutcome::Keep { text, altered } => (
                if altered {
                    ForbiddenStatus::Altered
                } else {
                    ForbiddenStatus::Clean
                },
                None,
                text,
            ),
            FilterOutcome::Drop { pattern } => (
                ForbiddenStatus::Dropped,
                Some(pattern),
                record.content.clone(),
            ),
        };
        let combo = &record.combination;
        let coverage = check_coverage(
            &text,
            combo,
            self.catalog,
            self.words,
            self.config.min_per_product,
            self.config.top_k,
            self.config.min_word_confidence,
        )?;
        let creative = check_creative(&text, combo, self.catalog, self.config.min_extra_tokens)?;
        let approved = status != ForbiddenStatus::Dropped && coverage && creative;
        let verdict = Verdict {
            record: index,
            forbidden: status,
            forbidden_pattern: pattern,
            coverage,
            creative,
            approved,
        };
        Ok((
            verdict,
            (status != ForbiddenStatus::Dropped).then_some(text),
        ))
    }
}

/// Runs all three checks; returns approved records (with alterable patterns rewritten) and the report.
pub fn enhance_dataset<T: Scalar>(
    records: &[CopywritingRecord],
    catalog: &Catalog,
    lexicon: &ForbiddenLexicon,
    words: &ProductWordModel<T>,
    config: &EnhanceConfig,
) -> Result<(Vec<CopywritingRecord>, EnhancementReport)> {
    let enhancer = Enhancer {
        catalog,
        lexicon,
        words,
        config,
    };
    let mut cleaned = Vec::new();
    let mut verdicts = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let (verdict, text) = enhancer.assess(i, r)?;
        if verdict.approved {
            cleaned.push(CopywritingRecord {
                content: text.expect("approved records are kept"),
                ..r.clone()
            });
        }
        verdicts.push(verdict);
    }
    Ok((cleaned, EnhancementReport::from_verdicts(verdicts)))
}

#[cfg(test)]
mod tests;
