//! End-to-end orchestration: pattern selection, strict arbitration,
//! copy generation and enhancement verdicts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arbitrator::{filter_scored, ArbitratorModel, Variant};
use crate::artifact::file_checksum;
use crate::catalog::{
    assign_topics, load_catalog, load_topic_rules, Catalog, Combination, CopywritingRecord,
    ProductWordModel,
};
use crate::dsplm::{beam_search, encode_prefix, load_checkpoint, DecodeConfig, PrefixLm, EOS};
use crate::enhancement::{EnhanceConfig, Enhancer, ForbiddenLexicon, Verdict};
use crate::error::{Error, Result};
use crate::selection::{load_pattern_table, select_pattern, PatternTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Catalog with product words (and topics, unless `topic_rules` is set).
    pub catalog: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic_rules: Option<PathBuf>,
    pub pattern_table: PathBuf,
    pub lexicon: PathBuf,
    pub word_model: PathBuf,
    pub strict_arbitrator: PathBuf,
    pub model: PathBuf,
    /// Overrides the threshold stored in the strict arbitrator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict_threshold: Option<f64>,
    #[serde(default)]
    pub decode: DecodeConfig,
    #[serde(default)]
    pub enhance: EnhanceConfig,
    #[serde(default = "default_words_per_product")]
    pub words_per_product: usize,
    #[serde(default)]
    pub seed: u64,
    /// Extra generation attempts for copy that fails enhancement.
    #[serde(default = "default_retries")]
    pub retries: usize,
}

fn default_words_per_product() -> usize {
    1
}

fn default_retries() -> usize {
    2
}

impl PipelineConfig {
    /// Reads a TOML config; relative paths are resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut config: PipelineConfig = toml::from_str(&std::fs::read_to_string(path)?)?;
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.catalog);
        if let Some(p) = self.topic_rules.as_mut() {
            fix(p);
        }
        fix(&mut self.pattern_table);
        fix(&mut self.lexicon);
        fix(&mut self.word_model);
        fix(&mut self.strict_arbitrator);
        fix(&mut self.model);
    }

    fn paths(&self) -> Vec<(&'static str, &Path)> {
        let mut out = vec![
            ("catalog", self.catalog.as_path()),
            ("pattern_table", self.pattern_table.as_path()),
            ("lexicon", self.lexicon.as_path()),
            ("word_model", self.word_model.as_path()),
            ("strict_arbitrator", self.strict_arbitrator.as_path()),
            ("model", self.model.as_path()),
        ];
        if let Some(p) = &self.topic_rules {
            out.push(("topic_rules", p.as_path()));
        }
        out
    }
}

/// Everything the pipeline reads, loaded once and shared read-only.
pub struct Artifacts {
    pub config: PipelineConfig,
    pub catalog: Catalog,
    pub patterns: PatternTable,
    pub lexicon: ForbiddenLexicon,
    pub words: ProductWordModel,
    pub strict: ArbitratorModel,
    pub model: PrefixLm<f32>,
    /// SHA-256 of every loaded file, by artifact name.
    pub checksums: BTreeMap<String, String>,
}

impl Artifacts {
    pub fn load(config: PipelineConfig) -> Result<Self> {
        let mut checksums = BTreeMap::new();
        for (name, path) in config.paths() {
            if !path.exists() {
                return Err(Error::invalid(
                    "pipeline config",
                    format!("{name} path {} does not exist", path.display()),
                ));
            }
            checksums.insert(name.to_string(), file_checksum(path)?);
        }
        let mut catalog = load_catalog(&config.catalog).map_err(|e| e.in_stage("load catalog"))?;
        if let Some(rules) = &config.topic_rules {
            let rules = load_topic_rules(rules).map_err(|e| e.in_stage("load topic rules"))?;
            catalog = Catalog::new(assign_topics(catalog.products(), &rules)?)?;
        }
        let patterns =
            load_pattern_table(&config.pattern_table).map_err(|e| e.in_stage("load patterns"))?;
        let lexicon =
            ForbiddenLexicon::load(&config.lexicon).map_err(|e| e.in_stage("load lexicon"))?;
        let words = ProductWordModel::load(&config.word_model)
            .map_err(|e| e.in_stage("load word model"))?;
        let strict = ArbitratorModel::load(&config.strict_arbitrator)
            .map_err(|e| e.in_stage("load arbitrator"))?;
        if strict.variant != Variant::Strict {
            return Err(Error::invalid(
                "pipeline config",
                "the filtering arbitrator must be the strict variant",
            ));
        }
        let model = load_checkpoint(&config.model).map_err(|e| e.in_stage("load model"))?;
        config.decode.validate()?;
        Ok(Self {
            config,
            catalog,
            patterns,
            lexicon,
            words,
            strict,
            model,
            checksums,
        })
    }

    pub fn strict_threshold(&self) -> f64 {
        self.config
            .strict_threshold
            .unwrap_or(self.strict.threshold)
    }

    /// Generates copy for `combo` with products in `order`, and judges it.
    pub fn generate_with_order(
        &self,
        combo: &Combination,
        order: &[usize],
        decode: &DecodeConfig,
    ) -> Result<Generated> {
        let permuted = Combination {
            products: order.iter().map(|&i| combo.products[i].clone()).collect(),
            ..combo.clone()
        };
        let t0 = Instant::now();
        let prefix = encode_prefix(
            &permuted,
            &self.catalog,
            self.model.vocab(),
            self.config.words_per_product,
        )?;
        let hyp = beam_search(&self.model, &prefix, decode)?;
        let copy = self.model.vocab().decode(hyp.body(EOS))?;
        let generate_ms = t0.elapsed().as_secs_f64() * 1e3;
        let t1 = Instant::now();
        let verdict = self.assess(combo, &copy)?;
        Ok(Generated {
            copy,
            verdict,
            generate_ms,
            enhance_ms: t1.elapsed().as_secs_f64() * 1e3,
        })
    }

    /// Generates copy, retrying with other product orders while enhancement rejects it.
    pub fn generate(
        &self,
        combo: &Combination,
        decode: &DecodeConfig,
        seed: u64,
    ) -> Result<(Generated, usize)> {
        let n = combo.products.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        if seed != 0 {
            order.shuffle(&mut rng);
        }
        let mut total_gen = 0.0;
        let mut total_enh = 0.0;
        let mut attempt = 0;
        loop {
            let mut g = self.generate_with_order(combo, &order, decode)?;
            total_gen += g.generate_ms;
            total_enh += g.enhance_ms;
            attempt += 1;
            if g.verdict.approved || attempt > self.config.retries {
                g.generate_ms = total_gen;
                g.enhance_ms = total_enh;
                return Ok((g, attempt));
            }
            order.rotate_left(1);
            if attempt % n == 0 {
                order.shuffle(&mut rng);
            }
        }
    }

    /// Enhancement verdict for user- or model-written copy.
    pub fn assess(&self, combo: &Combination, copy: &str) -> Result<Verdict> {
        let enhancer = Enhancer {
            catalog: &self.catalog,
            lexicon: &self.lexicon,
            words: &self.words,
            config: &self.config.enhance,
        };
        let record = CopywritingRecord {
            combination: combo.clone(),
            content: copy.to_string(),
            title: String::new(),
        };
        Ok(enhancer.assess(0, &record)?.0)
    }

    /// Combination over `product_ids`, topic taken from the first product.
    pub fn combination_of(&self, product_ids: &[String]) -> Result<Combination> {
        let first = product_ids
            .first()
            .ok_or_else(|| Error::invalid("combination", "no products given"))?;
        let topic = self
            .catalog
            .require(first)?
            .topic_or_unassigned()
            .to_string();
        let combo = Combination::new(
            product_ids.to_vec(),
            topic,
            crate::catalog::Provenance::Dataset,
        );
        combo.validate()?;
        self.catalog.resolve(&combo)?;
        Ok(combo)
    }
}

pub struct Generated {
    pub copy: String,
    pub verdict: Verdict,
    pub generate_ms: f64,
    pub enhance_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    /// Shared by all results of one run.
    pub select_ms: f64,
    /// Shared by all results of one run.
    pub arbitrate_ms: f64,
    pub generate_ms: f64,
    pub enhance_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub combination: Combination,
    pub score: f64,
    pub copy: String,
    pub verdict: Verdict,
    /// Generation attempts used, at least 1.
    pub attempts: usize,
    pub timings: StageTimings,
}

/// Selects `n` pattern candidates for `topic`, keeps those passing the strict
/// arbitrator and generates judged copy for each.
pub fn run_pipeline(artifacts: &Artifacts, topic: &str, n: usize) -> Result<Vec<PipelineResult>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let config = &artifacts.config;
    let t0 = Instant::now();
    let candidates = select_pattern(
        &artifacts.catalog,
        &artifacts.patterns,
        topic,
        n,
        config.seed,
    )
    .map_err(|e| e.in_stage("select"))?;
    let select_ms = t0.elapsed().as_secs_f64() * 1e3;
    let t1 = Instant::now();
    let survivors = filter_scored(
        &artifacts.strict,
        &candidates,
        &artifacts.catalog,
        artifacts.strict_threshold(),
    )
    .map_err(|e| e.in_stage("arbitrate"))?;
    let arbitrate_ms = t1.elapsed().as_secs_f64() * 1e3;
    let mut out = Vec::with_capacity(survivors.len());
    for (i, (combination, score)) in survivors.into_iter().enumerate() {
        let (g, attempts) = artifacts
            .generate(
                &combination,
                &config.decode,
                config.seed.wrapping_add(i as u64),
            )
            .map_err(|e| e.in_stage("generate"))?;
        out.push(PipelineResult {
            combination,
            score,
            copy: g.copy,
            verdict: g.verdict,
            attempts,
            timings: StageTimings {
                select_ms,
                arbitrate_ms,
                generate_ms: g.generate_ms,
                enhance_ms: g.enhance_ms,
            },
        });
    }
    Ok(out)
}
