//! Trains a complete, small artifact set from a synthetic corpus.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use combocopy::arbitrator::{
    build_training_pairs, train_arbitrator, ArbitratorConfig, ArbitratorModel, Variant,
};
use combocopy::catalog::{
    annotate_product_words, assign_topics, save_catalog, train_product_word_model, Catalog,
    ProductWordConfig, ProductWordModel,
};
use combocopy::dsplm::{
    build_vocab, catalog_texts, encode_records, finetune, pretrain, save_checkpoint, ModelConfig,
    PrefixLm, TrainConfig,
};
use combocopy::enhancement::{enhance_dataset, EnhanceConfig, ForbiddenLexicon};
use combocopy::pipeline::PipelineConfig;
use combocopy::selection::{extract_patterns, save_pattern_table};
use combocopy::synth::{files, generate, SynthConfig};

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub config: PipelineConfig,
}

impl Fixture {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

/// Tiny model and few steps: artifacts are valid but copy quality is low.
pub fn small_fixture(seed: u64) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let config = build(
        dir.path(),
        seed,
        ModelConfig {
            layers: 1,
            width: 16,
            heads: 2,
            ffn: 32,
            max_len: 160,
        },
        20,
    );
    Fixture { dir, config }
}

pub fn build(dir: &Path, seed: u64, model_config: ModelConfig, steps: usize) -> PipelineConfig {
    let corpus = generate(&SynthConfig {
        seed,
        combinations: 120,
        pretrain_texts: 100,
        ..Default::default()
    });
    corpus.write(dir).unwrap();
    let products = assign_topics(&corpus.products, &corpus.topic_rules).unwrap();
    let labeled: Vec<_> = products
        .iter()
        .filter(|p| !p.product_words.is_empty())
        .map(|p| {
            (
                p.clone(),
                p.product_words.iter().map(|w| w.word.clone()).collect(),
            )
        })
        .collect();
    let words: ProductWordModel =
        train_product_word_model(&labeled, ProductWordConfig::default()).unwrap();
    let catalog = annotate_product_words(&Catalog::new(products).unwrap(), &words).unwrap();
    let lexicon = ForbiddenLexicon::new(corpus.lexicon.clone()).unwrap();

    let table = extract_patterns(&corpus.combinations, &catalog, &words, 1).unwrap();
    let strict: ArbitratorModel = {
        let pairs =
            build_training_pairs(&corpus.combinations, &catalog, Variant::Strict, 3, seed).unwrap();
        train_arbitrator(&pairs, Variant::Strict, &ArbitratorConfig::default()).unwrap()
    };

    let (clean, _) = enhance_dataset(
        &corpus.records,
        &catalog,
        &lexicon,
        &words,
        &EnhanceConfig::default(),
    )
    .unwrap();
    let mut texts = corpus.pretrain_texts.clone();
    texts.extend(clean.iter().map(|r| r.content.clone()));
    texts.extend(catalog_texts(&catalog));
    let vocab = build_vocab(&texts).unwrap();
    let max_len = model_config.max_len;
    let mut model: PrefixLm<f32> = PrefixLm::new(model_config, vocab.clone(), seed).unwrap();
    let train = TrainConfig {
        steps,
        learning_rate: 0.3,
        seed,
        log_every: 0,
        ..Default::default()
    };
    pretrain(&mut model, &corpus.pretrain_texts, &train).unwrap();
    let (samples, _) = encode_records(&clean, &catalog, &vocab, 1, max_len).unwrap();
    finetune(&mut model, &samples, &train).unwrap();

    save_catalog(&catalog, dir.join("catalog.annotated.jsonl")).unwrap();
    words.save(dir.join("words.json")).unwrap();
    save_pattern_table(&table, dir.join("patterns.json")).unwrap();
    strict.save(dir.join("strict.json")).unwrap();
    save_checkpoint(&model, dir.join("model.json")).unwrap();
    let toml = format!(
        "catalog = \"catalog.annotated.jsonl\"\n\
         pattern_table = \"patterns.json\"\n\
         lexicon = \"{}\"\n\
         word_model = \"words.json\"\n\
         strict_arbitrator = \"strict.json\"\n\
         model = \"model.json\"\n\
         seed = {seed}\n\n\
         [decode]\nbeam_size = 2\nmax_len = 40\n",
        files::LEXICON
    );
    std::fs::write(dir.join("pipeline.toml"), toml).unwrap();
    PipelineConfig::load(dir.join("pipeline.toml")).unwrap()
}
