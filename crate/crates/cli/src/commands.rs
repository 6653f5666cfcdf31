use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use combocopy::arbitrator::{
    build_training_pairs, filter_scored, train_arbitrator, ArbitratorConfig, ArbitratorModel,
    Variant,
};
use combocopy::catalog::{
    annotate_product_words, assign_topics, load_catalog, load_records, load_topic_rules,
    read_jsonl, save_catalog, train_product_word_model, Catalog, Combination, ProductWordConfig,
    ProductWordModel,
};
use combocopy::dsplm::{
    build_vocab, catalog_texts, encode_prefix, encode_records, finetune, generate_beam,
    load_checkpoint, perplexity, pretrain, save_checkpoint, DecodeConfig, ModelConfig, PrefixLm,
    TrainConfig,
};
use combocopy::enhancement::{enhance_dataset, EnhanceConfig, ForbiddenLexicon};
use combocopy::metrics::{evaluate_suite, MetricReport};
use combocopy::pipeline::{run_pipeline, Artifacts, PipelineConfig};
use combocopy::selection::{
    extract_patterns, load_pattern_table, save_pattern_table, select_cid, select_pattern,
    select_random, Method,
};
use combocopy::synth::{self, SynthConfig};

#[derive(Debug, Parser)]
#[command(
    name = "combocopy",
    version,
    about = "Product bundle selection and copywriting generation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic corpus (catalog, topic rules, combinations, copy, pretraining text, lexicon).
    Synth(SynthArgs),
    /// Validate a catalog and write it normalized, optionally assigning topics.
    Ingest(IngestArgs),
    /// Assign topics to catalog products from a rule file.
    AssignTopics(AssignTopicsArgs),
    /// Train the product-word model and annotate the catalog with predictions.
    TrainWords(TrainWordsArgs),
    /// Count attribute patterns in a curated combination dataset.
    ExtractPatterns(ExtractPatternsArgs),
    /// Generate candidate combinations for a topic.
    Select(SelectArgs),
    /// Train a strict or normal arbitrator.
    TrainArbitrator(TrainArbitratorArgs),
    /// Score combinations with an arbitrator.
    Score(ScoreArgs),
    /// Keep combinations whose arbitrator score reaches the threshold.
    Filter(FilterArgs),
    /// Create a prefix LM and train it on domain text.
    Pretrain(PretrainArgs),
    /// Fine-tune a prefix LM on combination copywriting.
    Finetune(FinetuneArgs),
    /// Generate copy for combinations with beam search.
    Generate(GenerateArgs),
    /// Run forbidden-word, coverage and creativity checks over copywriting records.
    Enhance(EnhanceArgs),
    /// Score line-aligned candidate and reference files; prints a one-row TSV report.
    Evaluate(EvaluateArgs),
    /// Select, filter, generate and judge copy for one topic.
    Pipeline(PipelineArgs),
    /// Serve the HTTP API over loaded artifacts.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2023)]
    pub seed: u64,
    /// TOML file with synthesis settings; `--seed` still applies.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub topic_rules: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssignTopicsArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub rules: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainWordsArgs {
    /// Catalog; products with gold product words are the training set.
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the catalog annotated with predicted words.
    #[arg(long)]
    pub annotated: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractPatternsArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub words: PathBuf,
    /// Curated combinations (JSONL).
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub min_support: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Random,
    Cid,
    Pattern,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Random => Method::Random,
            MethodArg::Cid => Method::Cid,
            MethodArg::Pattern => Method::Pattern,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub topic: String,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub n: usize,
    /// Pattern table; required by `--method pattern`.
    #[arg(long)]
    pub patterns: Option<PathBuf>,
    /// Products per combination for random and cid selection.
    #[arg(long, default_value_t = 2)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Strict,
    Normal,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Strict => Variant::Strict,
            VariantArg::Normal => Variant::Normal,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArbitratorArgs {
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Negatives per positive.
    #[arg(long, default_value_t = 3)]
    pub ratio: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub arbitrator: PathBuf,
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub combinations: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub arbitrator: PathBuf,
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub combinations: PathBuf,
    /// Defaults to the threshold stored in the model.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelShape {
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub heads: Option<usize>,
    #[arg(long)]
    pub ffn: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
}

impl ModelShape {
    fn apply(&self, mut c: ModelConfig) -> ModelConfig {
        if let Some(v) = self.layers {
            c.layers = v;
        }
        if let Some(v) = self.width {
            c.width = v;
        }
        if let Some(v) = self.heads {
            c.heads = v;
        }
        if let Some(v) = self.ffn {
            c.ffn = v;
        }
        if let Some(v) = self.max_len {
            c.max_len = v;
        }
        c
    }
}

#[derive(Debug, Args)]
pub struct TrainFlags {
    /// TOML training config; flags below override it.
    #[arg(long)]
    pub train_config: Option<PathBuf>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl TrainFlags {
    fn resolve(&self) -> Result<TrainConfig> {
        let mut c: TrainConfig = match &self.train_config {
            Some(p) => read_toml(p)?,
            None => TrainConfig::default(),
        };
        if let Some(v) = self.steps {
            c.steps = v;
        }
        if let Some(v) = self.lr {
            c.learning_rate = v;
        }
        if let Some(v) = self.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct PretrainArgs {
    /// Domain text, one document per line.
    #[arg(long)]
    pub texts: PathBuf,
    /// Catalog whose titles, words and topics must be encodable.
    #[arg(long)]
    pub catalog: PathBuf,
    /// Copywriting records whose characters join the vocabulary.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Lexicon whose replacement phrases join the vocabulary.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// TOML model config; shape flags override it.
    #[arg(long)]
    pub model_config: Option<PathBuf>,
    #[command(flatten)]
    pub shape: ModelShape,
    #[command(flatten)]
    pub train: TrainFlags,
}

#[derive(Debug, Args)]
pub struct FinetuneArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// With `--words`, drop records that fail enhancement before training.
    #[arg(long, requires = "words")]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub words: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub words_per_product: usize,
    /// Fraction of records held out to report perplexity.
    #[arg(long, default_value_t = 0.0)]
    pub holdout: f64,
    #[command(flatten)]
    pub train: TrainFlags,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub combinations: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub beam: usize,
    #[arg(long, default_value_t = 96)]
    pub max_len: usize,
    #[arg(long, default_value_t = 1)]
    pub words_per_product: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnhanceArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub words: PathBuf,
    #[arg(long)]
    pub records: PathBuf,
    /// Approved records, with alterable phrases rewritten.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-record verdicts plus a summary line; stdout if omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// One candidate per line.
    pub candidates: PathBuf,
    /// References aligned with the candidates; several per line are tab-separated.
    pub references: PathBuf,
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub topic: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: String,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => synth_cmd(a),
        Command::Ingest(a) => ingest(a),
        Command::AssignTopics(a) => assign_topics_cmd(a),
        Command::TrainWords(a) => train_words(a),
        Command::ExtractPatterns(a) => extract_patterns_cmd(a),
        Command::Select(a) => select(a),
        Command::TrainArbitrator(a) => train_arbitrator_cmd(a),
        Command::Score(a) => score(a),
        Command::Filter(a) => filter(a),
        Command::Pretrain(a) => pretrain_cmd(a),
        Command::Finetune(a) => finetune_cmd(a),
        Command::Generate(a) => generate(a),
        Command::Enhance(a) => enhance(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Serve(a) => {
            let config = PipelineConfig::load(&a.config)?;
            let artifacts = Artifacts::load(config)?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(crate::server::serve(artifacts, &a.bind))
        }
    }
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_lines<T: Serialize>(
    items: impl IntoIterator<Item = T>,
    path: Option<&Path>,
) -> Result<()> {
    let mut out = output(path)?;
    for item in items {
        serde_json::to_writer(&mut out, &item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    BufReader::new(file)
        .lines()
        .map(|l| l.map_err(Into::into))
        .collect()
}

fn load_combinations(path: &Path) -> Result<Vec<Combination>> {
    let combos: Vec<Combination> = read_jsonl(path)?;
    for (i, c) in combos.iter().enumerate() {
        c.validate()
            .with_context(|| format!("{}: combination #{i}", path.display()))?;
    }
    Ok(combos)
}

fn synth_cmd(a: SynthArgs) -> Result<()> {
    let mut config: SynthConfig = match &a.config {
        Some(p) => read_toml(p)?,
        None => SynthConfig::default(),
    };
    config.seed = a.seed;
    std::fs::create_dir_all(&a.out)?;
    let corpus = synth::generate(&config);
    for path in corpus.write(&a.out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn ingest(a: IngestArgs) -> Result<()> {
    let mut catalog = load_catalog(&a.catalog)?;
    if let Some(rules) = &a.topic_rules {
        catalog = Catalog::new(assign_topics(
            catalog.products(),
            &load_topic_rules(rules)?,
        )?)?;
    }
    save_catalog(&catalog, &a.out)?;
    let labeled = catalog
        .products()
        .iter()
        .filter(|p| !p.product_words.is_empty())
        .count();
    eprintln!(
        "ingested {} products ({labeled} with product words, {} topics)",
        catalog.len(),
        catalog.topics().len()
    );
    Ok(())
}

fn assign_topics_cmd(a: AssignTopicsArgs) -> Result<()> {
    let catalog = load_catalog(&a.catalog)?;
    let products = assign_topics(catalog.products(), &load_topic_rules(&a.rules)?)?;
    let unassigned = products.iter().filter(|p| p.topic.is_none()).count();
    save_catalog(&Catalog::new(products)?, &a.out)?;
    eprintln!("assigned topics; {unassigned} products matched no rule");
    Ok(())
}

fn train_words(a: TrainWordsArgs) -> Result<()> {
    let config: ProductWordConfig = match &a.config {
        Some(p) => read_toml(p)?,
        None => ProductWordConfig::default(),
    };
    let catalog = load_catalog(&a.catalog)?;
    let labeled: Vec<_> = catalog
        .products()
        .iter()
        .filter(|p| !p.product_words.is_empty())
        .map(|p| {
            (
                p.clone(),
                p.product_words.iter().map(|w| w.word.clone()).collect(),
            )
        })
        .collect();
    if labeled.is_empty() {
        bail!(
            "no product in {} carries product words to train on",
            a.catalog.display()
        );
    }
    let model: ProductWordModel = train_product_word_model(&labeled, config)?;
    model.save(&a.out)?;
    eprintln!("trained product-word model on {} products", labeled.len());
    if let Some(path) = &a.annotated {
        save_catalog(&annotate_product_words(&catalog, &model)?, path)?;
    }
    Ok(())
}

fn extract_patterns_cmd(a: ExtractPatternsArgs) -> Result<()> {
    let catalog = load_catalog(&a.catalog)?;
    let words = ProductWordModel::<f64>::load(&a.words)?;
    let dataset = load_combinations(&a.dataset)?;
    let table = extract_patterns(&dataset, &catalog, &words, a.min_support)?;
    save_pattern_table(&table, &a.out)?;
    eprintln!("extracted {} patterns", table.len());
    Ok(())
}

fn select(a: SelectArgs) -> Result<()> {
    let catalog = load_catalog(&a.catalog)?;
    let combos = match Method::from(a.method) {
        Method::Random => select_random(&catalog, &a.topic, a.size, a.n, a.seed)?,
        Method::Cid => select_cid(&catalog, &a.topic, a.size, a.n, a.seed)?,
        Method::Pattern => {
            let Some(path) = &a.patterns else {
                bail!("--method pattern needs a pattern table (--patterns)");
            };
            select_pattern(&catalog, &load_pattern_table(path)?, &a.topic, a.n, a.seed)?
        }
    };
    write_lines(&combos, a.out.as_deref())
}

fn train_arbitrator_cmd(a: TrainArbitratorArgs) -> Result<()> {
    let config: ArbitratorConfig = match &a.config {
        Some(p) => read_toml(p)?,
        None => ArbitratorConfig::default(),
    };
    let variant = Variant::from(a.variant);
    let catalog = load_catalog(&a.catalog)?;
    let dataset = load_combinations(&a.dataset)?;
    let pairs = build_training_pairs(&dataset, &catalog, variant, a.ratio, a.seed)?;
    let model: ArbitratorModel = train_arbitrator(&pairs, variant, &config)?;
    model.save(&a.out)?;
    eprintln!(
        "trained {} arbitrator on {} pairs, training accuracy {:.3}",
        variant.name(),
        pairs.len(),
        model.pair_accuracy(&pairs)
    );
    Ok(())
}

#[derive(Serialize)]
struct Scored<'a> {
    combination: &'a Combination,
    score: f64,
}

fn score(a: ScoreArgs) -> Result<()> {
    let model = ArbitratorModel::<f64>::load(&a.arbitrator)?;
    let catalog = load_catalog(&a.catalog)?;
    let combos = load_combinations(&a.combinations)?;
    let scores = combos
        .iter()
        .map(|c| model.score(c, &catalog))
        .collect::<combocopy::Result<Vec<_>>>()?;
    write_lines(
        combos
            .iter()
            .zip(&scores)
            .map(|(combination, &score)| Scored { combination, score }),
        a.out.as_deref(),
    )?;
    eprintln!(
        "acceptance {:.2}%",
        model.acceptance_percent(&combos, &catalog)?
    );
    Ok(())
}

fn filter(a: FilterArgs) -> Result<()> {
    let model = ArbitratorModel::<f64>::load(&a.arbitrator)?;
    let catalog = load_catalog(&a.catalog)?;
    let combos = load_combinations(&a.combinations)?;
    let threshold = a.threshold.unwrap_or(model.threshold);
    let kept = filter_scored(&model, &combos, &catalog, threshold)?;
    eprintln!("kept {} of {} combinations", kept.len(), combos.len());
    write_lines(kept.iter().map(|(c, _)| c), a.out.as_deref())
}

fn pretrain_cmd(a: PretrainArgs) -> Result<()> {
    let model_config: ModelConfig = match &a.model_config {
        Some(p) => read_toml(p)?,
        None => ModelConfig::default(),
    };
    let model_config = a.shape.apply(model_config);
    let train = a.train.resolve()?;
    let catalog = load_catalog(&a.catalog)?;
    let docs: Vec<String> = read_lines(&a.texts)?
        .into_iter()
        .filter(|l| !l.trim().is_empty())
        .collect();
    let mut vocab_texts = docs.clone();
    vocab_texts.extend(catalog_texts(&catalog));
    if let Some(path) = &a.records {
        vocab_texts.extend(load_records(path)?.into_iter().map(|r| r.content));
    }
    if let Some(path) = &a.lexicon {
        let lexicon = ForbiddenLexicon::load(path)?;
        vocab_texts.extend(
            lexicon
                .entries()
                .iter()
                .filter_map(|e| e.replacement.clone()),
        );
    }
    let vocab = build_vocab(&vocab_texts)?;
    let mut model: PrefixLm<f32> = PrefixLm::new(model_config, vocab, train.seed)?;
    eprintln!(
        "pretraining {} parameters, vocabulary {}, {} documents",
        model.num_params(),
        model.vocab().len(),
        docs.len()
    );
    let curve = pretrain(&mut model, &docs, &train)?;
    report_curve("pretrain", &curve);
    save_checkpoint(&model, &a.out)?;
    Ok(())
}

fn report_curve(stage: &str, curve: &[f64]) {
    if let (Some(first), Some(last)) = (curve.first(), curve.last()) {
        eprintln!(
            "{stage}: {} steps, loss {first:.3} -> {last:.3}",
            curve.len()
        );
    }
}

fn finetune_cmd(a: FinetuneArgs) -> Result<()> {
    let train = a.train.resolve()?;
    if !(0.0..1.0).contains(&a.holdout) {
        bail!("--holdout must be in [0, 1)");
    }
    let mut model: PrefixLm<f32> = load_checkpoint(&a.checkpoint)?;
    let catalog = load_catalog(&a.catalog)?;
    let mut records = load_records(&a.records)?;
    if let (Some(lexicon), Some(words)) = (&a.lexicon, &a.words) {
        let lexicon = ForbiddenLexicon::load(lexicon)?;
        let words = ProductWordModel::<f64>::load(words)?;
        let (clean, report) = enhance_dataset(
            &records,
            &catalog,
            &lexicon,
            &words,
            &EnhanceConfig::default(),
        )?;
        eprintln!(
            "enhancement kept {} of {} records",
            report.approved, report.total
        );
        records = clean;
    }
    let max_len = model.config().max_len;
    let (samples, skipped) = encode_records(
        &records,
        &catalog,
        model.vocab(),
        a.words_per_product,
        max_len,
    )?;
    if skipped > 0 {
        log::warn!("skipped {skipped} records that are too long or hold unknown characters");
    }
    let held_n = (samples.len() as f64 * a.holdout).round() as usize;
    let (train_samples, held) = samples.split_at(samples.len() - held_n);
    let curve = finetune(&mut model, train_samples, &train)?;
    report_curve("finetune", &curve);
    if !held.is_empty() {
        eprintln!(
            "held-out perplexity {:.3} on {} samples",
            perplexity(&model, held)?,
            held.len()
        );
    }
    save_checkpoint(&model, &a.out)?;
    Ok(())
}

#[derive(Serialize)]
struct GeneratedCopy<'a> {
    combination: &'a Combination,
    copy: String,
}

fn generate(a: GenerateArgs) -> Result<()> {
    let model: PrefixLm<f32> = load_checkpoint(&a.checkpoint)?;
    let catalog = load_catalog(&a.catalog)?;
    let combos = load_combinations(&a.combinations)?;
    let decode = DecodeConfig {
        beam_size: a.beam,
        max_len: a.max_len,
        ..DecodeConfig::default()
    };
    decode.validate()?;
    let mut out = Vec::with_capacity(combos.len());
    for combination in &combos {
        let prefix = encode_prefix(combination, &catalog, model.vocab(), a.words_per_product)?;
        out.push(GeneratedCopy {
            combination,
            copy: generate_beam(&model, &prefix, &decode)?,
        });
    }
    write_lines(out, a.out.as_deref())
}

fn enhance(a: EnhanceArgs) -> Result<()> {
    let config: EnhanceConfig = match &a.config {
        Some(p) => read_toml(p)?,
        None => EnhanceConfig::default(),
    };
    let lexicon = ForbiddenLexicon::load(&a.lexicon)?;
    let catalog = load_catalog(&a.catalog)?;
    let words = ProductWordModel::<f64>::load(&a.words)?;
    let records = load_records(&a.records)?;
    let (clean, report) = enhance_dataset(&records, &catalog, &lexicon, &words, &config)?;
    let mut out = output(a.report.as_deref())?;
    report.write(&mut out)?;
    out.flush()?;
    if let Some(path) = &a.out {
        write_lines(&clean, Some(path))?;
    }
    eprintln!("approved {} of {} records", report.approved, report.total);
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let candidates = read_lines(&a.candidates)?;
    let references: Vec<Vec<String>> = read_lines(&a.references)?
        .into_iter()
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect();
    let report: MetricReport = evaluate_suite(&candidates, &references)?;
    print!("{}", report.to_tsv(a.label.as_deref()));
    Ok(())
}

fn pipeline(a: PipelineArgs) -> Result<()> {
    let config = PipelineConfig::load(&a.config)?;
    let artifacts = Artifacts::load(config)?;
    let results = run_pipeline(&artifacts, &a.topic, a.n)?;
    let approved = results.iter().filter(|r| r.verdict.approved).count();
    write_lines(&results, a.out.as_deref())?;
    eprintln!(
        "{} of {} candidates passed the strict arbitrator; {approved} approved",
        results.len(),
        a.n
    );
    Ok(())
}
