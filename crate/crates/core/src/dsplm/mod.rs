//! Prefix language model: character vocabulary, transformer with a
//! bidirectional-prefix / causal-suffix attention mask, domain pretraining,
//! fine-tuning and beam search.

mod checkpoint;
mod decode;
mod model;
mod ops;
mod sample;
mod train;
mod vocab;


pub use checkpoint::{
    load_checkpoint, save_checkpoint, weights_checksum, CHECKPOINT_FORMAT, CHECKPOINT_VERSION,
};
pub use decode::{
    beam_search, generate_beam, greedy, normalized_score, perplexity, DecodeConfig, Hypothesis,
    LanguageModel,
};
pub use model::{tensor_layout, KvState, LossRow, ModelConfig, PrefixLm, TensorSpec};
pub use sample::{
    attention_mask, catalog_texts, corrupt_input, encode_prefix, encode_records, encode_sample,
    split_text_sample, Corruption, PrefixSample,
};
pub use train::{finetune, loss_terms, pretrain, train_step, LossCurve, Objective, TrainConfig};
pub use vocab::{build_vocab, is_special, Vocab, BOS, EOS, MASK, NUM_SPECIAL, PAD, SEP};
