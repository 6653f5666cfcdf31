//! Builds a small artifact set by driving the real CLI binary.

#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn combocopy(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combocopy"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

pub fn ok(args: &[&str], dir: &Path) -> String {
    let out = combocopy(args, dir);
    assert!(
        out.status.success(),
        "`{}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub const PIPELINE_TOML: &str = "catalog = \"annotated.jsonl\"\n\
pattern_table = \"patterns.json\"\n\
lexicon = \"corpus/lexicon.jsonl\"\n\
word_model = \"words.json\"\n\
strict_arbitrator = \"strict.json\"\n\
model = \"model.json\"\n\
seed = 3\n\
\n\
[decode]\n\
beam_size = 2\n\
max_len = 24\n";

/// Synthetic corpus plus every trained artifact, with a deliberately tiny model.
pub fn build_small(dir: &Path) {
    ok(&["synth", "--out", "corpus", "--seed", "11"], dir);
    ok(
        &[
            "ingest",
            "--catalog",
            "corpus/catalog.jsonl",
            "--out",
            "raw.jsonl",
        ],
        dir,
    );
    ok(
        &[
            "assign-topics",
            "--catalog",
            "raw.jsonl",
            "--rules",
            "corpus/topics.toml",
            "--out",
            "catalog.jsonl",
        ],
        dir,
    );
    ok(
        &[
            "train-words",
            "--catalog",
            "catalog.jsonl",
            "--out",
            "words.json",
            "--annotated",
            "annotated.jsonl",
        ],
        dir,
    );
    ok(
        &[
            "extract-patterns",
            "--catalog",
            "annotated.jsonl",
            "--words",
            "words.json",
            "--dataset",
            "corpus/combinations.jsonl",
            "--out",
            "patterns.json",
        ],
        dir,
    );
    for variant in ["strict", "normal"] {
        let out = format!("{variant}.json");
        ok(
            &[
                "train-arbitrator",
                "--variant",
                variant,
                "--catalog",
                "annotated.jsonl",
                "--dataset",
                "corpus/combinations.jsonl",
                "--out",
                &out,
            ],
            dir,
        );
    }
    ok(
        &[
            "pretrain",
            "--texts",
            "corpus/pretrain.txt",
            "--catalog",
            "annotated.jsonl",
            "--records",
            "corpus/copywriting.jsonl",
            "--lexicon",
            "corpus/lexicon.jsonl",
            "--out",
            "pretrained.json",
            "--layers",
            "1",
            "--width",
            "16",
            "--heads",
            "2",
            "--ffn",
            "32",
            "--max-len",
            "160",
            "--steps",
            "10",
        ],
        dir,
    );
    ok(
        &[
            "finetune",
            "--checkpoint",
            "pretrained.json",
            "--catalog",
            "annotated.jsonl",
            "--records",
            "corpus/copywriting.jsonl",
            "--lexicon",
            "corpus/lexicon.jsonl",
            "--words",
            "words.json",
            "--out",
            "model.json",
            "--steps",
            "10",
            "--holdout",
            "0.1",
        ],
        dir,
    );
    std::fs::write(dir.join("pipeline.toml"), PIPELINE_TOML).unwrap();
}
