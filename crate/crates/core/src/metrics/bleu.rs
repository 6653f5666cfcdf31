use std::collections::HashMap;

use super::EvalPair;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut m = HashMap::new();
    for w in tokens.windows(n) {
        *m.entry(w).or_insert(0) += 1;
    }
    m
}

/// Corpus-level clipped n-gram statistics for orders `1..=max_order`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BleuStats {
    pub matches: Vec<usize>,
    pub totals: Vec<usize>,
    pub candidate_len: usize,
    pub reference_len: usize,
}

/// Reference length closest to `c`; ties go to the shorter reference.
fn closest_ref_len(c: usize, refs: &[Vec<String>]) -> usize {
    refs.iter()
        .map(Vec::len)
        .min_by_key(|&r| (r.abs_diff(c), r))
        .unwrap_or(0)
}

pub fn bleu_stats(pairs: &[EvalPair], max_order: usize) -> BleuStats {
    let mut s = BleuStats {
        matches: vec![0; max_order],
        totals: vec![0; max_order],
        ..Default::default()
    };
    for p in pairs {
        s.candidate_len += p.candidate.len();
        s.reference_len += closest_ref_len(p.candidate.len(), &p.references);
        for n in 1..=max_order {
            let cand = ngram_counts(&p.candidate, n);
            let mut max_ref: HashMap<&[String], usize> = HashMap::new();
            for r in &p.references {
                for (g, c) in ngram_counts(r, n) {
                    let e = max_ref.entry(g).or_insert(0);
                    *e = (*e).max(c);
                }
            }
            s.matches[n - 1] += cand
                .iter()
                .map(|(g, c)| (*c).min(max_ref.get(g).copied().unwrap_or(0)))
                .sum::<usize>();
            s.totals[n - 1] += p.candidate.len().saturating_sub(n - 1);
        }
    }
    s
}

fn brevity_penalty(c: usize, r: usize) -> f64 {
    if c >= r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    }
}

fn combine(stats: &BleuStats, precisions: impl Iterator<Item = Option<f64>>) -> f64 {
    if stats.candidate_len == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    let mut orders = 0usize;
    for p in precisions {
        match p {
            Some(p) if p > 0.0 => log_sum += p.ln(),
            _ => return 0.0,
        }
        orders += 1;
    }
    let score = 100.0
        * brevity_penalty(stats.candidate_len, stats.reference_len)
        * (log_sum / orders as f64).exp();
    score.clamp(0.0, 100.0)
}

/// Corpus BLEU up to order `n` (uniform weights), scaled to 0..100.
pub fn bleu_n(pairs: &[EvalPair], n: usize) -> f64 {
    assert!(n >= 1, "BLEU order must be at least 1");
    let s = bleu_stats(pairs, n);
    combine(
        &s,
        (0..n).map(|k| (s.totals[k] > 0).then(|| s.matches[k] as f64 / s.totals[k] as f64)),
    )
}

/// BLEU-4 with add-one smoothing on orders two and above.
pub fn sacrebleu_like(pairs: &[EvalPair]) -> f64 {
    let s = bleu_stats(pairs, 4);
    combine(
        &s,
        (0..4).map(|k| {
            if k == 0 {
                (s.totals[0] > 0).then(|| s.matches[0] as f64 / s.totals[0] as f64)
            } else {
                Some((s.matches[k] as f64 + 1.0) / (s.totals[k] as f64 + 1.0))
            }
        }),
    )
}
