use std::collections::HashMap;

use super::EvalPair;

fn f1(overlap: usize, cand: usize, reference: usize) -> f64 {
    if overlap == 0 || cand == 0 || reference == 0 {
        return 0.0;
    }
    let p = overlap as f64 / cand as f64;
    let r = overlap as f64 / reference as f64;
    2.0 * p * r / (p + r)
}

fn best_over_refs(p: &EvalPair, score: impl Fn(&[String], &[String]) -> f64) -> f64 {
    p.references
        .iter()
        .map(|r| score(&p.candidate, r))
        .fold(0.0, f64::max)
}

fn mean(pairs: &[EvalPair], per_pair: impl Fn(&EvalPair) -> f64) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    (100.0 * pairs.iter().map(per_pair).sum::<f64>() / pairs.len() as f64).clamp(0.0, 100.0)
}

pub fn rouge_n_pair(cand: &[String], reference: &[String], n: usize) -> f64 {
    fn count(t: &[String], n: usize) -> HashMap<&[String], usize> {
        let mut m = HashMap::new();
        for w in t.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
        m
    }
    let (c, r) = (count(cand, n), count(reference, n));
    let overlap = c
        .iter()
        .map(|(g, k)| (*k).min(r.get(g).copied().unwrap_or(0)))
        .sum();
    f1(
        overlap,
        cand.len().saturating_sub(n - 1),
        reference.len().saturating_sub(n - 1),
    )
}

/// Mean over pairs of the best-reference n-gram F1, scaled to 0..100.
pub fn rouge_n(pairs: &[EvalPair], n: usize) -> f64 {
    assert!(n >= 1, "ROUGE order must be at least 1");
    mean(pairs, |p| best_over_refs(p, |c, r| rouge_n_pair(c, r, n)))
}

pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn rouge_l_pair(cand: &[String], reference: &[String]) -> f64 {
    f1(lcs_len(cand, reference), cand.len(), reference.len())
}

/// Mean over pairs of the best-reference LCS F-measure, scaled to 0..100.
pub fn rouge_l(pairs: &[EvalPair]) -> f64 {
    mean(pairs, |p| best_over_refs(p, rouge_l_pair))
}
