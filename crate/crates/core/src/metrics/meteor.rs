//! METEOR restricted to exact unigram matches.
//!
//! The alignment has maximum cardinality and, among those, the fewest chunks.
//! Minimising chunks is exponential in the worst case, so the exact search
//! runs under a state budget and falls back to longest-run-first greedy
//! alignment when the budget is exhausted.

use std::collections::HashMap;

use super::EvalPair;

const ALPHA: f64 = 0.9;
const GAMMA: f64 = 0.5;
const BETA: f64 = 3.0;
const STATE_BUDGET: usize = 200_000;

/// Number of chunks of an alignment given as `(candidate, reference)` positions.
pub fn count_chunks(alignment: &[(usize, usize)]) -> usize {
    let mut a = alignment.to_vec();
    a.sort_unstable();
    if a.is_empty() {
        return 0;
    }
    1 + a
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count()
}

struct Search<'a> {
    cand: &'a [u32],
    reference: &'a [u32],
    /// Matches required per token id.
    needed: Vec<usize>,
    /// Occurrences of each token id in `cand[i..]`.
    remaining: Vec<Vec<usize>>,
    positions: Vec<Vec<usize>>,
    memo: HashMap<(usize, usize, Vec<u64>), usize>,
}

impl Search<'_> {
    /// Fewest chunks for `cand[i..]`; `prev` is the reference position aligned to `i - 1` plus one (0 = none).
    fn solve(
        &mut self,
        i: usize,
        prev: usize,
        used: &mut Vec<u64>,
        matched: &mut Vec<usize>,
    ) -> Option<usize> {
        if i == self.cand.len() {
            return Some(0);
        }
        let key = (i, prev, used.clone());
        if let Some(&v) = self.memo.get(&key) {
            return Some(v);
        }
        if self.memo.len() >= STATE_BUDGET {
            return None;
        }
        let w = self.cand[i] as usize;
        let mut best = usize::MAX;
        if matched[w] < self.needed[w] {
            for k in 0..self.positions[w].len() {
                let j = self.positions[w][k];
                if used[j / 64] >> (j % 64) & 1 == 1 {
                    continue;
                }
                used[j / 64] |= 1 << (j % 64);
                matched[w] += 1;
                let rest = self.solve(i + 1, j + 1, used, matched);
                matched[w] -= 1;
                used[j / 64] &= !(1 << (j % 64));
                let step = usize::from(!(prev > 0 && prev == j));
                best = best.min(rest? + step);
            }
        }
        // Skipping is allowed while later occurrences can still meet the quota.
        if self.remaining[i + 1][w] >= self.needed[w] - matched[w] {
            best = best.min(self.solve(i + 1, 0, used, matched)?);
        }
        debug_assert!(best != usize::MAX);
        self.memo.insert(key, best);
        Some(best)
    }
}

fn intern(cand: &[String], reference: &[String]) -> (Vec<u32>, Vec<u32>, usize) {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let mut c = Vec::with_capacity(cand.len());
    let mut r = Vec::with_capacity(reference.len());
    for (src, dst) in [(cand, &mut c), (reference, &mut r)] {
        for t in src {
            let n = ids.len() as u32;
            dst.push(*ids.entry(t.as_str()).or_insert(n));
        }
    }
    (c, r, ids.len())
}

fn exact_min_chunks(
    cand: &[u32],
    reference: &[u32],
    vocab: usize,
    needed: Vec<usize>,
) -> Option<usize> {
    let mut remaining = vec![vec![0usize; vocab]; cand.len() + 1];
    for i in (0..cand.len()).rev() {
        remaining[i] = remaining[i + 1].clone();
        remaining[i][cand[i] as usize] += 1;
    }
    let mut positions = vec![Vec::new(); vocab];
    for (j, &t) in reference.iter().enumerate() {
        positions[t as usize].push(j);
    }
    let mut search = Search {
        cand,
        reference,
        needed,
        remaining,
        positions,
        memo: HashMap::new(),
    };
    let mut used = vec![0u64; reference.len().div_ceil(64).max(1)];
    let mut matched = vec![0usize; vocab];
    debug_assert_eq!(search.reference.len(), reference.len());
    search.solve(0, 0, &mut used, &mut matched)
}

/// Greedy alignment: repeatedly take the longest run of equal, unaligned tokens.
fn greedy_chunks(cand: &[u32], reference: &[u32]) -> usize {
    let mut ca = vec![false; cand.len()];
    let mut ra = vec![false; reference.len()];
    let mut alignment = Vec::new();
    loop {
        let mut best = (0usize, 0usize, 0usize);
        for i in 0..cand.len() {
            for j in 0..reference.len() {
                let mut l = 0;
                while i + l < cand.len()
                    && j + l < reference.len()
                    && !ca[i + l]
                    && !ra[j + l]
                    && cand[i + l] == reference[j + l]
                {
                    l += 1;
                }
                if l > best.0 {
                    best = (l, i, j);
                }
            }
        }
        let (l, i, j) = best;
        if l == 0 {
            break;
        }
        for k in 0..l {
            ca[i + k] = true;
            ra[j + k] = true;
            alignment.push((i + k, j + k));
        }
    }
    count_chunks(&alignment)
}

/// `(matches, chunks)` of the best exact-match alignment.
pub fn align(cand: &[String], reference: &[String]) -> (usize, usize) {
    let (c, r, vocab) = intern(cand, reference);
    let mut cc = vec![0usize; vocab];
    let mut rc = vec![0usize; vocab];
    c.iter().for_each(|&t| cc[t as usize] += 1);
    r.iter().for_each(|&t| rc[t as usize] += 1);
    let needed: Vec<usize> = cc.iter().zip(&rc).map(|(a, b)| (*a).min(*b)).collect();
    let matches = needed.iter().sum();
    if matches == 0 {
        return (0, 0);
    }
    let chunks = exact_min_chunks(&c, &r, vocab, needed).unwrap_or_else(|| greedy_chunks(&c, &r));
    (matches, chunks)
}

/// Score in 0..=1 from alignment statistics.
pub fn meteor_from_alignment(
    matches: usize,
    chunks: usize,
    cand_len: usize,
    ref_len: usize,
) -> f64 {
    if matches == 0 {
        return 0.0;
    }
    let p = matches as f64 / cand_len as f64;
    let r = matches as f64 / ref_len as f64;
    let fmean = p * r / (ALPHA * p + (1.0 - ALPHA) * r);
    let penalty = GAMMA * (chunks as f64 / matches as f64).powf(BETA);
    fmean * (1.0 - penalty)
}

pub fn meteor_pair(cand: &[String], reference: &[String]) -> f64 {
    let (m, ch) = align(cand, reference);
    meteor_from_alignment(m, ch, cand.len(), reference.len())
}

/// Mean best-reference exact-match METEOR, scaled to 0..100.
pub fn meteor_simplified(pairs: &[EvalPair]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let total: f64 = pairs
        .iter()
        .map(|p| {
            p.references
                .iter()
                .map(|r| meteor_pair(&p.candidate, r))
                .fold(0.0, f64::max)
        })
        .sum();
    (100.0 * total / pairs.len() as f64).clamp(0.0, 100.0)
}
