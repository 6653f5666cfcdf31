use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::model::{KvState, PrefixLm};
use super::sample::PrefixSample;
use super::vocab::{is_special, EOS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Incremental next-token distributions, as needed by decoding and perplexity.
pub trait LanguageModel {
    type State: Clone;

    fn vocab_size(&self) -> usize;

    fn eos(&self) -> u32 {
        EOS
    }

    /// Whether decoding may emit `token`.
    fn can_emit(&self, _token: u32) -> bool {
        true
    }

    /// Consumes the prefix; returns the distribution over the first output token.
    fn start(&self, prefix: &[u32]) -> Result<(Self::State, Vec<f64>)>;

    /// Appends `token`; returns the distribution over the following token.
    fn advance(&self, state: &mut Self::State, token: u32) -> Result<Vec<f64>>;
}

impl<T: Scalar> LanguageModel for PrefixLm<T> {
    type State = KvState<T>;

    fn vocab_size(&self) -> usize {
        self.vocab().len()
    }

    fn can_emit(&self, token: u32) -> bool {
        token == EOS || !is_special(token)
    }

    fn start(&self, prefix: &[u32]) -> Result<(Self::State, Vec<f64>)> {
        let (state, probs) = PrefixLm::start(self, prefix)?;
        Ok((state, probs.into_iter().map(Scalar::as_f64).collect()))
    }

    fn advance(&self, state: &mut Self::State, token: u32) -> Result<Vec<f64>> {
        Ok(self
            .step(state, token)?
            .into_iter()
            .map(Scalar::as_f64)
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeConfig {
    pub beam_size: usize,
    /// Maximum number of generated tokens, EOS included.
    pub max_len: usize,
    /// Hypothesis score is `log p / len^length_penalty`.
    pub length_penalty: f64,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            beam_size: 3,
            max_len: 96,
            length_penalty: 0.7,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beam_size == 0 {
            return Err(Error::invalid(
                "decode config",
                "beam size must be at least 1",
            ));
        }
        if self.max_len == 0 {
            return Err(Error::invalid(
                "decode config",
                "max length must be at least 1",
            ));
        }
        if !(self.length_penalty >= 0.0) {
            return Err(Error::invalid(
                "decode config",
                "length penalty must be non-negative",
            ));
        }
        Ok(())
    }
}

/// A decoded sequence. `tokens` includes the final EOS when one was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub tokens: Vec<u32>,
    pub log_prob: f64,
    pub score: f64,
}

impl Hypothesis {
    /// Tokens without the trailing EOS.
    pub fn body(&self, eos: u32) -> &[u32] {
        match self.tokens.split_last() {
            Some((&last, rest)) if last == eos => rest,
            _ => &self.tokens,
        }
    }
}

/// Length-normalized score of a hypothesis.
pub fn normalized_score(log_prob: f64, len: usize, length_penalty: f64) -> f64 {
    log_prob / (len.max(1) as f64).powf(length_penalty)
}

/// Best first: higher score, then lexicographically smaller tokens.
fn by_score(a: &Hypothesis, b: &Hypothesis) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.tokens.cmp(&b.tokens))
}

/// Highest-probability emittable token; ties go to the lowest id.
fn argmax<M: LanguageModel>(model: &M, probs: &[f64]) -> Option<u32> {
    let mut best: Option<(u32, f64)> = None;
    for (t, &p) in probs.iter().enumerate() {
        let t = t as u32;
        if p > 0.0 && model.can_emit(t) && best.is_none_or(|(_, bp)| p > bp) {
            best = Some((t, p));
        }
    }
    best.map(|(t, _)| t)
}

pub fn greedy<M: LanguageModel>(
    model: &M,
    prefix: &[u32],
    max_len: usize,
    length_penalty: f64,
) -> Result<Hypothesis> {
    let (mut state, mut probs) = model.start(prefix)?;
    let mut tokens = Vec::new();
    let mut log_prob = 0.0;
    while tokens.len() < max_len {
        let Some(t) = argmax(model, &probs) else {
            break;
        };
        log_prob += probs[t as usize].ln();
        tokens.push(t);
        if t == model.eos() || tokens.len() == max_len {
            break;
        }
        probs = model.advance(&mut state, t)?;
    }
    let score = normalized_score(log_prob, tokens.len(), length_penalty);
    Ok(Hypothesis {
        tokens,
        log_prob,
        score,
    })
}

/// Length-normalized beam search.
///
/// Each step keeps the `beam_size` most probable expansions; those ending in
/// EOS or reaching `max_len` move to the finished pool. Search stops once no
/// live beam can still beat the worst kept finished hypothesis. The greedy
/// hypothesis is also scored, so the result never ranks below it.
pub fn beam_search<M: LanguageModel>(
    model: &M,
    prefix: &[u32],
    config: &DecodeConfig,
) -> Result<Hypothesis> {
    config.validate()?;
    let (b, alpha, max_len) = (config.beam_size, config.length_penalty, config.max_len);
    let eos = model.eos();
    let (state, probs) = model.start(prefix)?;
    let mut alive: Vec<(Hypothesis, M::State, Vec<f64>)> = vec![(
        Hypothesis {
            tokens: Vec::new(),
            log_prob: 0.0,
            score: 0.0,
        },
        state,
        probs,
    )];
    let mut finished: Vec<Hypothesis> = Vec::new();
    while !alive.is_empty() {
        let mut cands: Vec<(f64, usize, u32)> = Vec::new();
        for (ai, (h, _, probs)) in alive.iter().enumerate() {
            for (t, &p) in probs.iter().enumerate() {
                if p > 0.0 && model.can_emit(t as u32) {
                    cands.push((h.log_prob + p.ln(), ai, t as u32));
                }
            }
        }
        cands.sort_by(|x, y| {
            y.0.partial_cmp(&x.0)
                .unwrap_or(Ordering::Equal)
                .then_with(|| alive[x.1].0.tokens.cmp(&alive[y.1].0.tokens))
                .then(x.2.cmp(&y.2))
        });
        cands.truncate(b);
        let mut next = Vec::with_capacity(b);
        for (log_prob, ai, t) in cands {
            let (parent, parent_state, _) = &alive[ai];
            let mut tokens = parent.tokens.clone();
            tokens.push(t);
            let score = normalized_score(log_prob, tokens.len(), alpha);
            let h = Hypothesis {
                tokens,
                log_prob,
                score,
            };
            if t == eos || h.tokens.len() >= max_len {
                finished.push(h);
            } else {
                let mut state = parent_state.clone();
                let probs = model.advance(&mut state, t)?;
                next.push((h, state, probs));
            }
        }
        alive = next;
        finished.sort_by(by_score);
        finished.truncate(b);
        if finished.len() >= b {
            let worst = finished[b - 1].score;
            let bound = (max_len as f64).powf(alpha);
            if alive.iter().all(|(h, _, _)| h.log_prob / bound <= worst) {
                break;
            }
        }
    }
    if b > 1 {
        finished.push(greedy(model, prefix, max_len, alpha)?);
        finished.sort_by(by_score);
    }
    finished
        .into_iter()
        .next()
        .ok_or_else(|| Error::invalid("decoding", "no token can be emitted"))
}

/// Beam search from `prefix`, decoded to text.
pub fn generate_beam<T: Scalar>(
    model: &PrefixLm<T>,
    prefix: &[u32],
    config: &DecodeConfig,
) -> Result<String> {
    let h = beam_search(model, prefix, config)?;
    model.vocab().decode(h.body(EOS))
}

/// `exp` of the mean per-token negative log-likelihood of the targets.
pub fn perplexity<M: LanguageModel>(model: &M, samples: &[PrefixSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("perplexity samples"));
    }
    let mut nll = 0.0;
    let mut count = 0usize;
    for s in samples {
        let (mut state, mut probs) = model.start(&s.prefix)?;
        for (k, &t) in s.target.iter().enumerate() {
            let p = *probs.get(t as usize).ok_or(Error::OutOfVocabulary(t))?;
            nll -= p.ln();
            count += 1;
            if k + 1 < s.target.len() {
                probs = model.advance(&mut state, t)?;
            }
        }
    }
    Ok((nll / count as f64).exp())
}
