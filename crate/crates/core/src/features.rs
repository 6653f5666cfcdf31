//! Sparse named features and the logistic scorer behind the product word
//! model and the arbitrators.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::{sigmoid, Scalar};

pub type SparseVec<T> = Vec<(u32, T)>;

/// Character n-grams (by Unicode scalar) of `text`, tagged with `prefix`.
pub fn char_ngrams(prefix: &str, text: &str, min_n: usize, max_n: usize) -> Vec<String> {
    let chars: Vec<char> = crate::text::squash(text).chars().collect();
    let mut out = Vec::new();
    for n in min_n..=max_n {
        for w in chars.windows(n) {
            let mut s = String::with_capacity(prefix.len() + 4 * n);
            s.push_str(prefix);
            s.extend(w);
            out.push(s);
        }
    }
    out
}

/// Closed vocabulary of feature names, fixed at training time.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    index: BTreeMap<String, u32>,
}

impl FeatureSpace {
    pub fn fit<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a Vec<String>>,
    {
        let mut names: Vec<&String> = docs.into_iter().flatten().collect();
        names.sort();
        names.dedup();
        let index = names
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        Self { index }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// Binary bag of the known names, L2-normalized. Unknown names are ignored.
    pub fn vectorize<T: Scalar>(&self, names: &[String]) -> SparseVec<T> {
        let mut ids: Vec<u32> = names
            .iter()
            .filter_map(|n| self.index.get(n).copied())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.is_empty() {
            return Vec::new();
        }
        let v = T::one() / T::of(ids.len() as f64).sqrt();
        ids.into_iter().map(|i| (i, v)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Logistic<T> {
    pub weights: Vec<T>,
    pub bias: T,
}

impl<T: Scalar> Logistic<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![T::zero(); dim],
            bias: T::zero(),
        }
    }

    pub fn logit(&self, x: &[(u32, T)]) -> T {
        x.iter()
            .fold(self.bias, |acc, &(i, v)| acc + self.weights[i as usize] * v)
    }

    pub fn prob(&self, x: &[(u32, T)]) -> T {
        sigmoid(self.logit(x))
    }

    fn step(&mut self, x: &[(u32, T)], target: T, lr: T, l2: T, weight: T) {
        let g = (self.prob(x) - target) * weight;
        for &(i, v) in x {
            let w = &mut self.weights[i as usize];
            *w -= lr * (g * v + l2 * *w);
        }
        self.bias -= lr * g;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    /// Reweight classes to equal total mass.
    pub balanced: bool,
    pub seed: u64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            learning_rate: 0.5,
            l2: 1e-5,
            balanced: true,
            seed: 7,
        }
    }
}

/// Plain SGD over shuffled epochs. Deterministic for a fixed seed.
pub fn train_logistic<T: Scalar>(
    examples: &[(SparseVec<T>, bool)],
    dim: usize,
    config: &LogisticConfig,
) -> Logistic<T> {
    let mut model = Logistic::zeros(dim);
    let n = examples.len();
    if n == 0 {
        return model;
    }
    let positives = examples.iter().filter(|(_, y)| *y).count();
    let negatives = n - positives;
    let class_weight = |y: bool| -> T {
        if !config.balanced {
            return T::one();
        }
        let count = if y { positives } else { negatives };
        T::of(n as f64 / (2.0 * count.max(1) as f64))
    };
    let (w_pos, w_neg) = (class_weight(true), class_weight(false));
    let lr = T::of(config.learning_rate);
    let l2 = T::of(config.l2);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, y) = &examples[i];
            let (target, weight) = if *y {
                (T::one(), w_pos)
            } else {
                (T::zero(), w_neg)
            };
            model.step(x, target, lr, l2, weight);
        }
    }
    model
}
