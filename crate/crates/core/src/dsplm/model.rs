use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ops::{axpy, dot, gelu, gelu_grad, layer_norm, layer_norm_back, linear, linear_back};
use super::vocab::Vocab;
use crate::error::{Error, Result};
use crate::scalar::{softmax_in_place, Scalar};

/// Transformer shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub layers: usize,
    pub width: usize,
    pub heads: usize,
    pub ffn: usize,
    pub max_len: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            layers: 2,
            width: 64,
            heads: 4,
            ffn: 256,
            max_len: 256,
        }
    }
}

impl ModelConfig {
    /// Twelve layers of width 768, the size of a BERT-base backbone.
    pub fn base() -> Self {
        Self {
            layers: 12,
            width: 768,
            heads: 12,
            ffn: 3072,
            max_len: 512,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0
            || self.width == 0
            || self.heads == 0
            || self.ffn == 0
            || self.max_len == 0
        {
            return Err(Error::invalid("model config", "all sizes must be positive"));
        }
        if self.width % self.heads != 0 {
            return Err(Error::invalid(
                "model config",
                format!("width {} not divisible by {} heads", self.width, self.heads),
            ));
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.width / self.heads
    }
}

/// Position and shape of one tensor inside the flat weight vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
    pub offset: usize,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

#[derive(Clone, Debug)]
struct LayerOffsets {
    ln1_g: usize,
    ln1_b: usize,
    wq: usize,
    bq: usize,
    wk: usize,
    bk: usize,
    wv: usize,
    bv: usize,
    wo: usize,
    bo: usize,
    ln2_g: usize,
    ln2_b: usize,
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
}

#[derive(Clone, Debug)]
struct Offsets {
    tok: usize,
    pos: usize,
    layers: Vec<LayerOffsets>,
    lnf_g: usize,
    lnf_b: usize,
    wout: usize,
    bout: usize,
}

/// Tensor layout in storage order:
/// `tok_emb [V, d]`, `pos_emb [L, d]`, then per layer `l`
/// `l.ln1.{gain,bias}`, `l.attn.{wq,bq,wk,bk,wv,bv,wo,bo}`, `l.ln2.{gain,bias}`,
/// `l.ffn.{w1,b1,w2,b2}`, then `final_ln.{gain,bias}`, `out.w [d, V]`, `out.b [V]`.
/// Matrices are row-major and multiply activations from the right.
pub fn tensor_layout(config: &ModelConfig, vocab_size: usize) -> Vec<TensorSpec> {
    layout(config, vocab_size).0
}

fn layout(config: &ModelConfig, vocab_size: usize) -> (Vec<TensorSpec>, Offsets) {
    let mut specs = Vec::new();
    let mut next = 0;
    let mut push = |name: String, shape: Vec<usize>| {
        let offset = next;
        next += shape.iter().product::<usize>();
        specs.push(TensorSpec {
            name,
            shape,
            offset,
        });
        offset
    };
    let (d, f, v) = (config.width, config.ffn, vocab_size);
    let tok = push("tok_emb".into(), vec![v, d]);
    let pos = push("pos_emb".into(), vec![config.max_len, d]);
    let layers = (0..config.layers)
        .map(|l| LayerOffsets {
            ln1_g: push(format!("{l}.ln1.gain"), vec![d]),
            ln1_b: push(format!("{l}.ln1.bias"), vec![d]),
            wq: push(format!("{l}.attn.wq"), vec![d, d]),
            bq: push(format!("{l}.attn.bq"), vec![d]),
            wk: push(format!("{l}.attn.wk"), vec![d, d]),
            bk: push(format!("{l}.attn.bk"), vec![d]),
            wv: push(format!("{l}.attn.wv"), vec![d, d]),
            bv: push(format!("{l}.attn.bv"), vec![d]),
            wo: push(format!("{l}.attn.wo"), vec![d, d]),
            bo: push(format!("{l}.attn.bo"), vec![d]),
            ln2_g: push(format!("{l}.ln2.gain"), vec![d]),
            ln2_b: push(format!("{l}.ln2.bias"), vec![d]),
            w1: push(format!("{l}.ffn.w1"), vec![d, f]),
            b1: push(format!("{l}.ffn.b1"), vec![f]),
            w2: push(format!("{l}.ffn.w2"), vec![f, d]),
            b2: push(format!("{l}.ffn.b2"), vec![d]),
        })
        .collect();
    let lnf_g = push("final_ln.gain".into(), vec![d]);
    let lnf_b = push("final_ln.bias".into(), vec![d]);
    let wout = push("out.w".into(), vec![d, v]);
    let bout = push("out.b".into(), vec![v]);
    (
        specs,
        Offsets {
            tok,
            pos,
            layers,
            lnf_g,
            lnf_b,
            wout,
            bout,
        },
    )
}

/// Prefix language model: one transformer whose attention is bidirectional
/// over the prefix and causal over the generated suffix.
#[derive(Clone, Debug)]
pub struct PrefixLm<T: Scalar> {
    config: ModelConfig,
    vocab: Vocab,
    tensors: Vec<TensorSpec>,
    offsets: Offsets,
    weights: Vec<T>,
}

struct LayerCache<T> {
    xhat1: Vec<T>,
    rstd1: Vec<T>,
    a1: Vec<T>,
    q: Vec<T>,
    k: Vec<T>,
    v: Vec<T>,
    /// Attention probabilities, `heads × n × n`.
    att: Vec<T>,
    ctx: Vec<T>,
    xhat2: Vec<T>,
    rstd2: Vec<T>,
    a2: Vec<T>,
    u: Vec<T>,
    g: Vec<T>,
}

pub(crate) struct Cache<T> {
    tokens: Vec<u32>,
    n: usize,
    layers: Vec<LayerCache<T>>,
    xhatf: Vec<T>,
    rstdf: Vec<T>,
    hf: Vec<T>,
}

/// Keys and values of every position seen so far, per layer.
#[derive(Clone, Debug)]
pub struct KvState<T> {
    keys: Vec<Vec<T>>,
    values: Vec<Vec<T>>,
    len: usize,
}

impl<T> KvState<T> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// A loss term: cross-entropy of the distribution at `position` against `target`, scaled by `weight`.
#[derive(Clone, Copy, Debug)]
pub struct LossRow {
    pub position: usize,
    pub target: u32,
    pub weight: f64,
}

impl<T: Scalar> PrefixLm<T> {
    /// Randomly initialized model.
    pub fn new(config: ModelConfig, vocab: Vocab, seed: u64) -> Result<Self> {
        config.validate()?;
        let (tensors, offsets) = layout(&config, vocab.len());
        let total = tensors.last().map_or(0, |t| t.offset + t.len());
        let mut weights = vec![T::zero(); total];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = config.width as f64;
        let residual = 1.0 / (2.0 * config.layers as f64).sqrt();
        for spec in &tensors {
            let name = spec.name.as_str();
            let std = if name.ends_with("gain") {
                for w in &mut weights[spec.range()] {
                    *w = T::one();
                }
                continue;
            } else if spec.shape.len() == 1 {
                continue;
            } else if name.ends_with("emb") {
                0.5
            } else if name.ends_with("wo") || name.ends_with("w2") {
                residual / (spec.shape[0] as f64).sqrt()
            } else if name == "out.w" {
                1.0 / d.sqrt()
            } else {
                1.0 / (spec.shape[0] as f64).sqrt()
            };
            for w in &mut weights[spec.range()] {
                let z: f64 = StandardNormal.sample(&mut rng);
                *w = T::of(z * std);
            }
        }
        Ok(Self {
            config,
            vocab,
            tensors,
            offsets,
            weights,
        })
    }

    /// Model from stored weights laid out as in [`tensor_layout`].
    pub fn from_weights(config: ModelConfig, vocab: Vocab, weights: Vec<T>) -> Result<Self> {
        config.validate()?;
        let (tensors, offsets) = layout(&config, vocab.len());
        let total = tensors.last().map_or(0, |t| t.offset + t.len());
        if weights.len() != total {
            return Err(Error::invalid(
                "weights",
                format!("expected {total} values, found {}", weights.len()),
            ));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("weights", "non-finite value"));
        }
        Ok(Self {
            config,
            vocab,
            tensors,
            offsets,
            weights,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn tensors(&self) -> &[TensorSpec] {
        &self.tensors
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [T] {
        &mut self.weights
    }

    pub fn num_params(&self) -> usize {
        self.weights.len()
    }

    fn w(&self, offset: usize, len: usize) -> &[T] {
        &self.weights[offset..offset + len]
    }

    fn check_tokens(&self, tokens: &[u32], p: usize) -> Result<()> {
        if tokens.len() > self.config.max_len {
            return Err(Error::TooLong {
                len: tokens.len(),
                limit: self.config.max_len,
            });
        }
        if p < 1 || p > tokens.len() {
            return Err(Error::invalid(
                "prefix length",
                format!("{p} outside 1..={}", tokens.len()),
            ));
        }
        let v = self.vocab.len() as u32;
        if let Some(&t) = tokens.iter().find(|&&t| t >= v) {
            return Err(Error::OutOfVocabulary(t));
        }
        Ok(())
    }

    pub(crate) fn forward_cache(&self, tokens: &[u32], p: usize) -> Result<Cache<T>> {
        self.check_tokens(tokens, p)?;
        let (d, f, nh) = (self.config.width, self.config.ffn, self.config.heads);
        let dh = self.config.head_dim();
        let scale = T::of(1.0 / (dh as f64).sqrt());
        let n = tokens.len();
        let o = &self.offsets;
        let mut h = Vec::with_capacity(n * d);
        for (i, &t) in tokens.iter().enumerate() {
            let te = self.w(o.tok + t as usize * d, d);
            let pe = self.w(o.pos + i * d, d);
            h.extend(te.iter().zip(pe).map(|(&a, &b)| a + b));
        }
        let mut layers = Vec::with_capacity(self.config.layers);
        for lo in &o.layers {
            let x = h;
            let (a1, xhat1, rstd1) = layer_norm(&x, d, self.w(lo.ln1_g, d), self.w(lo.ln1_b, d));
            let q = linear(&a1, n, d, self.w(lo.wq, d * d), self.w(lo.bq, d), d);
            let k = linear(&a1, n, d, self.w(lo.wk, d * d), self.w(lo.bk, d), d);
            let v = linear(&a1, n, d, self.w(lo.wv, d * d), self.w(lo.bv, d), d);
            let mut att = vec![T::zero(); nh * n * n];
            let mut ctx = vec![T::zero(); n * d];
            for hd in 0..nh {
                let c0 = hd * dh;
                for i in 0..n {
                    let visible = if i < p { p } else { i + 1 };
                    let row = &mut att[(hd * n + i) * n..(hd * n + i) * n + visible];
                    let qi = &q[i * d + c0..i * d + c0 + dh];
                    for (j, s) in row.iter_mut().enumerate() {
                        *s = dot(qi, &k[j * d + c0..j * d + c0 + dh]) * scale;
                    }
                    softmax_in_place(row);
                    let out = &mut ctx[i * d + c0..i * d + c0 + dh];
                    for (j, &a) in row.iter().enumerate() {
                        axpy(a, &v[j * d + c0..j * d + c0 + dh], out);
                    }
                }
            }
            let attn_out = linear(&ctx, n, d, self.w(lo.wo, d * d), self.w(lo.bo, d), d);
            let mid: Vec<T> = x.iter().zip(&attn_out).map(|(&a, &b)| a + b).collect();
            let (a2, xhat2, rstd2) = layer_norm(&mid, d, self.w(lo.ln2_g, d), self.w(lo.ln2_b, d));
            let u = linear(&a2, n, d, self.w(lo.w1, d * f), self.w(lo.b1, f), f);
            let g: Vec<T> = u.iter().map(|&z| gelu(z)).collect();
            let ff = linear(&g, n, f, self.w(lo.w2, f * d), self.w(lo.b2, d), d);
            h = mid.iter().zip(&ff).map(|(&a, &b)| a + b).collect();
            layers.push(LayerCache {
                xhat1,
                rstd1,
                a1,
                q,
                k,
                v,
                att,
                ctx,
                xhat2,
                rstd2,
                a2,
                u,
                g,
            });
        }
        let (hf, xhatf, rstdf) = layer_norm(&h, d, self.w(o.lnf_g, d), self.w(o.lnf_b, d));
        Ok(Cache {
            tokens: tokens.to_vec(),
            n,
            layers,
            xhatf,
            rstdf,
            hf,
        })
    }

    fn logits(&self, hf_row: &[T]) -> Vec<T> {
        let (d, v) = (self.config.width, self.vocab.len());
        linear(
            hf_row,
            1,
            d,
            self.w(self.offsets.wout, d * v),
            self.w(self.offsets.bout, v),
            v,
        )
    }

    /// Next-token distributions for every position of `tokens`, the first `p` forming the prefix.
    pub fn forward(&self, tokens: &[u32], p: usize) -> Result<Vec<Vec<T>>> {
        let cache = self.forward_cache(tokens, p)?;
        let d = self.config.width;
        Ok((0..cache.n)
            .map(|i| {
                let mut row = self.logits(&cache.hf[i * d..(i + 1) * d]);
                softmax_in_place(&mut row);
                row
            })
            .collect())
    }

    /// Weighted cross-entropy summed over `rows`.
    pub fn loss(&self, tokens: &[u32], p: usize, rows: &[LossRow]) -> Result<T> {
        let cache = self.forward_cache(tokens, p)?;
        let d = self.config.width;
        let mut total = T::zero();
        for r in rows {
            let logits = self.logits(&cache.hf[r.position * d..(r.position + 1) * d]);
            total += T::of(r.weight) * cross_entropy(&logits, r.target);
        }
        Ok(total)
    }

    /// Like [`Self::loss`], also accumulating the gradient into `grad`.
    pub fn loss_and_grad(
        &self,
        tokens: &[u32],
        p: usize,
        rows: &[LossRow],
        grad: &mut [T],
    ) -> Result<T> {
        if grad.len() != self.weights.len() {
            return Err(Error::invalid(
                "gradient buffer",
                "length differs from weights",
            ));
        }
        let cache = self.forward_cache(tokens, p)?;
        let (d, vs) = (self.config.width, self.vocab.len());
        let o = &self.offsets;
        let n = cache.n;
        let mut total = T::zero();
        let mut dhf = vec![T::zero(); n * d];
        {
            let (head, tail) = grad.split_at_mut(o.bout);
            let dwout = &mut head[o.wout..o.wout + d * vs];
            let dbout = &mut tail[..vs];
            let wout = self.w(o.wout, d * vs);
            for r in rows {
                if r.position >= n {
                    return Err(Error::invalid(
                        "loss row",
                        format!("position {} beyond {n}", r.position),
                    ));
                }
                let hrow = &cache.hf[r.position * d..(r.position + 1) * d];
                let mut probs = self.logits(hrow);
                let w = T::of(r.weight);
                total += w * cross_entropy(&probs, r.target);
                softmax_in_place(&mut probs);
                probs[r.target as usize] -= T::one();
                for pv in probs.iter_mut() {
                    *pv *= w;
                }
                let dh = &mut dhf[r.position * d..(r.position + 1) * d];
                for kk in 0..d {
                    axpy(hrow[kk], &probs, &mut dwout[kk * vs..(kk + 1) * vs]);
                    dh[kk] += dot(&wout[kk * vs..(kk + 1) * vs], &probs);
                }
                axpy(T::one(), &probs, dbout);
            }
        }
        let mut dh = {
            let (dg, db) = two_mut(grad, o.lnf_g, o.lnf_b, d);
            layer_norm_back(&dhf, &cache.xhatf, &cache.rstdf, self.w(o.lnf_g, d), dg, db)
        };
        for (lo, lc) in o.layers.iter().zip(&cache.layers).rev() {
            dh = self.layer_back(lo, lc, p, n, dh, grad);
        }
        for i in 0..n {
            let t = cache.tokens[i] as usize;
            axpy(
                T::one(),
                &dh[i * d..(i + 1) * d],
                &mut grad[o.tok + t * d..o.tok + (t + 1) * d],
            );
            axpy(
                T::one(),
                &dh[i * d..(i + 1) * d],
                &mut grad[o.pos + i * d..o.pos + (i + 1) * d],
            );
        }
        Ok(total)
    }

    fn layer_back(
        &self,
        lo: &LayerOffsets,
        lc: &LayerCache<T>,
        p: usize,
        n: usize,
        dout: Vec<T>,
        grad: &mut [T],
    ) -> Vec<T> {
        let (d, f, nh) = (self.config.width, self.config.ffn, self.config.heads);
        let dh = self.config.head_dim();
        let scale = T::of(1.0 / (dh as f64).sqrt());
        // Feed-forward branch.
        let dg = {
            let (dw2, db2) = two_mut(grad, lo.w2, lo.b2, f * d);
            linear_back(
                &lc.g,
                &dout,
                n,
                f,
                self.w(lo.w2, f * d),
                d,
                dw2,
                &mut db2[..d],
            )
        };
        let du: Vec<T> = dg
            .iter()
            .zip(&lc.u)
            .map(|(&g, &u)| g * gelu_grad(u))
            .collect();
        let da2 = {
            let (dw1, db1) = two_mut(grad, lo.w1, lo.b1, d * f);
            linear_back(
                &lc.a2,
                &du,
                n,
                d,
                self.w(lo.w1, d * f),
                f,
                dw1,
                &mut db1[..f],
            )
        };
        let dmid_ln = {
            let (dgn, dbn) = two_mut(grad, lo.ln2_g, lo.ln2_b, d);
            layer_norm_back(
                &da2,
                &lc.xhat2,
                &lc.rstd2,
                self.w(lo.ln2_g, d),
                dgn,
                &mut dbn[..d],
            )
        };
        let dmid: Vec<T> = dout.iter().zip(&dmid_ln).map(|(&a, &b)| a + b).collect();
        // Attention branch.
        let dctx = {
            let (dwo, dbo) = two_mut(grad, lo.wo, lo.bo, d * d);
            linear_back(
                &lc.ctx,
                &dmid,
                n,
                d,
                self.w(lo.wo, d * d),
                d,
                dwo,
                &mut dbo[..d],
            )
        };
        let mut dq = vec![T::zero(); n * d];
        let mut dk = vec![T::zero(); n * d];
        let mut dv = vec![T::zero(); n * d];
        let mut dp = vec![T::zero(); n];
        for hd in 0..nh {
            let c0 = hd * dh;
            for i in 0..n {
                let visible = if i < p { p } else { i + 1 };
                let arow = &lc.att[(hd * n + i) * n..(hd * n + i) * n + visible];
                let dci = &dctx[i * d + c0..i * d + c0 + dh];
                let mut s = T::zero();
                for j in 0..visible {
                    dp[j] = dot(dci, &lc.v[j * d + c0..j * d + c0 + dh]);
                    s += dp[j] * arow[j];
                    axpy(arow[j], dci, &mut dv[j * d + c0..j * d + c0 + dh]);
                }
                let qi = &lc.q[i * d + c0..i * d + c0 + dh];
                for j in 0..visible {
                    let ds = arow[j] * (dp[j] - s) * scale;
                    if ds == T::zero() {
                        continue;
                    }
                    axpy(
                        ds,
                        &lc.k[j * d + c0..j * d + c0 + dh],
                        &mut dq[i * d + c0..i * d + c0 + dh],
                    );
                    axpy(ds, qi, &mut dk[j * d + c0..j * d + c0 + dh]);
                }
            }
        }
        let mut da1 = vec![T::zero(); n * d];
        for (dy, w, b) in [
            (&dq, lo.wq, lo.bq),
            (&dk, lo.wk, lo.bk),
            (&dv, lo.wv, lo.bv),
        ] {
            let (dw, db) = two_mut(grad, w, b, d * d);
            let dx = linear_back(&lc.a1, dy, n, d, self.w(w, d * d), d, dw, &mut db[..d]);
            axpy(T::one(), &dx, &mut da1);
        }
        let dx_ln = {
            let (dgn, dbn) = two_mut(grad, lo.ln1_g, lo.ln1_b, d);
            layer_norm_back(
                &da1,
                &lc.xhat1,
                &lc.rstd1,
                self.w(lo.ln1_g, d),
                dgn,
                &mut dbn[..d],
            )
        };
        dmid.iter().zip(&dx_ln).map(|(&a, &b)| a + b).collect()
    }

    /// Encodes the prefix and returns the state plus the distribution over the first target token.
    pub fn start(&self, prefix: &[u32]) -> Result<(KvState<T>, Vec<T>)> {
        let p = prefix.len();
        let cache = self.forward_cache(prefix, p)?;
        let d = self.config.width;
        let mut row = self.logits(&cache.hf[(p - 1) * d..p * d]);
        softmax_in_place(&mut row);
        let state = KvState {
            keys: cache.layers.iter().map(|l| l.k.clone()).collect(),
            values: cache.layers.iter().map(|l| l.v.clone()).collect(),
            len: p,
        };
        Ok((state, row))
    }

    /// Appends `token` and returns the next-token distribution.
    ///
    /// Suffix positions attend only leftwards, so cached keys and values stay valid.
    pub fn step(&self, state: &mut KvState<T>, token: u32) -> Result<Vec<T>> {
        let (d, f, nh) = (self.config.width, self.config.ffn, self.config.heads);
        let dh = self.config.head_dim();
        let scale = T::of(1.0 / (dh as f64).sqrt());
        let pos = state.len;
        if pos + 1 > self.config.max_len {
            return Err(Error::TooLong {
                len: pos + 1,
                limit: self.config.max_len,
            });
        }
        if token as usize >= self.vocab.len() {
            return Err(Error::OutOfVocabulary(token));
        }
        let o = &self.offsets;
        let te = self.w(o.tok + token as usize * d, d);
        let pe = self.w(o.pos + pos * d, d);
        let mut h: Vec<T> = te.iter().zip(pe).map(|(&a, &b)| a + b).collect();
        let n = pos + 1;
        let mut scores = vec![T::zero(); n];
        for (l, lo) in o.layers.iter().enumerate() {
            let (a1, _, _) = layer_norm(&h, d, self.w(lo.ln1_g, d), self.w(lo.ln1_b, d));
            let q = linear(&a1, 1, d, self.w(lo.wq, d * d), self.w(lo.bq, d), d);
            let k = linear(&a1, 1, d, self.w(lo.wk, d * d), self.w(lo.bk, d), d);
            let v = linear(&a1, 1, d, self.w(lo.wv, d * d), self.w(lo.bv, d), d);
            state.keys[l].extend_from_slice(&k);
            state.values[l].extend_from_slice(&v);
            let (keys, values) = (&state.keys[l], &state.values[l]);
            let mut ctx = vec![T::zero(); d];
            for hd in 0..nh {
                let c0 = hd * dh;
                for (j, s) in scores.iter_mut().enumerate() {
                    *s = dot(&q[c0..c0 + dh], &keys[j * d + c0..j * d + c0 + dh]) * scale;
                }
                softmax_in_place(&mut scores);
                for (j, &a) in scores.iter().enumerate() {
                    axpy(
                        a,
                        &values[j * d + c0..j * d + c0 + dh],
                        &mut ctx[c0..c0 + dh],
                    );
                }
            }
            let attn_out = linear(&ctx, 1, d, self.w(lo.wo, d * d), self.w(lo.bo, d), d);
            let mid: Vec<T> = h.iter().zip(&attn_out).map(|(&a, &b)| a + b).collect();
            let (a2, _, _) = layer_norm(&mid, d, self.w(lo.ln2_g, d), self.w(lo.ln2_b, d));
            let u = linear(&a2, 1, d, self.w(lo.w1, d * f), self.w(lo.b1, f), f);
            let g: Vec<T> = u.iter().map(|&z| gelu(z)).collect();
            let ff = linear(&g, 1, f, self.w(lo.w2, f * d), self.w(lo.b2, d), d);
            h = mid.iter().zip(&ff).map(|(&a, &b)| a + b).collect();
        }
        state.len += 1;
        let (hf, _, _) = layer_norm(&h, d, self.w(o.lnf_g, d), self.w(o.lnf_b, d));
        let mut row = self.logits(&hf);
        softmax_in_place(&mut row);
        Ok(row)
    }
}

/// `-log softmax(logits)[target]`, computed stably.
fn cross_entropy<T: Scalar>(logits: &[T], target: u32) -> T {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let lse = logits.iter().map(|&z| (z - max).exp()).sum::<T>().ln() + max;
    lse - logits[target as usize]
}

/// Disjoint mutable views of a tensor at `a` (length `len`) and a later tensor starting at `b`.
fn two_mut<T>(buf: &mut [T], a: usize, b: usize, len: usize) -> (&mut [T], &mut [T]) {
    debug_assert!(a + len <= b);
    let (head, tail) = buf.split_at_mut(b);
    (&mut head[a..a + len], tail)
}
