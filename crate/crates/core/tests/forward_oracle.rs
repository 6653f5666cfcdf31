//! The transformer forward pass against a direct matrix computation.

use std::collections::HashMap;

use combocopy::dsplm::{attention_mask, build_vocab, ModelConfig, PrefixLm};

type Mat = Vec<Vec<f64>>;

fn tensor(model: &PrefixLm<f64>, name: &str) -> Mat {
    let spec = model.tensors().iter().find(|t| t.name == name).unwrap();
    let data = &model.weights()[spec.offset..spec.offset + spec.shape.iter().product::<usize>()];
    let cols = *spec.shape.last().unwrap();
    data.chunks(cols).map(<[f64]>::to_vec).collect()
}

fn vector(model: &PrefixLm<f64>, name: &str) -> Vec<f64> {
    tensor(model, name).concat()
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

fn add_bias(a: Mat, b: &[f64]) -> Mat {
    a.into_iter()
        .map(|r| r.iter().zip(b).map(|(x, y)| x + y).collect())
        .collect()
}

fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

fn norm(a: &Mat, gain: &[f64], bias: &[f64]) -> Mat {
    a.iter()
        .map(|r| {
            let n = r.len() as f64;
            let mean = r.iter().sum::<f64>() / n;
            let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            r.iter()
                .enumerate()
                .map(|(i, x)| (x - mean) / (var + 1e-5).sqrt() * gain[i] + bias[i])
                .collect()
        })
        .collect()
}

fn softmax(v: &[f64]) -> Vec<f64> {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = v.iter().map(|x| (x - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|x| x / z).collect()
}

fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + ((2.0 / std::f64::consts::PI).sqrt() * (x + 0.044715 * x.powi(3))).tanh())
}

fn oracle(model: &PrefixLm<f64>, tokens: &[u32], p: usize) -> Mat {
    let c = model.config();
    let (d, heads) = (c.width, c.heads);
    let dh = d / heads;
    let n = tokens.len();
    let tok = tensor(model, "tok_emb");
    let pos = tensor(model, "pos_emb");
    let mut x: Mat = (0..n)
        .map(|i| {
            tok[tokens[i] as usize]
                .iter()
                .zip(&pos[i])
                .map(|(a, b)| a + b)
                .collect()
        })
        .collect();
    let mask = attention_mask(p, n).unwrap();
    let mut w: HashMap<String, Mat> = HashMap::new();
    for t in model.tensors() {
        w.insert(t.name.clone(), tensor(model, &t.name));
    }
    for l in 0..c.layers {
        let g = |s: &str| w[&format!("{l}.{s}")].clone();
        let v = |s: &str| g(s).concat();
        let a = norm(&x, &v("ln1.gain"), &v("ln1.bias"));
        let q = add_bias(matmul(&a, &g("attn.wq")), &v("attn.bq"));
        let k = add_bias(matmul(&a, &g("attn.wk")), &v("attn.bk"));
        let val = add_bias(matmul(&a, &g("attn.wv")), &v("attn.bv"));
        let mut ctx = vec![vec![0.0; d]; n];
        for h in 0..heads {
            let cols = h * dh..(h + 1) * dh;
            for i in 0..n {
                let scores: Vec<f64> = (0..n)
                    .map(|j| {
                        if mask[i][j] {
                            cols.clone().map(|c| q[i][c] * k[j][c]).sum::<f64>()
                                / (dh as f64).sqrt()
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect();
                let att = softmax(&scores);
                for c in cols.clone() {
                    ctx[i][c] = (0..n).map(|j| att[j] * val[j][c]).sum();
                }
            }
        }
        let mid = add(&x, &add_bias(matmul(&ctx, &g("attn.wo")), &v("attn.bo")));
        let a2 = norm(&mid, &v("ln2.gain"), &v("ln2.bias"));
        let hidden: Mat = add_bias(matmul(&a2, &g("ffn.w1")), &v("ffn.b1"))
            .into_iter()
            .map(|r| r.into_iter().map(gelu).collect())
            .collect();
        x = add(&mid, &add_bias(matmul(&hidden, &g("ffn.w2")), &v("ffn.b2")));
    }
    let hf = norm(
        &x,
        &vector(model, "final_ln.gain"),
        &vector(model, "final_ln.bias"),
    );
    add_bias(
        matmul(&hf, &tensor(model, "out.w")),
        &vector(model, "out.b"),
    )
    .iter()
    .map(|r| softmax(r))
    .collect()
}

fn fixed_model(layers: usize) -> PrefixLm<f64> {
    let vocab = build_vocab(&["xyz"]).unwrap();
    let config = ModelConfig {
        layers,
        width: 4,
        heads: 2,
        ffn: 8,
        max_len: 8,
    };
    let template = PrefixLm::<f64>::new(config.clone(), vocab.clone(), 0).unwrap();
    let weights = (0..template.num_params())
        .map(|i| 0.8 * ((i as f64) * 0.618).sin())
        .collect();
    PrefixLm::from_weights(config, vocab, weights).unwrap()
}

#[test]
fn one_layer_three_tokens_matches_direct_computation() {
    let model = fixed_model(1);
    let tokens = [5, 6, 7];
    for p in 1..=3 {
        let got = model.forward(&tokens, p).unwrap();
        let want = oracle(&model, &tokens, p);
        for (g, w) in got.iter().flatten().zip(want.iter().flatten()) {
            assert!((g - w).abs() < 1e-6, "p={p}: {g} vs {w}");
        }
    }
}

#[test]
fn two_layers_longer_input_matches_direct_computation() {
    let model = fixed_model(2);
    let tokens = [5, 7, 3, 6, 6, 2];
    let got = model.forward(&tokens, 3).unwrap();
    let want = oracle(&model, &tokens, 3);
    for (g, w) in got.iter().flatten().zip(want.iter().flatten()) {
        assert!((g - w).abs() < 1e-9, "{g} vs {w}");
    }
}
