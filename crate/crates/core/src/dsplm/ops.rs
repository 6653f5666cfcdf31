//! Dense row-major kernels used by the transformer.

use crate::scalar::Scalar;

/// `out (n × m) = x (n × k) · w (k × m) + bias`.
pub fn linear<T: Scalar>(x: &[T], n: usize, k: usize, w: &[T], bias: &[T], m: usize) -> Vec<T> {
    debug_assert_eq!(x.len(), n * k);
    debug_assert_eq!(w.len(), k * m);
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        out.extend_from_slice(bias);
        let row = &mut out[i * m..(i + 1) * m];
        for (kk, &xv) in x[i * k..(i + 1) * k].iter().enumerate() {
            if xv == T::zero() {
                continue;
            }
            let wr = &w[kk * m..(kk + 1) * m];
            for (o, &wv) in row.iter_mut().zip(wr) {
                *o += xv * wv;
            }
        }
    }
    out
}

pub fn transpose<T: Scalar>(w: &[T], rows: usize, cols: usize) -> Vec<T> {
    let mut t = vec![T::zero(); w.len()];
    for r in 0..rows {
        for c in 0..cols {
            t[c * rows + r] = w[r * cols + c];
        }
    }
    t
}

/// Backward of [`linear`]: accumulates `dw`, `db` and returns `dx`.
pub fn linear_back<T: Scalar>(
    x: &[T],
    dy: &[T],
    n: usize,
    k: usize,
    w: &[T],
    m: usize,
    dw: &mut [T],
    db: &mut [T],
) -> Vec<T> {
    for i in 0..n {
        let dyr = &dy[i * m..(i + 1) * m];
        for (b, &g) in db.iter_mut().zip(dyr) {
            *b += g;
        }
        for (kk, &xv) in x[i * k..(i + 1) * k].iter().enumerate() {
            if xv == T::zero() {
                continue;
            }
            let dwr = &mut dw[kk * m..(kk + 1) * m];
            for (d, &g) in dwr.iter_mut().zip(dyr) {
                *d += xv * g;
            }
        }
    }
    let wt = transpose(w, k, m);
    linear(dy, n, m, &wt, &vec![T::zero(); k], k)
}

pub const LN_EPS: f64 = 1e-5;

/// Layer norm over rows of width `d`; returns `(y, xhat, rstd)`.
pub fn layer_norm<T: Scalar>(x: &[T], d: usize, g: &[T], b: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
    let n = x.len() / d;
    let mut y = vec![T::zero(); x.len()];
    let mut xhat = vec![T::zero(); x.len()];
    let mut rstd = Vec::with_capacity(n);
    let df = T::of(d as f64);
    for i in 0..n {
        let row = &x[i * d..(i + 1) * d];
        let mean = row.iter().copied().sum::<T>() / df;
        let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / df;
        let r = T::one() / (var + T::of(LN_EPS)).sqrt();
        rstd.push(r);
        for j in 0..d {
            let h = (row[j] - mean) * r;
            xhat[i * d + j] = h;
            y[i * d + j] = h * g[j] + b[j];
        }
    }
    (y, xhat, rstd)
}

pub fn layer_norm_back<T: Scalar>(
    dy: &[T],
    xhat: &[T],
    rstd: &[T],
    g: &[T],
    dg: &mut [T],
    db: &mut [T],
) -> Vec<T> {
    let d = g.len();
    let n = dy.len() / d;
    let df = T::of(d as f64);
    let mut dx = vec![T::zero(); dy.len()];
    let mut dxhat = vec![T::zero(); d];
    for i in 0..n {
        let dyr = &dy[i * d..(i + 1) * d];
        let xr = &xhat[i * d..(i + 1) * d];
        let mut m1 = T::zero();
        let mut m2 = T::zero();
        for j in 0..d {
            dg[j] += dyr[j] * xr[j];
            db[j] += dyr[j];
            dxhat[j] = dyr[j] * g[j];
            m1 += dxhat[j];
            m2 += dxhat[j] * xr[j];
        }
        m1 /= df;
        m2 /= df;
        for j in 0..d {
            dx[i * d + j] = rstd[i] * (dxhat[j] - m1 - xr[j] * m2);
        }
    }
    dx
}

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2 / pi)
const GELU_A: f64 = 0.044_715;

/// Tanh approximation of GELU.
pub fn gelu<T: Scalar>(u: T) -> T {
    let c = T::of(GELU_C);
    let a = T::of(GELU_A);
    T::of(0.5) * u * (T::one() + (c * (u + a * u * u * u)).tanh())
}

pub fn gelu_grad<T: Scalar>(u: T) -> T {
    let c = T::of(GELU_C);
    let a = T::of(GELU_A);
    let half = T::of(0.5);
    let th = (c * (u + a * u * u * u)).tanh();
    half * (T::one() + th)
        + half * u * (T::one() - th * th) * c * (T::one() + T::of(3.0) * a * u * u)
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (o, &v) in y.iter_mut().zip(x) {
        *o += alpha * v;
    }
}
