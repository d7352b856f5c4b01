//! A small dense network with tanh hidden layers and a linear output layer,
//! operating on flat parameter slices so that optimizers, population search
//! and finite-difference checks can all treat parameters as one vector.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mlp {
    /// Layer widths, input first, output last.
    pub sizes: Vec<usize>,
    pub bias: bool,
}

/// Per-layer activations kept for the backward pass.
#[derive(Debug, Clone, Default)]
pub struct Cache {
    /// `acts[0]` is the input, `acts[k]` the output of layer k.
    acts: Vec<Vec<f64>>,
}

impl Mlp {
    pub fn new(sizes: Vec<usize>) -> Self {
        assert!(sizes.len() >= 2, "need input and output widths");
        Self { sizes, bias: true }
    }

    pub fn without_bias(sizes: Vec<usize>) -> Self {
        Self { bias: false, ..Self::new(sizes) }
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.sizes.windows(2).map(|w| w[0] * w[1] + if self.bias { w[1] } else { 0 }).sum()
    }

    /// Scaled normal init; the output layer is shrunk by `out_gain`.
    pub fn init<R: Rng>(&self, rng: &mut R, out_gain: f64) -> Vec<f64> {
        let mut params = Vec::with_capacity(self.num_params());
        let layers = self.sizes.len() - 1;
        for (k, w) in self.sizes.windows(2).enumerate() {
            let std = (1.0 / w[0] as f64).sqrt() * if k + 1 == layers { out_gain } else { 1.0 };
            let normal = Normal::new(0.0, std).unwrap();
            for _ in 0..w[0] * w[1] {
                params.push(normal.sample(rng));
            }
            if self.bias {
                params.extend(std::iter::repeat_n(0.0, w[1]));
            }
        }
        params
    }

    pub fn forward(&self, params: &[f64], input: &[f64]) -> Vec<f64> {
        self.forward_cached(params, input).0
    }

    pub fn forward_cached(&self, params: &[f64], input: &[f64]) -> (Vec<f64>, Cache) {
        debug_assert_eq!(params.len(), self.num_params());
        assert_eq!(input.len(), self.input_dim(), "input width");
        let layers = self.sizes.len() - 1;
        let mut acts = Vec::with_capacity(layers + 1);
        acts.push(input.to_vec());
        let mut offset = 0;
        for (k, w) in self.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &params[offset..offset + n_in * n_out];
            offset += n_in * n_out;
            let prev = &acts[k];
            let mut out = vec![0.0; n_out];
            for (o, row) in out.iter_mut().zip(weights.chunks_exact(n_in)) {
                *o = row.iter().zip(prev).map(|(a, b)| a * b).sum();
            }
            if self.bias {
                for (o, b) in out.iter_mut().zip(&params[offset..offset + n_out]) {
                    *o += b;
                }
                offset += n_out;
            }
            if k + 1 < layers {
                out.iter_mut().for_each(|v| *v = v.tanh());
            }
            acts.push(out);
        }
        (acts.last().unwrap().clone(), Cache { acts })
    }

    /// Accumulates dLoss/dParams into `grads` given dLoss/dOutput.
    pub fn backward(&self, params: &[f64], cache: &Cache, grad_out: &[f64], grads: &mut [f64]) {
        let layers = self.sizes.len() - 1;
        // parameter offsets per layer
        let mut offsets = Vec::with_capacity(layers);
        let mut off = 0;
        for w in self.sizes.windows(2) {
            offsets.push(off);
            off += w[0] * w[1] + if self.bias { w[1] } else { 0 };
        }
        let mut delta = grad_out.to_vec();
        for k in (0..layers).rev() {
            let (n_in, n_out) = (self.sizes[k], self.sizes[k + 1]);
            if k + 1 < layers {
                // through tanh: d/dz = (1 - y^2)
                for (d, y) in delta.iter_mut().zip(&cache.acts[k + 1]) {
                    *d *= 1.0 - y * y;
                }
            }
            let w_off = offsets[k];
            let prev = &cache.acts[k];
            for o in 0..n_out {
                let g = delta[o];
                if g == 0.0 {
                    continue;
                }
                let row = &mut grads[w_off + o * n_in..w_off + (o + 1) * n_in];
                for (r, p) in row.iter_mut().zip(prev) {
                    *r += g * p;
                }
            }
            if self.bias {
                let b_off = w_off + n_in * n_out;
                for (gb, d) in grads[b_off..b_off + n_out].iter_mut().zip(&delta) {
                    *gb += d;
                }
            }
            if k > 0 {
                let weights = &params[w_off..w_off + n_in * n_out];
                let mut next = vec![0.0; n_in];
                for (o, row) in weights.chunks_exact(n_in).enumerate() {
                    let g = delta[o];
                    for (n, w) in next.iter_mut().zip(row) {
                        *n += g * w;
                    }
                }
                delta = next;
            }
        }
    }
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= self.lr * mh / (vh.sqrt() + self.eps);
        }
    }
}
