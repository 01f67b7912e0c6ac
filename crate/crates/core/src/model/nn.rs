//! Dense layers with hand-written backward passes.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;

/// Uniform in `±1/√fan_in`.
fn uniform_init<R: Rng + ?Sized>(rng: &mut R, shape: (usize, usize), fan_in: usize) -> Array2<f64> {
    let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
    Array2::from_shape_fn(shape, |_| rng.random_range(-bound..bound))
}

fn uniform_bias<R: Rng + ?Sized>(rng: &mut R, len: usize, fan_in: usize) -> Array1<f64> {
    let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
    Array1::from_shape_fn(len, |_| rng.random_range(-bound..bound))
}

/// Inverted-dropout mask: entries are `0` or `1/(1−p)`.
pub fn dropout_mask<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, p: f64) -> Array2<f64> {
    let keep = 1.0 / (1.0 - p);
    Array2::from_shape_fn((rows, cols), |_| if rng.random::<f64>() < p { 0.0 } else { keep })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    /// in × out
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Linear {
    pub fn new<R: Rng + ?Sized>(rng: &mut R, fan_in: usize, fan_out: usize) -> Self {
        Self {
            w: uniform_init(rng, (fan_in, fan_out), fan_in),
            b: uniform_bias(rng, fan_out, fan_in),
        }
    }

    pub fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self {
            w: Array2::zeros((fan_in, fan_out)),
            b: Array1::zeros(fan_out),
        }
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        x.dot(&self.w) + &self.b
    }

    /// Accumulates parameter gradients into `grads`, returns `∂L/∂x`.
    pub fn backward(&self, x: ArrayView2<f64>, d_out: &Array2<f64>, grads: &mut Linear) -> Array2<f64> {
        grads.w += &x.t().dot(d_out);
        grads.b += &d_out.sum_axis(Axis(0));
        d_out.dot(&self.w.t())
    }
}

/// Two-layer perceptron: linear, ReLU, optional dropout, linear.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub hidden: Linear,
    pub output: Linear,
}

/// Intermediates kept for the backward pass.
#[derive(Debug, Clone)]
pub struct MlpCache {
    input: Array2<f64>,
    pre: Array2<f64>,
    activated: Array2<f64>,
    mask: Option<Array2<f64>>,
}

impl MlpCache {
    /// ReLU sign pattern of the hidden layer.
    pub fn active_pattern(&self) -> Vec<bool> {
        self.pre.iter().map(|v| *v > 0.0).collect()
    }
}

impl Mlp {
    pub fn new<R: Rng + ?Sized>(rng: &mut R, input: usize, hidden: usize, output: usize) -> Self {
        Self {
            hidden: Linear::new(rng, input, hidden),
            output: Linear::new(rng, hidden, output),
        }
    }

    pub fn zeros(input: usize, hidden: usize, output: usize) -> Self {
        Self {
            hidden: Linear::zeros(input, hidden),
            output: Linear::zeros(hidden, output),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.hidden.w.nrows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden.w.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.output.w.ncols()
    }

    /// `mask` multiplies the ReLU output elementwise (training-mode dropout).
    pub fn forward(&self, x: ArrayView2<f64>, mask: Option<Array2<f64>>) -> (Array2<f64>, MlpCache) {
        let pre = self.hidden.forward(x);
        let mut activated = pre.mapv(|v| v.max(0.0));
        if let Some(m) = &mask {
            activated *= m;
        }
        let out = self.output.forward(activated.view());
        (
            out,
            MlpCache {
                input: x.to_owned(),
                pre,
                activated,
                mask,
            },
        )
    }

    pub fn backward(&self, cache: &MlpCache, d_out: &Array2<f64>, grads: &mut Mlp) -> Array2<f64> {
        let mut d_act = self.output.backward(cache.activated.view(), d_out, &mut grads.output);
        if let Some(m) = &cache.mask {
            d_act *= m;
        }
        ndarray::Zip::from(&mut d_act)
            .and(&cache.pre)
            .for_each(|d, p| {
                if *p <= 0.0 {
                    *d = 0.0;
                }
            });
        self.hidden.backward(cache.input.view(), &d_act, &mut grads.hidden)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_parameters_give_zero_output() {
        let mlp = Mlp::zeros(3, 5, 2);
        let (out, _) = mlp.forward(array![[1.0, 2.0, 3.0]].view(), None);
        assert!(out.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn init_respects_fan_in_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mlp = Mlp::new(&mut rng, 16, 128, 4);
        assert!(mlp.hidden.w.iter().all(|v| v.abs() <= 0.25));
        assert!(mlp.output.w.iter().all(|v| v.abs() <= 1.0 / 128f64.sqrt()));
    }

    #[test]
    fn mask_values_are_inverted_dropout() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = dropout_mask(&mut rng, 50, 40, 0.5);
        assert!(m.iter().all(|v| *v == 0.0 || *v == 2.0));
        let kept = m.iter().filter(|v| **v > 0.0).count() as f64 / 2000.0;
        assert!((kept - 0.5).abs() < 0.05);
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mlp = Mlp::new(&mut rng, 3, 6, 2);
        let x = Array2::from_shape_fn((4, 3), |_| rng.random_range(-1.0..1.0));
        let loss = |m: &Mlp, x: &Array2<f64>| m.forward(x.view(), None).0.mapv(|v| v * v).sum() * 0.5;
        let (out, cache) = mlp.forward(x.view(), None);
        let mut grads = Mlp::zeros(3, 6, 2);
        let dx = mlp.backward(&cache, &out, &mut grads);
        let h = 1e-6;
        for idx in 0..x.len() {
            let (r, c) = (idx / 3, idx % 3);
            let mut xp = x.clone();
            xp[[r, c]] += h;
            let mut xm = x.clone();
            xm[[r, c]] -= h;
            let fd = (loss(&mlp, &xp) - loss(&mlp, &xm)) / (2.0 * h);
            assert!((fd - dx[[r, c]]).abs() < 1e-6);
        }
        let mut mp = mlp.clone();
        mp.hidden.w[[1, 2]] += h;
        let mut mm = mlp.clone();
        mm.hidden.w[[1, 2]] -= h;
        let fd = (loss(&mp, &x) - loss(&mm, &x)) / (2.0 * h);
        assert!((fd - grads.hidden.w[[1, 2]]).abs() < 1e-6);
    }
}
