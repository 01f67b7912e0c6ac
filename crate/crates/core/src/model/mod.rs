//! Dual encoders, decoder and classifier head trained with explicit gradients.

pub mod losses;
pub mod nn;

use ndarray::{concatenate, s, Array2, ArrayView2, Axis};
use rand::Rng;
use thiserror::Error;

use crate::filters::FilterBank;
pub use nn::{dropout_mask, Linear, Mlp, MlpCache};

pub const HIDDEN_DIM: usize = 128;
pub const CODE_DIM: usize = 16;
pub const DEFAULT_DROPOUT: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("loss term {part} is not finite ({value})")]
    NonFiniteLoss { part: &'static str, value: f64 },
    #[error("gradient of {param} is not finite")]
    NonFiniteGradient { param: &'static str },
    #[error("parameter {param} became non-finite after the update")]
    NonFiniteParameter { param: &'static str },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossWeights {
    pub mu1: f64,
    pub mu2: f64,
    /// Sharpening exponent of the reconstruction loss, at least 1.
    pub beta: f64,
    pub mu_ce: f64,
    /// Weight on the correlation reduction term; zero for the `no_cr` ablation.
    pub mu_cr: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            mu1: 0.1,
            mu2: 0.1,
            beta: 2.0,
            mu_ce: 1.0,
            mu_cr: 1.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<(), String> {
        let named = [("mu1", self.mu1), ("mu2", self.mu2), ("mu_ce", self.mu_ce), ("mu_cr", self.mu_cr)];
        for (name, v) in named {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if !(self.beta.is_finite() && self.beta >= 1.0) {
            return Err(format!("beta must be at least 1, got {}", self.beta));
        }
        Ok(())
    }
}

/// Unweighted loss terms. A term whose weight is zero is not evaluated and reads 0.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossParts {
    pub cr: f64,
    pub re: f64,
    pub a: f64,
    pub ce: f64,
}

pub fn total_loss(parts: &LossParts, w: &LossWeights) -> Result<f64, ModelError> {
    for (part, value) in [("L_CR", parts.cr), ("L_RE", parts.re), ("L_A", parts.a), ("L_CE", parts.ce)] {
        if !value.is_finite() {
            return Err(ModelError::NonFiniteLoss { part, value });
        }
    }
    Ok(w.mu_cr * parts.cr + w.mu1 * parts.re + w.mu2 * parts.a + w.mu_ce * parts.ce)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub encoder_e: Mlp,
    pub encoder_o: Mlp,
    pub decoder: Mlp,
    pub classifier: Linear,
    pub gamma_logit: f64,
}

/// Parameter groups, used to freeze parts that receive no gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    EncoderE,
    EncoderO,
    Decoder,
    Classifier,
    Gamma,
}

impl Params {
    pub fn new<R: Rng + ?Sized>(rng: &mut R, feature_dim: usize, num_classes: usize, gamma_logit: f64) -> Self {
        Self {
            encoder_e: Mlp::new(rng, feature_dim, HIDDEN_DIM, CODE_DIM),
            encoder_o: Mlp::new(rng, feature_dim, HIDDEN_DIM, CODE_DIM),
            decoder: Mlp::new(rng, 2 * CODE_DIM, HIDDEN_DIM, 2 * feature_dim),
            classifier: Linear::new(rng, 2 * CODE_DIM, num_classes),
            gamma_logit,
        }
    }

    /// Same shapes as `like`, all zeros.
    pub fn zeros_like(like: &Params) -> Self {
        let d = like.feature_dim();
        Self {
            encoder_e: Mlp::zeros(d, like.encoder_e.hidden_dim(), like.encoder_e.output_dim()),
            encoder_o: Mlp::zeros(d, like.encoder_o.hidden_dim(), like.encoder_o.output_dim()),
            decoder: Mlp::zeros(like.decoder.input_dim(), like.decoder.hidden_dim(), like.decoder.output_dim()),
            classifier: Linear::zeros(like.classifier.w.nrows(), like.classifier.w.ncols()),
            gamma_logit: 0.0,
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.encoder_e.input_dim()
    }

    pub fn num_classes(&self) -> usize {
        self.classifier.w.ncols()
    }

    pub fn tensors(&self) -> Vec<(&'static str, Group, &[f64])> {
        fn sl<D: ndarray::Dimension>(a: &ndarray::Array<f64, D>) -> &[f64] {
            a.as_slice().expect("parameters are contiguous")
        }
        vec![
            ("encoder_e.hidden.weight", Group::EncoderE, sl(&self.encoder_e.hidden.w)),
            ("encoder_e.hidden.bias", Group::EncoderE, sl(&self.encoder_e.hidden.b)),
            ("encoder_e.output.weight", Group::EncoderE, sl(&self.encoder_e.output.w)),
            ("encoder_e.output.bias", Group::EncoderE, sl(&self.encoder_e.output.b)),
            ("encoder_o.hidden.weight", Group::EncoderO, sl(&self.encoder_o.hidden.w)),
            ("encoder_o.hidden.bias", Group::EncoderO, sl(&self.encoder_o.hidden.b)),
            ("encoder_o.output.weight", Group::EncoderO, sl(&self.encoder_o.output.w)),
            ("encoder_o.output.bias", Group::EncoderO, sl(&self.encoder_o.output.b)),
            ("decoder.hidden.weight", Group::Decoder, sl(&self.decoder.hidden.w)),
            ("decoder.hidden.bias", Group::Decoder, sl(&self.decoder.hidden.b)),
            ("decoder.output.weight", Group::Decoder, sl(&self.decoder.output.w)),
            ("decoder.output.bias", Group::Decoder, sl(&self.decoder.output.b)),
            ("classifier.weight", Group::Classifier, sl(&self.classifier.w)),
            ("classifier.bias", Group::Classifier, sl(&self.classifier.b)),
            ("gamma_logit", Group::Gamma, std::slice::from_ref(&self.gamma_logit)),
        ]
    }

    pub fn tensors_mut(&mut self) -> Vec<(&'static str, Group, &mut [f64])> {
        fn sl<D: ndarray::Dimension>(a: &mut ndarray::Array<f64, D>) -> &mut [f64] {
            a.as_slice_mut().expect("parameters are contiguous")
        }
        vec![
            ("encoder_e.hidden.weight", Group::EncoderE, sl(&mut self.encoder_e.hidden.w)),
            ("encoder_e.hidden.bias", Group::EncoderE, sl(&mut self.encoder_e.hidden.b)),
            ("encoder_e.output.weight", Group::EncoderE, sl(&mut self.encoder_e.output.w)),
            ("encoder_e.output.bias", Group::EncoderE, sl(&mut self.encoder_e.output.b)),
            ("encoder_o.hidden.weight", Group::EncoderO, sl(&mut self.encoder_o.hidden.w)),
            ("encoder_o.hidden.bias", Group::EncoderO, sl(&mut self.encoder_o.hidden.b)),
            ("encoder_o.output.weight", Group::EncoderO, sl(&mut self.encoder_o.output.w)),
            ("encoder_o.output.bias", Group::EncoderO, sl(&mut self.encoder_o.output.b)),
            ("decoder.hidden.weight", Group::Decoder, sl(&mut self.decoder.hidden.w)),
            ("decoder.hidden.bias", Group::Decoder, sl(&mut self.decoder.hidden.b)),
            ("decoder.output.weight", Group::Decoder, sl(&mut self.decoder.output.w)),
            ("decoder.output.bias", Group::Decoder, sl(&mut self.decoder.output.b)),
            ("classifier.weight", Group::Classifier, sl(&mut self.classifier.w)),
            ("classifier.bias", Group::Classifier, sl(&mut self.classifier.b)),
            ("gamma_logit", Group::Gamma, std::slice::from_mut(&mut self.gamma_logit)),
        ]
    }

    pub fn len(&self) -> usize {
        self.tensors().iter().map(|(_, _, t)| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Whether a forward pass samples dropout masks.
pub enum Mode<'a, R: Rng + ?Sized> {
    Eval,
    Train { rng: &'a mut R, dropout: f64 },
}

impl<R: Rng + ?Sized> Mode<'_, R> {
    fn mask(&mut self, rows: usize, cols: usize) -> Option<Array2<f64>> {
        match self {
            Mode::Eval => None,
            Mode::Train { rng, dropout } if *dropout > 0.0 => Some(dropout_mask(&mut **rng, rows, cols, *dropout)),
            Mode::Train { .. } => None,
        }
    }
}

/// Convenience for callers that never train.
pub fn eval_mode() -> Mode<'static, rand_chacha::ChaCha8Rng> {
    Mode::Eval
}

/// Codes `(H_E, H_O)` of the two filtered inputs. The masks for the
/// encoder of the heterophilic path are drawn before the homophilic one.
pub fn encode<R: Rng + ?Sized>(
    params: &Params,
    z_e: ArrayView2<f64>,
    z_o: ArrayView2<f64>,
    mode: &mut Mode<'_, R>,
) -> Result<(Array2<f64>, Array2<f64>), ModelError> {
    let d = params.feature_dim();
    if z_e.ncols() != d || z_o.ncols() != d || z_e.nrows() != z_o.nrows() {
        return Err(ModelError::Shape(format!(
            "encoder expects n×{d} inputs, got {:?} and {:?}",
            z_e.dim(),
            z_o.dim()
        )));
    }
    let n = z_e.nrows();
    let mask_e = mode.mask(n, params.encoder_e.hidden_dim());
    let (h_e, _) = params.encoder_e.forward(z_e, mask_e);
    let mask_o = mode.mask(n, params.encoder_o.hidden_dim());
    let (h_o, _) = params.encoder_o.forward(z_o, mask_o);
    Ok((h_e, h_o))
}

/// Class logits for every node of a domain, without dropout.
pub fn logits(params: &Params, bank: &FilterBank) -> Result<Array2<f64>, ModelError> {
    let out = bank.apply(params.gamma_logit);
    let (h_e, h_o) = encode(params, out.z_e.view(), out.z_o.view(), &mut eval_mode())?;
    let h = concatenate![Axis(1), h_e, h_o];
    Ok(params.classifier.forward(h.view()))
}

/// Arg-max class per node; ties go to the lower class id.
pub fn predict(params: &Params, bank: &FilterBank) -> Result<Vec<usize>, ModelError> {
    let z = logits(params, bank)?;
    Ok(z.rows()
        .into_iter()
        .map(|r| {
            let mut best = 0;
            for (c, v) in r.iter().enumerate() {
                if *v > r[best] {
                    best = c;
                }
            }
            best
        })
        .collect())
}

struct DomainPass {
    out_e: Array2<f64>,
    out_o: Array2<f64>,
    cache_e: MlpCache,
    cache_o: MlpCache,
    h_e: Array2<f64>,
    h_o: Array2<f64>,
    h: Array2<f64>,
    dec: Option<(MlpCache, Array2<f64>)>,
}

fn forward_domain<R: Rng + ?Sized>(
    params: &Params,
    bank: &FilterBank,
    w: &LossWeights,
    mode: &mut Mode<'_, R>,
) -> Result<DomainPass, ModelError> {
    let d = params.feature_dim();
    if bank.dim() != d {
        return Err(ModelError::Shape(format!("feature dim {} but model expects {d}", bank.dim())));
    }
    let out = bank.apply(params.gamma_logit);
    let n = bank.n();
    let mask_e = mode.mask(n, params.encoder_e.hidden_dim());
    let (h_e, cache_e) = params.encoder_e.forward(out.z_e.view(), mask_e);
    let mask_o = mode.mask(n, params.encoder_o.hidden_dim());
    let (h_o, cache_o) = params.encoder_o.forward(out.z_o.view(), mask_o);
    let h = concatenate![Axis(1), h_e, h_o];
    let dec = (w.mu1 > 0.0).then(|| {
        let (decoded, cache) = params.decoder.forward(h.view(), None);
        (cache, decoded)
    });
    Ok(DomainPass {
        out_e: out.z_e,
        out_o: out.z_o,
        cache_e,
        cache_o,
        h_e,
        h_o,
        h,
        dec,
    })
}

/// Self-supervised terms of one domain. Returns `(cr, re)` and adds the
/// weighted gradients into `d_h` (codes) and `d_target` (filtered inputs).
fn domain_terms(
    params: &Params,
    pass: &DomainPass,
    w: &LossWeights,
    d_h: &mut Array2<f64>,
    d_target: &mut Array2<f64>,
    grads: &mut Params,
) -> (f64, f64) {
    let mut cr = 0.0;
    if w.mu_cr > 0.0 {
        let (v, de, d_o) = losses::correlation_reduction_grad(pass.h_e.view(), pass.h_o.view());
        cr = v;
        d_h.slice_mut(s![.., ..CODE_DIM]).scaled_add(w.mu_cr, &de);
        d_h.slice_mut(s![.., CODE_DIM..]).scaled_add(w.mu_cr, &d_o);
    }
    let mut re = 0.0;
    if let Some((cache, decoded)) = &pass.dec {
        let target = concatenate![Axis(1), pass.out_e, pass.out_o];
        let (v, dt, dz) = losses::reconstruction_grad(target.view(), decoded.view(), w.beta);
        re = v;
        let dh = params.decoder.backward(cache, &(dz * w.mu1), &mut grads.decoder);
        *d_h += &dh;
        d_target.scaled_add(w.mu1, &dt);
    }
    (cr, re)
}

/// Backpropagates code and filtered-input gradients of one domain.
fn backward_domain(params: &Params, bank: &FilterBank, pass: &DomainPass, d_h: &Array2<f64>, d_target: &Array2<f64>, grads: &mut Params) {
    let d = params.feature_dim();
    let dh_e = d_h.slice(s![.., ..CODE_DIM]).to_owned();
    let dh_o = d_h.slice(s![.., CODE_DIM..]).to_owned();
    let mut dz_e = params.encoder_e.backward(&pass.cache_e, &dh_e, &mut grads.encoder_e);
    let mut dz_o = params.encoder_o.backward(&pass.cache_o, &dh_o, &mut grads.encoder_o);
    dz_e += &d_target.slice(s![.., ..d]);
    dz_o += &d_target.slice(s![.., d..]);
    let (ge, go) = bank.d_gamma_logit(params.gamma_logit);
    grads.gamma_logit += (&dz_e * &ge).sum() + (&dz_o * &go).sum();
}

/// Full objective over a labeled source and an unlabeled target, with
/// gradients for every parameter.
pub fn loss_and_gradients<R: Rng + ?Sized>(
    params: &Params,
    source: &FilterBank,
    source_labels: &[usize],
    target: &FilterBank,
    w: &LossWeights,
    mode: &mut Mode<'_, R>,
) -> Result<(LossParts, f64, Params), ModelError> {
    if source_labels.len() != source.n() {
        return Err(ModelError::Shape(format!(
            "{} source labels for {} source nodes",
            source_labels.len(),
            source.n()
        )));
    }
    if let Some(&bad) = source_labels.iter().find(|&&y| y >= params.num_classes()) {
        return Err(ModelError::Shape(format!("label {bad} outside {} classes", params.num_classes())));
    }
    let mut grads = Params::zeros_like(params);
    let src = forward_domain(params, source, w, mode)?;
    let tgt = forward_domain(params, target, w, mode)?;

    let mut dh_s = Array2::zeros(src.h.dim());
    let mut dh_t = Array2::zeros(tgt.h.dim());
    let mut dt_s = Array2::zeros((source.n(), 2 * source.dim()));
    let mut dt_t = Array2::zeros((target.n(), 2 * target.dim()));
    let mut parts = LossParts::default();

    let (cr_s, re_s) = domain_terms(params, &src, w, &mut dh_s, &mut dt_s, &mut grads);
    let (cr_t, re_t) = domain_terms(params, &tgt, w, &mut dh_t, &mut dt_t, &mut grads);
    parts.cr = cr_s + cr_t;
    parts.re = re_s + re_t;

    if w.mu2 > 0.0 {
        let (ae, de_s, de_t) = losses::code_kl_grad(src.h_e.view(), tgt.h_e.view());
        let (ao, do_s, do_t) = losses::code_kl_grad(src.h_o.view(), tgt.h_o.view());
        parts.a = ae + ao;
        dh_s.slice_mut(s![.., ..CODE_DIM]).scaled_add(w.mu2, &de_s);
        dh_s.slice_mut(s![.., CODE_DIM..]).scaled_add(w.mu2, &do_s);
        dh_t.slice_mut(s![.., ..CODE_DIM]).scaled_add(w.mu2, &de_t);
        dh_t.slice_mut(s![.., CODE_DIM..]).scaled_add(w.mu2, &do_t);
    }

    if w.mu_ce > 0.0 {
        let z = params.classifier.forward(src.h.view());
        let (ce, dz) = losses::cross_entropy_grad(z.view(), source_labels);
        parts.ce = ce;
        dh_s += &params.classifier.backward(src.h.view(), &(dz * w.mu_ce), &mut grads.classifier);
    }

    let total = total_loss(&parts, w)?;
    backward_domain(params, source, &src, &dh_s, &dt_s, &mut grads);
    backward_domain(params, target, &tgt, &dh_t, &dt_t, &mut grads);
    for (name, _, t) in grads.tensors() {
        if t.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteGradient { param: name });
        }
    }
    Ok((parts, total, grads))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamConfig {
    pub fn new(lr: f64, weight_decay: f64) -> Self {
        Self {
            lr,
            weight_decay,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Parameters plus first and second moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub params: Params,
    m: Params,
    v: Params,
    steps: u64,
    pub dropout: f64,
}

impl ModelState {
    pub fn new(params: Params) -> Self {
        let m = Params::zeros_like(&params);
        let v = Params::zeros_like(&params);
        Self {
            params,
            m,
            v,
            steps: 0,
            dropout: DEFAULT_DROPOUT,
        }
    }

    pub fn init<R: Rng + ?Sized>(rng: &mut R, feature_dim: usize, num_classes: usize) -> Self {
        Self::new(Params::new(rng, feature_dim, num_classes, 0.0))
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// One AdamW update. Groups for which `active` returns false keep
    /// their values and moments untouched; `gamma_logit` is never decayed.
    pub fn step(&mut self, grads: &Params, cfg: &AdamConfig, active: impl Fn(Group) -> bool) -> Result<(), ModelError> {
        self.steps += 1;
        let t = self.steps as i32;
        let bc1 = 1.0 - cfg.beta1.powi(t);
        let bc2 = 1.0 - cfg.beta2.powi(t);
        let params = self.params.tensors_mut();
        let ms = self.m.tensors_mut();
        let vs = self.v.tensors_mut();
        let gs = grads.tensors();
        for ((((name, group, p), (_, _, m)), (_, _, v)), (_, _, g)) in params.into_iter().zip(ms).zip(vs).zip(gs) {
            if !active(group) {
                continue;
            }
            let decay = if group == Group::Gamma { 0.0 } else { cfg.weight_decay };
            for k in 0..p.len() {
                if !g[k].is_finite() {
                    return Err(ModelError::NonFiniteGradient { param: name });
                }
                m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
                v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
                let update = (m[k] / bc1) / ((v[k] / bc2).sqrt() + cfg.eps) + decay * p[k];
                p[k] -= cfg.lr * update;
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(ModelError::NonFiniteParameter { param: name });
            }
        }
        Ok(())
    }
}

/// Groups that receive gradient under `w`.
pub fn active_groups(w: &LossWeights) -> impl Fn(Group) -> bool {
    let (decoder, classifier) = (w.mu1 > 0.0, w.mu_ce > 0.0);
    move |g| match g {
        Group::Decoder => decoder,
        Group::Classifier => classifier,
        _ => true,
    }
}
