//! Two-layer softmax probe:
//! `f(z) = softmax(W2 · dropout(relu(W1 z + b1)) + b2)`.
//!
//! Parameters are stored as `f32`; every forward and backward pass
//! accumulates in `f64`. Training is single-threaded and bitwise
//! deterministic for a given `(data, config)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::LabeledMatrix;
use crate::seed::{self, Rng};

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

const INIT_STREAM: u64 = 0;
const SHUFFLE_STREAM: u64 = 1;
const DROPOUT_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    /// Adaptive moments with decoupled weight decay.
    #[default]
    AdamW,
    /// Plain minibatch gradient descent with decoupled weight decay.
    Sgd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    /// Hidden width; `None` uses the input dimension.
    pub hidden_dim: Option<usize>,
    pub dropout_p: f64,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            hidden_dim: None,
            dropout_p: 0.2,
            learning_rate: 1e-4,
            weight_decay: 0.01,
            epochs: 100,
            batch_size: 64,
            seed: 0,
            optimizer: Optimizer::AdamW,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(0.0..1.0).contains(&self.dropout_p) {
            return bad("dropout_p must lie in [0, 1)");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight_decay must be non-negative");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.hidden_dim == Some(0) {
            return bad("hidden_dim must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeModel {
    input_dim: usize,
    hidden_dim: usize,
    /// `hidden_dim × input_dim`, row-major.
    w1: Vec<f32>,
    b1: Vec<f32>,
    /// `2 × hidden_dim`, row-major.
    w2: Vec<f32>,
    b2: Vec<f32>,
    config: ProbeConfig,
}

/// Gradients in the same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl Gradients {
    fn zeros(d: usize, h: usize) -> Self {
        Self {
            w1: vec![0.0; h * d],
            b1: vec![0.0; h],
            w2: vec![0.0; 2 * h],
            b2: vec![0.0; 2],
        }
    }

    /// Flattened in parameter order `W1, b1, W2, b2`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.w1.len() + self.b1.len() + self.w2.len() + 2);
        v.extend_from_slice(&self.w1);
        v.extend_from_slice(&self.b1);
        v.extend_from_slice(&self.w2);
        v.extend_from_slice(&self.b2);
        v
    }

    fn scale(&mut self, s: f64) {
        for g in self.iter_mut() {
            *g *= s;
        }
    }

    fn iter_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(self.b2.iter_mut())
    }
}

/// Largest `f32` whose magnitude does not exceed `bound`.
fn f32_bound(bound: f64) -> f32 {
    let b = bound as f32;
    if f64::from(b) > bound {
        b.next_down()
    } else {
        b
    }
}

impl ProbeModel {
    /// Fan-based symmetric uniform initialization, zero biases.
    pub fn init(input_dim: usize, config: ProbeConfig) -> Result<Self> {
        config.validate()?;
        if input_dim == 0 {
            return Err(Error::InvalidConfig(
                "input dimension must be at least 1".into(),
            ));
        }
        let h = config.hidden_dim.unwrap_or(input_dim);
        let mut rng = seed::rng(config.seed);
        rng.set_stream(INIT_STREAM);
        let mut uniform = |n: usize, fan_in: usize, fan_out: usize| -> Vec<f32> {
            let bound = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
            let limit = f32_bound(bound);
            (0..n)
                .map(|_| {
                    let u: f64 = rng.random_range(-1.0..1.0);
                    ((u * bound) as f32).clamp(-limit, limit)
                })
                .collect()
        };
        let w1 = uniform(h * input_dim, input_dim, h);
        let w2 = uniform(2 * h, h, 2);
        Ok(Self {
            input_dim,
            hidden_dim: h,
            w1,
            b1: vec![0.0; h],
            w2,
            b2: vec![0.0; 2],
            config,
        })
    }

    /// Assembles a model from raw parameters (used when loading from disk).
    pub fn from_parts(
        input_dim: usize,
        hidden_dim: usize,
        w1: Vec<f32>,
        b1: Vec<f32>,
        w2: Vec<f32>,
        b2: Vec<f32>,
        config: ProbeConfig,
    ) -> Result<Self> {
        config.validate()?;
        let check = |what, expected, found: usize| {
            if expected == found {
                Ok(())
            } else {
                Err(Error::LengthMismatch {
                    what,
                    expected,
                    found,
                })
            }
        };
        check("w1", hidden_dim * input_dim, w1.len())?;
        check("b1", hidden_dim, b1.len())?;
        check("w2", 2 * hidden_dim, w2.len())?;
        check("b2", 2, b2.len())?;
        if w1
            .iter()
            .chain(&b1)
            .chain(&w2)
            .chain(&b2)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidConfig("non-finite probe parameter".into()));
        }
        Ok(Self {
            input_dim,
            hidden_dim,
            w1,
            b1,
            w2,
            b2,
            config,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn w1(&self) -> &[f32] {
        &self.w1
    }

    pub fn b1(&self) -> &[f32] {
        &self.b1
    }

    pub fn w2(&self) -> &[f32] {
        &self.w2
    }

    pub fn b2(&self) -> &[f32] {
        &self.b2
    }

    pub fn config(&self) -> &ProbeConfig {
        &self.config
    }

    pub fn parameter_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Mutable view over all parameters in order `W1, b1, W2, b2`.
    pub fn parameters_mut(&mut self) -> impl Iterator<Item = &mut f32> {
        self.w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(self.b2.iter_mut())
    }

    fn check_input(&self, z: &[f32]) -> Result<()> {
        if z.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: z.len(),
            });
        }
        Ok(())
    }

    /// Pre-activations `W1 z + b1`.
    fn hidden_pre(&self, z: &[f32], out: &mut [f64]) {
        let d = self.input_dim;
        for (k, o) in out.iter_mut().enumerate() {
            let row = &self.w1[k * d..(k + 1) * d];
            let mut acc = f64::from(self.b1[k]);
            for (&w, &x) in row.iter().zip(z) {
                acc += f64::from(w) * f64::from(x);
            }
            *o = acc;
        }
    }

    fn logits(&self, hidden: &[f64]) -> [f64; 2] {
        let h = self.hidden_dim;
        let mut out = [f64::from(self.b2[0]), f64::from(self.b2[1])];
        for (c, o) in out.iter_mut().enumerate() {
            for (&w, &a) in self.w2[c * h..(c + 1) * h].iter().zip(hidden) {
                *o += f64::from(w) * a;
            }
        }
        out
    }

    /// Class probabilities in inference mode (no dropout).
    pub fn forward(&self, z: &[f32]) -> Result<[f64; 2]> {
        self.check_input(z)?;
        let mut hidden = vec![0.0; self.hidden_dim];
        self.hidden_pre(z, &mut hidden);
        for a in hidden.iter_mut() {
            *a = a.max(0.0);
        }
        Ok(softmax(self.logits(&hidden)))
    }

    /// Class probabilities with inverted dropout on the hidden activations,
    /// drawing the mask from `rng`.
    pub fn forward_train(&self, z: &[f32], rng: &mut Rng) -> Result<[f64; 2]> {
        self.check_input(z)?;
        let mask = dropout_mask(self.hidden_dim, self.config.dropout_p, rng);
        let mut hidden = vec![0.0; self.hidden_dim];
        self.hidden_pre(z, &mut hidden);
        for (a, m) in hidden.iter_mut().zip(&mask) {
            *a = a.max(0.0) * m;
        }
        Ok(softmax(self.logits(&hidden)))
    }

    /// Predicted class; ties go to class 0.
    pub fn predict(&self, z: &[f32]) -> Result<u8> {
        let p = self.forward(z)?;
        Ok(u8::from(p[1] > p[0]))
    }

    /// Accumulates the cross-entropy gradient of one example into `grads`
    /// and returns its loss.
    fn backprop(
        &self,
        z: &[f32],
        label: u8,
        mask: Option<&[f64]>,
        scratch: &mut Scratch,
        grads: &mut Gradients,
    ) -> f64 {
        let (d, h) = (self.input_dim, self.hidden_dim);
        self.hidden_pre(z, &mut scratch.pre);
        for k in 0..h {
            let m = mask.map_or(1.0, |m| m[k]);
            scratch.act[k] = scratch.pre[k].max(0.0) * m;
        }
        let logits = self.logits(&scratch.act);
        let log_z = log_sum_exp(logits);
        let y = usize::from(label);
        let loss = log_z - logits[y];

        let mut dlogit = [libm::exp(logits[0] - log_z), libm::exp(logits[1] - log_z)];
        dlogit[y] -= 1.0;

        for (c, &dl) in dlogit.iter().enumerate() {
            grads.b2[c] += dl;
            let gw2 = &mut grads.w2[c * h..(c + 1) * h];
            for (g, &a) in gw2.iter_mut().zip(&scratch.act) {
                *g += dl * a;
            }
        }
        for k in 0..h {
            if scratch.pre[k] <= 0.0 {
                continue;
            }
            let m = mask.map_or(1.0, |m| m[k]);
            let da =
                m * (dlogit[0] * f64::from(self.w2[k]) + dlogit[1] * f64::from(self.w2[h + k]));
            if da == 0.0 {
                continue;
            }
            grads.b1[k] += da;
            for (g, &x) in grads.w1[k * d..(k + 1) * d].iter_mut().zip(z) {
                *g += da * f64::from(x);
            }
        }
        loss
    }

    /// Mean cross-entropy and its gradient over `rows`, dropout disabled.
    pub fn loss_and_gradient(
        &self,
        data: &LabeledMatrix,
        rows: &[usize],
    ) -> Result<(f64, Gradients)> {
        self.check_input(data.data().row(0))?;
        if rows.is_empty() {
            return Err(Error::EmptyTestSet);
        }
        let mut scratch = Scratch::new(self.hidden_dim);
        let mut grads = Gradients::zeros(self.input_dim, self.hidden_dim);
        let mut loss = 0.0;
        for &i in rows {
            loss += self.backprop(
                data.data().row(i),
                data.labels()[i],
                None,
                &mut scratch,
                &mut grads,
            );
        }
        let inv = 1.0 / rows.len() as f64;
        grads.scale(inv);
        Ok((loss * inv, grads))
    }

    /// Mean cross-entropy over every row, dropout disabled.
    pub fn mean_loss(&self, data: &LabeledMatrix) -> Result<f64> {
        let rows: Vec<usize> = (0..data.rows()).collect();
        self.loss_and_gradient(data, &rows).map(|(l, _)| l)
    }
}

struct Scratch {
    pre: Vec<f64>,
    act: Vec<f64>,
}

impl Scratch {
    fn new(h: usize) -> Self {
        Self {
            pre: vec![0.0; h],
            act: vec![0.0; h],
        }
    }
}

fn dropout_mask(h: usize, p: f64, rng: &mut Rng) -> Vec<f64> {
    if p == 0.0 {
        return vec![1.0; h];
    }
    let keep = 1.0 / (1.0 - p);
    (0..h)
        .map(|_| if rng.random::<f64>() < p { 0.0 } else { keep })
        .collect()
}

fn log_sum_exp(x: [f64; 2]) -> f64 {
    let m = x[0].max(x[1]);
    m + libm::log(libm::exp(x[0] - m) + libm::exp(x[1] - m))
}

fn softmax(x: [f64; 2]) -> [f64; 2] {
    let l = log_sum_exp(x);
    [libm::exp(x[0] - l), libm::exp(x[1] - l)]
}

/// Optimizer state over the flattened parameter vector.
struct OptimizerState {
    kind: Optimizer,
    lr: f64,
    weight_decay: f64,
    step: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl OptimizerState {
    fn new(cfg: &ProbeConfig, n: usize) -> Self {
        let moments = if cfg.optimizer == Optimizer::AdamW {
            n
        } else {
            0
        };
        Self {
            kind: cfg.optimizer,
            lr: cfg.learning_rate,
            weight_decay: cfg.weight_decay,
            step: 0,
            m: vec![0.0; moments],
            v: vec![0.0; moments],
        }
    }

    fn apply(&mut self, model: &mut ProbeModel, grads: &Gradients) {
        self.step = self.step.saturating_add(1);
        let (lr, wd) = (self.lr, self.weight_decay);
        let bias1 = 1.0 - libm::pow(ADAM_BETA1, f64::from(self.step));
        let bias2 = 1.0 - libm::pow(ADAM_BETA2, f64::from(self.step));
        let g_iter = grads
            .w1
            .iter()
            .chain(&grads.b1)
            .chain(&grads.w2)
            .chain(&grads.b2);
        for (i, (p, &g)) in model.parameters_mut().zip(g_iter).enumerate() {
            let theta = f64::from(*p);
            let update = match self.kind {
                Optimizer::AdamW => {
                    let m = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * g;
                    let v = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * g * g;
                    self.m[i] = m;
                    self.v[i] = v;
                    (m / bias1) / (libm::sqrt(v / bias2) + ADAM_EPS)
                }
                Optimizer::Sgd => g,
            };
            *p = (theta * (1.0 - lr * wd) - lr * update) as f32;
        }
    }
}

/// Trains a fresh probe on `train` and returns the final-epoch model.
pub fn train_probe(train: &LabeledMatrix, cfg: &ProbeConfig) -> Result<ProbeModel> {
    cfg.validate()?;
    let [n0, n1] = train.class_counts();
    if n0 == 0 || n1 == 0 {
        return Err(Error::SingleClassTrainingSet);
    }
    let mut model = ProbeModel::init(train.cols(), *cfg)?;
    let mut shuffle_rng = seed::rng(cfg.seed);
    shuffle_rng.set_stream(SHUFFLE_STREAM);
    let mut dropout_rng = seed::rng(cfg.seed);
    dropout_rng.set_stream(DROPOUT_STREAM);

    let (d, h) = (model.input_dim, model.hidden_dim);
    let mut opt = OptimizerState::new(cfg, model.parameter_count());
    let mut order: Vec<usize> = (0..train.rows()).collect();
    let mut scratch = Scratch::new(h);
    let mut grads = Gradients::zeros(d, h);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        for batch in order.chunks(cfg.batch_size) {
            grads.iter_mut().for_each(|g| *g = 0.0);
            let mut loss = 0.0;
            for &i in batch {
                let mask =
                    (cfg.dropout_p > 0.0).then(|| dropout_mask(h, cfg.dropout_p, &mut dropout_rng));
                loss += model.backprop(
                    train.data().row(i),
                    train.labels()[i],
                    mask.as_deref(),
                    &mut scratch,
                    &mut grads,
                );
            }
            if !loss.is_finite() {
                return Err(Error::DivergenceDetected { epoch });
            }
            grads.scale(1.0 / batch.len() as f64);
            opt.apply(&mut model, &grads);
        }
    }
    Ok(model)
}

/// True/false positive/negative counts, class 1 being positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    #[serde(rename = "TP")]
    pub tp: usize,
    #[serde(rename = "FP")]
    pub fp: usize,
    #[serde(rename = "TN")]
    pub tn: usize,
    #[serde(rename = "FN")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub precision: f64,
    pub f1: f64,
    pub confusion: Confusion,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    /// Derives all rates from counts; any 0/0 rate is 0.
    pub fn from_confusion(c: Confusion) -> Self {
        let sensitivity = ratio(c.tp, c.tp + c.fn_);
        let precision = ratio(c.tp, c.tp + c.fp);
        let f1 = if precision + sensitivity == 0.0 {
            0.0
        } else {
            2.0 * precision * sensitivity / (precision + sensitivity)
        };
        Self {
            accuracy: ratio(c.tp + c.tn, c.total()),
            sensitivity,
            specificity: ratio(c.tn, c.tn + c.fp),
            precision,
            f1,
            confusion: c,
        }
    }
}

/// Scores `model` on every row of `test`.
pub fn evaluate(model: &ProbeModel, test: &LabeledMatrix) -> Result<EvalReport> {
    if test.cols() != model.input_dim {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim,
            found: test.cols(),
        });
    }
    let mut c = Confusion::default();
    for (row, &label) in test.data().iter_rows().zip(test.labels()) {
        match (model.predict(row)?, label) {
            (1, 1) => c.tp += 1,
            (1, _) => c.fp += 1,
            (_, 1) => c.fn_ += 1,
            _ => c.tn += 1,
        }
    }
    if c.total() == 0 {
        return Err(Error::EmptyTestSet);
    }
    Ok(EvalReport::from_confusion(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use alloc::collections::BTreeMap;

    fn cfg(h: usize) -> ProbeConfig {
        ProbeConfig {
            hidden_dim: Some(h),
            seed: 11,
            ..ProbeConfig::default()
        }
    }

    #[test]
    fn init_shapes_bounds_and_determinism() {
        let m = ProbeModel::init(4, cfg(3)).unwrap();
        assert_eq!(m.w1().len(), 12);
        assert_eq!(m.b1().len(), 3);
        assert_eq!(m.w2().len(), 6);
        assert_eq!(m.b2().len(), 2);
        assert!(m.b1().iter().chain(m.b2()).all(|&b| b == 0.0));
        let b1 = libm::sqrt(6.0 / 7.0);
        let b2 = libm::sqrt(6.0 / 5.0);
        assert!(m.w1().iter().all(|&w| f64::from(w).abs() <= b1));
        assert!(m.w2().iter().all(|&w| f64::from(w).abs() <= b2));
        assert_eq!(m, ProbeModel::init(4, cfg(3)).unwrap());
        assert_ne!(
            m,
            ProbeModel::init(4, ProbeConfig { seed: 12, ..cfg(3) }).unwrap()
        );
    }

    #[test]
    fn zero_model_is_uniform() {
        let z = ProbeModel::from_parts(
            3,
            2,
            vec![0.0; 6],
            vec![0.0; 2],
            vec![0.0; 4],
            vec![0.0; 2],
            ProbeConfig::default(),
        )
        .unwrap();
        assert_eq!(z.forward(&[1.0, -2.0, 5.0]).unwrap(), [0.5, 0.5]);
        assert_eq!(z.predict(&[1.0, -2.0, 5.0]).unwrap(), 0);
    }

    #[test]
    fn hand_sized_forward_matches_scalar_arithmetic() {
        // W1 = [[1, -1], [0.5, 2]], b1 = [0.1, -3], W2 = [[1, 2], [-1, 0.5]], b2 = [0, 0.25]
        let model = ProbeModel::from_parts(
            2,
            2,
            vec![1.0, -1.0, 0.5, 2.0],
            vec![0.1, -3.0],
            vec![1.0, 2.0, -1.0, 0.5],
            vec![0.0, 0.25],
            ProbeConfig::default(),
        )
        .unwrap();
        // z = (2, 0.5): pre = (2 - 0.5 + 0.1, 1 + 1 - 3) = (1.6, -1.0)
        // relu = (1.6, 0); logits = (1.6, -1.6 + 0.25) = (1.6, -1.35)
        let p = model.forward(&[2.0, 0.5]).unwrap();
        let b1 = 0.1f32 as f64;
        let l0 = 2.0 - 0.5 + b1;
        let l1 = -l0 + 0.25;
        let e0 = libm::exp(l0);
        let e1 = libm::exp(l1);
        assert!((p[0] - e0 / (e0 + e1)).abs() < 1e-12);
        assert!((p[1] - e1 / (e0 + e1)).abs() < 1e-12);
        assert!(matches!(
            model.forward(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn metrics_from_confusion() {
        let r = EvalReport::from_confusion(Confusion {
            tp: 3,
            fp: 1,
            tn: 4,
            fn_: 2,
        });
        assert!((r.accuracy - 0.7).abs() < 1e-12);
        assert!((r.sensitivity - 0.6).abs() < 1e-12);
        assert!((r.specificity - 0.8).abs() < 1e-12);
        assert!((r.precision - 0.75).abs() < 1e-12);
        assert!((r.f1 - 2.0 * 0.75 * 0.6 / 1.35).abs() < 1e-12);

        // All-negative predictions: the degenerate pattern in published tables.
        let r = EvalReport::from_confusion(Confusion {
            tp: 0,
            fp: 0,
            tn: 5,
            fn_: 5,
        });
        assert_eq!(
            (r.sensitivity, r.specificity, r.precision, r.f1),
            (0.0, 1.0, 0.0, 0.0)
        );
    }

    #[test]
    fn single_class_training_rejected() {
        let m = LabeledMatrix::new(
            Matrix::new(2, 1, vec![1.0, 2.0]).unwrap(),
            vec![1, 1],
            None,
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(
            train_probe(&m, &ProbeConfig::default()),
            Err(Error::SingleClassTrainingSet)
        );
    }

    #[test]
    fn config_validation() {
        let bad = ProbeConfig {
            dropout_p: 1.0,
            ..ProbeConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = ProbeConfig {
            batch_size: 0,
            ..ProbeConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ProbeConfig {
            learning_rate: 0.0,
            ..ProbeConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
