//! Volterra series equalizer with linear, quadratic and cubic kernels.
//!
//! For symbol `n` the equalizer sees the `l1` observations centred on `n`.
//! The quadratic and cubic kernels act on centred sub-windows of lengths
//! `l2` and `l3` and keep only one coefficient per unordered index pair or
//! triple, so the feature vector is
//!
//! ```text
//! [1, x_i (i < l1), x_i·x_j (i ≤ j < l2), x_i·x_j·x_k (i ≤ j ≤ k < l3)]
//! ```
//!
//! of length `1 + l1 + l2(l2+1)/2 + l3(l3+1)(l3+2)/6`.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Number of features (including the bias) for memories `(l1, l2, l3)`.
pub fn feature_count(l1: usize, l2: usize, l3: usize) -> usize {
    1 + l1 + l2 * (l2 + 1) / 2 + l3 * (l3 + 1) * (l3 + 2) / 6
}

/// Appends the feature vector of one `l1`-long window to `out`.
pub fn volterra_features(window: &[f64], l2: usize, l3: usize, out: &mut Vec<f64>) {
    let l1 = window.len();
    debug_assert!(l2 <= l1 && l3 <= l1);
    out.push(1.0);
    out.extend_from_slice(window);
    let w2 = &window[(l1 - l2) / 2..(l1 - l2) / 2 + l2];
    for i in 0..l2 {
        for j in i..l2 {
            out.push(w2[i] * w2[j]);
        }
    }
    let w3 = &window[(l1 - l3) / 2..(l1 - l3) / 2 + l3];
    for i in 0..l3 {
        for j in i..l3 {
            let p = w3[i] * w3[j];
            out.extend(w3[j..].iter().map(|v| p * v));
        }
    }
}

/// Trained equalizer coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraModel {
    pub l1: usize,
    pub l2: usize,
    pub l3: usize,
    pub bias: f64,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub w3: Vec<f64>,
}

impl VolterraModel {
    pub fn zeros(l1: usize, l2: usize, l3: usize) -> Self {
        Self {
            l1,
            l2,
            l3,
            bias: 0.0,
            w1: vec![0.0; l1],
            w2: vec![0.0; l2 * (l2 + 1) / 2],
            w3: vec![0.0; l3 * (l3 + 1) * (l3 + 2) / 6],
        }
    }

    /// Pure linear pass-through on the centre tap.
    pub fn identity(l1: usize, l2: usize, l3: usize) -> Self {
        let mut m = Self::zeros(l1, l2, l3);
        m.w1[(l1 - 1) / 2] = 1.0;
        m
    }

    fn from_vector(l1: usize, l2: usize, l3: usize, w: &[f64]) -> Self {
        let n2 = l2 * (l2 + 1) / 2;
        Self {
            l1,
            l2,
            l3,
            bias: w[0],
            w1: w[1..1 + l1].to_vec(),
            w2: w[1 + l1..1 + l1 + n2].to_vec(),
            w3: w[1 + l1 + n2..].to_vec(),
        }
    }

    pub fn coefficients(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        v.push(self.bias);
        v.extend_from_slice(&self.w1);
        v.extend_from_slice(&self.w2);
        v.extend_from_slice(&self.w3);
        v
    }

    /// Number of coefficients including the bias.
    pub fn len(&self) -> usize {
        feature_count(self.l1, self.l2, self.l3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn linear_energy(&self) -> f64 {
        self.w1.iter().map(|w| w * w).sum()
    }

    pub fn nonlinear_energy(&self) -> f64 {
        self.w2.iter().chain(&self.w3).map(|w| w * w).sum()
    }

    /// Output for the window whose centre is `obs[n]`.
    fn output_at(&self, obs: &[f64], n: usize, scratch: &mut Vec<f64>) -> f64 {
        let start = n - (self.l1 - 1) / 2;
        let window = &obs[start..start + self.l1];
        scratch.clear();
        volterra_features(window, self.l2, self.l3, scratch);
        let weights = self.w1.iter().chain(&self.w2).chain(&self.w3);
        self.bias + weights.zip(&scratch[1..]).map(|(w, f)| w * f).sum::<f64>()
    }
}

/// How the coefficients are fitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainMethod {
    /// Block least squares on the normal equations.
    LeastSquares,
    /// Normalized LMS over `epochs` passes of the training block.
    Lms { step: f64, epochs: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSpec {
    pub l1: usize,
    pub l2: usize,
    pub l3: usize,
    pub method: TrainMethod,
    /// Leading fraction of the symbols used for training; the rest is held
    /// out for evaluation.
    pub training_fraction: f64,
}

impl TrainSpec {
    pub fn least_squares(l1: usize, l2: usize, l3: usize) -> Self {
        Self { l1, l2, l3, method: TrainMethod::LeastSquares, training_fraction: 0.2 }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedVolterra {
    pub model: VolterraModel,
    /// Symbol indices used for training.
    pub training: Range<usize>,
    /// Symbol indices held out (and valid for equalization).
    pub heldout: Range<usize>,
    pub training_mse: f64,
    pub heldout_mse: f64,
    /// Ridge weight actually added to the normal equations.
    pub ridge: f64,
    pub warnings: Vec<String>,
}

/// Default diagonal loading relative to the mean feature energy; small
/// enough that the solution stays a least-squares fit.
const DEFAULT_RIDGE: f64 = 1e-12;
/// Loading used when the normal equations are numerically singular.
const FALLBACK_RIDGE: f64 = 1e-4;
const LS_BLOCK: usize = 2048;

fn mse(model: &VolterraModel, obs: &[f64], reference: &[f64], range: Range<usize>) -> f64 {
    if range.is_empty() {
        return f64::NAN;
    }
    let mut scratch = Vec::new();
    let n = range.len() as f64;
    range.map(|i| (model.output_at(obs, i, &mut scratch) - reference[i]).powi(2)).sum::<f64>() / n
}

/// Fits a Volterra equalizer mapping `obs` onto `reference` (aligned
/// sample by sample). Windows that would run past either end are never
/// used.
pub fn train_volterra(obs: &[f64], reference: &[f64], spec: &TrainSpec) -> Result<TrainedVolterra> {
    let TrainSpec { l1, l2, l3, .. } = *spec;
    if obs.len() != reference.len() {
        return Err(Error::Length(format!(
            "observations ({}) and reference ({}) differ in length",
            obs.len(),
            reference.len()
        )));
    }
    if l1 == 0 || l2 > l1 || l3 > l1 {
        return Err(Error::param(format!("invalid memories ({l1}, {l2}, {l3})")));
    }
    if !(spec.training_fraction > 0.0 && spec.training_fraction < 1.0) {
        return Err(Error::param("training fraction must lie in (0, 1)"));
    }
    let edge = l1.div_ceil(2);
    if obs.len() <= 2 * edge + 2 {
        return Err(Error::Length("too few symbols for the equalizer memory".into()));
    }
    let valid = edge..obs.len() - edge;
    let n_train = ((valid.len() as f64) * spec.training_fraction).round() as usize;
    let training = valid.start..valid.start + n_train.max(1);
    let heldout = training.end..valid.end;
    let p = feature_count(l1, l2, l3);
    let mut warnings = Vec::new();
    if matches!(spec.method, TrainMethod::LeastSquares) && training.len() < 10 * p {
        warnings.push(format!("training block of {} symbols is under 10x the {p} coefficients", training.len()));
    }

    let (w, ridge) = match spec.method {
        TrainMethod::LeastSquares => solve_least_squares(obs, reference, training.clone(), spec, &mut warnings)?,
        TrainMethod::Lms { step, epochs } => (train_nlms(obs, reference, training.clone(), spec, step, epochs), 0.0),
    };
    let model = VolterraModel::from_vector(l1, l2, l3, &w);
    let training_mse = mse(&model, obs, reference, training.clone());
    let heldout_mse = mse(&model, obs, reference, heldout.clone());
    for w in &warnings {
        log::warn!("volterra training: {w}");
    }
    Ok(TrainedVolterra { model, training, heldout, training_mse, heldout_mse, ridge, warnings })
}

fn solve_least_squares(
    obs: &[f64],
    reference: &[f64],
    training: Range<usize>,
    spec: &TrainSpec,
    warnings: &mut Vec<String>,
) -> Result<(Vec<f64>, f64)> {
    let (l1, l2, l3) = (spec.l1, spec.l2, spec.l3);
    let p = feature_count(l1, l2, l3);
    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    let mut scratch = Vec::with_capacity(p);
    let idx: Vec<usize> = training.collect();
    for block in idx.chunks(LS_BLOCK) {
        let mut f = DMatrix::<f64>::zeros(block.len(), p);
        for (r, &n) in block.iter().enumerate() {
            let start = n - (l1 - 1) / 2;
            scratch.clear();
            volterra_features(&obs[start..start + l1], l2, l3, &mut scratch);
            for (c, v) in scratch.iter().enumerate() {
                f[(r, c)] = *v;
            }
        }
        let y = DVector::from_iterator(block.len(), block.iter().map(|&n| reference[n]));
        gram.gemm_tr(1.0, &f, &f, 1.0);
        rhs.gemv_tr(1.0, &f, &y, 1.0);
    }
    let mean_diag = gram.trace() / p as f64;
    for (scale, is_fallback) in [(DEFAULT_RIDGE, false), (FALLBACK_RIDGE, true)] {
        let ridge = scale * mean_diag;
        let mut a = gram.clone();
        for i in 0..p {
            a[(i, i)] += ridge;
        }
        if let Some(chol) = a.cholesky() {
            let w = chol.solve(&rhs);
            if w.iter().all(|v| v.is_finite()) {
                if is_fallback {
                    warnings.push(format!("normal equations rank deficient; ridge {ridge:.3e} applied"));
                }
                return Ok((w.iter().copied().collect(), ridge));
            }
        }
    }
    Err(Error::param("Volterra normal equations could not be solved"))
}

fn train_nlms(
    obs: &[f64],
    reference: &[f64],
    training: Range<usize>,
    spec: &TrainSpec,
    step: f64,
    epochs: usize,
) -> Vec<f64> {
    let p = feature_count(spec.l1, spec.l2, spec.l3);
    let mut w = vec![0.0; p];
    w[1 + (spec.l1 - 1) / 2] = 1.0;
    let mut f = Vec::with_capacity(p);
    for _ in 0..epochs.max(1) {
        for n in training.clone() {
            let start = n - (spec.l1 - 1) / 2;
            f.clear();
            volterra_features(&obs[start..start + spec.l1], spec.l2, spec.l3, &mut f);
            let y: f64 = w.iter().zip(&f).map(|(a, b)| a * b).sum();
            let e = reference[n] - y;
            let norm = f.iter().map(|v| v * v).sum::<f64>() + 1e-9;
            let g = step * e / norm;
            for (wi, fi) in w.iter_mut().zip(&f) {
                *wi += g * fi;
            }
        }
    }
    w
}

/// Equalizer output with the range of symbols whose window was complete.
#[derive(Debug, Clone, PartialEq)]
pub struct Equalized {
    pub values: Vec<f64>,
    /// Symbols outside this range (the first and last `⌈l1/2⌉`) are zero
    /// and must be excluded from error counting.
    pub valid: Range<usize>,
}

/// Runs the model over every complete window of `obs`.
pub fn equalize(obs: &[f64], model: &VolterraModel) -> Equalized {
    let edge = model.l1.div_ceil(2);
    let n = obs.len();
    let mut values = vec![0.0; n];
    if n <= 2 * edge {
        return Equalized { values, valid: 0..0 };
    }
    let valid = edge..n - edge;
    values[valid.clone()].par_chunks_mut(4096).enumerate().for_each(|(c, chunk)| {
        let mut scratch = Vec::with_capacity(model.len());
        let base = edge + c * 4096;
        for (k, out) in chunk.iter_mut().enumerate() {
            *out = model.output_at(obs, base + k, &mut scratch);
        }
    });
    Equalized { values, valid }
}
