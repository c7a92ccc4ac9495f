//! Empirical-risk objectives composing a model family, a dataset, a loss,
//! an L2 regularizer, and optional per-example weights.
//!
//! The objective value is the weighted mean (1/N) sum v_i * loss_i plus the
//! regularizer, so all-ones weights recover the ordinary unweighted mean and
//! all-zero weights leave only the regularizer. Per-example losses are
//! individually retrievable for self-paced learning.
//!
//! Batch reductions run over fixed-size chunks that are summed in index
//! order, so results are bit-identical between the sequential and
//! data-parallel paths and across thread counts.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::losses::{bce_point, mae_point, mse_point, msle_point, RegularizationTerm, PROB_CLAMP};
use crate::numeric::{DenseMatrix, ParamVector};
use crate::objectives::dataset::{Dataset, Targets};
use crate::objectives::Objective;

/// Fixed reduction chunk; summation order is chunk-by-chunk regardless of
/// thread count.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    LinearRegression,
    LogisticRegression,
    SoftmaxClassifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Mse,
    Mae,
    Msle,
    Bce,
    Cce,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::LinearRegression => "linear",
            ModelKind::LogisticRegression => "logistic",
            ModelKind::SoftmaxClassifier => "softmax",
        }
    }
}

impl LossKind {
    pub fn name(&self) -> &'static str {
        match self {
            LossKind::Mse => "mse",
            LossKind::Mae => "mae",
            LossKind::Msle => "msle",
            LossKind::Bce => "bce",
            LossKind::Cce => "cce",
        }
    }
}

#[derive(Clone)]
pub struct ErmObjective {
    model: ModelKind,
    loss: LossKind,
    data: Arc<Dataset>,
    reg: RegularizationTerm,
    weights: Option<Arc<Vec<f64>>>,
    n_classes: usize, // 1 for regression, 2 for logistic
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl ErmObjective {
    pub fn new(
        model: ModelKind,
        data: Dataset,
        loss: LossKind,
        reg: RegularizationTerm,
    ) -> Result<Self> {
        let n_classes = match (model, data.targets(), loss) {
            (ModelKind::LinearRegression, Targets::Regression(_), LossKind::Mse)
            | (ModelKind::LinearRegression, Targets::Regression(_), LossKind::Mae)
            | (ModelKind::LinearRegression, Targets::Regression(_), LossKind::Msle) => 1,
            (ModelKind::LogisticRegression, Targets::Classes { n_classes: 2, .. }, LossKind::Bce) => 2,
            (ModelKind::SoftmaxClassifier, Targets::Classes { n_classes, .. }, LossKind::Cce) => {
                *n_classes
            }
            (model, _, loss) => {
                return Err(Error::Domain(format!(
                    "unsupported model/loss/target combination: {} with {}",
                    model.name(),
                    loss.name()
                )))
            }
        };
        Ok(ErmObjective {
            model,
            loss,
            data: Arc::new(data),
            reg,
            weights: None,
            n_classes,
        })
    }

    /// Same objective with new per-example weights (cheap: data is shared).
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.data.n_examples() {
            return Err(Error::DimensionMismatch {
                expected: self.data.n_examples(),
                got: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|&&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "example weights must be nonnegative and finite, got {w}"
            )));
        }
        let mut out = self.clone();
        out.weights = Some(Arc::new(weights));
        Ok(out)
    }

    pub fn n_examples(&self) -> usize {
        self.data.n_examples()
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    pub fn regularizer(&self) -> &RegularizationTerm {
        &self.reg
    }

    fn target_regression(&self, i: usize) -> f64 {
        match self.data.targets() {
            Targets::Regression(v) => v[i],
            Targets::Classes { labels, .. } => labels[i] as f64,
        }
    }

    fn target_class(&self, i: usize) -> usize {
        match self.data.targets() {
            Targets::Classes { labels, .. } => labels[i],
            Targets::Regression(_) => unreachable!("classification model over regression targets"),
        }
    }

    /// Raw (unweighted) loss of example `i` at parameters `x`; when
    /// `grad_acc` is given, adds `scale` times the example's parameter
    /// gradient into it.
    fn example_eval(
        &self,
        x: &ParamVector,
        i: usize,
        mut grad_acc: Option<(&mut [f64], f64)>,
    ) -> Result<f64> {
        let xi = self.data.example(i);
        match self.model {
            ModelKind::LinearRegression => {
                let z: f64 = xi.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
                let y = self.target_regression(i);
                let (l, dz) = match self.loss {
                    LossKind::Mse => mse_point(y, z),
                    LossKind::Mae => mae_point(y, z),
                    LossKind::Msle => msle_point(y, z)?,
                    _ => unreachable!(),
                };
                if let Some((acc, scale)) = grad_acc.as_mut() {
                    for (a, &f) in acc.iter_mut().zip(xi) {
                        *a += *scale * dz * f;
                    }
                }
                Ok(l)
            }
            ModelKind::LogisticRegression => {
                let z: f64 = xi.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
                let p = sigmoid(z);
                let y = self.target_class(i) as f64;
                let (l, dp) = bce_point(y, p)?;
                if let Some((acc, scale)) = grad_acc.as_mut() {
                    let dz = dp * p * (1.0 - p);
                    for (a, &f) in acc.iter_mut().zip(xi) {
                        *a += *scale * dz * f;
                    }
                }
                Ok(l)
            }
            ModelKind::SoftmaxClassifier => {
                let c = self.n_classes;
                let d = self.data.n_features();
                let w = x.as_slice();
                let mut z = vec![0.0; c];
                for (k, zk) in z.iter_mut().enumerate() {
                    *zk = xi
                        .iter()
                        .zip(&w[k * d..(k + 1) * d])
                        .map(|(a, b)| a * b)
                        .sum();
                }
                let zmax = z.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
                let mut p: Vec<f64> = z.iter().map(|&zk| (zk - zmax).exp()).collect();
                let sum: f64 = p.iter().sum();
                for pk in &mut p {
                    *pk /= sum;
                }
                let y = self.target_class(i);
                let py = p[y].clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
                let l = -py.ln();
                if let Some((acc, scale)) = grad_acc.as_mut() {
                    // Flat inside the clamp region, matching the clamped value.
                    if p[y] > PROB_CLAMP && p[y] < 1.0 - PROB_CLAMP {
                        for (k, &pk) in p.iter().enumerate() {
                            let dz = pk - if k == y { 1.0 } else { 0.0 };
                            for (a, &f) in acc[k * d..(k + 1) * d].iter_mut().zip(xi) {
                                *a += *scale * dz * f;
                            }
                        }
                    }
                }
                Ok(l)
            }
        }
    }

    /// Raw per-example losses at `x` (unweighted); what self-paced learning
    /// thresholds on.
    pub fn per_example_losses(&self, x: &ParamVector) -> Result<Vec<f64>> {
        x.check_dim(self.dim())?;
        (0..self.n_examples())
            .map(|i| self.example_eval(x, i, None))
            .collect()
    }

    fn chunk_reduce(&self, x: &ParamVector, indices: &[usize]) -> Result<(f64, Vec<f64>)> {
        let dim = self.dim();
        let eval_chunk = |chunk: &[usize]| -> Result<(f64, Vec<f64>)> {
            let mut loss_sum = 0.0;
            let mut grad_sum = vec![0.0; dim];
            for &i in chunk {
                let w = self.weight(i);
                let l = self.example_eval(x, i, Some((&mut grad_sum, w)))?;
                loss_sum += w * l;
            }
            Ok((loss_sum, grad_sum))
        };

        let partials: Result<Vec<(f64, Vec<f64>)>> = {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                indices.par_chunks(CHUNK).map(eval_chunk).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                indices.chunks(CHUNK).map(eval_chunk).collect()
            }
        };

        let mut loss_sum = 0.0;
        let mut grad_sum = vec![0.0; dim];
        for (l, g) in partials? {
            loss_sum += l;
            for (a, b) in grad_sum.iter_mut().zip(&g) {
                *a += b;
            }
        }
        Ok((loss_sum, grad_sum))
    }

    fn chunk_reduce_sequential(&self, x: &ParamVector, indices: &[usize]) -> Result<(f64, Vec<f64>)> {
        let dim = self.dim();
        let mut loss_sum = 0.0;
        let mut grad_sum = vec![0.0; dim];
        for chunk in indices.chunks(CHUNK) {
            let mut cl = 0.0;
            let mut cg = vec![0.0; dim];
            for &i in chunk {
                let w = self.weight(i);
                let l = self.example_eval(x, i, Some((&mut cg, w)))?;
                cl += w * l;
            }
            loss_sum += cl;
            for (a, b) in grad_sum.iter_mut().zip(&cg) {
                *a += b;
            }
        }
        Ok((loss_sum, grad_sum))
    }

    fn assemble(&self, x: &ParamVector, loss_sum: f64, grad_sum: Vec<f64>) -> (f64, ParamVector) {
        let n = self.n_examples() as f64;
        let (rv, rg) = self.reg.value_and_grad(x);
        let value = loss_sum / n + rv;
        let grad = ParamVector::new(
            grad_sum
                .into_iter()
                .zip(rg.as_slice())
                .map(|(g, r)| g / n + r)
                .collect(),
        );
        (value, grad)
    }

    /// Sequential reduction; always available, used by benchmarks as the
    /// baseline.
    pub fn value_and_grad_sequential(&self, x: &ParamVector) -> Result<(f64, ParamVector)> {
        x.check_dim(self.dim())?;
        let indices: Vec<usize> = (0..self.n_examples()).collect();
        let (l, g) = self.chunk_reduce_sequential(x, &indices)?;
        Ok(self.assemble(x, l, g))
    }

    /// Rayon reduction over fixed chunks; bit-identical to the sequential
    /// path.
    #[cfg(feature = "parallel")]
    pub fn value_and_grad_parallel(&self, x: &ParamVector) -> Result<(f64, ParamVector)> {
        x.check_dim(self.dim())?;
        let indices: Vec<usize> = (0..self.n_examples()).collect();
        let (l, g) = self.chunk_reduce(x, &indices)?;
        Ok(self.assemble(x, l, g))
    }

    /// Mean weighted gradient over a subset of example indices, plus the
    /// regularizer gradient; the minibatch/stochastic estimator.
    pub(crate) fn mean_grad_over(&self, x: &ParamVector, indices: &[usize]) -> Result<ParamVector> {
        x.check_dim(self.dim())?;
        if indices.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let (_, grad_sum) = self.chunk_reduce(x, indices)?;
        let b = indices.len() as f64;
        let (_, rg) = self.reg.value_and_grad(x);
        Ok(ParamVector::new(
            grad_sum
                .into_iter()
                .zip(rg.as_slice())
                .map(|(g, r)| g / b + r)
                .collect(),
        ))
    }
}

impl Objective for ErmObjective {
    fn dim(&self) -> usize {
        match self.model {
            ModelKind::SoftmaxClassifier => self.n_classes * self.data.n_features(),
            _ => self.data.n_features(),
        }
    }

    fn value(&self, x: &ParamVector) -> Result<f64> {
        x.check_dim(self.dim())?;
        let n = self.n_examples() as f64;
        let mut sum = 0.0;
        for i in 0..self.n_examples() {
            sum += self.weight(i) * self.example_eval(x, i, None)?;
        }
        let (rv, _) = self.reg.value_and_grad(x);
        Ok(sum / n + rv)
    }

    fn gradient(&self, x: &ParamVector) -> Result<ParamVector> {
        self.value_and_grad(x).map(|(_, g)| g)
    }

    fn value_and_grad(&self, x: &ParamVector) -> Result<(f64, ParamVector)> {
        x.check_dim(self.dim())?;
        let indices: Vec<usize> = (0..self.n_examples()).collect();
        let (l, g) = self.chunk_reduce(x, &indices)?;
        Ok(self.assemble(x, l, g))
    }

    /// Gauss-Newton-exact Hessians for the smooth convex pairings; other
    /// pairings report the Hessian as unavailable.
    fn hessian(&self, x: &ParamVector) -> Result<DenseMatrix> {
        x.check_dim(self.dim())?;
        let d = self.data.n_features();
        let n = self.n_examples() as f64;
        let mut h = DenseMatrix::zeros(d, d);
        match (self.model, self.loss) {
            (ModelKind::LinearRegression, LossKind::Mse) => {
                for i in 0..self.n_examples() {
                    let w = self.weight(i);
                    let xi = self.data.example(i);
                    for r in 0..d {
                        for c in 0..d {
                            h.set(r, c, h.get(r, c) + 2.0 * w * xi[r] * xi[c] / n);
                        }
                    }
                }
            }
            (ModelKind::LogisticRegression, LossKind::Bce) => {
                for i in 0..self.n_examples() {
                    let w = self.weight(i);
                    let xi = self.data.example(i);
                    let z: f64 = xi.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
                    let p = sigmoid(z);
                    if p <= PROB_CLAMP || p >= 1.0 - PROB_CLAMP {
                        continue; // flat clamp region
                    }
                    let curv = p * (1.0 - p);
                    for r in 0..d {
                        for c in 0..d {
                            h.set(r, c, h.get(r, c) + w * curv * xi[r] * xi[c] / n);
                        }
                    }
                }
            }
            _ => return Err(Error::HessianUnavailable),
        }
        for i in 0..d {
            h.set(i, i, h.get(i, i) + self.reg.lambda());
        }
        Ok(h)
    }
}
