//! Gradient estimators over a dataset: full batch, epoch-shuffled
//! mini-batches, and single-example stochastic draws.

use crate::error::{Error, Result};
use crate::numeric::{ParamVector, RngStream};
use crate::objectives::{ErmObjective, Objective};

/// Gradient of the weighted mean loss over all examples plus the
/// regularizer.
pub fn full_batch_gradient(obj: &ErmObjective, x: &ParamVector) -> Result<ParamVector> {
    obj.gradient(x)
}

/// Epoch state for mini-batch sampling: a shuffled visit order, reshuffled
/// whenever an epoch is exhausted. Batches within one epoch are disjoint;
/// the last batch of an epoch may be short.
#[derive(Debug, Clone)]
pub struct MinibatchSampler {
    batch_size: usize,
    order: Vec<usize>,
    cursor: usize,
    epoch: u64,
}

impl MinibatchSampler {
    pub fn new(n_examples: usize, batch_size: usize) -> Result<Self> {
        if batch_size == 0 || batch_size > n_examples {
            return Err(Error::InvalidParam(format!(
                "batch size must lie in [1, {n_examples}], got {batch_size}"
            )));
        }
        Ok(MinibatchSampler {
            batch_size,
            order: (0..n_examples).collect(),
            cursor: n_examples, // trigger a shuffle on first use
            epoch: 0,
        })
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn next_batch(&mut self, rng: &mut RngStream) -> &[usize] {
        if self.cursor >= self.order.len() {
            rng.shuffle(&mut self.order);
            self.cursor = 0;
            self.epoch += 1;
        }
        let end = (self.cursor + self.batch_size).min(self.order.len());
        let batch = &self.order[self.cursor..end];
        self.cursor = end;
        batch
    }
}

/// Mean gradient over the next mini-batch (uniform subset without
/// replacement, epoch-based reshuffling).
pub fn minibatch_gradient(
    obj: &ErmObjective,
    x: &ParamVector,
    sampler: &mut MinibatchSampler,
    rng: &mut RngStream,
) -> Result<ParamVector> {
    let batch = sampler.next_batch(rng).to_vec();
    obj.mean_grad_over(x, &batch)
}

/// Gradient of one uniformly chosen example's loss (mini-batch of size 1,
/// drawn independently each call).
pub fn stochastic_gradient(
    obj: &ErmObjective,
    x: &ParamVector,
    rng: &mut RngStream,
) -> Result<ParamVector> {
    let i = rng.uniform_usize(obj.n_examples());
    obj.mean_grad_over(x, &[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::RegularizationTerm;
    use crate::objectives::{Dataset, LossKind, ModelKind};

    fn fixture() -> ErmObjective {
        let rows = [
            (vec![1.0, 0.0], 1.0),
            (vec![0.0, 1.0], 2.0),
            (vec![1.0, 1.0], 3.5),
            (vec![2.0, -1.0], 0.5),
        ];
        ErmObjective::new(
            ModelKind::LinearRegression,
            Dataset::regression(&rows).unwrap(),
            LossKind::Mse,
            RegularizationTerm::none(),
        )
        .unwrap()
    }

    #[test]
    fn single_example_dataset_full_gradient() {
        let rows = [(vec![1.0, 2.0], 3.0)];
        let obj = ErmObjective::new(
            ModelKind::LinearRegression,
            Dataset::regression(&rows).unwrap(),
            LossKind::Mse,
            RegularizationTerm::none(),
        )
        .unwrap();
        let x = ParamVector::zeros(2);
        let full = full_batch_gradient(&obj, &x).unwrap();
        let single = obj.mean_grad_over(&x, &[0]).unwrap();
        assert_eq!(full, single);
    }

    #[test]
    fn full_batch_equals_mean_of_per_example_gradients() {
        let obj = fixture();
        let x = ParamVector::new(vec![0.3, -0.4]);
        let full = full_batch_gradient(&obj, &x).unwrap();
        let mut acc = ParamVector::zeros(2);
        for i in 0..obj.n_examples() {
            acc = acc.add_scaled(1.0, &obj.mean_grad_over(&x, &[i]).unwrap());
        }
        let mean = acc.scale(1.0 / obj.n_examples() as f64);
        assert!(full.sub(&mean).inf_norm() < 1e-12);
    }

    #[test]
    fn full_gradient_vanishes_at_least_squares_solution() {
        // 3 points on an exact line y = 2 x1 + 1 x2: residuals are zero at
        // (2, 1), solving the normal equations by construction.
        let rows = [
            (vec![1.0, 0.0], 2.0),
            (vec![0.0, 1.0], 1.0),
            (vec![1.0, 1.0], 3.0),
        ];
        let obj = ErmObjective::new(
            ModelKind::LinearRegression,
            Dataset::regression(&rows).unwrap(),
            LossKind::Mse,
            RegularizationTerm::none(),
        )
        .unwrap();
        let g = full_batch_gradient(&obj, &ParamVector::new(vec![2.0, 1.0])).unwrap();
        assert!(g.inf_norm() < 1e-12);
    }

    #[test]
    fn full_batch_size_equals_full_gradient() {
        let obj = fixture();
        let x = ParamVector::new(vec![0.1, 0.9]);
        let mut sampler = MinibatchSampler::new(4, 4).unwrap();
        let mut rng = RngStream::new(1);
        let mb = minibatch_gradient(&obj, &x, &mut sampler, &mut rng).unwrap();
        let full = full_batch_gradient(&obj, &x).unwrap();
        assert!(mb.sub(&full).inf_norm() < 1e-12);
    }

    #[test]
    fn batch_size_one_matches_stochastic_semantics() {
        let obj = fixture();
        let x = ParamVector::new(vec![0.1, 0.9]);
        let mut sampler = MinibatchSampler::new(4, 1).unwrap();
        let mut rng = RngStream::new(2);
        let g = minibatch_gradient(&obj, &x, &mut sampler, &mut rng).unwrap();
        // Must equal some single example's gradient.
        let candidates: Vec<ParamVector> = (0..4)
            .map(|i| obj.mean_grad_over(&x, &[i]).unwrap())
            .collect();
        assert!(candidates.iter().any(|c| c.sub(&g).inf_norm() < 1e-15));
    }

    #[test]
    fn minibatch_expectation_approximates_full_gradient() {
        let obj = fixture();
        let x = ParamVector::new(vec![0.25, -0.75]);
        let full = full_batch_gradient(&obj, &x).unwrap();
        let mut rng = RngStream::new(3);
        let mut sampler = MinibatchSampler::new(4, 2).unwrap();
        let mut acc = ParamVector::zeros(2);
        let resamples = 10_000;
        for _ in 0..resamples {
            acc = acc.add_scaled(
                1.0,
                &minibatch_gradient(&obj, &x, &mut sampler, &mut rng).unwrap(),
            );
        }
        let mean = acc.scale(1.0 / resamples as f64);
        let rel = mean.sub(&full).norm() / full.norm();
        assert!(rel < 0.02, "relative deviation {rel}");
    }

    #[test]
    fn epochs_cover_every_example_without_replacement() {
        let mut sampler = MinibatchSampler::new(5, 2).unwrap();
        let mut rng = RngStream::new(4);
        let mut seen = Vec::new();
        // One epoch = batches of 2, 2, 1.
        for _ in 0..3 {
            seen.extend_from_slice(sampler.next_batch(&mut rng));
        }
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3, 4]);
        assert_eq!(sampler.epoch(), 1);
    }

    #[test]
    fn batch_size_bounds_enforced() {
        assert!(MinibatchSampler::new(4, 0).is_err());
        assert!(MinibatchSampler::new(4, 5).is_err());
    }
}
