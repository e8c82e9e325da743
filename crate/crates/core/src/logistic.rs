//! Full-batch gradient descent for L2-regularised binary logistic regression.
//!
//! Columns are rescaled by their maximum magnitude before the descent and the
//! scale is folded back into the returned weights, so callers always see a
//! plain affine model over the raw features. A step that would raise the
//! objective is rejected and the step size halved, which keeps the recorded
//! loss sequence non-increasing.

use crate::scalar::{sigmoid, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig<T> {
    pub reg: T,
    pub iters: usize,
    pub step: T,
    /// Kept for reproducibility records; zero initialisation and full-batch
    /// updates make the fit independent of it.
    pub seed: u64,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        TrainConfig {
            reg: T::lit(1e-4),
            iters: 500,
            step: T::lit(0.1),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryFit<T> {
    pub weights: Vec<T>,
    pub bias: T,
    /// Objective before the first step and after every accepted step.
    pub losses: Vec<T>,
}

struct Evaluation<T> {
    loss: T,
    residuals: Vec<T>,
}

fn evaluate<T: Scalar>(
    x: &[Vec<T>],
    y: &[bool],
    scale: &[T],
    w: &[T],
    b: T,
    reg: T,
) -> Evaluation<T> {
    let n = T::count(x.len());
    let mut loss = T::zero();
    let mut residuals = Vec::with_capacity(x.len());
    for (row, &label) in x.iter().zip(y) {
        let mut z = b;
        for ((&v, &s), &wj) in row.iter().zip(scale).zip(w) {
            z += wj * v * s;
        }
        // log(1 + e^-z) for positives, log(1 + e^z) for negatives.
        let signed = if label { -z } else { z };
        let softplus = if signed > T::zero() {
            signed + (-signed).exp().ln_1p()
        } else {
            signed.exp().ln_1p()
        };
        loss += softplus;
        let target = if label { T::one() } else { T::zero() };
        residuals.push(sigmoid(z) - target);
    }
    let penalty = w.iter().fold(T::zero(), |acc, &wj| acc + wj * wj);
    Evaluation {
        loss: loss / n + reg * penalty / T::lit(2.0),
        residuals,
    }
}

/// Fit `P(y | x) = sigmoid(w . x + b)` from zero initialisation.
///
/// Rows must be non-empty and share one dimension; callers validate that.
pub fn fit_binary<T: Scalar>(x: &[Vec<T>], y: &[bool], cfg: &TrainConfig<T>) -> BinaryFit<T> {
    let dim = x.first().map_or(0, Vec::len);
    let n = T::count(x.len());
    let mut scale = vec![T::zero(); dim];
    for row in x {
        for (s, &v) in scale.iter_mut().zip(row) {
            *s = s.max(v.abs());
        }
    }
    for s in scale.iter_mut() {
        *s = if *s > T::zero() { T::one() / *s } else { T::one() };
    }

    let mut w = vec![T::zero(); dim];
    let mut b = T::zero();
    let mut current = evaluate(x, y, &scale, &w, b, cfg.reg);
    let mut losses = vec![current.loss];
    let mut step = cfg.step;
    let mut grad_w = vec![T::zero(); dim];

    'outer: for _ in 0..cfg.iters {
        grad_w.iter_mut().for_each(|g| *g = T::zero());
        let mut grad_b = T::zero();
        for (row, &r) in x.iter().zip(&current.residuals) {
            grad_b += r;
            for ((g, &v), &s) in grad_w.iter_mut().zip(row).zip(&scale) {
                *g += r * v * s;
            }
        }
        for (g, &wj) in grad_w.iter_mut().zip(&w) {
            *g = *g / n + cfg.reg * wj;
        }
        grad_b /= n;

        for _ in 0..40 {
            let cand_w: Vec<T> = w.iter().zip(&grad_w).map(|(&wj, &g)| wj - step * g).collect();
            let cand_b = b - step * grad_b;
            let cand = evaluate(x, y, &scale, &cand_w, cand_b, cfg.reg);
            if cand.loss <= current.loss {
                w = cand_w;
                b = cand_b;
                current = cand;
                losses.push(current.loss);
                continue 'outer;
            }
            step /= T::lit(2.0);
        }
        break;
    }

    let weights = w.iter().zip(&scale).map(|(&wj, &s)| wj * s).collect();
    BinaryFit {
        weights,
        bias: b,
        losses,
    }
}
