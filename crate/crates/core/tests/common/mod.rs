//! Oracles shared by the integration tests. Everything here is written from
//! the definitions, independently of the library code it checks.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use holex::datasets::LabeledTriple;
use holex::models::{Model, ModelKind, ParamKind};
use holex::training::{batch_loss, batch_loss_and_grad, sigmoid, Batch, LossKind, TrainingConfig};

/// `X_j = Σ_n x_n e^{−2πi·jn/K}`, summed term by term.
pub fn oracle_dft(x: &[f64]) -> Vec<Complex64> {
    let k = x.len();
    (0..k)
        .map(|j| {
            x.iter()
                .enumerate()
                .map(|(n, &v)| {
                    let angle = -2.0 * std::f64::consts::PI * ((j * n) % k) as f64 / k as f64;
                    Complex64::from_polar(v, angle)
                })
                .sum()
        })
        .collect()
}

/// `(a ⋆ b)[k] = Σ_i a[i]·b[(i + k) mod K]`.
pub fn oracle_correlation(a: &[f64], b: &[f64]) -> Vec<f64> {
    let k = a.len();
    (0..k)
        .map(|shift| (0..k).map(|i| a[i] * b[(i + shift) % k]).sum())
        .collect()
}

/// Mean precision at the rank of each positive, scores sorted descending.
/// Inputs must be free of ties.
pub fn oracle_average_precision(scores: &[f64], positive: &[bool]) -> f64 {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let mut hits = 0.0;
    let mut total = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        if positive[i] {
            hits += 1.0;
            total += hits / (rank + 1) as f64;
        }
    }
    total / hits
}

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOLERANCE: f64 = 1e-5;
/// Denominator floor: gradient components this small are compared
/// absolutely.
pub const FD_FLOOR: f64 = 1e-3;

#[derive(Debug, Default, Clone, Copy)]
pub struct GradientCheck {
    pub coordinates: usize,
    pub max_relative_error: f64,
}

impl GradientCheck {
    pub fn merge(self, other: GradientCheck) -> GradientCheck {
        GradientCheck {
            coordinates: self.coordinates + other.coordinates,
            max_relative_error: self.max_relative_error.max(other.max_relative_error),
        }
    }
}

fn random_triple(rng: &mut ChaCha8Rng, n_e: usize, n_r: usize) -> (usize, usize, usize) {
    (rng.random_range(0..n_r), rng.random_range(0..n_e), rng.random_range(0..n_e))
}

fn random_batch(rng: &mut ChaCha8Rng, model: &Model, cfg: &TrainingConfig) -> Batch {
    let (n_e, n_r) = (model.n_entities(), model.n_relations());
    let size = rng.random_range(1..=6);
    match cfg.loss {
        LossKind::Logistic => Batch::Pointwise(
            (0..size)
                .map(|_| {
                    let (p, s, o) = random_triple(rng, n_e, n_r);
                    if rng.random_bool(0.5) {
                        LabeledTriple::positive(p, s, o)
                    } else {
                        LabeledTriple::negative(p, s, o)
                    }
                })
                .collect(),
        ),
        LossKind::Margin => {
            let mut pairs = Vec::new();
            while pairs.len() < size {
                let (p, s, o) = random_triple(rng, n_e, n_r);
                let (_, s2, o2) = random_triple(rng, n_e, n_r);
                let sp = model.score(p, s, o).unwrap();
                let sn = model.score(p, s2, o2).unwrap();
                // Keep every pair away from the hinge kink.
                if (cfg.gamma + sigmoid(sn) - sigmoid(sp)).abs() > 1e-3 {
                    pairs.push((LabeledTriple::positive(p, s, o), LabeledTriple::negative(p, s2, o2)));
                }
            }
            Batch::Pairs(pairs)
        }
    }
}

/// Compares the analytic batch gradient of a random small model (K ≤ 4,
/// at most 5 entities) with central differences on every coordinate.
pub fn check_gradient(kind: ModelKind, loss: LossKind, lambda: f64, seed: u64) -> GradientCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = rng.random_range(1..=4);
    let n_e = rng.random_range(2..=5);
    let n_r = rng.random_range(1..=2);
    let model = Model::init(kind, n_e, n_r, rank, seed).unwrap();
    let cfg = TrainingConfig {
        model: kind,
        loss,
        rank,
        lambda,
        gamma: 0.5,
        ..TrainingConfig::default()
    };
    let batch = random_batch(&mut rng, &model, &cfg);
    let (_, grad) = batch_loss_and_grad(&model, &batch, &cfg);
    let mut out = GradientCheck::default();
    for table in [ParamKind::Entity, ParamKind::Relation] {
        let (rows, width) = (model.table(table).rows(), model.table(table).width());
        for i in 0..rows {
            for j in 0..width {
                let analytic = grad.get(table, i).map_or(0.0, |g| g[j]);
                let mut plus = model.clone();
                plus.table_mut(table).row_mut(i)[j] += FD_STEP;
                let mut minus = model.clone();
                minus.table_mut(table).row_mut(i)[j] -= FD_STEP;
                let numeric =
                    (batch_loss(&plus, &batch, &cfg) - batch_loss(&minus, &batch, &cfg)) / (2.0 * FD_STEP);
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FD_FLOOR);
                out.coordinates += 1;
                out.max_relative_error = out.max_relative_error.max(rel);
            }
        }
    }
    out
}

/// Runs seeds from 0 upward until at least `min_coordinates` were compared.
pub fn check_gradients(kind: ModelKind, loss: LossKind, lambda: f64, min_coordinates: usize) -> GradientCheck {
    let mut total = GradientCheck::default();
    let mut seed = 0;
    while total.coordinates < min_coordinates {
        total = total.merge(check_gradient(kind, loss, lambda, seed));
        seed += 1;
    }
    total
}
