//! Losses, negative sampling, AdaGrad, early-stopped training and grid
//! search.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{Label, LabeledTriple, TripleStore};
use crate::error::{Error, Result};
use crate::evaluation::{ap_report, evaluate_ranking};
use crate::models::{Gradient, Model, ModelKind, ParamKind, ParamTable};

pub const ADAGRAD_EPSILON: f64 = 1e-8;

pub const GRID_RANKS: [usize; 6] = [10, 20, 50, 100, 150, 200];
pub const GRID_LAMBDAS: [f64; 7] = [0.1, 0.03, 0.01, 0.003, 0.001, 0.0003, 0.0];
pub const GRID_GAMMAS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// Pairwise hinge on squashed scores, entity rows kept in the unit ball.
    Margin,
    /// Negative log-likelihood with an L2 penalty.
    Logistic,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Margin => "margin",
            LossKind::Logistic => "logistic",
        })
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "margin" => Ok(LossKind::Margin),
            "logistic" => Ok(LossKind::Logistic),
            other => Err(Error::invalid(format!("unknown loss {other:?}"))),
        }
    }
}

/// Where negative examples come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Negatives {
    /// Fresh corruptions of each positive, drawn per batch.
    Corrupt,
    /// The training split already carries labelled negatives.
    Observed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationMetric {
    FilteredMrr,
    AveragePrecision,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub model: ModelKind,
    pub loss: LossKind,
    pub rank: usize,
    /// L2 weight, logistic loss only.
    pub lambda: f64,
    /// Margin, margin loss only.
    pub gamma: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub negatives_per_positive: usize,
    pub negatives: Negatives,
    pub max_epochs: usize,
    pub eval_every: usize,
    pub patience: usize,
    pub validation: ValidationMetric,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            model: ModelKind::ComplEx,
            loss: LossKind::Logistic,
            rank: 50,
            lambda: 0.0,
            gamma: 0.5,
            learning_rate: 0.5,
            batch_size: 512,
            negatives_per_positive: 1,
            negatives: Negatives::Corrupt,
            max_epochs: 1000,
            eval_every: 50,
            patience: 3,
            validation: ValidationMetric::FilteredMrr,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(m.to_owned()));
        if self.rank == 0 {
            return bad("rank must be positive");
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return bad("learning rate must be positive");
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.eval_every == 0 || self.patience == 0 {
            return bad("batch size, max epochs, eval interval and patience must be positive");
        }
        if self.negatives == Negatives::Corrupt && self.negatives_per_positive == 0 {
            return bad("negatives per positive must be positive");
        }
        if [self.lambda, self.gamma].iter().any(|v| v.is_nan() || *v < 0.0) {
            return bad("lambda and gamma must be nonnegative");
        }
        if self.loss == LossKind::Margin && self.negatives == Negatives::Observed {
            return bad("the margin loss pairs positives with their own corruptions");
        }
        Ok(())
    }

    /// The regularization weight that is actually in effect.
    pub fn active_lambda(&self) -> f64 {
        match self.loss {
            LossKind::Logistic => self.lambda,
            LossKind::Margin => 0.0,
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `max(0, γ + σ(φ_neg) − σ(φ_pos))`.
pub fn margin_loss(score_pos: f64, score_neg: f64, gamma: f64) -> f64 {
    (gamma + sigmoid(score_neg) - sigmoid(score_pos)).max(0.0)
}

/// `log(1 + exp(−y·φ))`.
pub fn logistic_loss(score: f64, y: Label) -> f64 {
    softplus(-y.sign() * score)
}

/// Replaces the subject or the object (each with probability 1/2) by an
/// entity drawn uniformly from all others.
pub fn sample_negative<R: Rng + ?Sized>(
    triple: &LabeledTriple,
    n_entities: usize,
    rng: &mut R,
) -> Result<LabeledTriple> {
    if n_entities < 2 {
        return Err(Error::invalid("corruption needs at least two entities"));
    }
    let corrupt_subject = rng.random_bool(0.5);
    let original = if corrupt_subject { triple.s } else { triple.o };
    let mut replacement = rng.random_range(0..n_entities - 1);
    if replacement >= original {
        replacement += 1;
    }
    let mut out = LabeledTriple::negative(triple.p, triple.s, triple.o);
    if corrupt_subject {
        out.s = replacement;
    } else {
        out.o = replacement;
    }
    Ok(out)
}

/// AdaGrad accumulators laid out like the model's parameter tables.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaGrad {
    entity_acc: ParamTable,
    relation_acc: ParamTable,
    pub epsilon: f64,
}

impl AdaGrad {
    pub fn new(model: &Model) -> Self {
        AdaGrad {
            entity_acc: ParamTable::zeros(model.entities().rows(), model.entities().width()),
            relation_acc: ParamTable::zeros(model.relations().rows(), model.relations().width()),
            epsilon: ADAGRAD_EPSILON,
        }
    }

    pub fn accumulator(&self, kind: ParamKind) -> &ParamTable {
        match kind {
            ParamKind::Entity => &self.entity_acc,
            ParamKind::Relation => &self.relation_acc,
        }
    }

    /// Folds `grad` into the accumulators and returns the per-coordinate
    /// update `−η·g / (√acc + ε)` for the touched rows.
    pub fn step(&mut self, grad: &Gradient, learning_rate: f64) -> Gradient {
        let mut deltas = Gradient::new();
        let mut row_delta = Vec::new();
        for (kind, idx, g) in grad.iter() {
            let acc = match kind {
                ParamKind::Entity => self.entity_acc.row_mut(idx),
                ParamKind::Relation => self.relation_acc.row_mut(idx),
            };
            row_delta.clear();
            for (a, &gi) in acc.iter_mut().zip(g) {
                *a += gi * gi;
                row_delta.push(-learning_rate * gi / (a.sqrt() + self.epsilon));
            }
            deltas.add(kind, idx, 1.0, &row_delta);
        }
        deltas
    }
}

/// Adds sparse `deltas` to the model parameters. Magnitudes below 1e-100 are
/// flushed to zero so products of three coordinates never go subnormal.
pub fn apply_deltas(model: &mut Model, deltas: &Gradient) {
    for (kind, idx, d) in deltas.iter() {
        for (w, dv) in model.table_mut(kind).row_mut(idx).iter_mut().zip(d) {
            *w += dv;
            if w.abs() < 1e-100 {
                *w = 0.0;
            }
        }
    }
}

fn project_row(row: &mut [f64]) {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 {
        row.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Rescales every entity row with Euclidean norm above 1 onto the unit
/// sphere. For ComplEx the norm runs over real and imaginary parts.
pub fn project_unit_norm(model: &mut Model) {
    let table = model.table_mut(ParamKind::Entity);
    for i in 0..table.rows() {
        project_row(table.row_mut(i));
    }
}

fn project_touched(model: &mut Model, touched: &Gradient) {
    let table = model.table_mut(ParamKind::Entity);
    for (kind, idx, _) in touched.iter() {
        if kind == ParamKind::Entity {
            project_row(table.row_mut(idx));
        }
    }
}

/// One minibatch in the shape its loss consumes.
#[derive(Debug, Clone, PartialEq)]
pub enum Batch {
    /// Independently labelled triples for the logistic loss.
    Pointwise(Vec<LabeledTriple>),
    /// `(positive, its corruption)` pairs for the margin loss.
    Pairs(Vec<(LabeledTriple, LabeledTriple)>),
}

impl Batch {
    pub fn len(&self) -> usize {
        match self {
            Batch::Pointwise(v) => v.len(),
            Batch::Pairs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn sq_norm(row: &[f64]) -> f64 {
    row.iter().map(|v| v * v).sum()
}

/// Mean loss over the batch and its gradient.
///
/// Logistic: `(1/B)·Σ [log(1+exp(−y·φ)) + λ(‖r_p‖² + ‖e_s‖² + ‖e_o‖²)]`, so
/// the L2 penalty lands only on rows the batch touches, in proportion to how
/// often they are touched.
///
/// Margin: `(1/B)·Σ max(0, γ + σ(φ_neg) − σ(φ_pos))` over pairs.
pub fn batch_loss_and_grad(model: &Model, batch: &Batch, cfg: &TrainingConfig) -> (f64, Gradient) {
    let mut grad = Gradient::new();
    let mut total = 0.0;
    let n = batch.len().max(1) as f64;
    match batch {
        Batch::Pointwise(triples) => {
            let lambda = cfg.active_lambda();
            for t in triples {
                let y = t.y.sign();
                // d/dφ log(1+exp(−yφ)) = −y·σ(−yφ)
                let score = model.score_then_grad(t.p, t.s, t.o, &mut grad, |score| {
                    -y * sigmoid(-y * score) / n
                });
                total += softplus(-y * score);
                if lambda > 0.0 {
                    let r = model.relations().row(t.p);
                    let es = model.entities().row(t.s);
                    let eo = model.entities().row(t.o);
                    total += lambda * (sq_norm(r) + sq_norm(es) + sq_norm(eo));
                    let w = 2.0 * lambda / n;
                    grad.add(ParamKind::Relation, t.p, w, r);
                    grad.add(ParamKind::Entity, t.s, w, es);
                    grad.add(ParamKind::Entity, t.o, w, eo);
                }
            }
        }
        Batch::Pairs(pairs) => {
            for (pos, neg) in pairs {
                let sp = model.score_unchecked(pos.p, pos.s, pos.o);
                let sn = model.score_unchecked(neg.p, neg.s, neg.o);
                let (gp, gn) = (sigmoid(sp), sigmoid(sn));
                let value = cfg.gamma + gn - gp;
                if value > 0.0 {
                    total += value;
                    model.accumulate_score_grad(gn * (1.0 - gn) / n, neg.p, neg.s, neg.o, &mut grad);
                    model.accumulate_score_grad(-gp * (1.0 - gp) / n, pos.p, pos.s, pos.o, &mut grad);
                }
            }
        }
    }
    (total / n, grad)
}

/// Mean batch loss only.
pub fn batch_loss(model: &Model, batch: &Batch, cfg: &TrainingConfig) -> f64 {
    batch_loss_and_grad(model, batch, cfg).0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub epoch: usize,
    pub mean_batch_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<f64>,
}

/// Newline-delimited JSON, one record per epoch.
pub fn log_to_ndjson(log: &[LogRecord]) -> String {
    let mut out = String::new();
    for rec in log {
        out.push_str(&serde_json::to_string(rec).expect("plain struct"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Parameters at the best validation checkpoint (the last epoch when no
    /// validation ran).
    pub model: Model,
    pub log: Vec<LogRecord>,
    pub best_epoch: usize,
    pub best_validation: Option<f64>,
    pub epochs_run: usize,
}

/// Validation score, higher is better. `None` when the split has nothing to
/// score.
pub fn validation_score(model: &Model, store: &TripleStore, metric: ValidationMetric) -> Option<f64> {
    let valid = store.valid();
    match metric {
        ValidationMetric::FilteredMrr => evaluate_ranking(model, store, valid).ok().map(|r| r.mrr_filtered),
        ValidationMetric::AveragePrecision => ap_report(model, valid).ok().map(|r| r.overall),
    }
}

fn build_batch<R: Rng>(
    chunk: &[LabeledTriple],
    cfg: &TrainingConfig,
    n_entities: usize,
    rng: &mut R,
) -> Result<Batch> {
    Ok(match (cfg.loss, cfg.negatives) {
        (_, Negatives::Observed) => Batch::Pointwise(chunk.to_vec()),
        (LossKind::Logistic, Negatives::Corrupt) => {
            let mut v = Vec::with_capacity(chunk.len() * (1 + cfg.negatives_per_positive));
            for t in chunk {
                v.push(*t);
                for _ in 0..cfg.negatives_per_positive {
                    v.push(sample_negative(t, n_entities, rng)?);
                }
            }
            Batch::Pointwise(v)
        }
        (LossKind::Margin, Negatives::Corrupt) => {
            let mut v = Vec::with_capacity(chunk.len() * cfg.negatives_per_positive);
            for t in chunk {
                for _ in 0..cfg.negatives_per_positive {
                    v.push((*t, sample_negative(t, n_entities, rng)?));
                }
            }
            Batch::Pairs(v)
        }
    })
}

/// AdaGrad training with early stopping on the validation split.
///
/// Training examples are shuffled each epoch and cut into batches; with
/// [`Negatives::Corrupt`] each batch gets fresh corruptions. Every
/// `eval_every` epochs the validation metric is computed, and training stops
/// after `patience` evaluations without improvement.
pub fn train(model: Model, store: &TripleStore, cfg: &TrainingConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if model.n_entities() != store.n_entities() || model.n_relations() != store.n_relations() {
        return Err(Error::invalid(format!(
            "model has {} entities / {} relations, store has {} / {}",
            model.n_entities(),
            model.n_relations(),
            store.n_entities(),
            store.n_relations()
        )));
    }
    let examples: Vec<LabeledTriple> = match cfg.negatives {
        Negatives::Corrupt => store.train().iter().filter(|t| t.y == Label::Positive).copied().collect(),
        Negatives::Observed => store.train().to_vec(),
    };
    if examples.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    if cfg.negatives == Negatives::Corrupt && store.n_entities() < 2 {
        return Err(Error::invalid("corruption needs at least two entities"));
    }

    let mut model = model;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(2);
    let mut optimizer = AdaGrad::new(&model);
    let margin = cfg.loss == LossKind::Margin;
    if margin {
        project_unit_norm(&mut model);
    }

    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut chunk = Vec::with_capacity(cfg.batch_size);
    let mut log = Vec::new();
    let mut best: Option<(f64, usize, Model)> = None;
    let mut stale = 0;
    let mut epochs_run = 0;

    for epoch in 1..=cfg.max_epochs {
        epochs_run = epoch;
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for idx in order.chunks(cfg.batch_size) {
            chunk.clear();
            chunk.extend(idx.iter().map(|&i| examples[i]));
            let batch = build_batch(&chunk, cfg, store.n_entities(), &mut rng)?;
            let (loss, grad) = batch_loss_and_grad(&model, &batch, cfg);
            let deltas = optimizer.step(&grad, cfg.learning_rate);
            apply_deltas(&mut model, &deltas);
            if margin {
                project_touched(&mut model, &deltas);
            }
            loss_sum += loss;
            batches += 1;
        }

        let mut record = LogRecord {
            epoch,
            mean_batch_loss: loss_sum / batches as f64,
            validation: None,
        };
        if epoch % cfg.eval_every == 0 {
            if let Some(score) = validation_score(&model, store, cfg.validation) {
                record.validation = Some(score);
                let improved = best.as_ref().is_none_or(|(b, _, _)| score > *b);
                if improved {
                    best = Some((score, epoch, model.clone()));
                    stale = 0;
                } else {
                    stale += 1;
                }
            }
        }
        log.push(record);
        if stale >= cfg.patience {
            break;
        }
    }

    Ok(match best {
        Some((score, epoch, best_model)) => TrainOutcome {
            model: best_model,
            log,
            best_epoch: epoch,
            best_validation: Some(score),
            epochs_run,
        },
        None => TrainOutcome {
            model,
            log,
            best_epoch: epochs_run,
            best_validation: None,
            epochs_run,
        },
    })
}

/// Initializes a model from `cfg` and trains it on `store`.
pub fn train_fresh(store: &TripleStore, cfg: &TrainingConfig) -> Result<TrainOutcome> {
    let model = Model::init(cfg.model, store.n_entities(), store.n_relations(), cfg.rank, cfg.seed)?;
    train(model, store, cfg)
}

/// Hyperparameter grid. `penalties` holds λ values for the logistic loss and
/// γ values for the margin loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub ranks: Vec<usize>,
    pub penalties: Vec<f64>,
}

impl Grid {
    pub fn for_loss(loss: LossKind) -> Self {
        Grid {
            ranks: GRID_RANKS.to_vec(),
            penalties: match loss {
                LossKind::Logistic => GRID_LAMBDAS.to_vec(),
                LossKind::Margin => GRID_GAMMAS.to_vec(),
            },
        }
    }

    /// Configurations in rank-major order, each with its own seed derived
    /// from the base seed and its index.
    pub fn configs(&self, base: &TrainingConfig) -> Vec<TrainingConfig> {
        let mut out = Vec::with_capacity(self.ranks.len() * self.penalties.len());
        for &rank in &self.ranks {
            for &pen in &self.penalties {
                let mut cfg = TrainingConfig { rank, ..*base };
                match base.loss {
                    LossKind::Logistic => cfg.lambda = pen,
                    LossKind::Margin => cfg.gamma = pen,
                }
                cfg.seed = derive_seed(base.seed, out.len() as u64);
                out.push(cfg);
            }
        }
        out
    }
}

/// SplitMix64 mix of a base seed and a stream index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15_u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub config: TrainingConfig,
    pub validation: Option<f64>,
    pub best_epoch: usize,
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub entries: Vec<GridEntry>,
    pub best_index: usize,
    pub best: TrainOutcome,
}

/// Trains every configuration of `grid` (in parallel) and keeps the one with
/// the highest validation score; ties go to the earlier configuration.
pub fn grid_search(store: &TripleStore, base: &TrainingConfig, grid: &Grid) -> Result<GridOutcome> {
    if store.valid().is_empty() {
        return Err(Error::invalid("grid search needs a validation split"));
    }
    let configs = grid.configs(base);
    if configs.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    let runs: Vec<TrainOutcome> = configs
        .par_iter()
        .map(|cfg| train_fresh(store, cfg))
        .collect::<Result<_>>()?;

    let mut best_index = 0;
    for (i, run) in runs.iter().enumerate() {
        let score = run.best_validation.unwrap_or(f64::NEG_INFINITY);
        let current = runs[best_index].best_validation.unwrap_or(f64::NEG_INFINITY);
        if score > current {
            best_index = i;
        }
    }
    let entries = configs
        .iter()
        .zip(&runs)
        .map(|(cfg, run)| GridEntry {
            config: *cfg,
            validation: run.best_validation,
            best_epoch: run.best_epoch,
        })
        .collect();
    let best = runs.into_iter().nth(best_index).expect("index in range");
    Ok(GridOutcome {
        entries,
        best_index,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::Vocab;

    #[test]
    fn margin_examples() {
        assert!((margin_loss(0.0, 0.0, 0.5) - 0.5).abs() < 1e-15);
        assert_eq!(margin_loss(10.0, -10.0, 0.5), 0.0);
        assert!((margin_loss(4f64.ln(), 1.5f64.ln(), 0.5) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn logistic_examples() {
        assert!((logistic_loss(0.0, Label::Positive) - 2f64.ln()).abs() < 1e-15);
        assert!(logistic_loss(800.0, Label::Positive) < 1e-300);
        assert!((logistic_loss(2.0, Label::Negative) - (1.0 + 2f64.exp()).ln()).abs() < 1e-12);
        assert!((logistic_loss(-800.0, Label::Positive) - 800.0).abs() < 1e-9);
    }

    #[test]
    fn negative_sampling_forced_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = LabeledTriple::positive(3, 0, 1);
        for _ in 0..50 {
            let n = sample_negative(&t, 2, &mut rng).unwrap();
            assert_eq!(n.y, Label::Negative);
            assert!(n == LabeledTriple::negative(3, 1, 1) || n == LabeledTriple::negative(3, 0, 0));
        }
        assert!(sample_negative(&t, 1, &mut rng).is_err());
    }

    #[test]
    fn negative_sampling_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = LabeledTriple::positive(0, 4, 7);
        let mut subject_counts = [0usize; 11];
        let mut object_counts = [0usize; 11];
        let draws = 10_000;
        for _ in 0..draws {
            let n = sample_negative(&t, 11, &mut rng).unwrap();
            assert_eq!(n.y, Label::Negative);
            if n.s != t.s {
                assert_eq!(n.o, t.o);
                subject_counts[n.s] += 1;
            } else {
                assert_ne!(n.o, t.o);
                object_counts[n.o] += 1;
            }
        }
        let subject_total: usize = subject_counts.iter().sum();
        assert!((subject_total as f64 / draws as f64 - 0.5).abs() < 0.03);
        for (counts, original) in [(subject_counts, t.s), (object_counts, t.o)] {
            let total: usize = counts.iter().sum();
            assert_eq!(counts[original], 0);
            for (e, &c) in counts.iter().enumerate().filter(|&(e, _)| e != original) {
                let f = c as f64 / total as f64;
                assert!((f - 0.1).abs() <= 0.02, "entity {e}: {f}");
            }
        }
    }

    #[test]
    fn adagrad_first_step_and_shrinkage() {
        let model = Model::init(ModelKind::HolE, 1, 1, 1, 0).unwrap();
        let mut opt = AdaGrad::new(&model);
        let mut g = Gradient::new();
        g.add(ParamKind::Entity, 0, 1.0, &[2.0]);
        let d = opt.step(&g, 0.1);
        let expected = -0.1 * 2.0 / (2.0 + 1e-8);
        assert!((d.get(ParamKind::Entity, 0).unwrap()[0] - expected).abs() < 1e-15);

        let mut opt = AdaGrad::new(&model);
        let mut g = Gradient::new();
        g.add(ParamKind::Relation, 0, 1.0, &[1.0]);
        for t in 1..=16 {
            let d = opt.step(&g, 1.0).get(ParamKind::Relation, 0).unwrap()[0];
            let want = -1.0 / ((t as f64).sqrt() + 1e-8);
            assert!((d - want).abs() < 1e-12);
            assert_eq!(opt.accumulator(ParamKind::Relation).row(0)[0], t as f64);
        }
    }

    #[test]
    fn adagrad_zero_gradient_is_noop() {
        let model = Model::init(ModelKind::HolE, 1, 1, 2, 0).unwrap();
        let mut opt = AdaGrad::new(&model);
        let mut g = Gradient::new();
        g.add(ParamKind::Entity, 0, 1.0, &[0.0, 0.0]);
        let d = opt.step(&g, 0.5);
        assert_eq!(d.get(ParamKind::Entity, 0).unwrap(), &[0.0, 0.0]);
        assert_eq!(opt.accumulator(ParamKind::Entity).row(0), &[0.0, 0.0]);
    }

    #[test]
    fn projection_examples() {
        let mut m: Model = crate::models::HolEModel::from_rows(
            &[vec![3.0, 4.0], vec![0.3, 0.4], vec![0.0, 0.0]],
            &[vec![5.0, 5.0]],
        )
        .unwrap()
        .into();
        project_unit_norm(&mut m);
        let e = m.entities();
        assert!((e.row(0)[0] - 0.6).abs() < 1e-15 && (e.row(0)[1] - 0.8).abs() < 1e-15);
        assert_eq!(e.row(1), &[0.3, 0.4]);
        assert_eq!(e.row(2), &[0.0, 0.0]);
        assert_eq!(m.relations().row(0), &[5.0, 5.0]);
    }

    #[test]
    fn config_validation() {
        assert!(TrainingConfig::default().validate().is_ok());
        assert!(TrainingConfig { learning_rate: 0.0, ..Default::default() }.validate().is_err());
        assert!(TrainingConfig { batch_size: 0, ..Default::default() }.validate().is_err());
        assert!(TrainingConfig {
            loss: LossKind::Margin,
            negatives: Negatives::Observed,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    fn single_triple_store() -> TripleStore {
        TripleStore::new(
            Vocab::from_names(["a", "b", "c"].map(String::from)),
            Vocab::from_names(["r".to_owned()]),
            vec![LabeledTriple::positive(0, 0, 1)],
            vec![],
            vec![],
        )
        .unwrap()
        .0
    }

    #[test]
    fn empty_training_set_is_rejected() {
        let store = TripleStore::new(
            Vocab::from_names(["a", "b"].map(String::from)),
            Vocab::from_names(["r".to_owned()]),
            vec![],
            vec![],
            vec![],
        )
        .unwrap()
        .0;
        assert!(train_fresh(&store, &TrainingConfig { rank: 2, ..Default::default() }).is_err());
    }

    #[test]
    fn memorizes_a_single_triple() {
        let store = single_triple_store();
        let cfg = TrainingConfig {
            rank: 4,
            max_epochs: 200,
            ..Default::default()
        };
        let out = train_fresh(&store, &cfg).unwrap();
        let score = out.model.score(0, 0, 1).unwrap();
        assert!(logistic_loss(score, Label::Positive) < 2f64.ln());
        assert_eq!(out.log.len(), 200);
    }

    #[test]
    fn grid_sizes() {
        let base = TrainingConfig::default();
        assert_eq!(Grid::for_loss(LossKind::Logistic).configs(&base).len(), 42);
        let margin = TrainingConfig { loss: LossKind::Margin, ..base };
        let cfgs = Grid::for_loss(LossKind::Margin).configs(&margin);
        assert_eq!(cfgs.len(), 60);
        assert!(cfgs.iter().all(|c| c.loss == LossKind::Margin));
        assert_eq!(cfgs[11].rank, 20);
        assert!((cfgs[11].gamma - 0.2).abs() < 1e-15);
    }
}
