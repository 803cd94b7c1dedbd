//! Experiment drivers behind the `holex` binary: training runs, the
//! equivalence check, the symmetric/antisymmetric rank sweep, grid search
//! and scoring benchmarks. Every driver returns a serializable report that
//! embeds a [`RunManifest`]; the file-writing helpers put reports, logs,
//! checkpoints and CSV curves into an output directory.

use std::fmt::Write as _;
use std::fs;
use std::hint::black_box;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checkpoint;
use crate::datasets::{cv_rotate, load_tsv, LoadReport, SyntheticSpec, TripleStore};
use crate::datasets::{ANTISYMMETRIC_RELATION, SYMMETRIC_RELATION};
use crate::error::{Error, Result};
use crate::evaluation::{ap_report, evaluate_ranking, RankingReport, TripleRanks};
use crate::models::{
    converted_rank, equivalence_factor, hole_to_complex, HolEModel, ModelKind,
};
use crate::training::{
    derive_seed, grid_search, log_to_ndjson, train_fresh, Grid, LossKind, Negatives,
    TrainingConfig, ValidationMetric, GRID_LAMBDAS,
};

/// Largest relative discrepancy accepted by [`check_equivalence`].
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

/// Provenance block embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: u64,
    pub code_version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<String>,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn start(command: &str, args: Vec<String>, seed: u64) -> Self {
        RunManifest {
            command: command.to_owned(),
            args,
            seed,
            code_version: env!("CARGO_PKG_VERSION").to_owned(),
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            outputs: Vec::new(),
        }
    }

    fn finish(&mut self, outputs: &[&str]) {
        self.outputs = outputs.iter().map(|s| s.to_string()).collect();
        self.finished_unix_ms = now_ms();
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// `|a − b| / max(|a|, |b|)`, or 0 when both are exactly 0.
pub fn relative_discrepancy(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Parses `1..16` (inclusive), `1,2,3,5` or a mix such as `1..3,8`.
pub fn parse_rank_list(spec: &str) -> Result<Vec<usize>> {
    let num = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("bad rank {v:?} in {spec:?}")))
    };
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
                if lo > hi {
                    return Err(Error::invalid(format!("empty range {part:?}")));
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err(Error::invalid(format!("rank list {spec:?} is empty or contains 0")));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// train

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingSummary {
    pub mrr_raw: f64,
    pub mrr_filtered: f64,
    pub hits: std::collections::BTreeMap<usize, f64>,
}

impl From<&RankingReport> for RankingSummary {
    fn from(r: &RankingReport) -> Self {
        RankingSummary {
            mrr_raw: r.mrr_raw,
            mrr_filtered: r.mrr_filtered,
            hits: r.hits.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub manifest: RunManifest,
    pub config: TrainingConfig,
    pub dataset: LoadReport,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_validation: Option<f64>,
    pub final_train_loss: f64,
    pub test: Option<RankingSummary>,
    pub test_ranks: Vec<TripleRanks>,
}

pub struct DatasetPaths {
    pub train: PathBuf,
    pub valid: PathBuf,
    pub test: PathBuf,
}

impl DatasetPaths {
    pub fn load(&self) -> Result<(TripleStore, LoadReport)> {
        load_tsv(&self.train, &self.valid, &self.test)
    }
}

/// Trains on the given files, evaluates the best checkpoint on the test
/// split and writes `model.ckpt`, `train_log.ndjson` and `report.json`.
pub fn run_train(
    paths: &DatasetPaths,
    config: &TrainingConfig,
    out_dir: &Path,
    mut manifest: RunManifest,
) -> Result<TrainReport> {
    let (store, dataset) = paths.load()?;
    ensure_dir(out_dir)?;
    let outcome = train_fresh(&store, config)?;
    let test_eval = if store.test().is_empty() {
        None
    } else {
        Some(evaluate_ranking(&outcome.model, &store, store.test())?)
    };
    checkpoint::save(&outcome.model, out_dir.join("model.ckpt"))?;
    write_text(&out_dir.join("train_log.ndjson"), &log_to_ndjson(&outcome.log))?;
    manifest.finish(&["model.ckpt", "train_log.ndjson", "report.json"]);
    let report = TrainReport {
        manifest,
        config: *config,
        dataset,
        epochs_run: outcome.epochs_run,
        best_epoch: outcome.best_epoch,
        best_validation: outcome.best_validation,
        final_train_loss: outcome.log.last().map_or(f64::NAN, |r| r.mean_batch_loss),
        test: test_eval.as_ref().map(RankingSummary::from),
        test_ranks: test_eval.map(|r| r.ranks).unwrap_or_default(),
    };
    write_text(&out_dir.join("report.json"), &to_json(&report)?)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// check-equivalence

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSettings {
    pub k_min: usize,
    pub k_max: usize,
    pub trials: usize,
    pub triples_per_trial: usize,
    pub n_entities: usize,
    pub n_relations: usize,
    pub seed: u64,
    /// Perturbs every converted model before scoring. Negative control.
    pub corrupt_conversion: bool,
}

impl Default for EquivalenceSettings {
    fn default() -> Self {
        EquivalenceSettings {
            k_min: 1,
            k_max: 16,
            trials: 100,
            triples_per_trial: 100,
            n_entities: 10,
            n_relations: 3,
            seed: 0,
            corrupt_conversion: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub k: usize,
    pub converted_rank: usize,
    /// Max relative gap between `φ_hole` and `(2/K)·φ_complex`.
    pub max_conversion_discrepancy: f64,
    /// Max relative gap between the correlation and Fourier forms of `φ_hole`.
    pub max_fourier_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub manifest: RunManifest,
    pub settings: EquivalenceSettings,
    pub tolerance: f64,
    pub rows: Vec<EquivalenceRow>,
    pub max_conversion_discrepancy: f64,
    pub max_fourier_discrepancy: f64,
    pub pass: bool,
}

/// For every rank in range, converts random HolE models to ComplEx and
/// compares scores on random triples.
pub fn check_equivalence(
    settings: &EquivalenceSettings,
    mut manifest: RunManifest,
) -> Result<EquivalenceReport> {
    if settings.k_min == 0 || settings.k_min > settings.k_max {
        return Err(Error::invalid(format!(
            "bad rank range {}..{}",
            settings.k_min, settings.k_max
        )));
    }
    if settings.trials == 0 || settings.triples_per_trial == 0 {
        return Err(Error::invalid("trials and triples per trial must be positive"));
    }
    let rows = (settings.k_min..=settings.k_max)
        .into_par_iter()
        .map(|k| equivalence_row(settings, k))
        .collect::<Result<Vec<_>>>()?;
    let max_conv = rows.iter().map(|r| r.max_conversion_discrepancy).fold(0.0, f64::max);
    let max_four = rows.iter().map(|r| r.max_fourier_discrepancy).fold(0.0, f64::max);
    manifest.finish(&["equivalence_report.json"]);
    Ok(EquivalenceReport {
        manifest,
        settings: settings.clone(),
        tolerance: EQUIVALENCE_TOLERANCE,
        rows,
        max_conversion_discrepancy: max_conv,
        max_fourier_discrepancy: max_four,
        pass: max_conv <= EQUIVALENCE_TOLERANCE && max_four <= EQUIVALENCE_TOLERANCE,
    })
}

fn equivalence_row(settings: &EquivalenceSettings, k: usize) -> Result<EquivalenceRow> {
    let mut max_conv = 0.0_f64;
    let mut max_four = 0.0_f64;
    let factor = equivalence_factor(k);
    for trial in 0..settings.trials {
        let seed = derive_seed(settings.seed, (k as u64) << 32 | trial as u64);
        let hole = HolEModel::init(settings.n_entities, settings.n_relations, k, seed)?;
        let mut complex = hole_to_complex(&hole)?;
        if settings.corrupt_conversion {
            let row = complex.entities.row_mut(0);
            row[0] += 1e-3;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..settings.triples_per_trial {
            let p = rng.random_range(0..settings.n_relations);
            let s = rng.random_range(0..settings.n_entities);
            let o = rng.random_range(0..settings.n_entities);
            let direct = hole.score_direct(p, s, o);
            max_conv = max_conv.max(relative_discrepancy(direct, factor * complex.score(p, s, o)));
            max_four = max_four.max(relative_discrepancy(direct, hole.score_fourier(p, s, o)));
        }
    }
    Ok(EquivalenceRow {
        k,
        converted_rank: converted_rank(k),
        max_conversion_discrepancy: max_conv,
        max_fourier_discrepancy: max_four,
    })
}

// ---------------------------------------------------------------------------
// synth

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSettings {
    pub models: Vec<ModelKind>,
    pub ranks: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub n: usize,
    pub folds: usize,
    pub seed: u64,
    /// Loss is forced to logistic with observed negatives and AP validation.
    pub base: TrainingConfig,
    /// AP level for the rank comparison.
    pub ap_threshold: f64,
    /// ComplEx's rank at the threshold must be at most this fraction of
    /// HolE's.
    pub max_rank_ratio: f64,
}

impl Default for SynthSettings {
    fn default() -> Self {
        SynthSettings {
            models: vec![ModelKind::HolE, ModelKind::ComplEx],
            ranks: (1..=50).collect(),
            lambdas: GRID_LAMBDAS.to_vec(),
            n: 50,
            folds: 5,
            seed: 0,
            base: TrainingConfig::default(),
            ap_threshold: 0.99,
            max_rank_ratio: 0.6,
        }
    }
}

impl SynthSettings {
    fn training_config(&self, model: ModelKind, rank: usize, lambda: f64, seed: u64) -> TrainingConfig {
        TrainingConfig {
            model,
            rank,
            lambda,
            loss: LossKind::Logistic,
            negatives: Negatives::Observed,
            validation: ValidationMetric::AveragePrecision,
            seed,
            ..self.base
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub lambda: f64,
    pub validation_ap: f64,
    pub symmetric: f64,
    pub antisymmetric: f64,
    pub overall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthRow {
    pub model: ModelKind,
    pub rank: usize,
    /// Test AP averaged over folds.
    pub symmetric: f64,
    pub antisymmetric: f64,
    pub overall: f64,
    pub folds: Vec<FoldResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSummary {
    pub complex_min_rank_at_threshold: Option<usize>,
    pub hole_min_rank_at_threshold: Option<usize>,
    /// ComplEx rank at threshold over HolE rank at threshold.
    pub rank_ratio: Option<f64>,
    pub rank_ratio_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthReport {
    pub manifest: RunManifest,
    pub settings: SynthSettings,
    pub rows: Vec<SynthRow>,
    pub summary: SynthSummary,
}

impl SynthReport {
    pub fn row(&self, model: ModelKind, rank: usize) -> Option<&SynthRow> {
        self.rows.iter().find(|r| r.model == model && r.rank == rank)
    }

    /// One curve as CSV: `model,rank,ap`, where `panel` is `symmetric`,
    /// `antisymmetric` or `overall`.
    pub fn curve_csv(&self, panel: &str) -> Result<String> {
        let mut out = String::from("model,rank,ap\n");
        for r in &self.rows {
            let v = match panel {
                "symmetric" => r.symmetric,
                "antisymmetric" => r.antisymmetric,
                "overall" => r.overall,
                other => return Err(Error::invalid(format!("unknown panel {other:?}"))),
            };
            let _ = writeln!(out, "{},{},{v}", r.model, r.rank);
        }
        Ok(out)
    }
}

fn min_rank_reaching(rows: &[SynthRow], model: ModelKind, threshold: f64) -> Option<usize> {
    rows.iter()
        .filter(|r| r.model == model && r.overall >= threshold)
        .map(|r| r.rank)
        .min()
}

/// Cross-validated AP for every model and rank. Within each fold, λ is picked
/// by validation AP; the row reports test AP averaged over folds.
pub fn run_synth(settings: &SynthSettings, mut manifest: RunManifest) -> Result<SynthReport> {
    if settings.ranks.is_empty() || settings.models.is_empty() || settings.lambdas.is_empty() {
        return Err(Error::invalid("synthetic sweep needs models, ranks and lambdas"));
    }
    let stores = cv_rotate(&SyntheticSpec {
        n: settings.n,
        seed: settings.seed,
        folds: settings.folds,
        valid_fold: 1 % settings.folds.max(1),
        test_fold: 0,
    })?;

    struct Unit {
        model: ModelKind,
        rank: usize,
        fold: usize,
        lambda: f64,
        seed: u64,
    }
    let mut units = Vec::new();
    for &model in &settings.models {
        for &rank in &settings.ranks {
            for fold in 0..stores.len() {
                for (li, &lambda) in settings.lambdas.iter().enumerate() {
                    let tag = (model == ModelKind::ComplEx) as u64;
                    let key = tag << 48 | (rank as u64) << 24 | (fold as u64) << 8 | li as u64;
                    units.push(Unit {
                        model,
                        rank,
                        fold,
                        lambda,
                        seed: derive_seed(settings.seed, key),
                    });
                }
            }
        }
    }

    let results: Vec<FoldResult> = units
        .par_iter()
        .map(|u| {
            let store = &stores[u.fold];
            let cfg = settings.training_config(u.model, u.rank, u.lambda, u.seed);
            let outcome = train_fresh(store, &cfg)?;
            let test = ap_report(&outcome.model, store.test())?;
            Ok(FoldResult {
                fold: u.fold,
                lambda: u.lambda,
                validation_ap: outcome.best_validation.unwrap_or(f64::NEG_INFINITY),
                symmetric: test.per_relation.get(&SYMMETRIC_RELATION).copied().unwrap_or(f64::NAN),
                antisymmetric: test
                    .per_relation
                    .get(&ANTISYMMETRIC_RELATION)
                    .copied()
                    .unwrap_or(f64::NAN),
                overall: test.overall,
            })
        })
        .collect::<Result<_>>()?;

    let per_fold = settings.lambdas.len();
    let per_row = per_fold * stores.len();
    let mut rows = Vec::new();
    let mut chunks = results.chunks(per_row);
    for &model in &settings.models {
        for &rank in &settings.ranks {
            let chunk = chunks.next().expect("one chunk per row");
            let folds: Vec<FoldResult> = chunk
                .chunks(per_fold)
                .map(|candidates| {
                    let mut best = &candidates[0];
                    for c in candidates {
                        if c.validation_ap > best.validation_ap {
                            best = c;
                        }
                    }
                    best.clone()
                })
                .collect();
            let mean = |f: fn(&FoldResult) -> f64| folds.iter().map(f).sum::<f64>() / folds.len() as f64;
            rows.push(SynthRow {
                model,
                rank,
                symmetric: mean(|f| f.symmetric),
                antisymmetric: mean(|f| f.antisymmetric),
                overall: mean(|f| f.overall),
                folds,
            });
        }
    }

    let complex_min = min_rank_reaching(&rows, ModelKind::ComplEx, settings.ap_threshold);
    let hole_min = min_rank_reaching(&rows, ModelKind::HolE, settings.ap_threshold);
    let rank_ratio = match (complex_min, hole_min) {
        (Some(c), Some(h)) => Some(c as f64 / h as f64),
        _ => None,
    };
    manifest.finish(&[
        "synth_report.json",
        "ap_symmetric.csv",
        "ap_antisymmetric.csv",
        "ap_overall.csv",
    ]);
    Ok(SynthReport {
        manifest,
        settings: settings.clone(),
        summary: SynthSummary {
            complex_min_rank_at_threshold: complex_min,
            hole_min_rank_at_threshold: hole_min,
            rank_ratio,
            rank_ratio_pass: rank_ratio.is_some_and(|r| r <= settings.max_rank_ratio),
        },
        rows,
    })
}

pub fn write_synth_outputs(report: &SynthReport, out_dir: &Path) -> Result<()> {
    ensure_dir(out_dir)?;
    for panel in ["symmetric", "antisymmetric", "overall"] {
        write_text(&out_dir.join(format!("ap_{panel}.csv")), &report.curve_csv(panel)?)?;
    }
    write_text(&out_dir.join("synth_report.json"), &to_json(report)?)
}

// ---------------------------------------------------------------------------
// grid

/// Parses `k=10,20;lambda=0.01,0` (or `gamma=...`). Missing keys fall back to
/// the full grid of the loss.
pub fn parse_grid_override(spec: &str, loss: LossKind) -> Result<Grid> {
    let mut grid = Grid::for_loss(loss);
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, values) = part
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("grid override {part:?} lacks '='")))?;
        let list = values.split(',').map(str::trim).filter(|v| !v.is_empty());
        match (key.trim(), loss) {
            ("k" | "rank", _) => {
                grid.ranks = list
                    .map(|v| v.parse().map_err(|_| Error::invalid(format!("bad rank {v:?}"))))
                    .collect::<Result<_>>()?;
            }
            ("lambda", LossKind::Logistic) | ("gamma", LossKind::Margin) => {
                grid.penalties = list
                    .map(|v| v.parse().map_err(|_| Error::invalid(format!("bad value {v:?}"))))
                    .collect::<Result<_>>()?;
            }
            (other, _) => {
                return Err(Error::invalid(format!(
                    "grid key {other:?} does not apply to the {loss} loss"
                )))
            }
        }
    }
    if grid.ranks.is_empty() || grid.penalties.is_empty() || grid.ranks.contains(&0) {
        return Err(Error::invalid("grid override leaves an empty or zero-rank axis"));
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub rank: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub validation_mrr: Option<f64>,
    pub best_epoch: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub manifest: RunManifest,
    pub base: TrainingConfig,
    pub grid: Grid,
    pub dataset: LoadReport,
    pub rows: Vec<GridRow>,
    pub best_index: usize,
    pub winner: TrainingConfig,
    pub winner_test: Option<RankingSummary>,
}

impl GridReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,lambda,gamma,validation_mrr,best_epoch\n");
        for r in &self.rows {
            let v = r.validation_mrr.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{v},{}", r.rank, r.lambda, r.gamma, r.best_epoch);
        }
        out
    }
}

/// Grid search on the given files; writes `grid_report.json`, `grid.csv` and
/// the winner's checkpoint.
pub fn run_grid(
    paths: &DatasetPaths,
    base: &TrainingConfig,
    grid: &Grid,
    out_dir: &Path,
    mut manifest: RunManifest,
) -> Result<GridReport> {
    let (store, dataset) = paths.load()?;
    ensure_dir(out_dir)?;
    let outcome = grid_search(&store, base, grid)?;
    let winner_test = if store.test().is_empty() {
        None
    } else {
        Some(RankingSummary::from(&evaluate_ranking(&outcome.best.model, &store, store.test())?))
    };
    checkpoint::save(&outcome.best.model, out_dir.join("winner.ckpt"))?;
    manifest.finish(&["grid_report.json", "grid.csv", "winner.ckpt"]);
    let rows = outcome
        .entries
        .iter()
        .map(|e| GridRow {
            rank: e.config.rank,
            lambda: e.config.lambda,
            gamma: e.config.gamma,
            validation_mrr: e.validation,
            best_epoch: e.best_epoch,
        })
        .collect();
    let report = GridReport {
        manifest,
        base: *base,
        grid: grid.clone(),
        dataset,
        rows,
        best_index: outcome.best_index,
        winner: outcome.entries[outcome.best_index].config,
        winner_test,
    };
    write_text(&out_dir.join("grid_report.json"), &to_json(&report)?)?;
    write_text(&out_dir.join("grid.csv"), &report.to_csv())?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// bench

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSettings {
    pub ranks: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for BenchSettings {
    fn default() -> Self {
        BenchSettings {
            ranks: (8..=16).map(|b| 1usize << b).collect(),
            samples: 21,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub k: usize,
    pub method: String,
    /// Rank of the model actually scored (`K/2 + 1` for the converted
    /// ComplEx model).
    pub model_rank: usize,
    pub median_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub manifest: RunManifest,
    pub settings: BenchSettings,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log(time) against log(K), per method.
    pub log_log_slopes: std::collections::BTreeMap<String, f64>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,method,model_rank,median_ns\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.k, r.method, r.model_rank, r.median_ns);
        }
        out
    }
}

fn median_ns(samples: usize, mut f: impl FnMut()) -> f64 {
    // Calibrate the number of calls per sample to roughly 200µs.
    let probe = Instant::now();
    f();
    let once = probe.elapsed().as_nanos().max(1) as f64;
    let calls = ((200_000.0 / once).ceil() as usize).clamp(1, 100_000);
    let mut times: Vec<f64> = (0..samples.max(1))
        .map(|_| {
            let t = Instant::now();
            for _ in 0..calls {
                f();
            }
            t.elapsed().as_nanos() as f64 / calls as f64
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[times.len() / 2]
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Times Fourier-path HolE scoring against scoring the equivalent converted
/// ComplEx model. Informational only.
pub fn run_bench(settings: &BenchSettings, mut manifest: RunManifest) -> Result<BenchReport> {
    if settings.ranks.is_empty() || settings.ranks.contains(&0) {
        return Err(Error::invalid("bench needs positive ranks"));
    }
    let mut rows = Vec::new();
    for &k in &settings.ranks {
        let hole = HolEModel::init(4, 1, k, derive_seed(settings.seed, k as u64))?;
        let complex = hole_to_complex(&hole)?;
        rows.push(BenchRow {
            k,
            method: "hole_fourier".into(),
            model_rank: k,
            median_ns: median_ns(settings.samples, || {
                black_box(hole.score_fourier(black_box(0), 1, 2));
            }),
        });
        rows.push(BenchRow {
            k,
            method: "complex".into(),
            model_rank: complex.rank(),
            median_ns: median_ns(settings.samples, || {
                black_box(complex.score(black_box(0), 1, 2));
            }),
        });
    }
    let mut log_log_slopes = std::collections::BTreeMap::new();
    if settings.ranks.len() >= 2 {
        for method in ["hole_fourier", "complex"] {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.method == method)
                .map(|r| (r.k as f64, r.median_ns))
                .collect();
            log_log_slopes.insert(method.to_owned(), log_log_slope(&pts));
        }
    }
    manifest.finish(&["bench_report.json", "bench.csv"]);
    Ok(BenchReport {
        manifest,
        settings: settings.clone(),
        rows,
        log_log_slopes,
    })
}

pub fn write_bench_outputs(report: &BenchReport, out_dir: &Path) -> Result<()> {
    ensure_dir(out_dir)?;
    write_text(&out_dir.join("bench.csv"), &report.to_csv())?;
    write_text(&out_dir.join("bench_report.json"), &to_json(report)?)
}

pub fn write_equivalence_report(report: &EquivalenceReport, out_dir: &Path) -> Result<()> {
    ensure_dir(out_dir)?;
    write_text(&out_dir.join("equivalence_report.json"), &to_json(report)?)
}
