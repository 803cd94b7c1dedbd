use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use holex::experiments::{self, BenchSettings, DatasetPaths, EquivalenceSettings, RunManifest, SynthSettings};
use holex::training::{Grid, LossKind, Negatives, TrainingConfig, ValidationMetric};
use holex::ModelKind;

#[derive(Parser)]
#[command(name = "holex", version, about = "HolE and ComplEx knowledge-graph embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model, evaluate its best checkpoint on the test split.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Verify that converted HolE models score like their ComplEx images.
    CheckEquivalence {
        /// Rank range, e.g. `1..16`.
        #[arg(long, default_value = "1..16")]
        k: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Random triples scored per trial.
        #[arg(long, default_value_t = 100)]
        triples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Perturb every converted model. Negative control for tests.
        #[arg(long, hide = true)]
        corrupt_conversion: bool,
    },
    /// Symmetric/antisymmetric rank sweep with cross-validated AP.
    Synth {
        /// Ranks to sweep, e.g. `1..50` or `1,2,3,5,8`.
        #[arg(long, default_value = "1..50")]
        ranks: String,
        /// Comma-separated λ candidates validated per fold.
        #[arg(long, value_delimiter = ',', default_values_t = holex::training::GRID_LAMBDAS.to_vec())]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
    /// Grid search over rank and λ (logistic) or γ (margin).
    Grid {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Replace grid axes, e.g. `k=10,20;lambda=0.01`.
        #[arg(long)]
        grid_override: Option<String>,
    },
    /// Time Fourier-path HolE scoring against converted ComplEx scoring.
    Bench {
        #[arg(long, default_value = "256,512,1024,2048,4096,8192,16384,32768,65536")]
        ranks: String,
        #[arg(long, default_value_t = 21)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    valid: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum NegativeSource {
    Corrupt,
    Observed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Validation {
    Mrr,
    Ap,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long, default_value_t = 0.5)]
    lr: f64,
    #[arg(long, default_value_t = 512)]
    batch: usize,
    #[arg(long, default_value_t = 1000)]
    max_epochs: usize,
    #[arg(long, default_value_t = 50)]
    eval_every: usize,
    #[arg(long, default_value_t = 3)]
    patience: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value = "complex")]
    model: ModelKind,
    #[arg(long, default_value = "logistic")]
    loss: LossKind,
    #[arg(long, default_value_t = 50)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Negatives drawn per positive.
    #[arg(long, default_value_t = 1)]
    negatives: usize,
    #[arg(long, value_enum, default_value = "corrupt")]
    negative_source: NegativeSource,
    #[arg(long, value_enum, default_value = "mrr")]
    validation: Validation,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    schedule: ScheduleArgs,
}

impl TrainArgs {
    fn config(&self) -> TrainingConfig {
        TrainingConfig {
            model: self.model,
            loss: self.loss,
            rank: self.k,
            lambda: self.lambda,
            gamma: self.gamma,
            learning_rate: self.schedule.lr,
            batch_size: self.schedule.batch,
            negatives_per_positive: self.negatives,
            negatives: match self.negative_source {
                NegativeSource::Corrupt => Negatives::Corrupt,
                NegativeSource::Observed => Negatives::Observed,
            },
            max_epochs: self.schedule.max_epochs,
            eval_every: self.schedule.eval_every,
            patience: self.schedule.patience,
            validation: match self.validation {
                Validation::Mrr => ValidationMetric::FilteredMrr,
                Validation::Ap => ValidationMetric::AveragePrecision,
            },
            seed: self.seed,
        }
    }
}

impl DataArgs {
    fn paths(&self) -> DatasetPaths {
        DatasetPaths {
            train: self.train.clone(),
            valid: self.valid.clone(),
            test: self.test.clone(),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_owned(), |v| v.to_string())
}

fn run(cli: Cli, args: Vec<String>) -> holex::Result<ExitCode> {
    match cli.command {
        Command::Train { data, train } => {
            let cfg = train.config();
            let report = experiments::run_train(&data.paths(), &cfg, &data.out, RunManifest::start("train", args, cfg.seed))?;
            println!("epochs_run={} best_epoch={}", report.epochs_run, report.best_epoch);
            println!("best_validation={}", opt(report.best_validation));
            println!("final_train_loss={}", report.final_train_loss);
            if let Some(t) = &report.test {
                println!("test_mrr_raw={} test_mrr_filtered={}", t.mrr_raw, t.mrr_filtered);
                for (n, h) in &t.hits {
                    println!("test_hits@{n}={h}");
                }
            }
            println!("report={}", data.out.join("report.json").display());
        }
        Command::CheckEquivalence { k, trials, triples, seed, out, corrupt_conversion } => {
            let ks = experiments::parse_rank_list(&k)?;
            let settings = EquivalenceSettings {
                k_min: ks[0],
                k_max: *ks.last().expect("nonempty"),
                trials,
                triples_per_trial: triples,
                seed,
                corrupt_conversion,
                ..Default::default()
            };
            let report = experiments::check_equivalence(&settings, RunManifest::start("check-equivalence", args, seed))?;
            for r in &report.rows {
                println!(
                    "k={} converted_rank={} conversion={:e} fourier={:e}",
                    r.k, r.converted_rank, r.max_conversion_discrepancy, r.max_fourier_discrepancy
                );
            }
            println!("max_conversion_discrepancy={:e}", report.max_conversion_discrepancy);
            println!("max_fourier_discrepancy={:e}", report.max_fourier_discrepancy);
            println!("result={}", if report.pass { "PASS" } else { "FAIL" });
            if let Some(dir) = out {
                experiments::write_equivalence_report(&report, &dir)?;
            }
            if !report.pass {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Synth { ranks, lambdas, seed, folds, out, schedule } => {
            let settings = SynthSettings {
                ranks: experiments::parse_rank_list(&ranks)?,
                lambdas,
                seed,
                folds,
                base: TrainingConfig {
                    learning_rate: schedule.lr,
                    batch_size: schedule.batch,
                    max_epochs: schedule.max_epochs,
                    eval_every: schedule.eval_every,
                    patience: schedule.patience,
                    ..TrainingConfig::default()
                },
                ..Default::default()
            };
            let report = experiments::run_synth(&settings, RunManifest::start("synth", args, seed))?;
            experiments::write_synth_outputs(&report, &out)?;
            for r in &report.rows {
                println!(
                    "model={} rank={} ap_symmetric={:.4} ap_antisymmetric={:.4} ap_overall={:.4}",
                    r.model, r.rank, r.symmetric, r.antisymmetric, r.overall
                );
            }
            let s = &report.summary;
            let show = |v: Option<usize>| v.map_or_else(|| "none".to_owned(), |v| v.to_string());
            println!("complex_min_rank={}", show(s.complex_min_rank_at_threshold));
            println!("hole_min_rank={}", show(s.hole_min_rank_at_threshold));
            println!("rank_ratio={} pass={}", opt(s.rank_ratio), s.rank_ratio_pass);
        }
        Command::Grid { data, train, grid_override } => {
            let base = train.config();
            let grid = match &grid_override {
                Some(spec) => experiments::parse_grid_override(spec, base.loss)?,
                None => Grid::for_loss(base.loss),
            };
            let report = experiments::run_grid(&data.paths(), &base, &grid, &data.out, RunManifest::start("grid", args, base.seed))?;
            for (i, r) in report.rows.iter().enumerate() {
                let mark = if i == report.best_index { " *" } else { "" };
                println!(
                    "k={} lambda={} gamma={} validation_mrr={}{mark}",
                    r.rank, r.lambda, r.gamma, opt(r.validation_mrr)
                );
            }
            if let Some(t) = &report.winner_test {
                println!("winner_test_mrr_raw={} winner_test_mrr_filtered={}", t.mrr_raw, t.mrr_filtered);
            }
        }
        Command::Bench { ranks, samples, seed, out } => {
            let settings = BenchSettings {
                ranks: experiments::parse_rank_list(&ranks)?,
                samples,
                seed,
            };
            let report = experiments::run_bench(&settings, RunManifest::start("bench", args, seed))?;
            print!("{}", report.to_csv());
            for (method, slope) in &report.log_log_slopes {
                println!("slope_{method}={slope:.3}");
            }
            if let Some(dir) = out {
                experiments::write_bench_outputs(&report, &dir)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(cli, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
