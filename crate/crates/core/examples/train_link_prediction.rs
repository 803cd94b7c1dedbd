//! Trains ComplEx with the logistic loss on a planted graph and reports
//! raw and filtered ranking metrics on the test split.

use holex::datasets::{generate_planted_graph, PlantedGraphSpec};
use holex::evaluation::evaluate_ranking;
use holex::training::{train_fresh, TrainingConfig};
use holex::ModelKind;

fn main() -> holex::Result<()> {
    let store = generate_planted_graph(&PlantedGraphSpec {
        n_entities: 300,
        n_relations: 10,
        ..PlantedGraphSpec::default()
    })?;
    println!(
        "{} entities, {} relations, {}/{}/{} train/valid/test triples",
        store.n_entities(),
        store.n_relations(),
        store.train().len(),
        store.valid().len(),
        store.test().len()
    );
    let cfg = TrainingConfig {
        model: ModelKind::ComplEx,
        rank: 20,
        lambda: 0.001,
        max_epochs: 200,
        eval_every: 20,
        batch_size: 256,
        seed: 1,
        ..TrainingConfig::default()
    };
    let outcome = train_fresh(&store, &cfg)?;
    println!(
        "stopped after {} epochs, best epoch {} (validation filtered MRR {:.3})",
        outcome.epochs_run,
        outcome.best_epoch,
        outcome.best_validation.unwrap_or(f64::NAN)
    );
    let report = evaluate_ranking(&outcome.model, &store, store.test())?;
    println!("test MRR raw {:.3}, filtered {:.3}", report.mrr_raw, report.mrr_filtered);
    for (n, h) in &report.hits {
        println!("test Hits@{n} {h:.3}");
    }
    Ok(())
}
