//! Margin loss against logistic loss for both models under the same epoch
//! budget, compared by test filtered MRR.

use holex::datasets::{generate_planted_graph, PlantedGraphSpec};
use holex::evaluation::evaluate_ranking;
use holex::training::{train_fresh, LossKind, TrainingConfig};
use holex::ModelKind;

fn main() -> holex::Result<()> {
    let store = generate_planted_graph(&PlantedGraphSpec {
        n_entities: 300,
        n_relations: 10,
        ..PlantedGraphSpec::default()
    })?;
    for kind in [ModelKind::HolE, ModelKind::ComplEx] {
        for loss in [LossKind::Margin, LossKind::Logistic] {
            let cfg = TrainingConfig {
                model: kind,
                loss,
                rank: 20,
                lambda: 0.001,
                gamma: 0.5,
                max_epochs: 150,
                eval_every: 25,
                batch_size: 256,
                seed: 5,
                ..TrainingConfig::default()
            };
            let outcome = train_fresh(&store, &cfg)?;
            let test = evaluate_ranking(&outcome.model, &store, store.test())?;
            println!("{kind:<8} {loss:<9} filtered MRR {:.3}", test.mrr_filtered);
        }
    }
    Ok(())
}
