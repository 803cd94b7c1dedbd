//! Grid search over rank and λ, selecting by validation filtered MRR.

use holex::datasets::{generate_planted_graph, PlantedGraphSpec};
use holex::evaluation::evaluate_ranking;
use holex::training::{grid_search, Grid, TrainingConfig};

fn main() -> holex::Result<()> {
    let store = generate_planted_graph(&PlantedGraphSpec {
        n_entities: 200,
        n_relations: 8,
        ..PlantedGraphSpec::default()
    })?;
    let base = TrainingConfig {
        max_epochs: 100,
        eval_every: 20,
        batch_size: 256,
        seed: 3,
        ..TrainingConfig::default()
    };
    let grid = Grid {
        ranks: vec![5, 10, 20],
        penalties: vec![0.01, 0.001, 0.0],
    };
    let outcome = grid_search(&store, &base, &grid)?;
    for (i, e) in outcome.entries.iter().enumerate() {
        let mark = if i == outcome.best_index { "  <- best" } else { "" };
        println!(
            "K={:<3} λ={:<6} validation MRR {:.3}{mark}",
            e.config.rank,
            e.config.lambda,
            e.validation.unwrap_or(f64::NAN)
        );
    }
    let test = evaluate_ranking(&outcome.best.model, &store, store.test())?;
    println!("winner test filtered MRR {:.3}", test.mrr_filtered);
    Ok(())
}
