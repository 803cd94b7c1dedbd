//! One fold of the symmetric/antisymmetric experiment: average precision
//! per relation for both models at a few ranks.

use holex::datasets::{generate_synthetic, SyntheticSpec, ANTISYMMETRIC_RELATION, SYMMETRIC_RELATION};
use holex::evaluation::ap_report;
use holex::training::{train_fresh, Negatives, TrainingConfig, ValidationMetric};
use holex::ModelKind;

fn main() -> holex::Result<()> {
    let store = generate_synthetic(&SyntheticSpec::default())?;
    println!("model    rank  symmetric  antisymmetric  overall");
    for kind in [ModelKind::HolE, ModelKind::ComplEx] {
        for rank in [2, 5, 10, 20] {
            let cfg = TrainingConfig {
                model: kind,
                rank,
                negatives: Negatives::Observed,
                validation: ValidationMetric::AveragePrecision,
                max_epochs: 500,
                ..TrainingConfig::default()
            };
            let outcome = train_fresh(&store, &cfg)?;
            let ap = ap_report(&outcome.model, store.test())?;
            println!(
                "{kind:<8} {rank:>4}  {:>9.3}  {:>13.3}  {:>7.3}",
                ap.per_relation[&SYMMETRIC_RELATION], ap.per_relation[&ANTISYMMETRIC_RELATION], ap.overall
            );
        }
    }
    Ok(())
}
