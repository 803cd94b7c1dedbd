//! Saves a model to the binary checkpoint format and loads it back.

use holex::checkpoint;
use holex::{Model, ModelKind};

fn main() -> holex::Result<()> {
    let model = Model::init(ModelKind::ComplEx, 10, 3, 4, 99)?;
    let path = std::env::temp_dir().join("holex_example.ckpt");
    checkpoint::save(&model, &path)?;
    let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
    let restored = checkpoint::load(&path)?;
    println!("wrote {} ({bytes} bytes)", path.display());
    println!(
        "restored {} model: rank {}, {} entities, {} relations, seed {}",
        restored.kind(),
        restored.rank(),
        restored.n_entities(),
        restored.n_relations(),
        restored.seed()
    );
    assert_eq!(restored, model);
    println!("score(0, 1, 2) = {:.6}", restored.score(0, 1, 2)?);
    std::fs::remove_file(&path).ok();
    Ok(())
}
