//! Binary model checkpoints.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! offset  size  field
//! 0       8     magic "HOLEXCK1"
//! 8       1     kind: 0 = hole, 1 = complex
//! 9       8     rank K (u64)
//! 17      8     entity count N_e (u64)
//! 25      8     relation count N_r (u64)
//! 33      8     seed (u64)
//! 41      ...   entity table, N_e rows of W f64 values, row-major
//! ...     ...   relation table, N_r rows of W f64 values, row-major
//! ```
//!
//! `W = K` for HolE. For ComplEx `W = 2K`: each row holds the `K` real parts
//! followed by the `K` imaginary parts.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::models::{ComplExModel, HolEModel, Model, ModelKind, ParamTable};

pub const MAGIC: &[u8; 8] = b"HOLEXCK1";
const HEADER_LEN: usize = 41;

pub fn encode(model: &Model) -> Vec<u8> {
    let ents = model.entities();
    let rels = model.relations();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * (ents.as_slice().len() + rels.as_slice().len()));
    out.extend_from_slice(MAGIC);
    out.push(match model.kind() {
        ModelKind::HolE => 0,
        ModelKind::ComplEx => 1,
    });
    for v in [model.rank(), ents.rows(), rels.rows()] {
        out.extend_from_slice(&(v as u64).to_le_bytes());
    }
    out.extend_from_slice(&model.seed().to_le_bytes());
    for v in ents.as_slice().iter().chain(rels.as_slice()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn read_u64(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<Model> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(Error::Checkpoint("missing header".into()));
    }
    let kind = match bytes[8] {
        0 => ModelKind::HolE,
        1 => ModelKind::ComplEx,
        other => return Err(Error::Checkpoint(format!("unknown kind tag {other}"))),
    };
    let rank = read_u64(bytes, 9) as usize;
    let n_entities = read_u64(bytes, 17) as usize;
    let n_relations = read_u64(bytes, 25) as usize;
    let seed = read_u64(bytes, 33);
    let width = match kind {
        ModelKind::HolE => rank,
        ModelKind::ComplEx => 2 * rank,
    };
    let expected = n_entities
        .checked_add(n_relations)
        .and_then(|rows| rows.checked_mul(width))
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Checkpoint("dimensions overflow".into()))?;
    if bytes.len() != expected || rank == 0 || n_entities == 0 || n_relations == 0 {
        return Err(Error::Checkpoint(format!(
            "expected {expected} bytes for {kind} K={rank} N_e={n_entities} N_r={n_relations}, found {}",
            bytes.len()
        )));
    }
    let mut values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    let entities = ParamTable::from_vec(n_entities, width, values.by_ref().take(n_entities * width).collect())?;
    let relations = ParamTable::from_vec(n_relations, width, values.collect())?;
    Ok(match kind {
        ModelKind::HolE => Model::HolE(HolEModel {
            entities,
            relations,
            seed,
        }),
        ModelKind::ComplEx => Model::ComplEx(ComplExModel {
            entities,
            relations,
            seed,
        }),
    })
}

pub fn save(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(model)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    decode(&fs::read(path).map_err(|e| Error::io(path, e))?)
}
