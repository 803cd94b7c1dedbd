//! Converts a random HolE model into a ComplEx model of about half the rank
//! and compares the two scores on every triple.

use holex::models::{converted_rank, equivalence_factor, hole_to_complex, HolEModel};

fn main() -> holex::Result<()> {
    for k in [5, 8] {
        let hole = HolEModel::init(4, 2, k, 17)?;
        let complex = hole_to_complex(&hole)?;
        assert_eq!(complex.rank(), converted_rank(k));
        let mut worst = 0.0_f64;
        for p in 0..2 {
            for s in 0..4 {
                for o in 0..4 {
                    let h = hole.score(p, s, o);
                    let c = equivalence_factor(k) * complex.score(p, s, o);
                    worst = worst.max((h - c).abs());
                }
            }
        }
        println!(
            "K={k}: ComplEx rank {}, factor 2/K = {:.4}, max |φ_hole − (2/K)·φ_complex| = {worst:.2e}",
            complex.rank(),
            equivalence_factor(k)
        );
    }
    Ok(())
}
