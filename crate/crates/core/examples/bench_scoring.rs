//! Median time per score for Fourier-path HolE and the equivalent ComplEx
//! model, with the fitted log-log slopes.

use holex::experiments::{run_bench, BenchSettings, RunManifest};

fn main() -> holex::Result<()> {
    let settings = BenchSettings {
        ranks: (8..=14).map(|b| 1usize << b).collect(),
        samples: 11,
        seed: 0,
    };
    let report = run_bench(&settings, RunManifest::start("bench", Vec::new(), 0))?;
    print!("{}", report.to_csv());
    for (method, slope) in &report.log_log_slopes {
        println!("log-log slope {method}: {slope:.2}");
    }
    Ok(())
}
