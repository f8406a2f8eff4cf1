//! Attribute-conflict task: two reference images, one tagged `subject` and
//! one tagged `style`; the target is the subject image. Trains a masked and an
//! unmasked model per seed and compares held-out error.
//!
//!     cargo run --release --example conflict_ablation [seeds]

use interleaved_cond::toy::{conflict_benchmark, TrainConfig};
use rayon::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let results: Vec<_> = (0..seeds)
        .into_par_iter()
        .map(|seed| conflict_benchmark(&TrainConfig { seed, ..TrainConfig::conflict() }).map(|r| (seed, r)))
        .collect::<Result<_, _>>()?;

    let mut wins = 0;
    for (seed, r) in &results {
        let win = r.masked_mse <= r.unmasked_mse;
        wins += usize::from(win);
        println!("seed {seed}: masked {:.4}  unmasked {:.4}  {}", r.masked_mse, r.unmasked_mse, if win { "masked" } else { "unmasked" });
    }
    println!("masked wins {wins}/{seeds}");
    Ok(())
}
