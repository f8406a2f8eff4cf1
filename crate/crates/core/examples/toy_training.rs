//! Train the toy denoiser on the copy task and print its loss curve.
//!
//!     cargo run --release --example toy_training [seed]

use interleaved_cond::io::write_trace;
use interleaved_cond::toy::{train_toy, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let config = TrainConfig { seed, ..TrainConfig::default() };
    let trace = train_toy(&config)?;
    for &(step, loss) in trace.iter().filter(|(s, _)| s % 50 == 0) {
        println!("step {step:>4}  loss {loss:.4}");
    }
    let (first, last) = (trace[0].1, trace[trace.len() - 1].1);
    println!("final/initial = {:.3}", last / first);
    std::fs::write(std::env::temp_dir().join("toy_trace.csv"), write_trace(&trace))?;
    Ok(())
}
