//! Loss traces as `step,loss` rows, no header.
//!
//! Losses are written with Rust's shortest round-trip float formatting, so
//! reading a trace back gives the identical values.

pub fn write_trace(trace: &[(usize, f64)]) -> String {
    trace.iter().map(|(step, loss)| format!("{step},{loss}\n")).collect()
}

pub fn parse_trace(text: &str) -> Result<Vec<(usize, f64)>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let (step, loss) = l.split_once(',').ok_or_else(|| format!("line {}: expected step,loss", i + 1))?;
            let step = step.trim().parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            let loss = loss.trim().parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            Ok((step, loss))
        })
        .collect()
}
