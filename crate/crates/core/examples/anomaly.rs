//! The polar element at normal ordering and its sign anomaly.

use starweyl::verify::suite_anomaly;

fn main() -> starweyl::Result<()> {
    let report = suite_anomaly(2, 1.0, 0)?;
    for c in &report.checks {
        println!("{:<26} {:<5} {:.1e}  {}", c.name, c.pass, c.deviation, c.detail);
    }
    Ok(())
}
