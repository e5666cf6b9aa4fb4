//! Closed-form exponentials against the truncated exponential series.

use starweyl::verify::{oracle_agreement, suite_oracle};

fn main() -> starweyl::Result<()> {
    for hbar in [1.0, 0.7, 0.3] {
        let a = oracle_agreement(hbar, 7, 10, 8)?;
        println!(
            "hbar {hbar}: crossed {:.1e}, quad normal {:.1e}, quad Weyl {:.1e}",
            a.crossed, a.quad_normal, a.quad_weyl
        );
    }
    let report = suite_oracle(1.0, 7, 5)?;
    println!("oracle suite passes: {}", report.pass);
    Ok(())
}
