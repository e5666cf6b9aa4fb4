//! Path-connecting products of polar elements and the Clifford relations.

use starweyl::holonomy::{build_special_k, path_product, verify_clifford, DetourPolicy, SpecialParams, Vertex, WordItem};
use starweyl::{Context, ExpressionParameter};

fn main() -> starweyl::Result<()> {
    let m = 2;
    let ctx = Context::new(m)?;
    let ks = build_special_k(&ctx, &SpecialParams::new(2.0, 1.0, 3.0, m)?)?;

    let sq = path_product(&ctx, &ks, &Vertex::origin(m), &[WordItem::Polar(0), WordItem::Polar(0)], DetourPolicy::Ccw)?;
    let g = sq.value.as_gauss().unwrap();
    println!("eps_1^2 on the origin: amplitude {:.6}, sheet {}", g.amplitude, sq.sheet);

    for (name, k) in [("special", ks), ("normal", ExpressionParameter::normal(m))] {
        let rep = verify_clifford(&ctx, &k)?;
        let s = &rep.summary;
        println!(
            "{name}: {} relation checks, all pass {}, commutation observed {}, square sign {:?}",
            rep.relations.len(),
            rep.relations.iter().all(|r| r.pass),
            s.commutation_observed,
            s.square_sign
        );
        for r in rep.relations.iter().filter(|r| !r.pass).take(3) {
            println!("  {} {:?} at {:?}: deviation {:.3}", r.relation, r.pair, r.vertex, r.deviation);
        }
    }
    Ok(())
}
