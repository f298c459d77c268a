//! Unramified quadratic extensions `K(√δ)` from genus theory.

use quadklein::classfield;
use quadklein::{make_field, Result};

fn main() -> Result<()> {
    for d in [-5, -21, 10, 34, -210] {
        let k = make_field(d)?;
        let exts = classfield::unramified_quadratic_extensions(&k)?;
        let narrow = classfield::narrow_class_group(&k)?;
        println!("{k}: {} extensions, 2-rank of the narrow class group {}", exts.len(), narrow.two_rank());
        for e in &exts {
            let (d1, d2) = e.disc_factor_pair;
            println!("  δ = {} from D = {d1}·{d2}, unramified: {}", e.delta, classfield::ramification_check(e)?);
        }
    }
    Ok(())
}
