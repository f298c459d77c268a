//! How many twisted forms of `μ_n ⊂ SL₂` exist over `O_K`.

use quadklein::klein;
use quadklein::{make_field, Result};

fn main() -> Result<()> {
    for (d, n) in [(-1, 3), (10, 3), (10, 2), (-5, 4), (-23, 5)] {
        let k = make_field(d)?;
        let r = klein::klein_report(&k, n)?;
        println!(
            "{k}, n = {n}: h = {}, h1 = {}, singleton {}, at least {} forms, exact {:?}",
            r.h, r.h1, r.singleton, r.lower_bound, r.exact_count
        );
        for c in &r.zariski_classes {
            println!("  Zariski class {c}");
        }
    }
    Ok(())
}
