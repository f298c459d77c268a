//! Minimal generators of the invariant ring for `A = [[q, s], [−s, q]]`, `s = √(−dq)`.
//!
//! Run with `cargo run --example invariant_generators -- 7 6 3` (arguments `q d n`).

use std::time::Instant;

use quadklein::invar::{self, NormPattern};

fn main() -> quadklein::Result<()> {
    let args: Vec<i64> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let (q, d, n) = match args.as_slice() {
        [q, d, n] => (*q, *d, *n as usize),
        _ => (7, 6, 3),
    };
    let pat = NormPattern { q, d };
    let e = pat.embedding(n)?;
    let t = Instant::now();
    let pres = invar::algebra_generators(&e.rho, 2 * n as u32)?;
    println!("K = Q(sqrt({})), n = {n}, degree bound {}", -d * q, pres.degree_bound_used);
    for g in &pres.generators {
        println!("  {} (degree {}, weight {:?}): {}", g.name, g.degree, g.weight, g.poly);
    }
    println!("computed in {:.2?}", t.elapsed());
    let named = pat.presentation(n)?;
    println!("named generators and the relations they satisfy:");
    for g in &named.generators {
        println!("  {} = {}", g.name, g.poly);
    }
    for r in &named.relations {
        println!("  {r} = 0");
    }
    Ok(())
}
