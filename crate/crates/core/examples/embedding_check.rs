//! Integrality and conjugacy of `ρ_A = A·diag(u, u^{n−1})·A⁻¹`, the
//! reduction that explains a failure, and a cover on which `ρ_A` is standard.

use quadklein::embed::{self, ConjugatedEmbedding, Mat2};
use quadklein::{make_field, Result};

fn main() -> Result<()> {
    let k = make_field(10)?;
    let a = Mat2::parse(&k, r#"[[3,"4+s"],["4-s",3]]"#)?;
    let e = ConjugatedEmbedding::new(a.clone(), 3)?;
    println!("A = {a}, det {}", a.det());
    println!("column ideals {} and {}", e.column_ideals.0, e.column_ideals.1);
    match embed::is_conjugate_to_standard(&e)? {
        Some(b) => println!("conjugate to the standard embedding via {b}"),
        None => println!("not conjugate to the standard embedding"),
    }

    match embed::reduce_conjugator(&a) {
        Ok(r) => println!("reduced to {} in {} steps", r.a_reduced, r.steps.len()),
        Err(err) => println!("reduction stops: {err}"),
    }

    for p in embed::zariski_trivialization(&e)? {
        println!("over O_K[1/{}]: conjugator {}", p.s, p.conjugator);
    }

    if let Some(found) = embed::find_nonstandard_embedding(&make_field(-5)?, 3, 3)? {
        println!("non-standard embedding over Q(√−5): A = {}", found.a);
    }
    Ok(())
}
