//! Proportion of primes of `K` that split in an unramified quadratic extension.

use num_rational::BigRational;
use quadklein::classfield;
use quadklein::density::{self, PrimeSet};
use quadklein::{make_field, Result};

fn main() -> Result<()> {
    let bound: u64 = std::env::args().nth(1).map_or(20_000, |a| a.parse().expect("integer bound"));
    for d in [-5, -42, 10] {
        let k = make_field(d)?;
        let ext = classfield::unramified_quadratic_extensions(&k)?.remove(0);
        let c = density::splitting_census(&k, &ext, bound)?;
        let q = density::dirichlet_quotient(&k, &ext, &BigRational::from_integer(2.into()), bound, PrimeSet::Split)?;
        println!(
            "{k} in K(√{}): {} split, {} inert, {} ramified of {}; Dirichlet quotient at s = 2 ≈ {:.4}",
            ext.delta,
            c.counts.split,
            c.counts.inert,
            c.counts.ramified,
            c.counts.total(),
            q.to_f64()
        );
    }
    Ok(())
}
