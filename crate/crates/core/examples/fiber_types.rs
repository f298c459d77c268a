//! Rational double point types of the quotient `Spec O_K[x, y]^{μ_n}` over
//! the primes of `K`, for a twisted form and for an explicit embedding.

use quadklein::classfield;
use quadklein::embed::{self, ConjugatedEmbedding};
use quadklein::ideal;
use quadklein::invar::{self, FiberPoint, FiberSubject, NormPattern};
use quadklein::{make_field, Result};

fn main() -> Result<()> {
    let k = make_field(-5)?;
    let ext = classfield::unramified_quadratic_extensions(&k)?.remove(0);
    let twist = embed::twist_from_extension(&k, Some(&ext), 3);
    println!("twist by K(√{}) over {k}, n = 3", ext.delta);
    for p in [2u64, 3, 7, 11, 23, 29] {
        for pr in ideal::primes_above(p, &k) {
            let r = invar::fiber_type(FiberSubject::Twist(&twist), FiberPoint::Prime(&pr), 3)?;
            println!("  {pr}: {}", r.rdp);
        }
    }

    let pat = NormPattern { q: 7, d: 6 };
    let kq = pat.field()?;
    let e: ConjugatedEmbedding = pat.embedding(3)?;
    let pres = invar::algebra_generators(&e.rho, 6)?;
    println!("A = {} over {kq}, n = 3", e.a);
    for p in [2u64, 3, 5, 7, 11] {
        for pr in ideal::primes_above(p, &kq) {
            let r = invar::fiber_from_presentation(&pres, &kq, FiberPoint::Prime(&pr))?;
            println!("  {pr}: {} via {:?}, {}", r.rdp, r.generators, r.presentation.unwrap_or_default());
        }
    }
    Ok(())
}
