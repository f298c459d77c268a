//! Class group and narrow class group as products of cyclic groups,
//! with a discrete logarithm for a few prime ideals.

use quadklein::classfield;
use quadklein::ideal;
use quadklein::{make_field, Result};

fn main() -> Result<()> {
    let d: i64 = std::env::args().nth(1).map_or(-23, |a| a.parse().expect("integer d"));
    let k = make_field(d)?;
    let cl = classfield::class_group(&k)?;
    let narrow = classfield::narrow_class_group(&k)?;
    println!("{k}: h = {} {:?}, narrow h = {} {:?}", cl.order(), cl.cyclic_orders, narrow.order(), narrow.cyclic_orders);
    for (g, m) in cl.generators.iter().zip(&cl.cyclic_orders) {
        println!("  generator {g} of order {m}");
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        for pr in ideal::primes_above(p, &k) {
            let principal = ideal::is_principal(&pr)?;
            println!("  {pr}: class {:?}, generator {:?}", cl.dlog(&pr)?, principal.map(|g| g.to_string()));
        }
    }
    Ok(())
}
