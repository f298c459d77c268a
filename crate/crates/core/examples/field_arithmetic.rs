//! Exact arithmetic in `Q(√d)`: norms, traces, inverses and the fundamental unit.
//!
//! `cargo run --example field_arithmetic -- 13`

use quadklein::qfield;
use quadklein::{make_field, Result};

fn main() -> Result<()> {
    let d: i64 = std::env::args().nth(1).map_or(13, |a| a.parse().expect("integer d"));
    let k = make_field(d)?;
    println!("{k}: discriminant {}, Minkowski bound {}", k.disc(), k.minkowski_bound());

    let x = k.parse_element("3+2*s")?;
    let y = k.ints(-1, 4);
    println!("x = {x}, y = {y}");
    println!("x*y = {}, N(x*y) = {} = N(x)N(y) = {}", &x * &y, (&x * &y).norm(), x.norm() * y.norm());
    println!("Tr(x) = {}, conj(x) = {}", x.trace(), x.conj());
    if let Some(xi) = x.inv() {
        println!("1/x = {xi}, integral: {}", xi.is_integral());
    }

    if k.is_real() {
        let u = qfield::fundamental_unit(&k)?;
        println!("fundamental unit {} of norm {}", u.fundamental_unit, u.unit_norm);
    }
    Ok(())
}
