//! Independent oracles in plain `i64` arithmetic.

#![allow(dead_code)]

use num_traits::ToPrimitive;
use quadklein::embed::{self, ConjugatedEmbedding, Mat2};

fn squarefree(n: i64) -> bool {
    let n = n.abs();
    let mut p = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Fundamental discriminants `D ≠ 1` with `|D| ≤ bound`, in increasing `|D|`.
pub fn fundamental_discriminants(bound: i64) -> Vec<i64> {
    let mut out = Vec::new();
    for a in 3..=bound {
        for disc in [-a, a] {
            let ok = if disc.rem_euclid(4) == 1 {
                squarefree(disc)
            } else if disc.rem_euclid(4) == 0 {
                let m = disc / 4;
                matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
            } else {
                false
            };
            if ok {
                out.push(disc);
            }
        }
    }
    out
}

pub fn d_of_disc(disc: i64) -> i64 {
    if disc.rem_euclid(4) == 1 {
        disc
    } else {
        disc / 4
    }
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `(h, h⁺)` from binary quadratic forms of discriminant `disc`.
///
/// Definite: count reduced forms. Indefinite: `h⁺` is the number of cycles
/// of reduced forms under the reduction operator, and `h = h⁺/2` unless the
/// principal cycle contains a form with `a = −1` (a unit of norm −1).
pub fn class_numbers_by_forms(disc: i64) -> (u64, u64) {
    if disc < 0 {
        let mut h = 0;
        let mut a = 1;
        while 3 * a * a <= -disc {
            for b in -a + 1..=a {
                if (b * b - disc) % (4 * a) != 0 {
                    continue;
                }
                let c = (b * b - disc) / (4 * a);
                if c < a || (c == a && b < 0) {
                    continue;
                }
                h += 1;
            }
            a += 1;
        }
        return (h, h);
    }
    let r = isqrt(disc);
    let mut forms = Vec::new();
    for b in 1..=r {
        if (b * b - disc) % 4 != 0 {
            continue;
        }
        let ac = (b * b - disc) / 4;
        for a in 1..=ac.abs() {
            if ac % a != 0 {
                continue;
            }
            // √D − b < 2|a| < √D + b, with √D irrational
            if 2 * a > r - b && 2 * a <= r + b {
                forms.push((a, b, ac / a));
                forms.push((-a, b, -ac / a));
            }
        }
    }
    let rho = |(_, b, c): (i64, i64, i64)| -> (i64, i64, i64) {
        let m = 2 * c.abs();
        // r ≡ −b (mod 2|c|) with √D − 2|c| < r < √D
        let mut t = (-b).rem_euclid(m);
        while t <= r {
            t += m;
        }
        while t > r {
            t -= m;
        }
        (c, t, (t * t - disc) / (4 * c))
    };
    let mut seen = std::collections::HashSet::new();
    let mut cycles = 0;
    let mut principal_has_minus_one = false;
    for f in &forms {
        if seen.contains(f) {
            continue;
        }
        cycles += 1;
        let mut cur = *f;
        let mut members = Vec::new();
        while seen.insert(cur) {
            members.push(cur);
            cur = rho(cur);
        }
        if members.iter().any(|g| g.0 == 1) {
            principal_has_minus_one = members.iter().any(|g| g.0 == -1);
        }
    }
    let h1 = cycles as u64;
    (if principal_has_minus_one { h1 } else { h1 / 2 }, h1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Q {
    x: i64,
    y: i64,
}

#[derive(Clone, Copy)]
struct Ring {
    s: i64,
    t: i64,
}

impl Ring {
    fn new(d: i64) -> Ring {
        if d.rem_euclid(4) == 1 {
            Ring { s: (d - 1) / 4, t: 1 }
        } else {
            Ring { s: d, t: 0 }
        }
    }
    fn mul(&self, a: Q, b: Q) -> Q {
        Q {
            x: a.x * b.x + self.s * a.y * b.y,
            y: a.x * b.y + a.y * b.x + self.t * a.y * b.y,
        }
    }
    fn sub(&self, a: Q, b: Q) -> Q {
        Q { x: a.x - b.x, y: a.y - b.y }
    }
    fn conj(&self, a: Q) -> Q {
        Q { x: a.x + self.t * a.y, y: -a.y }
    }
    fn norm(&self, a: Q) -> i64 {
        a.x * a.x + self.t * a.x * a.y - self.s * a.y * a.y
    }
    fn divides(&self, g: Q, z: Q) -> bool {
        let n = self.norm(g);
        let p = self.mul(z, self.conj(g));
        p.x % n == 0 && p.y % n == 0
    }
}

fn to_q(e: &quadklein::FieldElement) -> Q {
    assert!(e.is_integral());
    Q {
        x: e.a.to_integer().to_i64().expect("small"),
        y: e.b.to_integer().to_i64().expect("small"),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Fundamental unit `x + y√d` of a real field with `d ≢ 1 (mod 4)`, as `f64`.
fn unit_size(d: i64) -> f64 {
    for y in 1i64.. {
        for sign in [1, -1] {
            let v = d * y * y + sign;
            let x = isqrt(v);
            if x * x == v {
                return x as f64 + y as f64 * (d as f64).sqrt();
            }
        }
    }
    unreachable!()
}

/// Exhaustive search for `B = A·diag(1/g, g/Δ)·Wᵉ ∈ SL₂(O_K)` that conjugates
/// `ρ_A` to the standard embedding, over all `g` with `|N(g)|` at most the
/// norm bound forced by `(g) ⊇ I₁`. Returns the conjugator found.
pub fn brute_force_conjugator(e: &ConjugatedEmbedding) -> Option<Mat2> {
    let k = e.field();
    let d = k.d();
    let ring = Ring::new(d);
    let m = [[to_q(e.a.at(0, 0)), to_q(e.a.at(0, 1))], [to_q(e.a.at(1, 0)), to_q(e.a.at(1, 1))]];
    let delta = ring.sub(ring.mul(m[0][0], m[1][1]), ring.mul(m[0][1], m[1][0]));
    let bound = gcd(ring.norm(m[0][0]), ring.norm(m[1][0])).abs();
    let candidates: Vec<Q> = if d < 0 {
        let r = 2 * isqrt(bound) + 2;
        let mut v = Vec::new();
        for y in -r..=r {
            for x in -r - y.abs()..=r + y.abs() {
                v.push(Q { x, y });
            }
        }
        v
    } else {
        assert!(ring.t == 0, "real oracle needs d ≢ 1 mod 4");
        let big = ((bound as f64) * unit_size(d)).sqrt();
        let ry = (big / (d as f64).sqrt()).ceil() as i64 + 1;
        let rx = big.ceil() as i64 + 1;
        let mut v = Vec::new();
        for y in -ry..=ry {
            for x in -rx..=rx {
                v.push(Q { x, y });
            }
        }
        v
    };
    for g in candidates {
        let n = ring.norm(g);
        if n == 0 || n.abs() > bound {
            continue;
        }
        if !(ring.divides(g, m[0][0]) && ring.divides(g, m[1][0])) {
            continue;
        }
        if !(ring.divides(delta, ring.mul(m[0][1], g)) && ring.divides(delta, ring.mul(m[1][1], g))) {
            continue;
        }
        let gk = k.ints(g.x, g.y);
        let dk = k.ints(delta.x, delta.y);
        let l1 = gk.inv()?;
        let l2 = gk.div(&dk)?;
        let base = e.a.mul(&Mat2::diag(l1, l2));
        let swap = Mat2::new(k.zero(), k.one(), k.one(), k.zero());
        for cand in [base.clone(), base.mul(&swap)] {
            if embed::verify_conjugator(&e.rho, &cand) {
                return Some(cand);
            }
        }
    }
    None
}
