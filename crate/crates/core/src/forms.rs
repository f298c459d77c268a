//! Binary quadratic forms attached to oriented ideal bases, and the
//! reduction walks used to decide principality.
//!
//! For an ideal `I` with `Z`-basis `(α, β)` the form
//! `f(x, y) = N(xα + yβ) / N(I)` is primitive, integral and has the field
//! discriminant. `I` is principal exactly when some basis reachable by
//! reduction has `|f(1, 0)| = 1`, and then its first vector generates `I`.
//! Imaginary fields need a single reduction; real fields walk the whole
//! cycle of reduced forms, which covers one period of the unit group.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::qfield::FieldElement;

/// `a x² + b xy + c y²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Form {
    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_reduced_definite(&self) -> bool {
        let ab = self.b.abs();
        ab <= self.a && self.a <= self.c && (!(ab == self.a || self.a == self.c) || !self.b.is_negative())
    }

    pub fn is_reduced_indefinite(&self) -> bool {
        let disc = self.discriminant();
        let s = arith::isqrt(&disc);
        let two_a = BigInt::from(2) * self.a.abs();
        if !self.b.is_positive() || self.b > s {
            return false;
        }
        let lo = &two_a + &self.b;
        if &lo * &lo <= disc {
            return false;
        }
        let hi = &two_a - &self.b;
        !hi.is_positive() || &hi * &hi < disc
    }
}

/// A basis of a fractional ideal together with the ideal's norm.
#[derive(Debug, Clone)]
pub struct OrientedBasis {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub norm: Rational,
}

fn to_int(x: Rational) -> BigInt {
    assert!(x.denom().is_one(), "ideal form has non-integral coefficient");
    x.numer().clone()
}

impl OrientedBasis {
    pub fn form(&self) -> Form {
        let a = to_int(self.alpha.norm() / &self.norm);
        let c = to_int(self.beta.norm() / &self.norm);
        let b = to_int((&self.alpha * &self.beta.conj()).trace() / &self.norm);
        Form { a, b, c }
    }

    /// `β ← β + tα`: `b ↦ b + 2ta`, `c ↦ c + bt + at²`.
    fn translate(&mut self, t: &BigInt) {
        let shift = self.alpha.scale(&Rational::from_integer(t.clone()));
        self.beta = &self.beta + &shift;
    }

    /// `(α, β) ← (β, −α + tβ)`: the proper reduction step for indefinite forms.
    fn rho(&mut self, t: &BigInt) {
        let new_beta = &(-&self.alpha) + &self.beta.scale(&Rational::from_integer(t.clone()));
        self.alpha = std::mem::replace(&mut self.beta, new_beta);
    }
}

/// Search for a generator of the ideal with basis `basis`.
///
/// `cap` bounds the number of reduction steps.
pub fn principal_generator(mut basis: OrientedBasis, cap: u64) -> Result<Option<FieldElement>> {
    let k = basis.alpha.field();
    if k.is_rational() {
        return Ok(Some(basis.alpha.clone()));
    }
    let check = |b: &OrientedBasis| -> Option<FieldElement> {
        if b.alpha.norm().abs() == b.norm {
            Some(b.alpha.clone())
        } else {
            None
        }
    };
    if let Some(g) = check(&basis) {
        return Ok(Some(g));
    }
    let mut steps = 0u64;
    if k.d() < 0 {
        loop {
            steps += 1;
            if steps > cap {
                return Err(Error::SearchCapExceeded(cap));
            }
            let f = basis.form();
            // normalize b into (-a, a]
            let two_a = BigInt::from(2) * &f.a;
            let t = -((&f.b + &f.a - BigInt::one()).div_floor(&two_a));
            if !t.is_zero() {
                basis.translate(&t);
                continue;
            }
            if f.a > f.c {
                // (α, β) ← (β, −α)
                let new_beta = -&basis.alpha;
                basis.alpha = std::mem::replace(&mut basis.beta, new_beta);
                continue;
            }
            if f.a == f.c && f.b.is_negative() {
                let new_beta = -&basis.alpha;
                basis.alpha = std::mem::replace(&mut basis.beta, new_beta);
                continue;
            }
            break;
        }
        return Ok(check(&basis));
    }

    // indefinite: reduce, then walk one full cycle
    let disc = basis.form().discriminant();
    let s = arith::isqrt(&disc);
    let rho_step = |basis: &mut OrientedBasis| {
        let f = basis.form();
        let c_abs = f.c.abs();
        let two_c = BigInt::from(2) * &c_abs;
        let r = (-&f.b).mod_floor(&two_c);
        let b_new = if &c_abs * &c_abs > disc {
            // representative in (-|c|, |c|]
            if r > c_abs {
                &r - &two_c
            } else {
                r
            }
        } else {
            // largest representative ≤ ⌊√Δ⌋
            let base = &s - (&s - &r).mod_floor(&two_c);
            base
        };
        let t = (&b_new + &f.b) / (BigInt::from(2) * &f.c);
        basis.rho(&t);
    };
    while !basis.form().is_reduced_indefinite() {
        steps += 1;
        if steps > cap {
            return Err(Error::SearchCapExceeded(cap));
        }
        rho_step(&mut basis);
        if let Some(g) = check(&basis) {
            return Ok(Some(g));
        }
    }
    let start = basis.form();
    loop {
        if let Some(g) = check(&basis) {
            return Ok(Some(g));
        }
        steps += 1;
        if steps > cap {
            return Err(Error::SearchCapExceeded(cap));
        }
        rho_step(&mut basis);
        if basis.form() == start {
            return Ok(check(&basis));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_predicates() {
        let f = Form { a: 1.into(), b: 0.into(), c: 5.into() };
        assert!(f.is_reduced_definite());
        let g = Form { a: 2.into(), b: 2.into(), c: 3.into() };
        assert!(g.is_reduced_definite());
        // x² + 6xy − y², discriminant 40: reduced indefinite
        let h = Form { a: 1.into(), b: 6.into(), c: (-1).into() };
        assert_eq!(h.discriminant(), BigInt::from(40));
        assert!(h.is_reduced_indefinite());
    }
}
