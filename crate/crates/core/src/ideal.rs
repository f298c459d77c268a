//! Fractional ideals of `O_K` in Hermite normal form.
//!
//! A fractional ideal is `(1/den)·M` where `M ⊂ Z[ω]` is the lattice with
//! basis `{a, b + c·ω}`, `0 ≤ b < a`, and `gcd(den, a, b, c) = 1`. This
//! representation is canonical, so structural equality is ideal equality.
//! Over the degenerate base `Q` only `a` is meaningful (`b = 0`, `c = 1`).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::forms::{self, OrientedBasis};
use crate::lattice::{hnf, IVec};
use crate::qfield::{fundamental_unit, ElementJson, FieldElement, OmegaKind, QuadraticField, UnitData};

/// Default step cap for principality searches.
pub const DEFAULT_PRINCIPAL_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    field: QuadraticField,
    den: BigInt,
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl FracIdeal {
    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// `[[a, b], [0, c]]`.
    pub fn hnf(&self) -> [[BigInt; 2]; 2] {
        [
            [self.a.clone(), self.b.clone()],
            [BigInt::zero(), self.c.clone()],
        ]
    }

    pub fn unit(k: &QuadraticField) -> FracIdeal {
        FracIdeal {
            field: *k,
            den: BigInt::one(),
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::one(),
        }
    }

    pub fn principal(x: &FieldElement) -> Result<FracIdeal> {
        ideal_from_generators(std::slice::from_ref(x))
    }

    /// Build from `den` and an HNF triple, validating `O_K`-stability.
    pub fn from_hnf(k: &QuadraticField, den: BigInt, hnf: [[BigInt; 2]; 2]) -> Result<FracIdeal> {
        if !den.is_positive() {
            return Err(Error::Parse("ideal denominator must be positive".into()));
        }
        let [[a, b], [z, c]] = hnf;
        if !z.is_zero() || !a.is_positive() || !c.is_positive() {
            return Err(Error::Parse("ideal HNF must be upper triangular with positive diagonal".into()));
        }
        let d = Rational::from_integer(den);
        let g1 = k.from_rational(Rational::from_integer(a) / &d);
        let g2 = if k.is_rational() {
            k.zero()
        } else {
            k.elem(Rational::from_integer(b) / &d, Rational::from_integer(c) / &d)
        };
        let id = ideal_from_generators(&[g1.clone(), g2.clone()])?;
        // the generated O_K-module must coincide with the given lattice
        let candidate = id.clone();
        let basis = candidate.basis();
        let lattice_ok = basis.iter().all(|x| {
            let lat = ZLattice2::new(&[g1.clone(), g2.clone()]);
            lat.contains(x)
        });
        if !lattice_ok {
            return Err(Error::Parse("lattice is not an O_K-module".into()));
        }
        Ok(id)
    }

    /// `Z`-basis `{a/den, (b + cω)/den}` (just `{a/den}` over `Q`).
    pub fn basis(&self) -> Vec<FieldElement> {
        let d = Rational::from_integer(self.den.clone());
        let k = self.field;
        let first = k.from_rational(Rational::from_integer(self.a.clone()) / &d);
        if k.is_rational() {
            return vec![first];
        }
        vec![
            first,
            k.elem(
                Rational::from_integer(self.b.clone()) / &d,
                Rational::from_integer(self.c.clone()) / &d,
            ),
        ]
    }

    pub fn norm(&self) -> Rational {
        if self.field.is_rational() {
            return Rational::new(self.a.clone(), self.den.clone());
        }
        Rational::new(&self.a * &self.c, &self.den * &self.den)
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.den.is_one() && self.a.is_one() && self.c.is_one()
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        let d = Rational::from_integer(self.den.clone());
        let xa = &x.a * &d;
        let xb = &x.b * &d;
        if !arith::is_integer(&xa) || !arith::is_integer(&xb) {
            return false;
        }
        let (xa, xb) = (xa.to_integer(), xb.to_integer());
        if self.field.is_rational() {
            return (xa % &self.a).is_zero();
        }
        if !(&xb % &self.c).is_zero() {
            return false;
        }
        let q = &xb / &self.c;
        let rest = xa - q * &self.b;
        (rest % &self.a).is_zero()
    }

    pub fn is_subset_of(&self, other: &FracIdeal) -> bool {
        self.basis().iter().all(|x| other.contains(x))
    }

    pub fn mul(&self, other: &FracIdeal) -> FracIdeal {
        let mut gens = Vec::new();
        for x in self.basis() {
            for y in other.basis() {
                gens.push(&x * &y);
            }
        }
        ideal_from_generators(&gens).expect("product of nonzero ideals is nonzero")
    }

    pub fn conj(&self) -> FracIdeal {
        let gens: Vec<_> = self.basis().iter().map(|x| x.conj()).collect();
        ideal_from_generators(&gens).expect("nonzero")
    }

    /// `I⁻¹ = conj(I) / N(I)`.
    pub fn inv(&self) -> FracIdeal {
        if self.field.is_rational() {
            let n = self.norm();
            return ideal_from_generators(&[self.field.from_rational(n.recip())]).expect("nonzero");
        }
        let n = self.norm().recip();
        let gens: Vec<_> = self.basis().iter().map(|x| x.conj().scale(&n)).collect();
        ideal_from_generators(&gens).expect("nonzero")
    }

    pub fn pow(&self, e: i64) -> FracIdeal {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = FracIdeal::unit(&self.field);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn scale(&self, x: &FieldElement) -> FracIdeal {
        let gens: Vec<_> = self.basis().iter().map(|g| g * x).collect();
        ideal_from_generators(&gens).expect("nonzero scaling")
    }

    /// `O_K`-stability of the stored lattice.
    pub fn is_ok_stable(&self) -> bool {
        let w = self.field.omega();
        self.basis().iter().all(|x| self.contains(&(x * &w)))
    }

    /// Exponent of the prime `p` in this ideal's factorization.
    pub fn valuation(&self, p: &FracIdeal) -> i64 {
        let scaled = self.scale(&self.field.from_big(self.den.clone()));
        let den_part = FracIdeal::principal(&self.field.from_big(self.den.clone())).expect("nonzero");
        integral_valuation(&scaled, p) - integral_valuation(&den_part, p)
    }

    /// Smallest positive rational integer in the ideal (for integral ideals).
    pub fn min_integer(&self) -> BigInt {
        self.a.clone()
    }

    pub fn to_json(&self) -> IdealJson {
        IdealJson {
            den: self.den.to_i64().unwrap_or(i64::MAX),
            hnf: [
                [self.a.to_i64().unwrap_or(i64::MAX), self.b.to_i64().unwrap_or(i64::MAX)],
                [0, self.c.to_i64().unwrap_or(i64::MAX)],
            ],
        }
    }
}

fn integral_valuation(i: &FracIdeal, p: &FracIdeal) -> i64 {
    debug_assert!(i.is_integral());
    let pinv = p.inv();
    let mut j = i.clone();
    let mut v = 0;
    while j.is_subset_of(p) {
        j = j.mul(&pinv);
        v += 1;
    }
    v
}

impl fmt::Display for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.basis().iter().map(|x| x.to_string()).collect();
        write!(f, "({})", gens.join(", "))
    }
}

/// Ideal on the wire: `{"den": int, "hnf": [[a,b],[0,c]]}` or `{"gens": [element...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealJson {
    pub den: i64,
    pub hnf: [[i64; 2]; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IdealInput {
    Hnf(IdealJson),
    Gens {
        gens: Vec<ElementJson>,
    },
}

impl IdealInput {
    pub fn to_ideal(&self, k: &QuadraticField) -> Result<FracIdeal> {
        match self {
            IdealInput::Hnf(j) => FracIdeal::from_hnf(
                k,
                BigInt::from(j.den),
                [
                    [BigInt::from(j.hnf[0][0]), BigInt::from(j.hnf[0][1])],
                    [BigInt::from(j.hnf[1][0]), BigInt::from(j.hnf[1][1])],
                ],
            ),
            IdealInput::Gens { gens } => {
                let els = gens.iter().map(|g| g.to_element(k)).collect::<Result<Vec<_>>>()?;
                ideal_from_generators(&els)
            }
        }
    }
}

/// `Z`-span of a few elements, used to check lattice inputs.
struct ZLattice2 {
    basis: Vec<IVec>,
    den: BigInt,
}

impl ZLattice2 {
    fn new(gens: &[FieldElement]) -> Self {
        let den = arith::lcm_denominators(gens.iter().flat_map(|g| [&g.a, &g.b]));
        let d = Rational::from_integer(den.clone());
        let vecs: Vec<IVec> = gens
            .iter()
            .map(|g| vec![(&g.b * &d).to_integer(), (&g.a * &d).to_integer()])
            .collect();
        ZLattice2 {
            basis: hnf(&vecs, 2),
            den,
        }
    }

    fn contains(&self, x: &FieldElement) -> bool {
        let d = Rational::from_integer(self.den.clone());
        let (xa, xb) = (&x.a * &d, &x.b * &d);
        if !arith::is_integer(&xa) || !arith::is_integer(&xb) {
            return false;
        }
        let l = crate::lattice::Lattice {
            dim: 2,
            basis: self.basis.clone(),
        };
        l.contains(&[xb.to_integer(), xa.to_integer()])
    }
}

/// Smallest `O_K`-module containing the generators, in canonical form.
pub fn ideal_from_generators(gens: &[FieldElement]) -> Result<FracIdeal> {
    let nonzero: Vec<&FieldElement> = gens.iter().filter(|g| !g.is_zero()).collect();
    if nonzero.is_empty() {
        return Err(Error::ZeroIdeal);
    }
    let k = nonzero[0].field();
    let l = arith::lcm_denominators(nonzero.iter().flat_map(|g| [&g.a, &g.b]));
    let lr = Rational::from_integer(l.clone());
    if k.is_rational() {
        let g = nonzero
            .iter()
            .fold(BigInt::zero(), |acc, x| acc.gcd(&(&x.a * &lr).to_integer()));
        let common = g.gcd(&l);
        return Ok(FracIdeal {
            field: k,
            den: &l / &common,
            a: &g / &common,
            b: BigInt::zero(),
            c: BigInt::one(),
        });
    }
    let w = k.omega();
    let mut vecs: Vec<IVec> = Vec::new();
    for g in &nonzero {
        for x in [(*g).clone(), *g * &w] {
            vecs.push(vec![(&x.b * &lr).to_integer(), (&x.a * &lr).to_integer()]);
        }
    }
    let h = hnf(&vecs, 2);
    assert_eq!(h.len(), 2, "nonzero O_K-module has rank 2");
    let (c, b) = (h[0][0].clone(), h[0][1].clone());
    let a = h[1][1].clone();
    let content = a.gcd(&b).gcd(&c).gcd(&l);
    let id = FracIdeal {
        field: k,
        den: &l / &content,
        a: &a / &content,
        b: &b / &content,
        c: &c / &content,
    };
    debug_assert!(id.is_ok_stable());
    Ok(id)
}

pub fn mul(i: &FracIdeal, j: &FracIdeal) -> FracIdeal {
    i.mul(j)
}

pub fn inv(i: &FracIdeal) -> FracIdeal {
    i.inv()
}

pub fn norm(i: &FracIdeal) -> Rational {
    i.norm()
}

/// Decomposition type of a rational prime in `O_K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeSplitting {
    Split { p1: FracIdeal, p2: FracIdeal },
    Inert { p: FracIdeal },
    Ramified { p: FracIdeal },
}

impl PrimeSplitting {
    /// Distinct primes above `p`.
    pub fn primes(&self) -> Vec<FracIdeal> {
        match self {
            PrimeSplitting::Split { p1, p2 } => vec![p1.clone(), p2.clone()],
            PrimeSplitting::Inert { p } | PrimeSplitting::Ramified { p } => vec![p.clone()],
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            PrimeSplitting::Split { .. } => "split",
            PrimeSplitting::Inert { .. } => "inert",
            PrimeSplitting::Ramified { .. } => "ramified",
        }
    }
}

/// Roots of the minimal polynomial of `ω` modulo `p`.
pub fn omega_roots_mod(k: &QuadraticField, p: u64) -> Vec<u64> {
    let (s, t) = k.omega_square();
    // ω² − tω − s ≡ 0
    let f = |x: u64| -> u64 {
        let x = x as i128;
        let v = x * x - (t as i128) * x - s as i128;
        v.rem_euclid(p as i128) as u64
    };
    if p == 2 {
        return (0..2).filter(|&x| f(x) == 0).collect();
    }
    let mut roots = match k.omega_kind() {
        OmegaKind::Sqrt => match arith::sqrt_mod(arith::mod_i64(k.d(), p), p) {
            Some(r) => vec![r, (p - r) % p],
            None => vec![],
        },
        OmegaKind::Half => match arith::sqrt_mod(arith::mod_i64(k.d(), p), p) {
            Some(r) => {
                let inv2 = (p + 1) / 2;
                let r1 = ((1 + r) % p) * inv2 % p;
                let r2 = ((1 + p - r) % p) * inv2 % p;
                vec![r1, r2]
            }
            None => vec![],
        },
        OmegaKind::Rational => vec![],
    };
    roots.sort_unstable();
    roots.dedup();
    debug_assert!(roots.iter().all(|&r| f(r) == 0));
    roots
}

/// Factor the rational prime `p` in `O_K`. Split/inert/ramified is decided by
/// the Kronecker symbol `(D|p)` (by `D mod 8` for `p = 2`); the primes are
/// `(p, ω − r)` for the roots `r` of the minimal polynomial of `ω` mod `p`.
pub fn factor_rational_prime(p: u64, k: &QuadraticField) -> PrimeSplitting {
    assert!(!k.is_rational(), "prime splitting needs a quadratic field");
    let pk = k.int(p as i64);
    let prime_over = |r: u64| {
        ideal_from_generators(&[pk.clone(), &k.omega() - &k.int(r as i64)]).expect("nonzero")
    };
    match arith::kronecker_prime(k.disc(), p) {
        1 => {
            let roots = omega_roots_mod(k, p);
            assert_eq!(roots.len(), 2, "split prime must have two roots");
            PrimeSplitting::Split {
                p1: prime_over(roots[0]),
                p2: prime_over(roots[1]),
            }
        }
        0 => {
            let roots = omega_roots_mod(k, p);
            assert_eq!(roots.len(), 1, "ramified prime must have a double root");
            PrimeSplitting::Ramified { p: prime_over(roots[0]) }
        }
        _ => PrimeSplitting::Inert {
            p: FracIdeal::principal(&pk).expect("nonzero"),
        },
    }
}

/// Distinct primes of the base ring above `p` (just `(p)` over `Z`).
pub fn primes_above(p: u64, k: &QuadraticField) -> Vec<FracIdeal> {
    if k.is_rational() {
        return vec![FracIdeal::principal(&k.int(p as i64)).expect("nonzero")];
    }
    factor_rational_prime(p, k).primes()
}

/// Prime ideals dividing a nonzero integral ideal.
pub fn prime_factors(i: &FracIdeal) -> Vec<FracIdeal> {
    assert!(i.is_integral());
    let n = i.norm().to_integer();
    let mut out = Vec::new();
    for p in arith::prime_divisors(&n) {
        let p = p.to_u64().expect("prime fits in u64");
        for q in primes_above(p, &i.field()) {
            if i.is_subset_of(&q) {
                out.push(q);
            }
        }
    }
    out
}

fn oriented_basis(i: &FracIdeal) -> OrientedBasis {
    let b = i.basis();
    let k = i.field();
    OrientedBasis {
        alpha: b[0].clone(),
        beta: b.get(1).cloned().unwrap_or_else(|| k.zero()),
        norm: i.norm(),
    }
}

/// A generator of `I`, or `None` when a complete search finds none.
pub fn is_principal(i: &FracIdeal) -> Result<Option<FieldElement>> {
    is_principal_capped(i, DEFAULT_PRINCIPAL_CAP)
}

pub fn is_principal_capped(i: &FracIdeal, cap: u64) -> Result<Option<FieldElement>> {
    let found = forms::principal_generator(oriented_basis(i), cap)?;
    if let Some(g) = &found {
        // soundness: (g) must reproduce I exactly
        assert_eq!(&FracIdeal::principal(g)?, i, "principality certificate failed");
    }
    Ok(found)
}

/// A totally positive generator of `I`, if one exists.
pub fn is_narrowly_principal(i: &FracIdeal, units: Option<&UnitData>) -> Result<Option<FieldElement>> {
    let k = i.field();
    let Some(g) = is_principal(i)? else { return Ok(None) };
    if k.is_rational() {
        return Ok(Some(if g.is_totally_positive() { g } else { -g }));
    }
    if k.d() < 0 {
        return Ok(Some(g));
    }
    let owned;
    let units = match units {
        Some(u) => u,
        None => {
            owned = fundamental_unit(&k)?;
            &owned
        }
    };
    let pos1 = g.sign_at(1) == std::cmp::Ordering::Greater;
    let pos2 = g.sign_at(-1) == std::cmp::Ordering::Greater;
    let adjusted = match (pos1, pos2) {
        (true, true) => g,
        (false, false) => -g,
        _ if units.unit_norm == -1 => {
            // ε has signs (+, −)
            let ge = &g * &units.fundamental_unit;
            if ge.is_totally_positive() {
                ge
            } else {
                -ge
            }
        }
        _ => return Ok(None),
    };
    debug_assert!(adjusted.is_totally_positive());
    Ok(Some(adjusted))
}

/// Decide `I ⊕ J ≅ I' ⊕ J'` by comparing Steinitz classes `[IJ]` and `[I'J']`.
pub fn steinitz_decide(pair1: (&FracIdeal, &FracIdeal), pair2: (&FracIdeal, &FracIdeal)) -> Result<bool> {
    let lhs = pair1.0.mul(pair1.1);
    let rhs = pair2.0.mul(pair2.1);
    Ok(is_principal(&lhs.mul(&rhs.inv()))?.is_some())
}
