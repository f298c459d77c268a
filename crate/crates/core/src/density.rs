//! Splitting of primes of `K` in an unramified quadratic extension
//! `L = K(√δ)`, and census experiments over all primes up to a bound.
//!
//! Odd primes are decided by quadratic residuosity of `δ` in the residue
//! field; `F_{p²}` is realized as `F_p[ω]/(min poly of ω)` for inert `p`.
//! Primes over 2 use `L = K(θ)`, `θ² − θ + (1 − D_o)/4 = 0`, where `D_o` is
//! the factor of the discriminant that is `1 mod 4`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{self, Rational};
use crate::classfield::{self, UnramifiedQuadExt};
use crate::error::{Error, Result};
use crate::ideal::{self, FracIdeal};
use crate::qfield::QuadraticField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

/// A prime of `O_K` in residue form: above `p`, with `ω ≡ root` when the
/// residue degree is 1, or inert (`root = None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResiduePrime {
    pub p: u64,
    pub root: Option<u64>,
}

impl ResiduePrime {
    pub fn norm(&self) -> u128 {
        match self.root {
            Some(_) => self.p as u128,
            None => (self.p as u128) * (self.p as u128),
        }
    }

    /// Recover the residue data of a prime ideal.
    pub fn from_ideal(p: &FracIdeal) -> Result<ResiduePrime> {
        let k = p.field();
        let norm = p.norm();
        if !p.is_integral() || !arith::is_integer(&norm) {
            return Err(Error::InvalidArgument(format!("{p} is not a prime ideal")));
        }
        let nn = norm.to_integer().to_u64().ok_or_else(|| Error::InvalidArgument("prime too large".into()))?;
        let fac = arith::factor_u64(nn);
        if fac.len() != 1 || fac[0].1 > 2 || (k.is_rational() && fac[0].1 != 1) {
            return Err(Error::InvalidArgument(format!("{p} is not a prime ideal")));
        }
        let (q, e) = fac[0];
        if k.is_rational() {
            return Ok(ResiduePrime { p: q, root: None });
        }
        if e == 2 {
            if ideal::factor_rational_prime(q, &k).tag() != "inert" {
                return Err(Error::InvalidArgument(format!("{p} is not a prime ideal")));
            }
            return Ok(ResiduePrime { p: q, root: None });
        }
        let root = ideal::omega_roots_mod(&k, q)
            .into_iter()
            .find(|&r| p.contains(&(&k.omega() - &k.int(r as i64))))
            .expect("degree-one prime has a root");
        Ok(ResiduePrime { p: q, root: Some(root) })
    }
}

/// `F_p[ω]/(ω² − tω − s)`: pairs `(x, y)` for `x + yω`.
#[derive(Clone, Copy)]
struct Fp2 {
    p: u64,
    s: u64,
    t: u64,
}

impl Fp2 {
    fn mul(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        let m = |x: u64, y: u64| ((x as u128 * y as u128) % self.p as u128) as u64;
        let add = |x: u64, y: u64| ((x as u128 + y as u128) % self.p as u128) as u64;
        // (a0 + a1ω)(b0 + b1ω) = a0b0 + a1b1·s + (a0b1 + a1b0 + a1b1·t)ω
        let yy = m(a.1, b.1);
        (add(m(a.0, b.0), m(yy, self.s)), add(add(m(a.0, b.1), m(a.1, b.0)), m(yy, self.t)))
    }

    fn pow(&self, mut a: (u64, u64), mut e: u128) -> (u64, u64) {
        let mut acc = (1 % self.p, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }
}

fn residue_coords(x: &crate::qfield::FieldElement, p: u64) -> (u64, u64) {
    (arith::mod_big(&x.a.to_integer(), p), arith::mod_big(&x.b.to_integer(), p))
}

/// Is the integral element `x` a nonzero square in `κ(𝔭)` (𝔭 odd)?
fn is_residue_square(k: &QuadraticField, x: &crate::qfield::FieldElement, prime: ResiduePrime) -> Option<bool> {
    let p = prime.p;
    let (a, b) = residue_coords(x, p);
    match prime.root {
        Some(r) => {
            let v = ((a as u128 + b as u128 * r as u128) % p as u128) as u64;
            if v == 0 {
                None
            } else {
                Some(arith::legendre(v as i64, p) == 1)
            }
        }
        None => {
            if a == 0 && b == 0 {
                return None;
            }
            if k.is_rational() {
                return Some(arith::legendre(a as i64, p) == 1);
            }
            let (s, t) = k.omega_square();
            let f = Fp2 {
                p,
                s: arith::mod_i64(s, p),
                t: arith::mod_i64(t, p),
            };
            let e = ((p as u128) * (p as u128) - 1) / 2;
            Some(f.pow((a, b), e) == (1, 0))
        }
    }
}

/// Split/inert/ramified type of a residue-form prime of `K` in `L`.
pub fn split_kind_residue(ext: &UnramifiedQuadExt, prime: ResiduePrime) -> SplitKind {
    let k = ext.field();
    if classfield::is_square(&ext.delta) {
        return SplitKind::Split;
    }
    let (d1, d2) = ext.disc_factor_pair;
    if prime.p == 2 {
        // X² − X + c over κ(𝔭), c = (1 − D_o)/4
        let d_o = ext.odd_factor();
        let c = ((1 - d_o) / 4).rem_euclid(2);
        return match prime.root {
            // F_4 contains the roots of X² + X + 1
            None => SplitKind::Split,
            Some(_) if c == 0 => SplitKind::Split,
            Some(_) => SplitKind::Inert,
        };
    }
    // L = K(√D1) = K(√D2); use whichever is a unit at 𝔭
    for d in [d1, d2] {
        if let Some(sq) = is_residue_square(&k, &k.int(d), prime) {
            return if sq { SplitKind::Split } else { SplitKind::Inert };
        }
    }
    SplitKind::Ramified
}

/// Split/inert/ramified type of the prime ideal `p` in `L`.
pub fn split_kind(ext: &UnramifiedQuadExt, p: &FracIdeal) -> Result<SplitKind> {
    Ok(split_kind_residue(ext, ResiduePrime::from_ideal(p)?))
}

/// All primes of `O_K` with norm at most `x`, in order of `p`.
pub fn residue_primes_over(k: &QuadraticField, p: u64, x: u64) -> Vec<ResiduePrime> {
    if k.is_rational() {
        return vec![ResiduePrime { p, root: None }];
    }
    match arith::kronecker_prime(k.disc(), p) {
        -1 => {
            if (p as u128) * (p as u128) <= x as u128 {
                vec![ResiduePrime { p, root: None }]
            } else {
                vec![]
            }
        }
        _ => ideal::omega_roots_mod(k, p)
            .into_iter()
            .map(|r| ResiduePrime { p, root: Some(r) })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub split: u64,
    pub inert: u64,
    pub ramified: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.split + self.inert + self.ramified
    }

    fn add(&mut self, o: &Counts) {
        self.split += o.split;
        self.inert += o.inert;
        self.ramified += o.ramified;
    }

    fn record(&mut self, s: SplitKind) {
        match s {
            SplitKind::Split => self.split += 1,
            SplitKind::Inert => self.inert += 1,
            SplitKind::Ramified => self.ramified += 1,
        }
    }
}

/// Value of a truncated Dirichlet-density quotient: exact for integer `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum DirichletValue {
    Exact(Rational),
    Approx(f64),
}

impl DirichletValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            DirichletValue::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            DirichletValue::Approx(v) => *v,
        }
    }

    pub fn to_string_value(&self) -> String {
        match self {
            DirichletValue::Exact(q) => arith::rational_to_string(q),
            DirichletValue::Approx(v) => format!("{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusResult {
    pub bound_x: u64,
    pub counts: Counts,
    pub natural_density_split: Rational,
    pub dirichlet_quotient: Option<DirichletValue>,
}

/// Default number of worker threads for the census.
pub fn default_shards() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
}

/// Classify every prime of `K` with norm at most `x` as split/inert/ramified in `L`.
pub fn splitting_census(k: &QuadraticField, ext: &UnramifiedQuadExt, x: u64) -> Result<CensusResult> {
    splitting_census_sharded(k, ext, x, default_shards())
}

pub fn splitting_census_sharded(
    k: &QuadraticField,
    ext: &UnramifiedQuadExt,
    x: u64,
    shards: usize,
) -> Result<CensusResult> {
    if x < 2 {
        return Err(Error::InvalidArgument(format!("census bound {x} must be at least 2")));
    }
    let primes = arith::primes_up_to(x);
    let shards = shards.max(1);
    let chunk = primes.len().div_ceil(shards).max(1);
    let mut counts = Counts::default();
    std::thread::scope(|scope| {
        let handles: Vec<_> = primes
            .chunks(chunk)
            .map(|ps| {
                scope.spawn(move || {
                    let mut c = Counts::default();
                    for &p in ps {
                        for pr in residue_primes_over(k, p, x) {
                            c.record(split_kind_residue(ext, pr));
                        }
                    }
                    c
                })
            })
            .collect();
        for h in handles {
            counts.add(&h.join().expect("census worker panicked"));
        }
    });
    let total = counts.total();
    let natural = if total == 0 {
        Rational::zero()
    } else {
        Rational::new(BigInt::from(counts.split), BigInt::from(total))
    };
    Ok(CensusResult {
        bound_x: x,
        counts,
        natural_density_split: natural,
        dirichlet_quotient: None,
    })
}

/// Which primes enter the numerator of the Dirichlet quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeSet {
    All,
    Split,
    Inert,
    Empty,
}

/// `(Q, Q·Σ 1/q, Q·Σ_member 1/q)` with `Q = Π q`, by binary splitting so that
/// no intermediate fraction needs reducing.
fn power_sums(terms: &[(BigInt, bool)]) -> (BigInt, BigInt, BigInt) {
    if let [(q, member)] = terms {
        let m = if *member { BigInt::from(1) } else { BigInt::zero() };
        return (q.clone(), BigInt::from(1), m);
    }
    let (l, r) = terms.split_at(terms.len() / 2);
    let (q1, a1, m1) = power_sums(l);
    let (q2, a2, m2) = power_sums(r);
    (&q1 * &q2, &a1 * &q2 + &a2 * &q1, &m1 * &q2 + &m2 * &q1)
}

/// `Σ_{𝔭 ∈ Σ} N𝔭^{−s} / Σ_𝔭 N𝔭^{−s}` over primes with `N𝔭 ≤ x`.
///
/// Exact when `s` is an integer; otherwise evaluated in `f64`.
pub fn dirichlet_quotient(
    k: &QuadraticField,
    ext: &UnramifiedQuadExt,
    s: &Rational,
    x: u64,
    set: PrimeSet,
) -> Result<DirichletValue> {
    if *s <= Rational::from_integer(BigInt::from(1)) {
        return Err(Error::InvalidArgument("Dirichlet quotient needs s > 1".into()));
    }
    let mut norms: Vec<(u128, bool)> = Vec::new();
    for p in arith::primes_up_to(x) {
        for pr in residue_primes_over(k, p, x) {
            let kind = split_kind_residue(ext, pr);
            let member = match set {
                PrimeSet::All => true,
                PrimeSet::Empty => false,
                PrimeSet::Split => kind == SplitKind::Split,
                PrimeSet::Inert => kind == SplitKind::Inert,
            };
            norms.push((pr.norm(), member));
        }
    }
    if arith::is_integer(s) {
        let e = s.to_integer().to_u32().ok_or_else(|| Error::InvalidArgument("exponent too large".into()))?;
        if norms.is_empty() {
            return Ok(DirichletValue::Exact(Rational::zero()));
        }
        let terms: Vec<(BigInt, bool)> = norms.into_iter().map(|(n, m)| (BigInt::from(n).pow(e), m)).collect();
        let (_, all, member) = power_sums(&terms);
        Ok(DirichletValue::Exact(Rational::new(member, all)))
    } else {
        let sf = s.numer().to_f64().unwrap_or(f64::NAN) / s.denom().to_f64().unwrap_or(f64::NAN);
        let (mut num, mut den) = (0.0f64, 0.0f64);
        for (nrm, member) in norms {
            let term = (nrm as f64).powf(-sf);
            if member {
                num += term;
            }
            den += term;
        }
        Ok(DirichletValue::Approx(if den == 0.0 { 0.0 } else { num / den }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::make_field;

    fn q10() -> (QuadraticField, UnramifiedQuadExt) {
        let k = make_field(10).unwrap();
        let e = classfield::unramified_quadratic_extensions(&k).unwrap()[0].clone();
        (k, e)
    }

    #[test]
    fn prime_above_three_is_inert_in_l() {
        let (k, e) = q10();
        let p = ideal::ideal_from_generators(&[k.int(3), k.ints(4, 1)]).unwrap();
        assert_eq!(split_kind(&e, &p).unwrap(), SplitKind::Inert);
    }

    #[test]
    fn census_partition_and_shards() {
        let (k, e) = q10();
        let a = splitting_census_sharded(&k, &e, 2000, 1).unwrap();
        let b = splitting_census_sharded(&k, &e, 2000, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.ramified, 0);
        let expected: usize = arith::primes_up_to(2000).iter().map(|&p| residue_primes_over(&k, p, 2000).len()).sum();
        assert_eq!(a.counts.total() as usize, expected);
    }

    #[test]
    fn fp2_squares_match_brute_force() {
        for d in [-42i64, 10, -5, 13] {
            let k = make_field(d).unwrap();
            let (s, t) = k.omega_square();
            for p in arith::primes_up_to(50).into_iter().skip(1) {
                if arith::kronecker_prime(k.disc(), p) != -1 {
                    continue;
                }
                let f = Fp2 { p, s: arith::mod_i64(s, p), t: arith::mod_i64(t, p) };
                let mut squares = std::collections::HashSet::new();
                for x in 0..p {
                    for y in 0..p {
                        squares.insert(f.mul((x, y), (x, y)));
                    }
                }
                for x in 0..p {
                    for y in 0..p {
                        if (x, y) == (0, 0) {
                            continue;
                        }
                        let el = k.ints(x as i64, y as i64);
                        let got = is_residue_square(&k, &el, ResiduePrime { p, root: None }).unwrap();
                        assert_eq!(got, squares.contains(&(x, y)), "d={d} p={p} x={x} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn exact_quotient_tracks_float() {
        let (k, e) = q10();
        let exact = dirichlet_quotient(&k, &e, &arith::rat(2), 3000, PrimeSet::Split).unwrap();
        let near = dirichlet_quotient(&k, &e, &arith::rat_frac(20001, 10000), 3000, PrimeSet::Split).unwrap();
        assert!(matches!(exact, DirichletValue::Exact(_)));
        assert!((exact.to_f64() - near.to_f64()).abs() < 1e-3);
    }

    #[test]
    fn dirichlet_trivial_cases() {
        let (k, e) = q10();
        let two = arith::rat(2);
        assert_eq!(dirichlet_quotient(&k, &e, &two, 10, PrimeSet::All).unwrap(), DirichletValue::Exact(arith::rat(1)));
        assert_eq!(dirichlet_quotient(&k, &e, &two, 10, PrimeSet::Empty).unwrap(), DirichletValue::Exact(arith::rat(0)));
    }
}
