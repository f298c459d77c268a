//! Class groups, narrow class groups, and the unramified quadratic
//! extensions they control.
//!
//! Groups are found by a breadth-first walk over products of prime ideals
//! below the Minkowski bound, comparing classes with the principality test.
//! Every edge of the walk that lands on a known class contributes a
//! relation, and the Smith form of the relation lattice gives the invariant
//! factors. The narrow group uses totally positive principality instead.
//!
//! Quadratic unramified extensions come from genus theory: they correspond
//! to the ways of splitting the discriminant into two coprime fundamental
//! discriminants, and their count is checked against the 2-rank of the
//! narrow class group.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::ideal::{self, FracIdeal, IdealJson, PrimeSplitting};
use crate::lattice::{smith_columns, IVec};
use crate::qfield::{fundamental_unit, ElementJson, FieldElement, QuadraticField, UnitData};

/// Fields with `|D|` above this need an explicit override.
pub const DEFAULT_DISC_LIMIT: i64 = 1_000_000;

/// Options shared by the group computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassOptions {
    pub allow_large: bool,
}

impl Default for ClassOptions {
    fn default() -> Self {
        ClassOptions { allow_large: false }
    }
}

/// A finite abelian group `⊕ Z/m_i`, realized by ideal classes.
#[derive(Debug, Clone)]
pub struct AbelianGroupPresentation {
    field: QuadraticField,
    narrow: bool,
    /// Nontrivial invariant factors, each dividing the next.
    pub cyclic_orders: Vec<u64>,
    /// One ideal per cyclic factor; its class has exactly that order.
    pub generators: Vec<FracIdeal>,
    /// Every group element: its exponent vector and a representative ideal.
    elements: Vec<(Vec<u64>, FracIdeal)>,
}

impl AbelianGroupPresentation {
    pub fn order(&self) -> u64 {
        self.cyclic_orders.iter().product()
    }

    pub fn is_narrow(&self) -> bool {
        self.narrow
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    /// Number of cyclic factors of even order.
    pub fn two_rank(&self) -> usize {
        self.cyclic_orders.iter().filter(|m| *m % 2 == 0).count()
    }

    /// Exponent vector `x` with `[I] = Σ x_i [g_i]`.
    pub fn dlog(&self, i: &FracIdeal) -> Result<Vec<u64>> {
        for (exps, rep) in &self.elements {
            if same_class(i, rep, self.narrow, None)? {
                return Ok(exps.clone());
            }
        }
        unreachable!("every ideal class appears among the enumerated elements")
    }

    /// Ideal representing the class with exponent vector `x`.
    pub fn element(&self, x: &[u64]) -> FracIdeal {
        let mut acc = FracIdeal::unit(&self.field);
        for ((g, &e), &m) in self.generators.iter().zip(x).zip(&self.cyclic_orders) {
            acc = acc.mul(&g.pow((e % m) as i64));
        }
        acc
    }

    /// All classes with their exponent vectors, the trivial class first.
    pub fn elements(&self) -> &[(Vec<u64>, FracIdeal)] {
        &self.elements
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            orders: self.cyclic_orders.clone(),
            generators: self.generators.iter().map(|g| g.to_json()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub orders: Vec<u64>,
    pub generators: Vec<IdealJson>,
}

fn class_test(i: &FracIdeal, narrow: bool, units: Option<&UnitData>) -> Result<bool> {
    if narrow {
        Ok(ideal::is_narrowly_principal(i, units)?.is_some())
    } else {
        Ok(ideal::is_principal(i)?.is_some())
    }
}

fn same_class(i: &FracIdeal, j: &FracIdeal, narrow: bool, units: Option<&UnitData>) -> Result<bool> {
    class_test(&i.mul(&j.inv()), narrow, units)
}

fn check_size(k: &QuadraticField, opts: ClassOptions) -> Result<()> {
    if !opts.allow_large && k.disc().abs() > DEFAULT_DISC_LIMIT {
        return Err(Error::FieldTooLarge(k.disc().abs()));
    }
    Ok(())
}

type CacheKey = (i64, bool);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<AbelianGroupPresentation>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<AbelianGroupPresentation>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached(k: &QuadraticField, narrow: bool, opts: ClassOptions) -> Result<Arc<AbelianGroupPresentation>> {
    check_size(k, opts)?;
    let key = (k.d(), narrow);
    if let Some(g) = cache().read().expect("cache lock").get(&key) {
        return Ok(g.clone());
    }
    let g = Arc::new(compute_group(k, narrow)?);
    cache().write().expect("cache lock").insert(key, g.clone());
    Ok(g)
}

pub fn class_group(k: &QuadraticField) -> Result<Arc<AbelianGroupPresentation>> {
    class_group_with(k, ClassOptions::default())
}

pub fn class_group_with(k: &QuadraticField, opts: ClassOptions) -> Result<Arc<AbelianGroupPresentation>> {
    cached(k, false, opts)
}

pub fn narrow_class_group(k: &QuadraticField) -> Result<Arc<AbelianGroupPresentation>> {
    narrow_class_group_with(k, ClassOptions::default())
}

pub fn narrow_class_group_with(k: &QuadraticField, opts: ClassOptions) -> Result<Arc<AbelianGroupPresentation>> {
    // imaginary fields have no real places, so Cl¹ = Cl
    let narrow = k.is_real() && !k.is_rational();
    let g = cached(k, narrow, opts)?;
    if narrow {
        let h = cached(k, false, opts)?.order();
        let units = fundamental_unit(k)?;
        let expected = (1u64 << (k.signature_r() - units.t_exponent)) * h;
        assert_eq!(g.order(), expected, "|Cl¹| = 2^(r−t)·h failed for {k}");
    }
    Ok(g)
}

/// Ideals whose classes generate the group.
fn candidate_generators(k: &QuadraticField, narrow: bool) -> Vec<FracIdeal> {
    let mut gens = Vec::new();
    for p in arith::primes_up_to(k.minkowski_bound()) {
        let split = ideal::factor_rational_prime(p, k);
        match split {
            // the conjugate prime is the inverse class
            PrimeSplitting::Split { p1, .. } => gens.push(p1),
            PrimeSplitting::Ramified { p } => gens.push(p),
            PrimeSplitting::Inert { .. } => {}
        }
    }
    if narrow {
        // (√d) has a generator of negative norm; it spans the kernel Cl¹ → Cl
        gens.push(FracIdeal::principal(&k.sqrt_d()).expect("nonzero"));
    }
    gens
}

fn compute_group(k: &QuadraticField, narrow: bool) -> Result<AbelianGroupPresentation> {
    if k.is_rational() {
        return Ok(AbelianGroupPresentation {
            field: *k,
            narrow,
            cyclic_orders: vec![],
            generators: vec![],
            elements: vec![(vec![], FracIdeal::unit(k))],
        });
    }
    let units = if narrow { Some(fundamental_unit(k)?) } else { None };
    let gens = candidate_generators(k, narrow);
    let r = gens.len();
    // classes found so far: (exponent vector over `gens`, representative)
    let mut classes: Vec<(IVec, FracIdeal)> = vec![(vec![BigInt::zero(); r], FracIdeal::unit(k))];
    let mut relations: Vec<IVec> = Vec::new();
    let mut head = 0;
    while head < classes.len() {
        let (vec_e, rep) = classes[head].clone();
        head += 1;
        for (i, g) in gens.iter().enumerate() {
            let prod = rep.mul(g);
            let mut v = vec_e.clone();
            v[i] += 1;
            let mut hit = None;
            for (j, (vj, rj)) in classes.iter().enumerate() {
                if same_class(&prod, rj, narrow, units.as_ref())? {
                    hit = Some(j);
                    let rel: IVec = v.iter().zip(vj).map(|(a, b)| a - b).collect();
                    if rel.iter().any(|x| !x.is_zero()) {
                        relations.push(rel);
                    }
                    break;
                }
            }
            if hit.is_none() {
                classes.push((v, prod));
            }
        }
    }
    let h = classes.len() as u64;
    let (diag, _v, v_inv) = smith_columns(&relations, r);
    let mut orders = Vec::new();
    let mut generators = Vec::new();
    for (idx, m) in diag.iter().enumerate() {
        assert!(!m.is_zero(), "relation lattice must have full rank");
        if m.is_one() {
            continue;
        }
        let mut g = FracIdeal::unit(k);
        for (j, e) in v_inv[idx].iter().enumerate() {
            let e = e.to_i64().expect("small exponent");
            if e != 0 {
                g = g.mul(&gens[j].pow(e));
            }
        }
        orders.push(m.to_u64().expect("small order"));
        generators.push(g);
    }
    assert_eq!(orders.iter().product::<u64>(), h, "Smith form disagrees with class count");
    let group = AbelianGroupPresentation {
        field: *k,
        narrow,
        cyclic_orders: orders,
        generators,
        elements: Vec::new(),
    };
    let elements = enumerate_elements(&group);
    let group = AbelianGroupPresentation { elements, ..group };
    verify_orders(&group, units.as_ref())?;
    Ok(group)
}

fn enumerate_elements(g: &AbelianGroupPresentation) -> Vec<(Vec<u64>, FracIdeal)> {
    let mut out = vec![(vec![0u64; g.cyclic_orders.len()], FracIdeal::unit(&g.field))];
    for (i, &m) in g.cyclic_orders.iter().enumerate() {
        let mut next = Vec::new();
        for (v, rep) in &out {
            let mut cur = rep.clone();
            for e in 0..m {
                let mut w = v.clone();
                w[i] = e;
                next.push((w, cur.clone()));
                cur = cur.mul(&g.generators[i]);
            }
        }
        out = next;
    }
    out
}

/// Each generator has exactly its stated order.
fn verify_orders(g: &AbelianGroupPresentation, units: Option<&UnitData>) -> Result<()> {
    for (gen, &m) in g.generators.iter().zip(&g.cyclic_orders) {
        assert!(class_test(&gen.pow(m as i64), g.narrow, units)?, "generator order too large");
        for (p, _) in arith::factor_u64(m) {
            assert!(
                !class_test(&gen.pow((m / p) as i64), g.narrow, units)?,
                "generator order too small"
            );
        }
    }
    Ok(())
}

/// `{h, h1, r, t}` with `h1 = 2^(r−t)·h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayClassData {
    pub h: u64,
    pub h1: u64,
    pub r: u32,
    pub t: u32,
}

pub fn ray_class_data(k: &QuadraticField) -> Result<RayClassData> {
    let h = class_group(k)?.order();
    let h1 = narrow_class_group(k)?.order();
    let r = k.signature_r();
    let t = if k.is_rational() {
        1
    } else if k.is_real() {
        fundamental_unit(k)?.t_exponent
    } else {
        0
    };
    assert_eq!(h1, (1u64 << (r - t)) * h);
    Ok(RayClassData { h, h1, r, t })
}

/// `L = K(√δ)`, unramified at every finite prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnramifiedQuadExt {
    pub delta: FieldElement,
    /// `(D1, D2)` coprime fundamental discriminants with `D1·D2 = D`, `δ = D1`.
    pub disc_factor_pair: (i64, i64),
}

impl UnramifiedQuadExt {
    pub fn field(&self) -> QuadraticField {
        self.delta.field()
    }

    /// The factor that is `1 mod 4`, used for the local test at 2.
    pub fn odd_factor(&self) -> i64 {
        let (a, b) = self.disc_factor_pair;
        if a.rem_euclid(4) == 1 {
            a
        } else {
            b
        }
    }

    pub fn to_json(&self) -> ExtensionJson {
        ExtensionJson {
            delta: self.delta.to_json(),
            factors: [self.disc_factor_pair.0, self.disc_factor_pair.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionJson {
    pub delta: ElementJson,
    pub factors: [i64; 2],
}

/// Prime discriminants whose product is `D`.
pub fn prime_discriminants(disc: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut rest = disc;
    for (p, _) in arith::factor_u64(disc.unsigned_abs()) {
        if p == 2 {
            continue;
        }
        let p = p as i64;
        let pstar = if p % 4 == 1 { p } else { -p };
        out.push(pstar);
        rest /= pstar;
    }
    if rest != 1 {
        debug_assert!([-4, 8, -8].contains(&rest), "bad 2-part {rest} of {disc}");
        out.insert(0, rest);
    }
    out
}

/// Whether `x` is a square in its field.
pub fn is_square(x: &FieldElement) -> bool {
    if x.is_zero() {
        return true;
    }
    let k = x.field();
    let (a, b) = x.sqrt_coords();
    let rat_sqrt = |q: &Rational| -> Option<Rational> {
        if q.is_negative() {
            return None;
        }
        let (n, d) = (arith::isqrt(q.numer()), arith::isqrt(q.denom()));
        (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
    };
    if k.is_rational() {
        return rat_sqrt(&a).is_some();
    }
    let dd = Rational::from_integer(BigInt::from(k.d()));
    if b.is_zero() {
        // y = u or y = v√d
        return rat_sqrt(&a).is_some() || rat_sqrt(&(&a / &dd)).is_some();
    }
    // (u + v√d)² = a + b√d: u² + d v² = a, 2uv = b
    let Some(n) = rat_sqrt(&(&a * &a - &dd * &b * &b)) else { return false };
    let two = Rational::from_integer(BigInt::from(2));
    [&a + &n, &a - &n].iter().any(|s| rat_sqrt(&(s / &two)).is_some())
}

/// Enumerate `K(√D1)` for every unordered coprime splitting `D = D1·D2`.
pub fn unramified_quadratic_extensions(k: &QuadraticField) -> Result<Vec<UnramifiedQuadExt>> {
    if k.is_rational() {
        return Ok(Vec::new());
    }
    let primes = prime_discriminants(k.disc());
    let m = primes.len();
    let mut out = Vec::new();
    // subsets containing the last prime discriminant, excluding the full set,
    // list each unordered pair once
    if m >= 2 {
        for mask in 0u64..(1 << (m - 1)) {
            let mask = mask | (1 << (m - 1));
            if mask == (1 << m) - 1 {
                continue;
            }
            let d1: i64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]).product();
            let d2 = k.disc() / d1;
            let (d1, d2) = if d1.abs() <= d2.abs() { (d1, d2) } else { (d2, d1) };
            out.push(UnramifiedQuadExt {
                delta: k.int(d1),
                disc_factor_pair: (d1, d2),
            });
        }
    }
    out.sort_by_key(|e| (e.disc_factor_pair.0.abs(), e.disc_factor_pair.0));
    let cl1 = narrow_class_group(k)?;
    let two_rank = cl1.two_rank();
    if out.len() + 1 != 1 << two_rank {
        return Err(Error::InconsistentCount {
            genus: out.len(),
            two_rank,
        });
    }
    for e in &out {
        assert!(ramification_check(e)?, "K(√{}) fails the local unramified test", e.delta);
    }
    Ok(out)
}

/// Look up the extension `K(√δ)` among the unramified ones.
pub fn find_extension(k: &QuadraticField, delta: &FieldElement) -> Result<UnramifiedQuadExt> {
    for e in unramified_quadratic_extensions(k)? {
        if is_square(&(delta * &e.delta)) {
            return Ok(e);
        }
    }
    Err(Error::NotUnramified(delta.to_string()))
}

/// Direct finite-prime test: `δ` is not a square, has even valuation at
/// every odd prime, and at primes over 2 the extension is generated by a
/// square root of a `1 mod 4` discriminant that is a square mod `4·O_K`.
pub fn ramification_check(e: &UnramifiedQuadExt) -> Result<bool> {
    let k = e.field();
    if is_square(&e.delta) {
        return Ok(false);
    }
    let odd = e.odd_factor();
    // K(√δ) = K(√D_o): δ·D_o must be a square
    if !is_square(&(&e.delta * &k.int(odd))) {
        return Ok(false);
    }
    let delta_ideal = FracIdeal::principal(&e.delta)?;
    let two_d = BigInt::from(2) * BigInt::from(e.disc_factor_pair.0);
    for p in arith::prime_divisors(&two_d) {
        let p = p.to_u64().expect("small prime");
        for pr in ideal::primes_above(p, &k) {
            if p == 2 {
                if !square_mod_four(&k, odd) {
                    return Ok(false);
                }
            } else if delta_ideal.valuation(&pr) % 2 != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Is the integer `m` congruent to a square modulo `4·O_K`?
fn square_mod_four(k: &QuadraticField, m: i64) -> bool {
    let four = FracIdeal::principal(&k.int(4)).expect("nonzero");
    let target = k.int(m);
    (0..4).any(|a| {
        (0..4).any(|b| {
            let x = &k.int(a) + &k.omega().scale(&arith::rat(b));
            four.contains(&(&(&x * &x) - &target))
        })
    })
}

/// Minimal exponent vector of `I` in the class group, convenience wrapper.
pub fn class_of(i: &FracIdeal) -> Result<Vec<u64>> {
    class_group(&i.field())?.dlog(i)
}

/// `h_K` shortcut.
pub fn class_number(k: &QuadraticField) -> Result<u64> {
    Ok(class_group(k)?.order())
}

/// Representatives of all ideal classes, the trivial class first.
pub fn class_representatives(k: &QuadraticField) -> Result<Vec<FracIdeal>> {
    Ok(class_group(k)?.elements().iter().map(|(_, r)| r.clone()).collect())
}
