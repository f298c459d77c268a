//! Invariant rings `O_K[x, y]^{μ_n}` for actions `f ↦ f(ρ(u)·(x, y)ᵀ)`.
//!
//! Homogeneous polynomials of degree `d` over `O_K` form the lattice
//! `Z^{2(d+1)}` in the coordinates `{xⁱy^{d−i}, ω·xⁱy^{d−i}}`. Invariants are
//! the saturated integer kernel of `coaction − identity`. Generators are
//! chosen bihomogeneously: besides the degree, every invariant splits over
//! `K` by its weight under the torus `t ↦ E₁t + E₂t⁻¹` that contains the
//! image of `μ_n`, and each weight piece is a rank-one `O_K`-module.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{self, Rational};
use crate::embed::{self, ConjugatedEmbedding, GroupElementMatrix, Mat2};
use crate::error::{Error, Result};
use crate::ideal::{self, FracIdeal};
use crate::klein::{self, TwistDescriptor};
use crate::lattice::{kernel, IVec, Lattice};
use crate::qfield::{ElementJson, FieldElement, QuadraticField};

/// Sparse polynomial `Σ c_{ij} xⁱ yʲ` over `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariatePoly {
    field: QuadraticField,
    terms: BTreeMap<(u32, u32), FieldElement>,
}

impl BivariatePoly {
    pub fn zero(k: &QuadraticField) -> Self {
        BivariatePoly {
            field: *k,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(k: &QuadraticField, i: u32, j: u32, c: FieldElement) -> Self {
        let mut p = Self::zero(k);
        if !c.is_zero() {
            p.terms.insert((i, j), c);
        }
        p
    }

    pub fn constant(c: FieldElement) -> Self {
        let k = c.field();
        Self::monomial(&k, 0, 0, c)
    }

    pub fn x(k: &QuadraticField) -> Self {
        Self::monomial(k, 1, 0, k.one())
    }

    pub fn y(k: &QuadraticField) -> Self {
        Self::monomial(k, 0, 1, k.one())
    }

    /// `a·x + b·y`.
    pub fn linear(a: &FieldElement, b: &FieldElement) -> Self {
        let k = a.field();
        Self::monomial(&k, 1, 0, a.clone()).add(&Self::monomial(&k, 0, 1, b.clone()))
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &FieldElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> FieldElement {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|(i, j)| i + j == d)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integral())
    }

    fn insert_add(&mut self, key: (u32, u32), c: FieldElement) {
        let v = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    pub fn add(&self, o: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &BivariatePoly) -> BivariatePoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> BivariatePoly {
        self.scale(&self.field.int(-1))
    }

    pub fn scale(&self, c: &FieldElement) -> BivariatePoly {
        let mut out = Self::zero(&self.field);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(*k, v * c);
        }
        out
    }

    pub fn mul(&self, o: &BivariatePoly) -> BivariatePoly {
        let mut out = Self::zero(&self.field);
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &o.terms {
                out.insert_add((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> BivariatePoly {
        let mut acc = Self::constant(self.field.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `f(m₀₀x + m₀₁y, m₁₀x + m₁₁y)`.
    pub fn linear_substitute(&self, m: &Mat2) -> BivariatePoly {
        let lx = Self::linear(m.at(0, 0), m.at(0, 1));
        let ly = Self::linear(m.at(1, 0), m.at(1, 1));
        let mut out = Self::zero(&self.field);
        for ((i, j), c) in &self.terms {
            out = out.add(&lx.pow(*i).mul(&ly.pow(*j)).scale(c));
        }
        out
    }

    /// `c` with `self = c·other`, when the two are proportional.
    pub fn ratio(&self, other: &BivariatePoly) -> Option<FieldElement> {
        let (key, c0) = other.terms.iter().next()?;
        let c = self.coeff(key.0, key.1).div(c0)?;
        (other.scale(&c) == *self).then_some(c)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            terms: self
                .terms
                .iter()
                .map(|((i, j), c)| TermJson { i: *i, j: *j, c: c.to_json() })
                .collect(),
        }
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for ((i, j), c) in self.terms.iter().rev() {
            let mut mono = Vec::new();
            for (var, e) in [("x", i), ("y", j)] {
                match e {
                    0 => {}
                    1 => mono.push(var.to_string()),
                    _ => mono.push(format!("{var}^{e}")),
                }
            }
            let coef = if c.b.is_zero() {
                arith::rational_to_string(&c.a)
            } else {
                format!("({c})")
            };
            let body = mono.join("*");
            parts.push(match (body.is_empty(), coef.as_str()) {
                (true, _) => coef,
                (false, "1") => body,
                (false, "-1") => format!("-{body}"),
                _ => format!("{coef}*{body}"),
            });
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermJson {
    pub i: u32,
    pub j: u32,
    pub c: ElementJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
}

/// Polynomial in `K[u]/(uⁿ − 1)[x, y]`, indexed by the power of `u`.
pub type UBiPoly = Vec<BivariatePoly>;

fn ubi_mul(p: &UBiPoly, q: &UBiPoly) -> UBiPoly {
    let n = p.len();
    let k = p[0].field();
    let mut out = vec![BivariatePoly::zero(&k); n];
    for (a, pa) in p.iter().enumerate() {
        if pa.is_zero() {
            continue;
        }
        for (b, qb) in q.iter().enumerate() {
            if !qb.is_zero() {
                out[(a + b) % n] = out[(a + b) % n].add(&pa.mul(qb));
            }
        }
    }
    out
}

fn ubi_one(k: &QuadraticField, n: usize) -> UBiPoly {
    let mut v = vec![BivariatePoly::zero(k); n];
    v[0] = BivariatePoly::constant(k.one());
    v
}

/// `ρ(u)·(x, y)ᵀ` as two linear forms over `K[u]/(uⁿ − 1)`.
fn substituted_variables(rho: &GroupElementMatrix) -> (UBiPoly, UBiPoly) {
    let n = rho.n();
    let row = |i: usize| -> UBiPoly {
        (0..n)
            .map(|e| BivariatePoly::linear(&rho.entry(i, 0)[e], &rho.entry(i, 1)[e]))
            .collect()
    };
    (row(0), row(1))
}

struct Powers {
    x: Vec<UBiPoly>,
    y: Vec<UBiPoly>,
}

impl Powers {
    fn new(rho: &GroupElementMatrix, d: u32) -> Self {
        let k = rho.entry(0, 0)[0].field();
        let (lx, ly) = substituted_variables(rho);
        let mut x = vec![ubi_one(&k, rho.n())];
        let mut y = vec![ubi_one(&k, rho.n())];
        for t in 0..d as usize {
            x.push(ubi_mul(&x[t], &lx));
            y.push(ubi_mul(&y[t], &ly));
        }
        Powers { x, y }
    }

    fn apply(&self, f: &BivariatePoly) -> UBiPoly {
        let k = f.field();
        let n = self.x[0].len();
        let mut out = vec![BivariatePoly::zero(&k); n];
        for ((i, j), c) in f.terms() {
            let m = ubi_mul(&self.x[*i as usize], &self.y[*j as usize]);
            for (e, part) in m.iter().enumerate() {
                out[e] = out[e].add(&part.scale(c));
            }
        }
        out
    }
}

/// `f(ρ(u)·(x, y)ᵀ)`, expanded over `K[u]/(uⁿ − 1)`.
pub fn coaction(f: &BivariatePoly, rho: &GroupElementMatrix) -> UBiPoly {
    let d = f.degree().unwrap_or(0);
    Powers::new(rho, d).apply(f)
}

/// Whether `f` is fixed by the action.
pub fn is_invariant(f: &BivariatePoly, rho: &GroupElementMatrix) -> bool {
    let c = coaction(f, rho);
    c[0] == *f && c[1..].iter().all(|p| p.is_zero())
}

fn coords(f: &BivariatePoly, d: u32) -> Option<IVec> {
    let mut v = vec![BigInt::zero(); 2 * (d as usize + 1)];
    for ((i, j), c) in f.terms() {
        if i + j != d || !c.is_integral() {
            return None;
        }
        v[2 * *i as usize] = c.a.to_integer();
        v[2 * *i as usize + 1] = c.b.to_integer();
    }
    Some(v)
}

fn rational_coords(f: &BivariatePoly, d: u32) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); 2 * (d as usize + 1)];
    for ((i, _), c) in f.terms() {
        v[2 * *i as usize] = c.a.clone();
        v[2 * *i as usize + 1] = c.b.clone();
    }
    v
}

fn from_coords(k: &QuadraticField, v: &[BigInt], d: u32) -> BivariatePoly {
    let mut p = BivariatePoly::zero(k);
    for i in 0..=d {
        let a = Rational::from_integer(v[2 * i as usize].clone());
        let b = Rational::from_integer(v[2 * i as usize + 1].clone());
        p.insert_add((i, d - i), k.elem(a, b));
    }
    p
}

fn basis_poly(k: &QuadraticField, d: u32, idx: usize) -> BivariatePoly {
    let i = (idx / 2) as u32;
    let c = if idx % 2 == 0 { k.one() } else { k.omega() };
    BivariatePoly::monomial(k, i, d - i, c)
}

/// Integer matrix of `f ↦ coaction(f) − uʷ·f` on degree-`d` polynomials,
/// applied to the given polynomials (one column each).
fn eigen_map(rho: &GroupElementMatrix, d: u32, w: usize, inputs: &[BivariatePoly]) -> Vec<IVec> {
    let powers = Powers::new(rho, d);
    let n = rho.n();
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    for f in inputs {
        let mut img = powers.apply(f);
        img[w % n] = img[w % n].sub(f);
        cols.push(img.iter().flat_map(|p| rational_coords(p, d)).collect());
    }
    integer_rows(&cols)
}

/// Rows of the matrix with the given rational columns, cleared of denominators.
fn integer_rows(cols: &[Vec<Rational>]) -> Vec<IVec> {
    let den = arith::lcm_denominators(cols.iter().flatten());
    let dr = Rational::from_integer(den);
    let rows = cols.first().map_or(0, |c| c.len());
    (0..rows)
        .map(|r| cols.iter().map(|c| (&c[r] * &dr).to_integer()).collect())
        .collect()
}

fn k_of(rho: &GroupElementMatrix) -> QuadraticField {
    rho.entry(0, 0)[0].field()
}

/// Degree-`d` lattice of `f` with `f(ρ(u)v) = uʷ·f(v)`.
fn eigen_lattice(rho: &GroupElementMatrix, d: u32, w: usize) -> Lattice {
    let k = k_of(rho);
    let dim = 2 * (d as usize + 1);
    let inputs: Vec<_> = (0..dim).map(|i| basis_poly(&k, d, i)).collect();
    let m = eigen_map(rho, d, w, &inputs);
    Lattice::new(&kernel(&m, dim), dim)
}

/// `Z`-basis of the degree-`d` invariants.
pub fn invariant_lattice(rho: &GroupElementMatrix, d: u32) -> Vec<BivariatePoly> {
    let k = k_of(rho);
    eigen_lattice(rho, d, 0)
        .basis
        .iter()
        .map(|v| from_coords(&k, v, d))
        .collect()
}

/// Eigenforms `L₁, L₂` of weights `±1`: `L₁(ρ(u)v) = u·L₁(v)`, `L₂(ρ(u)v) = u⁻¹·L₂(v)`.
///
/// They are rows of the `u¹` and `u^{n−1}` coefficients of `ρ`, and every
/// degree-`d` form is `g(L₁, L₂)`; the weight of `L₁ⁱL₂ʲ` is `i − j`.
struct Eigenforms {
    l1: BivariatePoly,
    l2: BivariatePoly,
    /// `(x, y)ᵀ` in terms of `(L₁, L₂)ᵀ`.
    back: Mat2,
}

impl Eigenforms {
    fn new(rho: &GroupElementMatrix) -> Self {
        let n = rho.n();
        assert!(n >= 3, "weights are only defined for n ≥ 3");
        let row = |p: usize| -> [FieldElement; 2] {
            let r0 = [rho.entry(0, 0)[p].clone(), rho.entry(0, 1)[p].clone()];
            if r0.iter().any(|c| !c.is_zero()) {
                r0
            } else {
                [rho.entry(1, 0)[p].clone(), rho.entry(1, 1)[p].clone()]
            }
        };
        let [a, b] = row(1);
        let [c, d] = row(n - 1);
        let m = Mat2::new(a.clone(), b.clone(), c.clone(), d.clone());
        Eigenforms {
            l1: BivariatePoly::linear(&a, &b),
            l2: BivariatePoly::linear(&c, &d),
            back: m.inv().expect("eigenforms are independent"),
        }
    }
}

fn ok_lattice() -> Lattice {
    Lattice::new(&[vec![BigInt::one(), BigInt::zero()], vec![BigInt::zero(), BigInt::one()]], 2)
}

/// Integral degree-`d` forms of weight `w`: `𝔠⁻¹·L₁ⁱL₂ʲ` where `𝔠` is the
/// content ideal of `L₁ⁱL₂ʲ`.
fn weight_piece(ef: &Eigenforms, d: u32, w: i64) -> Result<Lattice> {
    if d == 0 {
        return Ok(ok_lattice());
    }
    let (i, j) = (((d as i64 + w) / 2) as u32, ((d as i64 - w) / 2) as u32);
    let m = ef.l1.pow(i).mul(&ef.l2.pow(j));
    let content = ideal::ideal_from_generators(&m.terms().map(|(_, c)| c.clone()).collect::<Vec<_>>())?;
    let vecs: Vec<IVec> = content
        .inv()
        .basis()
        .iter()
        .map(|b| coords(&m.scale(b), d).expect("scaled by the inverse content"))
        .collect();
    Ok(Lattice::new(&vecs, 2 * (d as usize + 1)))
}

/// Weights `w ≡ d (mod 2)`, `|w| ≤ d`, `n | w`, from `+d` down.
fn invariant_weights(d: u32, n: usize) -> Vec<i64> {
    let d = d as i64;
    (-d..=d)
        .rev()
        .filter(|w| (w - d).rem_euclid(2) == 0 && w.rem_euclid(n as i64) == 0)
        .collect()
}

fn ok_span(f: &BivariatePoly) -> [BivariatePoly; 2] {
    let k = f.field();
    [f.clone(), f.scale(&k.omega())]
}

/// Degree-`d` invariants read off the eigenform expansion: `g(L₁, L₂)` may
/// only contain `L₁ⁱL₂ʲ` with `n | i − j`. Agrees with [`invariant_lattice`].
fn invariants_by_weight(ef: &Eigenforms, d: u32, n: usize) -> Lattice {
    let k = ef.l1.field();
    let dim = 2 * (d as usize + 1);
    let cols: Vec<Vec<Rational>> = (0..dim)
        .map(|idx| {
            let mut g = basis_poly(&k, d, idx).linear_substitute(&ef.back);
            g.terms.retain(|(i, j), _| (*i as i64 - *j as i64).rem_euclid(n as i64) != 0);
            rational_coords(&g, d)
        })
        .collect();
    Lattice::new(&kernel(&integer_rows(&cols), dim), dim)
}

/// Part of `p` lying in the eigenspace of weight `w`.
fn intersect_weight(ef: &Eigenforms, p: &Lattice, d: u32, w: i64) -> Lattice {
    let dim = p.dim;
    if p.rank() == 0 {
        return Lattice::zero(dim);
    }
    let k = ef.l1.field();
    let keep = (((d as i64 + w) / 2) as u32, ((d as i64 - w) / 2) as u32);
    let cols: Vec<Vec<Rational>> = p
        .basis
        .iter()
        .map(|v| {
            let mut g = from_coords(&k, v, d).linear_substitute(&ef.back);
            g.terms.remove(&keep);
            rational_coords(&g, d)
        })
        .collect();
    let combos = kernel(&integer_rows(&cols), cols.len());
    let vecs: Vec<IVec> = combos
        .iter()
        .map(|c| {
            (0..dim)
                .map(|i| c.iter().zip(&p.basis).map(|(ci, b)| ci * &b[i]).sum())
                .collect()
        })
        .collect();
    Lattice::new(&vecs, dim)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedGenerator {
    pub name: String,
    pub poly: BivariatePoly,
    pub degree: u32,
    /// Torus weight; `None` when the action has no weight grading (`n = 2`).
    pub weight: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct InvariantPresentation {
    pub n: usize,
    pub generators: Vec<NamedGenerator>,
    /// Relations that were checked to vanish identically.
    pub relations: Vec<String>,
    pub localized_at: Option<FieldElement>,
    pub degree_bound_used: u32,
}

impl InvariantPresentation {
    pub fn degrees(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.degree).collect()
    }

    pub fn get(&self, name: &str) -> Option<&NamedGenerator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            n: self.n,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorJson {
                    name: g.name.clone(),
                    degree: g.degree,
                    weight: g.weight,
                    poly: g.poly.to_string(),
                })
                .collect(),
            relations: self.relations.clone(),
            localized_at: self.localized_at.as_ref().map(|x| x.to_string()),
            degree_bound: self.degree_bound_used,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorJson {
    pub name: String,
    pub degree: u32,
    pub weight: Option<i64>,
    pub poly: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PresentationJson {
    pub n: usize,
    pub generators: Vec<GeneratorJson>,
    pub relations: Vec<String>,
    pub localized_at: Option<String>,
    pub degree_bound: u32,
}

/// Degree-`d` part of the algebra generated by `gens` over `O_K`.
pub fn generated_lattice(k: &QuadraticField, gens: &[BivariatePoly], d: u32) -> Lattice {
    generated_lattices(k, gens, d).pop().expect("at least degree 0")
}

/// Degree-`e` parts of the algebra generated by `gens`, for `e = 0..=d`.
pub fn generated_lattices(k: &QuadraticField, gens: &[BivariatePoly], d: u32) -> Vec<Lattice> {
    let mut slices: Vec<Lattice> = vec![Lattice::new(
        &[vec![BigInt::one(), BigInt::zero()], vec![BigInt::zero(), BigInt::one()]],
        2,
    )];
    for e in 1..=d {
        let next = products_into(k, gens, &slices, e, None);
        slices.push(next);
    }
    slices
}

/// `Σ_g g·S_{e − deg g}` inside degree `e`, over generators of degree `< e`
/// (or all, when `max_gen_degree` is `None`).
fn products_into(
    k: &QuadraticField,
    gens: &[BivariatePoly],
    slices: &[Lattice],
    e: u32,
    max_gen_degree: Option<u32>,
) -> Lattice {
    let dim = 2 * (e as usize + 1);
    let mut vecs = Vec::new();
    for g in gens {
        let dg = g.degree().unwrap_or(0);
        if dg == 0 || dg > e || max_gen_degree.is_some_and(|m| dg > m) {
            continue;
        }
        for v in &slices[(e - dg) as usize].basis {
            let prod = g.mul(&from_coords(k, v, e - dg));
            vecs.push(coords(&prod, e).expect("products of integral polynomials are integral"));
        }
    }
    Lattice::new(&vecs, dim)
}

fn signed_range(h: i64) -> Vec<i64> {
    let mut v = vec![0];
    for t in 1..=h {
        v.push(t);
        v.push(-t);
    }
    v
}

/// Generators of the piece `m` modulo the decomposables `q` (both `O_K`-stable).
fn piece_generators(k: &QuadraticField, m: &Lattice, q: &Lattice, d: u32) -> Result<Vec<BivariatePoly>> {
    if q.contains_lattice(m) {
        return Ok(vec![]);
    }
    let polys: Vec<_> = m.basis.iter().map(|v| from_coords(k, v, d)).collect();
    let generates = |f: &BivariatePoly| -> bool {
        let span: Vec<IVec> = ok_span(f).iter().map(|g| coords(g, d).expect("integral")).collect();
        q.with(&span).contains_lattice(m)
    };
    if m.rank() == 2 {
        if q.rank() == 0 {
            // M = 𝔞·m₀ for a fractional ideal 𝔞
            let m0 = &polys[0];
            let scalars: Vec<FieldElement> = polys.iter().map(|f| f.ratio(m0).expect("rank-one piece")).collect();
            let a = ideal::ideal_from_generators(&scalars)?;
            return Ok(match ideal::is_principal(&a)? {
                Some(g) => vec![m0.scale(&g)],
                None => a.basis().iter().map(|c| m0.scale(c)).collect(),
            });
        }
        for c1 in signed_range(3) {
            for c2 in signed_range(3) {
                let f = polys[0].scale(&k.int(c1)).add(&polys[1].scale(&k.int(c2)));
                if !f.is_zero() && generates(&f) {
                    return Ok(vec![f]);
                }
            }
        }
    } else {
        if let Some(f) = polys.iter().find(|f| generates(f)) {
            return Ok(vec![f.clone()]);
        }
    }
    // greedy fallback
    let mut cur = q.clone();
    let mut out = Vec::new();
    for f in &polys {
        if cur.contains_lattice(m) {
            break;
        }
        let v = coords(f, d).expect("integral");
        if !cur.contains(&v) {
            let span: Vec<IVec> = ok_span(f).iter().map(|g| coords(g, d).expect("integral")).collect();
            cur = cur.with(&span);
            out.push(f.clone());
        }
    }
    Ok(out)
}

/// Minimal bihomogeneous generators up to `degree_bound`.
pub fn algebra_generators(rho: &GroupElementMatrix, degree_bound: u32) -> Result<InvariantPresentation> {
    generators_impl(rho, degree_bound, false)
}

/// Generators over `K` (denominators allowed): a new generator is needed
/// only where the decomposables miss a whole weight line.
pub fn algebra_generators_over_k(rho: &GroupElementMatrix, degree_bound: u32) -> Result<InvariantPresentation> {
    generators_impl(rho, degree_bound, true)
}

fn generators_impl(rho: &GroupElementMatrix, degree_bound: u32, over_k: bool) -> Result<InvariantPresentation> {
    let n = rho.n();
    if (degree_bound as usize) < n {
        return Err(Error::InvalidArgument(format!("degree bound {degree_bound} is below n = {n}")));
    }
    let k = k_of(rho);
    let mut gens: Vec<(BivariatePoly, Option<i64>)> = Vec::new();
    let ef = (n >= 3).then(|| Eigenforms::new(rho));
    let mut slices: Vec<Lattice> = vec![ok_lattice()];
    for d in 1..=degree_bound {
        let dim = 2 * (d as usize + 1);
        let polys: Vec<BivariatePoly> = gens.iter().map(|(g, _)| g.clone()).collect();
        let p = products_into(&k, &polys, &slices, d, Some(d - 1));
        let inv = match &ef {
            Some(ef) => invariants_by_weight(ef, d, n),
            None => eigen_lattice(rho, d, 0),
        };
        let mut new: Vec<(BivariatePoly, Option<i64>)> = Vec::new();
        if let Some(ef) = &ef {
            for w in invariant_weights(d, n) {
                let m = weight_piece(ef, d, w)?;
                let q = intersect_weight(ef, &p, d, w);
                if over_k {
                    if q.rank() < m.rank() {
                        new.push((from_coords(&k, &m.basis[0], d), Some(w)));
                    }
                } else {
                    for g in piece_generators(&k, &m, &q, d)? {
                        new.push((g, Some(w)));
                    }
                }
            }
        }
        let mut s = p.clone();
        for (g, _) in &new {
            let span: Vec<IVec> = ok_span(g).iter().map(|h| coords(h, d).expect("integral")).collect();
            s = s.with(&span);
        }
        // anything not reached by the bihomogeneous pieces
        let missing = if over_k {
            s.rank() < inv.rank()
        } else {
            !s.contains_lattice(&inv)
        };
        if missing {
            let extra = if over_k {
                let mut cur = s.clone();
                let mut out = Vec::new();
                for v in &inv.basis {
                    let cand = cur.with(std::slice::from_ref(v));
                    if cand.rank() > cur.rank() {
                        cur = cand;
                        out.push(from_coords(&k, v, d));
                    }
                }
                out
            } else {
                piece_generators(&k, &inv, &s, d)?
            };
            for g in extra {
                let span: Vec<IVec> = ok_span(&g).iter().map(|h| coords(h, d).expect("integral")).collect();
                s = s.with(&span);
                new.push((g, None));
            }
        }
        debug_assert_eq!(s.dim, dim);
        if !new.is_empty() && d == degree_bound && d > 0 {
            return Err(Error::BoundTooLow(degree_bound));
        }
        gens.extend(new);
        slices.push(if over_k { inv } else { s });
    }
    let generators = gens
        .into_iter()
        .enumerate()
        .map(|(i, (poly, weight))| {
            debug_assert!(is_invariant(&poly, rho));
            NamedGenerator {
                name: format!("G{}", i + 1),
                degree: poly.degree().unwrap_or(0),
                poly,
                weight: if n >= 3 { weight } else { None },
            }
        })
        .collect();
    Ok(InvariantPresentation {
        n,
        generators,
        relations: vec![],
        localized_at: None,
        degree_bound_used: degree_bound,
    })
}

/// `dim_K` of the degree-`d` invariants.
pub fn invariant_dimension(rho: &GroupElementMatrix, d: u32) -> usize {
    eigen_lattice(rho, d, 0).rank() / 2
}

/// `#{(i, j) : i + j = d, i ≡ j mod n}`.
pub fn expected_dimension(n: usize, d: u32) -> usize {
    (0..=d).filter(|i| (2 * *i as i64 - d as i64).rem_euclid(n as i64) == 0).count()
}

// ---------------------------------------------------------------------------
// Relations

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    pres: &'a InvariantPresentation,
    k: QuadraticField,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at position {}", self.pos))
    }

    fn expr(&mut self) -> Result<BivariatePoly> {
        let mut acc = BivariatePoly::zero(&self.k);
        let mut sign = 1;
        if let Some(c @ ('+' | '-')) = self.peek() {
            sign = if c == '-' { -1 } else { 1 };
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<BivariatePoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<BivariatePoly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: u32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| self.err("bad exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BivariatePoly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '/') {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                let q = arith::parse_rational(&text).ok_or_else(|| self.err("bad number"))?;
                Ok(BivariatePoly::constant(self.k.from_rational(q)))
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if let Some(g) = self.pres.get(&name) {
                    return Ok(g.poly.clone());
                }
                match name.as_str() {
                    "s" if !self.k.is_rational() => Ok(BivariatePoly::constant(self.k.sqrt_d())),
                    "h" if self.k.omega_kind() == crate::qfield::OmegaKind::Half => {
                        Ok(BivariatePoly::constant(self.k.omega()))
                    }
                    "x" => Ok(BivariatePoly::x(&self.k)),
                    "y" => Ok(BivariatePoly::y(&self.k)),
                    _ => Err(Error::UnknownGeneratorName(name)),
                }
            }
            _ => Err(self.err("unexpected character")),
        }
    }
}

/// Evaluate an expression in the generator names (plus `s`, `h`, `x`, `y`).
pub fn evaluate(pres: &InvariantPresentation, k: &QuadraticField, text: &str) -> Result<BivariatePoly> {
    let mut p = ExprParser {
        chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
        pres,
        k: *k,
    };
    let v = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Each relation expands to the zero polynomial.
pub fn verify_relations(pres: &InvariantPresentation, k: &QuadraticField, relations: &[String]) -> Result<Vec<bool>> {
    relations.iter().map(|r| Ok(evaluate(pres, k, r)?.is_zero())).collect()
}

/// Attach the relations that verify.
pub fn with_relations(mut pres: InvariantPresentation, k: &QuadraticField, relations: &[String]) -> Result<InvariantPresentation> {
    for (r, ok) in relations.iter().zip(verify_relations(&pres, k, relations)?) {
        if ok {
            pres.relations.push(r.clone());
        }
    }
    Ok(pres)
}

/// Rank over `K` of a list of polynomials.
fn k_rank(k: &QuadraticField, polys: &[BivariatePoly]) -> usize {
    let keys: Vec<(u32, u32)> = {
        let mut v: Vec<_> = polys.iter().flat_map(|p| p.terms().map(|(key, _)| *key)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut rows: Vec<Vec<FieldElement>> = polys
        .iter()
        .map(|p| keys.iter().map(|(i, j)| p.coeff(*i, *j)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..keys.len() {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, piv);
        let inv = rows[rank][col].inv().expect("nonzero pivot");
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = &rows[r][col] * &inv;
                for c in col..keys.len() {
                    let t = &f * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &t;
                }
            }
        }
        rank += 1;
    }
    let _ = k;
    rank
}

/// Dimension over `K` of the linear relations among generator monomials of
/// total `(x, y)`-degree `d`.
pub fn k_syzygy_count(pres: &InvariantPresentation, k: &QuadraticField, d: u32) -> usize {
    let mut monos: Vec<BivariatePoly> = Vec::new();
    fn rec(gens: &[NamedGenerator], start: usize, left: u32, cur: BivariatePoly, out: &mut Vec<BivariatePoly>) {
        if left == 0 {
            out.push(cur);
            return;
        }
        for i in start..gens.len() {
            if gens[i].degree <= left && gens[i].degree > 0 {
                rec(gens, i, left - gens[i].degree, cur.mul(&gens[i].poly), out);
            }
        }
    }
    rec(&pres.generators, 0, d, BivariatePoly::constant(k.one()), &mut monos);
    monos.len() - k_rank(k, &monos)
}

// ---------------------------------------------------------------------------
// Localizations and fibers

/// Invariants over `O_K[1/s]`, where the embedding becomes standard.
pub fn localized_presentation(e: &ConjugatedEmbedding, invert: &FieldElement) -> Result<InvariantPresentation> {
    let Some(patch) = embed::find_patch(e, invert)? else {
        return Err(Error::CoverNotFound { bound: 1 });
    };
    let binv = patch.conjugator.inv().expect("invertible");
    let v = BivariatePoly::linear(binv.at(0, 0), binv.at(0, 1));
    let w = BivariatePoly::linear(binv.at(1, 0), binv.at(1, 1));
    let n = e.n as u32;
    let raw = [(v.pow(n), n as i64), (w.pow(n), -(n as i64)), (v.mul(&w), 0)];
    let generators = raw
        .into_iter()
        .enumerate()
        .map(|(i, (poly, wt))| {
            assert!(is_invariant(&poly, &e.rho), "localized generator is not invariant");
            assert!(poly.terms().all(|(_, c)| embed::in_localization(c, invert)));
            NamedGenerator {
                name: format!("G{}", i + 1),
                degree: poly.degree().unwrap_or(0),
                poly,
                weight: Some(wt),
            }
        })
        .collect();
    Ok(InvariantPresentation {
        n: e.n,
        generators,
        relations: vec!["G1*G2 - G3^n".replace('n', &n.to_string())],
        localized_at: Some(invert.clone()),
        degree_bound_used: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RdpFamily {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RdpType {
    pub family: RdpFamily,
    pub index: usize,
    pub base: String,
}

impl RdpType {
    pub fn new(family: RdpFamily, index: usize, base: String) -> Self {
        RdpType { family, index, base }
    }
}

impl fmt::Display for RdpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}_{} over {}", self.family, self.index, self.base)
    }
}

/// Fiber type with the local presentation it was read off from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub rdp: RdpType,
    /// `[Z, X, Y]`: weight 0, `+n`, `−n`.
    pub generators: Option<[String; 3]>,
    /// `κ` with `X·Y = κ·Zⁿ`.
    pub kappa: Option<String>,
    pub presentation: Option<String>,
}

/// The object whose fibers are typed.
pub enum FiberSubject<'a> {
    Twist(&'a TwistDescriptor),
    Embedding(&'a ConjugatedEmbedding),
}

pub enum FiberPoint<'a> {
    Prime(&'a FracIdeal),
    Generic,
}

/// Fiber type of a twist or explicit embedding over a prime or the generic point.
pub fn fiber_type(subject: FiberSubject<'_>, point: FiberPoint<'_>, n: usize) -> Result<FiberReport> {
    match subject {
        FiberSubject::Twist(t) => {
            let prime = match point {
                FiberPoint::Prime(p) => Some(p),
                FiberPoint::Generic => None,
            };
            Ok(FiberReport {
                rdp: klein::twist_fiber_type(t, prime, n)?,
                generators: None,
                kappa: None,
                presentation: None,
            })
        }
        FiberSubject::Embedding(e) => {
            let pres = algebra_generators(&e.rho, 2 * e.n as u32)?;
            fiber_from_presentation(&pres, &e.field(), point)
        }
    }
}

/// Scalar ideal of the generators of one weight piece, relative to the first.
fn piece_scalars(gens: &[&NamedGenerator]) -> Vec<FieldElement> {
    let m0 = &gens[0].poly;
    gens.iter().map(|g| g.poly.ratio(m0).expect("same weight line")).collect()
}

fn valuation_at(x: &FieldElement, p: &FracIdeal) -> Result<i64> {
    Ok(FracIdeal::principal(x)?.valuation(p))
}

/// Read off `Z, X, Y` with `X·Y = κ·Zⁿ`, choosing among the listed
/// generators of each weight one that generates its piece locally at `𝔭`.
pub fn fiber_from_presentation(
    pres: &InvariantPresentation,
    k: &QuadraticField,
    point: FiberPoint<'_>,
) -> Result<FiberReport> {
    let n = pres.n;
    let pick = |deg: u32, w: i64| -> Result<&NamedGenerator> {
        let cands = weight_class(pres, deg, w);
        if cands.is_empty() {
            return Err(Error::InvalidArgument(format!("no generator of degree {deg} and weight {w}")));
        }
        let FiberPoint::Prime(p) = &point else { return Ok(cands[0]) };
        let vals: Vec<i64> = piece_scalars(&cands).iter().map(|c| valuation_at(c, p)).collect::<Result<_>>()?;
        let best = *vals.iter().min().expect("nonempty");
        Ok(cands[vals.iter().position(|v| *v == best).expect("minimum present")])
    };
    let (z, x, y) = if n == 2 {
        // μ₂ acts by −1: every quadratic form is invariant
        let find = |i: u32, j: u32| {
            pres.generators
                .iter()
                .find(|g| g.poly.terms().count() == 1 && g.poly.coeff(i, j).is_one())
        };
        match (find(1, 1), find(2, 0), find(0, 2)) {
            (Some(z), Some(x), Some(y)) => (z, x, y),
            _ => return Err(Error::InvalidArgument("expected x^2, xy, y^2 among the generators".into())),
        }
    } else {
        (pick(2, 0)?, pick(n as u32, n as i64)?, pick(n as u32, -(n as i64))?)
    };
    read_fiber(pres, k, [z, x, y], &point)?.ok_or_else(|| {
        Error::InvalidArgument(format!("κ for {}, {}, {} is not a local unit", z.name, x.name, y.name))
    })
}

fn weight_class(pres: &InvariantPresentation, deg: u32, w: i64) -> Vec<&NamedGenerator> {
    pres.generators
        .iter()
        .filter(|g| g.degree == deg && (pres.n == 2 || g.weight == Some(w)))
        .collect()
}

/// The fiber read off a fixed triple `[Z, X, Y]` of generator names, or
/// `None` when the triple does not present the fiber at `𝔭`: one of them
/// fails to generate its weight piece locally, or `κ` is not a `𝔭`-unit.
pub fn local_presentation(
    pres: &InvariantPresentation,
    k: &QuadraticField,
    names: [&str; 3],
    point: FiberPoint<'_>,
) -> Result<Option<FiberReport>> {
    let mut triple = Vec::new();
    for name in names {
        let g = pres.get(name).ok_or_else(|| Error::UnknownGeneratorName(name.to_string()))?;
        if let (FiberPoint::Prime(p), Some(w)) = (&point, g.weight) {
            let cands = weight_class(pres, g.degree, w);
            let m0 = &cands[0].poly;
            let own = valuation_at(&g.poly.ratio(m0).expect("same weight line"), p)?;
            for c in piece_scalars(&cands) {
                if valuation_at(&c, p)? < own {
                    return Ok(None);
                }
            }
        }
        triple.push(g);
    }
    read_fiber(pres, k, [triple[0], triple[1], triple[2]], &point)
}

fn read_fiber(
    pres: &InvariantPresentation,
    k: &QuadraticField,
    [z, x, y]: [&NamedGenerator; 3],
    point: &FiberPoint<'_>,
) -> Result<Option<FiberReport>> {
    let n = pres.n;
    let base = match point {
        FiberPoint::Prime(p) => format!("O_K/{p}"),
        FiberPoint::Generic => "K".to_string(),
    };
    let zn = z.poly.pow(n as u32);
    let kappa = x
        .poly
        .mul(&y.poly)
        .ratio(&zn)
        .ok_or_else(|| Error::InvalidArgument("X·Y is not a multiple of Z^n".into()))?;
    if let FiberPoint::Prime(p) = point {
        if valuation_at(&kappa, p)? != 0 {
            return Ok(None);
        }
    }
    let _ = k;
    let kstr = kappa.to_string();
    let presentation = format!(
        "({base})[{z},{x},{y}]/({kc}{z}^{n} - {x}*{y})",
        z = z.name,
        x = x.name,
        y = y.name,
        kc = if kappa.is_one() { String::new() } else { format!("{}*", paren(&kstr)) },
    );
    Ok(Some(FiberReport {
        rdp: RdpType::new(RdpFamily::A, n - 1, base),
        generators: Some([z.name.clone(), x.name.clone(), y.name.clone()]),
        kappa: Some(kstr),
        presentation: Some(presentation),
    }))
}

fn paren(s: &str) -> String {
    if s.chars().skip(1).any(|c| c == '+' || c == '-') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

// ---------------------------------------------------------------------------
// The family A = [[q, s], [−s, q]] with s = √(−dq)

/// Parameters `q`, `d` with `K = Q(√(−dq))` and the matrix `[[q, s], [−s, q]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormPattern {
    pub q: i64,
    pub d: i64,
}

impl NormPattern {
    pub fn field(&self) -> Result<QuadraticField> {
        QuadraticField::new(-self.d * self.q)
    }

    pub fn matrix(&self) -> Result<Mat2> {
        let k = self.field()?;
        if k.omega_kind() != crate::qfield::OmegaKind::Sqrt {
            return Err(Error::InvalidArgument("pattern needs −dq ≢ 1 mod 4".into()));
        }
        let s = k.sqrt_d();
        Ok(Mat2::new(k.int(self.q), s.clone(), -s, k.int(self.q)))
    }

    pub fn embedding(&self, n: usize) -> Result<ConjugatedEmbedding> {
        ConjugatedEmbedding::new(self.matrix()?, n)
    }

    /// Named generators: `A, B, C, B', C'` for odd `n`; `A, V, W` for even `n`.
    ///
    /// With `L₁ = qx − sy`, `L₂ = sx + qy` (the eigenforms of weight `±1`):
    /// `A = L₁L₂/(−q)`, `B' = L₁ⁿ/(−q)^{(n−1)/2}`, `B = s·L₁ⁿ/(−q)^{(n+1)/2}`,
    /// and `C, C'` likewise with `L₂`; for even `n`, `V = L₁ⁿ/(−q)^{n/2}`.
    pub fn presentation(&self, n: usize) -> Result<InvariantPresentation> {
        let k = self.field()?;
        let s = k.sqrt_d();
        let q = k.int(self.q);
        let mq = k.int(-self.q);
        let l1 = BivariatePoly::linear(&q, &(-&s));
        let l2 = BivariatePoly::linear(&s, &q);
        let inv_pow = |e: u32| mq.pow(e).inv().expect("nonzero");
        let nn = n as u32;
        let ni = n as i64;
        let mut gens = vec![("A", l1.mul(&l2).scale(&inv_pow(1)), 2, 0)];
        if n % 2 == 1 {
            let (lo, hi) = ((nn - 1) / 2, (nn + 1) / 2);
            gens.push(("B", l1.pow(nn).scale(&(&s * &inv_pow(hi))), nn, ni));
            gens.push(("C", l2.pow(nn).scale(&(&s * &inv_pow(hi))), nn, -ni));
            gens.push(("B'", l1.pow(nn).scale(&inv_pow(lo)), nn, ni));
            gens.push(("C'", l2.pow(nn).scale(&inv_pow(lo)), nn, -ni));
        } else {
            gens.push(("V", l1.pow(nn).scale(&inv_pow(nn / 2)), nn, ni));
            gens.push(("W", l2.pow(nn).scale(&inv_pow(nn / 2)), nn, -ni));
        }
        let e = self.embedding(n)?;
        let generators: Vec<NamedGenerator> = gens
            .into_iter()
            .map(|(name, poly, degree, w)| {
                assert!(poly.is_integral(), "{name} is not integral");
                assert!(is_invariant(&poly, &e.rho), "{name} is not invariant");
                NamedGenerator {
                    name: name.to_string(),
                    poly,
                    degree,
                    weight: Some(w),
                }
            })
            .collect();
        let pres = InvariantPresentation {
            n,
            generators,
            relations: vec![],
            localized_at: None,
            degree_bound_used: nn,
        };
        let rels = self.relations(n);
        with_relations(pres, &k, &rels)
    }

    /// The relation list for the named generators.
    pub fn relations(&self, n: usize) -> Vec<String> {
        let (q, d) = (self.q, self.d);
        if n % 2 == 1 {
            vec![
                format!("s*B' + {q}*B"),
                format!("s*C' + {q}*C"),
                format!("s*B - {d}*B'"),
                format!("s*C - {d}*C'"),
                format!("{d}*A^{n} - B*C"),
                format!("{q}*A^{n} + B'*C'"),
                format!("s*A^{n} - B'*C"),
                format!("s*A^{n} - B*C'"),
            ]
        } else {
            vec![format!("A^{n} - V*W")]
        }
    }
}

/// Equal `Z`-lattices spanned by two generator lists up to degree `d`.
pub fn same_generated_lattices(k: &QuadraticField, a: &[BivariatePoly], b: &[BivariatePoly], d: u32) -> bool {
    generated_lattices(k, a, d) == generated_lattices(k, b, d)
}

/// Degree-`d` invariants as a lattice.
pub fn invariant_lattice_of(rho: &GroupElementMatrix, d: u32) -> Lattice {
    eigen_lattice(rho, d, 0)
}

/// Count of generators per degree.
pub fn degree_histogram(pres: &InvariantPresentation) -> HashMap<u32, usize> {
    let mut h = HashMap::new();
    for g in &pres.generators {
        *h.entry(g.degree).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::make_field;

    fn standard(k: &QuadraticField, n: usize) -> GroupElementMatrix {
        GroupElementMatrix::standard(k, n)
    }

    #[test]
    fn coaction_examples() {
        let k = make_field(-5).unwrap();
        let rho = standard(&k, 3);
        let x = BivariatePoly::x(&k);
        let y = BivariatePoly::y(&k);
        assert!(is_invariant(&x.mul(&y), &rho));
        assert!(is_invariant(&x.pow(3), &rho));
        let cx = coaction(&x, &rho);
        assert_eq!(cx[1], x);
        assert!(cx[0].is_zero() && cx[2].is_zero());
    }

    #[test]
    fn standard_invariant_lattices() {
        let k = make_field(-5).unwrap();
        let rho = standard(&k, 3);
        assert_eq!(invariant_lattice(&rho, 2).len(), 2);
        assert_eq!(invariant_lattice(&rho, 3).len(), 4);
        let pres = algebra_generators(&rho, 6).unwrap();
        assert_eq!(pres.degrees(), vec![2, 3, 3]);
        let x = BivariatePoly::x(&k);
        let y = BivariatePoly::y(&k);
        let polys: Vec<_> = pres.generators.iter().map(|g| g.poly.clone()).collect();
        assert_eq!(polys, vec![x.mul(&y), x.pow(3), y.pow(3)]);
    }

    #[test]
    fn pattern_relations_hold() {
        for (q, d) in [(7, 6), (11, 10)] {
            let pat = NormPattern { q, d };
            for n in [3, 5] {
                let pres = pat.presentation(n).unwrap();
                assert_eq!(pres.relations.len(), 8, "q={q} n={n}");
            }
            assert_eq!(pat.presentation(4).unwrap().relations.len(), 1);
        }
    }

    #[test]
    fn pattern_generator_counts() {
        let pat = NormPattern { q: 7, d: 6 };
        let e = pat.embedding(3).unwrap();
        let pres = algebra_generators(&e.rho, 6).unwrap();
        assert_eq!(pres.degrees(), vec![2, 3, 3, 3, 3]);
        let e4 = pat.embedding(4).unwrap();
        assert_eq!(algebra_generators(&e4.rho, 8).unwrap().degrees(), vec![2, 4, 4]);
        let overk = algebra_generators_over_k(&e.rho, 6).unwrap();
        assert_eq!(overk.degrees(), vec![2, 3, 3]);
    }

    #[test]
    fn relation_parser() {
        let pat = NormPattern { q: 7, d: 6 };
        let pres = pat.presentation(3).unwrap();
        let k = pat.field().unwrap();
        let r = verify_relations(&pres, &k, &["6*A^3 - B*C + 1".to_string()]).unwrap();
        assert_eq!(r, vec![false]);
        assert!(matches!(
            verify_relations(&pres, &k, &["Q*A".to_string()]),
            Err(Error::UnknownGeneratorName(_))
        ));
    }

    #[test]
    fn weight_invariants_match_coaction() {
        let pat = NormPattern { q: 7, d: 6 };
        for n in [3, 4] {
            let e = pat.embedding(n).unwrap();
            let ef = Eigenforms::new(&e.rho);
            for d in 0..=2 * n as u32 {
                assert_eq!(invariants_by_weight(&ef, d, n), eigen_lattice(&e.rho, d, 0), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn hilbert_dimensions() {
        let pat = NormPattern { q: 7, d: 6 };
        let e = pat.embedding(3).unwrap();
        for d in 0..=6 {
            assert_eq!(invariant_dimension(&e.rho, d), expected_dimension(3, d), "d={d}");
        }
    }
}
