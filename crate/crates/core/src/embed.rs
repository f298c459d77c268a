//! Conjugated embeddings `u ↦ A·diag(u, u^{n−1})·A⁻¹` of `μ_n` into `SL₂`.
//!
//! Group elements are 2×2 matrices over `K[u]/(uⁿ − 1)`, stored
//! coefficient-wise. Integrality of a conjugate is always checked on every
//! `u`-coefficient, so `n = 2` (where `u = u^{n−1}`) needs no special case.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Rational};
use crate::classfield::{self, UnramifiedQuadExt};
use crate::error::{Error, Result};
use crate::ideal::{self, FracIdeal};
use crate::klein::{Provenance, TwistDescriptor};
use crate::qfield::{ElementJson, FieldElement, QuadraticField};

/// A 2×2 matrix over `K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2(pub [[FieldElement; 2]; 2]);

impl Mat2 {
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity(k: &QuadraticField) -> Self {
        Mat2::new(k.one(), k.zero(), k.zero(), k.one())
    }

    pub fn diag(x: FieldElement, y: FieldElement) -> Self {
        let k = x.field();
        Mat2::new(x, k.zero(), k.zero(), y)
    }

    pub fn field(&self) -> QuadraticField {
        self.0[0][0].field()
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElement {
        &self.0[i][j]
    }

    pub fn det(&self) -> FieldElement {
        let m = &self.0;
        &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (m, n) = (&self.0, &o.0);
        let e = |i: usize, j: usize| &(&m[i][0] * &n[0][j]) + &(&m[i][1] * &n[1][j]);
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn inv(&self) -> Option<Mat2> {
        let det_inv = self.det().inv()?;
        let m = &self.0;
        Some(Mat2::new(
            &m[1][1] * &det_inv,
            &(-&m[0][1]) * &det_inv,
            &(-&m[1][0]) * &det_inv,
            &m[0][0] * &det_inv,
        ))
    }

    pub fn is_integral(&self) -> bool {
        self.entries().all(|x| x.is_integral())
    }

    /// In `GL₂(O_K)`: integral with unit determinant.
    pub fn is_invertible_integral(&self) -> bool {
        self.is_integral() && self.det().is_unit()
    }

    pub fn entries(&self) -> impl Iterator<Item = &FieldElement> {
        self.0.iter().flatten()
    }

    pub fn column(&self, j: usize) -> [FieldElement; 2] {
        [self.0[0][j].clone(), self.0[1][j].clone()]
    }

    pub fn row(&self, i: usize) -> [FieldElement; 2] {
        self.0[i].clone()
    }

    /// Parse `[[e, e], [e, e]]`, or `{"entries": [[e, e], [e, e]], "n": n}`, where each
    /// entry is a JSON integer, an element string or an element object.
    pub fn parse(k: &QuadraticField, text: &str) -> Result<Mat2> {
        let mut v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix: {e}")))?;
        if let Some(entries) = v.get_mut("entries") {
            v = entries.take();
        }
        let rows = v
            .as_array()
            .filter(|r| r.len() == 2)
            .ok_or_else(|| Error::Parse("matrix must have two rows".into()))?;
        let mut out = Vec::new();
        for r in rows {
            let r = r
                .as_array()
                .filter(|r| r.len() == 2)
                .ok_or_else(|| Error::Parse("matrix rows must have two entries".into()))?;
            for e in r {
                out.push(parse_entry(k, e)?);
            }
        }
        let mut it = out.into_iter();
        let mut next = || it.next().expect("four entries");
        Ok(Mat2::new(next(), next(), next(), next()))
    }

    pub fn to_json(&self) -> [[ElementJson; 2]; 2] {
        let m = &self.0;
        [
            [m[0][0].to_json(), m[0][1].to_json()],
            [m[1][0].to_json(), m[1][1].to_json()],
        ]
    }

    pub fn to_strings(&self) -> [[String; 2]; 2] {
        let m = &self.0;
        [
            [m[0][0].to_string(), m[0][1].to_string()],
            [m[1][0].to_string(), m[1][1].to_string()],
        ]
    }
}

fn parse_entry(k: &QuadraticField, e: &serde_json::Value) -> Result<FieldElement> {
    match e {
        serde_json::Value::Number(n) => {
            let s = n.to_string();
            k.parse_element(&s)
        }
        serde_json::Value::String(s) => k.parse_element(s),
        serde_json::Value::Object(_) => {
            let ej: ElementJson =
                serde_json::from_value(e.clone()).map_err(|err| Error::Parse(err.to_string()))?;
            ej.to_element(k)
        }
        _ => Err(Error::Parse(format!("bad matrix entry {e}"))),
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_strings();
        write!(f, "[[{}, {}], [{}, {}]]", s[0][0], s[0][1], s[1][0], s[1][1])
    }
}

/// Polynomial in `K[u]/(uⁿ − 1)`, coefficients of `u⁰ … u^{n−1}`.
pub type UPoly = Vec<FieldElement>;

fn upoly_zero(k: &QuadraticField, n: usize) -> UPoly {
    vec![k.zero(); n]
}

fn upoly_mul(p: &UPoly, q: &UPoly) -> UPoly {
    let n = p.len();
    let k = p[0].field();
    let mut out = upoly_zero(&k, n);
    for (i, x) in p.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in q.iter().enumerate() {
            if !y.is_zero() {
                out[(i + j) % n] = &out[(i + j) % n] + &(x * y);
            }
        }
    }
    out
}

fn upoly_add(p: &UPoly, q: &UPoly) -> UPoly {
    p.iter().zip(q).map(|(x, y)| x + y).collect()
}

fn upoly_sub(p: &UPoly, q: &UPoly) -> UPoly {
    p.iter().zip(q).map(|(x, y)| x - y).collect()
}

fn upoly_scale(p: &UPoly, c: &FieldElement) -> UPoly {
    p.iter().map(|x| x * c).collect()
}

/// `c·uᵉ`.
fn monomial(k: &QuadraticField, n: usize, e: usize, c: FieldElement) -> UPoly {
    let mut p = upoly_zero(k, n);
    p[e % n] = &p[e % n] + &c;
    p
}

/// A 2×2 matrix over `K[u]/(uⁿ − 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElementMatrix {
    n: usize,
    entries: [[UPoly; 2]; 2],
}

impl GroupElementMatrix {
    /// `diag(u, u^{n−1})`.
    pub fn standard(k: &QuadraticField, n: usize) -> Self {
        GroupElementMatrix {
            n,
            entries: [
                [monomial(k, n, 1, k.one()), upoly_zero(k, n)],
                [upoly_zero(k, n), monomial(k, n, n - 1, k.one())],
            ],
        }
    }

    /// Build from raw `u`-coefficient vectors of length `n`.
    pub fn from_entries(n: usize, entries: [[UPoly; 2]; 2]) -> Self {
        assert!(entries.iter().flatten().all(|p| p.len() == n), "coefficient vectors must have length n");
        GroupElementMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &UPoly {
        &self.entries[i][j]
    }

    pub fn det(&self) -> UPoly {
        let e = &self.entries;
        upoly_sub(&upoly_mul(&e[0][0], &e[1][1]), &upoly_mul(&e[0][1], &e[1][0]))
    }

    /// `det = 1` in `K[u]/(uⁿ − 1)`.
    pub fn has_unit_det(&self) -> bool {
        let d = self.det();
        d[0].is_one() && d[1..].iter().all(|x| x.is_zero())
    }

    /// The matrix at `u = 1`.
    pub fn eval_at_one(&self) -> Mat2 {
        let s = |p: &UPoly| p.iter().fold(p[0].field().zero(), |acc, x| &acc + x);
        let e = &self.entries;
        Mat2::new(s(&e[0][0]), s(&e[0][1]), s(&e[1][0]), s(&e[1][1]))
    }

    /// First coefficient outside `O_K`: `(row, col, power, value)`.
    pub fn first_nonintegral(&self) -> Option<(usize, usize, usize, FieldElement)> {
        for i in 0..2 {
            for j in 0..2 {
                for (e, c) in self.entries[i][j].iter().enumerate() {
                    if !c.is_integral() {
                        return Some((i, j, e, c.clone()));
                    }
                }
            }
        }
        None
    }

    pub fn is_integral(&self) -> bool {
        self.first_nonintegral().is_none()
    }

    /// `L·M·R` for constant matrices `L`, `R`.
    pub fn sandwich(&self, l: &Mat2, r: &Mat2) -> GroupElementMatrix {
        let k = l.field();
        let n = self.n;
        let mut mid: [[UPoly; 2]; 2] = Default::default();
        for (i, row) in mid.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = upoly_zero(&k, n);
                for t in 0..2 {
                    acc = upoly_add(&acc, &upoly_scale(&self.entries[i][t], r.at(t, j)));
                }
                *slot = acc;
            }
        }
        let mut out: [[UPoly; 2]; 2] = Default::default();
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = upoly_zero(&k, n);
                for t in 0..2 {
                    acc = upoly_add(&acc, &upoly_scale(&mid[t][j], l.at(i, t)));
                }
                *slot = acc;
            }
        }
        GroupElementMatrix { n, entries: out }
    }

    /// Entries as `u`-coefficient strings, for reports.
    pub fn to_strings(&self) -> Vec<Vec<Vec<String>>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.iter().map(|c| c.to_string()).collect()).collect())
            .collect()
    }

    /// Human-readable polynomial for entry `(i, j)`, e.g. `3*u - 2*u^3`.
    pub fn entry_string(&self, i: usize, j: usize) -> String {
        let mut parts = Vec::new();
        for (e, c) in self.entries[i][j].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match e {
                0 => String::new(),
                1 => "u".to_string(),
                _ => format!("u^{e}"),
            };
            let coef = if c.b.is_zero() {
                arith::rational_to_string(&c.a)
            } else {
                format!("({c})")
            };
            parts.push(match (mono.is_empty(), coef.as_str()) {
                (true, _) => coef.clone(),
                (false, "1") => mono,
                (false, "-1") => format!("-{mono}"),
                _ => format!("{coef}*{mono}"),
            });
        }
        if parts.is_empty() {
            return "0".into();
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// `ρ_A(u) = A·diag(u, u^{n−1})·A⁻¹` over `K`, without integrality checks.
pub fn conjugate_over_k(a: &Mat2, n: usize) -> Result<GroupElementMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} must be at least 2")));
    }
    let k = a.field();
    let delta = a.det();
    let dinv = delta.inv().ok_or(Error::Singular)?;
    let m = &a.0;
    let (pa, pb, pc, pd) = (&m[0][0], &m[0][1], &m[1][0], &m[1][1]);
    let ad = &(pa * pd) * &dinv;
    let bc = &(pb * pc) * &dinv;
    let ab = &(pa * pb) * &dinv;
    let cd = &(pc * pd) * &dinv;
    let u = |c: &FieldElement| monomial(&k, n, 1, c.clone());
    let ui = |c: &FieldElement| monomial(&k, n, n - 1, c.clone());
    let entries = [
        [upoly_sub(&u(&ad), &ui(&bc)), upoly_sub(&ui(&ab), &u(&ab))],
        [upoly_sub(&u(&cd), &ui(&cd)), upoly_sub(&ui(&ad), &u(&bc))],
    ];
    Ok(GroupElementMatrix { n, entries })
}

/// `ρ_A(u)`, required to be defined over `O_K`.
pub fn conjugate_standard(a: &Mat2, n: usize) -> Result<GroupElementMatrix> {
    let rho = conjugate_over_k(a, n)?;
    if let Some((row, col, power, value)) = rho.first_nonintegral() {
        return Err(Error::NotIntegral {
            row,
            col,
            power,
            value: value.to_string(),
        });
    }
    debug_assert!(rho.has_unit_det());
    Ok(rho)
}

/// A matrix `A` whose conjugate of the standard embedding is integral.
#[derive(Debug, Clone)]
pub struct ConjugatedEmbedding {
    pub a: Mat2,
    pub n: usize,
    pub delta: FieldElement,
    pub column_ideals: (FracIdeal, FracIdeal),
    /// Integrality certificate: the conjugate itself.
    pub rho: GroupElementMatrix,
}

impl ConjugatedEmbedding {
    pub fn new(a: Mat2, n: usize) -> Result<Self> {
        let rho = conjugate_standard(&a, n)?;
        let delta = a.det();
        let i1 = ideal::ideal_from_generators(&a.column(0))?;
        let i2 = ideal::ideal_from_generators(&a.column(1))?;
        let emb = ConjugatedEmbedding {
            a,
            n,
            delta,
            column_ideals: (i1, i2),
            rho,
        };
        assert!(
            emb.column_ideals.0.mul(&emb.column_ideals.1).contains(&emb.delta),
            "det must lie in the product of the column ideals"
        );
        Ok(emb)
    }

    pub fn field(&self) -> QuadraticField {
        self.a.field()
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            entries: self.a.to_json(),
            n: self.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub entries: [[ElementJson; 2]; 2],
    pub n: usize,
}

/// Check `B⁻¹·ρ·B = diag(u, u^{n−1})` exactly and `B ∈ GL₂(O_K)`.
pub fn verify_conjugator(rho: &GroupElementMatrix, b: &Mat2) -> bool {
    let k = b.field();
    let Some(binv) = b.inv() else { return false };
    b.is_invertible_integral() && rho.sandwich(&binv, b) == GroupElementMatrix::standard(&k, rho.n())
}

/// A conjugator `B ∈ GL₂(O_K)` to the standard embedding, or `None`.
///
/// For `n ≥ 3` one exists exactly when `(Δ) = I₁·I₂` and `I₁` is principal;
/// with `I₁ = (g)` the conjugator is `A·diag(1/g, g/Δ)`. For `n = 2` the
/// embedding is central and the identity works.
pub fn is_conjugate_to_standard(e: &ConjugatedEmbedding) -> Result<Option<Mat2>> {
    let k = e.field();
    if e.n == 2 {
        let b = Mat2::identity(&k);
        assert!(verify_conjugator(&e.rho, &b));
        return Ok(Some(b));
    }
    let (i1, i2) = &e.column_ideals;
    if i1.mul(i2) != FracIdeal::principal(&e.delta)? {
        return Ok(None);
    }
    let Some(g) = ideal::is_principal(i1)? else { return Ok(None) };
    let ginv = g.inv().expect("nonzero generator");
    let l2 = g.div(&e.delta).expect("nonzero det");
    let b = e.a.mul(&Mat2::diag(ginv, l2));
    assert!(verify_conjugator(&e.rho, &b), "conjugator certificate failed for {}", e.a);
    Ok(Some(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Line {
    Row,
    Column,
}

/// One reduction step: line `index` was divided by `generator` of `prime`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub prime: FracIdeal,
    pub generator: FieldElement,
    pub line: Line,
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub a_reduced: Mat2,
    pub steps: Vec<ReductionStep>,
}

fn line_in(a: &Mat2, line: Line, idx: usize, p: &FracIdeal) -> bool {
    let v = match line {
        Line::Row => a.row(idx),
        Line::Column => a.column(idx),
    };
    v.iter().all(|x| p.contains(x))
}

fn divide_line(a: &Mat2, line: Line, idx: usize, pi: &FieldElement) -> Mat2 {
    let pinv = pi.inv().expect("nonzero");
    let mut m = a.0.clone();
    for t in 0..2 {
        let (i, j) = match line {
            Line::Row => (idx, t),
            Line::Column => (t, idx),
        };
        m[i][j] = &m[i][j] * &pinv;
    }
    Mat2(m)
}

/// Divide rows or columns of `A` by generators of principal primes dividing
/// `det A` until the determinant is a unit.
///
/// Columns are preferred: `A·diag(1/π, 1)` leaves `ρ_A` unchanged for every
/// `n`, while a row division only does so for `n = 2`.
pub fn reduce_conjugator(a: &Mat2) -> Result<Reduction> {
    if !a.is_integral() {
        return Err(Error::InvalidArgument("reduce_conjugator needs an integral matrix".into()));
    }
    let mut cur = a.clone();
    let mut steps = Vec::new();
    loop {
        let delta = cur.det();
        if delta.is_zero() {
            return Err(Error::Singular);
        }
        if delta.is_unit() {
            break;
        }
        let primes = ideal::prime_factors(&FracIdeal::principal(&delta)?);
        let mut principal = Vec::new();
        let mut blocked = Vec::new();
        for p in primes {
            match ideal::is_principal(&p)? {
                Some(g) => principal.push((p, g)),
                None => blocked.push(p),
            }
        }
        let mut done = None;
        'search: for (p, g) in &principal {
            for line in [Line::Column, Line::Row] {
                for idx in 0..2 {
                    if line_in(&cur, line, idx, p) {
                        done = Some(ReductionStep {
                            prime: p.clone(),
                            generator: g.clone(),
                            line,
                            index: idx,
                        });
                        break 'search;
                    }
                }
            }
        }
        match done {
            Some(step) => {
                let next = divide_line(&cur, step.line, step.index, &step.generator);
                assert!(next.is_integral());
                assert!(next.det().norm().abs() < delta.norm().abs());
                if step.line == Line::Column {
                    // column scaling commutes with the diagonal torus
                    debug_assert_eq!(conjugate_over_k(&cur, 3)?, conjugate_over_k(&next, 3)?);
                }
                cur = next;
                steps.push(step);
            }
            None => {
                // report the non-principal prime through which a row or column passes
                for line in [Line::Row, Line::Column] {
                    for idx in 0..2 {
                        if let Some(p) = blocked.iter().find(|p| line_in(&cur, line, idx, p)) {
                            return Err(Error::Obstructed { prime: p.to_string() });
                        }
                    }
                }
                if let Some(p) = blocked.first() {
                    return Err(Error::Obstructed { prime: p.to_string() });
                }
                return Err(Error::InvalidArgument(format!(
                    "no row or column of {cur} lies in a prime dividing its determinant"
                )));
            }
        }
    }
    Ok(Reduction { a_reduced: cur, steps })
}

/// One open patch `Spec O_K[1/s]` on which `A·diag(λ₁, λ₂)` conjugates
/// the embedding to the standard one.
#[derive(Debug, Clone)]
pub struct Patch {
    pub s: FieldElement,
    pub lambda: (FieldElement, FieldElement),
    pub conjugator: Mat2,
}

const LOCALIZATION_POWER: u32 = 48;

/// `x ∈ O_K[1/s]`: some `x·s^k` is integral.
pub fn in_localization(x: &FieldElement, s: &FieldElement) -> bool {
    let mut y = x.clone();
    for _ in 0..=LOCALIZATION_POWER {
        if y.is_integral() {
            return true;
        }
        if s.is_unit() {
            return false;
        }
        y = &y * s;
    }
    false
}

pub fn is_unit_in_localization(x: &FieldElement, s: &FieldElement) -> bool {
    match x.inv() {
        Some(xi) => in_localization(x, s) && in_localization(&xi, s),
        None => false,
    }
}

fn dedup_push(pool: &mut Vec<FieldElement>, x: FieldElement) {
    if !x.is_zero() && !x.is_unit() && !pool.contains(&x) {
        pool.push(x);
    }
}

/// Candidate localizing elements and scalings for patches.
fn patch_candidates(e: &ConjugatedEmbedding) -> Result<(Vec<FieldElement>, Vec<(FieldElement, FieldElement)>)> {
    let k = e.field();
    let mut pool: Vec<FieldElement> = Vec::new();
    for x in e.a.entries() {
        dedup_push(&mut pool, x.clone());
    }
    dedup_push(&mut pool, e.delta.clone());
    let dideal = FracIdeal::principal(&e.delta)?;
    if dideal.is_integral() && !dideal.is_unit_ideal() {
        for p in ideal::prime_factors(&dideal) {
            for power in 1..=2 {
                if let Some(g) = ideal::is_principal(&p.pow(power))? {
                    dedup_push(&mut pool, g);
                }
            }
        }
    }
    let inv = |x: &FieldElement| x.inv().expect("nonzero");
    let mut lambdas = vec![(k.one(), k.one())];
    lambdas.extend(pool.iter().map(|x| (inv(x), k.one())));
    lambdas.extend(pool.iter().map(|x| (k.one(), inv(x))));
    for x in &pool {
        for y in &pool {
            lambdas.push((inv(x), inv(y)));
        }
    }
    Ok((pool, lambdas))
}

fn patch_at(e: &ConjugatedEmbedding, s: &FieldElement, lambdas: &[(FieldElement, FieldElement)]) -> Option<Patch> {
    let standard = GroupElementMatrix::standard(&e.field(), e.n);
    for (l1, l2) in lambdas {
        let b = e.a.mul(&Mat2::diag(l1.clone(), l2.clone()));
        if !b.entries().all(|x| in_localization(x, s)) || !is_unit_in_localization(&b.det(), s) {
            continue;
        }
        let binv = b.inv().expect("invertible");
        assert_eq!(e.rho.sandwich(&binv, &b), standard, "patch conjugator failed");
        return Some(Patch {
            s: s.clone(),
            lambda: (l1.clone(), l2.clone()),
            conjugator: b,
        });
    }
    None
}

/// A conjugator to the standard embedding over `O_K[1/s]`, if the candidate scalings contain one.
pub fn find_patch(e: &ConjugatedEmbedding, s: &FieldElement) -> Result<Option<Patch>> {
    if s.is_zero() {
        return Err(Error::InvalidArgument("cannot invert 0".into()));
    }
    let (_, lambdas) = patch_candidates(e)?;
    Ok(patch_at(e, s, &lambdas))
}

/// Greedy Zariski cover of `Spec O_K` by patches trivializing the embedding.
pub fn zariski_trivialization(e: &ConjugatedEmbedding) -> Result<Vec<Patch>> {
    let k = e.field();
    let (pool, lambdas) = patch_candidates(e)?;
    let mut s_candidates = vec![k.one()];
    s_candidates.extend(pool.iter().cloned());
    let mut patches: Vec<Patch> = Vec::new();
    let mut covered: Option<FracIdeal> = None;
    for s in &s_candidates {
        if let Some(c) = &covered {
            if c.is_unit_ideal() {
                break;
            }
            if c.contains(s) {
                continue;
            }
        }
        if let Some(p) = patch_at(e, s, &lambdas) {
            patches.push(p);
            let gens: Vec<FieldElement> = patches.iter().map(|p| p.s.clone()).collect();
            covered = Some(ideal::ideal_from_generators(&gens)?);
        }
    }
    if covered.is_some_and(|c| c.is_unit_ideal()) {
        Ok(patches)
    } else {
        Err(Error::CoverNotFound {
            bound: s_candidates.len() * lambdas.len(),
        })
    }
}

/// Integers in the order 0, 1, −1, 2, −2, … up to `h`.
fn signed_order(h: i64) -> Vec<i64> {
    let mut v = vec![0];
    for t in 1..=h {
        v.push(t);
        v.push(-t);
    }
    v
}

/// Elements of height exactly `h`, ordered by coordinates.
fn elements_of_height(k: &QuadraticField, h: i64) -> Vec<FieldElement> {
    let ord = signed_order(h);
    let mut out = Vec::new();
    for &a in &ord {
        for &b in &ord {
            if a.abs().max(b.abs()) == h {
                out.push(k.ints(a, b));
            }
        }
    }
    out
}

/// Search for an integral embedding that is not conjugate to the standard one.
///
/// Seeds `[[p, β], [β̄, p]]` with `N(β) = p(p − 1)`, which has determinant
/// `p` and column ideals above `p`; then falls back to all matrices with
/// entries of height at most 1.
pub fn find_nonstandard_embedding(
    k: &QuadraticField,
    n: usize,
    height_bound: i64,
) -> Result<Option<ConjugatedEmbedding>> {
    if n < 3 {
        return Err(Error::InvalidArgument("non-standard embeddings need n ≥ 3".into()));
    }
    if k.is_rational() || classfield::class_number(k)? == 1 {
        return Ok(None);
    }
    let try_matrix = |a: Mat2| -> Result<Option<ConjugatedEmbedding>> {
        if a.det().is_zero() {
            return Ok(None);
        }
        let Ok(e) = ConjugatedEmbedding::new(a, n) else { return Ok(None) };
        Ok(match is_conjugate_to_standard(&e)? {
            None => Some(e),
            Some(_) => None,
        })
    };
    for p in arith::primes_up_to(height_bound.max(0) as u64) {
        let above = ideal::primes_above(p, k);
        let mut all_nonprincipal = true;
        for q in &above {
            if ideal::is_principal(q)?.is_some() {
                all_nonprincipal = false;
            }
        }
        if !all_nonprincipal {
            continue;
        }
        let target = arith::rat((p * (p - 1)) as i64);
        for h in 0..=height_bound {
            for beta in elements_of_height(k, h) {
                if beta.norm() != target {
                    continue;
                }
                let pe = k.int(p as i64);
                let a = Mat2::new(pe.clone(), beta.clone(), beta.conj(), pe);
                if let Some(e) = try_matrix(a)? {
                    return Ok(Some(e));
                }
            }
        }
    }
    let mut small = elements_of_height(k, 0);
    small.extend(elements_of_height(k, 1));
    for a in &small {
        for b in &small {
            for c in &small {
                for d in &small {
                    let m = Mat2::new(a.clone(), b.clone(), c.clone(), d.clone());
                    if let Some(e) = try_matrix(m)? {
                        return Ok(Some(e));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Bounded search for `X ∈ GL₂(O_K)` with `X·ρ_{A'}·X⁻¹ = ρ_A`.
///
/// Conjugators have the shape `A·diag(λ₁, λ₂)·A'⁻¹` (possibly with a column
/// swap); `λ₁` runs over quotients of elements of height at most `height`.
/// A `None` answer is not a proof of non-conjugacy.
pub fn search_conjugator(
    e1: &ConjugatedEmbedding,
    e2: &ConjugatedEmbedding,
    height: i64,
) -> Result<Option<Mat2>> {
    if e1.n != e2.n {
        return Err(Error::InvalidArgument("embeddings have different n".into()));
    }
    let k = e1.field();
    let a2inv = e2.a.inv().ok_or(Error::Singular)?;
    let mut pool = Vec::new();
    for h in 0..=height {
        pool.extend(elements_of_height(&k, h).into_iter().filter(|x| !x.is_zero()));
    }
    let swap = Mat2::new(k.zero(), k.one(), k.one(), k.zero());
    let ratio = e2.delta.div(&e1.delta).expect("nonzero det");
    for x in &pool {
        for y in &pool {
            let l1 = x.div(y).expect("nonzero");
            // det X = λ₁λ₂·Δ/Δ' must be ±1
            for sign in [1, -1] {
                let l2 = (&ratio * &k.int(sign)).div(&l1).expect("nonzero");
                for w in [None, Some(&swap)] {
                    let mut m = e1.a.mul(&Mat2::diag(l1.clone(), l2.clone()));
                    if let Some(w) = w {
                        m = m.mul(w);
                    }
                    let xmat = m.mul(&a2inv);
                    if !xmat.is_invertible_integral() {
                        continue;
                    }
                    let xinv = xmat.inv().expect("invertible");
                    if e2.rho.sandwich(&xmat, &xinv) == e1.rho
                        || (w.is_some() && same_subgroup(&e2.rho.sandwich(&xmat, &xinv), &e1.rho))
                    {
                        return Ok(Some(xmat));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// `ρ'(u) = ρ(u^{n−1})`: the same subgroup with the parametrization inverted.
fn same_subgroup(r1: &GroupElementMatrix, r2: &GroupElementMatrix) -> bool {
    let n = r1.n();
    let flip = |p: &UPoly| -> UPoly { (0..n).map(|e| p[(n - e) % n].clone()).collect() };
    (0..2).all(|i| (0..2).all(|j| flip(r1.entry(i, j)) == *r2.entry(i, j)))
}

/// Twist descriptor for `L/K`; the trivial extension gives the standard class.
pub fn twist_from_extension(k: &QuadraticField, l: Option<&UnramifiedQuadExt>, n: usize) -> TwistDescriptor {
    let _ = n;
    match l {
        None => TwistDescriptor::standard(k),
        Some(ext) => TwistDescriptor {
            eta: Some(ext.clone()),
            zariski_class: FracIdeal::unit(k),
            provenance: Provenance::FromExtension(ext.delta.clone()),
        },
    }
}

/// Twist descriptor for an explicit matrix: Zariski class `[I₁]`, trivial `η`.
pub fn twist_from_embedding(e: &ConjugatedEmbedding) -> TwistDescriptor {
    TwistDescriptor {
        eta: None,
        zariski_class: e.column_ideals.0.clone(),
        provenance: Provenance::FromMatrix(e.a.clone()),
    }
}

/// Determinant check helper for reports: `|N(det A)|`.
pub fn det_norm(a: &Mat2) -> Rational {
    a.det().norm().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::make_field;

    fn norm_three_matrix() -> (QuadraticField, Mat2) {
        let k = make_field(10).unwrap();
        let a = Mat2::new(k.int(3), k.ints(4, 1), k.ints(4, -1), k.int(3));
        (k, a)
    }

    #[test]
    fn conjugate_of_norm_three_matrix() {
        let (k, a) = norm_three_matrix();
        let rho = conjugate_standard(&a, 4).unwrap();
        assert_eq!(rho.entry(0, 0), &vec![k.zero(), k.int(3), k.zero(), k.int(-2)]);
        assert!(rho.has_unit_det());
        assert!(rho.eval_at_one() == Mat2::identity(&k));
        assert_eq!(rho.entry_string(0, 0), "3*u - 2*u^3");
    }

    #[test]
    fn matrix_json_round_trips() {
        let (k, a) = norm_three_matrix();
        let e = ConjugatedEmbedding::new(a.clone(), 3).unwrap();
        let text = serde_json::to_string(&e.to_json()).unwrap();
        assert_eq!(Mat2::parse(&k, &text).unwrap(), a);
    }

    #[test]
    fn identity_gives_standard() {
        let k = make_field(-5).unwrap();
        for n in 2..6 {
            let rho = conjugate_standard(&Mat2::identity(&k), n).unwrap();
            assert_eq!(rho, GroupElementMatrix::standard(&k, n));
        }
    }

    #[test]
    fn non_integral_conjugate() {
        let q = QuadraticField::rationals();
        let a = Mat2::new(q.int(1), q.int(1), q.int(0), q.int(2));
        match conjugate_standard(&a, 3) {
            Err(Error::NotIntegral { value, .. }) => assert!(value.contains('/')),
            other => panic!("expected NotIntegral, got {other:?}"),
        }
    }

    #[test]
    fn conjugacy_decisions() {
        let (_, a) = norm_three_matrix();
        let e = ConjugatedEmbedding::new(a, 4).unwrap();
        assert!(is_conjugate_to_standard(&e).unwrap().is_none());
        let q = QuadraticField::rationals();
        let e5 = ConjugatedEmbedding::new(Mat2::diag(q.int(5), q.int(1)), 3).unwrap();
        let b = is_conjugate_to_standard(&e5).unwrap().unwrap();
        assert!(verify_conjugator(&e5.rho, &b));
        let e2 = ConjugatedEmbedding::new(norm_three_matrix().1, 2).unwrap();
        assert!(is_conjugate_to_standard(&e2).unwrap().is_some());
    }

    #[test]
    fn reductions() {
        let q = QuadraticField::rationals();
        let r = reduce_conjugator(&Mat2::diag(q.int(2), q.int(1))).unwrap();
        assert_eq!(r.a_reduced, Mat2::identity(&q));
        assert_eq!(r.steps.len(), 1);
        let (k, a) = norm_three_matrix();
        match reduce_conjugator(&a) {
            Err(Error::Obstructed { prime }) => {
                let p = ideal::ideal_from_generators(&[k.int(3), k.ints(4, 1)]).unwrap();
                assert_eq!(prime, p.to_string());
            }
            other => panic!("expected Obstructed, got {other:?}"),
        }
        let r0 = reduce_conjugator(&Mat2::identity(&k)).unwrap();
        assert!(r0.steps.is_empty());
    }

    #[test]
    fn zariski_cover_of_norm_three_matrix() {
        let (k, a) = norm_three_matrix();
        let e = ConjugatedEmbedding::new(a, 4).unwrap();
        let patches = zariski_trivialization(&e).unwrap();
        let ss: Vec<_> = patches.iter().map(|p| p.s.clone()).collect();
        assert_eq!(ss, vec![k.int(3), k.ints(4, 1), k.ints(4, -1)]);
        let third = arith::rat_frac(1, 3);
        assert_eq!(patches[0].lambda, (k.one(), k.one()));
        assert_eq!(patches[1].lambda, (k.from_rational(third.clone()), k.one()));
        assert_eq!(patches[2].lambda, (k.one(), k.from_rational(third)));
        let id = ConjugatedEmbedding::new(Mat2::identity(&k), 3).unwrap();
        let p = zariski_trivialization(&id).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0].s.is_one());
    }

    #[test]
    fn nonstandard_searches() {
        let (_, a) = norm_three_matrix();
        let k10 = make_field(10).unwrap();
        let e = find_nonstandard_embedding(&k10, 4, 10).unwrap().unwrap();
        assert_eq!(e.a, a);
        let k42 = make_field(-42).unwrap();
        let e42 = find_nonstandard_embedding(&k42, 3, 12).unwrap().unwrap();
        let w = k42.ints(0, 1);
        assert_eq!(e42.a, Mat2::new(k42.int(7), w.clone(), -w, k42.int(7)));
        let q = QuadraticField::rationals();
        assert!(find_nonstandard_embedding(&q, 3, 10).unwrap().is_none());
    }

    #[test]
    fn conjugator_search_finds_self() {
        let (_, a) = norm_three_matrix();
        let e = ConjugatedEmbedding::new(a, 3).unwrap();
        let x = search_conjugator(&e, &e, 1).unwrap().unwrap();
        assert!(x.is_invertible_integral());
    }
}
