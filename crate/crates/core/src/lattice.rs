//! Integer lattices: Hermite normal form, saturated kernels, Smith normal form.
//!
//! Vectors are rows of `BigInt`. A lattice is stored by its row-HNF basis:
//! echelon form, positive pivots, entries above each pivot reduced into
//! `[0, pivot)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IVec = Vec<BigInt>;

fn pivot_col(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

/// Row Hermite normal form of the lattice spanned by `gens` in `Z^dim`.
pub fn hnf(gens: &[IVec], dim: usize) -> Vec<IVec> {
    let mut rows: Vec<IVec> = gens
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    for v in &rows {
        assert_eq!(v.len(), dim, "vector of wrong dimension");
    }
    let mut out: Vec<IVec> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..dim {
        // rows with nonzero entry in this column (all earlier columns are zero)
        loop {
            let mut idx: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if idx.len() <= 1 {
                break;
            }
            idx.sort_by(|&i, &j| rows[i][col].abs().cmp(&rows[j][col].abs()));
            let p = idx[0];
            let pr = rows[p].clone();
            for &i in &idx[1..] {
                let q = rows[i][col].div_floor(&pr[col]);
                for c in col..dim {
                    let t = &q * &pr[c];
                    rows[i][c] -= t;
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            let mut r = rows.swap_remove(i);
            if r[col].is_negative() {
                for x in r.iter_mut() {
                    *x = -x.clone();
                }
            }
            out.push(r);
            pivots.push(col);
        }
        rows.retain(|v| v.iter().any(|x| !x.is_zero()));
        if rows.is_empty() && col + 1 < dim {
            // remaining columns only affect reduction above pivots, handled below
        }
    }
    // reduce entries above pivots
    for k in 0..out.len() {
        let pc = pivots[k];
        let pr = out[k].clone();
        for r in out.iter_mut().take(k) {
            let q = r[pc].div_floor(&pr[pc]);
            if !q.is_zero() {
                for c in pc..dim {
                    let t = &q * &pr[c];
                    r[c] -= t;
                }
            }
        }
    }
    out
}

/// A lattice in `Z^dim` stored by its HNF basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub dim: usize,
    pub basis: Vec<IVec>,
}

impl Lattice {
    pub fn new(gens: &[IVec], dim: usize) -> Self {
        Lattice {
            dim,
            basis: hnf(gens, dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Lattice { dim, basis: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut w: IVec = v.to_vec();
        for b in &self.basis {
            let pc = pivot_col(b).expect("nonzero basis row");
            if let Some(wc) = pivot_col(&w) {
                if wc < pc {
                    return false;
                }
            } else {
                return true;
            }
            let (q, r) = w[pc].div_rem(&b[pc]);
            if !r.is_zero() {
                return false;
            }
            if !q.is_zero() {
                for c in pc..self.dim {
                    let t = &q * &b[c];
                    w[c] -= t;
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn join(&self, other: &Lattice) -> Lattice {
        let mut g = self.basis.clone();
        g.extend(other.basis.iter().cloned());
        Lattice::new(&g, self.dim)
    }

    pub fn with(&self, extra: &[IVec]) -> Lattice {
        let mut g = self.basis.clone();
        g.extend(extra.iter().cloned());
        Lattice::new(&g, self.dim)
    }

    /// Product of the pivots; for lattices with the same pivot columns the
    /// ratio of these values is the index.
    pub fn pivot_product(&self) -> BigInt {
        self.basis
            .iter()
            .map(|b| b[pivot_col(b).unwrap()].clone())
            .fold(BigInt::one(), |a, x| a * x)
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.basis.iter().map(|b| pivot_col(b).unwrap()).collect()
    }

    /// Index `[self : sub]` when `sub ⊆ self` has full rank in `self`.
    pub fn index_of(&self, sub: &Lattice) -> Option<BigInt> {
        if sub.rank() != self.rank() || !self.contains_lattice(sub) {
            return None;
        }
        // Both are echelon with the same pivot columns when ranks agree and sub ⊆ self.
        if sub.pivot_columns() != self.pivot_columns() {
            return None;
        }
        Some(sub.pivot_product() / self.pivot_product())
    }
}

/// Saturated integer kernel of `v ↦ M v`, where `m` is given by rows of length `n`.
pub fn kernel(m: &[IVec], n: usize) -> Vec<IVec> {
    let rows_m = m.len();
    // augmented rows: (column j of M | e_j)
    let aug: Vec<IVec> = (0..n)
        .map(|j| {
            let mut r: IVec = m.iter().map(|row| row[j].clone()).collect();
            r.extend((0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let h = hnf(&aug, rows_m + n);
    let ker: Vec<IVec> = h
        .into_iter()
        .filter(|r| r[..rows_m].iter().all(|x| x.is_zero()))
        .map(|r| r[rows_m..].to_vec())
        .collect();
    hnf(&ker, n)
}

/// Smith normal form of a relation matrix (rows are relations in `Z^k`).
///
/// Returns `(diag, v, v_inv)` with `rowspace(R)·V = ⊕ diag_i Z`, so the
/// quotient `Z^k / rowspace(R)` has coordinates `y = x·V (mod diag)`.
pub fn smith_columns(rel: &[IVec], k: usize) -> (Vec<BigInt>, Vec<IVec>, Vec<IVec>) {
    let mut a: Vec<IVec> = rel.to_vec();
    let ident = |k: usize| -> Vec<IVec> {
        (0..k)
            .map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect()
    };
    let mut v = ident(k);
    let mut vi = ident(k);
    // column ops on `a`: col_j += q col_i  ⇒ v: col_j += q col_i ; v_inv: row_i -= q row_j
    let col_add = |a: &mut Vec<IVec>, v: &mut Vec<IVec>, vi: &mut Vec<IVec>, j: usize, i: usize, q: &BigInt| {
        for r in a.iter_mut() {
            let t = q * &r[i];
            r[j] += t;
        }
        for r in v.iter_mut() {
            let t = q * &r[i];
            r[j] += t;
        }
        let rowj = vi[j].clone();
        for (c, x) in vi[i].iter_mut().enumerate() {
            *x -= q * &rowj[c];
        }
    };
    let col_swap = |a: &mut Vec<IVec>, v: &mut Vec<IVec>, vi: &mut Vec<IVec>, i: usize, j: usize| {
        for r in a.iter_mut() {
            r.swap(i, j);
        }
        for r in v.iter_mut() {
            r.swap(i, j);
        }
        vi.swap(i, j);
    };
    let col_neg = |a: &mut Vec<IVec>, v: &mut Vec<IVec>, vi: &mut Vec<IVec>, i: usize| {
        for r in a.iter_mut() {
            r[i] = -r[i].clone();
        }
        for r in v.iter_mut() {
            r[i] = -r[i].clone();
        }
        for x in vi[i].iter_mut() {
            *x = -x.clone();
        }
    };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < k {
        // find nonzero entry with smallest |value| in submatrix rows >= t, cols >= t
        let mut best: Option<(usize, usize)> = None;
        for (ri, r) in a.iter().enumerate().skip(t) {
            for c in t..k {
                if !r[c].is_zero() && best.is_none_or(|(bi, bc)| r[c].abs() < a[bi][bc].abs()) {
                    best = Some((ri, c));
                }
            }
        }
        let Some((bi, bc)) = best else { break };
        a.swap(t, bi);
        col_swap(&mut a, &mut v, &mut vi, t, bc);
        let mut done = true;
        // clear row t with column ops
        for c in t + 1..k {
            if !a[t][c].is_zero() {
                let q = -(a[t][c].div_floor(&a[t][t]));
                col_add(&mut a, &mut v, &mut vi, c, t, &q);
                if !a[t][c].is_zero() {
                    done = false;
                }
            }
        }
        // clear column t with row ops
        for r in t + 1..a.len() {
            if !a[r][t].is_zero() {
                let q = a[r][t].div_floor(&a[t][t]);
                let pr = a[t].clone();
                for c in t..k {
                    let x = &q * &pr[c];
                    a[r][c] -= x;
                }
                if !a[r][t].is_zero() {
                    done = false;
                }
            }
        }
        if !done {
            continue;
        }
        // divisibility: pivot must divide every remaining entry
        let p = a[t][t].clone();
        let mut fix = None;
        for (ri, r) in a.iter().enumerate().skip(t + 1) {
            for c in t + 1..k {
                if !(&r[c] % &p).is_zero() {
                    fix = Some(ri);
                }
            }
        }
        if let Some(ri) = fix {
            let add = a[ri].clone();
            for (c, x) in a[t].iter_mut().enumerate() {
                *x += &add[c];
            }
            continue;
        }
        if a[t][t].is_negative() {
            col_neg(&mut a, &mut v, &mut vi, t);
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    // remaining free columns have diagonal 0
    while diag.len() < k {
        diag.push(BigInt::zero());
    }
    (diag, v, vi)
}

pub fn ivec(xs: &[i64]) -> IVec {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}
