//! Exact elimination: rank, reduced row echelon form, kernels and
//! coordinates relative to a spanning family.

use std::collections::HashMap;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use super::field::{inv_mod, Field, Scalar};
use super::matrix::Matrix;

type SparseRow<T> = Vec<(usize, T)>;

/// Integer arithmetic used by fraction-free elimination. `None` signals overflow.
trait FfInt: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn gcd(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl FfInt for i128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
}

impl FfInt for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
}

/// `a*x - b*y` on sparse rows, dropping the cancelled entries.
fn combine<T: FfInt>(a: &T, x: &SparseRow<T>, b: &T, y: &SparseRow<T>) -> Option<SparseRow<T>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, a.mul(&x[i].1)?));
            i += 1;
        } else if take_y {
            out.push((y[j].0, T::zero().sub(&b.mul(&y[j].1)?)?));
            j += 1;
        } else {
            let v = a.mul(&x[i].1)?.sub(&b.mul(&y[j].1)?)?;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

fn make_primitive<T: FfInt>(row: &mut SparseRow<T>) {
    let mut g = T::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_unit() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v = v.div(&g);
    }
}

fn ff_rank<T: FfInt>(mut rows: Vec<SparseRow<T>>) -> Option<usize> {
    rows.sort_by_key(|r| r.len());
    let mut pivots: HashMap<usize, SparseRow<T>> = HashMap::new();
    for mut row in rows {
        make_primitive(&mut row);
        while let Some((lead, b)) = row.first().cloned() {
            match pivots.get(&lead) {
                Some(p) => {
                    let a = p[0].1.clone();
                    let g = a.gcd(&b);
                    let (a, b) = (a.div(&g), b.div(&g));
                    row = combine(&a, &row, &b, p)?;
                    make_primitive(&mut row);
                }
                None => {
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    Some(pivots.len())
}

fn integer_rows(m: &Matrix) -> Vec<SparseRow<BigInt>> {
    m.row_lists()
        .into_iter()
        .map(|row| {
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
            row.into_iter()
                .map(|(c, v)| (c, v.numer() * (&l / v.denom())))
                .collect()
        })
        .collect()
}

fn rank_mod_p(m: &Matrix, p: u64) -> usize {
    let mut rows: Vec<SparseRow<u64>> = m
        .row_lists()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|(c, v)| (c, v.numer().to_u64().unwrap_or(0)))
                .collect()
        })
        .collect();
    rows.sort_by_key(|r| r.len());
    let mut pivots: HashMap<usize, SparseRow<u64>> = HashMap::new();
    for mut row in rows {
        while let Some(&(lead, b)) = row.first() {
            match pivots.get(&lead) {
                Some(piv) => {
                    // piv is normalised to leading coefficient 1
                    let mut out = Vec::with_capacity(row.len() + piv.len());
                    let (mut i, mut j) = (0, 0);
                    while i < row.len() || j < piv.len() {
                        if j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0) {
                            out.push(row[i]);
                            i += 1;
                        } else if i >= row.len() || piv[j].0 < row[i].0 {
                            let v = (p - (b as u128 * piv[j].1 as u128 % p as u128) as u64) % p;
                            if v != 0 {
                                out.push((piv[j].0, v));
                            }
                            j += 1;
                        } else {
                            let t = (b as u128 * piv[j].1 as u128 % p as u128) as u64;
                            let v = (row[i].1 + p - t) % p;
                            if v != 0 {
                                out.push((row[i].0, v));
                            }
                            i += 1;
                            j += 1;
                        }
                    }
                    row = out;
                }
                None => {
                    let inv = inv_mod(b, p);
                    for e in row.iter_mut() {
                        e.1 = (e.1 as u128 * inv as u128 % p as u128) as u64;
                    }
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Exact rank. Over Q this uses fraction-free elimination with machine integers and
/// falls back to big integers when an intermediate value overflows.
pub fn rank(m: &Matrix) -> usize {
    if m.is_zero() {
        return 0;
    }
    // eliminate along the shorter side
    let m = if m.rows() > m.cols() {
        m.transpose()
    } else {
        m.clone()
    };
    match m.field() {
        Field::Prime(p) => rank_mod_p(&m, p as u64),
        Field::Rationals => {
            let big = integer_rows(&m);
            let small: Option<Vec<SparseRow<i128>>> = big
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|(c, v)| v.to_i128().map(|x| (*c, x)))
                        .collect()
                })
                .collect();
            if let Some(rows) = small {
                if let Some(r) = ff_rank(rows) {
                    return r;
                }
            }
            ff_rank(big).expect("big integer elimination cannot overflow")
        }
    }
}

/// Reduced row echelon form over the field.
#[derive(Clone, Debug)]
pub struct Rref {
    pub cols: usize,
    /// Pivot columns in increasing order.
    pub pivots: Vec<usize>,
    /// Nonzero rows; row `i` has a 1 in column `pivots[i]`.
    pub rows: Vec<Vec<(usize, Scalar)>>,
}

fn axpy(
    f: Field,
    x: &[(usize, Scalar)],
    a: &Scalar,
    y: &[(usize, Scalar)],
) -> Vec<(usize, Scalar)> {
    // x - a*y
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i >= x.len() || y[j].0 < x[i].0 {
            out.push((y[j].0, f.neg(&f.mul(a, &y[j].1))));
            j += 1;
        } else {
            let v = f.sub(&x[i].1, &f.mul(a, &y[j].1));
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Gauss-Jordan elimination; the pivot for each column is taken from the first
/// remaining row that has a nonzero entry there.
pub fn rref(m: &Matrix) -> Rref {
    let f = m.field();
    let mut pending: Vec<Vec<(usize, Scalar)>> = m
        .row_lists()
        .into_iter()
        .filter(|r| !r.is_empty())
        .collect();
    let mut done: Vec<Vec<(usize, Scalar)>> = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..m.cols() {
        let Some(pos) = pending
            .iter()
            .position(|r| r.first().map(|e| e.0) == Some(col))
        else {
            continue;
        };
        let mut prow = pending.remove(pos);
        let inv = f.inv(&prow[0].1).expect("nonzero pivot");
        for e in prow.iter_mut() {
            e.1 = f.mul(&e.1, &inv);
        }
        for r in pending.iter_mut().chain(done.iter_mut()) {
            if let Ok(k) = r.binary_search_by_key(&col, |e| e.0) {
                let a = r[k].1.clone();
                *r = axpy(f, r, &a, &prow);
            }
        }
        pending.retain(|r| !r.is_empty());
        pivots.push(col);
        done.push(prow);
    }
    Rref {
        cols: m.cols(),
        pivots,
        rows: done,
    }
}

/// Basis of the right kernel, as the columns of the returned matrix.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let f = m.field();
    let r = rref(m);
    let mut is_pivot = vec![false; m.cols()];
    for p in &r.pivots {
        is_pivot[*p] = true;
    }
    let free: Vec<usize> = (0..m.cols()).filter(|c| !is_pivot[*c]).collect();
    let mut free_index = vec![usize::MAX; m.cols()];
    for (k, c) in free.iter().enumerate() {
        free_index[*c] = k;
    }
    let mut raw = Vec::new();
    for (k, c) in free.iter().enumerate() {
        raw.push((*c, k, f.one()));
    }
    for (i, row) in r.rows.iter().enumerate() {
        let p = r.pivots[i];
        for (c, v) in row.iter().skip(1) {
            if free_index[*c] != usize::MAX {
                raw.push((p, free_index[*c], f.neg(v)));
            }
        }
    }
    Matrix::assemble(f, m.cols(), free.len(), raw)
}

/// Incrementally built linearly independent family of vectors that remembers how each
/// reduced vector is expressed in terms of the inserted ones.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    field: Field,
    dim: usize,
    /// Reduced vectors keyed by their leading index (leading coefficient 1).
    reduced: HashMap<usize, (Vec<(usize, Scalar)>, Vec<(usize, Scalar)>)>,
    count: usize,
}

impl SpanBasis {
    pub fn new(field: Field, dim: usize) -> Self {
        SpanBasis {
            field,
            dim,
            reduced: HashMap::new(),
            count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v` against the family; returns the remainder and the combination
    /// `c` with `v = remainder + Σ c_i · inserted_i`.
    fn reduce(&self, v: &[(usize, Scalar)]) -> (Vec<(usize, Scalar)>, Vec<(usize, Scalar)>) {
        let f = self.field;
        let mut rem: Vec<(usize, Scalar)> = v.to_vec();
        let mut comb: Vec<(usize, Scalar)> = Vec::new();
        let mut idx = 0;
        while idx < rem.len() {
            let (lead, a) = rem[idx].clone();
            if let Some((vec, c)) = self.reduced.get(&lead) {
                rem = axpy(f, &rem, &a, vec);
                let neg = f.neg(&a);
                comb = axpy(f, &comb, &neg, c);
            } else {
                idx += 1;
            }
        }
        (rem, comb)
    }

    /// Inserts `v`; returns `false` (and leaves the family unchanged) if `v` is dependent.
    pub fn insert(&mut self, v: &[(usize, Scalar)]) -> bool {
        let f = self.field;
        let (rem, comb) = self.reduce(v);
        let Some((lead, a)) = rem.first().cloned() else {
            return false;
        };
        let inv = f.inv(&a).expect("nonzero");
        // rem = v - Σ comb_i e_i, so the reduced vector corresponds to (e_new - comb)/a
        let mut c: Vec<(usize, Scalar)> = comb.iter().map(|(i, x)| (*i, f.neg(x))).collect();
        c.push((self.count, f.one()));
        let c: Vec<(usize, Scalar)> = c.into_iter().map(|(i, x)| (i, f.mul(&x, &inv))).collect();
        let vec: Vec<(usize, Scalar)> =
            rem.into_iter().map(|(i, x)| (i, f.mul(&x, &inv))).collect();
        self.reduced.insert(lead, (vec, c));
        self.count += 1;
        true
    }

    pub fn contains(&self, v: &[(usize, Scalar)]) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Coordinates of `v` in terms of the inserted vectors, if `v` lies in their span.
    pub fn coordinates(&self, v: &[(usize, Scalar)]) -> Option<Vec<(usize, Scalar)>> {
        let (rem, comb) = self.reduce(v);
        if rem.is_empty() {
            Some(comb)
        } else {
            None
        }
    }
}

/// Column `j` of `m` as a sparse vector.
pub fn column(m: &Matrix, j: usize) -> Vec<(usize, Scalar)> {
    m.entries()
        .iter()
        .filter(|e| e.1 == j)
        .map(|(r, _, v)| (*r, v.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_small() {
        let q = Field::Rationals;
        assert_eq!(rank(&Matrix::from_i64(q, &[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&Matrix::from_i64(q, &[&[1, 2], &[3, 4]])), 2);
        let f2 = Field::Prime(2);
        assert_eq!(rank(&Matrix::from_i64(f2, &[&[1, 1], &[1, -1]])), 1);
    }

    #[test]
    fn rank_overflow_falls_back() {
        let q = Field::Rationals;
        let big = 1i64 << 62;
        let m = Matrix::from_i64(
            q,
            &[
                &[big, big - 1, 3, 7],
                &[big - 3, big, 5, 1],
                &[big - 7, big - 11, big, 2],
                &[1, 2, 3, big],
            ],
        );
        let r = rref(&m);
        assert_eq!(rank(&m), r.pivots.len());
    }

    #[test]
    fn kernel_over_f2() {
        let f2 = Field::Prime(2);
        let k = kernel_basis(&Matrix::from_i64(f2, &[&[1, 1]]));
        assert_eq!(k, Matrix::from_i64(f2, &[&[1], &[1]]));
    }

    #[test]
    fn kernel_is_annihilated() {
        let q = Field::Rationals;
        let m = Matrix::from_i64(q, &[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 0, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn span_coordinates() {
        let q = Field::Rationals;
        let mut s = SpanBasis::new(q, 3);
        let one = || q.one();
        assert!(s.insert(&[(0, one()), (1, one())]));
        assert!(s.insert(&[(1, one()), (2, one())]));
        assert!(!s.insert(&[(0, one()), (2, q.from_i64(-1))]));
        let c = s
            .coordinates(&[(0, one()), (1, q.from_i64(2)), (2, one())])
            .unwrap();
        assert_eq!(c, vec![(0, one()), (1, one())]);
        assert!(s.coordinates(&[(0, one())]).is_none());
    }
}
