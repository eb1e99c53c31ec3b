use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::elim::{column, kernel_basis, rank, SpanBasis};
use super::field::{Field, Scalar};
use super::matrix::{Matrix, MatrixBuilder};
use crate::error::{Error, Result};

/// Nonzero dimensions indexed by degree, written `{"H0": 1, "H1": 2}`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct GradedDims(BTreeMap<i32, usize>);

impl GradedDims {
    pub fn new() -> Self {
        GradedDims(BTreeMap::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (i32, usize)>>(pairs: I) -> Self {
        let mut g = GradedDims::new();
        for (k, d) in pairs {
            g.add(k, d);
        }
        g
    }

    pub fn add(&mut self, degree: i32, dim: usize) {
        if dim > 0 {
            *self.0.entry(degree).or_insert(0) += dim;
        }
    }

    pub fn get(&self, degree: i32) -> usize {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn euler(&self) -> i64 {
        self.0
            .iter()
            .map(|(k, d)| if k % 2 == 0 { *d as i64 } else { -(*d as i64) })
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.0.iter().map(|(k, d)| (*k, *d))
    }

    /// `H^k(X[n]) = H^{k+n}(X)`.
    pub fn shifted(&self, n: i32) -> GradedDims {
        GradedDims(self.0.iter().map(|(k, d)| (k - n, *d)).collect())
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.0.keys().copied().collect()
    }
}

impl fmt::Display for GradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, d)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "\"H{k}\": {d}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for GradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for GradedDims {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, d) in &self.0 {
            m.serialize_entry(&format!("H{k}"), d)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for GradedDims {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, usize> = BTreeMap::deserialize(d)?;
        let mut g = GradedDims::new();
        for (k, v) in raw {
            let deg: i32 = k
                .trim_start_matches('H')
                .parse()
                .map_err(serde::de::Error::custom)?;
            g.add(deg, v);
        }
        Ok(g)
    }
}

/// Bounded cochain complex `C^start → C^{start+1} → …` of finite-dimensional spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct CochainComplex {
    field: Field,
    start: i32,
    dims: Vec<usize>,
    diffs: Vec<Matrix>,
}

impl CochainComplex {
    /// `diffs[i]` maps degree `start+i` to `start+i+1`; there must be `dims.len()-1` of them.
    pub fn new(field: Field, start: i32, dims: Vec<usize>, diffs: Vec<Matrix>) -> Result<Self> {
        let c = Self::new_unchecked(field, start, dims, diffs)?;
        c.check_square_zero()?;
        Ok(c)
    }

    /// Validates shapes only.
    pub fn new_unchecked(
        field: Field,
        start: i32,
        dims: Vec<usize>,
        diffs: Vec<Matrix>,
    ) -> Result<Self> {
        if diffs.len() + 1 != dims.len().max(1) {
            return Err(Error::Shape(format!(
                "{} differentials for {} terms",
                diffs.len(),
                dims.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.field() != field {
                return Err(Error::FieldMismatch(format!("differential {i}")));
            }
            if d.shape() != (dims[i + 1], dims[i]) {
                return Err(Error::Shape(format!(
                    "differential at degree {} is {:?}, expected {:?}",
                    start + i as i32,
                    d.shape(),
                    (dims[i + 1], dims[i])
                )));
            }
        }
        let mut c = CochainComplex {
            field,
            start,
            dims,
            diffs,
        };
        c.trim();
        Ok(c)
    }

    pub fn zero(field: Field) -> Self {
        CochainComplex {
            field,
            start: 0,
            dims: Vec::new(),
            diffs: Vec::new(),
        }
    }

    /// A single space `k^n` in degree `degree`.
    pub fn concentrated(field: Field, degree: i32, n: usize) -> Self {
        let mut c = CochainComplex {
            field,
            start: degree,
            dims: vec![n],
            diffs: Vec::new(),
        };
        c.trim();
        c
    }

    fn trim(&mut self) {
        while self.dims.first() == Some(&0) {
            self.dims.remove(0);
            if !self.diffs.is_empty() {
                self.diffs.remove(0);
            }
            self.start += 1;
        }
        while self.dims.last() == Some(&0) {
            self.dims.pop();
            self.diffs.pop();
        }
        if self.dims.is_empty() {
            self.start = 0;
            self.diffs.clear();
        }
    }

    fn check_square_zero(&self) -> Result<()> {
        for i in 1..self.diffs.len() {
            if !self.diffs[i].mul(&self.diffs[i - 1])?.is_zero() {
                return Err(Error::NotAComplex {
                    degree: self.start + i as i32 - 1,
                });
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Lowest degree with a nonzero term (0 for the zero complex).
    pub fn start(&self) -> i32 {
        self.start
    }

    /// One past the highest nonzero degree.
    pub fn end(&self) -> i32 {
        self.start + self.dims.len() as i32
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, k: i32) -> usize {
        if k < self.start || k >= self.end() {
            0
        } else {
            self.dims[(k - self.start) as usize]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `d^k : C^k → C^{k+1}`.
    pub fn diff(&self, k: i32) -> Matrix {
        if k >= self.start && k + 1 < self.end() {
            self.diffs[(k - self.start) as usize].clone()
        } else {
            Matrix::zeros(self.field, self.dim(k + 1), self.dim(k))
        }
    }

    fn diff_ref(&self, k: i32) -> Option<&Matrix> {
        if k >= self.start && k + 1 < self.end() {
            Some(&self.diffs[(k - self.start) as usize])
        } else {
            None
        }
    }

    fn diff_rank(&self, k: i32) -> usize {
        self.diff_ref(k).map_or(0, rank)
    }

    pub fn cohomology_dim(&self, k: i32) -> usize {
        self.dim(k) - self.diff_rank(k) - self.diff_rank(k - 1)
    }

    pub fn cohomology(&self) -> GradedDims {
        let ranks: Vec<usize> = self.diffs.iter().map(rank).collect();
        let mut g = GradedDims::new();
        for (i, n) in self.dims.iter().enumerate() {
            let out = ranks.get(i).copied().unwrap_or(0);
            let inc = if i > 0 { ranks[i - 1] } else { 0 };
            g.add(self.start + i as i32, n - out - inc);
        }
        g
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, n)| {
                if (self.start + i as i32).rem_euclid(2) == 0 {
                    *n as i64
                } else {
                    -(*n as i64)
                }
            })
            .sum()
    }

    /// Shift `C[n]`: `C[n]^k = C^{k+n}` with differential `(-1)^n d`.
    pub fn shift(&self, n: i32) -> Self {
        let s = self.field.sign(n.rem_euclid(2) == 1);
        CochainComplex {
            field: self.field,
            start: if self.is_zero() { 0 } else { self.start - n },
            dims: self.dims.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(&s)).collect(),
        }
    }

    /// Builds a complex on the degree window `[lo, hi]`; `diff(k)` must return the
    /// differential out of degree `k`.
    pub fn from_fn<F>(field: Field, lo: i32, hi: i32, dims: &[usize], mut diff: F) -> Result<Self>
    where
        F: FnMut(i32) -> Result<Matrix>,
    {
        if hi < lo {
            return Ok(Self::zero(field));
        }
        let diffs = (lo..hi).map(&mut diff).collect::<Result<Vec<_>>>()?;
        Self::new_unchecked(field, lo, dims.to_vec(), diffs)
    }

    /// Same terms and differentials, checking `d∘d = 0`.
    pub fn validate(&self) -> Result<()> {
        self.check_square_zero()
    }

    /// Representatives of a basis of `H^k` together with the data needed to
    /// express cocycles in that basis.
    pub fn cohomology_basis(&self, k: i32) -> CohomologyBasis {
        let n = self.dim(k);
        let mut span = SpanBasis::new(self.field, n);
        let boundary = self.diff(k - 1);
        for j in 0..boundary.cols() {
            span.insert(&column(&boundary, j));
        }
        let boundaries = span.len();
        let z = kernel_basis(&self.diff(k));
        let mut reps = Vec::new();
        for j in 0..z.cols() {
            let v = column(&z, j);
            if span.insert(&v) {
                reps.push(v);
            }
        }
        let raw = reps
            .iter()
            .enumerate()
            .flat_map(|(j, v)| v.iter().map(move |(i, x)| (*i, j, x.clone())))
            .collect();
        CohomologyBasis {
            representatives: Matrix::assemble(self.field, n, reps.len(), raw),
            span,
            boundaries,
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch("direct sum".into()));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let lo = self.start.min(other.start);
        let hi = self.end().max(other.end());
        let dims: Vec<usize> = (lo..hi).map(|k| self.dim(k) + other.dim(k)).collect();
        let f = self.field;
        Self::from_fn(f, lo, hi - 1, &dims, |k| {
            let mut b = MatrixBuilder::new(f, dims[(k + 1 - lo) as usize], dims[(k - lo) as usize]);
            b.push_block(0, 0, &self.diff(k), &f.one());
            b.push_block(self.dim(k + 1), self.dim(k), &other.diff(k), &f.one());
            Ok(b.build())
        })
    }
}

/// Basis of a cohomology group, see [`CochainComplex::cohomology_basis`].
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    /// Columns are cocycles representing the basis.
    pub representatives: Matrix,
    span: SpanBasis,
    boundaries: usize,
}

impl CohomologyBasis {
    pub fn dim(&self) -> usize {
        self.representatives.cols()
    }

    /// Coordinates of the class of a cocycle. Errors if `v` is not in `Z^k`.
    pub fn coordinates(&self, v: &[(usize, Scalar)]) -> Result<Vec<(usize, Scalar)>> {
        let c = self
            .span
            .coordinates(v)
            .ok_or_else(|| Error::Internal("vector is not a cocycle".into()))?;
        Ok(c.into_iter()
            .filter(|(i, _)| *i >= self.boundaries)
            .map(|(i, x)| (i - self.boundaries, x))
            .collect())
    }
}

/// Degreewise linear maps commuting with the differentials.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: CochainComplex,
    pub target: CochainComplex,
    maps: BTreeMap<i32, Matrix>,
}

impl ChainMap {
    /// `maps[k]` has shape `target.dim(k) × source.dim(k)`; missing degrees are zero.
    pub fn new(
        source: CochainComplex,
        target: CochainComplex,
        maps: BTreeMap<i32, Matrix>,
    ) -> Result<Self> {
        let m = Self::new_unchecked(source, target, maps)?;
        m.check()?;
        Ok(m)
    }

    pub fn new_unchecked(
        source: CochainComplex,
        target: CochainComplex,
        maps: BTreeMap<i32, Matrix>,
    ) -> Result<Self> {
        if source.field != target.field {
            return Err(Error::FieldMismatch("chain map".into()));
        }
        for (k, m) in &maps {
            if m.field() != source.field {
                return Err(Error::FieldMismatch(format!("chain map component {k}")));
            }
            if m.shape() != (target.dim(*k), source.dim(*k)) {
                return Err(Error::Shape(format!(
                    "component at degree {k} is {:?}, expected {:?}",
                    m.shape(),
                    (target.dim(*k), source.dim(*k))
                )));
            }
        }
        Ok(ChainMap {
            source,
            target,
            maps,
        })
    }

    pub fn identity(c: &CochainComplex) -> Self {
        let maps = (c.start()..c.end())
            .map(|k| (k, Matrix::identity(c.field, c.dim(k))))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            maps,
        }
    }

    pub fn field(&self) -> Field {
        self.source.field
    }

    pub fn component(&self, k: i32) -> Matrix {
        self.maps
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.field(), self.target.dim(k), self.source.dim(k)))
    }

    fn check(&self) -> Result<()> {
        let lo = self.source.start().min(self.target.start());
        let hi = self.source.end().max(self.target.end());
        for k in lo..hi {
            let a = self.target.diff(k).mul(&self.component(k))?;
            let b = self.component(k + 1).mul(&self.source.diff(k))?;
            if a != b {
                return Err(Error::NotAChainMap { degree: k });
            }
        }
        Ok(())
    }

    pub fn compose(&self, after: &ChainMap) -> Result<ChainMap> {
        let lo = self.source.start();
        let hi = self.source.end();
        let mut maps = BTreeMap::new();
        for k in lo..hi {
            maps.insert(k, after.component(k).mul(&self.component(k))?);
        }
        ChainMap::new_unchecked(self.source.clone(), after.target.clone(), maps)
    }

    /// Mapping cone: `cone^k = A^{k+1} ⊕ B^k`, `d(a, b) = (-d a, f a + d b)`.
    pub fn cone(&self) -> CochainComplex {
        let f = self.field();
        let (a, b) = (&self.source, &self.target);
        if a.is_zero() && b.is_zero() {
            return CochainComplex::zero(f);
        }
        let lo = (a.start() - 1).min(b.start());
        let hi = (a.end() - 1).max(b.end());
        let dims: Vec<usize> = (lo..hi).map(|k| a.dim(k + 1) + b.dim(k)).collect();
        let minus = f.sign(true);
        let one = f.one();
        CochainComplex::from_fn(f, lo, hi - 1, &dims, |k| {
            let mut m = MatrixBuilder::new(f, a.dim(k + 2) + b.dim(k + 1), a.dim(k + 1) + b.dim(k));
            m.push_block(0, 0, &a.diff(k + 1), &minus);
            m.push_block(a.dim(k + 2), 0, &self.component(k + 1), &one);
            m.push_block(a.dim(k + 2), a.dim(k + 1), &b.diff(k), &one);
            Ok(m.build())
        })
        .expect("cone shapes are consistent")
    }

    /// Ranks of the induced maps `H^k(A) → H^k(B)`, obtained from the long exact
    /// sequence of the cone without computing cohomology bases.
    pub fn induced_ranks(&self) -> BTreeMap<i32, usize> {
        let ha = self.source.cohomology();
        let hb = self.target.cohomology();
        let hc = self.cone().cohomology();
        let mut degs: Vec<i32> = ha.degrees();
        degs.extend(hb.degrees());
        let mut out = BTreeMap::new();
        let Some(&lo) = degs.iter().min() else {
            return out;
        };
        let hi = *degs.iter().max().unwrap();
        // r_{k+1} = b_k + a_{k+1} - c_k - r_k
        let mut r: i64 = 0;
        for k in (lo - 1)..hi {
            let next = hb.get(k) as i64 + ha.get(k + 1) as i64 - hc.get(k) as i64 - r;
            debug_assert!(next >= 0);
            r = next;
            out.insert(k + 1, r.max(0) as usize);
        }
        out
    }

    /// Degrees in which the induced map on cohomology is an isomorphism.
    pub fn iso_flags(&self) -> BTreeMap<i32, bool> {
        let ha = self.source.cohomology();
        let hb = self.target.cohomology();
        let ranks = self.induced_ranks();
        let mut out = BTreeMap::new();
        for (k, r) in ranks {
            out.insert(k, r == ha.get(k) && r == hb.get(k));
        }
        out
    }

    /// Whether the map is a quasi-isomorphism, decided by acyclicity of the cone.
    pub fn is_quasi_iso(&self) -> bool {
        self.cone().cohomology().is_zero()
    }

    /// Matrix of `H^k(A) → H^k(B)` in the bases of [`CochainComplex::cohomology_basis`].
    pub fn induced_map(&self, k: i32) -> Result<Matrix> {
        let ba = self.source.cohomology_basis(k);
        let bb = self.target.cohomology_basis(k);
        let image = self.component(k).mul(&ba.representatives)?;
        let mut raw = Vec::new();
        for j in 0..image.cols() {
            for (i, x) in bb.coordinates(&column(&image, j))? {
                raw.push((i, j, x));
            }
        }
        Ok(Matrix::assemble(self.field(), bb.dim(), ba.dim(), raw))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(f: Field) -> CochainComplex {
        // two vertices, two edges
        let d0 = Matrix::from_i64(f, &[&[-1, 1], &[1, -1]]);
        CochainComplex::new(f, 0, vec![2, 2], vec![d0]).unwrap()
    }

    #[test]
    fn circle_cohomology() {
        for f in [Field::Rationals, Field::Prime(2), Field::Prime(3)] {
            let c = circle(f);
            assert_eq!(c.cohomology(), GradedDims::from_pairs([(0, 1), (1, 1)]));
        }
    }

    #[test]
    fn non_complex_rejected() {
        let f = Field::Rationals;
        let d0 = Matrix::from_i64(f, &[&[1]]);
        let d1 = Matrix::from_i64(f, &[&[1]]);
        assert_eq!(
            CochainComplex::new(f, 0, vec![1, 1, 1], vec![d0, d1]),
            Err(Error::NotAComplex { degree: 0 })
        );
    }

    #[test]
    fn restriction_circle_to_arc() {
        let f = Field::Rationals;
        let s1 = circle(f);
        // arc: one edge between the two vertices
        let arc =
            CochainComplex::new(f, 0, vec![2, 1], vec![Matrix::from_i64(f, &[&[-1, 1]])]).unwrap();
        let maps = BTreeMap::from([
            (0, Matrix::identity(f, 2)),
            (1, Matrix::from_i64(f, &[&[1, 0]])),
        ]);
        let r = ChainMap::new(s1, arc, maps).unwrap();
        let flags = r.iso_flags();
        assert!(flags[&0]);
        assert!(!flags[&1]);
        assert_eq!(r.induced_ranks()[&1], 0);
        assert_eq!(r.induced_map(0).unwrap().shape(), (1, 1));
        assert!(!r.induced_map(0).unwrap().is_zero());
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = circle(Field::Rationals);
        assert!(ChainMap::identity(&c).is_quasi_iso());
        assert!(ChainMap::identity(&c).cone().validate().is_ok());
    }

    #[test]
    fn shift_moves_degrees() {
        let c = circle(Field::Rationals).shift(1);
        assert_eq!(c.cohomology(), GradedDims::from_pairs([(-1, 1), (0, 1)]));
        assert_eq!(format!("{}", c.cohomology()), "{\"H-1\": 1, \"H0\": 1}");
    }
}
