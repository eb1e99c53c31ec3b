use std::collections::{BTreeMap, HashMap};

use super::{pullback, GradedMap, Sheaf};
use crate::complex::{subdivide_complex, transport_constructible, ConstructibleSet};
use crate::error::{Error, Result};
use crate::linalg::{ChainMap, CochainComplex, Field, Matrix, MatrixBuilder};

/// Index of the interval complex of a locally closed set `Z`: one summand `F(τ)`,
/// placed in degree `dim τ − dim σ + q`, for every pair `σ ≤ τ` of cells of `Z`.
#[derive(Clone, Debug)]
pub struct PairsIndex {
    pub pairs: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), usize>,
    /// Offset of the block `F(τ)^q` of pair `p` inside its total degree.
    offsets: HashMap<(usize, i32), usize>,
    dims: BTreeMap<i32, usize>,
}

impl PairsIndex {
    pub fn new(z: &ConstructibleSet, f: &Sheaf) -> PairsIndex {
        let k = z.complex();
        let mut pairs = Vec::new();
        for tau in z.indices() {
            for &sigma in k.faces(tau) {
                if z.contains(sigma) {
                    pairs.push((sigma, tau));
                }
            }
        }
        let lookup = pairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut offsets = HashMap::new();
        let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
        for (p, (sigma, tau)) in pairs.iter().enumerate() {
            let e = (k.dim_of(*tau) - k.dim_of(*sigma)) as i32;
            let st = f.stalk(*tau);
            for q in st.start()..st.end() {
                let d = st.dim(q);
                if d == 0 {
                    continue;
                }
                let slot = dims.entry(e + q).or_insert(0);
                offsets.insert((p, q), *slot);
                *slot += d;
            }
        }
        PairsIndex {
            pairs,
            lookup,
            offsets,
            dims,
        }
    }

    pub fn dim(&self, n: i32) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    fn offset(&self, p: usize, q: i32) -> Option<usize> {
        self.offsets.get(&(p, q)).copied()
    }

    fn build(&self, z: &ConstructibleSet, f: &Sheaf) -> Result<CochainComplex> {
        let field = f.field();
        let k = z.complex();
        let Some((&lo, _)) = self.dims.iter().next() else {
            return Ok(CochainComplex::zero(field));
        };
        let hi = *self.dims.keys().last().unwrap();
        let mut builders: BTreeMap<i32, MatrixBuilder> = (lo..hi)
            .map(|n| (n, MatrixBuilder::new(field, self.dim(n + 1), self.dim(n))))
            .collect();
        for (p, &(sigma, tau)) in self.pairs.iter().enumerate() {
            let e = (k.dim_of(tau) - k.dim_of(sigma)) as i32;
            let st = f.stalk(tau);
            let internal_sign = field.sign(e % 2 == 1);
            for q in st.start()..st.end() {
                let Some(col) = self.offset(p, q) else {
                    continue;
                };
                let n = e + q;
                let Some(b) = builders.get_mut(&n) else {
                    continue;
                };
                if let Some(row) = self.offset(p, q + 1) {
                    b.push_block(row, col, &st.diff(q), &internal_sign);
                }
                for (j, (up, s)) in k.cofacets(tau).iter().enumerate() {
                    let _ = j;
                    if !z.contains(*up) {
                        continue;
                    }
                    let p2 = self.lookup[&(sigma, *up)];
                    let Some(row) = self.offset(p2, q) else {
                        continue;
                    };
                    let i = k
                        .facets(*up)
                        .iter()
                        .position(|(x, _)| *x == tau)
                        .expect("facet");
                    let r = f.facet_restriction(*up, i).component(q, st, f.stalk(*up));
                    b.push_block(row, col, &r, &field.from_i64(*s as i64));
                }
                let lower_sign = if k.dim_of(tau).is_multiple_of(2) {
                    1
                } else {
                    -1
                };
                for (down, s) in k.facets(sigma) {
                    if !z.contains(*down) {
                        continue;
                    }
                    let p2 = self.lookup[&(*down, tau)];
                    let row = self.offset(p2, q).expect("same stalk");
                    b.push_identity(row, col, st.dim(q), &field.from_i64(lower_sign * *s as i64));
                }
            }
        }
        let dims: Vec<usize> = (lo..=hi).map(|n| self.dim(n)).collect();
        let diffs: Vec<Matrix> = builders.into_values().map(|b| b.build()).collect();
        CochainComplex::new_unchecked(field, lo, dims, diffs)
    }

    /// Projection onto the summands of a smaller index.
    fn projection_to(
        &self,
        small: &PairsIndex,
        field: Field,
        f: &Sheaf,
    ) -> Result<BTreeMap<i32, Matrix>> {
        let mut builders: BTreeMap<i32, MatrixBuilder> = BTreeMap::new();
        let k = f.complex();
        for (p_small, pair) in small.pairs.iter().enumerate() {
            let Some(&p_big) = self.lookup.get(pair) else {
                return Err(Error::InvalidParameter("sets are not nested".into()));
            };
            let e = (k.dim_of(pair.1) - k.dim_of(pair.0)) as i32;
            let st = f.stalk(pair.1);
            for q in st.start()..st.end() {
                let (Some(row), Some(col)) = (small.offset(p_small, q), self.offset(p_big, q))
                else {
                    continue;
                };
                let n = e + q;
                let b = builders
                    .entry(n)
                    .or_insert_with(|| MatrixBuilder::new(field, small.dim(n), self.dim(n)));
                b.push_identity(row, col, st.dim(q), &field.one());
            }
        }
        Ok(builders.into_iter().map(|(n, b)| (n, b.build())).collect())
    }
}

/// Interval complex of `z` together with its index, without validating `z`.
pub(crate) fn local_sections(
    z: &ConstructibleSet,
    f: &Sheaf,
) -> Result<(PairsIndex, CochainComplex)> {
    let idx = PairsIndex::new(z, f);
    let c = idx.build(z, f)?;
    Ok((idx, c))
}

/// Projection between interval complexes of nested convex sets.
pub(crate) fn projection(big: &PairsIndex, small: &PairsIndex, f: &Sheaf) -> Result<GradedMap> {
    Ok(GradedMap(big.projection_to(small, f.field(), f)?).normalized())
}

/// `RΓ(Z; F)` for a locally closed set `Z`, computed by the interval complex.
pub fn sections(z: &ConstructibleSet, f: &Sheaf) -> Result<CochainComplex> {
    same_complex(z, f)?;
    z.require_locally_closed()?;
    PairsIndex::new(z, f).build(z, f)
}

/// `RΓ(U; F)` for an open set `U`.
pub fn sections_open(u: &ConstructibleSet, f: &Sheaf) -> Result<CochainComplex> {
    if !u.is_open() {
        return Err(Error::Classification {
            expected: "open".into(),
            reason: "a member has a coface outside the set".into(),
        });
    }
    sections(u, f)
}

fn same_complex(z: &ConstructibleSet, f: &Sheaf) -> Result<()> {
    if z.complex().len() != f.complex().len() || **z.complex() != **f.complex() {
        return Err(Error::InvalidParameter(
            "set and sheaf live on different complexes".into(),
        ));
    }
    Ok(())
}

/// Restriction `RΓ(big; F) → RΓ(small; F)` for locally closed `small ⊆ big`.
pub fn restriction_between(
    f: &Sheaf,
    big: &ConstructibleSet,
    small: &ConstructibleSet,
) -> Result<ChainMap> {
    same_complex(big, f)?;
    same_complex(small, f)?;
    big.require_locally_closed()?;
    small.require_locally_closed()?;
    if !small.is_subset(big) {
        return Err(Error::InvalidParameter(
            "restriction target is not a subset".into(),
        ));
    }
    let ib = PairsIndex::new(big, f);
    let is = PairsIndex::new(small, f);
    let src = ib.build(big, f)?;
    let tgt = is.build(small, f)?;
    let maps = ib.projection_to(&is, f.field(), f)?;
    ChainMap::new(src, tgt, maps)
}

/// `RΓ(Z; F)` through a barycentric subdivision: the sheaf and `Z` are transported to
/// the subdivision and sections are taken over the union of open stars of the
/// transported cells.
pub fn sections_locally_closed(z: &ConstructibleSet, f: &Sheaf) -> Result<CochainComplex> {
    same_complex(z, f)?;
    z.require_locally_closed()?;
    let (_, carrier) = subdivide_complex(z.complex());
    let fb = pullback(&carrier, f)?;
    let u = transport_constructible(z, &carrier).up_closure();
    sections(&u, &fb)
}

/// `R lim` over the cells of `Z` computed from the nerve: one summand `F(σ_n)` for
/// every strict chain `σ_0 < … < σ_n` in `Z`. Independent of the interval complex and
/// of incidence signs; meant for small inputs.
pub fn sections_chains(z: &ConstructibleSet, f: &Sheaf) -> Result<CochainComplex> {
    same_complex(z, f)?;
    let k = z.complex();
    let field = f.field();
    let members = z.indices();
    let mut chains: Vec<Vec<usize>> = members.iter().map(|m| vec![*m]).collect();
    let mut frontier = chains.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for c in &frontier {
            let last = *c.last().unwrap();
            for &m in &members {
                if m != last && k.leq(last, m) {
                    let mut d = c.clone();
                    d.push(m);
                    next.push(d);
                }
            }
        }
        chains.extend(next.iter().cloned());
        frontier = next;
    }
    let lookup: HashMap<&[usize], usize> = chains
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();
    let mut offsets: HashMap<(usize, i32), usize> = HashMap::new();
    let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
    for (i, c) in chains.iter().enumerate() {
        let st = f.stalk(*c.last().unwrap());
        for q in st.start()..st.end() {
            if st.dim(q) == 0 {
                continue;
            }
            let n = c.len() as i32 - 1 + q;
            let slot = dims.entry(n).or_insert(0);
            offsets.insert((i, q), *slot);
            *slot += st.dim(q);
        }
    }
    let Some((&lo, _)) = dims.iter().next() else {
        return Ok(CochainComplex::zero(field));
    };
    let hi = *dims.keys().last().unwrap();
    let dim = |n: i32| dims.get(&n).copied().unwrap_or(0);
    let mut builders: BTreeMap<i32, MatrixBuilder> = (lo..hi)
        .map(|n| (n, MatrixBuilder::new(field, dim(n + 1), dim(n))))
        .collect();
    for (i, c) in chains.iter().enumerate() {
        let len = c.len() as i32 - 1;
        let top = *c.last().unwrap();
        let st = f.stalk(top);
        for q in st.start()..st.end() {
            let Some(col) = offsets.get(&(i, q)).copied() else {
                continue;
            };
            let Some(b) = builders.get_mut(&(len + q)) else {
                continue;
            };
            if let Some(row) = offsets.get(&(i, q + 1)) {
                b.push_block(*row, col, &st.diff(q), &field.sign(len % 2 == 1));
            }
            for &m in &members {
                if c.contains(&m) {
                    continue;
                }
                let j = c.iter().filter(|x| k.leq(**x, m)).count();
                let comparable =
                    c[..j].iter().all(|x| k.leq(*x, m)) && c[j..].iter().all(|x| k.leq(m, *x));
                if !comparable {
                    continue;
                }
                let mut d = c.clone();
                d.insert(j, m);
                let target = lookup[d.as_slice()];
                let sign = field.sign(j % 2 == 1);
                if j == c.len() {
                    let r = f.restriction(top, m)?;
                    let block = r.component(q, st, f.stalk(m));
                    if let Some(row) = offsets.get(&(target, q)) {
                        b.push_block(*row, col, &block, &sign);
                    }
                } else if let Some(row) = offsets.get(&(target, q)) {
                    b.push_identity(*row, col, st.dim(q), &sign);
                }
            }
        }
    }
    let dimv: Vec<usize> = (lo..=hi).map(dim).collect();
    let diffs = builders.into_values().map(|b| b.build()).collect();
    CochainComplex::new(field, lo, dimv, diffs)
}

/// Cellular cochains `⊕_{σ ∈ Z} F(σ)` in degree `dim σ + q` with incidence-signed
/// restrictions. For a closed `Z` in a compact complex this is `RΓ(Z; F)`; on open
/// sets it computes compactly supported cohomology instead.
pub fn sections_naive(z: &ConstructibleSet, f: &Sheaf) -> Result<CochainComplex> {
    same_complex(z, f)?;
    let k = z.complex();
    let field = f.field();
    let mut offsets: HashMap<(usize, i32), usize> = HashMap::new();
    let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
    for s in z.indices() {
        let st = f.stalk(s);
        for q in st.start()..st.end() {
            if st.dim(q) == 0 {
                continue;
            }
            let slot = dims.entry(k.dim_of(s) as i32 + q).or_insert(0);
            offsets.insert((s, q), *slot);
            *slot += st.dim(q);
        }
    }
    let Some((&lo, _)) = dims.iter().next() else {
        return Ok(CochainComplex::zero(field));
    };
    let hi = *dims.keys().last().unwrap();
    let dim = |n: i32| dims.get(&n).copied().unwrap_or(0);
    let mut builders: BTreeMap<i32, MatrixBuilder> = (lo..hi)
        .map(|n| (n, MatrixBuilder::new(field, dim(n + 1), dim(n))))
        .collect();
    for s in z.indices() {
        let st = f.stalk(s);
        let n0 = k.dim_of(s) as i32;
        for q in st.start()..st.end() {
            let Some(col) = offsets.get(&(s, q)).copied() else {
                continue;
            };
            let Some(b) = builders.get_mut(&(n0 + q)) else {
                continue;
            };
            if let Some(row) = offsets.get(&(s, q + 1)) {
                b.push_block(*row, col, &st.diff(q), &field.sign(n0 % 2 == 1));
            }
            for (up, sign) in k.cofacets(s) {
                if !z.contains(*up) {
                    continue;
                }
                let i = k.facets(*up).iter().position(|(x, _)| *x == s).unwrap();
                let r = f.facet_restriction(*up, i).component(q, st, f.stalk(*up));
                if let Some(row) = offsets.get(&(*up, q)) {
                    b.push_block(*row, col, &r, &field.from_i64(*sign as i64));
                }
            }
        }
    }
    let dimv: Vec<usize> = (lo..=hi).map(dim).collect();
    let diffs = builders.into_values().map(|b| b.build()).collect();
    CochainComplex::new_unchecked(field, lo, dimv, diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{open_star, CellComplex, SimplicialComplex};
    use crate::linalg::GradedDims;
    use std::sync::Arc;

    fn path() -> Arc<CellComplex> {
        Arc::new(
            SimplicialComplex::from_facets(
                vec!["a".into(), "b".into(), "c".into()],
                &[vec![0, 1], vec![1, 2]],
            )
            .unwrap()
            .to_cell_complex(),
        )
    }

    fn circle() -> Arc<CellComplex> {
        Arc::new(
            SimplicialComplex::from_facets(
                vec!["a".into(), "b".into(), "c".into()],
                &[vec![0, 1], vec![1, 2], vec![0, 2]],
            )
            .unwrap()
            .to_cell_complex(),
        )
    }

    #[test]
    fn constant_sheaf_on_circle() {
        let k = circle();
        let f = Sheaf::constant(k.clone(), Field::Rationals);
        let all = ConstructibleSet::all(k);
        let h = GradedDims::from_pairs([(0, 1), (1, 1)]);
        assert_eq!(sections_open(&all, &f).unwrap().cohomology(), h);
        assert_eq!(sections_chains(&all, &f).unwrap().cohomology(), h);
        assert_eq!(sections_naive(&all, &f).unwrap().cohomology(), h);
    }

    #[test]
    fn open_star_gives_stalk() {
        let k = path();
        let f = Sheaf::constant(k.clone(), Field::Rationals);
        for s in 0..k.len() {
            let u = open_star(&k, s);
            let c = sections_open(&u, &f).unwrap();
            c.validate().unwrap();
            assert_eq!(c.cohomology(), GradedDims::from_pairs([(0, 1)]));
        }
        // the cellular formula on an open star yields compact support instead
        let b = k.index_of("b").unwrap();
        let naive = sections_naive(&open_star(&k, b), &f).unwrap().cohomology();
        assert_eq!(naive, GradedDims::from_pairs([(1, 1)]));
    }

    #[test]
    fn half_open_and_closed() {
        let k = path();
        let f = Sheaf::constant(k.clone(), Field::Rationals);
        let z = ConstructibleSet::from_ids(k.clone(), &["b", "ab"]).unwrap();
        let k0 = GradedDims::from_pairs([(0, 1)]);
        assert_eq!(sections(&z, &f).unwrap().cohomology(), k0);
        assert_eq!(sections_locally_closed(&z, &f).unwrap().cohomology(), k0);
        let pts = ConstructibleSet::from_ids(k, &["a", "c"]).unwrap();
        assert_eq!(
            sections_locally_closed(&pts, &f).unwrap().cohomology(),
            GradedDims::from_pairs([(0, 2)])
        );
    }

    #[test]
    fn restriction_from_circle_to_arc() {
        let k = circle();
        let f = Sheaf::constant(k.clone(), Field::Rationals);
        let all = ConstructibleSet::all(k.clone());
        let arc = ConstructibleSet::from_ids(k, &["ab"]).unwrap();
        let r = restriction_between(&f, &all, &arc).unwrap();
        let flags = r.iso_flags();
        assert!(flags[&0]);
        assert!(!flags[&1]);
    }
}
