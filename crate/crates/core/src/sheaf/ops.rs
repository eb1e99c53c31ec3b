use std::collections::{BTreeMap, HashMap};

use super::{GradedMap, Sheaf};
use crate::complex::{product, CellMap, ConstructibleSet, Product};
use crate::error::{Error, Result};
use crate::linalg::{CochainComplex, Field, Matrix, MatrixBuilder};

/// Pullback `g⁻¹F` along an order-preserving cellwise map: the value at `σ` is
/// `F(g(σ))`.
pub fn pullback(g: &CellMap, f: &Sheaf) -> Result<Sheaf> {
    if g.target.len() != f.complex().len() || *g.target != **f.complex() {
        return Err(Error::InvalidParameter(
            "pullback map does not land in the sheaf's complex".into(),
        ));
    }
    let k = &g.source;
    let stalks: Vec<CochainComplex> = (0..k.len()).map(|s| f.stalk(g.apply(s)).clone()).collect();
    let mut cache: HashMap<(usize, usize), GradedMap> = HashMap::new();
    let mut restr = Vec::with_capacity(k.len());
    for tau in 0..k.len() {
        let mut row = Vec::new();
        for (sigma, _) in k.facets(tau) {
            let key = (g.apply(*sigma), g.apply(tau));
            let m = match cache.get(&key) {
                Some(m) => m.clone(),
                None => {
                    let m = f.restriction(key.0, key.1)?;
                    cache.insert(key, m.clone());
                    m
                }
            };
            row.push(m);
        }
        restr.push(row);
    }
    Ok(Sheaf::from_parts(k.clone(), f.field(), stalks, restr))
}

/// `F ⊗ k_Z`: values outside the locally closed set `Z` are replaced by zero.
pub fn tensor_indicator(z: &ConstructibleSet, f: &Sheaf) -> Result<Sheaf> {
    if **z.complex() != **f.complex() {
        return Err(Error::InvalidParameter(
            "set and sheaf live on different complexes".into(),
        ));
    }
    z.require_locally_closed()?;
    let k = f.complex();
    let field = f.field();
    let stalks = (0..k.len())
        .map(|s| {
            if z.contains(s) {
                f.stalk(s).clone()
            } else {
                CochainComplex::zero(field)
            }
        })
        .collect();
    let restr = (0..k.len())
        .map(|tau| {
            k.facets(tau)
                .iter()
                .enumerate()
                .map(|(j, (sigma, _))| {
                    if z.contains(tau) && z.contains(*sigma) {
                        f.facet_restriction(tau, j).clone()
                    } else {
                        GradedMap::default()
                    }
                })
                .collect()
        })
        .collect();
    Ok(Sheaf::from_parts(k.clone(), field, stalks, restr))
}

/// Extension by zero along the inclusion of a locally closed induced subcomplex:
/// `embed` sends each cell of `f`'s complex to its index in the ambient complex.
pub fn extend_by_zero(embed: &CellMap, f: &Sheaf) -> Result<Sheaf> {
    if *embed.source != **f.complex() {
        return Err(Error::InvalidParameter(
            "embedding does not start at the sheaf's complex".into(),
        ));
    }
    let big = embed.target.clone();
    let image = embed.image(&crate::complex::ConstructibleSet::all(embed.source.clone()));
    image.require_locally_closed()?;
    let mut back = vec![None; big.len()];
    for (i, t) in embed.as_slice().iter().enumerate() {
        back[*t] = Some(i);
    }
    let field = f.field();
    let stalks = (0..big.len())
        .map(|s| back[s].map_or_else(|| CochainComplex::zero(field), |i| f.stalk(i).clone()))
        .collect();
    let mut restr = Vec::with_capacity(big.len());
    for tau in 0..big.len() {
        let mut row = Vec::new();
        for (sigma, _) in big.facets(tau) {
            row.push(match (back[*sigma], back[tau]) {
                (Some(a), Some(b)) => f.restriction(a, b)?,
                _ => GradedMap::default(),
            });
        }
        restr.push(row);
    }
    Ok(Sheaf::from_parts(big, field, stalks, restr))
}

/// Direct sum `F ⊕ G` of two sheaves on the same complex.
pub fn direct_sum(f: &Sheaf, g: &Sheaf) -> Result<Sheaf> {
    let k = f.complex();
    if **k != **g.complex() {
        return Err(Error::InvalidParameter(
            "sheaves live on different complexes".into(),
        ));
    }
    let field = f.field();
    let stalks: Vec<CochainComplex> = (0..k.len())
        .map(|s| f.stalk(s).direct_sum(g.stalk(s)))
        .collect::<Result<_>>()?;
    let mut restr = Vec::with_capacity(k.len());
    for tau in 0..k.len() {
        let mut row = Vec::new();
        for (j, (sigma, _)) in k.facets(tau).iter().enumerate() {
            let (a, b) = (f.facet_restriction(tau, j), g.facet_restriction(tau, j));
            let mut maps = BTreeMap::new();
            let lo = stalks[*sigma].start().min(stalks[tau].start());
            let hi = stalks[*sigma].end().max(stalks[tau].end());
            for n in lo..hi {
                let mut bld = MatrixBuilder::new(field, stalks[tau].dim(n), stalks[*sigma].dim(n));
                bld.push_block(
                    0,
                    0,
                    &a.component(n, f.stalk(*sigma), f.stalk(tau)),
                    &field.one(),
                );
                bld.push_block(
                    f.stalk(tau).dim(n),
                    f.stalk(*sigma).dim(n),
                    &b.component(n, g.stalk(*sigma), g.stalk(tau)),
                    &field.one(),
                );
                maps.insert(n, bld.build());
            }
            row.push(GradedMap(maps).normalized());
        }
        restr.push(row);
    }
    Ok(Sheaf::from_parts(k.clone(), field, stalks, restr))
}

/// Layout of the tensor product of two complexes: block `(p, q)` sits in degree `p+q`.
pub(crate) struct TensorLayout {
    pub complex: CochainComplex,
    offsets: HashMap<(i32, i32), usize>,
}

pub(crate) fn tensor_complex(a: &CochainComplex, b: &CochainComplex) -> TensorLayout {
    let field = a.field();
    let mut offsets = HashMap::new();
    let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
    for p in a.start()..a.end() {
        for q in b.start()..b.end() {
            let d = a.dim(p) * b.dim(q);
            if d == 0 {
                continue;
            }
            let slot = dims.entry(p + q).or_insert(0);
            offsets.insert((p, q), *slot);
            *slot += d;
        }
    }
    let Some((&lo, _)) = dims.iter().next() else {
        return TensorLayout {
            complex: CochainComplex::zero(field),
            offsets,
        };
    };
    let hi = *dims.keys().last().unwrap();
    let dim = |n: i32| dims.get(&n).copied().unwrap_or(0);
    let mut builders: BTreeMap<i32, MatrixBuilder> = (lo..hi)
        .map(|n| (n, MatrixBuilder::new(field, dim(n + 1), dim(n))))
        .collect();
    for (&(p, q), &col) in &offsets {
        let Some(bld) = builders.get_mut(&(p + q)) else {
            continue;
        };
        if let Some(&row) = offsets.get(&(p + 1, q)) {
            let m = a.diff(p).kron(&Matrix::identity(field, b.dim(q))).unwrap();
            bld.push_block(row, col, &m, &field.one());
        }
        if let Some(&row) = offsets.get(&(p, q + 1)) {
            let m = Matrix::identity(field, a.dim(p)).kron(&b.diff(q)).unwrap();
            bld.push_block(row, col, &m, &field.sign(p.rem_euclid(2) == 1));
        }
    }
    let dimv: Vec<usize> = (lo..=hi).map(dim).collect();
    let diffs = builders.into_values().map(|b| b.build()).collect();
    TensorLayout {
        complex: CochainComplex::new_unchecked(field, lo, dimv, diffs).expect("tensor shapes"),
        offsets,
    }
}

/// `f ⊗ g` between tensor complexes with the given layouts.
pub(crate) fn tensor_map(
    f: &GradedMap,
    g: &GradedMap,
    src: (&CochainComplex, &CochainComplex, &TensorLayout),
    tgt: (&CochainComplex, &CochainComplex, &TensorLayout),
) -> GradedMap {
    let field = src.2.complex.field();
    let mut builders: BTreeMap<i32, MatrixBuilder> = BTreeMap::new();
    for (&(p, q), &col) in &src.2.offsets {
        let Some(&row) = tgt.2.offsets.get(&(p, q)) else {
            continue;
        };
        let (Some(fp), Some(gq)) = (f.0.get(&p), g.0.get(&q)) else {
            continue;
        };
        let m = fp.kron(gq).unwrap();
        let n = p + q;
        builders
            .entry(n)
            .or_insert_with(|| {
                MatrixBuilder::new(field, tgt.2.complex.dim(n), src.2.complex.dim(n))
            })
            .push_block(row, col, &m, &field.one());
    }
    GradedMap(builders.into_iter().map(|(n, b)| (n, b.build())).collect()).normalized()
}

/// External tensor product `F ⊠ G` on the product complex.
pub fn external_tensor(f: &Sheaf, g: &Sheaf) -> Result<(Sheaf, Product)> {
    if f.field() != g.field() {
        return Err(Error::FieldMismatch("external tensor".into()));
    }
    let field: Field = f.field();
    let prod = product(f.complex(), g.complex());
    let (k1, k2) = (f.complex(), g.complex());
    let layouts: Vec<TensorLayout> = (0..prod.complex.len())
        .map(|i| {
            let (a, b) = (prod.first.apply(i), prod.second.apply(i));
            tensor_complex(f.stalk(a), g.stalk(b))
        })
        .collect();
    let k = &prod.complex;
    let mut restr = Vec::with_capacity(k.len());
    for tau in 0..k.len() {
        let (a, b) = (prod.first.apply(tau), prod.second.apply(tau));
        let mut row = Vec::new();
        for (sigma, _) in k.facets(tau) {
            let (a2, b2) = (prod.first.apply(*sigma), prod.second.apply(*sigma));
            let (mf, mg) = if a2 != a {
                let j = k1.facets(a).iter().position(|(x, _)| *x == a2).unwrap();
                (
                    f.facet_restriction(a, j).clone(),
                    GradedMap::identity(g.stalk(b)),
                )
            } else {
                let j = k2.facets(b).iter().position(|(x, _)| *x == b2).unwrap();
                (
                    GradedMap::identity(f.stalk(a)),
                    g.facet_restriction(b, j).clone(),
                )
            };
            row.push(tensor_map(
                &mf,
                &mg,
                (f.stalk(a2), g.stalk(b2), &layouts[*sigma]),
                (f.stalk(a), g.stalk(b), &layouts[tau]),
            ));
        }
        restr.push(row);
    }
    let stalks = layouts.into_iter().map(|l| l.complex).collect();
    Ok((Sheaf::from_parts(k.clone(), field, stalks, restr), prod))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{CellComplex, SimplicialComplex};
    use crate::linalg::GradedDims;
    use crate::sheaf::{sections, stalk_dims};
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

    #[test]
    fn indicator_kills_sections() {
        // [0,2] with k_{(0,1]}: H*([0,2], {0} ∪ [1,2]) = 0
        let k = path();
        let f = Sheaf::constant(k.clone(), Field::Rationals);
        let z = ConstructibleSet::from_ids(k.clone(), &["b", "ab"]).unwrap();
        let g = tensor_indicator(&z, &f).unwrap();
        g.validate().unwrap();
        let all = ConstructibleSet::all(k);
        assert!(sections(&all, &g).unwrap().cohomology().is_zero());
    }

    #[test]
    fn indicators_compose() {
        let k = path();
        let f = Sheaf::constant(k.clone(), Field::Rationals);
        let z1 = ConstructibleSet::from_ids(k.clone(), &["b", "ab", "bc"]).unwrap();
        let z2 = ConstructibleSet::from_ids(k.clone(), &["a", "ab", "b"]).unwrap();
        let a = tensor_indicator(&z1, &tensor_indicator(&z2, &f).unwrap()).unwrap();
        let b = tensor_indicator(&z1.intersection(&z2), &f).unwrap();
        assert_eq!(stalk_dims(&a), stalk_dims(&b));
    }

    #[test]
    fn torus_by_external_tensor() {
        let c = Arc::new(
            SimplicialComplex::from_facets(
                vec!["a".into(), "b".into(), "c".into()],
                &[vec![0, 1], vec![1, 2], vec![0, 2]],
            )
            .unwrap()
            .to_cell_complex(),
        );
        let f = Sheaf::constant(c.clone(), Field::Rationals).shift(1);
        let g = Sheaf::constant(c, Field::Rationals);
        let (t, prod) = external_tensor(&f, &g).unwrap();
        t.validate().unwrap();
        let all = ConstructibleSet::all(prod.complex.clone());
        assert_eq!(
            sections(&all, &t).unwrap().cohomology(),
            GradedDims::from_pairs([(-1, 1), (0, 2), (1, 1)])
        );
    }
}
