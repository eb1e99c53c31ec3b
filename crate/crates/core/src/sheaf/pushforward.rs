use super::sections::{local_sections, projection, PairsIndex};
use super::{GradedMap, Sheaf};
use crate::complex::{open_star, CellMap, ConstructibleSet};
use crate::error::{Error, Result};
use crate::linalg::CochainComplex;

/// Builds a sheaf whose value at `σ` is the interval complex of `region(σ)`, with
/// projections as restrictions. `region` must shrink along face relations.
fn sections_sheaf(
    base: &std::sync::Arc<crate::complex::CellComplex>,
    f: &Sheaf,
    region: impl Fn(usize) -> ConstructibleSet,
) -> Result<Sheaf> {
    let n = base.len();
    let mut idx: Vec<PairsIndex> = Vec::with_capacity(n);
    let mut stalks: Vec<CochainComplex> = Vec::with_capacity(n);
    for s in 0..n {
        let (i, c) = local_sections(&region(s), f)?;
        idx.push(i);
        stalks.push(c);
    }
    let mut restr: Vec<Vec<GradedMap>> = Vec::with_capacity(n);
    for tau in 0..n {
        let mut row = Vec::new();
        for (sigma, _) in base.facets(tau) {
            row.push(projection(&idx[*sigma], &idx[tau], f)?);
        }
        restr.push(row);
    }
    Ok(Sheaf::from_parts(base.clone(), f.field(), stalks, restr))
}

/// `Rj_*` for the inclusion of an open set `U`: the value at every cell `σ` is the
/// interval complex of `U(σ) ∩ U`, and restrictions are projections. On cells of `U`
/// this complex is quasi-isomorphic to `G(σ)`; using it everywhere keeps the
/// restrictions strictly functorial. Values of `g` outside `U` are ignored.
pub fn pushforward_open(u: &ConstructibleSet, g: &Sheaf) -> Result<Sheaf> {
    if **u.complex() != **g.complex() {
        return Err(Error::InvalidParameter(
            "set and sheaf live on different complexes".into(),
        ));
    }
    if !u.is_open() {
        return Err(Error::Classification {
            expected: "open".into(),
            reason: "a member has a coface outside the set".into(),
        });
    }
    let k = g.complex().clone();
    sections_sheaf(&k, g, |s| open_star(&k, s).intersection(u))
}

/// `Rp_*` along an order-preserving projection: the value at a base cell `σ` is the
/// interval complex of `p⁻¹(U(σ))`.
pub fn pushforward_proper_base(p: &CellMap, f: &Sheaf) -> Result<Sheaf> {
    if *p.source != **f.complex() {
        return Err(Error::InvalidParameter(
            "projection does not start at the sheaf's complex".into(),
        ));
    }
    let base = p.target.clone();
    let stars: Vec<ConstructibleSet> = (0..base.len())
        .map(|s| p.preimage(&open_star(&base, s)))
        .collect();
    for (s, pre) in stars.iter().enumerate() {
        if !pre.is_open() {
            return Err(Error::InvalidParameter(format!(
                "preimage of the open star of {} is not open",
                base.id(s)
            )));
        }
    }
    sections_sheaf(&base, f, |s| stars[s].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{CellComplex, SimplicialComplex};
    use crate::linalg::{Field, GradedDims};
    use crate::sheaf::{sections, stalk_dims, tensor_indicator};
    use std::sync::Arc;

    /// `{-∞} - R - {+∞}` as three cells.
    fn rbar() -> Arc<CellComplex> {
        Arc::new(
            CellComplex::new(
                vec![("-inf".into(), 0), ("R".into(), 1), ("+inf".into(), 0)],
                &[("R", "-inf", -1), ("R", "+inf", 1)],
            )
            .unwrap(),
        )
    }

    #[test]
    fn line_into_extended_line() {
        let k = rbar();
        let r = ConstructibleSet::from_ids(k.clone(), &["R"]).unwrap();
        let g = Sheaf::constant(k.clone(), Field::Rationals);
        let pushed = pushforward_open(&r, &g).unwrap();
        pushed.validate().unwrap();
        let one = GradedDims::from_pairs([(0, 1)]);
        for d in stalk_dims(&pushed) {
            assert_eq!(d, one);
        }
    }

    #[test]
    fn extended_line_to_point() {
        let k = rbar();
        let pt = Arc::new(SimplicialComplex::simplex(&["p"]).to_cell_complex());
        let p = CellMap::new(k.clone(), pt, vec![0; 3]).unwrap();
        let f = Sheaf::constant(k.clone(), Field::Rationals);
        let out = pushforward_proper_base(&p, &f).unwrap();
        assert_eq!(out.stalk(0).cohomology(), GradedDims::from_pairs([(0, 1)]));
        let half = ConstructibleSet::from_ids(k.clone(), &["R", "+inf"]).unwrap();
        let g = tensor_indicator(&half, &f).unwrap();
        let out = pushforward_proper_base(&p, &g).unwrap();
        assert!(out.stalk(0).cohomology().is_zero());
        let all = ConstructibleSet::all(k);
        assert!(sections(&all, &g).unwrap().cohomology().is_zero());
    }
}
