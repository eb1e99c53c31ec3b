use serde::Serialize;

use super::dual::dual_stalk_complex;
use super::sections::local_sections;
use super::Sheaf;
use crate::complex::{open_star, ConstructibleSet};
use crate::error::{Error, Result};
use crate::linalg::{ChainMap, GradedDims};

/// Cohomology dimensions of every value complex.
pub fn stalk_dims(f: &Sheaf) -> Vec<GradedDims> {
    f.stalks().iter().map(|s| s.cohomology()).collect()
}

/// Dimensions of `H^k(i_σ^! F)`, read off from the Verdier dual:
/// `H^k(i^! F) ≅ H^{-k}((D F)_σ)^*`.
pub fn costalk_dims(f: &Sheaf, sigma: usize) -> GradedDims {
    dual_stalk_complex(f, sigma)
        .cohomology()
        .iter()
        .fold(GradedDims::new(), |mut acc, (k, d)| {
            acc.add(-k, d);
            acc
        })
}

/// Point costalk dimensions computed locally: `RΓ_σ F` is the shifted cone of
/// `RΓ(U(σ)) → RΓ(U(σ) ∖ σ)`, and a point of a cell of dimension `d` has costalk
/// `RΓ_σ F[-d]`.
pub fn costalk_dims_local(f: &Sheaf, sigma: usize) -> Result<GradedDims> {
    let k = f.complex();
    let star = open_star(k, sigma);
    let mut punctured = star.clone();
    punctured = punctured.difference(&ConstructibleSet::from_indices(k.clone(), [sigma]));
    let r = super::restriction_between(f, &star, &punctured)?;
    let cone = ChainMap::cone(&r).cohomology();
    Ok(cone.shifted(-1 - k.dim_of(sigma) as i32))
}

/// Result of comparing two sheaves dimensionally.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QisReport {
    pub pass: bool,
    pub first_divergence: Option<String>,
    pub cells_checked: usize,
}

/// Compares stalk cohomology at every cell, sections over every open star, and global
/// sections. Reports the first mismatch.
pub fn qis_compare(f: &Sheaf, g: &Sheaf) -> Result<QisReport> {
    let k = f.complex();
    if **k != **g.complex() {
        return Err(Error::InvalidParameter(
            "sheaves live on different complexes".into(),
        ));
    }
    if f.field() != g.field() {
        return Err(Error::FieldMismatch("qis_compare".into()));
    }
    let fail = |msg: String| QisReport {
        pass: false,
        first_divergence: Some(msg),
        cells_checked: k.len(),
    };
    for s in 0..k.len() {
        let (a, b) = (f.stalk(s).cohomology(), g.stalk(s).cohomology());
        if a != b {
            return Ok(fail(format!("stalk at {}: {a} vs {b}", k.id(s))));
        }
    }
    for s in 0..k.len() {
        let u = open_star(k, s);
        let a = local_sections(&u, f)?.1.cohomology();
        let b = local_sections(&u, g)?.1.cohomology();
        if a != b {
            return Ok(fail(format!("sections over U({}): {a} vs {b}", k.id(s))));
        }
    }
    let all = ConstructibleSet::all(k.clone());
    let a = local_sections(&all, f)?.1.cohomology();
    let b = local_sections(&all, g)?.1.cohomology();
    if a != b {
        return Ok(fail(format!("global sections: {a} vs {b}")));
    }
    Ok(QisReport {
        pass: true,
        first_divergence: None,
        cells_checked: k.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use crate::linalg::Field;
    use std::sync::Arc;

    #[test]
    fn shift_is_detected() {
        let k = Arc::new(SimplicialComplex::simplex(&["a", "b"]).to_cell_complex());
        let f = Sheaf::constant(k, Field::Rationals);
        assert!(qis_compare(&f, &f).unwrap().pass);
        let r = qis_compare(&f, &f.shift(1)).unwrap();
        assert!(!r.pass);
        assert!(r.first_divergence.unwrap().starts_with("stalk"));
    }

    #[test]
    fn costalk_routes_agree_on_interval() {
        let k = Arc::new(SimplicialComplex::simplex(&["a", "b"]).to_cell_complex());
        let f = Sheaf::constant(k.clone(), Field::Rationals);
        for s in 0..k.len() {
            assert_eq!(costalk_dims(&f, s), costalk_dims_local(&f, s).unwrap());
        }
        let ab = k.index_of("ab").unwrap();
        assert_eq!(costalk_dims(&f, ab), GradedDims::from_pairs([(1, 1)]));
    }
}
