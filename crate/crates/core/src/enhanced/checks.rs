//! Compatibility checks of the associated sheaf functor on a given model.

use std::sync::Arc;

use num::BigRational;
use serde::Serialize;

use super::catalog::line_spec;
use super::line::coarsening;
use super::{
    blowup_pole, dual_model, e_iota, external_tensor, product_template, refine, sheafify,
    CatalogParams, TModel,
};
use crate::complex::{CellComplex, ConstructibleSet};
use crate::error::Result;
use crate::sheaf::{
    external_tensor as sheaf_etens, pullback, qis_compare, stalk_dims, verdier_dual, Sheaf,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    /// One line per comparison that was run.
    pub detail: Vec<String>,
}

fn report(name: &str, results: Vec<(String, Option<String>)>) -> CheckReport {
    let pass = results.iter().all(|(_, d)| d.is_none());
    CheckReport {
        name: name.to_string(),
        pass,
        detail: results
            .into_iter()
            .map(|(what, d)| match d {
                None => format!("{what}: pass"),
                Some(d) => format!("{what}: FAIL ({d})"),
            })
            .collect(),
    }
}

/// `sh(e ι L) ≅ L` on the product template over the base of `m`, for `L` the constant
/// sheaf and for `L = sh(m)`.
pub fn check_identity(m: &TModel) -> Result<CheckReport> {
    let template = product_template(&m.base, m.field())?;
    let mut out = Vec::new();
    for (what, l) in [
        ("constant sheaf", Sheaf::constant(m.base.clone(), m.field())),
        ("associated sheaf of the model", sheafify(m)?),
    ] {
        let back = sheafify(&e_iota(&l, &template)?)?;
        out.push((what.to_string(), qis_compare(&back, &l)?.first_divergence));
    }
    Ok(report("identity", out))
}

/// `sh(D^E K) ≅ D(sh K)`.
pub fn check_duality(m: &TModel) -> Result<CheckReport> {
    let lhs = sheafify(&dual_model(m)?)?;
    let rhs = verdier_dual(&sheafify(m)?);
    Ok(report(
        "duality",
        vec![(
            "sh∘D vs D∘sh".into(),
            qis_compare(&lhs, &rhs)?.first_divergence,
        )],
    ))
}

/// The sheaves `k_{x>0}`, `k_{x≥0}` on the three-cell line and `k` on a point.
pub fn etens_factors(field: crate::linalg::Field) -> Result<Vec<(String, Sheaf)>> {
    let line = Arc::new(CellComplex::new(
        vec![
            ("x<0".to_string(), 1),
            ("x=0".to_string(), 0),
            ("x>0".to_string(), 1),
        ],
        &[("x<0", "x=0", 1), ("x>0", "x=0", -1)],
    )?);
    let pt = Arc::new(CellComplex::new(
        vec![("pt".to_string(), 0)],
        &[] as &[(&str, &str, i8)],
    )?);
    let pos = ConstructibleSet::from_ids(line.clone(), &["x>0"])?;
    let nonneg = ConstructibleSet::from_ids(line, &["x=0", "x>0"])?;
    Ok(vec![
        ("k_{x>0}".into(), Sheaf::constant_on(&pos, field, 0)?),
        ("k_{x>=0}".into(), Sheaf::constant_on(&nonneg, field, 0)?),
        ("k_pt".into(), Sheaf::constant(pt, field)),
    ])
}

/// `sh(ε(F) ⊗⁺ K) ≅ F ⊠ sh(K)` for the factors of [`etens_factors`].
pub fn check_etens(m: &TModel) -> Result<CheckReport> {
    let sh = sheafify(m)?;
    let mut out = Vec::new();
    for (what, f) in etens_factors(m.field())? {
        let lhs = sheafify(&external_tensor(&f, m)?)?;
        let (rhs, _) = sheaf_etens(&f, &sh)?;
        out.push((what, qis_compare(&lhs, &rhs)?.first_divergence));
    }
    Ok(report("etens", out))
}

/// Stalk dimensions survive one barycentric refinement of the total complex.
pub fn check_refinement(m: &TModel) -> Result<CheckReport> {
    let a = stalk_dims(&sheafify(m)?);
    let b = stalk_dims(&sheafify(&refine(m)?)?);
    let d = (a != b).then(|| format!("{a:?} vs {b:?}"));
    Ok(report(
        "refinement",
        vec![("one barycentric refinement".into(), d)],
    ))
}

/// The catalog model translated by each `a` has the same associated sheaf. Models over
/// the line may gain base vertices; their sheaves are compared after pulling the
/// original back along the coarsening map.
pub fn check_translation(
    name: &str,
    params: &CatalogParams,
    shifts: &[BigRational],
) -> Result<CheckReport> {
    let mut out = Vec::new();
    if name == "blowup-pole" {
        let s0 = sheafify(&blowup_pole(
            params.d,
            params.translate.as_ref(),
            params.field,
        )?)?;
        for a in shifts {
            let s = sheafify(&blowup_pole(params.d, Some(a), params.field)?)?;
            out.push((
                format!("t -> t+{a}"),
                qis_compare(&s, &s0)?.first_divergence,
            ));
        }
        return Ok(report("translation", out));
    }
    let mut spec = line_spec(name)?;
    if let Some(a) = &params.translate {
        spec = spec.translated(a);
    }
    let (m0, lm0) = spec.model(params.field)?;
    let s0 = sheafify(&m0)?;
    for a in shifts {
        let (m1, lm1) = spec.translated(a).model(params.field)?;
        let c = coarsening(&lm1.vertices, &lm0.vertices)?;
        let pulled = pullback(&c, &s0)?;
        out.push((
            format!("t -> t+{a}"),
            qis_compare(&sheafify(&m1)?, &pulled)?.first_divergence,
        ));
    }
    Ok(report("translation", out))
}
