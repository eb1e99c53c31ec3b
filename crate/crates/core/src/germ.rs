//! Finite towers realizing the germ formula for the associated sheaf of a fiber
//! restriction: the stalk at `y0` is the limit of
//! `RΓ(U_{c,δ,ε} ∩ {t ≥ -c}; k_{t>-c} ⊗ F)` over shrinking regions
//! `U_{c,δ,ε} = {|x - y0| < a, t + c < δ |x - y0|^{-ε}}`.
//!
//! Generated towers fix `ε = 1` and `c = 1`, halve `a` and `δ` at every stage and carve
//! all stages in one common stratification, so consecutive stages compare by plain
//! restriction.

use std::collections::BTreeMap;

use num::{BigRational, One, Signed, Zero};
use serde::Serialize;

use crate::complex::ConstructibleSet;
use crate::enhanced::{
    line_spec, restrict_to_fiber, sheafify, CatalogParams, Curve, ExtT, Side, TModel,
};
use crate::error::{Error, Result};
use crate::linalg::{ChainMap, GradedDims};
use crate::sheaf::{restriction_between, tensor_indicator};

/// One stage: the region `U_{c,δ,ε} ∩ {t ≥ -c}` and the cutoff `{t > -c}`.
#[derive(Clone, Debug)]
pub struct Stage {
    pub label: String,
    pub region: ConstructibleSet,
    pub cutoff: ConstructibleSet,
}

/// Decreasing family of regions in the total complex of `model`.
#[derive(Clone, Debug)]
pub struct LimitTower {
    pub model: TModel,
    /// Base cell of the point `y0`.
    pub point: usize,
    pub stages: Vec<Stage>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub label: String,
    pub cells: usize,
    pub dims: GradedDims,
}

#[derive(Clone, Debug, Serialize)]
pub struct GermReport {
    pub model: String,
    pub point: String,
    pub stages: Vec<StageReport>,
    /// Per consecutive pair, whether the restriction is an isomorphism in each degree.
    pub maps: Vec<BTreeMap<i32, bool>>,
    pub stabilized: bool,
    pub limit: Option<GradedDims>,
}

impl LimitTower {
    pub fn validate(&self) -> Result<()> {
        if self.stages.len() < 2 {
            return Err(Error::InvalidTower(
                "a tower needs at least 2 stages".into(),
            ));
        }
        let total = &self.model.total;
        for s in &self.stages {
            if **s.region.complex() != **total || **s.cutoff.complex() != **total {
                return Err(Error::InvalidTower(format!(
                    "stage {} lives on another complex",
                    s.label
                )));
            }
            s.region.require_locally_closed()?;
            if !s.cutoff.is_locally_closed() {
                return Err(Error::InvalidTower(format!(
                    "cutoff of stage {} is not locally closed",
                    s.label
                )));
            }
        }
        for w in self.stages.windows(2) {
            if w[1].cutoff != w[0].cutoff {
                return Err(Error::InvalidTower(format!(
                    "stages {} and {} use different cutoffs",
                    w[0].label, w[1].label
                )));
            }
            if !w[1].region.is_subset(&w[0].region) || w[1].region == w[0].region {
                return Err(Error::InvalidTower(format!(
                    "stages {} and {} are not strictly nested",
                    w[0].label, w[1].label
                )));
            }
        }
        Ok(())
    }
}

/// `RΓ(region; k_cutoff ⊗ F)` for one stage.
pub fn stage_sections(m: &TModel, stage: &Stage) -> Result<crate::linalg::CochainComplex> {
    let g = tensor_indicator(&stage.cutoff, &m.f)?;
    crate::sheaf::sections_locally_closed(&stage.region, &g)
}

/// Evaluates every stage and the restrictions between consecutive stages. The tower is
/// stabilized when the last restriction is an isomorphism in every degree.
pub fn germ_limit(t: &LimitTower) -> Result<GermReport> {
    t.validate()?;
    let m = &t.model;
    let g = tensor_indicator(&t.stages[0].cutoff, &m.f)?;
    let maps: Vec<ChainMap> = t
        .stages
        .windows(2)
        .map(|w| restriction_between(&g, &w[0].region, &w[1].region))
        .collect::<Result<_>>()?;
    let mut stages = Vec::with_capacity(t.stages.len());
    for (i, s) in t.stages.iter().enumerate() {
        let c = if i == 0 {
            &maps[0].source
        } else {
            &maps[i - 1].target
        };
        stages.push(StageReport {
            label: s.label.clone(),
            cells: s.region.len(),
            dims: c.cohomology(),
        });
    }
    let flags: Vec<BTreeMap<i32, bool>> = maps.iter().map(|f| f.iso_flags()).collect();
    let stabilized = flags.last().is_some_and(|f| f.values().all(|b| *b));
    let limit = stabilized.then(|| stages.last().expect("at least 2 stages").dims.clone());
    Ok(GermReport {
        model: m.name.clone(),
        point: m.base.id(t.point).to_string(),
        stages,
        maps: flags,
        stabilized,
        limit,
    })
}

/// Stalk at `point` of the associated sheaf of the restriction of `m` to that point.
pub fn fiber_stalk(m: &TModel, point: usize) -> Result<GradedDims> {
    let n = ConstructibleSet::from_indices(m.base.clone(), [point]);
    let fm = restrict_to_fiber(m, &n)?;
    let s = sheafify(&fm)?;
    Ok(s.stalk(0).cohomology())
}

/// The catalog line model with `y0` added as a base vertex, for comparing a tower
/// against the fiber sheafification.
pub fn pointed_model(
    name: &str,
    params: &CatalogParams,
    y0: &BigRational,
) -> Result<(TModel, usize)> {
    let mut spec = line_spec(name)?;
    if let Some(a) = &params.translate {
        spec = spec.translated(a);
    }
    spec.vertices.push(y0.clone());
    let (m, _) = spec.model(params.field)?;
    let point = m.base.index_of(&format!("x={y0}"))?;
    Ok((m, point))
}

/// Tower for a catalog model over the line at `y0`, with `φ(x) = x - y0`, `ε = 1`,
/// `c = 1` and `a_j = δ_j = 2^{-j}` for `j = 1..=n_stages`.
pub fn hyperbola_tower_generator(
    name: &str,
    params: &CatalogParams,
    y0: &BigRational,
    n_stages: usize,
) -> Result<LimitTower> {
    if n_stages < 2 {
        return Err(Error::InvalidTower(
            "a tower needs at least 2 stages".into(),
        ));
    }
    if name == "blowup-pole" {
        return Err(Error::InvalidParameter(
            "towers are generated for models over the line only".into(),
        ));
    }
    let mut spec = line_spec(name)?;
    if let Some(a) = &params.translate {
        spec = spec.translated(a);
    }
    spec.symmetric = false;
    spec.name = format!("{}@tower", spec.name);
    let c = BigRational::one();
    let deltas: Vec<BigRational> = (1..=n_stages)
        .map(|j| BigRational::new(1.into(), num::BigInt::from(2).pow(j as u32)))
        .collect();
    spec.curves.push(Curve::constant(-c.clone()));
    for d in &deltas {
        spec.curves.push(Curve::with_pole(
            -c.clone(),
            d.clone(),
            y0.clone(),
            Side::Positive,
        ));
        spec.curves.push(Curve::with_pole(
            -c.clone(),
            -d.clone(),
            y0.clone(),
            Side::Negative,
        ));
        spec.vertices.push(y0 - d);
        spec.vertices.push(y0 + d);
    }
    let (model, lm) = spec.model(params.field)?;
    let point = model.base.index_of(&format!("x={y0}"))?;
    let neg_c = -c.clone();
    let cutoff = lm.cells_where(|_, t| matches!(t, ExtT::Finite(v) if *v > neg_c));
    let stages = deltas
        .iter()
        .map(|d| {
            let region = lm.cells_where(|x, t| {
                let ExtT::Finite(t) = t else { return false };
                let r = (x - y0).abs();
                if r >= *d || *t < -c.clone() {
                    return false;
                }
                r.is_zero() || (t + &c) * &r < *d
            });
            Stage {
                label: format!("a=d={d}"),
                region,
                cutoff: cutoff.clone(),
            }
        })
        .collect();
    let tower = LimitTower {
        model,
        point,
        stages,
    };
    tower.validate()?;
    Ok(tower)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> BigRational {
        BigRational::zero()
    }

    #[test]
    fn one_stage_is_rejected() {
        let e =
            hyperbola_tower_generator("const", &CatalogParams::default(), &zero(), 1).unwrap_err();
        assert!(matches!(e, Error::InvalidTower(_)));
    }

    #[test]
    fn constant_model_has_limit_k() {
        let t = hyperbola_tower_generator("const", &CatalogParams::default(), &zero(), 2).unwrap();
        let r = germ_limit(&t).unwrap();
        assert!(r.stabilized);
        assert_eq!(r.limit, Some(GradedDims::from_pairs([(0, 1)])));
        for s in &t.stages {
            assert_eq!(
                stage_sections(&t.model, s).unwrap().cohomology(),
                GradedDims::from_pairs([(0, 1)])
            );
        }
    }

    #[test]
    fn stages_are_nested() {
        let t =
            hyperbola_tower_generator("exp-neg", &CatalogParams::default(), &zero(), 3).unwrap();
        assert_eq!(t.stages.len(), 3);
        for w in t.stages.windows(2) {
            assert!(w[1].region.is_subset(&w[0].region));
        }
    }
}
