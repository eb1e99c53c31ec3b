use std::sync::Arc;

use num::{BigRational, Zero};

use super::line::{q, Curve, ExtT, LineModel, LineSpec, Side};
use super::{blowup_pole, TModel};
use crate::error::{Error, Result};
use crate::linalg::Field;
use crate::sheaf::Sheaf;

/// Parameters for [`catalog_build`].
#[derive(Clone, Debug)]
pub struct CatalogParams {
    pub field: Field,
    /// Pole order for `blowup-pole`.
    pub d: usize,
    /// Translation `t ↦ t + a` of the representative.
    pub translate: Option<BigRational>,
}

impl Default for CatalogParams {
    fn default() -> Self {
        CatalogParams {
            field: Field::Rationals,
            d: 2,
            translate: None,
        }
    }
}

pub fn catalog_names() -> &'static [&'static str] {
    &[
        "exp-pos",
        "exp-neg",
        "exp-band",
        "half-open-interval",
        "const",
        "blowup-pole",
    ]
}

fn finite(t: &ExtT) -> Option<&BigRational> {
    t.finite()
}

/// Plane description of the catalog models over the real line.
pub fn line_spec(name: &str) -> Result<LineSpec> {
    let pos = |b: i64| Curve::new(BigRational::zero(), q(b, 1), Side::Positive);
    let spec = |curves: Vec<Curve>, shift: i32, support: super::Region| LineSpec {
        name: name.to_string(),
        vertices: Vec::new(),
        curves,
        support,
        shift,
        symmetric: true,
    };
    Ok(match name {
        // E^{1/x} on x > 0: F = k_{x>0, xt<-1}[1]
        "exp-pos" => spec(
            vec![pos(-1)],
            1,
            Arc::new(|x, t| {
                finite(t).is_some_and(|t| x > &BigRational::zero() && x * t < q(-1, 1))
            }),
        ),
        // E^{-1/x} on x > 0: F = k_{x≥0, xt<1}[1]
        "exp-neg" => spec(
            vec![pos(1)],
            1,
            Arc::new(|x, t| {
                finite(t).is_some_and(|t| x >= &BigRational::zero() && x * t < q(1, 1))
            }),
        ),
        // E^{[2/x,1/x[} on x > 0: F = k_{x>0, -2/x ≤ t < -1/x}
        "exp-band" => spec(
            vec![pos(-2), pos(-1)],
            0,
            Arc::new(|x, t| {
                finite(t).is_some_and(|t| {
                    x > &BigRational::zero() && x * t >= q(-2, 1) && x * t < q(-1, 1)
                })
            }),
        ),
        // F = k_{0 ≤ t < 1}
        "half-open-interval" => spec(
            vec![Curve::constant(q(1, 1))],
            0,
            Arc::new(|_, t| finite(t).is_some_and(|t| t >= &q(0, 1) && t < &q(1, 1))),
        ),
        // e ∘ ι of the constant sheaf: F = k_{t ≥ 0}
        "const" => spec(
            Vec::new(),
            0,
            Arc::new(|_, t| finite(t).is_some_and(|t| t >= &q(0, 1))),
        ),
        other => return Err(Error::UnknownModel(other.to_string())),
    })
}

impl LineSpec {
    /// The representative pulled back along `t ↦ t - a`.
    pub fn translated(&self, a: &BigRational) -> LineSpec {
        let support = self.support.clone();
        let a2 = a.clone();
        // the support may be cut out by the implicit t = 0 curve, which moves too
        let mut curves: Vec<Curve> = self.curves.iter().map(|c| c.translated(a)).collect();
        curves.push(Curve::constant(a.clone()));
        LineSpec {
            name: format!("translate({a})∘{}", self.name),
            vertices: self.vertices.clone(),
            curves,
            support: Arc::new(move |x, t| match t {
                ExtT::Finite(v) => support(x, &ExtT::Finite(v - &a2)),
                other => support(x, other),
            }),
            shift: self.shift,
            symmetric: self.symmetric,
        }
    }

    /// Builds the cylinder and the model `k_S[shift]`.
    pub fn model(&self, field: Field) -> Result<(TModel, LineModel)> {
        let lm = self.build()?;
        let cyl = &lm.cylinder;
        let interior = cyl.minus_inf().union(&cyl.plus_inf()).complement();
        let support = lm
            .cells_where(|x, t| (self.support)(x, t))
            .intersection(&interior);
        let f = Sheaf::constant_on(&support, field, self.shift)?;
        let m = TModel::from_cylinder(&self.name, cyl, f)?;
        Ok((m, lm))
    }
}

/// Builds a catalog model by name.
pub fn catalog_build(name: &str, params: &CatalogParams) -> Result<TModel> {
    if name == "blowup-pole" {
        return blowup_pole(params.d, params.translate.as_ref(), params.field);
    }
    let mut spec = line_spec(name)?;
    if let Some(a) = &params.translate {
        spec = spec.translated(a);
    }
    Ok(spec.model(params.field)?.0)
}
