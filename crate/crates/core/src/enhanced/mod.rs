//! t-models of enhanced objects and their associated sheaves.
//!
//! An enhanced object `k^E ⊗⁺ QF` is represented by the complex `F` on a cell model of
//! `M × R̄` whose cells over `±∞` are marked. Its associated sheaf is computed as
//! `Rπ̄_*(k_{-∞<t̄≤+∞} ⊗ Rk_* F)`.

mod blowup;
mod catalog;
mod checks;
mod cylinder;
mod line;

use std::sync::Arc;

pub use blowup::{blowup_pole, blowup_pole_upstairs};
pub use catalog::{catalog_build, catalog_names, line_spec, CatalogParams};
pub use checks::{
    check_duality, check_etens, check_identity, check_refinement, check_translation, etens_factors,
    CheckReport,
};
pub use cylinder::{Cylinder, CylinderModel, Fiber};
pub use line::{
    coarsening, line_complex, q, BaseCell, Curve, ExtT, LineModel, LineSpec, Region, Side,
};

use crate::complex::{product, subdivide_complex, CellComplex, CellMap, ConstructibleSet};
use crate::error::{Error, Result};
use crate::sheaf::{
    extend_by_zero, external_tensor as sheaf_etens, pullback, pushforward_open,
    pushforward_proper_base, tensor_indicator, verdier_dual, Sheaf,
};

/// Representative `F` of `k^E ⊗⁺ QF` on a cell model of `M × R̄`.
#[derive(Clone, Debug)]
pub struct TModel {
    pub name: String,
    pub total: Arc<CellComplex>,
    pub base: Arc<CellComplex>,
    pub projection: CellMap,
    /// Cells with `t ∈ R`.
    pub interior: ConstructibleSet,
    pub minus_inf: ConstructibleSet,
    pub plus_inf: ConstructibleSet,
    pub t_zero: ConstructibleSet,
    /// Cells with `0 ≤ t < +∞`.
    pub t_nonneg: ConstructibleSet,
    pub f: Sheaf,
    /// Cellular involution realizing `(x, t) ↦ (x, -t)`.
    pub t_flip: Option<CellMap>,
}

impl TModel {
    /// Assembles a model from a cylinder and a representative, deriving the markers
    /// from the section labels.
    pub fn from_cylinder(name: &str, cyl: &CylinderModel, f: Sheaf) -> Result<TModel> {
        let zero = cyl.zero_sections()?;
        let minus_inf = cyl.minus_inf();
        let plus_inf = cyl.plus_inf();
        let interior = minus_inf.union(&plus_inf).complement();
        let t_zero = cyl.cells_where(|b, x| x == Fiber::Point(zero[b]));
        let t_nonneg = cyl
            .cells_where(|b, x| match x {
                Fiber::Point(j) | Fiber::Band(j) => j >= zero[b],
            })
            .intersection(&interior);
        let m = TModel {
            name: name.to_string(),
            total: cyl.total.clone(),
            base: cyl.projection.target.clone(),
            projection: cyl.projection.clone(),
            interior,
            minus_inf,
            plus_inf,
            t_zero,
            t_nonneg,
            f,
            t_flip: cyl.t_flip.clone(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidModel(format!("{}: {s}", self.name)));
        if *self.projection.source != *self.total || *self.projection.target != *self.base {
            return bad("projection does not go from total to base");
        }
        if **self.f.complex() != *self.total {
            return bad("representative lives on another complex");
        }
        if !self.interior.is_open() {
            return bad("interior marker is not open");
        }
        if !self.minus_inf.is_closed() || !self.plus_inf.is_closed() {
            return bad("±∞ markers are not closed");
        }
        let n = self.total.len();
        for i in 0..n {
            let hits = [&self.interior, &self.minus_inf, &self.plus_inf]
                .iter()
                .filter(|s| s.contains(i))
                .count();
            if hits != 1 {
                return bad(&format!(
                    "cell {} is not in exactly one t-stratum",
                    self.total.id(i)
                ));
            }
        }
        if !self.f.support().is_subset(&self.interior) {
            return bad("representative is not supported on t ∈ R");
        }
        if !self.t_zero.is_subset(&self.interior) || !self.t_nonneg.is_subset(&self.interior) {
            return bad("t-markers leave the interior");
        }
        if !self.t_nonneg.is_locally_closed() {
            return bad("{t ≥ 0} is not locally closed");
        }
        for s in 0..self.base.len() {
            let star = crate::complex::open_star(&self.base, s);
            if !self.projection.preimage(&star).is_open() {
                return bad(&format!(
                    "preimage of the star of {} is not open",
                    self.base.id(s)
                ));
            }
        }
        if let Some(flip) = &self.t_flip {
            for i in 0..n {
                let j = flip.apply(i);
                if flip.apply(j) != i
                    || self.projection.apply(j) != self.projection.apply(i)
                    || self.t_zero.contains(i) != self.t_zero.contains(j)
                    || self.minus_inf.contains(i) != self.plus_inf.contains(j)
                {
                    return bad(&format!("t_flip misbehaves on {}", self.total.id(i)));
                }
            }
        }
        self.f.validate()
    }

    pub fn field(&self) -> crate::linalg::Field {
        self.f.field()
    }

    /// Same geometry, another representative.
    pub fn with_sheaf(&self, f: Sheaf) -> Result<TModel> {
        let m = TModel { f, ..self.clone() };
        m.validate()?;
        Ok(m)
    }
}

/// The plain product `base × R̄` cut at `t = 0`, carrying the zero representative.
/// A template for [`e_iota`] over an arbitrary base.
pub fn product_template(base: &Arc<CellComplex>, field: crate::linalg::Field) -> Result<TModel> {
    let labels: Vec<String> = ["-inf", "0", "+inf"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let limits = (0..base.len())
        .flat_map(|tau| {
            base.facets(tau)
                .iter()
                .map(move |(sigma, _)| ((tau, *sigma), vec![0, 1, 2]))
        })
        .collect();
    let cyl = Cylinder {
        base: base.clone(),
        labels: vec![labels; base.len()],
        limits,
        symmetric: true,
    }
    .build()?;
    let f = Sheaf::zero(cyl.total.clone(), field);
    TModel::from_cylinder("product", &cyl, f)
}

/// The associated sheaf `Rπ̄_*(k_{t̄>-∞} ⊗ Rk_* F)` on the base.
pub fn sheafify(m: &TModel) -> Result<Sheaf> {
    let pushed = pushforward_open(&m.interior, &m.f)?;
    let cut = tensor_indicator(&m.minus_inf.complement(), &pushed)?;
    pushforward_proper_base(&m.projection, &cut)
}

/// `e ∘ ι`: the model with representative `k_{t≥0} ⊗ π⁻¹L` on the template's geometry.
pub fn e_iota(l: &Sheaf, template: &TModel) -> Result<TModel> {
    if **l.complex() != *template.base {
        return Err(Error::InvalidParameter(
            "sheaf does not live on the template's base".into(),
        ));
    }
    let f = tensor_indicator(&template.t_nonneg, &pullback(&template.projection, l)?)?;
    let mut m = template.with_sheaf(f)?;
    m.name = format!("e_iota({})", template.name);
    Ok(m)
}

/// Restriction of a model to the closed part `n` of its base.
pub fn restrict_to_fiber(m: &TModel, n: &ConstructibleSet) -> Result<TModel> {
    if **n.complex() != *m.base {
        return Err(Error::InvalidParameter(
            "set does not live on the base".into(),
        ));
    }
    if !n.is_closed() {
        return Err(Error::Classification {
            expected: "closed".into(),
            reason: "the fiber set has a face outside it".into(),
        });
    }
    let pre = m.projection.preimage(n);
    if !pre.is_closed() {
        return Err(Error::InvalidModel(
            "preimage of the fiber set is not a subcomplex".into(),
        ));
    }
    let (sub_total, emb) = m.total.induced(pre.mask())?;
    let (sub_base, bemb) = m.base.induced(n.mask())?;
    let (sub_total, sub_base) = (Arc::new(sub_total), Arc::new(sub_base));
    let mut bback = vec![usize::MAX; m.base.len()];
    for (i, b) in bemb.iter().enumerate() {
        bback[*b] = i;
    }
    let mut back = vec![usize::MAX; m.total.len()];
    for (i, t) in emb.iter().enumerate() {
        back[*t] = i;
    }
    let embed = CellMap::new(sub_total.clone(), m.total.clone(), emb.clone())?;
    let projection = CellMap::new(
        sub_total.clone(),
        sub_base.clone(),
        emb.iter().map(|t| bback[m.projection.apply(*t)]).collect(),
    )?;
    let restrict = |s: &ConstructibleSet| {
        ConstructibleSet::from_mask(
            sub_total.clone(),
            emb.iter().map(|t| s.contains(*t)).collect(),
        )
    };
    let t_flip = match &m.t_flip {
        Some(flip) => Some(CellMap::new(
            sub_total.clone(),
            sub_total.clone(),
            emb.iter().map(|t| back[flip.apply(*t)]).collect(),
        )?),
        None => None,
    };
    let out = TModel {
        name: format!("{}|fiber", m.name),
        total: sub_total.clone(),
        base: sub_base,
        projection,
        interior: restrict(&m.interior),
        minus_inf: restrict(&m.minus_inf),
        plus_inf: restrict(&m.plus_inf),
        t_zero: restrict(&m.t_zero),
        t_nonneg: restrict(&m.t_nonneg),
        f: pullback(&embed, &m.f)?,
        t_flip,
    };
    out.validate()?;
    Ok(out)
}

/// The model of the enhanced dual: the Verdier dual of `F` over `t ∈ R`, pulled back
/// along `t ↦ -t`.
pub fn dual_model(m: &TModel) -> Result<TModel> {
    let flip = m
        .t_flip
        .as_ref()
        .ok_or_else(|| Error::InvalidModel(format!("{} has no t_flip", m.name)))?;
    let (inner, emb) = m.total.induced(m.interior.mask())?;
    let inner = Arc::new(inner);
    let embed = CellMap::new(inner, m.total.clone(), emb)?;
    let dual = verdier_dual(&pullback(&embed, &m.f)?);
    let f = pullback(flip, &extend_by_zero(&embed, &dual)?)?;
    let mut out = m.with_sheaf(f)?;
    out.name = format!("D({})", m.name);
    Ok(out)
}

/// The model of `ε(L) ⊗⁺ K` for `K` represented by `m`: `L ⊠ F` over `N₁ × M`.
pub fn external_tensor(l: &Sheaf, m: &TModel) -> Result<TModel> {
    let (f, prod) = sheaf_etens(l, &m.f)?;
    let base = product(l.complex(), &m.base);
    let projection = CellMap::new(
        prod.complex.clone(),
        base.complex.clone(),
        (0..prod.complex.len())
            .map(|i| {
                base.pair(
                    prod.first.apply(i),
                    m.projection.apply(prod.second.apply(i)),
                )
            })
            .collect(),
    )?;
    let lift = |s: &ConstructibleSet| prod.second.preimage(s);
    let t_flip = match &m.t_flip {
        Some(flip) => Some(CellMap::new(
            prod.complex.clone(),
            prod.complex.clone(),
            (0..prod.complex.len())
                .map(|i| prod.pair(prod.first.apply(i), flip.apply(prod.second.apply(i))))
                .collect(),
        )?),
        None => None,
    };
    let out = TModel {
        name: format!("L⊠{}", m.name),
        total: prod.complex.clone(),
        base: base.complex,
        projection,
        interior: lift(&m.interior),
        minus_inf: lift(&m.minus_inf),
        plus_inf: lift(&m.plus_inf),
        t_zero: lift(&m.t_zero),
        t_nonneg: lift(&m.t_nonneg),
        f,
        t_flip,
    };
    out.validate()?;
    Ok(out)
}

/// One barycentric refinement of the total complex, with everything transported along
/// the carrier map. The refined model has no `t_flip`.
pub fn refine(m: &TModel) -> Result<TModel> {
    let (bd, carrier) = subdivide_complex(&m.total);
    let out = TModel {
        name: format!("Bd({})", m.name),
        total: bd,
        base: m.base.clone(),
        projection: carrier.compose(&m.projection)?,
        interior: carrier.preimage(&m.interior),
        minus_inf: carrier.preimage(&m.minus_inf),
        plus_inf: carrier.preimage(&m.plus_inf),
        t_zero: carrier.preimage(&m.t_zero),
        t_nonneg: carrier.preimage(&m.t_nonneg),
        f: pullback(&carrier, &m.f)?,
        t_flip: None,
    };
    out.validate()?;
    Ok(out)
}
