//! Cellular sheaves of cochain complexes on cell complexes.
//!
//! A sheaf assigns to every cell `σ` a bounded cochain complex `F(σ)` (its sections
//! over the open star of `σ`) and to every face relation `σ ≤ τ` a chain map
//! `F(σ) → F(τ)`.

mod compare;
mod dual;
mod ops;
mod pushforward;
mod sections;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use compare::{costalk_dims, costalk_dims_local, qis_compare, stalk_dims, QisReport};
pub use dual::verdier_dual;
pub use ops::{direct_sum, extend_by_zero, external_tensor, pullback, tensor_indicator};
pub use pushforward::{pushforward_open, pushforward_proper_base};
pub use sections::{
    restriction_between, sections, sections_chains, sections_locally_closed, sections_naive,
    sections_open, PairsIndex,
};

use crate::complex::{CellComplex, ConstructibleSet};
use crate::error::{Error, Result};
use crate::linalg::{ChainMap, CochainComplex, Field, Matrix};

/// Degreewise matrices of a chain map between two stalks; absent degrees are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradedMap(pub BTreeMap<i32, Matrix>);

impl GradedMap {
    pub fn identity(c: &CochainComplex) -> GradedMap {
        GradedMap(
            (c.start()..c.end())
                .filter(|k| c.dim(*k) > 0)
                .map(|k| (k, Matrix::identity(c.field(), c.dim(k))))
                .collect(),
        )
    }

    pub fn component(&self, k: i32, src: &CochainComplex, tgt: &CochainComplex) -> Matrix {
        self.0
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(src.field(), tgt.dim(k), src.dim(k)))
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &GradedMap, field: Field) -> Result<GradedMap> {
        let mut out = BTreeMap::new();
        for (k, m) in &self.0 {
            if let Some(a) = after.0.get(k) {
                let p = a.mul(m)?;
                if !p.is_zero() {
                    out.insert(*k, p);
                }
            }
        }
        let _ = field;
        Ok(GradedMap(out))
    }

    fn normalized(mut self) -> GradedMap {
        self.0.retain(|_, m| !m.is_zero());
        self
    }

    pub fn to_chain_map(&self, src: &CochainComplex, tgt: &CochainComplex) -> Result<ChainMap> {
        ChainMap::new(src.clone(), tgt.clone(), self.0.clone())
    }
}

/// A bounded complex of cellular sheaves, stored by value spaces and codimension-one
/// restriction maps.
#[derive(Clone, Debug)]
pub struct Sheaf {
    complex: Arc<CellComplex>,
    field: Field,
    stalks: Vec<CochainComplex>,
    /// `restr[τ][i]` is the map from the `i`-th facet of `τ` into `τ`.
    restr: Vec<Vec<GradedMap>>,
}

impl Sheaf {
    /// Builds and validates a sheaf. `restrictions` maps codimension-one pairs
    /// `(σ, τ)` with `σ` a facet of `τ` to degreewise matrices; missing pairs are zero.
    pub fn new(
        complex: Arc<CellComplex>,
        field: Field,
        stalks: Vec<CochainComplex>,
        mut restrictions: BTreeMap<(usize, usize), GradedMap>,
    ) -> Result<Sheaf> {
        if stalks.len() != complex.len() {
            return Err(Error::InvalidSheaf(format!(
                "{} stalks for {} cells",
                stalks.len(),
                complex.len()
            )));
        }
        let mut restr = Vec::with_capacity(complex.len());
        for tau in 0..complex.len() {
            let mut row = Vec::new();
            for (sigma, _) in complex.facets(tau) {
                row.push(
                    restrictions
                        .remove(&(*sigma, tau))
                        .unwrap_or_default()
                        .normalized(),
                );
            }
            restr.push(row);
        }
        if let Some(((s, t), _)) = restrictions.into_iter().next() {
            return Err(Error::InvalidSheaf(format!(
                "restriction given for {} → {} which is not a codimension-one face pair",
                complex.id(s),
                complex.id(t)
            )));
        }
        let f = Sheaf::from_parts(complex, field, stalks, restr);
        f.validate()?;
        Ok(f)
    }

    pub(crate) fn from_parts(
        complex: Arc<CellComplex>,
        field: Field,
        stalks: Vec<CochainComplex>,
        restr: Vec<Vec<GradedMap>>,
    ) -> Sheaf {
        Sheaf {
            complex,
            field,
            stalks,
            restr,
        }
    }

    /// Checks fields, shapes, that every restriction is a chain map, and functoriality
    /// around every diamond.
    pub fn validate(&self) -> Result<()> {
        let k = &self.complex;
        for (i, s) in self.stalks.iter().enumerate() {
            if s.field() != self.field {
                return Err(Error::FieldMismatch(format!("stalk at {}", k.id(i))));
            }
            s.validate()
                .map_err(|e| Error::InvalidSheaf(format!("stalk at {}: {e}", k.id(i))))?;
        }
        for tau in 0..k.len() {
            for (j, (sigma, _)) in k.facets(tau).iter().enumerate() {
                let g = &self.restr[tau][j];
                ChainMap::new(
                    self.stalks[*sigma].clone(),
                    self.stalks[tau].clone(),
                    g.0.clone(),
                )
                .map_err(|e| {
                    Error::InvalidSheaf(format!(
                        "restriction {} → {}: {e}",
                        k.id(*sigma),
                        k.id(tau)
                    ))
                })?;
            }
        }
        for rho in 0..k.len() {
            if k.dim_of(rho) < 2 {
                continue;
            }
            let mut paths: BTreeMap<usize, Vec<(usize, GradedMap)>> = BTreeMap::new();
            for (j, (tau, _)) in k.facets(rho).iter().enumerate() {
                for (i, (sigma, _)) in k.facets(*tau).iter().enumerate() {
                    let comp = self.restr[*tau][i].then(&self.restr[rho][j], self.field)?;
                    paths
                        .entry(*sigma)
                        .or_default()
                        .push((*tau, comp.normalized()));
                }
            }
            for (sigma, ps) in paths {
                for w in ps.windows(2) {
                    if w[0].1 != w[1].1 {
                        return Err(Error::Functoriality(format!(
                            "{} < {{{}, {}}} < {}",
                            k.id(sigma),
                            k.id(w[0].0),
                            k.id(w[1].0),
                            k.id(rho)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero(complex: Arc<CellComplex>, field: Field) -> Sheaf {
        let n = complex.len();
        let restr = (0..n)
            .map(|t| vec![GradedMap::default(); complex.facets(t).len()])
            .collect();
        Sheaf::from_parts(complex, field, vec![CochainComplex::zero(field); n], restr)
    }

    /// The constant sheaf `k` in degree 0.
    pub fn constant(complex: Arc<CellComplex>, field: Field) -> Sheaf {
        let n = complex.len();
        let one = CochainComplex::concentrated(field, 0, 1);
        let id = GradedMap::identity(&one);
        let restr = (0..n)
            .map(|t| vec![id.clone(); complex.facets(t).len()])
            .collect();
        Sheaf::from_parts(complex, field, vec![one; n], restr)
    }

    /// `k_Z[shift]` for a locally closed `z`.
    pub fn constant_on(z: &ConstructibleSet, field: Field, shift: i32) -> Result<Sheaf> {
        Ok(tensor_indicator(z, &Sheaf::constant(z.complex().clone(), field))?.shift(shift))
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn stalk(&self, sigma: usize) -> &CochainComplex {
        &self.stalks[sigma]
    }

    pub fn stalks(&self) -> &[CochainComplex] {
        &self.stalks
    }

    /// Restriction along the `i`-th facet of `tau`.
    pub fn facet_restriction(&self, tau: usize, i: usize) -> &GradedMap {
        &self.restr[tau][i]
    }

    /// Restriction `F(σ) → F(τ)` for `σ ≤ τ`, composed along a chain of facets.
    pub fn restriction(&self, sigma: usize, tau: usize) -> Result<GradedMap> {
        let k = &self.complex;
        if sigma == tau {
            return Ok(GradedMap::identity(&self.stalks[sigma]));
        }
        if !k.leq(sigma, tau) {
            return Err(Error::InvalidParameter(format!(
                "{} is not a face of {}",
                k.id(sigma),
                k.id(tau)
            )));
        }
        let (j, (rho, _)) = k
            .facets(tau)
            .iter()
            .enumerate()
            .find(|(_, (r, _))| k.leq(sigma, *r))
            .expect("some facet lies above a proper face");
        self.restriction(sigma, *rho)?
            .then(&self.restr[tau][j], self.field)
    }

    pub fn is_zero(&self) -> bool {
        self.stalks.iter().all(|s| s.is_zero())
    }

    /// Support: cells with a nonzero value complex.
    pub fn support(&self) -> ConstructibleSet {
        ConstructibleSet::from_mask(
            self.complex.clone(),
            self.stalks.iter().map(|s| !s.is_zero()).collect(),
        )
    }

    /// Shift `F[n]`.
    pub fn shift(&self, n: i32) -> Sheaf {
        let stalks = self.stalks.iter().map(|s| s.shift(n)).collect();
        let restr = self
            .restr
            .iter()
            .map(|row| {
                row.iter()
                    .map(|g| GradedMap(g.0.iter().map(|(k, m)| (k - n, m.clone())).collect()))
                    .collect()
            })
            .collect();
        Sheaf::from_parts(self.complex.clone(), self.field, stalks, restr)
    }

    /// Lowest and highest degree in which some stalk is nonzero.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let nz: Vec<&CochainComplex> = self.stalks.iter().filter(|s| !s.is_zero()).collect();
        if nz.is_empty() {
            return None;
        }
        Some((
            nz.iter().map(|s| s.start()).min().unwrap(),
            nz.iter().map(|s| s.end() - 1).max().unwrap(),
        ))
    }

    /// All codimension-one restrictions keyed by `(σ, τ)`.
    pub fn restriction_table(&self) -> BTreeMap<(usize, usize), GradedMap> {
        let mut out = BTreeMap::new();
        for tau in 0..self.complex.len() {
            for (j, (sigma, _)) in self.complex.facets(tau).iter().enumerate() {
                out.insert((*sigma, tau), self.restr[tau][j].clone());
            }
        }
        out
    }
}

/// Per-cell chain maps between two sheaves on the same complex that commute with the
/// restrictions.
#[derive(Clone, Debug)]
pub struct SheafMorphism {
    pub source: Sheaf,
    pub target: Sheaf,
    pub maps: Vec<GradedMap>,
}

impl SheafMorphism {
    pub fn new(source: Sheaf, target: Sheaf, maps: Vec<GradedMap>) -> Result<SheafMorphism> {
        let k = source.complex().clone();
        if *k != **target.complex() || maps.len() != k.len() {
            return Err(Error::InvalidSheaf(
                "morphism between different complexes".into(),
            ));
        }
        for (i, m) in maps.iter().enumerate() {
            m.to_chain_map(source.stalk(i), target.stalk(i))
                .map_err(|e| Error::InvalidSheaf(format!("morphism at {}: {e}", k.id(i))))?;
        }
        for tau in 0..k.len() {
            for (j, (sigma, _)) in k.facets(tau).iter().enumerate() {
                let a = maps[*sigma].then(target.facet_restriction(tau, j), source.field())?;
                let b = source
                    .facet_restriction(tau, j)
                    .then(&maps[tau], source.field())?;
                if a.normalized() != b.normalized() {
                    return Err(Error::InvalidSheaf(format!(
                        "morphism does not commute with {} → {}",
                        k.id(*sigma),
                        k.id(tau)
                    )));
                }
            }
        }
        Ok(SheafMorphism {
            source,
            target,
            maps,
        })
    }

    pub fn identity(f: &Sheaf) -> SheafMorphism {
        SheafMorphism {
            source: f.clone(),
            target: f.clone(),
            maps: f.stalks().iter().map(GradedMap::identity).collect(),
        }
    }

    /// Cells where the stalk map is not a quasi-isomorphism.
    pub fn non_iso_cells(&self) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, m) in self.maps.iter().enumerate() {
            if !m
                .to_chain_map(self.source.stalk(i), self.target.stalk(i))?
                .is_quasi_iso()
            {
                out.push(i);
            }
        }
        Ok(out)
    }
}
