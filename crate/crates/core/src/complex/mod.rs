//! Finite cell complexes given as graded face posets with signed incidence.

mod constructible;
mod product;
mod simplicial;
mod subdivide;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

pub use constructible::{
    check_join_condition, classify, extension_open, open_star, transport_constructible,
    Classification, ConstructibleSet,
};
pub use product::{product, Product};
pub use simplicial::SimplicialComplex;
pub use subdivide::{barycentric_subdivide, subdivide_complex};

use crate::error::{Error, Result};
use crate::linalg::{CochainComplex, Field, MatrixBuilder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
}

/// A graded poset of cells. Indices into [`CellComplex::cells`] are used everywhere
/// as cell handles.
#[derive(Clone)]
pub struct CellComplex {
    cells: Vec<Cell>,
    index: HashMap<String, usize>,
    facets: Vec<Vec<(usize, i8)>>,
    cofacets: Vec<Vec<(usize, i8)>>,
    /// Sorted lists of all faces (including the cell itself).
    down: Vec<Vec<usize>>,
    /// Vertex sets when the complex is simplicial.
    vertex_sets: Option<Vec<Vec<usize>>>,
}

impl fmt::Debug for CellComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellComplex(")?;
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", c.id, c.dim)?;
        }
        write!(f, ")")
    }
}

impl PartialEq for CellComplex {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && self.facets == other.facets
    }
}

impl CellComplex {
    /// Builds and validates a complex from cells and `(coface, face, sign)` incidences.
    pub fn new<S: AsRef<str>>(
        cells: Vec<(String, usize)>,
        incidences: &[(S, S, i8)],
    ) -> Result<CellComplex> {
        let index = Self::build_index(&cells)?;
        let mut raw = Vec::with_capacity(incidences.len());
        for (hi, lo, s) in incidences {
            let h = *index
                .get(hi.as_ref())
                .ok_or_else(|| Error::UnknownCell(hi.as_ref().to_string()))?;
            let l = *index
                .get(lo.as_ref())
                .ok_or_else(|| Error::UnknownCell(lo.as_ref().to_string()))?;
            raw.push((h, l, *s));
        }
        Self::from_indices(cells, raw)
    }

    fn build_index(cells: &[(String, usize)]) -> Result<HashMap<String, usize>> {
        let mut index = HashMap::with_capacity(cells.len());
        for (i, (id, _)) in cells.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidComplex(format!("duplicate cell id {id:?}")));
            }
        }
        Ok(index)
    }

    /// Like [`CellComplex::new`] with incidences given by cell index.
    pub fn from_indices(
        cells: Vec<(String, usize)>,
        incidences: Vec<(usize, usize, i8)>,
    ) -> Result<CellComplex> {
        let c = Self::assemble(cells, incidences, None)?;
        c.check_diamonds()?;
        Ok(c)
    }

    pub(crate) fn assemble(
        cells: Vec<(String, usize)>,
        incidences: Vec<(usize, usize, i8)>,
        vertex_sets: Option<Vec<Vec<usize>>>,
    ) -> Result<CellComplex> {
        let index = Self::build_index(&cells)?;
        let n = cells.len();
        let cells: Vec<Cell> = cells
            .into_iter()
            .map(|(id, dim)| Cell { id, dim })
            .collect();
        let mut facets = vec![Vec::new(); n];
        let mut cofacets = vec![Vec::new(); n];
        for (h, l, s) in incidences {
            if h >= n || l >= n {
                return Err(Error::InvalidComplex(format!(
                    "incidence ({h},{l}) out of range"
                )));
            }
            if s != 1 && s != -1 {
                return Err(Error::InvalidComplex(format!(
                    "incidence sign {s} between {} and {} is not ±1",
                    cells[h].id, cells[l].id
                )));
            }
            if cells[h].dim != cells[l].dim + 1 {
                return Err(Error::InvalidComplex(format!(
                    "incidence between {} (dim {}) and {} (dim {}) is not codimension one",
                    cells[h].id, cells[h].dim, cells[l].id, cells[l].dim
                )));
            }
            facets[h].push((l, s));
            cofacets[l].push((h, s));
        }
        for (i, f) in facets.iter_mut().enumerate() {
            f.sort();
            if f.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidComplex(format!(
                    "repeated incidence below {}",
                    cells[i].id
                )));
            }
        }
        for c in cofacets.iter_mut() {
            c.sort();
        }
        // down-closures, by increasing dimension
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|i| cells[*i].dim);
        let mut down: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &i in &order {
            let mut set = BTreeSet::new();
            set.insert(i);
            for (f, _) in &facets[i] {
                set.extend(down[*f].iter().copied());
            }
            down[i] = set.into_iter().collect();
        }
        Ok(CellComplex {
            cells,
            index,
            facets,
            cofacets,
            down,
            vertex_sets,
        })
    }

    fn check_diamonds(&self) -> Result<()> {
        for (rho, cell) in self.cells.iter().enumerate() {
            if cell.dim == 1 && self.facets[rho].len() == 2 {
                let (a, b) = (self.facets[rho][0], self.facets[rho][1]);
                if a.1 == b.1 {
                    return Err(Error::Diamond {
                        lower: self.cells[a.0].id.clone(),
                        upper: cell.id.clone(),
                        reason: "the two endpoints of an edge need opposite signs".into(),
                    });
                }
            }
            if cell.dim < 2 {
                continue;
            }
            let mut mids: HashMap<usize, Vec<i32>> = HashMap::new();
            for (tau, s1) in &self.facets[rho] {
                for (sigma, s2) in &self.facets[*tau] {
                    mids.entry(*sigma)
                        .or_default()
                        .push(*s1 as i32 * *s2 as i32);
                }
            }
            let mut lows: Vec<_> = mids.into_iter().collect();
            lows.sort();
            for (sigma, prods) in lows {
                let reason = if prods.len() != 2 {
                    Some(format!("{} intermediate cells instead of 2", prods.len()))
                } else if prods[0] + prods[1] != 0 {
                    Some("incidence products do not cancel".to_string())
                } else {
                    None
                };
                if let Some(reason) = reason {
                    return Err(Error::Diamond {
                        lower: self.cells[sigma].id.clone(),
                        upper: cell.id.clone(),
                        reason,
                    });
                }
            }
        }
        Ok(())
    }

    /// Checks that every closed interval of length at least two is Eulerian:
    /// `Σ_{σ≤ρ≤τ} (-1)^{dim ρ} = 0`. This holds for face posets of regular complexes.
    pub fn check_eulerian(&self) -> Result<()> {
        for tau in 0..self.len() {
            for &sigma in &self.down[tau] {
                if self.cells[tau].dim < self.cells[sigma].dim + 2 {
                    continue;
                }
                let s: i64 = self.down[tau]
                    .iter()
                    .filter(|r| self.leq(sigma, **r))
                    .map(|r| {
                        if self.cells[*r].dim.is_multiple_of(2) {
                            1
                        } else {
                            -1
                        }
                    })
                    .sum();
                if s != 0 {
                    return Err(Error::Diamond {
                        lower: self.cells[sigma].id.clone(),
                        upper: self.cells[tau].id.clone(),
                        reason: "interval is not Eulerian".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Builds a complex from unsigned codimension-one face pairs, choosing incidence
    /// signs so that the diamond condition holds.
    pub fn orient<S: AsRef<str>>(
        cells: Vec<(String, usize)>,
        faces: &[(S, S)],
    ) -> Result<CellComplex> {
        let index = Self::build_index(&cells)?;
        let n = cells.len();
        let mut facets: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (hi, lo) in faces {
            let h = *index
                .get(hi.as_ref())
                .ok_or_else(|| Error::UnknownCell(hi.as_ref().to_string()))?;
            let l = *index
                .get(lo.as_ref())
                .ok_or_else(|| Error::UnknownCell(lo.as_ref().to_string()))?;
            facets[h].push(l);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|i| cells[*i].1);
        let mut sign: HashMap<(usize, usize), i8> = HashMap::new();
        for &c in &order {
            let fs = &facets[c];
            if cells[c].1 == 1 {
                for (k, f) in fs.iter().enumerate() {
                    sign.insert((c, *f), if k == 0 && fs.len() == 2 { -1 } else { 1 });
                }
                continue;
            }
            // constraints between facets sharing a codimension-two face
            let mut by_low: HashMap<usize, Vec<(usize, i8)>> = HashMap::new();
            for (k, f) in fs.iter().enumerate() {
                for g in &facets[*f] {
                    by_low.entry(*g).or_default().push((k, sign[&(*f, *g)]));
                }
            }
            let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); fs.len()];
            for (g, pairs) in &by_low {
                if pairs.len() != 2 {
                    return Err(Error::Diamond {
                        lower: cells[*g].0.clone(),
                        upper: cells[c].0.clone(),
                        reason: format!("{} intermediate cells instead of 2", pairs.len()),
                    });
                }
                // s_a * t_a + s_b * t_b = 0  =>  s_b = -s_a * t_a * t_b
                let (a, ta) = pairs[0];
                let (b, tb) = pairs[1];
                adj[a].push((b, -ta * tb));
                adj[b].push((a, -ta * tb));
            }
            let mut s: Vec<i8> = vec![0; fs.len()];
            for start in 0..fs.len() {
                if s[start] != 0 {
                    continue;
                }
                s[start] = 1;
                let mut queue = VecDeque::from([start]);
                while let Some(a) = queue.pop_front() {
                    for &(b, rel) in &adj[a] {
                        let want = s[a] * rel;
                        if s[b] == 0 {
                            s[b] = want;
                            queue.push_back(b);
                        } else if s[b] != want {
                            return Err(Error::InvalidComplex(format!(
                                "cell {} admits no consistent orientation",
                                cells[c].0
                            )));
                        }
                    }
                }
            }
            for (k, f) in fs.iter().enumerate() {
                sign.insert((c, *f), s[k]);
            }
        }
        let incidences = sign.into_iter().map(|((h, l), s)| (h, l, s)).collect();
        Self::from_indices(cells, incidences)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn id(&self, i: usize) -> &str {
        &self.cells[i].id
    }

    pub fn dim_of(&self, i: usize) -> usize {
        self.cells[i].dim
    }

    pub fn dimension(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownCell(id.to_string()))
    }

    /// Codimension-one faces with incidence signs.
    pub fn facets(&self, i: usize) -> &[(usize, i8)] {
        &self.facets[i]
    }

    /// Codimension-one cofaces with incidence signs.
    pub fn cofacets(&self, i: usize) -> &[(usize, i8)] {
        &self.cofacets[i]
    }

    /// All faces of `i`, including `i`, sorted by index.
    pub fn faces(&self, i: usize) -> &[usize] {
        &self.down[i]
    }

    /// `σ ≤ τ` in the face order.
    pub fn leq(&self, sigma: usize, tau: usize) -> bool {
        self.down[tau].binary_search(&sigma).is_ok()
    }

    /// Incidence `[τ : σ]`, zero unless `σ` is a facet of `τ`.
    pub fn incidence(&self, tau: usize, sigma: usize) -> i8 {
        self.facets[tau]
            .iter()
            .find(|(f, _)| *f == sigma)
            .map_or(0, |(_, s)| *s)
    }

    /// All cofaces of `i` (including `i`).
    pub fn cofaces(&self, i: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![i];
        seen[i] = true;
        let mut out = Vec::new();
        while let Some(c) = stack.pop() {
            out.push(c);
            for (u, _) in &self.cofacets[c] {
                if !seen[*u] {
                    seen[*u] = true;
                    stack.push(*u);
                }
            }
        }
        out.sort();
        out
    }

    pub fn cells_of_dim(&self, k: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|i| self.cells[*i].dim == k)
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .map(|c| if c.dim % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// Vertex sets (as cell indices of vertices) when the complex is simplicial.
    pub fn vertex_sets(&self) -> Option<&[Vec<usize>]> {
        self.vertex_sets.as_deref()
    }

    pub fn is_simplicial(&self) -> bool {
        self.vertex_sets.is_some()
    }

    /// Cellular cochains of the constant sheaf: `C^k = k^{cells of dim k}` with the
    /// incidence differential. For a compact complex this computes ordinary cohomology.
    pub fn cellular_cochains(&self, field: Field) -> CochainComplex {
        let dim = self.dimension();
        let by_dim: Vec<Vec<usize>> = (0..=dim).map(|k| self.cells_of_dim(k)).collect();
        let mut pos = vec![0; self.len()];
        for cells in &by_dim {
            for (j, c) in cells.iter().enumerate() {
                pos[*c] = j;
            }
        }
        let dims: Vec<usize> = by_dim.iter().map(|c| c.len()).collect();
        if self.is_empty() {
            return CochainComplex::zero(field);
        }
        CochainComplex::from_fn(field, 0, dim as i32, &dims, |k| {
            let k = k as usize;
            let mut b = MatrixBuilder::new(field, dims[k + 1], dims[k]);
            for tau in &by_dim[k + 1] {
                for (sigma, s) in &self.facets[*tau] {
                    b.push(pos[*tau], pos[*sigma], field.from_i64(*s as i64));
                }
            }
            Ok(b.build())
        })
        .expect("cellular cochain shapes")
    }

    /// The sub-poset on `keep`, with the induced incidences. Returns the subcomplex and,
    /// for each of its cells, the index of the corresponding cell in `self`.
    pub fn induced(&self, keep: &[bool]) -> Result<(CellComplex, Vec<usize>)> {
        let embed: Vec<usize> = (0..self.len()).filter(|i| keep[*i]).collect();
        let mut back = vec![usize::MAX; self.len()];
        for (j, i) in embed.iter().enumerate() {
            back[*i] = j;
        }
        let cells = embed
            .iter()
            .map(|i| (self.cells[*i].id.clone(), self.cells[*i].dim))
            .collect();
        let mut inc = Vec::new();
        for (j, i) in embed.iter().enumerate() {
            for (f, s) in &self.facets[*i] {
                if back[*f] != usize::MAX {
                    inc.push((j, back[*f], *s));
                }
            }
        }
        let vertex_sets = self.vertex_sets.as_ref().and_then(|vs| {
            let mapped: Option<Vec<Vec<usize>>> = embed
                .iter()
                .map(|i| {
                    vs[*i]
                        .iter()
                        .map(|v| (back[*v] != usize::MAX).then_some(back[*v]))
                        .collect()
                })
                .collect();
            mapped
        });
        Ok((Self::assemble(cells, inc, vertex_sets)?, embed))
    }

    pub fn into_arc(self) -> Arc<CellComplex> {
        Arc::new(self)
    }
}

/// An order-preserving cellwise map between complexes.
#[derive(Clone, Debug)]
pub struct CellMap {
    pub source: Arc<CellComplex>,
    pub target: Arc<CellComplex>,
    map: Vec<usize>,
}

/// The carrier map `Bd(Σ) → Σ`, `σ̃ ↦ max σ̃`.
pub type CarrierMap = CellMap;

impl CellMap {
    pub fn new(
        source: Arc<CellComplex>,
        target: Arc<CellComplex>,
        map: Vec<usize>,
    ) -> Result<CellMap> {
        if map.len() != source.len() {
            return Err(Error::Shape(format!(
                "cell map has {} entries for {} cells",
                map.len(),
                source.len()
            )));
        }
        if let Some(bad) = map.iter().find(|t| **t >= target.len()) {
            return Err(Error::InvalidParameter(format!(
                "cell map target {bad} out of range"
            )));
        }
        for tau in 0..source.len() {
            for (sigma, _) in source.facets(tau) {
                if !target.leq(map[*sigma], map[tau]) {
                    return Err(Error::NotMonotone(format!(
                        "{} ≤ {} but {} ≰ {}",
                        source.id(*sigma),
                        source.id(tau),
                        target.id(map[*sigma]),
                        target.id(map[tau])
                    )));
                }
            }
        }
        Ok(CellMap {
            source,
            target,
            map,
        })
    }

    pub fn identity(k: Arc<CellComplex>) -> CellMap {
        let map = (0..k.len()).collect();
        CellMap {
            source: k.clone(),
            target: k,
            map,
        }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn compose(&self, after: &CellMap) -> Result<CellMap> {
        if !Arc::ptr_eq(&self.target, &after.source) && *self.target != *after.source {
            return Err(Error::InvalidParameter(
                "cell maps are not composable".into(),
            ));
        }
        Ok(CellMap {
            source: self.source.clone(),
            target: after.target.clone(),
            map: self.map.iter().map(|i| after.map[*i]).collect(),
        })
    }

    /// Cells of the source mapping into `z`.
    pub fn preimage(&self, z: &ConstructibleSet) -> ConstructibleSet {
        ConstructibleSet::from_mask(
            self.source.clone(),
            self.map.iter().map(|t| z.contains(*t)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_boundary() -> CellComplex {
        SimplicialComplex::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![1, 2],
                vec![0, 2],
            ],
        )
        .unwrap()
        .to_cell_complex()
    }

    #[test]
    fn broken_diamond_is_named() {
        let cells = vec![
            ("a".to_string(), 0),
            ("b".to_string(), 0),
            ("e".to_string(), 1),
            ("f".to_string(), 1),
            ("D".to_string(), 2),
        ];
        let inc = [
            ("e", "a", -1),
            ("e", "b", 1),
            ("f", "a", -1),
            ("f", "b", 1),
            ("D", "e", 1),
            ("D", "f", 1),
        ];
        match CellComplex::new(cells, &inc) {
            Err(Error::Diamond { upper, .. }) => assert_eq!(upper, "D"),
            other => panic!("expected diamond failure, got {other:?}"),
        }
    }

    #[test]
    fn orientation_repairs_signs() {
        let cells = vec![
            ("a".to_string(), 0),
            ("b".to_string(), 0),
            ("e".to_string(), 1),
            ("f".to_string(), 1),
            ("D".to_string(), 2),
        ];
        let faces = [
            ("e", "a"),
            ("e", "b"),
            ("f", "a"),
            ("f", "b"),
            ("D", "e"),
            ("D", "f"),
        ];
        let k = CellComplex::orient(cells, &faces).unwrap();
        assert_eq!(
            k.cellular_cochains(Field::Rationals).cohomology(),
            crate::linalg::GradedDims::from_pairs([(0, 1)])
        );
    }

    #[test]
    fn circle_cochains() {
        let k = triangle_boundary();
        assert_eq!(k.len(), 6);
        let h = k.cellular_cochains(Field::Rationals).cohomology();
        assert_eq!(h, crate::linalg::GradedDims::from_pairs([(0, 1), (1, 1)]));
        assert!(k.check_eulerian().is_ok());
    }

    #[test]
    fn non_monotone_map_rejected() {
        let k = Arc::new(triangle_boundary());
        let mut m: Vec<usize> = (0..k.len()).collect();
        let ab = k.index_of("ab").unwrap();
        let c = k.index_of("c").unwrap();
        let a = k.index_of("a").unwrap();
        m[a] = c;
        m[ab] = ab;
        assert!(matches!(
            CellMap::new(k.clone(), k, m),
            Err(Error::NotMonotone(_))
        ));
    }
}
