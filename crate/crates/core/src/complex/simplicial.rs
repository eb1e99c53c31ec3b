use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;

use super::CellComplex;
use crate::error::{Error, Result};

/// Vertices plus a downward closed family of simplexes (vertex index sets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    simplices: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Simplexes are normalized to sorted vertex lists; every nonempty subset of a
    /// simplex must itself be listed.
    pub fn new(vertices: Vec<String>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in simplices {
            let mut s = s;
            s.sort();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            if let Some(v) = s.iter().find(|v| **v >= vertices.len()) {
                return Err(Error::InvalidComplex(format!(
                    "vertex index {v} out of range"
                )));
            }
            set.insert(s);
        }
        for s in &set {
            if s.len() < 2 {
                continue;
            }
            for k in 0..s.len() {
                let mut face = s.clone();
                face.remove(k);
                if !set.contains(&face) {
                    return Err(Error::NotDownwardClosed(format!(
                        "face {} of {} missing",
                        Self::name_of(&vertices, &face),
                        Self::name_of(&vertices, s)
                    )));
                }
            }
        }
        let mut simplices: Vec<Vec<usize>> = set.into_iter().collect();
        simplices.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(SimplicialComplex {
            vertices,
            simplices,
        })
    }

    /// Closes a family of maximal simplexes downward.
    pub fn from_facets(vertices: Vec<String>, facets: &[Vec<usize>]) -> Result<Self> {
        let mut all = BTreeSet::new();
        for f in facets {
            let mut f = f.clone();
            f.sort();
            f.dedup();
            let n = f.len();
            for mask in 1u64..(1u64 << n) {
                all.insert(
                    (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| f[i])
                        .collect::<Vec<_>>(),
                );
            }
        }
        Self::new(vertices, all.into_iter().collect())
    }

    /// The full simplex on the given vertex names.
    pub fn simplex(names: &[&str]) -> Self {
        let idx: Vec<usize> = (0..names.len()).collect();
        Self::from_facets(names.iter().map(|s| s.to_string()).collect(), &[idx])
            .expect("a simplex is downward closed")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    fn name_of(vertices: &[String], s: &[usize]) -> String {
        if vertices.iter().all(|v| v.chars().count() == 1) {
            s.iter().map(|v| vertices[*v].as_str()).collect()
        } else {
            format!("{{{}}}", s.iter().map(|v| vertices[*v].as_str()).join(","))
        }
    }

    /// Cell id used for a simplex: concatenated vertex names when all names are
    /// single characters (`ab`), otherwise `{u,v}`.
    pub fn simplex_name(&self, s: &[usize]) -> String {
        Self::name_of(&self.vertices, s)
    }

    /// One cell per simplex with the alternating vertex-deletion signs.
    pub fn to_cell_complex(&self) -> CellComplex {
        let pos: HashMap<&Vec<usize>, usize> = self
            .simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let cells = self
            .simplices
            .iter()
            .map(|s| (self.simplex_name(s), s.len() - 1))
            .collect();
        let mut inc = Vec::new();
        for (i, s) in self.simplices.iter().enumerate() {
            if s.len() < 2 {
                continue;
            }
            for k in 0..s.len() {
                let mut face = s.clone();
                face.remove(k);
                inc.push((i, pos[&face], if k % 2 == 0 { 1 } else { -1 }));
            }
        }
        let vertex_cell: Vec<usize> = (0..self.vertices.len())
            .map(|v| pos.get(&vec![v]).copied().unwrap_or(usize::MAX))
            .collect();
        let vertex_sets = self
            .simplices
            .iter()
            .map(|s| s.iter().map(|v| vertex_cell[*v]).collect())
            .collect();
        CellComplex::assemble(cells, inc, Some(vertex_sets))
            .expect("simplicial incidences are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Field, GradedDims};

    #[test]
    fn missing_face_rejected() {
        let r = SimplicialComplex::new(vec!["a".into(), "b".into()], vec![vec![0], vec![0, 1]]);
        assert!(matches!(r, Err(Error::NotDownwardClosed(_))));
    }

    #[test]
    fn simplex_cells() {
        let k = SimplicialComplex::simplex(&["a", "b"]).to_cell_complex();
        assert_eq!(k.len(), 3);
        let k = SimplicialComplex::simplex(&["a", "b", "c"]).to_cell_complex();
        assert_eq!(k.len(), 7);
        assert_eq!(
            k.cellular_cochains(Field::Rationals).cohomology(),
            GradedDims::from_pairs([(0, 1)])
        );
        assert!(k.index_of("abc").is_ok());
    }
}
