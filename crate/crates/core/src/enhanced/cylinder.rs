use std::collections::HashMap;
use std::sync::Arc;

use crate::complex::{CellComplex, CellMap, ConstructibleSet};
use crate::error::{Error, Result};

/// Position of a cell inside the fiber `R̄` over a base cell: either one of the ordered
/// sections (index 0 is `-∞`, the last one `+∞`) or the open band above section `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fiber {
    Point(usize),
    Band(usize),
}

/// Cylindrical stratification of `B × R̄`: over every base cell an ordered list of
/// sections, and for every codimension-one base pair `σ < τ` the section of `σ` each
/// section of `τ` tends to.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub base: Arc<CellComplex>,
    /// Section labels per base cell, from `-∞` to `+∞`.
    pub labels: Vec<Vec<String>>,
    /// `(τ, σ) ↦ limit index over σ` for each section of `τ`, on codimension-one pairs.
    pub limits: HashMap<(usize, usize), Vec<usize>>,
    /// The sections are symmetric under `t ↦ -t`, so reversing every fiber is cellular.
    pub symmetric: bool,
}

#[derive(Clone, Debug)]
pub struct CylinderModel {
    pub total: Arc<CellComplex>,
    pub projection: CellMap,
    pub cells: Vec<(usize, Fiber)>,
    pub labels: Vec<Vec<String>>,
    pub t_flip: Option<CellMap>,
}

type Ranges = Vec<(usize, usize)>;

impl Cylinder {
    fn top(&self, b: usize) -> usize {
        self.labels[b].len() - 1
    }

    /// Closed range of sections over `sigma` met by the closure of each section of
    /// `tau`. Along a codimension-one pair this is the limit; along longer pairs it is
    /// the hull over all facet paths.
    fn ranges(
        &self,
        memo: &mut HashMap<(usize, usize), Ranges>,
        tau: usize,
        sigma: usize,
    ) -> Result<Ranges> {
        if let Some(r) = memo.get(&(tau, sigma)) {
            return Ok(r.clone());
        }
        let k = &self.base;
        let mut acc: Option<Ranges> = None;
        for (rho, _) in k.facets(tau) {
            if !k.leq(sigma, *rho) {
                continue;
            }
            let lim = self.limits.get(&(tau, *rho)).ok_or_else(|| {
                Error::InvalidModel(format!("no limits from {} to {}", k.id(tau), k.id(*rho)))
            })?;
            let composed: Ranges = if *rho == sigma {
                lim.iter().map(|j| (*j, *j)).collect()
            } else {
                let inner = self.ranges(memo, *rho, sigma)?;
                lim.iter().map(|j| inner[*j]).collect()
            };
            acc = Some(match acc {
                None => composed,
                Some(prev) => prev
                    .iter()
                    .zip(&composed)
                    .map(|(a, b)| (a.0.min(b.0), a.1.max(b.1)))
                    .collect(),
            });
        }
        let r = acc.ok_or_else(|| Error::InvalidModel("face without a facet path".into()))?;
        memo.insert((tau, sigma), r.clone());
        Ok(r)
    }

    fn check(&self) -> Result<()> {
        let k = &self.base;
        if self.labels.len() != k.len() {
            return Err(Error::InvalidModel(
                "one section list per base cell expected".into(),
            ));
        }
        for (b, l) in self.labels.iter().enumerate() {
            if l.len() < 2 {
                return Err(Error::InvalidModel(format!(
                    "fiber over {} lacks ±∞",
                    k.id(b)
                )));
            }
        }
        for tau in 0..k.len() {
            for (sigma, _) in k.facets(tau) {
                let lim = self.limits.get(&(tau, *sigma)).ok_or_else(|| {
                    Error::InvalidModel(format!("no limits from {} to {}", k.id(tau), k.id(*sigma)))
                })?;
                let (m, m2) = (self.top(tau), self.top(*sigma));
                let ok = lim.len() == m + 1
                    && lim[0] == 0
                    && lim[m] == m2
                    && lim.windows(2).all(|w| w[0] <= w[1]);
                if !ok {
                    return Err(Error::InvalidModel(format!(
                        "limits from {} to {} are not monotone or move ±∞",
                        k.id(tau),
                        k.id(*sigma)
                    )));
                }
            }
        }
        Ok(())
    }

    fn cell_id(&self, b: usize, x: Fiber) -> String {
        let l = &self.labels[b];
        let m = l.len() - 1;
        let fib = match x {
            Fiber::Point(j) => format!("t={}", l[j]),
            Fiber::Band(j) => match (j == 0, j + 1 == m) {
                (true, true) => "t".to_string(),
                (true, false) => format!("t<{}", l[j + 1]),
                (false, true) => format!("t>{}", l[j]),
                (false, false) => format!("{}<t<{}", l[j], l[j + 1]),
            },
        };
        format!("{}|{}", self.base.id(b), fib)
    }

    /// Builds the total complex, orienting cells so that the diamond condition holds,
    /// and checks that the codimension-one relations generate the intended order.
    pub fn build(&self) -> Result<CylinderModel> {
        self.check()?;
        let k = self.base.clone();
        let mut memo = HashMap::new();
        let mut cells: Vec<(usize, Fiber)> = Vec::new();
        for b in 0..k.len() {
            let m = self.top(b);
            cells.extend((0..=m).map(|j| (b, Fiber::Point(j))));
            cells.extend((0..m).map(|j| (b, Fiber::Band(j))));
        }
        let dim = |c: &(usize, Fiber)| match c.1 {
            Fiber::Point(_) => k.dim_of(c.0),
            Fiber::Band(_) => k.dim_of(c.0) + 1,
        };
        let mut index: HashMap<(usize, Fiber), usize> = HashMap::new();
        for (i, c) in cells.iter().enumerate() {
            index.insert(*c, i);
        }
        // all cells below each cell
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        for (i, &(b, x)) in cells.iter().enumerate() {
            let (lo_j, hi_j) = match x {
                Fiber::Point(j) => (j, j),
                Fiber::Band(j) => (j, j + 1),
            };
            for &s in k.faces(b) {
                let (lo, hi) = if s == b {
                    (lo_j, hi_j)
                } else {
                    let r = self.ranges(&mut memo, b, s)?;
                    (r[lo_j].0, r[hi_j].1)
                };
                for j in lo..=hi {
                    below[i].push(index[&(s, Fiber::Point(j))]);
                    if j < hi {
                        below[i].push(index[&(s, Fiber::Band(j))]);
                    }
                }
            }
        }
        let mut faces: Vec<(String, String)> = Vec::new();
        let ids: Vec<String> = cells.iter().map(|(b, x)| self.cell_id(*b, *x)).collect();
        for (i, c) in cells.iter().enumerate() {
            for &j in &below[i] {
                if dim(&cells[j]) + 1 == dim(c) {
                    faces.push((ids[i].clone(), ids[j].clone()));
                }
            }
        }
        let named: Vec<(String, usize)> = cells
            .iter()
            .zip(&ids)
            .map(|(c, id)| (id.clone(), dim(c)))
            .collect();
        let total = Arc::new(CellComplex::orient(named, &faces)?);
        total.check_eulerian()?;
        for (i, b) in below.iter().enumerate() {
            let mut want = b.clone();
            want.sort();
            let mut got: Vec<usize> = total.faces(i).to_vec();
            got.sort();
            if want != got {
                return Err(Error::InvalidModel(format!(
                    "face relation of {} is not generated by its facets",
                    ids[i]
                )));
            }
        }
        let projection = CellMap::new(
            total.clone(),
            k.clone(),
            cells.iter().map(|c| c.0).collect(),
        )?;
        let t_flip = self.flip(&cells, &index, &total)?;
        Ok(CylinderModel {
            total,
            projection,
            cells,
            labels: self.labels.clone(),
            t_flip,
        })
    }

    fn flip(
        &self,
        cells: &[(usize, Fiber)],
        index: &HashMap<(usize, Fiber), usize>,
        total: &Arc<CellComplex>,
    ) -> Result<Option<CellMap>> {
        if !self.symmetric {
            return Ok(None);
        }
        for ((tau, sigma), lim) in &self.limits {
            let (m, m2) = (self.top(*tau), self.top(*sigma));
            if (0..=m).any(|j| lim[m - j] != m2 - lim[j]) {
                return Ok(None);
            }
        }
        let map = cells
            .iter()
            .map(|&(b, x)| {
                let m = self.top(b);
                index[&(
                    b,
                    match x {
                        Fiber::Point(j) => Fiber::Point(m - j),
                        Fiber::Band(j) => Fiber::Band(m - 1 - j),
                    },
                )]
            })
            .collect();
        Ok(Some(CellMap::new(total.clone(), total.clone(), map)?))
    }
}

impl CylinderModel {
    pub fn cells_where(&self, pred: impl Fn(usize, Fiber) -> bool) -> ConstructibleSet {
        ConstructibleSet::from_mask(
            self.total.clone(),
            self.cells.iter().map(|(b, x)| pred(*b, *x)).collect(),
        )
    }

    fn top(&self, b: usize) -> usize {
        self.labels[b].len() - 1
    }

    /// Cells on the `-∞` section.
    pub fn minus_inf(&self) -> ConstructibleSet {
        self.cells_where(|_, x| x == Fiber::Point(0))
    }

    /// Cells on the `+∞` section.
    pub fn plus_inf(&self) -> ConstructibleSet {
        self.cells_where(|b, x| x == Fiber::Point(self.top(b)))
    }

    /// Index of the section labelled `0` over each base cell.
    pub fn zero_sections(&self) -> Result<Vec<usize>> {
        self.labels
            .iter()
            .enumerate()
            .map(|(b, l)| {
                l.iter().position(|s| s == "0").ok_or_else(|| {
                    Error::InvalidModel(format!(
                        "no t=0 section over {}",
                        self.projection.target.id(b)
                    ))
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Arc<CellComplex> {
        Arc::new(
            CellComplex::new(
                vec![("x<0".into(), 1), ("x=0".into(), 0), ("x>0".into(), 1)],
                &[("x<0", "x=0", 1), ("x>0", "x=0", -1)],
            )
            .unwrap(),
        )
    }

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn product_with_extended_line() {
        let base = line();
        let l = labels(&["-inf", "0", "+inf"]);
        let ident = vec![0, 1, 2];
        let limits = HashMap::from([((0, 1), ident.clone()), ((2, 1), ident)]);
        let cyl = Cylinder {
            base,
            labels: vec![l.clone(), l.clone(), l],
            limits,
            symmetric: true,
        };
        let m = cyl.build().unwrap();
        assert_eq!(m.total.len(), 15);
        assert!(m.t_flip.is_some());
        assert_eq!(m.total.euler_characteristic(), -1);
    }

    #[test]
    fn cusp_where_a_section_escapes() {
        let base = line();
        let limits = HashMap::from([((0, 1), vec![0, 1, 2]), ((2, 1), vec![0, 0, 1, 2, 2])]);
        let cyl = Cylinder {
            base,
            labels: vec![
                labels(&["-inf", "0", "+inf"]),
                labels(&["-inf", "0", "+inf"]),
                labels(&["-inf", "-1/x", "0", "1/x", "+inf"]),
            ],
            limits,
            symmetric: true,
        };
        let m = cyl.build().unwrap();
        assert_eq!(m.total.len(), 5 + 5 + 9);
        let flip = m.t_flip.unwrap();
        for i in 0..m.total.len() {
            assert_eq!(flip.apply(flip.apply(i)), i);
        }
        let band = m.total.index_of("x>0|t<-1/x").unwrap();
        let faces: Vec<&str> = m.total.faces(band).iter().map(|i| m.total.id(*i)).collect();
        assert!(faces.contains(&"x=0|t=-inf"));
        assert!(!faces.contains(&"x=0|t"));
    }
}
