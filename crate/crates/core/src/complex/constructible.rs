use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{subdivide_complex, CarrierMap, CellComplex, CellMap};
use crate::error::{Error, Result};

/// A union of cells of a complex.
#[derive(Clone)]
pub struct ConstructibleSet {
    complex: Arc<CellComplex>,
    mask: Vec<bool>,
}

impl fmt::Debug for ConstructibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.ids().join(", "))
    }
}

impl PartialEq for ConstructibleSet {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask && *self.complex == *other.complex
    }
}

impl ConstructibleSet {
    pub fn from_mask(complex: Arc<CellComplex>, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), complex.len(), "mask length");
        ConstructibleSet { complex, mask }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(
        complex: Arc<CellComplex>,
        cells: I,
    ) -> Self {
        let mut mask = vec![false; complex.len()];
        for c in cells {
            mask[c] = true;
        }
        ConstructibleSet { complex, mask }
    }

    pub fn from_ids<S: AsRef<str>>(complex: Arc<CellComplex>, ids: &[S]) -> Result<Self> {
        let mut mask = vec![false; complex.len()];
        for id in ids {
            mask[complex.index_of(id.as_ref())?] = true;
        }
        Ok(ConstructibleSet { complex, mask })
    }

    pub fn all(complex: Arc<CellComplex>) -> Self {
        let n = complex.len();
        ConstructibleSet {
            complex,
            mask: vec![true; n],
        }
    }

    pub fn empty(complex: Arc<CellComplex>) -> Self {
        let n = complex.len();
        ConstructibleSet {
            complex,
            mask: vec![false; n],
        }
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|b| *b)
    }

    pub fn is_all(&self) -> bool {
        self.mask.iter().all(|b| *b)
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|i| self.mask[*i]).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.indices()
            .into_iter()
            .map(|i| self.complex.id(i).to_string())
            .collect()
    }

    fn zip(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        ConstructibleSet {
            complex: self.complex.clone(),
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        ConstructibleSet {
            complex: self.complex.clone(),
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b)
    }

    /// Smallest open set containing the cells: all their cofaces.
    pub fn up_closure(&self) -> Self {
        let k = &self.complex;
        let mut mask = self.mask.clone();
        let mut order: Vec<usize> = (0..k.len()).collect();
        order.sort_by_key(|i| k.dim_of(*i));
        for i in order {
            if mask[i] {
                for (u, _) in k.cofacets(i) {
                    mask[*u] = true;
                }
            }
        }
        ConstructibleSet::from_mask(k.clone(), mask)
    }

    /// Closure: all faces of the cells.
    pub fn down_closure(&self) -> Self {
        let k = &self.complex;
        let mut mask = vec![false; k.len()];
        for i in self.indices() {
            for f in k.faces(i) {
                mask[*f] = true;
            }
        }
        ConstructibleSet::from_mask(k.clone(), mask)
    }

    pub fn is_open(&self) -> bool {
        (0..self.mask.len())
            .filter(|i| self.mask[*i])
            .all(|i| self.complex.cofacets(i).iter().all(|(u, _)| self.mask[*u]))
    }

    pub fn is_closed(&self) -> bool {
        (0..self.mask.len())
            .filter(|i| self.mask[*i])
            .all(|i| self.complex.facets(i).iter().all(|(f, _)| self.mask[*f]))
    }

    /// Convexity in the face order: `σ1 ≤ σ2 ≤ σ3` with `σ1, σ3` in the set forces `σ2`.
    pub fn is_locally_closed(&self) -> bool {
        self.up_closure().intersection(&self.down_closure()) == *self
    }

    /// Is `self` closed as a subspace of `ambient`?
    pub fn is_closed_in(&self, ambient: &Self) -> bool {
        self.is_subset(ambient) && self.down_closure().intersection(ambient).is_subset(self)
    }

    /// Rejects sets that are not locally closed, naming a violating chain.
    pub fn require_locally_closed(&self) -> Result<()> {
        if self.is_locally_closed() {
            return Ok(());
        }
        let k = &self.complex;
        let gap = self
            .up_closure()
            .intersection(&self.down_closure())
            .difference(self)
            .indices()[0];
        let lower = self
            .indices()
            .into_iter()
            .find(|s| k.leq(*s, gap))
            .expect("gap lies above a member");
        let upper = self
            .indices()
            .into_iter()
            .find(|s| k.leq(gap, *s))
            .expect("gap lies below a member");
        Err(Error::Classification {
            expected: "locally closed".into(),
            reason: format!(
                "{} ≤ {} ≤ {} with the middle cell missing (chain condition of the \
                 locally closed characterization)",
                k.id(lower),
                k.id(gap),
                k.id(upper)
            ),
        })
    }
}

/// Open / closed / locally closed flags of a constructible set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub open: bool,
    pub closed: bool,
    pub locally_closed: bool,
}

impl Classification {
    /// Strongest label: `open`, `closed`, `locally-closed` or `none`.
    pub fn label(&self) -> &'static str {
        if self.open {
            "open"
        } else if self.closed {
            "closed"
        } else if self.locally_closed {
            "locally-closed"
        } else {
            "none"
        }
    }
}

pub fn classify(z: &ConstructibleSet) -> Classification {
    Classification {
        open: z.is_open(),
        closed: z.is_closed(),
        locally_closed: z.is_locally_closed(),
    }
}

/// `U(σ)`: every cell having `σ` as a face.
pub fn open_star(k: &Arc<CellComplex>, sigma: usize) -> ConstructibleSet {
    ConstructibleSet::from_indices(k.clone(), k.cofaces(sigma))
}

/// Join-closure condition on a simplicial complex: whenever two members span a simplex,
/// that simplex is a member too.
pub fn check_join_condition(z: &ConstructibleSet) -> Result<bool> {
    let k = z.complex();
    let vs = k.vertex_sets().ok_or(Error::NotSimplicial)?;
    let lookup: HashMap<&[usize], usize> = vs
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();
    let members = z.indices();
    for (a, &s1) in members.iter().enumerate() {
        for &s2 in &members[a + 1..] {
            let mut join: Vec<usize> = vs[s1].iter().chain(&vs[s2]).copied().collect();
            join.sort();
            join.dedup();
            if let Some(&j) = lookup.get(join.as_slice()) {
                if !z.contains(j) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Cells of the subdivision whose carrier lies in `z`.
pub fn transport_constructible(z: &ConstructibleSet, carrier: &CarrierMap) -> ConstructibleSet {
    carrier.preimage(z)
}

/// Subdivides the complex of `z`, transports `z`, and returns the union of the open
/// stars of the transported cells together with the carrier map. When `w` is given it
/// must be open and contain `z`; the result is then contained in the transported `w`.
pub fn extension_open(
    z: &ConstructibleSet,
    w: Option<&ConstructibleSet>,
) -> Result<(ConstructibleSet, CarrierMap)> {
    z.require_locally_closed()?;
    if let Some(w) = w {
        if !w.is_open() {
            return Err(Error::Classification {
                expected: "open".into(),
                reason: "W has a member whose coface is missing".into(),
            });
        }
        if !z.is_subset(w) {
            return Err(Error::InvalidParameter("W does not contain Z".into()));
        }
    }
    let (_, carrier) = subdivide_complex(z.complex());
    let zt = transport_constructible(z, &carrier);
    Ok((zt.up_closure(), carrier))
}

impl CellMap {
    /// Image of a set under the map.
    pub fn image(&self, z: &ConstructibleSet) -> ConstructibleSet {
        ConstructibleSet::from_indices(
            self.target.clone(),
            z.indices().into_iter().map(|i| self.apply(i)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;

    fn path() -> Arc<CellComplex> {
        Arc::new(
            SimplicialComplex::from_facets(
                vec!["a".into(), "b".into(), "c".into()],
                &[vec![0, 1], vec![1, 2]],
            )
            .unwrap()
            .to_cell_complex(),
        )
    }

    /// Locally closed means open in its closure; checked directly in the
    /// Alexandrov topology.
    fn brute_locally_closed(z: &ConstructibleSet) -> bool {
        let cl = z.down_closure();
        let rest = cl.difference(z);
        rest.is_closed()
    }

    #[test]
    fn half_open_interval() {
        let k = path();
        let z = ConstructibleSet::from_ids(k, &["b", "ab"]).unwrap();
        let c = classify(&z);
        assert_eq!(
            c,
            Classification {
                open: false,
                closed: false,
                locally_closed: true
            }
        );
        assert!(brute_locally_closed(&z));
    }

    #[test]
    fn none_example() {
        let k = Arc::new(SimplicialComplex::simplex(&["a", "b", "c"]).to_cell_complex());
        let z = ConstructibleSet::from_ids(k, &["a", "abc"]).unwrap();
        assert_eq!(classify(&z).label(), "none");
        assert!(!brute_locally_closed(&z));
        assert!(z.require_locally_closed().is_err());
    }

    #[test]
    fn every_subset_of_a_graph_is_locally_closed() {
        let k = path();
        for mask in 0u32..(1 << k.len()) {
            let z = ConstructibleSet::from_mask(
                k.clone(),
                (0..k.len()).map(|i| mask >> i & 1 == 1).collect(),
            );
            assert!(z.is_locally_closed());
        }
    }

    #[test]
    fn stars() {
        let k = path();
        let b = k.index_of("b").unwrap();
        let s = open_star(&k, b);
        let mut ids = s.ids();
        ids.sort();
        assert_eq!(ids, vec!["ab", "b", "bc"]);
        assert!(classify(&s).open);
        let (bd, _) = subdivide_complex(&k);
        let m = bd.index_of("[ab]").unwrap();
        let mut ids = open_star(&bd, m).ids();
        ids.sort();
        assert_eq!(ids, vec!["[a,ab]", "[ab]", "[b,ab]"]);
    }

    #[test]
    fn transport_half_open() {
        let k = path();
        let z = ConstructibleSet::from_ids(k.clone(), &["b", "ab"]).unwrap();
        let (bd, carrier) = subdivide_complex(&k);
        let zt = transport_constructible(&z, &carrier);
        let mut ids = zt.ids();
        ids.sort();
        assert_eq!(ids, vec!["[a,ab]", "[ab]", "[b,ab]", "[b]"]);
        assert!(check_join_condition(&zt).unwrap());
        let (u, _) = extension_open(&z, None).unwrap();
        assert!(u.is_open());
        assert!(zt.is_closed_in(&u));
        assert_eq!(u.complex().len(), bd.len());
        let mut ids = u.ids();
        ids.sort();
        assert_eq!(ids, vec!["[a,ab]", "[ab]", "[b,ab]", "[b,bc]", "[b]"]);
    }

    #[test]
    fn b2_fails_before_subdivision() {
        let k = Arc::new(SimplicialComplex::simplex(&["a", "b", "c"]).to_cell_complex());
        let z = ConstructibleSet::from_ids(k, &["a", "b"]).unwrap();
        assert!(!check_join_condition(&z).unwrap());
        let nonsimplicial = {
            let i = path();
            crate::complex::product(&i, &i).complex
        };
        let z = ConstructibleSet::all(nonsimplicial);
        assert_eq!(check_join_condition(&z), Err(Error::NotSimplicial));
    }
}
