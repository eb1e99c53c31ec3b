use std::sync::Arc;

use super::{CellComplex, CellMap};

/// A product complex with its two projections.
#[derive(Clone, Debug)]
pub struct Product {
    pub complex: Arc<CellComplex>,
    pub first: CellMap,
    pub second: CellMap,
}

impl Product {
    /// Index of the cell `σ × τ`.
    pub fn pair(&self, sigma: usize, tau: usize) -> usize {
        sigma * self.second.target.len() + tau
    }
}

/// Cartesian product with cells `σ*τ`, and Koszul incidence
/// `[σ×τ : σ×τ'] = (-1)^{dim σ} [τ : τ']`.
pub fn product(k1: &Arc<CellComplex>, k2: &Arc<CellComplex>) -> Product {
    let n2 = k2.len();
    let mut cells = Vec::with_capacity(k1.len() * n2);
    let mut inc = Vec::new();
    for a in 0..k1.len() {
        for b in 0..n2 {
            let i = a * n2 + b;
            cells.push((
                format!("{}*{}", k1.id(a), k2.id(b)),
                k1.dim_of(a) + k2.dim_of(b),
            ));
            for (fa, s) in k1.facets(a) {
                inc.push((i, fa * n2 + b, *s));
            }
            let twist: i8 = if k1.dim_of(a).is_multiple_of(2) {
                1
            } else {
                -1
            };
            for (fb, s) in k2.facets(b) {
                inc.push((i, a * n2 + fb, twist * *s));
            }
        }
    }
    let complex = Arc::new(
        CellComplex::from_indices(cells, inc).expect("products of valid complexes are valid"),
    );
    let first = CellMap::new(
        complex.clone(),
        k1.clone(),
        (0..complex.len()).map(|i| i / n2).collect(),
    )
    .expect("projection is monotone");
    let second = CellMap::new(
        complex.clone(),
        k2.clone(),
        (0..complex.len()).map(|i| i % n2).collect(),
    )
    .expect("projection is monotone");
    Product {
        complex,
        first,
        second,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use crate::linalg::{Field, GradedDims};

    #[test]
    fn square_and_torus() {
        let i = Arc::new(SimplicialComplex::simplex(&["a", "b"]).to_cell_complex());
        let sq = product(&i, &i);
        assert_eq!(sq.complex.len(), 9);
        let circle = Arc::new(
            SimplicialComplex::from_facets(
                vec!["a".into(), "b".into(), "c".into()],
                &[vec![0, 1], vec![1, 2], vec![0, 2]],
            )
            .unwrap()
            .to_cell_complex(),
        );
        let torus = product(&circle, &circle);
        assert_eq!(
            torus
                .complex
                .cellular_cochains(Field::Rationals)
                .cohomology(),
            GradedDims::from_pairs([(0, 1), (1, 2), (2, 1)])
        );
        assert_eq!(torus.complex.euler_characteristic(), 0);
    }
}
