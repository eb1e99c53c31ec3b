//! Random complexes, constructible sets and sheaves for property suites.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::{CellComplex, ConstructibleSet, SimplicialComplex};
use crate::error::Result;
use crate::linalg::{column, kernel_basis, CochainComplex, Field, Matrix, SpanBasis};
use crate::sheaf::{direct_sum, tensor_indicator, GradedMap, Sheaf};

/// A random simplicial complex on at most `max_vertices` vertices whose simplexes have
/// dimension at most `max_dim`.
pub fn random_simplicial<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
    max_dim: usize,
) -> SimplicialComplex {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let names: Vec<String> = (0..n)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let mut facets: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let count = if n < 2 { 0 } else { rng.gen_range(1..=n + 2) };
    for _ in 0..count {
        let size = rng.gen_range(2..=(max_dim + 1).min(n).max(1));
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(rng);
        vs.truncate(size);
        facets.push(vs);
    }
    SimplicialComplex::from_facets(names, &facets).expect("closure of facets is a complex")
}

/// A random locally closed set `up(A) ∩ down(B)`.
pub fn random_locally_closed<R: Rng>(rng: &mut R, k: &Arc<CellComplex>) -> ConstructibleSet {
    loop {
        let a = ConstructibleSet::from_mask(
            k.clone(),
            (0..k.len()).map(|_| rng.gen_bool(0.3)).collect(),
        );
        let b = ConstructibleSet::from_mask(
            k.clone(),
            (0..k.len()).map(|_| rng.gen_bool(0.5)).collect(),
        );
        let z = a.up_closure().intersection(&b.down_closure());
        if !z.is_empty() || k.is_empty() {
            return z;
        }
    }
}

fn random_vector<R: Rng>(
    rng: &mut R,
    field: Field,
    n: usize,
) -> Vec<(usize, crate::linalg::Scalar)> {
    (0..n)
        .filter_map(|i| {
            let v = field.from_i64(rng.gen_range(-2..=2));
            (!num::Zero::is_zero(&v)).then_some((i, v))
        })
        .collect()
}

/// Rows spanning the annihilator of the span of `w` inside `k^n`: a quotient map
/// `k^n → k^n / W`.
fn quotient_map(field: Field, n: usize, w: &[Vec<(usize, crate::linalg::Scalar)>]) -> Matrix {
    let raw: Vec<_> = w
        .iter()
        .enumerate()
        .flat_map(|(j, v)| v.iter().map(move |(i, x)| (j, *i, x.clone())))
        .collect();
    let wt = Matrix::from_triplets(field, w.len(), n, raw).expect("in range");
    kernel_basis(&wt).transpose()
}

/// Some `S` with `Q S = I` for a surjective `Q`.
fn right_inverse(q: &Matrix) -> Matrix {
    let field = q.field();
    let mut span = SpanBasis::new(field, q.rows());
    let mut used = Vec::new();
    for j in 0..q.cols() {
        if span.insert(&column(q, j)) {
            used.push(j);
        }
    }
    let mut raw = Vec::new();
    for i in 0..q.rows() {
        let coords = span
            .coordinates(&[(i, field.one())])
            .expect("quotient maps are surjective");
        for (slot, x) in coords {
            raw.push((used[slot], i, x));
        }
    }
    Matrix::from_triplets(field, q.cols(), q.rows(), raw).expect("in range")
}

/// A random sheaf `σ ↦ V / W_σ` with `W` growing along face relations, so that the
/// restrictions are the induced quotient maps. Values live in degree 0.
pub fn random_quotient_sheaf<R: Rng>(
    rng: &mut R,
    k: &Arc<CellComplex>,
    field: Field,
    max_dim: usize,
) -> Sheaf {
    let n = rng.gen_range(1..=max_dim.max(1));
    let mut order: Vec<usize> = (0..k.len()).collect();
    order.sort_by_key(|i| k.dim_of(*i));
    let mut w: Vec<Vec<Vec<(usize, crate::linalg::Scalar)>>> = vec![Vec::new(); k.len()];
    for &s in &order {
        let mut gens: Vec<Vec<(usize, crate::linalg::Scalar)>> = Vec::new();
        for (f, _) in k.facets(s) {
            gens.extend(w[*f].iter().cloned());
        }
        if rng.gen_bool(0.3) {
            gens.push(random_vector(rng, field, n));
        }
        let mut span = SpanBasis::new(field, n);
        gens.retain(|v| span.insert(v));
        w[s] = gens;
    }
    let q: Vec<Matrix> = w.iter().map(|ws| quotient_map(field, n, ws)).collect();
    let stalks: Vec<CochainComplex> = q
        .iter()
        .map(|m| CochainComplex::concentrated(field, 0, m.rows()))
        .collect();
    let mut restrictions = BTreeMap::new();
    for tau in 0..k.len() {
        for (sigma, _) in k.facets(tau) {
            let r = q[tau].mul(&right_inverse(&q[*sigma])).expect("shapes");
            restrictions.insert((*sigma, tau), GradedMap(BTreeMap::from([(0, r)])));
        }
    }
    Sheaf::new(k.clone(), field, stalks, restrictions).expect("quotient sheaves are functorial")
}

/// A random sheaf for the property corpus: a quotient sheaf, sometimes cut down to a
/// random locally closed set, sometimes summed with a shifted second one.
pub fn random_sheaf<R: Rng>(
    rng: &mut R,
    k: &Arc<CellComplex>,
    field: Field,
    max_dim: usize,
) -> Result<Sheaf> {
    let mut f = random_quotient_sheaf(rng, k, field, max_dim);
    if rng.gen_bool(0.25) {
        let z = random_locally_closed(rng, k);
        f = tensor_indicator(&z, &f)?;
    }
    if rng.gen_bool(0.2) {
        let g = random_quotient_sheaf(rng, k, field, 1);
        f = direct_sum(&f, &g.shift(-1))?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let sc = random_simplicial(&mut rng, 6, 2);
            let k = Arc::new(sc.to_cell_complex());
            let z = random_locally_closed(&mut rng, &k);
            assert!(z.is_locally_closed());
            for field in [Field::Rationals, Field::Prime(2)] {
                let f = random_sheaf(&mut rng, &k, field, 3).unwrap();
                f.validate().unwrap();
            }
        }
    }
}
