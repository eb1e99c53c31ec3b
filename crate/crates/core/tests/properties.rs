use std::sync::Arc;

use itertools::Itertools;
use num::{BigInt, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shv::complex::{
    classify, open_star, product, subdivide_complex, CellComplex, CellMap, ConstructibleSet,
    SimplicialComplex,
};
use shv::linalg::{kernel_basis, rank, Field, Matrix};
use shv::random::{random_locally_closed, random_sheaf, random_simplicial};
use shv::sheaf::{
    pullback, pushforward_proper_base, sections_locally_closed, sections_naive, sections_open,
    stalk_dims, tensor_indicator, verdier_dual, Sheaf,
};
use shv::suite::classify_brute_force;

fn det(m: &[Vec<BigInt>]) -> BigInt {
    // Leibniz expansion, only for tiny minors
    let n = m.len();
    (0..n)
        .permutations(n)
        .map(|p| {
            let inversions = (0..n)
                .tuple_combinations()
                .filter(|(i, j)| p[*i] > p[*j])
                .count();
            let prod: BigInt = (0..n).map(|i| m[i][p[i]].clone()).product();
            if inversions % 2 == 0 {
                prod
            } else {
                -prod
            }
        })
        .sum()
}

/// Largest size of a minor that is nonzero, reduced mod `p` when given.
fn rank_by_minors(a: &[Vec<i64>], p: Option<i64>) -> usize {
    let (r, c) = (a.len(), a.first().map_or(0, |x| x.len()));
    for k in (1..=r.min(c)).rev() {
        for rows in (0..r).combinations(k) {
            for cols in (0..c).combinations(k) {
                let minor: Vec<Vec<BigInt>> = rows
                    .iter()
                    .map(|i| cols.iter().map(|j| BigInt::from(a[*i][*j])).collect())
                    .collect();
                let d = det(&minor);
                let nonzero = match p {
                    None => !d.is_zero(),
                    Some(p) => !(d % BigInt::from(p)).is_zero(),
                };
                if nonzero {
                    return k;
                }
            }
        }
    }
    0
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}

fn matrix(field: Field, a: &[Vec<i64>]) -> Matrix {
    let rows: Vec<&[i64]> = a.iter().map(|r| r.as_slice()).collect();
    Matrix::from_i64(field, &rows)
}

fn corpus(seed: u64) -> (Arc<CellComplex>, ConstructibleSet, Sheaf) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = if seed.is_multiple_of(2) {
        Field::Rationals
    } else {
        Field::Prime(2)
    };
    let k = Arc::new(random_simplicial(&mut rng, 6, 2).to_cell_complex());
    let z = random_locally_closed(&mut rng, &k);
    let f = random_sheaf(&mut rng, &k, field, 3).unwrap();
    (k, z, f)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rank_matches_minors(a in small_matrix()) {
        prop_assert_eq!(rank(&matrix(Field::Rationals, &a)), rank_by_minors(&a, None));
        prop_assert_eq!(rank(&matrix(Field::Prime(3), &a)), rank_by_minors(&a, Some(3)));
    }

    #[test]
    fn kernel_is_annihilated(a in small_matrix()) {
        let m = matrix(Field::Rationals, &a);
        let k = kernel_basis(&m);
        prop_assert_eq!(k.cols() + rank(&m), m.cols());
        prop_assert!(m.mul(&k).unwrap().is_zero());
        prop_assert_eq!(rank(&k), k.cols());
        prop_assert_eq!(rank(&m.transpose()), rank(&m));
    }

    #[test]
    fn subdivision_keeps_euler_characteristic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = Arc::new(random_simplicial(&mut rng, 6, 2).to_cell_complex());
        let (sd, carrier) = subdivide_complex(&k);
        prop_assert_eq!(sd.euler_characteristic(), k.euler_characteristic());
        let c = sd.cellular_cochains(Field::Rationals);
        prop_assert!(c.validate().is_ok());
        prop_assert_eq!(c.cohomology(), k.cellular_cochains(Field::Rationals).cohomology());
        for i in 0..sd.len() {
            for j in sd.faces(i) {
                prop_assert!(k.leq(carrier.apply(*j), carrier.apply(i)));
            }
        }
    }

    #[test]
    fn classification_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = Arc::new(random_simplicial(&mut rng, 4, 2).to_cell_complex());
        prop_assume!(k.len() <= 10);
        let mask: Vec<bool> = (0..k.len()).map(|_| rand::Rng::gen_bool(&mut rng, 0.5)).collect();
        let z = ConstructibleSet::from_mask(k, mask);
        prop_assert_eq!(classify(&z), classify_brute_force(&z));
    }

    #[test]
    fn stalks_are_star_sections(seed in any::<u64>()) {
        let (k, _, f) = corpus(seed);
        for s in 0..k.len() {
            prop_assert_eq!(sections_open(&open_star(&k, s), &f).unwrap().cohomology(), f.stalk(s).cohomology());
        }
    }

    #[test]
    fn naive_and_extension_routes_agree_on_closed_sets(seed in any::<u64>()) {
        let (_, z, f) = corpus(seed);
        let z = z.down_closure();
        prop_assert_eq!(
            sections_naive(&z, &f).unwrap().cohomology(),
            sections_locally_closed(&z, &f).unwrap().cohomology()
        );
    }

    #[test]
    fn indicators_compose(seed in any::<u64>()) {
        let (k, z1, f) = corpus(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let z2 = random_locally_closed(&mut rng, &k);
        let nested = tensor_indicator(&z1, &tensor_indicator(&z2, &f).unwrap()).unwrap();
        let direct = tensor_indicator(&z1.intersection(&z2), &f).unwrap();
        prop_assert_eq!(stalk_dims(&nested), stalk_dims(&direct));
        prop_assert_eq!(nested.restriction_table(), direct.restriction_table());
    }

    #[test]
    fn double_dual_keeps_stalks(seed in any::<u64>()) {
        let (_, _, f) = corpus(seed);
        prop_assert_eq!(stalk_dims(&verdier_dual(&verdier_dual(&f))), stalk_dims(&f));
    }

    #[test]
    fn proper_pushforward_keeps_global_sections(seed in any::<u64>()) {
        let (k, _, f) = corpus(seed);
        let line = Arc::new(SimplicialComplex::simplex(&["p", "q"]).to_cell_complex());
        let prod = product(&k, &line);
        let pulled = pullback(&prod.first, &f).unwrap();
        let pushed = pushforward_proper_base(&prod.first, &pulled).unwrap();
        prop_assert_eq!(
            sections_open(&ConstructibleSet::all(k.clone()), &pushed).unwrap().cohomology(),
            sections_open(&ConstructibleSet::all(prod.complex.clone()), &pulled).unwrap().cohomology()
        );
        let id = CellMap::identity(k.clone());
        prop_assert_eq!(stalk_dims(&pullback(&id, &f).unwrap()), stalk_dims(&f));
    }
}

#[test]
fn simplex_subdivision_counts() {
    for n in 0..=3usize {
        let fact: usize = (1..=n + 1).product();
        let names: Vec<String> = (0..=n).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let k = Arc::new(SimplicialComplex::simplex(&refs).to_cell_complex());
        let (sd, _) = subdivide_complex(&k);
        assert_eq!(sd.cells_of_dim(n).len(), fact);
    }
}

/// On a non-closed set the naive cochains over the listed cells compute compactly
/// supported sections rather than sections.
#[test]
fn naive_route_differs_on_an_open_edge() {
    let k = Arc::new(SimplicialComplex::simplex(&["a", "b"]).to_cell_complex());
    let f = Sheaf::constant(k.clone(), Field::Rationals);
    let edge = ConstructibleSet::from_ids(k, &["ab"]).unwrap();
    let naive = sections_naive(&edge, &f).unwrap().cohomology();
    let proper = sections_locally_closed(&edge, &f).unwrap().cohomology();
    assert_eq!(proper.get(0), 1);
    assert_eq!(naive.get(1), 1);
    assert_ne!(naive, proper);
}
