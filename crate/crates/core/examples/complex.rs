//! Subdivision, products and classification of subsets of a face poset.

use std::sync::Arc;

use shv::complex::{
    classify, open_star, product, subdivide_complex, ConstructibleSet, SimplicialComplex,
};

fn main() -> shv::Result<()> {
    let tri = Arc::new(SimplicialComplex::simplex(&["a", "b", "c"]).to_cell_complex());
    let (sd, carrier) = subdivide_complex(&tri);
    println!(
        "subdivided triangle: {} cells, {} triangles",
        sd.len(),
        sd.cells_of_dim(2).len()
    );
    let i = sd.index_of("[a,ab,abc]")?;
    println!("carrier of [a,ab,abc] is {}", tri.id(carrier.apply(i)));

    let edge = Arc::new(SimplicialComplex::simplex(&["p", "q"]).to_cell_complex());
    let square = product(&edge, &edge);
    println!(
        "square: {} cells, euler characteristic {}",
        square.complex.len(),
        square.complex.euler_characteristic()
    );

    for ids in [
        vec!["b", "ab"],
        vec!["a", "b"],
        vec!["a", "abc"],
        vec!["ab"],
    ] {
        let z = ConstructibleSet::from_ids(tri.clone(), &ids)?;
        println!("{ids:?}: {}", classify(&z).label());
    }
    println!(
        "open star of a: {:?}",
        open_star(&tri, tri.index_of("a")?).ids()
    );
    Ok(())
}
