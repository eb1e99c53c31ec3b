//! Sections over a locally closed set computed through an open neighbourhood, with the
//! certificate that the neighbourhood computes the right thing.

use std::sync::Arc;

use shv::complex::{ConstructibleSet, SimplicialComplex};
use shv::extension::extend_and_certify;
use shv::linalg::Field;
use shv::sheaf::Sheaf;

fn main() -> shv::Result<()> {
    let k = Arc::new(
        SimplicialComplex::from_facets(
            vec!["a".into(), "b".into(), "c".into()],
            &[vec![0, 1], vec![1, 2], vec![0, 2]],
        )?
        .to_cell_complex(),
    );
    let f = Sheaf::constant(k.clone(), Field::Rationals);
    // a half-open arc of the circle
    let z = ConstructibleSet::from_ids(k.clone(), &["a", "ab", "b", "bc"])?;
    let cert = extend_and_certify(&f, &z, None)?;
    println!("U = {:?}", cert.u);
    println!(
        "RΓ(U) = {}, RΓ(Z) = {}, valid: {}",
        cert.sections_u, cert.sections_z, cert.valid
    );

    // every subset of a graph is locally closed; a filled triangle has a gap
    let tri = Arc::new(SimplicialComplex::simplex(&["a", "b", "c"]).to_cell_complex());
    let bad = ConstructibleSet::from_ids(tri.clone(), &["a", "abc"])?;
    match extend_and_certify(&Sheaf::constant(tri, Field::Rationals), &bad, None) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
