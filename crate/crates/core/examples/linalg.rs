//! Exact rank, kernels and cohomology of a small cochain complex over Q and F_2.

use shv::linalg::{kernel_basis, rank, CochainComplex, Field, Matrix};

fn main() -> shv::Result<()> {
    for field in [Field::Rationals, Field::Prime(2)] {
        let m = Matrix::from_i64(field, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, -1]]);
        println!(
            "{field}: rank {} nullity {}",
            rank(&m),
            kernel_basis(&m).cols()
        );
        // the boundary of a triangle: three vertices, three edges
        let d = Matrix::from_i64(field, &[&[-1, 1, 0], &[0, -1, 1], &[-1, 0, 1]]);
        let c = CochainComplex::new(field, 0, vec![3, 3], vec![d])?;
        println!("{field}: circle cohomology {}", c.cohomology());
    }
    Ok(())
}
