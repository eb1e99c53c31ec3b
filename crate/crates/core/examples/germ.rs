//! Germ towers at the origin compared with the stalk of the fiber restriction.

use num::BigRational;
use shv::enhanced::CatalogParams;
use shv::germ::{fiber_stalk, germ_limit, hyperbola_tower_generator, pointed_model};

fn main() -> shv::Result<()> {
    let y0 = BigRational::from_integer(0.into());
    let p = CatalogParams::default();
    for name in ["exp-pos", "exp-neg", "const", "exp-band"] {
        let r = germ_limit(&hyperbola_tower_generator(name, &p, &y0, 3)?)?;
        let stages: Vec<String> = r
            .stages
            .iter()
            .map(|s| format!("{}:{}", s.label, s.dims))
            .collect();
        let (m, pt) = pointed_model(name, &p, &y0)?;
        println!("{name}: {}", stages.join("  "));
        println!(
            "  stabilized {}, fiber stalk {}",
            r.stabilized,
            fiber_stalk(&m, pt)?
        );
    }
    Ok(())
}
