//! Associated sheaves of the catalog models and their compatibility checks.

use shv::enhanced::{
    catalog_build, catalog_names, check_duality, check_etens, sheafify, CatalogParams,
};
use shv::sheaf::stalk_dims;

fn main() -> shv::Result<()> {
    for name in catalog_names() {
        let m = catalog_build(name, &CatalogParams::default())?;
        let s = sheafify(&m)?;
        let table: Vec<String> = stalk_dims(&s)
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| format!("{}:{d}", m.base.id(i)))
            .collect();
        println!(
            "{name} ({} cells): {}",
            m.total.len(),
            if table.is_empty() {
                "0".into()
            } else {
                table.join(" ")
            }
        );
        println!(
            "  duality {}, external tensor {}",
            check_duality(&m)?.pass,
            check_etens(&m)?.pass
        );
    }
    Ok(())
}
