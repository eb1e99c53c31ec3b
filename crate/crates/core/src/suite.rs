//! Randomized property suites over a seeded corpus, with failure minimization by cell
//! deletion.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{
    check_join_condition, classify, open_star, subdivide_complex, transport_constructible,
    CellComplex, CellMap, Classification, ConstructibleSet, SimplicialComplex,
};
use crate::enhanced::{e_iota, product_template, sheafify};
use crate::extension::extend_and_certify;
use crate::linalg::Field;
use crate::random::{random_locally_closed, random_sheaf, random_simplicial};
use crate::sheaf::{pullback, qis_compare, sections_chains, sections_open, GradedMap, Sheaf};

/// One corpus instance: a complex, a sheaf on it and a locally closed set.
#[derive(Clone, Debug)]
pub struct Instance {
    pub complex: Arc<CellComplex>,
    pub sheaf: Sheaf,
    pub z: ConstructibleSet,
}

type Check = fn(&Instance) -> std::result::Result<(), String>;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    /// Fixed field; by default instances alternate between Q and F_2.
    pub field: Option<Field>,
    /// Prepend an instance whose restrictions do not compose.
    pub inject_broken_fixture: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            count: 100,
            field: None,
            inject_broken_fixture: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub instance: usize,
    pub message: String,
    pub cells: usize,
    /// Cells left after minimization, and the failure message there.
    pub shrunk_cells: Vec<String>,
    pub shrunk_message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<Failure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub format: String,
    pub seed: u64,
    pub count: usize,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

/// Instance number `i` of the corpus for `seed`: at most 6 vertices, simplexes of
/// dimension at most 2, stalk dimension at most 3.
pub fn corpus_instance(seed: u64, i: usize, field: Option<Field>) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(i as u64),
    );
    let field = field.unwrap_or(if i.is_multiple_of(2) {
        Field::Rationals
    } else {
        Field::Prime(2)
    });
    let complex = Arc::new(random_simplicial(&mut rng, 6, 2).to_cell_complex());
    let z = random_locally_closed(&mut rng, &complex);
    let sheaf = random_sheaf(&mut rng, &complex, field, 3).expect("corpus sheaves are valid");
    Instance { complex, sheaf, z }
}

/// The constant sheaf on a full triangle with the restriction `a → ab` doubled, so the
/// two routes from `a` to `abc` disagree.
pub fn broken_functoriality_fixture() -> Instance {
    let complex = Arc::new(SimplicialComplex::simplex(&["a", "b", "c"]).to_cell_complex());
    let field = Field::Rationals;
    let k = Sheaf::constant(complex.clone(), field);
    let a = complex.index_of("a").expect("vertex a");
    let ab = complex.index_of("ab").expect("edge ab");
    let mut table = k.restriction_table();
    let two = GradedMap(BTreeMap::from([(
        0,
        crate::linalg::Matrix::from_i64(field, &[&[2]]),
    )]));
    table.insert((a, ab), two);
    let restr = (0..complex.len())
        .map(|t| {
            complex
                .facets(t)
                .iter()
                .map(|(s, _)| table[&(*s, t)].clone())
                .collect()
        })
        .collect();
    let sheaf = Sheaf::from_parts(complex.clone(), field, k.stalks().to_vec(), restr);
    Instance {
        z: ConstructibleSet::all(complex.clone()),
        complex,
        sheaf,
    }
}

fn check_functoriality(x: &Instance) -> std::result::Result<(), String> {
    x.sheaf.validate().map_err(|e| e.to_string())
}

fn check_extension(x: &Instance) -> std::result::Result<(), String> {
    let c = extend_and_certify(&x.sheaf, &x.z, None).map_err(|e| e.to_string())?;
    if !c.valid {
        return Err(format!(
            "invalid certificate for Z = {:?}: {:?}",
            x.z.ids(),
            c.iso_flags
        ));
    }
    let oracle = sections_chains(&x.z, &x.sheaf)
        .map_err(|e| e.to_string())?
        .cohomology();
    if oracle != c.sections_z {
        return Err(format!(
            "sections over Z {} differ from the nerve oracle {oracle}",
            c.sections_z
        ));
    }
    Ok(())
}

fn check_star_sections(x: &Instance) -> std::result::Result<(), String> {
    for s in 0..x.complex.len() {
        let got = sections_open(&open_star(&x.complex, s), &x.sheaf).map_err(|e| e.to_string())?;
        let (a, b) = (got.cohomology(), x.sheaf.stalk(s).cohomology());
        if a != b {
            return Err(format!(
                "sections over U({}) are {a}, value is {b}",
                x.complex.id(s)
            ));
        }
    }
    Ok(())
}

/// Open, closed and locally closed tested straight from the definitions of the
/// Alexandrov topology: opens are the up-sets, closeds the down-sets, and a locally
/// closed set is an intersection of the two. Exhaustive over all up-sets and down-sets
/// on complexes with at most 10 cells; larger complexes use the intersection
/// `up(Z) ∩ down(Z)`, the smallest candidate.
pub fn classify_brute_force(z: &ConstructibleSet) -> Classification {
    let k = z.complex();
    let n = k.len();
    let up_set = |m: &[bool]| (0..n).all(|s| !m[s] || (0..n).all(|t| !k.leq(s, t) || m[t]));
    let down_set = |m: &[bool]| (0..n).all(|t| !m[t] || (0..n).all(|s| !k.leq(s, t) || m[s]));
    let mask = z.mask();
    let open = up_set(mask);
    let closed = down_set(mask);
    let locally_closed = if n <= 10 {
        let masks: Vec<Vec<bool>> = (0u32..1 << n)
            .map(|b| (0..n).map(|i| b >> i & 1 == 1).collect())
            .collect();
        let ups: Vec<&Vec<bool>> = masks.iter().filter(|m| up_set(m)).collect();
        let downs: Vec<&Vec<bool>> = masks.iter().filter(|m| down_set(m)).collect();
        ups.iter().any(|u| {
            downs
                .iter()
                .any(|d| (0..n).all(|i| (u[i] && d[i]) == mask[i]))
        })
    } else {
        let up: Vec<bool> = (0..n)
            .map(|t| (0..n).any(|s| mask[s] && k.leq(s, t)))
            .collect();
        let down: Vec<bool> = (0..n)
            .map(|s| (0..n).any(|t| mask[t] && k.leq(s, t)))
            .collect();
        (0..n).all(|i| (up[i] && down[i]) == mask[i])
    };
    Classification {
        open,
        closed,
        locally_closed,
    }
}

fn check_classification(x: &Instance) -> std::result::Result<(), String> {
    // the corpus set and a few derived ones that are usually not locally closed
    let k = &x.complex;
    let mut sets = vec![x.z.clone(), x.z.complement()];
    let mask: Vec<bool> = (0..k.len())
        .map(|i| (i * 7 + x.z.len()).is_multiple_of(3))
        .collect();
    sets.push(ConstructibleSet::from_mask(k.clone(), mask));
    for z in sets {
        let (a, b) = (classify(&z), classify_brute_force(&z));
        if a != b {
            return Err(format!(
                "classify {:?} gives {a:?}, brute force {b:?}",
                z.ids()
            ));
        }
    }
    Ok(())
}

fn check_join_closed(x: &Instance) -> std::result::Result<(), String> {
    let (_, carrier) = subdivide_complex(&x.complex);
    let zt = transport_constructible(&x.z, &carrier);
    match check_join_condition(&zt) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("transport of {:?} is not join closed", x.z.ids())),
        Err(e) => Err(e.to_string()),
    }
}

fn check_euler(x: &Instance) -> std::result::Result<(), String> {
    let c = crate::sheaf::sections(&x.z, &x.sheaf).map_err(|e| e.to_string())?;
    let h = c.cohomology();
    if c.euler_characteristic() != h.euler() {
        return Err(format!(
            "Euler characteristic {} of the chains, {} of cohomology",
            c.euler_characteristic(),
            h.euler()
        ));
    }
    Ok(())
}

fn check_left_inverse(x: &Instance) -> std::result::Result<(), String> {
    let run = || -> crate::Result<Option<String>> {
        let t = product_template(&x.complex, x.sheaf.field())?;
        let back = sheafify(&e_iota(&x.sheaf, &t)?)?;
        Ok(qis_compare(&back, &x.sheaf)?.first_divergence)
    };
    match run() {
        Ok(None) => Ok(()),
        Ok(Some(d)) => Err(format!("sheafify ∘ e_iota differs: {d}")),
        Err(e) => Err(e.to_string()),
    }
}

/// Name and check of every suite, in report order.
pub fn suites() -> Vec<(&'static str, Check)> {
    vec![
        ("sheaf-functoriality", check_functoriality as Check),
        ("open-extension", check_extension),
        ("star-sections", check_star_sections),
        ("classification", check_classification),
        ("join-closure", check_join_closed),
        ("euler-characteristic", check_euler),
        ("left-quasi-inverse", check_left_inverse),
    ]
}

/// Restriction of an instance to the closed subcomplex obtained by deleting cell `c`,
/// which must have no cofaces.
fn delete_cell(x: &Instance, c: usize) -> Option<Instance> {
    let k = &x.complex;
    if !k.cofacets(c).is_empty() || k.len() == 1 {
        return None;
    }
    let keep: Vec<bool> = (0..k.len()).map(|i| i != c).collect();
    let (sub, emb) = k.induced(&keep).ok()?;
    let sub = Arc::new(sub);
    let embed = CellMap::new(sub.clone(), k.clone(), emb).ok()?;
    let sheaf = if x.sheaf.validate().is_ok() {
        pullback(&embed, &x.sheaf).ok()?
    } else {
        restrict_unchecked(&x.sheaf, &embed)
    };
    Some(Instance {
        z: embed.preimage(&x.z),
        complex: sub,
        sheaf,
    })
}

/// Restriction along a subcomplex embedding that copies values and facet maps without
/// validating them, so that broken fixtures stay broken while shrinking.
fn restrict_unchecked(f: &Sheaf, embed: &CellMap) -> Sheaf {
    let sub = &embed.source;
    let stalks = (0..sub.len())
        .map(|i| f.stalk(embed.apply(i)).clone())
        .collect();
    let table = f.restriction_table();
    let restr = (0..sub.len())
        .map(|t| {
            sub.facets(t)
                .iter()
                .map(|(s, _)| table[&(embed.apply(*s), embed.apply(t))].clone())
                .collect()
        })
        .collect();
    Sheaf::from_parts(sub.clone(), f.field(), stalks, restr)
}

/// Deletes top cells one at a time as long as the check keeps failing.
pub fn shrink(x: &Instance, check: Check) -> (Instance, String) {
    let mut cur = x.clone();
    let mut msg = check(&cur).err().unwrap_or_default();
    'outer: loop {
        for c in (0..cur.complex.len()).rev() {
            if let Some(y) = delete_cell(&cur, c) {
                if let Err(m) = check(&y) {
                    cur = y;
                    msg = m;
                    continue 'outer;
                }
            }
        }
        return (cur, msg);
    }
}

fn run_suite(name: &str, check: Check, cfg: &SuiteConfig) -> SuiteResult {
    let mut instances: Vec<(usize, Instance)> = Vec::with_capacity(cfg.count + 1);
    if cfg.inject_broken_fixture && name == "sheaf-functoriality" {
        instances.push((usize::MAX, broken_functoriality_fixture()));
    }
    instances.extend((0..cfg.count).map(|i| (i, corpus_instance(cfg.seed, i, cfg.field))));
    let mut failures = 0;
    let mut first = None;
    for (i, x) in &instances {
        if let Err(message) = check(x) {
            failures += 1;
            if first.is_none() {
                let (small, shrunk_message) = shrink(x, check);
                first = Some(Failure {
                    instance: *i,
                    message,
                    cells: x.complex.len(),
                    shrunk_cells: small.complex.cells().iter().map(|c| c.id.clone()).collect(),
                    shrunk_message,
                });
            }
        }
    }
    SuiteResult {
        name: name.to_string(),
        instances: instances.len(),
        failures,
        first_failure: first,
    }
}

/// Runs every suite; suites run on separate threads and report in a fixed order.
pub fn run_suites(cfg: &SuiteConfig) -> SuiteReport {
    let all = suites();
    let results: Vec<SuiteResult> = std::thread::scope(|s| {
        let handles: Vec<_> = all
            .iter()
            .map(|(name, check)| s.spawn(move || run_suite(name, *check, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread"))
            .collect()
    });
    let pass = results.iter().all(|r| r.failures == 0);
    SuiteReport {
        format: crate::io::FORMAT.into(),
        seed: cfg.seed,
        count: cfg.count,
        suites: results,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_caught_and_named() {
        let cfg = SuiteConfig {
            count: 2,
            inject_broken_fixture: true,
            ..SuiteConfig::default()
        };
        let r = run_suite("sheaf-functoriality", check_functoriality, &cfg);
        assert_eq!(r.failures, 1);
        let f = r.first_failure.unwrap();
        assert!(
            f.message.contains("a < {ab, ac} < abc") || f.message.contains("a < {ac, ab} < abc"),
            "{}",
            f.message
        );
        assert_eq!(f.shrunk_cells.len(), 7);
    }

    #[test]
    fn brute_force_classification_on_path() {
        let k = Arc::new(
            SimplicialComplex::from_facets(
                vec!["a".into(), "b".into(), "c".into()],
                &[vec![0, 1], vec![1, 2]],
            )
            .unwrap()
            .to_cell_complex(),
        );
        let z = ConstructibleSet::from_ids(k, &["b", "ab"]).unwrap();
        let c = classify_brute_force(&z);
        assert_eq!((c.open, c.closed, c.locally_closed), (false, false, true));
    }
}
