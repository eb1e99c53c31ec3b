//! Acceptance run: one PASS/FAIL line per criterion. All comparisons are exact
//! (tolerance 0); the randomized extension suite has a 60 s budget.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shv::complex::{CellComplex, ConstructibleSet};
use shv::enhanced::{
    blowup_pole, blowup_pole_upstairs, catalog_build, catalog_names, check_duality, check_etens,
    check_refinement, check_translation, e_iota, product_template, restrict_to_fiber, sheafify,
    CatalogParams, TModel,
};
use shv::germ::{fiber_stalk, germ_limit, hyperbola_tower_generator, pointed_model};
use shv::linalg::{Field, GradedDims};
use shv::random::random_sheaf;
use shv::sheaf::{costalk_dims, costalk_dims_local, qis_compare, sections_open, stalk_dims, Sheaf};
use shv::suite::{run_suites, SuiteConfig, SuiteReport};
use shv::Result;

const EXTENSION_BUDGET: Duration = Duration::from_secs(60);
const SUITE_COUNT: usize = 500;
const IDENTITY_COUNT: usize = 120;

fn dims(pairs: &[(i32, usize)]) -> GradedDims {
    GradedDims::from_pairs(pairs.iter().copied())
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn params() -> CatalogParams {
    CatalogParams::default()
}

/// Every catalog model, with the blow-up at d = 1, 2, 3.
fn all_models() -> Result<Vec<TModel>> {
    let mut v = Vec::new();
    for n in catalog_names().iter().filter(|n| **n != "blowup-pole") {
        v.push(catalog_build(n, &params())?);
    }
    for d in 1..=3 {
        v.push(blowup_pole(d, None, Field::Rationals)?);
    }
    Ok(v)
}

/// The three-cell line built by hand, independent of the catalog.
fn hand_line() -> Arc<CellComplex> {
    Arc::new(
        CellComplex::new(
            vec![
                ("x<0".to_string(), 1),
                ("x=0".to_string(), 0),
                ("x>0".to_string(), 1),
            ],
            &[("x<0", "x=0", 1), ("x>0", "x=0", -1)],
        )
        .unwrap(),
    )
}

fn indicator(k: &Arc<CellComplex>, ids: &[&str]) -> Sheaf {
    Sheaf::constant_on(
        &ConstructibleSet::from_ids(k.clone(), ids).unwrap(),
        Field::Rationals,
        0,
    )
    .unwrap()
}

fn c1() -> Result<String> {
    let line = hand_line();
    let cases = [
        ("exp-pos", indicator(&line, &["x>0"])),
        ("exp-neg", indicator(&line, &["x=0", "x>0"])),
        ("exp-band", Sheaf::zero(line.clone(), Field::Rationals)),
    ];
    let mut out = Vec::new();
    for (name, expected) in cases {
        let s = sheafify(&catalog_build(name, &params())?)?;
        if stalk_dims(&s) != stalk_dims(&expected) || !qis_compare(&s, &expected)?.pass {
            return Err(shv::Error::Internal(format!(
                "{name}: {:?}",
                stalk_dims(&s)
            )));
        }
        out.push(format!(
            "{name}={:?}",
            stalk_dims(&s).iter().map(|d| d.total()).collect::<Vec<_>>()
        ));
    }
    Ok(out.join(" "))
}

fn c2() -> Result<String> {
    let neg = catalog_build("exp-neg", &params())?;
    let zero = neg.base.index_of("x=0")?;
    let point = ConstructibleSet::from_indices(neg.base.clone(), [zero]);
    let stalk = sheafify(&neg)?.stalk(zero).cohomology();
    let fiber = sheafify(&restrict_to_fiber(&neg, &point)?)?;
    let pos = catalog_build("exp-pos", &params())?;
    let s = sheafify(&pos)?;
    let costalk = costalk_dims(&s, zero);
    // second route: sections with support in the open star
    let costalk_local = costalk_dims_local(&s, zero)?;
    let pos_fiber = restrict_to_fiber(&pos, &point)?;
    let ok = stalk == dims(&[(0, 1)])
        && stalk_dims(&fiber).iter().all(|d| d.is_zero())
        && costalk == dims(&[(1, 1)])
        && costalk_local == costalk
        && pos_fiber.f.support().is_empty();
    let msg = format!(
        "exp-neg stalk {stalk} vs fiber 0; exp-pos costalk {costalk} vs empty fiber support"
    );
    if ok {
        Ok(msg)
    } else {
        Err(shv::Error::Internal(msg))
    }
}

/// Compactly supported cohomology of `d` disjoint open intervals, each modeled as an
/// open edge inside a closed segment.
fn intervals_hc(d: usize) -> GradedDims {
    let mut cells = Vec::new();
    let mut inc = Vec::new();
    for i in 0..d {
        cells.push((format!("l{i}"), 0));
        cells.push((format!("r{i}"), 0));
        cells.push((format!("e{i}"), 1));
        inc.push((format!("e{i}"), format!("l{i}"), 1i8));
        inc.push((format!("e{i}"), format!("r{i}"), -1i8));
    }
    let inc: Vec<(&str, &str, i8)> = inc
        .iter()
        .map(|(a, b, s)| (a.as_str(), b.as_str(), *s))
        .collect();
    let k = Arc::new(CellComplex::new(cells, &inc).unwrap());
    let edges: Vec<String> = (0..d).map(|i| format!("e{i}")).collect();
    let f = Sheaf::constant_on(
        &ConstructibleSet::from_ids(k.clone(), &edges).unwrap(),
        Field::Rationals,
        0,
    )
    .unwrap();
    sections_open(&ConstructibleSet::all(k), &f)
        .unwrap()
        .cohomology()
}

fn c3() -> Result<String> {
    let mut out = Vec::new();
    for d in 1..=3 {
        let m = blowup_pole(d, None, Field::Rationals)?;
        let s = sheafify(&m)?;
        let o = m.base.index_of("O")?;
        let stalk = s.stalk(o).cohomology();
        let oracle = intervals_hc(d);
        let punctured = ConstructibleSet::from_indices(m.base.clone(), [o]).complement();
        let constant = Sheaf::constant(m.base.clone(), Field::Rationals);
        let rest_ok = punctured
            .indices()
            .iter()
            .all(|i| s.stalk(*i).cohomology() == dims(&[(0, 1)]))
            && sections_open(&punctured, &s)?.cohomology()
                == sections_open(&punctured, &constant)?.cohomology();
        if stalk != dims(&[(1, d)]) || stalk != oracle || !rest_ok {
            return Err(shv::Error::Internal(format!(
                "d={d}: origin {stalk}, oracle {oracle}"
            )));
        }
        out.push(format!("d={d}:{stalk}"));
    }
    Ok(out.join(" "))
}

fn suite_line(r: &SuiteReport, name: &str) -> Result<String> {
    let s = r
        .suites
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| shv::Error::Internal(format!("no suite {name}")))?;
    let msg = format!("{name}: {} instances, {} failures", s.instances, s.failures);
    if s.failures == 0 && s.instances >= SUITE_COUNT {
        Ok(msg)
    } else {
        Err(shv::Error::Internal(format!(
            "{msg}; first: {:?}",
            s.first_failure
        )))
    }
}

fn c8() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bases = vec![
        catalog_build("exp-pos", &params())?.base,
        catalog_build("const", &params())?.base,
        blowup_pole(2, None, Field::Rationals)?.base,
        blowup_pole_upstairs(2, None, Field::Rationals)?.base,
    ];
    bases.push(hand_line());
    let mut fails = 0;
    for i in 0..IDENTITY_COUNT {
        let b = &bases[i % bases.len()];
        let field = if i % 2 == 0 {
            Field::Rationals
        } else {
            Field::Prime(2)
        };
        let l = random_sheaf(&mut rng, b, field, 3)?;
        let back = sheafify(&e_iota(&l, &product_template(b, field)?)?)?;
        if !qis_compare(&back, &l)?.pass {
            fails += 1;
        }
    }
    let msg = format!(
        "{IDENTITY_COUNT} random L on {} bases, {fails} failures",
        bases.len()
    );
    if fails == 0 {
        Ok(msg)
    } else {
        Err(shv::Error::Internal(msg))
    }
}

fn per_model(f: impl Fn(&TModel) -> Result<bool>) -> Result<String> {
    let models = all_models()?;
    let bad: Vec<String> = models
        .iter()
        .map(|m| Ok((m.name.clone(), f(m)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| n)
        .collect();
    if bad.is_empty() {
        Ok(format!("{} models", models.len()))
    } else {
        Err(shv::Error::Internal(format!("failing: {}", bad.join(", "))))
    }
}

fn c11() -> Result<String> {
    let y0 = BigRational::from_integer(0.into());
    let mut out = Vec::new();
    for (name, expected) in [
        ("exp-pos", dims(&[])),
        ("exp-neg", dims(&[])),
        ("const", dims(&[(0, 1)])),
    ] {
        let r = germ_limit(&hyperbola_tower_generator(name, &params(), &y0, 3)?)?;
        let (pm, pt) = pointed_model(name, &params(), &y0)?;
        let fiber = fiber_stalk(&pm, pt)?;
        if !r.stabilized || r.limit.as_ref() != Some(&expected) || fiber != expected {
            return Err(shv::Error::Internal(format!(
                "{name}: limit {:?}, fiber {fiber}",
                r.limit
            )));
        }
        out.push(format!("{name}={fiber}"));
    }
    Ok(out.join(" "))
}

fn c12() -> Result<String> {
    let refine = per_model(|m| Ok(check_refinement(m)?.pass))?;
    let shifts = [q(1, 1), q(-3, 2)];
    let mut n = 0;
    for name in catalog_names() {
        let ds: &[usize] = if *name == "blowup-pole" {
            &[1, 2]
        } else {
            &[2]
        };
        for d in ds {
            let p = CatalogParams { d: *d, ..params() };
            let r = check_translation(name, &p, &shifts)?;
            if !r.pass {
                return Err(shv::Error::Internal(format!(
                    "translation of {name}: {:?}",
                    r.detail
                )));
            }
            n += 1;
        }
    }
    Ok(format!(
        "refinement on {refine}; translation by 1 and -3/2 on {n} models"
    ))
}

fn main() {
    let start = Instant::now();
    let t = Instant::now();
    let suite = run_suites(&SuiteConfig {
        seed: 0,
        count: SUITE_COUNT,
        field: None,
        inject_broken_fixture: false,
    });
    let suite_time = t.elapsed();
    let c4 = suite_line(&suite, "open-extension").and_then(|m| {
        if suite_time <= EXTENSION_BUDGET {
            Ok(format!(
                "{m}, Q and F2 alternating, {suite_time:.1?} of {EXTENSION_BUDGET:?}"
            ))
        } else {
            Err(shv::Error::Internal(format!("{m} but took {suite_time:?}")))
        }
    });
    let results: Vec<(usize, &str, Result<String>)> = vec![
        (1, "exp-pos, exp-neg, exp-band over the 3-cell line", c1()),
        (
            2,
            "stalk and costalk at 0 differ from the fiber restriction",
            c2(),
        ),
        (
            3,
            "blow-up origin stalk is d in degree 1, constant elsewhere",
            c3(),
        ),
        (4, "open extension certificates on the random corpus", c4),
        (
            5,
            "sections over open stars equal stalks",
            suite_line(&suite, "star-sections"),
        ),
        (
            6,
            "classification agrees with brute force",
            suite_line(&suite, "classification"),
        ),
        (
            7,
            "join condition after barycentric transport",
            suite_line(&suite, "join-closure"),
        ),
        (8, "sh(e iota L) matches L", c8()),
        (
            9,
            "duality commutes with sh",
            per_model(|m| Ok(check_duality(m)?.pass)),
        ),
        (
            10,
            "external tensor commutes with sh",
            per_model(|m| Ok(check_etens(m)?.pass)),
        ),
        (11, "germ towers at 0 stabilize at the fiber stalk", c11()),
        (12, "invariance under refinement and translation", c12()),
    ];
    let mut failed = 0;
    for (n, what, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n:>2} PASS [exact] {what}: {detail}"),
            Err(e) => {
                failed += 1;
                println!("criterion {n:>2} FAIL [exact] {what}: {e}");
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass in {:.1?}",
        results.len() - failed,
        results.len(),
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
