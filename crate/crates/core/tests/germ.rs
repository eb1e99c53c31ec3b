use num::BigRational;

use shv::enhanced::CatalogParams;
use shv::germ::{fiber_stalk, germ_limit, hyperbola_tower_generator, pointed_model, LimitTower};
use shv::Error;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn more_stages_keep_the_limit() {
    let p = CatalogParams::default();
    for name in [
        "exp-pos",
        "exp-neg",
        "const",
        "exp-band",
        "half-open-interval",
    ] {
        let limits: Vec<_> = (2..=5)
            .map(|n| {
                let r =
                    germ_limit(&hyperbola_tower_generator(name, &p, &q(0, 1), n).unwrap()).unwrap();
                assert!(r.stabilized, "{name} with {n} stages");
                r.limit
            })
            .collect();
        assert!(
            limits.windows(2).all(|w| w[0] == w[1]),
            "{name}: {limits:?}"
        );
        let (m, pt) = pointed_model(name, &p, &q(0, 1)).unwrap();
        assert_eq!(
            limits[0].as_ref(),
            Some(&fiber_stalk(&m, pt).unwrap()),
            "{name}"
        );
    }
}

#[test]
fn constant_model_anywhere_on_the_line() {
    let p = CatalogParams::default();
    for y0 in [q(1, 2), q(-3, 1)] {
        let r = germ_limit(&hyperbola_tower_generator("const", &p, &y0, 3).unwrap()).unwrap();
        assert_eq!(r.limit.unwrap().get(0), 1);
        assert_eq!(r.point, format!("x={y0}"));
    }
}

#[test]
fn irrational_crossings_are_reported() {
    // the tower hyperbola through y0 = 1/2 meets t = 1/x at an irrational x
    let e =
        hyperbola_tower_generator("exp-pos", &CatalogParams::default(), &q(1, 2), 3).unwrap_err();
    assert!(matches!(e, Error::InvalidModel(_)), "{e}");
}

#[test]
fn malformed_towers_are_rejected() {
    let p = CatalogParams::default();
    let t = hyperbola_tower_generator("exp-neg", &p, &q(0, 1), 3).unwrap();
    let reversed = LimitTower {
        stages: t.stages.iter().rev().cloned().collect(),
        ..t.clone()
    };
    assert!(matches!(germ_limit(&reversed), Err(Error::InvalidTower(_))));
    let mut mixed = t.clone();
    mixed.stages[1].cutoff = mixed.stages[1].region.clone();
    assert!(matches!(germ_limit(&mixed), Err(Error::InvalidTower(_))));
    assert!(matches!(
        hyperbola_tower_generator("blowup-pole", &p, &q(0, 1), 3),
        Err(Error::InvalidParameter(_))
    ));
}
