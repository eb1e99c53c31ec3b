use std::path::PathBuf;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shv::complex::CellComplex;
use shv::enhanced::{blowup_pole, catalog_build, catalog_names, sheafify, CatalogParams};
use shv::io::{self, ComplexJson, SetJson, SheafJson, TModelJson};
use shv::linalg::Field;
use shv::random::{random_sheaf, random_simplicial};
use shv::sheaf::stalk_dims;

fn fixtures() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut v: Vec<(String, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

/// parse, serialize, parse again and compare the two parsed documents
fn roundtrip<T>(text: &str) -> bool
where
    T: serde::de::DeserializeOwned + serde::Serialize + PartialEq,
{
    let a: T = io::from_str(text).unwrap();
    let b: T = io::from_str(&io::to_string(&a)).unwrap();
    a == b
}

#[test]
fn shipped_fixtures_round_trip() {
    let mut seen = 0;
    for (name, text) in fixtures() {
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["format"], "shv/1", "{name}");
        let ok = if v.get("simplices").is_some() || v.get("incidence").is_some() {
            roundtrip::<ComplexJson>(&text)
        } else if v.get("constant_on").is_some() || v.get("stalks").is_some() {
            roundtrip::<SheafJson>(&text)
        } else {
            roundtrip::<SetJson>(&text)
        };
        assert!(ok, "{name}");
        seen += 1;
    }
    assert!(seen >= 8);
}

#[test]
fn complexes_survive_serialization() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let k = random_simplicial(&mut rng, 6, 2).to_cell_complex();
        let back = io::from_str::<ComplexJson>(&io::to_string(&ComplexJson::from_complex(&k)))
            .unwrap()
            .to_complex()
            .unwrap();
        assert_eq!(*back, k);
    }
}

#[test]
fn sheaves_survive_serialization() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..30 {
        let field = if i % 2 == 0 {
            Field::Rationals
        } else {
            Field::Prime(3)
        };
        let k: Arc<CellComplex> = Arc::new(random_simplicial(&mut rng, 5, 2).to_cell_complex());
        let f = random_sheaf(&mut rng, &k, field, 3).unwrap();
        let doc = SheafJson::from_sheaf(&f);
        let parsed: SheafJson = io::from_str(&io::to_string(&doc)).unwrap();
        assert_eq!(parsed, doc);
        let g = parsed.to_sheaf(&k, None).unwrap();
        assert_eq!(g.field(), field);
        assert_eq!(g.restriction_table(), f.restriction_table());
        assert_eq!(stalk_dims(&g), stalk_dims(&f));
    }
}

#[test]
fn catalog_models_survive_serialization() {
    let mut models: Vec<_> = catalog_names()
        .iter()
        .filter(|n| **n != "blowup-pole")
        .map(|n| catalog_build(n, &CatalogParams::default()).unwrap())
        .collect();
    models.push(blowup_pole(1, None, Field::Rationals).unwrap());
    for m in models {
        let doc = TModelJson::from_model(&m);
        let text = io::to_string(&doc);
        let parsed: TModelJson = io::from_str(&text).unwrap();
        assert_eq!(parsed, doc, "{}", m.name);
        let back = parsed.to_model(None).unwrap();
        assert_eq!(*back.total, *m.total);
        assert_eq!(back.t_flip.is_some(), m.t_flip.is_some());
        assert_eq!(
            stalk_dims(&sheafify(&back).unwrap()),
            stalk_dims(&sheafify(&m).unwrap()),
            "{}",
            m.name
        );
    }
}

#[test]
fn malformed_documents_are_rejected() {
    let k: Arc<CellComplex> =
        io::from_str::<ComplexJson>(r#"{"format":"shv/1","simplices":[["a","b"]]}"#)
            .unwrap()
            .to_complex()
            .unwrap();
    let bad = [
        r#"{"format":"shv/1","stalks":{"zz":{"dims":[1]}}}"#,
        r#"{"format":"shv/1","stalks":{"a":{"dims":[1]},"ab":{"dims":[1]}},
            "restrictions":[{"face":"a","cell":"ab","maps":{"0":{"rows":1,"cols":1,"data":["1","2"]}}}]}"#,
        r#"{"format":"shv/1","shift":1,"stalks":{"a":{"dims":[1]}}}"#,
        r#"{"format":"shv/1","field":"F6","constant_on":["a"]}"#,
    ];
    for text in bad {
        let doc: SheafJson = io::from_str(text).unwrap();
        assert!(doc.to_sheaf(&k, None).is_err(), "{text}");
    }
}
