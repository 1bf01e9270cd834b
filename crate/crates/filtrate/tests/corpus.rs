//! Every file under data/ parses and prints back byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use filtrate::anodyne::AnodynePresentation;
use filtrate::ih::{complex_to_text, parse_complex_text, ComplexJson};
use filtrate::io::{
    fmap_from_json, fmap_to_json, fsset_from_json, fsset_to_json, fsset_to_text, parse_fsset_text, parse_presentation_text,
    presentation_to_text, FMapJson, FSSetJson,
};
use filtrate::standard::standard_simplex;
use filtrate::subdivision::sd;
use filtrate::Poset;
use serde::Serialize;

fn data(dir: &str) -> Vec<(PathBuf, String)> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(dir);
    let mut out: Vec<(PathBuf, String)> = fs::read_dir(root)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let t = fs::read_to_string(&p).unwrap();
            (p, t)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "{dir}");
    out
}

fn is_json(p: &Path) -> bool {
    p.extension().is_some_and(|e| e == "json")
}

fn pretty<T: Serialize>(v: &T) -> String {
    format!("{}\n", serde_json::to_string_pretty(&serde_json::to_value(v).unwrap()).unwrap())
}

#[test]
fn posets() {
    for (p, t) in data("posets") {
        assert_eq!(Poset::parse_text(&t).unwrap().to_text(), t, "{p:?}");
    }
}

#[test]
fn fssets() {
    for (p, t) in data("fsset") {
        if is_json(&p) {
            let j: FSSetJson = serde_json::from_str(&t).unwrap();
            let x = fsset_from_json(&j).unwrap();
            assert_eq!(pretty(&fsset_to_json(&x)), t, "{p:?}");
        } else {
            let x = parse_fsset_text(&t).unwrap();
            assert_eq!(fsset_to_text(&x).unwrap(), t, "{p:?}");
        }
    }
}

#[test]
fn complexes() {
    for (p, t) in data("complexes") {
        let x = if is_json(&p) {
            let j: ComplexJson = serde_json::from_str(&t).unwrap();
            let x = j.to_complex().unwrap();
            assert_eq!(pretty(&ComplexJson::of(&x)), t, "{p:?}");
            x
        } else {
            let x = parse_complex_text(&t).unwrap();
            assert_eq!(complex_to_text(&x), t, "{p:?}");
            x
        };
        assert_eq!(x.counts(), parse_complex_text(&complex_to_text(&x)).unwrap().counts());
    }
}

#[test]
fn certificates() {
    for (p, t) in data("certificates") {
        if is_json(&p) {
            let c: AnodynePresentation = serde_json::from_str(&t).unwrap();
            assert_eq!(pretty(&c), t, "{p:?}");
        } else {
            // Leading comment lines are not part of the format.
            let body: String = t.lines().skip_while(|l| l.starts_with('#')).map(|l| format!("{l}\n")).collect();
            let c = parse_presentation_text(&t).unwrap();
            assert_eq!(presentation_to_text(&c).unwrap(), body, "{p:?}");
        }
    }
}

#[test]
fn maps() {
    let p = Arc::new(Poset::chain(2));
    let x = standard_simplex(p, &[0, 1]).unwrap();
    let s = sd(&x).unwrap();
    for (path, t) in data("maps") {
        let j: FMapJson = serde_json::from_str(&t).unwrap();
        let f = fmap_from_json(&s.set, &x, &j).unwrap();
        assert_eq!(pretty(&fmap_to_json(&s.set, &x, &f)), t, "{path:?}");
    }
}
