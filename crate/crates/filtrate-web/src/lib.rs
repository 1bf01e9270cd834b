//! Browser bindings. Every entry point takes plain strings and returns a
//! JSON document for the page in `www/`.

use std::sync::Arc;

use filtrate::anodyne::{build_presentation, classify_sd_horn, horn_objects, stage_sizes, verify_presentation};
use filtrate::ih::{intersection_homology, parse_complex_text, FilteredComplex, Perversity};
use filtrate::standard::default_partner;
use filtrate::subdivision::{fmt_pairs, mask_vertices, sd_simplex, Pair, SdSimplex};
use filtrate::{models, Poset};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn poset() -> Arc<Poset> {
    Arc::new(Poset::chain(3))
}

fn corners(n: usize) -> Vec<(f64, f64)> {
    match n {
        1 => vec![(0.5, 0.5)],
        2 => vec![(0.05, 0.5), (0.95, 0.5)],
        _ => vec![(0.05, 0.92), (0.95, 0.92), (0.5, 0.1)],
    }
}

/// Weighted barycenter of σ, with the vertices of color at most `q`
/// counted twice, so that distinct pairs land on distinct points.
fn place(p: &Poset, phi: &[usize], (mask, q): Pair) -> (f64, f64) {
    let c = corners(phi.len());
    let (mut x, mut y, mut w) = (0.0, 0.0, 0.0);
    for v in mask_vertices(mask) {
        let wt = if p.leq(phi[v], q) { 2.0 } else { 1.0 };
        x += wt * c[v].0;
        y += wt * c[v].1;
        w += wt;
    }
    (x / w, y / w)
}

fn geometry(p: &Poset, s: &SdSimplex) -> Value {
    let points: Vec<Value> = s
        .set
        .ids_of_dim(0)
        .map(|v| {
            let (x, y) = place(p, &s.phi, s.chains[v][0]);
            json!({"label": fmt_pairs(p, &s.chains[v]), "x": x, "y": y})
        })
        .collect();
    let top = s.set.top_dim().unwrap_or(0);
    let cells: Vec<Vec<Vec<usize>>> = (1..=top).map(|d| s.set.ids_of_dim(d).map(|id| s.set.vertices(id)).collect()).collect();
    json!({"points": points, "cells": cells, "counts": s.set.nd_counts()})
}

fn chain(p: &Poset, text: &str) -> Result<Vec<usize>, String> {
    let phi = p.parse_chain(text).map_err(|e| e.to_string())?;
    if phi.len() > 3 {
        return Err("the drawing handles chains of length at most 3".into());
    }
    Ok(phi)
}

pub fn subdivide_json(text: &str) -> Result<String, String> {
    let p = poset();
    let phi = chain(&p, text)?;
    let s = sd_simplex(p.clone(), &phi).map_err(|e| e.to_string())?;
    Ok(geometry(&p, &s).to_string())
}

pub fn classify_json(text: &str, k: usize) -> Result<String, String> {
    let p = poset();
    let phi = chain(&p, text)?;
    let kp = default_partner(&phi, k).map_err(|e| e.to_string())?;
    let c = classify_sd_horn(p.clone(), &phi, k, kp).map_err(|e| e.to_string())?;
    let pres = build_presentation(&c).map_err(|e| e.to_string())?;
    let (x, y, incl) = horn_objects(&c).map_err(|e| e.to_string())?;
    let verdict = verify_presentation(&x, &y, &incl, &pres);
    let labels: Vec<String> = c.labels.iter().map(|l| l.to_string()).collect();
    let mut out = geometry(&p, &c.sd);
    out["labels"] = json!(labels);
    out["rho"] = json!(c.rho);
    out["stages"] = json!(stage_sizes(&pres));
    out["verified"] = json!(verdict.ok);
    out["partner"] = json!(kp);
    Ok(out.to_string())
}

fn complex(spec: &str) -> Result<FilteredComplex, String> {
    if models::complex_names().contains(&spec.trim()) {
        return models::complex(spec.trim()).map_err(|e| e.to_string());
    }
    parse_complex_text(spec).map_err(|e| e.to_string())
}

pub fn ih_json(spec: &str, perversity: i64) -> Result<String, String> {
    let x = complex(spec)?;
    let p = Perversity::from_fn(&x, |_| perversity);
    let h = intersection_homology(&x, &p).map_err(|e| e.to_string())?;
    let strata: Vec<Value> = x.strata().iter().map(|s| json!({"name": s.name, "codim": s.codim})).collect();
    Ok(json!({
        "groups": h.groups.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "strata": strata,
        "warnings": p.warnings(&x),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn subdivide(chain: &str) -> Result<String, String> {
    subdivide_json(chain)
}

#[wasm_bindgen]
pub fn classify(chain: &str, k: usize) -> Result<String, String> {
    classify_json(chain, k)
}

#[wasm_bindgen]
pub fn ih(complex: &str, perversity: i64) -> Result<String, String> {
    ih_json(complex, perversity)
}

#[wasm_bindgen]
pub fn complexes() -> String {
    json!(models::complex_names()).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn points_are_distinct() {
        for c in ["p0", "p0,p1", "p0,p0,p1", "p0,p1,p2", "p1,p1,p1"] {
            let v = parse(&subdivide_json(c).unwrap());
            let pts: Vec<(String, String)> =
                v["points"].as_array().unwrap().iter().map(|p| (p["x"].to_string(), p["y"].to_string())).collect();
            let mut dedup = pts.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), pts.len(), "{c}");
        }
    }

    #[test]
    fn classification_verifies() {
        let v = parse(&classify_json("p0,p0,p1", 1).unwrap());
        assert_eq!(v["verified"], json!(true));
        assert_eq!(v["labels"].as_array().unwrap().len(), v["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum::<u64>() as usize);
        assert!(classify_json("p0,p1", 0).is_err());
        assert!(subdivide_json("p0,p0,p1,p2").is_err());
    }

    #[test]
    fn homology_of_a_builtin() {
        let v = parse(&ih_json("pinched-torus", 0).unwrap());
        assert_eq!(v["groups"], json!(["Z", "0", "Z"]));
        assert!(ih_json("nothing here", 0).is_err());
    }
}
