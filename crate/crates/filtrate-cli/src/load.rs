//! Object specifications on the command line.
//!
//! An object is either a file (JSON when it starts with `{`, text
//! otherwise) or one of `model:NAME`, `simplex:CHAIN`, `boundary:CHAIN`,
//! `horn:K:CHAIN`, `nerve:D`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use filtrate::ih::{parse_complex_text, ComplexJson, FilteredComplex, Perversity};
use filtrate::io::{fmap_from_json, fsset_from_json, parse_fsset_text, FMapJson, FSSetJson};
use filtrate::{models, standard, FMap, FSSet, Poset};

pub fn read(path: &str) -> Result<String> {
    fs::read_to_string(Path::new(path)).with_context(|| format!("cannot read `{path}`"))
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

pub fn poset(file: Option<&str>) -> Result<Arc<Poset>> {
    match file {
        None => Ok(models::poset()),
        Some(f) => Ok(Arc::new(Poset::parse_text(&read(f)?)?)),
    }
}

pub fn chain(p: &Poset, text: &str) -> Result<Vec<usize>> {
    Ok(p.parse_chain(text)?)
}

pub fn object(spec: &str, p: &Arc<Poset>) -> Result<FSSet> {
    let x = if let Some(name) = spec.strip_prefix("model:") {
        models::fsset(name)?
    } else if let Some(c) = spec.strip_prefix("simplex:") {
        standard::standard_simplex(p.clone(), &chain(p, c)?)?
    } else if let Some(c) = spec.strip_prefix("boundary:") {
        standard::boundary(p.clone(), &chain(p, c)?)?
    } else if let Some(rest) = spec.strip_prefix("horn:") {
        let (k, c) = rest.split_once(':').context("expected `horn:K:CHAIN`")?;
        let k: usize = k.parse().context("horn index")?;
        standard::horn(p.clone(), &chain(p, c)?, k)?
    } else if let Some(d) = spec.strip_prefix("nerve:") {
        standard::nerve(p.clone(), d.parse().context("nerve truncation")?)
    } else {
        let text = read(spec)?;
        if is_json(&text) {
            let j: FSSetJson = serde_json::from_str(&text).map_err(filtrate::Error::from)?;
            fsset_from_json(&j)?
        } else {
            parse_fsset_text(&text)?
        }
    };
    Ok(x)
}

/// Loads two objects that must live over the same poset.
pub fn pair(a: &str, x: &str, p: &Arc<Poset>) -> Result<(FSSet, FSSet)> {
    let a = object(a, p)?;
    let x = object(x, p)?;
    if a.poset() != x.poset() {
        bail!(filtrate::Error::Precondition("objects live over different posets".into()));
    }
    Ok((a, x))
}

pub fn map(path: &str, dom: &FSSet, cod: &FSSet) -> Result<FMap> {
    let j: FMapJson = serde_json::from_str(&read(path)?).map_err(filtrate::Error::from)?;
    Ok(fmap_from_json(dom, cod, &j)?)
}

/// A filtered complex: `complex:NAME`, a bare built-in name, or a file.
pub fn complex(spec: &str) -> Result<FilteredComplex> {
    let name = spec.strip_prefix("complex:").or_else(|| spec.strip_prefix("model:")).unwrap_or(spec);
    if models::complex_names().contains(&name) {
        return Ok(models::complex(name)?);
    }
    let text = read(spec)?;
    if is_json(&text) {
        let j: ComplexJson = serde_json::from_str(&text).map_err(filtrate::Error::from)?;
        Ok(j.to_complex()?)
    } else {
        Ok(parse_complex_text(&text)?)
    }
}

/// Perversity file: a JSON object `{stratum: value}` or lines
/// `stratum value`.
pub fn perversity(x: &FilteredComplex, path: &str) -> Result<Perversity> {
    let text = read(path)?;
    let map = if is_json(&text) {
        serde_json::from_str(&text).map_err(filtrate::Error::from)?
    } else {
        let mut m = std::collections::BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let w: Vec<&str> = line.split_whitespace().collect();
            match w[..] {
                [] => {}
                [c, ..] if c.starts_with('#') => {}
                [name, v] => {
                    let v: i64 = v.parse().map_err(|_| filtrate::Error::Parse(format!("line {}: bad value `{v}`", i + 1)))?;
                    m.insert(name.to_string(), v);
                }
                _ => bail!(filtrate::Error::Parse(format!("line {}: expected `stratum value`", i + 1))),
            }
        }
        m
    };
    Ok(Perversity::from_map(x, &map)?)
}
