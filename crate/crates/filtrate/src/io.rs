//! JSON forms of filtered simplicial sets and maps.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::anodyne::{AnodynePresentation, Fill, Stage};
use crate::error::{Error, Result};
use crate::fsset::{Builder, FMap, FSSet, Nf};
use crate::poset::Poset;
use crate::simplex;

/// A simplex referenced by key: the degeneracy word (indices decreasing)
/// applied to the named non-degenerate simplex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NfRef {
    pub base: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub word: Vec<usize>,
}

impl FSSet {
    pub fn nf_ref(&self, y: Nf) -> NfRef {
        NfRef { base: self.name(y.base).to_string(), word: simplex::word_indices(y.word) }
    }

    pub fn resolve(&self, r: &NfRef) -> Result<Nf> {
        let base = self.id(&r.base).ok_or_else(|| Error::UnknownElement(r.base.clone()))?;
        let word = simplex::mask_from_indices(&r.word)
            .ok_or_else(|| Error::Parse(format!("bad degeneracy word on `{}`", r.base)))?;
        let top = self.dim(base) + r.word.len();
        if r.word.iter().any(|&i| i >= top) {
            return Err(Error::Parse(format!("degeneracy index out of range on `{}`", r.base)));
        }
        Ok(Nf { base, word })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

impl PosetJson {
    pub fn of(p: &Poset) -> PosetJson {
        PosetJson {
            elements: p.names().to_vec(),
            covers: p.covers().into_iter().map(|(a, b)| (p.name(a).to_string(), p.name(b).to_string())).collect(),
        }
    }

    pub fn to_poset(&self) -> Result<Poset> {
        Poset::from_covers(&self.elements, &self.covers)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FSSetJson {
    pub poset: PosetJson,
    /// Keys of non-degenerate simplices, by dimension.
    pub nd: Vec<Vec<String>>,
    pub faces: BTreeMap<String, Vec<NfRef>>,
    pub filt: BTreeMap<String, Vec<String>>,
}

pub fn fsset_to_json(x: &FSSet) -> FSSetJson {
    let p = x.poset();
    let nd = match x.top_dim() {
        None => Vec::new(),
        Some(t) => (0..=t).map(|d| x.ids_of_dim(d).map(|i| x.name(i).to_string()).collect()).collect(),
    };
    let mut faces = BTreeMap::new();
    let mut filt = BTreeMap::new();
    for (id, s) in x.simplices().iter().enumerate() {
        if !s.faces.is_empty() {
            faces.insert(s.name.clone(), s.faces.iter().map(|&f| x.nf_ref(f)).collect());
        }
        filt.insert(x.name(id).to_string(), p.chain_names(&s.filt));
    }
    FSSetJson { poset: PosetJson::of(p), nd, faces, filt }
}

pub fn fsset_from_json(j: &FSSetJson) -> Result<FSSet> {
    let poset = Arc::new(j.poset.to_poset()?);
    fsset_from_json_over(j, poset)
}

/// As [`fsset_from_json`], reusing an already parsed poset that must agree
/// with the embedded one.
pub fn fsset_from_json_over(j: &FSSetJson, poset: Arc<Poset>) -> Result<FSSet> {
    if *poset != j.poset.to_poset()? {
        return Err(Error::Precondition("objects live over different posets".into()));
    }
    let mut b = Builder::new(poset.clone());
    for (d, keys) in j.nd.iter().enumerate() {
        for key in keys {
            let names = j.filt.get(key).ok_or_else(|| Error::Parse(format!("missing filtration of `{key}`")))?;
            let filt = poset.chain_from_names(names)?;
            if filt.len() != d + 1 {
                return Err(Error::Parse(format!("`{key}` listed in dimension {d} has a filtration of length {}", filt.len())));
            }
            let faces = match j.faces.get(key) {
                None if d == 0 => Vec::new(),
                None => return Err(Error::Parse(format!("missing faces of `{key}`"))),
                Some(fs) => fs
                    .iter()
                    .map(|r| {
                        let base = b.id(&r.base).ok_or_else(|| Error::UnknownElement(r.base.clone()))?;
                        let word = simplex::mask_from_indices(&r.word)
                            .ok_or_else(|| Error::Parse(format!("bad degeneracy word in a face of `{key}`")))?;
                        Ok(Nf { base, word })
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            b.add(key, filt, faces)?;
        }
    }
    for key in j.faces.keys().chain(j.filt.keys()) {
        if b.id(key).is_none() {
            return Err(Error::Parse(format!("`{key}` is not listed among the simplices")));
        }
    }
    Ok(b.finish().0)
}

/// A map given on the non-degenerate simplices of its domain, by key.
pub type FMapJson = BTreeMap<String, NfRef>;

pub fn fmap_to_json(dom: &FSSet, cod: &FSSet, f: &FMap) -> FMapJson {
    (0..dom.len()).map(|i| (dom.name(i).to_string(), cod.nf_ref(f.images[i]))).collect()
}

pub fn fmap_from_json(dom: &FSSet, cod: &FSSet, j: &FMapJson) -> Result<FMap> {
    if j.len() != dom.len() {
        return Err(Error::Parse(format!("map lists {} keys, domain has {}", j.len(), dom.len())));
    }
    let images = (0..dom.len())
        .map(|i| {
            let r = j.get(dom.name(i)).ok_or_else(|| Error::Parse(format!("map has no image for `{}`", dom.name(i))))?;
            cod.resolve(r)
        })
        .collect::<Result<_>>()?;
    Ok(FMap { images })
}

// Line-oriented text forms. Tokens are separated by whitespace, so keys
// and element ids must not contain any; lines starting with `#` are
// comments.

fn words(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, w)| !w.is_empty() && !w[0].starts_with('#'))
}

fn check_token(t: &str) -> Result<&str> {
    if t.is_empty() || t.chars().any(char::is_whitespace) || t.starts_with('#') {
        return Err(Error::Parse(format!("`{t}` cannot be written as a token")));
    }
    Ok(t)
}

fn push_ref(line: &mut String, r: &NfRef) -> Result<()> {
    line.push(' ');
    line.push_str(check_token(&r.base)?);
    for w in &r.word {
        line.push_str(&format!(" {w}"));
    }
    Ok(())
}

fn parse_ref(lineno: usize, w: &[&str]) -> Result<NfRef> {
    let (base, word) = w.split_first().ok_or_else(|| Error::Parse(format!("line {lineno}: missing simplex reference")))?;
    let word = word
        .iter()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("line {lineno}: bad degeneracy index `{t}`"))))
        .collect::<Result<_>>()?;
    Ok(NfRef { base: base.to_string(), word })
}

fn parse_index(lineno: usize, t: &str) -> Result<usize> {
    t.parse().map_err(|_| Error::Parse(format!("line {lineno}: expected an index, found `{t}`")))
}

/// Text form of a filtered simplicial set:
///
/// ```text
/// element p0          # poset elements, in order
/// cover p0 p1         # cover relations
/// nd 1 e              # non-degenerate keys of dimension 1
/// face e 0 b          # face 0 of e is b (degeneracy indices may follow)
/// filt e p0 p1        # filtration of e
/// ```
pub fn fsset_to_text(x: &FSSet) -> Result<String> {
    json_to_text(&fsset_to_json(x))
}

fn json_to_text(j: &FSSetJson) -> Result<String> {
    let mut out = String::new();
    for e in &j.poset.elements {
        out.push_str(&format!("element {}\n", check_token(e)?));
    }
    for (a, b) in &j.poset.covers {
        out.push_str(&format!("cover {a} {b}\n"));
    }
    for (d, keys) in j.nd.iter().enumerate() {
        let mut line = format!("nd {d}");
        for k in keys {
            line.push(' ');
            line.push_str(check_token(k)?);
        }
        out.push_str(&line);
        out.push('\n');
    }
    for keys in &j.nd {
        for k in keys {
            for (i, r) in j.faces.get(k).into_iter().flatten().enumerate() {
                let mut line = format!("face {k} {i}");
                push_ref(&mut line, r)?;
                out.push_str(&line);
                out.push('\n');
            }
        }
    }
    for keys in &j.nd {
        for k in keys {
            if let Some(c) = j.filt.get(k) {
                out.push_str(&format!("filt {k} {}\n", c.join(" ")));
            }
        }
    }
    Ok(out)
}

pub fn parse_fsset_text(text: &str) -> Result<FSSet> {
    let mut j = FSSetJson { poset: PosetJson { elements: Vec::new(), covers: Vec::new() }, nd: Vec::new(), faces: BTreeMap::new(), filt: BTreeMap::new() };
    for (lineno, w) in words(text) {
        let bad = || Error::Parse(format!("line {lineno}: malformed `{}` line", w[0]));
        match w[0] {
            "element" if w.len() == 2 => j.poset.elements.push(w[1].to_string()),
            "cover" if w.len() == 3 => j.poset.covers.push((w[1].to_string(), w[2].to_string())),
            "nd" if w.len() >= 2 => {
                let d = parse_index(lineno, w[1])?;
                if d != j.nd.len() {
                    return Err(Error::Parse(format!("line {lineno}: dimension {d} listed out of order")));
                }
                j.nd.push(w[2..].iter().map(|k| k.to_string()).collect());
            }
            "face" if w.len() >= 4 => {
                let i = parse_index(lineno, w[2])?;
                let list = j.faces.entry(w[1].to_string()).or_default();
                if i != list.len() {
                    return Err(Error::Parse(format!("line {lineno}: face {i} of `{}` listed out of order", w[1])));
                }
                list.push(parse_ref(lineno, &w[3..])?);
            }
            "filt" if w.len() >= 3 => {
                if j.filt.insert(w[1].to_string(), w[2..].iter().map(|e| e.to_string()).collect()).is_some() {
                    return Err(Error::Parse(format!("line {lineno}: second filtration for `{}`", w[1])));
                }
            }
            "element" | "cover" | "nd" | "face" | "filt" => return Err(bad()),
            other => return Err(Error::Parse(format!("line {lineno}: unknown directive `{other}`"))),
        }
    }
    fsset_from_json(&j)
}

/// Text form of an anodyne presentation certificate:
///
/// ```text
/// stage
/// fill 1 top face p0 p0 p1   # horn index, fill keys, horn chain
/// attach {0,1} a             # horn key and its image (base, degeneracies)
/// ```
pub fn presentation_to_text(p: &AnodynePresentation) -> Result<String> {
    let mut out = String::new();
    for stage in &p.stages {
        out.push_str("stage\n");
        for f in &stage.fills {
            out.push_str(&format!(
                "fill {} {} {} {}\n",
                f.horn_index,
                check_token(&f.fill_keys[0])?,
                check_token(&f.fill_keys[1])?,
                f.horn_chain.join(" ")
            ));
            for (k, r) in &f.attach {
                let mut line = format!("attach {}", check_token(k)?);
                push_ref(&mut line, r)?;
                out.push_str(&line);
                out.push('\n');
            }
        }
    }
    Ok(out)
}

pub fn parse_presentation_text(text: &str) -> Result<AnodynePresentation> {
    let mut p = AnodynePresentation::default();
    for (lineno, w) in words(text) {
        match w[0] {
            "stage" if w.len() == 1 => p.stages.push(Stage::default()),
            "fill" if w.len() >= 5 => {
                let stage = p.stages.last_mut().ok_or_else(|| Error::Parse(format!("line {lineno}: fill before any stage")))?;
                stage.fills.push(Fill {
                    horn_index: parse_index(lineno, w[1])?,
                    fill_keys: [w[2].to_string(), w[3].to_string()],
                    horn_chain: w[4..].iter().map(|e| e.to_string()).collect(),
                    attach: BTreeMap::new(),
                });
            }
            "attach" if w.len() >= 3 => {
                let fill = p
                    .stages
                    .last_mut()
                    .and_then(|s| s.fills.last_mut())
                    .ok_or_else(|| Error::Parse(format!("line {lineno}: attach before any fill")))?;
                if fill.attach.insert(w[1].to_string(), parse_ref(lineno, &w[2..])?).is_some() {
                    return Err(Error::Parse(format!("line {lineno}: `{}` attached twice", w[1])));
                }
            }
            other => return Err(Error::Parse(format!("line {lineno}: malformed `{other}` line"))),
        }
    }
    Ok(p)
}

pub fn to_pretty<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}
