//! Anodyne presentations of sd_P(Λ_k^φ) ⊆ sd_P(Δ^φ).
//!
//! The non-degenerate simplices outside the horn split into eight classes
//! `a..h`. The classes `a, c, e, g` (type II) are paired with `b, d, f, h`
//! (type I) by ρ, which inserts one vertex. Ranks along the ancestral
//! order group the pairs into stages of simultaneous horn fillings.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsset::{validate_map, Builder, FMap, FSSet, Nf};
use crate::io::NfRef;
use crate::poset::{Chain, Poset};
use crate::standard::{horn, in_horn, is_admissible, parse_subset_key, subset_key};
use crate::subdivision::{sd_simplex, Pair, SdSimplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    Lambda,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "e")]
    E,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "g")]
    G,
    #[serde(rename = "h")]
    H,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 9] = [
        ClassLabel::Lambda,
        ClassLabel::A,
        ClassLabel::B,
        ClassLabel::C,
        ClassLabel::D,
        ClassLabel::E,
        ClassLabel::F,
        ClassLabel::G,
        ClassLabel::H,
    ];

    pub fn is_type_ii(self) -> bool {
        matches!(self, ClassLabel::A | ClassLabel::C | ClassLabel::E | ClassLabel::G)
    }

    pub fn is_type_i(self) -> bool {
        matches!(self, ClassLabel::B | ClassLabel::D | ClassLabel::F | ClassLabel::H)
    }

    /// The type-I class paired with a type-II one.
    pub fn partner(self) -> Option<ClassLabel> {
        match self {
            ClassLabel::A => Some(ClassLabel::B),
            ClassLabel::C => Some(ClassLabel::D),
            ClassLabel::E => Some(ClassLabel::F),
            ClassLabel::G => Some(ClassLabel::H),
            _ => None,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassLabel::Lambda => "Lambda",
            ClassLabel::A => "a",
            ClassLabel::B => "b",
            ClassLabel::C => "c",
            ClassLabel::D => "d",
            ClassLabel::E => "e",
            ClassLabel::F => "f",
            ClassLabel::G => "g",
            ClassLabel::H => "h",
        };
        f.write_str(s)
    }
}

/// An admissible horn `(φ, k)` with the fixed neighbour `k'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornSpec {
    pub phi: Chain,
    pub k: usize,
    pub kp: usize,
}

impl HornSpec {
    pub fn new(phi: &[usize], k: usize, kp: usize) -> Result<HornSpec> {
        if !is_admissible(phi, k)? {
            return Err(Error::Precondition(format!("horn Λ_{k} is not admissible")));
        }
        if kp >= phi.len() || kp.abs_diff(k) != 1 || phi[kp] != phi[k] {
            return Err(Error::Precondition(format!("k' = {kp} is not a neighbour of {k} with the same filtration")));
        }
        Ok(HornSpec { phi: phi.to_vec(), k, kp })
    }

    fn full(&self) -> u32 {
        (1u32 << self.phi.len()) - 1
    }

    fn dk(&self) -> u32 {
        self.full() & !(1 << self.k)
    }

    fn ek(&self) -> u32 {
        1 << self.k
    }

    fn ekp(&self) -> u32 {
        1 << self.kp
    }

    fn in_horn(&self, pairs: &[Pair]) -> bool {
        let top = pairs.last().unwrap().0;
        let vs = crate::subdivision::mask_vertices(top);
        in_horn(&vs, self.phi.len() - 1, self.k)
    }

    /// Label of a non-degenerate chain together with the index at which
    /// ρ inserts, and the inserted pair, for type II.
    fn analyse(&self, c: &[Pair]) -> (ClassLabel, Option<(usize, Pair)>) {
        if self.in_horn(c) {
            return (ClassLabel::Lambda, None);
        }
        let n = c.len() - 1;
        let full = self.full();
        let dk = self.dk();
        if c[n].0 == dk {
            return (ClassLabel::A, Some((n + 1, (full, c[n].1))));
        }
        if let Some(j) = (0..=n).rev().find(|&i| c[i].0 == dk) {
            // j < n, and c[j + 1] is the whole simplex
            return if c[j].1 == c[j + 1].1 {
                (ClassLabel::B, None)
            } else {
                (ClassLabel::A, Some((j + 1, (full, c[j].1))))
            };
        }
        let j = (0..=n).find(|&i| c[i].0 == full).expect("top face is the whole simplex");
        let p0 = c[0].1;
        if p0 != c[j].1 {
            let l = (0..=n).rev().find(|&i| c[i].1 == p0).unwrap();
            let m = (0..=n).rev().find(|&i| c[i].0 == c[l].0).unwrap();
            return if c[m].1 == c[m + 1].1 {
                (ClassLabel::D, None)
            } else {
                (ClassLabel::C, Some((m + 1, (c[l].0, c[m + 1].1))))
            };
        }
        if c[0].0 & self.ek() == 0 {
            let l = (0..=n).rev().find(|&i| c[i].0 & self.ek() == 0).unwrap();
            let widened = c[l].0 | self.ek();
            return if c[l + 1].0 == widened {
                (ClassLabel::F, None)
            } else {
                (ClassLabel::E, Some((l + 1, (widened, p0))))
            };
        }
        let l = (0..=n).find(|&i| c[i].0 & self.ekp() != 0).unwrap();
        if l >= 1 && c[l].0 == c[l - 1].0 | self.ekp() {
            (ClassLabel::H, None)
        } else {
            (ClassLabel::G, Some((l, (c[l].0 & !self.ekp(), p0))))
        }
    }

    pub fn classify_chain(&self, c: &[Pair]) -> ClassLabel {
        self.analyse(c).0
    }

    /// ρ on chains, with the index of the inserted vertex.
    pub fn rho_chain(&self, c: &[Pair]) -> Result<(Vec<Pair>, usize)> {
        match self.analyse(c) {
            (_, Some((at, pair))) => {
                let mut out = c.to_vec();
                out.insert(at, pair);
                Ok((out, at))
            }
            (label, None) => Err(Error::Precondition(format!("ρ is defined on type II only, got class {label}"))),
        }
    }
}

/// Labels of all non-degenerate simplices of sd_P(Δ^φ), and ρ.
#[derive(Debug)]
pub struct Classification {
    pub spec: HornSpec,
    pub sd: SdSimplex,
    pub labels: Vec<ClassLabel>,
    /// ρ(σ) for type-II σ.
    pub rho: Vec<Option<usize>>,
    /// Index of the vertex ρ inserts, for type-II σ.
    pub rho_index: Vec<Option<usize>>,
}

impl Classification {
    pub fn counts(&self) -> BTreeMap<ClassLabel, usize> {
        let mut out: BTreeMap<ClassLabel, usize> = ClassLabel::ALL.iter().map(|&l| (l, 0)).collect();
        for &l in &self.labels {
            *out.get_mut(&l).unwrap() += 1;
        }
        out
    }

    pub fn in_horn(&self) -> Vec<bool> {
        self.labels.iter().map(|&l| l == ClassLabel::Lambda).collect()
    }
}

pub fn classify_sd_horn(poset: Arc<Poset>, phi: &[usize], k: usize, kp: usize) -> Result<Classification> {
    let spec = HornSpec::new(phi, k, kp)?;
    let sd = sd_simplex(poset, phi)?;
    let mut labels = Vec::with_capacity(sd.chains.len());
    let mut rho = Vec::with_capacity(sd.chains.len());
    let mut rho_index = Vec::with_capacity(sd.chains.len());
    for c in &sd.chains {
        let label = spec.classify_chain(c);
        labels.push(label);
        if label.is_type_ii() {
            let (r, at) = spec.rho_chain(c)?;
            let id = sd.chain_id(&r).ok_or_else(|| Error::Invariant(format!("ρ leaves the subdivision at {}", sd.set.name(rho.len()))))?;
            rho.push(Some(id));
            rho_index.push(Some(at));
        } else {
            rho.push(None);
            rho_index.push(None);
        }
    }
    Ok(Classification { spec, sd, labels, rho, rho_index })
}

pub fn rho(c: &Classification, sigma: usize) -> Result<usize> {
    c.rho
        .get(sigma)
        .copied()
        .flatten()
        .ok_or_else(|| Error::Precondition(format!("ρ is defined on type II only, got class {}", c.labels[sigma])))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeRule {
    FaceNotRho,
    InRhoBoundary,
    FromHorn,
}

impl fmt::Display for EdgeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeRule::FaceNotRho => "face-not-rho",
            EdgeRule::InRhoBoundary => "in-rho-boundary",
            EdgeRule::FromHorn => "from-horn",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AncestralEdge {
    pub lesser: usize,
    pub greater: usize,
    pub rule: EdgeRule,
}

/// Proper non-degenerate sub-simplices of each non-degenerate simplex.
pub fn proper_faces(y: &FSSet) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(y.len());
    for id in 0..y.len() {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        for f in &y.simplex(id).faces {
            set.insert(f.base);
            set.extend(out[f.base].iter().copied());
        }
        out.push(set.into_iter().collect());
    }
    out
}

/// Generating edges of the ancestral order for a partition of `Y \ X`
/// into type I and type II with the bijection `rho`. `with_horn` controls
/// whether the `from-horn` edges (every X simplex below every other one)
/// are listed.
pub fn ancestral_edges(y: &FSSet, in_x: &[bool], rho: &[Option<usize>], with_horn: bool) -> Vec<AncestralEdge> {
    let faces = proper_faces(y);
    let mut edges = Vec::new();
    for tau in 0..y.len() {
        if in_x[tau] {
            continue;
        }
        for &sigma in &faces[tau] {
            if !in_x[sigma] && rho[sigma] != Some(tau) {
                edges.push(AncestralEdge { lesser: sigma, greater: tau, rule: EdgeRule::FaceNotRho });
            }
        }
        if let Some(r) = rho[tau] {
            for &sigma in &faces[r] {
                if !in_x[sigma] && sigma != tau {
                    edges.push(AncestralEdge { lesser: sigma, greater: tau, rule: EdgeRule::InRhoBoundary });
                }
            }
        }
        if with_horn {
            for sigma in (0..y.len()).filter(|&s| in_x[s]) {
                edges.push(AncestralEdge { lesser: sigma, greater: tau, rule: EdgeRule::FromHorn });
            }
        }
    }
    edges
}

pub fn ancestral_order(c: &Classification) -> Vec<AncestralEdge> {
    ancestral_edges(&c.sd.set, &c.in_horn(), &c.rho, true)
}

/// The rank F: 0 on X, and on type II the least bound above every rank of
/// a strictly smaller simplex of X or type II (at least 1). Type I gets
/// `None`.
pub fn rank_function(y: &FSSet, in_x: &[bool], rho: &[Option<usize>], edges: &[AncestralEdge]) -> Result<Vec<Option<usize>>> {
    let n = y.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for e in edges {
        if e.rule == EdgeRule::FromHorn {
            continue;
        }
        preds[e.greater].push(e.lesser);
        succs[e.lesser].push(e.greater);
        indeg[e.greater] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &succs[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n).find(|&v| indeg[v] > 0).unwrap();
        return Err(Error::Invariant(format!("ancestral order has a cycle through `{}`", y.name(stuck))));
    }
    // below[v]: largest rank of a strictly smaller simplex of X or type II
    let mut below: Vec<Option<usize>> = vec![None; n];
    let mut rank: Vec<Option<usize>> = vec![None; n];
    for &v in &order {
        let mut b = if in_x[v] { None } else { (0..n).find(|&s| in_x[s]).map(|_| 0) };
        for &u in &preds[v] {
            b = b.max(rank[u]).max(below[u]);
        }
        below[v] = b;
        if in_x[v] {
            rank[v] = Some(0);
        } else if rho[v].is_some() {
            rank[v] = Some(b.map_or(1, |r| r + 1).max(1));
        }
    }
    Ok(rank)
}

/// One horn filling: the top simplex `fill_keys[0]` with filtration
/// `horn_chain` is glued along Λ_{horn_index}, creating it and its face
/// `fill_keys[1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fill {
    pub horn_chain: Vec<String>,
    pub horn_index: usize,
    pub attach: BTreeMap<String, NfRef>,
    pub fill_keys: [String; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub fills: Vec<Fill>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnodynePresentation {
    pub stages: Vec<Stage>,
}

impl AnodynePresentation {
    pub fn total_fills(&self) -> usize {
        self.stages.iter().map(|s| s.fills.len()).sum()
    }
}

/// Presentation of `X ⊆ Y` from a pairing, with stages given by the rank.
pub fn presentation_from_pairing(y: &FSSet, in_x: &[bool], rho: &[Option<usize>]) -> Result<AnodynePresentation> {
    let edges = ancestral_edges(y, in_x, rho, false);
    let rank = rank_function(y, in_x, rho, &edges)?;
    let top = rank.iter().flatten().copied().max().unwrap_or(0);
    let mut stages: Vec<Stage> = vec![Stage::default(); top];
    for sigma in 0..y.len() {
        let Some(t) = rho[sigma] else { continue };
        let n = y.dim(t);
        let matching: Vec<usize> = (0..=n).filter(|&l| y.face(t, l) == Nf::nd(sigma)).collect();
        let [l] = matching[..] else {
            return Err(Error::Invariant(format!("`{}` is not a unique face of its partner", y.name(sigma))));
        };
        let psi = y.filt(t);
        let h = horn(y.poset_arc(), psi, l)?;
        let attach = (0..h.len())
            .map(|i| {
                let theta = parse_subset_key(h.name(i)).expect("horn keys are subsets");
                (h.name(i).to_string(), y.nf_ref(y.restrict(t, &theta)))
            })
            .collect();
        let r = rank[sigma].expect("type II has a rank");
        stages[r - 1].fills.push(Fill {
            horn_chain: y.poset().chain_names(psi),
            horn_index: l,
            attach,
            fill_keys: [y.name(t).to_string(), y.name(sigma).to_string()],
        });
    }
    Ok(AnodynePresentation { stages })
}

pub fn build_presentation(c: &Classification) -> Result<AnodynePresentation> {
    presentation_from_pairing(&c.sd.set, &c.in_horn(), &c.rho)
}

/// Outcome of replaying a presentation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

impl Verdict {
    fn fail(msg: String) -> Verdict {
        Verdict { ok: false, diagnostics: vec![msg] }
    }
}

#[derive(Clone, Debug)]
struct Entry {
    filt: Chain,
    faces: Vec<(String, u32)>,
}

fn rebuild(poset: &Arc<Poset>, entries: &BTreeMap<String, Entry>) -> Result<FSSet> {
    let mut order: Vec<(&String, &Entry)> = entries.iter().collect();
    order.sort_by_key(|(_, e)| e.filt.len());
    let mut b = Builder::new(poset.clone());
    for (name, e) in order {
        let faces = e
            .faces
            .iter()
            .map(|(f, w)| {
                let base = b.id(f).ok_or_else(|| Error::Invariant(format!("face `{f}` of `{name}` missing")))?;
                Ok(Nf { base, word: *w })
            })
            .collect::<Result<Vec<_>>>()?;
        b.add(name, e.filt.clone(), faces)?;
    }
    Ok(b.finish().0)
}

fn entries_of(x: &FSSet, rename: impl Fn(usize) -> String) -> BTreeMap<String, Entry> {
    (0..x.len())
        .map(|i| {
            let s = x.simplex(i);
            (rename(i), Entry { filt: s.filt.clone(), faces: s.faces.iter().map(|f| (rename(f.base), f.word)).collect() })
        })
        .collect()
}

/// Replays `pres` from `X` along `incl: X → Y` and compares with `Y`.
pub fn verify_presentation(x: &FSSet, y: &FSSet, incl: &FMap, pres: &AnodynePresentation) -> Verdict {
    if x.poset() != y.poset() {
        return Verdict::fail("source and target live over different posets".into());
    }
    if incl.images.len() != x.len() || !incl.is_injective_nd() || !validate_map(x, y, incl).is_clean() {
        return Verdict::fail("inclusion is not a monomorphism of filtered simplicial sets".into());
    }
    let poset = y.poset_arc();
    let mut entries = entries_of(x, |i| y.name(incl.images[i].base).to_string());
    for (si, stage) in pres.stages.iter().enumerate() {
        let current = match rebuild(&poset, &entries) {
            Ok(c) => c,
            Err(e) => return Verdict::fail(format!("stage {si}: {e}")),
        };
        let mut fresh: HashSet<&str> = HashSet::new();
        let mut added: Vec<(String, Entry)> = Vec::new();
        for (fi, fill) in stage.fills.iter().enumerate() {
            match replay_fill(&poset, &current, fill, &mut fresh) {
                Ok(new) => added.extend(new),
                Err(e) => return Verdict::fail(format!("stage {si}, fill {fi}: {e}")),
            }
        }
        entries.extend(added);
    }
    if let Err(e) = rebuild(&poset, &entries) {
        return Verdict::fail(format!("final object: {e}"));
    }
    let mut diagnostics = Vec::new();
    let target = entries_of(y, |i| y.name(i).to_string());
    for (name, e) in &target {
        match entries.get(name) {
            None => diagnostics.push(format!("`{name}` of the target is never created")),
            Some(got) if got.filt != e.filt || got.faces != e.faces => {
                diagnostics.push(format!("`{name}` is created with different faces or filtration"))
            }
            Some(_) => {}
        }
    }
    for name in entries.keys().filter(|n| !target.contains_key(*n)) {
        diagnostics.push(format!("`{name}` is not in the target"));
    }
    Verdict { ok: diagnostics.is_empty(), diagnostics }
}

fn replay_fill<'a>(
    poset: &Arc<Poset>,
    current: &FSSet,
    fill: &'a Fill,
    fresh: &mut HashSet<&'a str>,
) -> Result<Vec<(String, Entry)>> {
    let psi = poset.chain_from_names(&fill.horn_chain)?;
    let l = fill.horn_index;
    if !is_admissible(&psi, l)? {
        return Err(Error::Precondition(format!("horn Λ_{l} on {} is not admissible", poset.fmt_chain(&psi))));
    }
    let h = horn(poset.clone(), &psi, l)?;
    let keys: BTreeSet<&str> = (0..h.len()).map(|i| h.name(i)).collect();
    if fill.attach.keys().map(|s| s.as_str()).collect::<BTreeSet<_>>() != keys {
        return Err(Error::Precondition("attaching map is not defined on exactly the horn".into()));
    }
    let images = (0..h.len()).map(|i| current.resolve(&fill.attach[h.name(i)])).collect::<Result<Vec<_>>>()?;
    let attach = FMap { images };
    let report = validate_map(&h, current, &attach);
    if !report.is_clean() {
        return Err(Error::Precondition(format!("attaching map is not simplicial: {report}")));
    }
    let [top, face] = &fill.fill_keys;
    for key in [top, face] {
        if current.id(key).is_some() || !fresh.insert(key.as_str()) {
            return Err(Error::Precondition(format!("`{key}` is not a fresh key")));
        }
    }
    let n = psi.len() - 1;
    let image_of = |vs: &[usize]| -> (String, u32) {
        let y = attach.images[h.id(&subset_key(vs)).expect("face lies in the horn")];
        (current.name(y.base).to_string(), y.word)
    };
    let all: Vec<usize> = (0..=n).collect();
    let drop = |v: &[usize], i: usize| -> Vec<usize> { v.iter().copied().filter(|&t| t != v[i]).collect() };
    let top_faces = (0..=n).map(|i| if i == l { (face.clone(), 0) } else { image_of(&drop(&all, i)) }).collect();
    let missing = drop(&all, l);
    let face_faces = if n == 1 { Vec::new() } else { (0..n).map(|i| image_of(&drop(&missing, i))).collect() };
    let face_filt: Chain = missing.iter().map(|&v| psi[v]).collect();
    Ok(vec![
        (top.clone(), Entry { filt: psi.clone(), faces: top_faces }),
        (face.clone(), Entry { filt: face_filt, faces: face_faces }),
    ])
}

/// Horn of `d_l` recovered for a type-II σ: the unique index with
/// `d_l ρ(σ) = σ` as chains.
pub fn unique_face_indices(c: &Classification, sigma: usize) -> Vec<usize> {
    let Some(r) = c.rho[sigma] else { return Vec::new() };
    let chain = &c.sd.chains[r];
    (0..chain.len())
        .filter(|&l| {
            let mut d = chain.clone();
            d.remove(l);
            d == c.sd.chains[sigma]
        })
        .collect()
}

/// Mask of `Y` simplices coming from `X` under `incl`.
pub fn image_mask(y: &FSSet, incl: &FMap) -> Vec<bool> {
    let mut m = vec![false; y.len()];
    for img in &incl.images {
        m[img.base] = true;
    }
    m
}

/// Rank of each stage: number of fills per stage.
pub fn stage_sizes(p: &AnodynePresentation) -> Vec<usize> {
    p.stages.iter().map(|s| s.fills.len()).collect()
}

/// Labels keyed by simplex name.
pub fn labels_by_name(c: &Classification) -> BTreeMap<String, ClassLabel> {
    (0..c.labels.len()).map(|i| (c.sd.set.name(i).to_string(), c.labels[i])).collect()
}

/// Type II σ ↦ ρ(σ), by name.
pub fn rho_by_name(c: &Classification) -> BTreeMap<String, String> {
    c.rho
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (c.sd.set.name(i).to_string(), c.sd.set.name(r).to_string())))
        .collect()
}

/// Certificate plus the two objects it relates, for the horn case.
pub fn horn_objects(c: &Classification) -> Result<(FSSet, FSSet, FMap)> {
    let (x, incl) = crate::fsset::sub(&c.sd.set, &c.in_horn())?;
    Ok((x, c.sd.set.clone(), incl))
}
