//! The filtered subdivision sd_P and the last-vertex maps.
//!
//! A simplex of sd_P(Δ^φ) is a chain `[(σ_0, q_0), ..., (σ_n, q_n)]` of
//! faces `σ_0 ⊆ ... ⊆ σ_n` of Δ^N and colors `q_0 ≤ ... ≤ q_n`, all taken
//! from φ(σ_0). Subsets are bitmasks over the vertices of Δ^N.
//!
//! For a general X, every simplex of sd_P(X) is written uniquely as a
//! non-degenerate `x` of X together with a chain of sd_P(Δ^{φ(x)}) whose
//! last face is the whole simplex.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::fsset::{Builder, FMap, FSSet, Nf};
use crate::poset::{Chain, Poset};
use crate::simplex;
use crate::standard::{standard_simplex, subset_key};

/// `(face as vertex bitmask, color)`.
pub type Pair = (u32, usize);

pub fn mask_vertices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn vertices_mask(vs: &[usize]) -> u32 {
    vs.iter().fold(0, |m, &v| m | 1 << v)
}

fn colors(phi: &[usize], mask: u32) -> impl Iterator<Item = usize> + '_ {
    mask_vertices(mask).into_iter().map(move |v| phi[v])
}

pub fn fmt_pairs(poset: &Poset, pairs: &[Pair]) -> String {
    format!(
        "[{}]",
        pairs.iter().map(|&(m, q)| format!("({},{})", subset_key(&mask_vertices(m)), poset.name(q))).join(",")
    )
}

/// Last vertex of `sigma` whose color is `q`, if any.
pub fn last_vertex_color(phi: &[usize], sigma: u32, q: usize) -> Option<usize> {
    mask_vertices(sigma).into_iter().rev().find(|&v| phi[v] == q)
}

/// sd_P(Δ^φ) with its chains.
#[derive(Debug)]
pub struct SdSimplex {
    pub phi: Chain,
    pub set: FSSet,
    /// Chain of each non-degenerate simplex, indexed by id.
    pub chains: Vec<Vec<Pair>>,
    index: HashMap<Vec<Pair>, usize>,
}

impl SdSimplex {
    pub fn full(&self) -> u32 {
        (1u32 << self.phi.len()) - 1
    }

    pub fn chain_id(&self, pairs: &[Pair]) -> Option<usize> {
        self.index.get(pairs).copied()
    }

    /// Normal form of the simplex with the given (possibly repeating)
    /// vertex pairs.
    pub fn lookup(&self, pairs: &[Pair]) -> Option<Nf> {
        let mut nd: Vec<Pair> = Vec::with_capacity(pairs.len());
        let mut eta = Vec::with_capacity(pairs.len());
        for &p in pairs {
            if nd.last() != Some(&p) {
                nd.push(p);
            }
            eta.push(nd.len() - 1);
        }
        let base = self.chain_id(&nd)?;
        Some(Nf { base, word: simplex::repeat_mask(&eta) })
    }

    /// The pairs of an arbitrary simplex.
    pub fn nf_pairs(&self, y: Nf) -> Vec<Pair> {
        let c = &self.chains[y.base];
        simplex::surjection(y.word, c.len() - 1 + simplex::word_len(y.word)).into_iter().map(|i| c[i]).collect()
    }
}

/// Enumerates sd_P(Δ^φ) directly from the chain description.
pub fn sd_simplex(poset: Arc<Poset>, phi: &[usize]) -> Result<SdSimplex> {
    if phi.is_empty() || !poset.is_chain(phi) {
        return Err(Error::Precondition("φ must be a nonempty nondecreasing chain".into()));
    }
    if phi.len() > 16 {
        return Err(Error::Precondition("simplex too large to subdivide".into()));
    }
    let n = phi.len();
    let mut vertices: Vec<Pair> = Vec::new();
    for mask in 1u32..(1 << n) {
        let mut cs: Vec<usize> = colors(phi, mask).collect();
        cs.dedup();
        for q in cs {
            vertices.push((mask, q));
        }
    }
    let pair_key = |&(m, q): &Pair| (mask_vertices(m), poset.rank(q));
    vertices.sort_by_key(pair_key);
    let mut all: Vec<Vec<Pair>> = Vec::new();
    let mut cur: Vec<Pair> = Vec::new();
    for &v in &vertices {
        cur.push(v);
        extend(&poset, phi, &vertices, &mut cur, &mut all);
        cur.pop();
    }
    all.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| a.iter().map(pair_key).cmp(b.iter().map(pair_key)))
    });
    let mut b = Builder::new(poset.clone());
    let mut index: HashMap<Vec<Pair>, usize> = HashMap::with_capacity(all.len());
    for c in &all {
        let faces = if c.len() == 1 {
            Vec::new()
        } else {
            (0..c.len())
                .map(|i| {
                    let mut f = c.clone();
                    f.remove(i);
                    Nf::nd(index[&f])
                })
                .collect()
        };
        let filt: Chain = c.iter().map(|p| p.1).collect();
        let id = b.add(&fmt_pairs(&poset, c), filt, faces)?;
        index.insert(c.clone(), id);
    }
    let (set, remap) = b.finish();
    let mut chains = vec![Vec::new(); all.len()];
    for (old, c) in all.into_iter().enumerate() {
        chains[remap[old]] = c;
    }
    for v in index.values_mut() {
        *v = remap[*v];
    }
    Ok(SdSimplex { phi: phi.to_vec(), set, chains, index })
}

fn extend(poset: &Poset, phi: &[usize], vertices: &[Pair], cur: &mut Vec<Pair>, out: &mut Vec<Vec<Pair>>) {
    out.push(cur.clone());
    let (m, q) = *cur.last().unwrap();
    let base = cur[0].0;
    for &(m2, q2) in vertices {
        if (m2, q2) != (m, q)
            && m & m2 == m
            && poset.leq(q, q2)
            && colors(phi, base).any(|c| c == q2)
        {
            cur.push((m2, q2));
            extend(poset, phi, vertices, cur, out);
            cur.pop();
        }
    }
}

/// Memo of subdivided simplices keyed by filtration chain.
#[derive(Default)]
pub struct SdCache {
    map: Mutex<HashMap<Chain, Arc<SdSimplex>>>,
}

impl SdCache {
    pub fn new() -> SdCache {
        SdCache::default()
    }

    pub fn get(&self, poset: &Arc<Poset>, phi: &[usize]) -> Result<Arc<SdSimplex>> {
        if let Some(s) = self.map.lock().expect("cache lock").get(phi) {
            return Ok(s.clone());
        }
        let s = Arc::new(sd_simplex(poset.clone(), phi)?);
        self.map.lock().expect("cache lock").insert(phi.to_vec(), s.clone());
        Ok(s)
    }
}

/// sd_P(X) glued along the canonical factorization.
pub struct Sd {
    pub set: FSSet,
    /// `(x, chain id in sd_P(Δ^{φ(x)}))` for each non-degenerate simplex.
    pub keys: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    pub cache: Arc<SdCache>,
}

impl Sd {
    pub fn id_of(&self, x: usize, chain: usize) -> Option<usize> {
        self.index.get(&(x, chain)).copied()
    }

    /// Normal form of the simplex `(x, pairs)` where `pairs` is a possibly
    /// repeating chain of sd_P(Δ^{φ(x)}) ending at the whole simplex.
    pub fn lookup(&self, x: &FSSet, xid: usize, pairs: &[Pair]) -> Result<Nf> {
        let s = self.cache.get(&x.poset_arc(), x.filt(xid))?;
        let nf = s.lookup(pairs).ok_or_else(|| Error::Invariant("chain outside the subdivision".into()))?;
        let base = self.id_of(xid, nf.base).ok_or_else(|| Error::Invariant("chain is not interior".into()))?;
        Ok(Nf { base, word: nf.word })
    }
}

pub fn sd(x: &FSSet) -> Result<Sd> {
    sd_with_cache(x, Arc::new(SdCache::new()))
}

pub fn sd_with_cache(x: &FSSet, cache: Arc<SdCache>) -> Result<Sd> {
    let poset = x.poset_arc();
    let mut pieces: Vec<(usize, usize, usize)> = Vec::new();
    let mut simplices: Vec<Arc<SdSimplex>> = Vec::with_capacity(x.len());
    for xid in 0..x.len() {
        let s = cache.get(&poset, x.filt(xid))?;
        let full = s.full();
        for (cid, c) in s.chains.iter().enumerate() {
            if c.last().unwrap().0 == full {
                pieces.push((c.len() - 1, xid, cid));
            }
        }
        simplices.push(s);
    }
    pieces.sort();
    let mut b = Builder::new(poset.clone());
    let mut index: HashMap<(usize, usize), usize> = HashMap::with_capacity(pieces.len());
    for &(d, xid, cid) in &pieces {
        let s = &simplices[xid];
        let c = &s.chains[cid];
        let mut faces = Vec::with_capacity(if d == 0 { 0 } else { d + 1 });
        if d > 0 {
            for i in 0..=d {
                let mut f = c.clone();
                f.remove(i);
                faces.push(sd_face(x, &simplices, &cache, &index, xid, &f)?);
            }
        }
        let name = format!("{}@{}", x.name(xid), fmt_pairs(&poset, c));
        let id = b.add(&name, c.iter().map(|p| p.1).collect(), faces)?;
        index.insert((xid, cid), id);
    }
    let (set, remap) = b.finish();
    let mut keys = vec![(0, 0); pieces.len()];
    for v in index.iter_mut() {
        *v.1 = remap[*v.1];
        keys[*v.1] = *v.0;
    }
    Ok(Sd { set, keys, index, cache })
}

fn sd_face(
    x: &FSSet,
    simplices: &[Arc<SdSimplex>],
    cache: &SdCache,
    index: &HashMap<(usize, usize), usize>,
    xid: usize,
    pairs: &[Pair],
) -> Result<Nf> {
    let s = &simplices[xid];
    if pairs.last().unwrap().0 == s.full() {
        let cid = s.chain_id(pairs).ok_or_else(|| Error::Invariant("face chain missing".into()))?;
        return Ok(Nf::nd(index[&(xid, cid)]));
    }
    let (ybase, pushed) = push_to_face(x, xid, pairs);
    let target = cache.get(&x.poset_arc(), x.filt(ybase))?;
    let nf = target.lookup(&pushed).ok_or_else(|| Error::Invariant("pushed chain missing".into()))?;
    let base = *index
        .get(&(ybase, nf.base))
        .ok_or_else(|| Error::Invariant("face of subdivision not yet built".into()))?;
    Ok(Nf { base, word: nf.word })
}

// Rewrites a chain of sd_P(Δ^{φ(x)}) over the non-degenerate simplex
// carrying its last face.
fn push_to_face(x: &FSSet, xid: usize, pairs: &[Pair]) -> (usize, Vec<Pair>) {
    let tau = mask_vertices(pairs.last().unwrap().0);
    let y = x.restrict(xid, &tau);
    let eta = x.surjection_of(y);
    let pushed = pairs
        .iter()
        .map(|&(m, q)| {
            let img = mask_vertices(m).into_iter().map(|v| eta[tau.iter().position(|&t| t == v).unwrap()]);
            (img.fold(0u32, |acc, v| acc | 1 << v), q)
        })
        .collect();
    (y.base, pushed)
}

impl Sd {
    /// The simplex `(x, pairs)` of sd_P(X) for any chain of
    /// sd_P(Δ^{φ(x)}), possibly repeating and not reaching the top face.
    pub fn general(&self, x: &FSSet, xid: usize, pairs: &[Pair]) -> Result<Nf> {
        let (ybase, pushed) = push_to_face(x, xid, pairs);
        self.lookup(x, ybase, &pushed)
    }
}

/// The vertex map of l.v_P on a chain: last vertex of σ_i with color q_i.
pub fn last_vertex_tuple(phi: &[usize], pairs: &[Pair]) -> Vec<usize> {
    pairs.iter().map(|&(m, q)| last_vertex_color(phi, m, q).expect("color present on face")).collect()
}

/// l.v_P: sd_P(X) → X.
pub fn last_vertex_filtered(x: &FSSet, s: &Sd) -> FMap {
    let images = s
        .keys
        .iter()
        .map(|&(xid, cid)| {
            let sim = s.cache.get(&x.poset_arc(), x.filt(xid)).expect("cached");
            x.restrict(xid, &last_vertex_tuple(&sim.phi, &sim.chains[cid]))
        })
        .collect();
    FMap { images }
}

/// l.v_P: sd_P(Δ^φ) → Δ^φ on the directly enumerated subdivision, with the
/// standard simplex it lands in.
pub fn last_vertex_simplex(s: &SdSimplex) -> Result<(FSSet, FMap)> {
    let target = standard_simplex(s.set.poset_arc(), &s.phi)?;
    let images = s
        .chains
        .iter()
        .map(|c| {
            let (image, eta) = simplex::epi_mono(&last_vertex_tuple(&s.phi, c));
            Nf { base: target.id(&subset_key(&image)).expect("face"), word: simplex::repeat_mask(&eta) }
        })
        .collect();
    Ok((target, FMap { images }))
}

/// sd_P(f): sd_P(A) → sd_P(X).
pub fn sd_on_map(a: &FSSet, sda: &Sd, x: &FSSet, sdx: &Sd, f: &FMap) -> Result<FMap> {
    let mut images = Vec::with_capacity(sda.keys.len());
    for &(aid, cid) in &sda.keys {
        let sa = sda.cache.get(&a.poset_arc(), a.filt(aid))?;
        let img = f.images[aid];
        let eta = x.surjection_of(img);
        let pushed: Vec<Pair> = sa.chains[cid]
            .iter()
            .map(|&(m, q)| (mask_vertices(m).into_iter().fold(0u32, |acc, v| acc | 1 << eta[v]), q))
            .collect();
        images.push(sdx.lookup(x, img.base, &pushed)?);
    }
    Ok(FMap { images })
}

/// Image of a vertex map between standard simplices under sd_P, as a map
/// of directly enumerated subdivisions.
pub fn sd_simplex_map(src: &SdSimplex, dst: &SdSimplex, theta: &[usize]) -> Result<FMap> {
    let images = src
        .chains
        .iter()
        .map(|c| {
            let pushed: Vec<Pair> = c
                .iter()
                .map(|&(m, q)| (mask_vertices(m).into_iter().fold(0u32, |acc, v| acc | 1 << theta[v]), q))
                .collect();
            dst.lookup(&pushed).ok_or_else(|| Error::Invariant("vertex map does not respect filtrations".into()))
        })
        .collect::<Result<_>>()?;
    Ok(FMap { images })
}

/// The section N̄(ψ) → sd_P(Δ^ψ), `[q_0..q_n] ↦ [(Δ, q_0)..(Δ, q_n)]`,
/// given on the distinct colors of ψ.
pub fn section_chain(s: &SdSimplex, colors: &[usize]) -> Option<usize> {
    let full = s.full();
    s.chain_id(&colors.iter().map(|&q| (full, q)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsset::{validate, validate_map};
    use crate::standard::horn;

    fn p2() -> Arc<Poset> {
        Arc::new(Poset::chain(2))
    }

    #[test]
    fn subdivided_edge() {
        let s = sd_simplex(p2(), &[0, 1]).unwrap();
        assert_eq!(s.set.nd_counts(), vec![4, 3]);
        let names: Vec<&str> = s.set.ids_of_dim(0).map(|i| s.set.name(i)).collect();
        assert_eq!(names, vec!["[({0},p0)]", "[({0,1},p0)]", "[({0,1},p1)]", "[({1},p1)]"]);
        assert!(validate(&s.set).is_clean());
        assert_eq!(sd_simplex(p2(), &[0]).unwrap().set.nd_counts(), vec![1]);
        assert_eq!(sd_simplex(p2(), &[1, 1]).unwrap().set.nd_counts(), vec![3, 2]);
    }

    #[test]
    fn colored_last_vertex() {
        let phi = [0, 1];
        assert_eq!(last_vertex_color(&phi, 0b11, 0), Some(0));
        assert_eq!(last_vertex_color(&phi, 0b11, 1), Some(1));
        assert_eq!(last_vertex_color(&phi, 0b01, 1), None);
    }

    #[test]
    fn general_sd_matches_direct_on_a_simplex() {
        let p = p2();
        for phi in [vec![0, 1], vec![0, 0, 1], vec![0, 1, 1], vec![1, 1, 1]] {
            let x = standard_simplex(p.clone(), &phi).unwrap();
            let s = sd(&x).unwrap();
            let d = sd_simplex(p.clone(), &phi).unwrap();
            assert_eq!(s.set.nd_counts(), d.set.nd_counts());
            assert!(validate(&s.set).is_clean());
        }
    }

    #[test]
    fn horn_subdivision_and_last_vertex() {
        let p = p2();
        let phi = [0, 0, 1];
        let h = horn(p.clone(), &phi, 1).unwrap();
        let s = sd(&h).unwrap();
        assert!(validate(&s.set).is_clean());
        let lv = last_vertex_filtered(&h, &s);
        assert!(validate_map(&s.set, &h, &lv).is_clean());
        let two = standard_simplex(p, &[0, 1]).unwrap();
        let bd = crate::standard::boundary(two.poset_arc(), &[0, 1]).unwrap();
        assert_eq!(sd(&bd).unwrap().set.nd_counts(), vec![2]);
    }

    #[test]
    fn last_vertex_on_the_edge() {
        let s = sd_simplex(p2(), &[0, 1]).unwrap();
        let (t, lv) = last_vertex_simplex(&s).unwrap();
        assert!(validate_map(&s.set, &t, &lv).is_clean());
        let mid = s.chain_id(&[(0b11, 0), (0b11, 1)]).unwrap();
        assert_eq!(t.fmt_nf(lv.images[mid]), "{0,1}");
        let left = s.chain_id(&[(0b01, 0), (0b11, 0)]).unwrap();
        assert_eq!(t.fmt_nf(lv.images[left]), "s0({0})");
    }
}
