//! The right adjoint Ex_P of sd_P, truncated by dimension.
//!
//! A cell of shape φ is a filtered map sd_P(Δ^φ) → X, stored as its table
//! of images on the non-degenerate chains of [`SdSimplex`]. Simplicial
//! operators act by precomposition with sd_P of the coface or codegeneracy.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsset::{Builder, FMap, FSSet, Nf};
use crate::hom::enum_fmaps;
use crate::io::NfRef;
use crate::poset::{Chain, Poset};
use crate::simplex::{self, Mono};
use crate::subdivision::{last_vertex_tuple, sd_simplex_map, Sd, SdCache, SdSimplex};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExCell {
    pub shape: Chain,
    /// Image of each non-degenerate chain of sd_P(Δ^shape).
    pub images: Vec<Nf>,
}

impl ExCell {
    pub fn dim(&self) -> usize {
        self.shape.len() - 1
    }
}

/// Serialized cell: the shape and the image of every chain, by key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExCellJson {
    pub shape: Vec<String>,
    pub images: std::collections::BTreeMap<String, NfRef>,
}

/// Subdivided simplices and the maps sd_P(θ) between them, memoized.
#[derive(Default)]
pub struct Shapes {
    pub sd: Arc<SdCache>,
    maps: Mutex<HashMap<(Chain, Mono), Arc<FMap>>>,
}

impl Shapes {
    pub fn new() -> Shapes {
        Shapes::default()
    }

    pub fn with_cache(sd: Arc<SdCache>) -> Shapes {
        Shapes { sd, maps: Mutex::default() }
    }

    pub fn simplex(&self, poset: &Arc<Poset>, phi: &[usize]) -> Result<Arc<SdSimplex>> {
        self.sd.get(poset, phi)
    }

    /// sd_P(θ): sd_P(Δ^{φ∘θ}) → sd_P(Δ^φ).
    pub fn map(&self, poset: &Arc<Poset>, phi: &[usize], theta: &[usize]) -> Result<Arc<FMap>> {
        let key = (phi.to_vec(), theta.to_vec());
        if let Some(m) = self.maps.lock().expect("shape lock").get(&key) {
            return Ok(m.clone());
        }
        let src_phi: Chain = theta.iter().map(|&t| phi[t]).collect();
        let src = self.simplex(poset, &src_phi)?;
        let dst = self.simplex(poset, phi)?;
        let m = Arc::new(sd_simplex_map(&src, &dst, theta)?);
        self.maps.lock().expect("shape lock").insert(key, m.clone());
        Ok(m)
    }

    /// `c ∘ sd_P(θ)`.
    pub fn precompose(&self, x: &FSSet, c: &ExCell, theta: &[usize]) -> Result<ExCell> {
        let poset = x.poset_arc();
        let m = self.map(&poset, &c.shape, theta)?;
        let dst = self.simplex(&poset, &c.shape)?;
        let cmap = FMap { images: c.images.clone() };
        Ok(ExCell {
            shape: theta.iter().map(|&t| c.shape[t]).collect(),
            images: m.images.iter().map(|&y| cmap.apply(&dst.set, y)).collect(),
        })
    }

    pub fn face(&self, x: &FSSet, c: &ExCell, i: usize) -> Result<ExCell> {
        self.precompose(x, c, &simplex::coface(i, c.dim()))
    }

    pub fn degeneracy(&self, x: &FSSet, c: &ExCell, j: usize) -> Result<ExCell> {
        self.precompose(x, c, &simplex::codegeneracy(j, c.dim()))
    }

    /// Eilenberg–Zilber decomposition `c = η^*(c')` with `c'`
    /// non-degenerate.
    pub fn normal_form(&self, x: &FSSet, c: &ExCell) -> Result<(ExCell, Mono)> {
        let n = c.dim();
        for j in 0..n {
            if c.shape[j] != c.shape[j + 1] {
                continue;
            }
            let d = self.face(x, c, j)?;
            if self.degeneracy(x, &d, j)? == *c {
                let (base, eta) = self.normal_form(x, &d)?;
                return Ok((base, simplex::compose(&eta, &simplex::codegeneracy(j, n - 1))));
            }
        }
        Ok((c.clone(), simplex::identity(n)))
    }
}

/// Ex_P(X) in dimensions `≤ cap`.
pub struct Ex {
    pub set: FSSet,
    pub cells: Vec<ExCell>,
    index: HashMap<ExCell, usize>,
    pub cap: usize,
    pub shapes: Arc<Shapes>,
}

impl Ex {
    pub fn id_of(&self, c: &ExCell) -> Option<usize> {
        self.index.get(c).copied()
    }

    /// Normal form in `set` of an arbitrary cell over `x`.
    pub fn resolve(&self, x: &FSSet, c: &ExCell) -> Result<Nf> {
        if c.dim() > self.cap {
            return Err(Error::Precondition(format!("cell of dimension {} above the cap {}", c.dim(), self.cap)));
        }
        let (base, eta) = self.shapes.normal_form(x, c)?;
        let id = self.id_of(&base).ok_or_else(|| Error::Invariant("non-degenerate cell missing from Ex".into()))?;
        Ok(Nf { base: id, word: simplex::repeat_mask(&eta) })
    }

    /// The cell of an arbitrary simplex of `set`.
    pub fn cell(&self, x: &FSSet, y: Nf) -> Result<ExCell> {
        let c = &self.cells[y.base];
        if y.word == 0 {
            return Ok(c.clone());
        }
        self.shapes.precompose(x, c, &self.set.surjection_of(y))
    }

    pub fn cell_json(&self, x: &FSSet, id: usize) -> Result<ExCellJson> {
        let c = &self.cells[id];
        let s = self.shapes.simplex(&x.poset_arc(), &c.shape)?;
        Ok(ExCellJson {
            shape: x.poset().chain_names(&c.shape),
            images: (0..s.set.len()).map(|i| (s.set.name(i).to_string(), x.nf_ref(c.images[i]))).collect(),
        })
    }
}

pub fn ex(x: &FSSet, cap: usize, budget: usize) -> Result<Ex> {
    ex_with(x, cap, budget, Arc::new(Shapes::new()))
}

pub fn ex_with(x: &FSSet, cap: usize, budget: usize, shapes: Arc<Shapes>) -> Result<Ex> {
    let poset = x.poset_arc();
    let mut b = Builder::new(poset.clone());
    let mut cells: Vec<ExCell> = Vec::new();
    let mut index: HashMap<ExCell, usize> = HashMap::new();
    for n in 0..=cap {
        for phi in poset.nerve_simplices(n) {
            let s = shapes.simplex(&poset, &phi)?;
            let maps = enum_fmaps(&s.set, x, budget)?;
            let mut ordinal = 0;
            for f in maps {
                let c = ExCell { shape: phi.clone(), images: f.images };
                let degenerate = (0..n).filter(|&j| phi[j] == phi[j + 1]).try_fold(false, |acc, j| {
                    if acc {
                        return Ok::<bool, Error>(true);
                    }
                    let d = shapes.face(x, &c, j)?;
                    Ok(shapes.degeneracy(x, &d, j)? == c)
                })?;
                if degenerate {
                    continue;
                }
                let faces = if n == 0 {
                    Vec::new()
                } else {
                    (0..=n)
                        .map(|i| {
                            let (base, eta) = shapes.normal_form(x, &shapes.face(x, &c, i)?)?;
                            let id = *index.get(&base).ok_or_else(|| Error::Invariant("face cell missing".into()))?;
                            Ok(Nf { base: id, word: simplex::repeat_mask(&eta) })
                        })
                        .collect::<Result<Vec<_>>>()?
                };
                let name = format!("{}#{}", poset.fmt_chain(&phi), ordinal);
                ordinal += 1;
                let id = b.add(&name, phi.clone(), faces)?;
                index.insert(c.clone(), id);
                cells.push(c);
                if cells.len() > budget {
                    return Err(Error::Budget { limit: budget, context: format!("building Ex cells up to dimension {n}") });
                }
            }
        }
    }
    // cells are added in dimension order, so the builder does not renumber
    let (set, remap) = b.finish();
    debug_assert!(remap.iter().enumerate().all(|(i, &r)| i == r));
    Ok(Ex { set, cells, index, cap, shapes })
}

/// β: X → Ex_P(X), `x ↦ x ∘ l.v_P`.
pub fn beta(x: &FSSet, e: &Ex) -> Result<FMap> {
    let poset = x.poset_arc();
    let images = (0..x.len())
        .map(|id| {
            let s = e.shapes.simplex(&poset, x.filt(id))?;
            let c = ExCell {
                shape: x.filt(id).to_vec(),
                images: s.chains.iter().map(|ch| x.restrict(id, &last_vertex_tuple(&s.phi, ch))).collect(),
            };
            e.resolve(x, &c)
        })
        .collect::<Result<_>>()?;
    Ok(FMap { images })
}

/// `g: sd_P(A) → X` to its adjoint `A → Ex_P(X)`.
pub fn transpose(a: &FSSet, sda: &Sd, x: &FSSet, e: &Ex, g: &FMap) -> Result<FMap> {
    if a.top_dim().is_some_and(|t| t > e.cap) {
        return Err(Error::Precondition(format!("Ex cap {} is below dim A", e.cap)));
    }
    let poset = a.poset_arc();
    let images = (0..a.len())
        .map(|aid| {
            let s = e.shapes.simplex(&poset, a.filt(aid))?;
            let images = s
                .chains
                .iter()
                .map(|ch| Ok(g.apply(&sda.set, sda.general(a, aid, ch)?)))
                .collect::<Result<Vec<_>>>()?;
            e.resolve(x, &ExCell { shape: a.filt(aid).to_vec(), images })
        })
        .collect::<Result<_>>()?;
    Ok(FMap { images })
}

/// `f: A → Ex_P(X)` to its adjoint `sd_P(A) → X`.
pub fn transpose_back(a: &FSSet, sda: &Sd, x: &FSSet, e: &Ex, f: &FMap) -> Result<FMap> {
    let mut cells: HashMap<usize, ExCell> = HashMap::new();
    let mut images = Vec::with_capacity(sda.keys.len());
    for &(aid, cid) in &sda.keys {
        if let std::collections::hash_map::Entry::Vacant(v) = cells.entry(aid) {
            v.insert(e.cell(x, f.images[aid])?);
        }
        images.push(cells[&aid].images[cid]);
    }
    let _ = a;
    Ok(FMap { images })
}

/// Ex_P(f): Ex_P(X) → Ex_P(Y), postcomposition.
pub fn ex_on_map(x: &FSSet, ex_x: &Ex, y: &FSSet, ex_y: &Ex, f: &FMap) -> Result<FMap> {
    let images = ex_x
        .cells
        .iter()
        .map(|c| {
            let pushed = ExCell { shape: c.shape.clone(), images: c.images.iter().map(|&i| f.apply(x, i)).collect() };
            ex_y.resolve(y, &pushed)
        })
        .collect::<Result<_>>()?;
    Ok(FMap { images })
}

/// `X → Ex_P(X) → ... → Ex_P^k(X)`, each stage truncated at `cap`.
pub struct ExTower {
    pub stages: Vec<FSSet>,
    pub units: Vec<FMap>,
    pub exs: Vec<Ex>,
    pub cap: usize,
}

pub fn ex_iter(x: &FSSet, k: usize, cap: usize, budget: usize) -> Result<ExTower> {
    let shapes = Arc::new(Shapes::new());
    let mut stages = vec![x.clone()];
    let mut units = Vec::new();
    let mut exs = Vec::new();
    for i in 0..k {
        let cur = stages.last().unwrap();
        let e = ex_with(cur, cap, budget, shapes.clone()).map_err(|err| match err {
            Error::Budget { limit, context } => {
                Error::Budget { limit, context: format!("{context} (completed {i} of {k} stages)") }
            }
            other => other,
        })?;
        units.push(beta(cur, &e)?);
        stages.push(e.set.clone());
        exs.push(e);
    }
    Ok(ExTower { stages, units, exs, cap })
}


/// The lift of an admissible horn into Ex_P^3, in adjoint form: for every
/// non-degenerate σ of sd_P^2(Δ^φ) the map `h(σ): sd_P(Δ^ψ) → sd_P(Λ_k^φ)`
/// and the cell `g(σ) = λ♭ ∘ h(σ)` of Ex_P(X).
pub struct HornFill {
    pub phi: Chain,
    pub k: usize,
    pub sd1: Arc<SdSimplex>,
    pub sd2: Sd,
    /// `f_σ` on the vertices of Δ^ψ.
    pub vertex_maps: Vec<Vec<usize>>,
    pub h: Vec<FMap>,
    pub cells: Vec<ExCell>,
}

/// Outcome of [`check_horn_fill`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HornFillCheck {
    pub h_valid: bool,
    pub h_in_horn: bool,
    pub cells_valid: bool,
    pub simplicial: bool,
    pub restricts_to_lambda: bool,
}

impl HornFillCheck {
    pub fn all(&self) -> bool {
        self.h_valid && self.h_in_horn && self.cells_valid && self.simplicial && self.restricts_to_lambda
    }
}

// λ♭ on a chain of sd_P(Δ^φ) whose last face lies in the horn.
fn lambda_flat(
    x: &FSSet,
    horn_obj: &FSSet,
    e: &Ex,
    lambda: &FMap,
    phi: &[usize],
    pairs: &[crate::subdivision::Pair],
) -> Result<Nf> {
    use crate::subdivision::mask_vertices;
    let tau = mask_vertices(pairs.last().unwrap().0);
    let hid = horn_obj
        .id(&crate::standard::subset_key(&tau))
        .ok_or_else(|| Error::Invariant("chain leaves the horn".into()))?;
    let cell = e.cell(x, lambda.images[hid])?;
    let sub_phi: Chain = tau.iter().map(|&v| phi[v]).collect();
    let s = e.shapes.simplex(&x.poset_arc(), &sub_phi)?;
    let reindexed: Vec<_> = pairs
        .iter()
        .map(|&(m, q)| {
            let local = mask_vertices(m).into_iter().map(|v| tau.iter().position(|&t| t == v).unwrap());
            (local.fold(0u32, |acc, v| acc | 1 << v), q)
        })
        .collect();
    let nf = s.lookup(&reindexed).ok_or_else(|| Error::Invariant("chain missing after reindexing".into()))?;
    Ok(x.apply(cell.images[nf.base], &simplex::surjection(nf.word, pairs.len() - 1)))
}

/// `f_σ`: for each vertex `(σ_l, q_l)` of σ, a vertex of Δ^φ of color `q_l`.
pub fn f_sigma(poset: &Poset, phi: &[usize], k: usize, vertices: &[(Vec<crate::subdivision::Pair>, usize)]) -> Vec<usize> {
    use crate::subdivision::last_vertex_color;
    let p = phi[k];
    let n = phi.len();
    let dk = ((1u32 << n) - 1) & !(1 << k);
    vertices
        .iter()
        .map(|(chain, q)| {
            let q = *q;
            let last_color = |c: usize| chain.iter().rev().find(|pr| pr.1 == c).copied();
            let lv_wide = chain.last().unwrap().0 & dk == dk;
            let has_p = last_color(p).is_some();
            if poset.lt(q, p) || !has_p || !lv_wide {
                let (tau, _) = last_color(q).expect("color of the vertex occurs in its chain");
                last_vertex_color(phi, tau, q).expect("color present")
            } else if poset.lt(p, q) {
                let (tau, _) = last_color(p).unwrap();
                last_vertex_color(phi, tau, q).expect("color present")
            } else {
                k
            }
        })
        .collect()
}

/// Vertices `(σ_l, q_l)` of a non-degenerate simplex of sd_P^2(Δ^φ), each
/// `σ_l` written as a chain of sd_P(Δ^φ).
fn sd2_vertices(sd1: &SdSimplex, sd2: &Sd, shapes: &Shapes, id: usize) -> Result<Vec<(Vec<crate::subdivision::Pair>, usize)>> {
    let (xid, cid) = sd2.keys[id];
    let inner = shapes.simplex(&sd1.set.poset_arc(), sd1.set.filt(xid))?;
    let outer = &sd1.chains[xid];
    Ok(inner.chains[cid]
        .iter()
        .map(|&(m, q)| {
            let sub: Vec<_> = crate::subdivision::mask_vertices(m).into_iter().map(|i| outer[i]).collect();
            (sub, q)
        })
        .collect())
}

pub fn ex3_horn_fill(x: &FSSet, horn_obj: &FSSet, e: &Ex, lambda: &FMap, phi: &[usize], k: usize) -> Result<HornFill> {
    if !crate::standard::is_admissible(phi, k)? {
        return Err(Error::Precondition(format!("horn Λ_{k} is not admissible")));
    }
    let poset = x.poset_arc();
    let shapes = &e.shapes;
    let sd1 = shapes.simplex(&poset, phi)?;
    let sd2 = crate::subdivision::sd_with_cache(&sd1.set, shapes.sd.clone())?;
    let mut flat_cache: HashMap<usize, Nf> = HashMap::new();
    let mut vertex_maps = Vec::with_capacity(sd2.set.len());
    let mut hs = Vec::with_capacity(sd2.set.len());
    let mut cells = Vec::with_capacity(sd2.set.len());
    for id in 0..sd2.set.len() {
        let verts = sd2_vertices(&sd1, &sd2, shapes, id)?;
        let f = f_sigma(&poset, phi, k, &verts);
        let psi = sd2.set.filt(id).to_vec();
        let s = shapes.simplex(&poset, &psi)?;
        let mut images = Vec::with_capacity(s.chains.len());
        let mut cell_images = Vec::with_capacity(s.chains.len());
        for ch in &s.chains {
            let pushed: Vec<_> = ch
                .iter()
                .map(|&(m, q)| (crate::subdivision::mask_vertices(m).into_iter().fold(0u32, |acc, d| acc | 1 << f[d]), q))
                .collect();
            let y = sd1.lookup(&pushed).ok_or_else(|| Error::Invariant("h(σ) leaves sd_P(Δ^φ)".into()))?;
            let flat = match flat_cache.get(&y.base) {
                Some(&v) => v,
                None => {
                    let v = lambda_flat(x, horn_obj, e, lambda, phi, &sd1.chains[y.base])?;
                    flat_cache.insert(y.base, v);
                    v
                }
            };
            cell_images.push(x.apply(flat, &simplex::surjection(y.word, ch.len() - 1)));
            images.push(y);
        }
        vertex_maps.push(f);
        hs.push(FMap { images });
        cells.push(ExCell { shape: psi, images: cell_images });
    }
    Ok(HornFill { phi: phi.to_vec(), k, sd1, sd2, vertex_maps, h: hs, cells })
}

/// Checks the fill against λ: validity of every h(σ) and g(σ), that σ ↦
/// g(σ) commutes with faces, and that on sd_P^2(Λ_k^φ) it agrees with
/// `λ♭ ∘ sd_P(l.v_P^2)`.
pub fn check_horn_fill(x: &FSSet, horn_obj: &FSSet, e: &Ex, lambda: &FMap, fill: &HornFill) -> Result<HornFillCheck> {
    use crate::fsset::validate_map;
    use crate::subdivision::{last_vertex_color, mask_vertices};
    let poset = x.poset_arc();
    let shapes = &e.shapes;
    let n = fill.phi.len() - 1;
    let mut out = HornFillCheck { h_valid: true, h_in_horn: true, cells_valid: true, simplicial: true, restricts_to_lambda: true };
    let sd2 = &fill.sd2.set;
    for id in 0..sd2.len() {
        let s = shapes.simplex(&poset, sd2.filt(id))?;
        out.h_valid &= validate_map(&s.set, &fill.sd1.set, &fill.h[id]).is_clean();
        out.h_in_horn &= fill.h[id].images.iter().all(|y| {
            let top = mask_vertices(fill.sd1.chains[y.base].last().unwrap().0);
            crate::standard::in_horn(&top, n, fill.k)
        });
        let cell = &fill.cells[id];
        out.cells_valid &= validate_map(&s.set, x, &FMap { images: cell.images.clone() }).is_clean();
        for i in 0..sd2.simplex(id).faces.len() {
            let fy = sd2.face(id, i);
            let base = &fill.cells[fy.base];
            let lhs = if fy.word == 0 { base.clone() } else { shapes.precompose(x, base, &sd2.surjection_of(fy))? };
            out.simplicial &= lhs == shapes.face(x, cell, i)?;
        }
        let (xid, _) = fill.sd2.keys[id];
        let top = mask_vertices(fill.sd1.chains[xid].last().unwrap().0);
        if crate::standard::in_horn(&top, n, fill.k) {
            let verts = sd2_vertices(&fill.sd1, &fill.sd2, shapes, id)?;
            let theta: Vec<usize> = verts
                .iter()
                .map(|(chain, q)| {
                    let (tau, _) = *chain.iter().rev().find(|pr| pr.1 == *q).unwrap();
                    last_vertex_color(&fill.phi, tau, *q).unwrap()
                })
                .collect();
            let sdg = sd_simplex_map(&s, &fill.sd1, &theta)?;
            let expect = sdg
                .images
                .iter()
                .map(|y| {
                    let flat = lambda_flat(x, horn_obj, e, lambda, &fill.phi, &fill.sd1.chains[y.base])?;
                    Ok(x.apply(flat, &simplex::surjection(y.word, fill.sd1.set.nf_dim(*y))))
                })
                .collect::<Result<Vec<_>>>()?;
            out.restricts_to_lambda &= expect == cell.images;
        }
    }
    Ok(out)
}
