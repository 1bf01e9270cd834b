//! Mapping spaces and the homotopy invariants built on them.
//!
//! `Map(A, X)_n = Hom(Δⁿ ⊗ A, X)`, with simplicial operators acting by
//! precomposition. The non-degenerate part is stored as a simplicial set
//! over the one-point poset.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsset::{Builder, FMap, FSSet, Nf, UnionFind, VertexIndex};
use crate::hom::enum_fmaps;
use crate::poset::{Chain, Poset};
use crate::product::{tensor_factors, PairIndex};
use crate::simplex;
use crate::snf::{self, Group, Mat};
use crate::standard::{nerve, parse_subset_key, standard_simplex, subset_key};

/// Δⁿ ⊗ A with its factor data.
struct Prism {
    simplex: FSSet,
    vindex: VertexIndex,
    set: FSSet,
    factors: Vec<(Nf, Nf)>,
    pairs: PairIndex,
}

fn prism(a: &FSSet, n: usize) -> Result<Prism> {
    let point = Arc::new(Poset::point());
    let simplex = standard_simplex(point, &vec![0; n + 1])?;
    let vindex = VertexIndex::new(&simplex).expect("standard simplex");
    let (set, factors) = tensor_factors(&simplex, a)?;
    let pairs = PairIndex::new(&factors);
    Ok(Prism { simplex, vindex, set, factors, pairs })
}

/// Map between standard simplices (keys are vertex subsets) induced by a
/// monotone vertex map.
fn key_map(src: &FSSet, dst: &FSSet, dst_index: &VertexIndex, f: impl Fn(usize) -> usize) -> Result<FMap> {
    let vid = |j: usize| dst.id(&subset_key(&[j])).ok_or_else(|| Error::Invariant(format!("vertex {j} missing")));
    let images = (0..src.len())
        .map(|i| {
            let key = parse_subset_key(src.name(i)).ok_or_else(|| Error::Invariant("not a standard simplex".into()))?;
            let tuple: Vec<usize> = key.into_iter().map(|v| vid(f(v))).collect::<Result<_>>()?;
            dst_index.lookup(&tuple).ok_or_else(|| Error::Invariant("image is not a simplex".into()))
        })
        .collect::<Result<_>>()?;
    Ok(FMap { images })
}

/// `θ ⊗ A: Δᵐ ⊗ A → Δⁿ ⊗ A` for a monotone `θ: [m] → [n]`.
fn prism_operator(src: &Prism, dst: &Prism, theta: &[usize]) -> Result<FMap> {
    let t = key_map(&src.simplex, &dst.simplex, &dst.vindex, |v| theta[v])?;
    let images = src
        .factors
        .iter()
        .map(|&(u, a)| {
            let u2 = t.apply(&src.simplex, u);
            dst.pairs.lookup(&dst.simplex, u2, a).ok_or_else(|| Error::Invariant("prism operator".into()))
        })
        .collect::<Result<_>>()?;
    Ok(FMap { images })
}

/// `Δⁿ ⊗ j: Δⁿ ⊗ B → Δⁿ ⊗ A`.
fn prism_along(src: &Prism, b: &FSSet, dst: &Prism, j: &FMap) -> Result<FMap> {
    let images = src
        .factors
        .iter()
        .map(|&(u, x)| {
            let y = j.apply(b, x);
            dst.pairs.lookup(&dst.simplex, u, y).ok_or_else(|| Error::Invariant("prism restriction".into()))
        })
        .collect::<Result<_>>()?;
    Ok(FMap { images })
}

pub struct MappingSpace {
    pub cap: usize,
    /// `Hom(Δⁿ ⊗ A, X)` for `n ≤ cap`, in enumeration order.
    pub levels: Vec<Vec<FMap>>,
    /// Non-degenerate simplices, named `n.i` after their level position.
    pub set: FSSet,
    /// Every level element as a simplex of `set`.
    pub nf: Vec<Vec<Nf>>,
    lookup: Vec<HashMap<FMap, usize>>,
    prisms: Vec<Prism>,
}

impl MappingSpace {
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    /// Position of `f` in level `n`.
    pub fn locate(&self, n: usize, f: &FMap) -> Option<usize> {
        self.lookup.get(n)?.get(f).copied()
    }

    /// Domain `Δⁿ ⊗ A` of level `n`.
    pub fn prism(&self, n: usize) -> &FSSet {
        &self.prisms[n].set
    }

    /// The level-0 element behind a vertex of `set`.
    pub fn vertex_map(&self, v: usize) -> &FMap {
        let i = self.nf[0].iter().position(|y| y.base == v).expect("vertex");
        &self.levels[0][i]
    }
}

/// `Map(A, X)` through level `cap`; `budget` bounds each Hom enumeration.
pub fn map_space(a: &FSSet, x: &FSSet, cap: usize, budget: usize) -> Result<MappingSpace> {
    if a.poset() != x.poset() {
        return Err(Error::Precondition("mapping space between objects over different posets".into()));
    }
    let prisms: Vec<Prism> = (0..=cap).map(|n| prism(a, n)).collect::<Result<_>>()?;
    let mut levels = Vec::with_capacity(cap + 1);
    let mut lookup = Vec::with_capacity(cap + 1);
    for p in &prisms {
        let l = enum_fmaps(&p.set, x, budget)?;
        lookup.push(l.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect::<HashMap<_, _>>());
        levels.push(l);
    }
    let point = Arc::new(Poset::point());
    let mut b = Builder::new(point);
    let mut nf: Vec<Vec<Nf>> = Vec::with_capacity(cap + 1);
    for n in 0..=cap {
        let p = &prisms[n];
        let mut faces_ops = Vec::new();
        let mut degen_ops = Vec::new();
        if n > 0 {
            for i in 0..=n {
                faces_ops.push(prism_operator(&prisms[n - 1], p, &simplex::coface(i, n))?);
            }
            for j in 0..n {
                degen_ops.push(prism_operator(p, &prisms[n - 1], &simplex::codegeneracy(j, n - 1))?);
            }
        }
        let mut row = Vec::with_capacity(levels[n].len());
        for (k, f) in levels[n].iter().enumerate() {
            let mut found = None;
            for j in 0..n {
                let face = faces_ops[j].then(&prisms[n - 1].set, &p.set, f);
                let back = degen_ops[j].then(&p.set, &prisms[n - 1].set, &face);
                if back == *f {
                    let g = lookup[n - 1].get(&face).ok_or_else(|| Error::Invariant("face outside the level".into()))?;
                    found = Some((j, *g));
                    break;
                }
            }
            let y = match found {
                Some((j, g)) => degenerate(&b, nf[n - 1][g], j),
                None => {
                    let faces = (0..faces_ops.len())
                        .map(|i| {
                            let face = faces_ops[i].then(&prisms[n - 1].set, &p.set, f);
                            let g = lookup[n - 1].get(&face).ok_or_else(|| Error::Invariant("face outside the level".into()))?;
                            Ok(nf[n - 1][*g])
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Nf::nd(b.add(&format!("{n}.{k}"), vec![0; n + 1], faces)?)
                }
            };
            row.push(y);
        }
        nf.push(row);
    }
    let (set, remap) = b.finish();
    for row in &mut nf {
        for y in row.iter_mut() {
            y.base = remap[y.base];
        }
    }
    Ok(MappingSpace { cap, levels, set, nf, lookup, prisms })
}

fn degenerate(b: &Builder, y: Nf, j: usize) -> Nf {
    let d = b.dim(y.base) + simplex::word_len(y.word);
    let eta = simplex::compose(&simplex::surjection(y.word, d), &simplex::codegeneracy(j, d));
    Nf { base: y.base, word: simplex::repeat_mask(&eta) }
}

/// The simplicial map `Map(A, X) → Map(B, X)` induced by `j: B → A`.
pub fn restriction(from: &MappingSpace, to: &MappingSpace, b: &FSSet, j: &FMap) -> Result<FMap> {
    let cap = from.cap.min(to.cap);
    let mut images = vec![Nf::nd(0); from.set.len()];
    for n in 0..=cap {
        let along = prism_along(&to.prisms[n], b, &from.prisms[n], j)?;
        for (k, f) in from.levels[n].iter().enumerate() {
            let y = from.nf[n][k];
            if y.word != 0 {
                continue;
            }
            let g = along.then(&to.prisms[n].set, &from.prisms[n].set, f);
            let i = to.locate(n, &g).ok_or_else(|| Error::Invariant("restricted map not found".into()))?;
            images[y.base] = to.nf[n][i];
        }
    }
    if !from.set.ids_of_dim(cap + 1).is_empty() {
        return Err(Error::Invariant("mapping space above its cap".into()));
    }
    Ok(FMap { images })
}

/// Inclusion `Δ^ψ → Δ^φ` of the face at the given vertex positions.
pub fn face_inclusion(poset: &Arc<Poset>, phi: &[usize], positions: &[usize]) -> Result<(FSSet, FSSet, FMap)> {
    let psi: Chain = positions.iter().map(|&i| phi[i]).collect();
    let a = standard_simplex(poset.clone(), &psi)?;
    let x = standard_simplex(poset.clone(), phi)?;
    let idx = VertexIndex::new(&x).expect("standard simplex");
    let j = key_map(&a, &x, &idx, |v| positions[v])?;
    Ok((a, x, j))
}

fn positions_in(psi: &[usize], phi: &[usize]) -> Vec<usize> {
    psi.iter().map(|p| phi.iter().position(|q| q == p).expect("sub-chain")).collect()
}

/// Classes of `Hom(A, X)` under the relation generated by elementary
/// homotopies `Δ¹ ⊗ A → X`, found by direct enumeration. Classes are
/// lists of indices into the returned Hom list.
pub fn homotopy_classes(a: &FSSet, x: &FSSet, budget: usize) -> Result<(Vec<FMap>, Vec<Vec<usize>>)> {
    let homs = enum_fmaps(a, x, budget)?;
    let idx: HashMap<&FMap, usize> = homs.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let p0 = prism(a, 0)?;
    let p1 = prism(a, 1)?;
    // Δ⁰ ⊗ A ≅ A.
    let iso: Vec<Nf> = (0..a.len())
        .map(|i| p0.pairs.lookup(&p0.simplex, Nf { base: 0, word: simplex_word(a.dim(i)) }, Nf::nd(i)).expect("iso"))
        .collect();
    let iso = FMap { images: iso };
    let ends: Vec<FMap> = (0..2)
        .map(|e| Ok(iso.then(a, &p0.set, &prism_operator(&p0, &p1, &[e])?)))
        .collect::<Result<_>>()?;
    let mut uf = UnionFind::new(homs.len());
    for h in enum_fmaps(&p1.set, x, budget)? {
        let f = ends[0].then(a, &p1.set, &h);
        let g = ends[1].then(a, &p1.set, &h);
        let (Some(&i), Some(&j)) = (idx.get(&f), idx.get(&g)) else {
            return Err(Error::Invariant("homotopy end is not a map".into()));
        };
        uf.union(i, j);
    }
    let (labels, count) = uf.labels();
    let mut classes = vec![Vec::new(); count];
    for (i, l) in labels.into_iter().enumerate() {
        classes[l].push(i);
    }
    Ok((homs, classes))
}

/// Degeneracy word of the vertex repeated `d + 1` times.
fn simplex_word(d: usize) -> u32 {
    (0..d).fold(0, |w, i| w | 1 << i)
}

/// Mapping spaces `Map(Δ^φ, X)` over the objects of R(P), with the
/// restrictions along face inclusions.
pub struct DiagramD {
    pub objects: Vec<Chain>,
    pub spaces: Vec<MappingSpace>,
    /// `(larger, smaller, map)`.
    pub restrictions: Vec<(usize, usize, FMap)>,
}

pub fn diagram_d(x: &FSSet, cap: usize, budget: usize) -> Result<DiagramD> {
    let poset = x.poset_arc();
    let rp = poset.rp_category();
    let mut spaces = Vec::with_capacity(rp.objects.len());
    for phi in &rp.objects {
        spaces.push(map_space(&standard_simplex(poset.clone(), phi)?, x, cap, budget)?);
    }
    let mut restrictions = Vec::new();
    for &(small, large) in &rp.morphisms {
        let (b, _, j) = face_inclusion(&poset, &rp.objects[large], &positions_in(&rp.objects[small], &rp.objects[large]))?;
        restrictions.push((large, small, restriction(&spaces[large], &spaces[small], &b, &j)?));
    }
    Ok(DiagramD { objects: rp.objects, spaces, restrictions })
}

/// sπ₀ on the objects of R(P).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spi0Diagram {
    pub objects: Vec<String>,
    pub class_counts: Vec<usize>,
    /// Class of each element of `Hom(Δ^φ, X)`, per object.
    pub class_of: Vec<Vec<usize>>,
    pub restrictions: Vec<Spi0Restriction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spi0Restriction {
    pub from: String,
    pub to: String,
    /// Image class of each class of `from`.
    pub map: Vec<usize>,
}

impl Spi0Diagram {
    /// 0/1 matrix of a restriction, rows indexed by target classes.
    pub fn matrix(&self, r: &Spi0Restriction) -> Vec<Vec<u8>> {
        let rows = self.class_counts[self.objects.iter().position(|o| *o == r.to).expect("object")];
        (0..rows).map(|t| r.map.iter().map(|&c| u8::from(c == t)).collect()).collect()
    }
}

pub fn spi0(x: &FSSet, budget: usize) -> Result<Spi0Diagram> {
    let d = diagram_d(x, 1, budget)?;
    let poset = x.poset();
    let mut class_counts = Vec::new();
    let mut class_of = Vec::new();
    for s in &d.spaces {
        let (labels, _) = s.set.components();
        let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
        let cls: Vec<usize> = s.nf[0]
            .iter()
            .map(|y| {
                let l = labels[y.base];
                let next = renumber.len();
                *renumber.entry(l).or_insert(next)
            })
            .collect();
        class_counts.push(renumber.len());
        class_of.push(cls);
    }
    let mut restrictions = Vec::new();
    for (large, small, r) in &d.restrictions {
        let mut map = vec![usize::MAX; class_counts[*large]];
        for (k, y) in d.spaces[*large].nf[0].iter().enumerate() {
            let img = r.images[y.base];
            let i = d.spaces[*small].nf[0].iter().position(|z| *z == img).expect("vertex image");
            let c = class_of[*small][i];
            let slot = &mut map[class_of[*large][k]];
            if *slot != usize::MAX && *slot != c {
                return Err(Error::Invariant("restriction does not respect classes".into()));
            }
            *slot = c;
        }
        restrictions.push(Spi0Restriction {
            from: poset.fmt_chain(&d.objects[*large]),
            to: poset.fmt_chain(&d.objects[*small]),
            map,
        });
    }
    Ok(Spi0Diagram {
        objects: d.objects.iter().map(|o| poset.fmt_chain(o)).collect(),
        class_counts,
        class_of,
        restrictions,
    })
}

/// A finitely presented group. Relators are words of `(generator, ±1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<(usize, i8)>>,
}

impl GroupPresentation {
    /// Relation matrix: one column per relator, rows are generators.
    pub fn relation_matrix(&self) -> Mat {
        let mut m = Mat::zeros(self.generators.len(), self.relators.len());
        for (j, r) in self.relators.iter().enumerate() {
            for &(g, e) in r {
                m.set(g, j, m.get(g, j) + i64::from(e));
            }
        }
        m
    }

    pub fn abelianization(&self) -> Result<Group> {
        snf::cokernel(&self.relation_matrix())
    }

    pub fn fmt_relator(&self, r: &[(usize, i8)]) -> String {
        r.iter().map(|&(g, e)| if e > 0 { self.generators[g].clone() } else { format!("{}^-1", self.generators[g]) }).join(" ")
    }
}

/// Edge-path presentation of π₁ of a simplicial set at a vertex.
pub struct EdgePath {
    pub base: usize,
    pub presentation: GroupPresentation,
    /// Generator of each non-degenerate edge; `None` for tree edges and
    /// edges outside the base component.
    pub generator: Vec<Option<usize>>,
    pub in_component: Vec<bool>,
    /// Tree edge reaching each vertex of the component, the vertex it
    /// comes from, and whether the edge points away from the base.
    pub parent: Vec<Option<(usize, usize, bool)>>,
    /// Vertices of the component in search order.
    pub order: Vec<usize>,
}

pub fn edge_path(y: &FSSet, base: usize) -> Result<EdgePath> {
    if y.dim(base) != 0 {
        return Err(Error::Precondition("base point must be a vertex".into()));
    }
    let edges: Vec<usize> = y.ids_of_dim(1).collect();
    let ends = |e: usize| (y.face(e, 1).base, y.face(e, 0).base);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); y.len()];
    for &e in &edges {
        let (s, t) = ends(e);
        adj[s].push(e);
        adj[t].push(e);
    }
    let mut seen = vec![false; y.len()];
    let mut parent = vec![None; y.len()];
    let mut tree = vec![false; y.len()];
    seen[base] = true;
    let mut queue = VecDeque::from([base]);
    let mut order = Vec::new();
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &e in &adj[v] {
            let (s, t) = ends(e);
            let (w, away) = if s == v { (t, true) } else { (s, false) };
            if !seen[w] {
                seen[w] = true;
                tree[e] = true;
                parent[w] = Some((e, v, away));
                queue.push_back(w);
            }
        }
    }
    let mut in_component = vec![false; y.len()];
    for id in 0..y.len() {
        in_component[id] = seen[y.vertices(id)[0]];
    }
    let mut generators = Vec::new();
    let mut generator = vec![None; y.len()];
    for &e in &edges {
        if in_component[e] && !tree[e] {
            generator[e] = Some(generators.len());
            generators.push(y.name(e).to_string());
        }
    }
    let letter = |f: Nf, sign: i8| -> Option<(usize, i8)> {
        if f.word != 0 {
            return None;
        }
        generator[f.base].map(|g| (g, sign))
    };
    let mut relators = Vec::new();
    for t in y.ids_of_dim(2) {
        if !in_component[t] {
            continue;
        }
        let r: Vec<(usize, i8)> =
            [letter(y.face(t, 2), 1), letter(y.face(t, 0), 1), letter(y.face(t, 1), -1)].into_iter().flatten().collect();
        if !r.is_empty() {
            relators.push(r);
        }
    }
    Ok(EdgePath { base, presentation: GroupPresentation { generators, relators }, generator, in_component, parent, order })
}

impl EdgePath {
    /// Abelianized class of an edge, as a vector over the generators.
    fn edge_class(&self, e: Nf) -> Vec<i64> {
        let mut v = vec![0; self.presentation.generators.len()];
        if e.word == 0 {
            if let Some(g) = self.generator[e.base] {
                v[g] = 1;
            }
        }
        v
    }
}

/// Matrix of the map induced on abelianized edge-path groups by a
/// simplicial map `f: Y → Z` sending the base of `py` to the base of `pz`.
pub fn induced_on_abelianization(y: &FSSet, py: &EdgePath, pz: &EdgePath, f: &FMap) -> Result<Mat> {
    if f.images[py.base] != Nf::nd(pz.base) {
        return Err(Error::Precondition("map does not preserve base points".into()));
    }
    let gz = pz.presentation.generators.len();
    // Potential of each vertex: image of the tree path from the base.
    let mut pot: HashMap<usize, Vec<i64>> = HashMap::new();
    pot.insert(py.base, vec![0; gz]);
    for &v in &py.order {
        if let Some((e, from, away)) = py.parent[v] {
            let step = pz.edge_class(f.images[e]);
            let next = pot[&from].iter().zip(&step).map(|(a, b)| if away { a + b } else { a - b }).collect();
            pot.insert(v, next);
        }
    }
    let mut cols = Vec::new();
    for e in y.ids_of_dim(1) {
        if py.generator[e].is_none() {
            continue;
        }
        let (s, t) = (y.face(e, 1).base, y.face(e, 0).base);
        let step = pz.edge_class(f.images[e]);
        cols.push((0..gz).map(|i| pot[&s][i] + step[i] - pot[&t][i]).collect::<Vec<i64>>());
    }
    Ok(Mat::from_columns(&cols, gz))
}

/// Cokernel of `Z^a / R_a → Z^b / R_b` given by `m`.
pub fn cokernel_of_induced(target: &GroupPresentation, m: &Mat) -> Result<Group> {
    let r = target.relation_matrix();
    let mut cols: Vec<Vec<i64>> = (0..r.cols).map(|j| r.column(j)).collect();
    cols.extend((0..m.cols).map(|j| m.column(j)));
    snf::cokernel(&Mat::from_columns(&cols, target.generators.len()))
}

/// `X` itself for `k = 0`, else `Ex^k(X)` truncated at `dim_cap`.
pub fn ex_stage(x: &FSSet, k: usize, dim_cap: usize, budget: usize) -> Result<FSSet> {
    if k == 0 {
        return Ok(x.clone());
    }
    let tower = crate::ex::ex_iter(x, k, dim_cap, budget)?;
    Ok(tower.stages.into_iter().last().expect("stage"))
}

/// Edge-path data of `Map(Δ^φ, Ex^k X)` at a stated stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spi1Report {
    pub chain: String,
    pub stage: usize,
    pub dim_cap: usize,
    pub base: String,
    pub level_sizes: Vec<usize>,
    pub presentation: GroupPresentation,
    pub abelianization: Group,
}

/// Edge-path presentation of π₁ of `Map(Δ^φ, Ex^k X)` at the vertex with
/// level-0 position `base`. The stage's dimension cap must cover
/// `len(φ) + 1`.
pub fn spi1_presentation(x: &FSSet, phi: &[usize], base: usize, stage: usize, dim_cap: usize, budget: usize) -> Result<Spi1Report> {
    let poset = x.poset_arc();
    if phi.is_empty() || !phi.windows(2).all(|w| poset.lt(w[0], w[1])) {
        return Err(Error::Precondition(format!("{} is not a strictly increasing chain", poset.fmt_chain(phi))));
    }
    if stage > 0 && dim_cap < phi.len() + 1 {
        return Err(Error::Precondition(format!("dimension cap {dim_cap} is below {}", phi.len() + 1)));
    }
    let xk = ex_stage(x, stage, dim_cap, budget)?;
    let m = map_space(&standard_simplex(poset.clone(), phi)?, &xk, 2, budget)?;
    let v = *m.nf[0].get(base).ok_or_else(|| Error::Precondition("empty mapping space or base out of range".into()))?;
    let ep = edge_path(&m.set, v.base)?;
    Ok(Spi1Report {
        chain: poset.fmt_chain(phi),
        stage,
        dim_cap,
        base: m.set.name(v.base).to_string(),
        level_sizes: m.level_sizes(),
        abelianization: ep.presentation.abelianization()?,
        presentation: ep.presentation,
    })
}

/// `Map(Δ^{[p,q]}, X)` for `p < q`.
pub fn holink(x: &FSSet, p: usize, q: usize, cap: usize, budget: usize) -> Result<MappingSpace> {
    let poset = x.poset_arc();
    if !poset.lt(p, q) {
        return Err(Error::Precondition(format!("`{}` is not below `{}`", poset.name(p), poset.name(q))));
    }
    map_space(&standard_simplex(poset, &[p, q])?, x, cap, budget)
}

/// The abelianized restriction from the holink group to the group of the
/// lower stratum, at one Ex stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HolinkReport {
    pub pair: String,
    pub stage: usize,
    pub dim_cap: usize,
    pub holink_levels: Vec<usize>,
    pub stratum_levels: Vec<usize>,
    pub holink_group: Group,
    pub stratum_group: Group,
    /// Images of the holink generators, one row per stratum generator.
    pub image: Vec<Vec<i64>>,
    pub cokernel: Group,
}

impl HolinkReport {
    /// Order of the cokernel, `None` when infinite.
    pub fn index(&self) -> Option<i64> {
        self.cokernel.order()
    }
}

pub fn holink_restriction(x: &FSSet, p: usize, q: usize, stage: usize, dim_cap: usize, budget: usize) -> Result<HolinkReport> {
    let poset = x.poset_arc();
    if stage > 0 && dim_cap < 3 {
        return Err(Error::Precondition(format!("dimension cap {dim_cap} is below 3")));
    }
    let xk = ex_stage(x, stage, dim_cap, budget)?;
    let hl = holink(&xk, p, q, 2, budget)?;
    let (b, _, j) = face_inclusion(&poset, &[p, q], &[0])?;
    let st = map_space(&b, &xk, 2, budget)?;
    let r = restriction(&hl, &st, &b, &j)?;
    let base = hl.nf[0].first().ok_or_else(|| Error::Precondition("empty holink".into()))?.base;
    let py = edge_path(&hl.set, base)?;
    let pz = edge_path(&st.set, r.images[base].base)?;
    let m = induced_on_abelianization(&hl.set, &py, &pz, &r)?;
    Ok(HolinkReport {
        pair: poset.fmt_chain(&[p, q]),
        stage,
        dim_cap,
        holink_levels: hl.level_sizes(),
        stratum_levels: st.level_sizes(),
        holink_group: py.presentation.abelianization()?,
        stratum_group: pz.presentation.abelianization()?,
        image: (0..m.rows).map(|i| m.row(i).to_vec()).collect(),
        cokernel: cokernel_of_induced(&pz.presentation, &m)?,
    })
}

/// A map from a sub-object of the nerve, here the simplex of one chain.
#[derive(Clone, Debug)]
pub struct Pointing {
    pub object: Chain,
    pub domain: FSSet,
    pub map: FMap,
}

/// One pointing per class not already reached by restricting a pointing
/// on a longer chain.
pub fn complete_pointings(x: &FSSet, budget: usize) -> Result<Vec<Pointing>> {
    let poset = x.poset_arc();
    let d = spi0(x, budget)?;
    let rp = poset.rp_category();
    let mut covered: Vec<Vec<bool>> = d.class_counts.iter().map(|&c| vec![false; c]).collect();
    let mut order: Vec<usize> = (0..rp.objects.len()).collect();
    order.sort_by(|&a, &b| rp.objects[b].len().cmp(&rp.objects[a].len()).then(a.cmp(&b)));
    let top = rp.objects.iter().map(|o| o.len()).max().unwrap_or(1) - 1;
    let nv = nerve(poset.clone(), top);
    let mut out = Vec::new();
    for o in order {
        let phi = &rp.objects[o];
        let a = standard_simplex(poset.clone(), phi)?;
        let homs = enum_fmaps(&a, x, budget)?;
        for c in 0..d.class_counts[o] {
            if covered[o][c] {
                continue;
            }
            let rep = d.class_of[o].iter().position(|&k| k == c).expect("class member");
            let f = &homs[rep];
            let key = poset.fmt_chain(phi);
            let (dom, _) = crate::standard::generated(&nv, &[key.as_str()])?;
            let images = (0..dom.len())
                .map(|i| {
                    let psi = &dom.filt(i).to_vec();
                    let key = subset_key(&positions_in(psi, phi));
                    let s = a.id(&key).ok_or_else(|| Error::Invariant("face of the chain".into()))?;
                    Ok(f.images[s])
                })
                .collect::<Result<_>>()?;
            let map = FMap { images };
            covered[o][c] = true;
            let name = poset.fmt_chain(phi);
            for r in d.restrictions.iter().filter(|r| r.from == name) {
                let t = d.objects.iter().position(|n| *n == r.to).expect("object");
                covered[t][r.map[c]] = true;
            }
            out.push(Pointing { object: phi.clone(), domain: dom, map });
        }
    }
    Ok(out)
}

/// Refined stratification: the poset of components of strata and `X`
/// filtered over it.
pub struct Refinement {
    pub poset: Arc<Poset>,
    pub set: FSSet,
    /// Number of connected components of each stratum of `set`.
    pub stratum_components: Vec<usize>,
}

pub fn refine_stratification(x: &FSSet, budget: usize) -> Result<Refinement> {
    let poset = x.poset_arc();
    let d = spi0(x, budget)?;
    let obj = |c: &[usize]| d.objects.iter().position(|o| *o == poset.fmt_chain(c)).expect("object");
    let name = |p: usize, c: usize| format!("{}.{c}", poset.name(p));
    let mut elements = Vec::new();
    let mut class_of_vertex: HashMap<usize, String> = HashMap::new();
    for p in 0..poset.len() {
        let o = obj(&[p]);
        for c in 0..d.class_counts[o] {
            elements.push(name(p, c));
        }
        let homs = enum_fmaps(&standard_simplex(poset.clone(), &[p])?, x, budget)?;
        for (i, f) in homs.iter().enumerate() {
            class_of_vertex.insert(f.images[0].base, name(p, d.class_of[o][i]));
        }
    }
    let mut relation = Vec::new();
    for r in &d.restrictions {
        let chain = &poset.parse_chain(&r.from)?;
        let from = obj(chain);
        if chain.len() != 2 {
            continue;
        }
        let lo = poset.parse_chain(&r.to)?;
        if lo.len() != 1 || lo[0] != chain[0] {
            continue;
        }
        let other = d.restrictions.iter().find(|s| s.from == r.from && poset.parse_chain(&s.to).ok() == Some(vec![chain[1]]));
        let other = other.ok_or_else(|| Error::Invariant("missing restriction".into()))?;
        for c in 0..d.class_counts[from] {
            relation.push((name(chain[0], r.map[c]), name(chain[1], other.map[c])));
        }
    }
    let relation: Vec<(String, String)> = relation.into_iter().unique().collect();
    let q = Arc::new(Poset::from_covers(&elements, &relation).map_err(|e| match e {
        Error::NotAPartialOrder(m) => Error::NotAPartialOrder(format!("generated relation on strata components is not antisymmetric: {m}")),
        other => other,
    })?);
    let refined = x.refiltered(q.clone(), |id, _| {
        x.vertices(id).iter().map(|v| q.index(&class_of_vertex[v]).expect("class element")).collect()
    })?;
    let stratum_components = (0..q.len())
        .map(|e| Ok(crate::standard::stratum(&refined, e)?.0.components().1))
        .collect::<Result<_>>()?;
    Ok(Refinement { poset: q, set: refined, stratum_components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsset::{disjoint_union, validate, validate_map};
    use crate::models;
    use crate::standard::boundary;

    const B: usize = 1_000_000;

    fn p2() -> Arc<Poset> {
        Arc::new(Poset::chain(2))
    }

    // Order-preserving maps from the grid [n] × [1] to [2] whose maximal
    // chains never cover all three vertices: maps Δⁿ × Δ¹ → ∂Δ².
    fn grid_oracle(n: usize) -> usize {
        let cells: Vec<(usize, usize)> = (0..=n).flat_map(|i| [(i, 0), (i, 1)]).collect();
        (0..cells.len())
            .map(|_| 0..3usize)
            .multi_cartesian_product()
            .filter(|g| {
                let at = |c: (usize, usize)| g[cells.iter().position(|&d| d == c).unwrap()];
                let monotone = cells.iter().all(|&(i, j)| {
                    (i == n || at((i, j)) <= at((i + 1, j))) && (j == 1 || at((i, 0)) <= at((i, 1)))
                });
                let chains_ok = (0..=n).all(|turn| {
                    let mut seen = [false; 3];
                    for i in 0..=turn {
                        seen[at((i, 0))] = true;
                    }
                    for i in turn..=n {
                        seen[at((i, 1))] = true;
                    }
                    !seen.iter().all(|&s| s)
                });
                monotone && chains_ok
            })
            .count()
    }

    #[test]
    fn unfiltered_levels_match_grid_oracle() {
        let pt = Arc::new(Poset::point());
        let a = standard_simplex(pt.clone(), &[0, 0]).unwrap();
        let x = boundary(pt, &[0, 0, 0]).unwrap();
        let m = map_space(&a, &x, 2, B).unwrap();
        assert_eq!(m.level_sizes(), (0..=2).map(grid_oracle).collect::<Vec<_>>());
        assert!(validate(&m.set).is_clean());
    }

    #[test]
    fn small_levels() {
        let p = p2();
        let x = models::fsset("mobius").unwrap();
        let v0 = standard_simplex(p.clone(), &[0]).unwrap();
        let m = map_space(&v0, &x, 0, B).unwrap();
        assert_eq!(m.levels[0].len(), x.ids_of_dim(0).filter(|&v| x.filt(v) == [0]).count());
        let e = standard_simplex(p.clone(), &[0, 1]).unwrap();
        assert_eq!(map_space(&e, &e, 1, B).unwrap().levels[0].len(), 1);
        let h = holink(&x, 0, 1, 0, B).unwrap();
        assert_eq!(h.levels[0].len(), x.ids_of_dim(1).filter(|&i| x.filt(i) == [0, 1]).count());
        assert!(holink(&x, 1, 0, 0, B).is_err());
    }

    #[test]
    fn holink_of_disjoint_union_splits() {
        let x = models::fsset("cylinder").unwrap();
        let y = models::fsset("mobius").unwrap();
        let u = disjoint_union(&x, &y).unwrap();
        let sizes = |z: &FSSet| holink(z, 0, 1, 1, B).unwrap().level_sizes();
        let (a, b, c) = (sizes(&x), sizes(&y), sizes(&u));
        assert_eq!(c, a.iter().zip(&b).map(|(s, t)| s + t).collect::<Vec<_>>());
    }

    #[test]
    fn diagram_restrictions_compose() {
        let p = Arc::new(Poset::chain(3));
        let x = standard_simplex(p.clone(), &[0, 1, 1, 2]).unwrap();
        let d = diagram_d(&x, 1, B).unwrap();
        let obj = |c: &[usize]| d.objects.iter().position(|o| o == c).unwrap();
        let r = |a: usize, b: usize| &d.restrictions.iter().find(|(l, s, _)| *l == a && *s == b).unwrap().2;
        let (top, mid, low) = (obj(&[0, 1, 2]), obj(&[0, 1]), obj(&[0]));
        let direct = r(top, low);
        let composite = r(top, mid).then(&d.spaces[top].set, &d.spaces[mid].set, r(mid, low));
        assert_eq!(*direct, composite);
        for (l, s, f) in &d.restrictions {
            assert!(validate_map(&d.spaces[*l].set, &d.spaces[*s].set, f).is_clean());
        }
        assert_eq!(d.spaces[low].levels[0].len(), 1);
    }

    #[test]
    fn classes_two_routes() {
        let p = p2();
        for name in models::fsset_names() {
            let x = models::fsset(name).unwrap();
            let d = spi0(&x, B).unwrap();
            for (o, phi) in p.rp_category().objects.iter().enumerate() {
                let a = standard_simplex(p.clone(), phi).unwrap();
                let (homs, classes) = homotopy_classes(&a, &x, B).unwrap();
                assert_eq!(classes.len(), d.class_counts[o]);
                assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), homs.len());
                for c in &classes {
                    assert!(c.iter().map(|&i| d.class_of[o][i]).all_equal());
                }
            }
        }
    }

    #[test]
    fn spi0_examples() {
        let p = p2();
        let e = standard_simplex(p.clone(), &[0, 1]).unwrap();
        assert_eq!(spi0(&e, B).unwrap().class_counts, vec![1, 1, 1]);
        let pts = disjoint_union(&standard_simplex(p.clone(), &[0]).unwrap(), &standard_simplex(p.clone(), &[1]).unwrap()).unwrap();
        let d = spi0(&pts, B).unwrap();
        assert_eq!(d.class_counts, vec![1, 1, 0]);
        let a = standard_simplex(p.clone(), &[0]).unwrap();
        let (_, classes) = homotopy_classes(&a, &e, B).unwrap();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn edge_path_is_base_independent() {
        let x = models::fsset("mobius").unwrap();
        let a = standard_simplex(p2(), &[0, 1]).unwrap();
        let m = map_space(&a, &x, 2, B).unwrap();
        let groups: Vec<Group> =
            m.set.ids_of_dim(0).map(|v| edge_path(&m.set, v).unwrap().presentation.abelianization().unwrap()).collect();
        assert!(groups.iter().all_equal());
        assert_eq!(groups[0], Group::free(1));
    }

    #[test]
    fn contractible_stratum_has_trivial_group() {
        let e = standard_simplex(p2(), &[0, 0, 1]).unwrap();
        let r = spi1_presentation(&e, &[0], 0, 0, 3, B).unwrap();
        assert!(r.abelianization.is_trivial());
        assert!(spi1_presentation(&e, &[1, 1], 0, 0, 3, B).is_err());
    }

    #[test]
    fn pointings_reach_every_class() {
        let p = p2();
        let pts = disjoint_union(&standard_simplex(p.clone(), &[0]).unwrap(), &standard_simplex(p.clone(), &[0, 1]).unwrap()).unwrap();
        for x in [models::fsset("mobius").unwrap(), pts] {
            let d = spi0(&x, B).unwrap();
            let ps = complete_pointings(&x, B).unwrap();
            let nv = nerve(p.clone(), 1);
            let mut reached: Vec<Vec<bool>> = d.class_counts.iter().map(|&c| vec![false; c]).collect();
            for pt in &ps {
                assert!(validate_map(&pt.domain, &x, &pt.map).is_clean());
                assert!(pt.domain.len() <= nv.len());
                // Restrict the pointing to each sub-chain and look up the class.
                for (o, psi) in p.rp_category().objects.iter().enumerate() {
                    if !psi.iter().all(|q| pt.object.contains(q)) {
                        continue;
                    }
                    let a = standard_simplex(p.clone(), psi).unwrap();
                    let homs = enum_fmaps(&a, &x, B).unwrap();
                    let f = homs
                        .iter()
                        .position(|h| {
                            (0..a.len()).all(|i| {
                                let key = p.fmt_chain(a.filt(i));
                                h.images[i] == pt.map.images[pt.domain.id(&key).unwrap()]
                            })
                        })
                        .unwrap();
                    reached[o][d.class_of[o][f]] = true;
                }
            }
            assert!(reached.iter().flatten().all(|&r| r));
        }
    }

    #[test]
    fn refinement_examples() {
        let x = models::fsset("mobius").unwrap();
        let r = refine_stratification(&x, B).unwrap();
        assert_eq!(r.poset.len(), 2);
        assert_eq!(r.stratum_components, vec![1, 1]);
        let p = p2();
        let v = standard_simplex(p.clone(), &[0]).unwrap();
        let two = disjoint_union(&v, &v).unwrap();
        let r = refine_stratification(&two, B).unwrap();
        assert_eq!(r.poset.len(), 2);
        assert!(!r.poset.leq(0, 1) && !r.poset.leq(1, 0));
        assert_eq!(r.stratum_components, vec![1, 1]);
    }
}
