//! Finite filtered simplicial sets in Eilenberg–Zilber normal form.
//!
//! Only non-degenerate simplices are stored. Every simplex of the total
//! simplicial set is an [`Nf`]: a non-degenerate base together with a
//! degeneracy word. Face tables store normal forms, and all simplicial
//! operators reduce to [`FSSet::restrict`].

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poset::{Chain, Poset};
use crate::simplex::{self, Mono};

/// A simplex in normal form: `word` applied to the non-degenerate `base`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nf {
    pub base: usize,
    pub word: u32,
}

impl Nf {
    pub fn nd(base: usize) -> Nf {
        Nf { base, word: 0 }
    }

    pub fn is_degenerate(self) -> bool {
        self.word != 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    pub name: String,
    pub faces: Vec<Nf>,
    pub filt: Chain,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.filt.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct FSSet {
    poset: Arc<Poset>,
    simplices: Vec<Simplex>,
    by_name: HashMap<String, usize>,
    dim_start: Vec<usize>,
    /// Vertices of each simplex, when its faces are well formed.
    verts: Vec<Option<Vec<usize>>>,
}

impl PartialEq for FSSet {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset && self.simplices == other.simplices
    }
}

impl FSSet {
    pub fn empty(poset: Arc<Poset>) -> FSSet {
        Builder::new(poset).finish().0
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn poset_arc(&self) -> Arc<Poset> {
        self.poset.clone()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, id: usize) -> &Simplex {
        &self.simplices[id]
    }

    pub fn name(&self, id: usize) -> &str {
        &self.simplices[id].name
    }

    pub fn dim(&self, id: usize) -> usize {
        self.simplices[id].dim()
    }

    pub fn filt(&self, id: usize) -> &[usize] {
        &self.simplices[id].filt
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn top_dim(&self) -> Option<usize> {
        self.simplices.last().map(|s| s.dim())
    }

    pub fn ids_of_dim(&self, d: usize) -> Range<usize> {
        if d + 1 >= self.dim_start.len() {
            return self.len()..self.len();
        }
        self.dim_start[d]..self.dim_start[d + 1]
    }

    pub fn nd_counts(&self) -> Vec<usize> {
        match self.top_dim() {
            None => Vec::new(),
            Some(t) => (0..=t).map(|d| self.ids_of_dim(d).len()).collect(),
        }
    }

    pub fn face(&self, id: usize, i: usize) -> Nf {
        self.simplices[id].faces[i]
    }

    pub fn nf_dim(&self, nf: Nf) -> usize {
        self.dim(nf.base) + simplex::word_len(nf.word)
    }

    pub fn surjection_of(&self, nf: Nf) -> Mono {
        simplex::surjection(nf.word, self.nf_dim(nf))
    }

    /// `x ∘ theta` for a non-degenerate `x` and monotone `theta` into
    /// `[dim x]`, in normal form.
    pub fn restrict(&self, x: usize, theta: &[usize]) -> Nf {
        let mut base = x;
        let mut theta: Mono = theta.to_vec();
        loop {
            let n = self.dim(base);
            match simplex::split_largest_missing(&theta, n) {
                None => {
                    return Nf { base, word: simplex::repeat_mask(&theta) };
                }
                Some((t, rest)) => {
                    let f = self.face(base, t);
                    let eta = simplex::surjection(f.word, n - 1);
                    theta = simplex::compose(&eta, &rest);
                    base = f.base;
                }
            }
        }
    }

    /// `y ∘ theta` for an arbitrary simplex `y`.
    pub fn apply(&self, y: Nf, theta: &[usize]) -> Nf {
        let eta = self.surjection_of(y);
        self.restrict(y.base, &simplex::compose(&eta, theta))
    }

    pub fn nf_face(&self, y: Nf, i: usize) -> Nf {
        if y.word == 0 {
            return self.face(y.base, i);
        }
        let n = self.nf_dim(y);
        let eta = simplex::surjection(y.word, n);
        let j = eta[i];
        let mut rest = eta;
        rest.remove(i);
        if rest.contains(&j) {
            return Nf { base: y.base, word: simplex::repeat_mask(&rest) };
        }
        let f = self.face(y.base, j);
        let fs = simplex::surjection(f.word, self.dim(y.base) - 1);
        let composite: Vec<usize> = rest.iter().map(|&v| fs[if v > j { v - 1 } else { v }]).collect();
        Nf { base: f.base, word: simplex::repeat_mask(&composite) }
    }

    pub fn nf_degeneracy(&self, y: Nf, j: usize) -> Nf {
        let n = self.nf_dim(y);
        self.apply(y, &simplex::codegeneracy(j, n))
    }

    pub fn nf_filt(&self, y: Nf) -> Chain {
        simplex::compose(self.filt(y.base), &self.surjection_of(y))
    }

    /// Vertex ids of a non-degenerate simplex, in order.
    pub fn vertices(&self, id: usize) -> Vec<usize> {
        match &self.verts[id] {
            Some(v) => v.clone(),
            None => (0..=self.dim(id)).map(|i| self.restrict(id, &[i]).base).collect(),
        }
    }

    pub fn nf_vertices(&self, y: Nf) -> Vec<usize> {
        let v = self.vertices(y.base);
        self.surjection_of(y).into_iter().map(|i| v[i]).collect()
    }

    pub fn fmt_nf(&self, y: Nf) -> String {
        if y.word == 0 {
            self.name(y.base).to_string()
        } else {
            format!("{}({})", simplex::fmt_word(y.word), self.name(y.base))
        }
    }

    /// Copy with one face entry overwritten, without any checking. Meant
    /// for exercising [`validate`].
    pub fn with_face_replaced(&self, id: usize, i: usize, nf: Nf) -> FSSet {
        let mut out = self.clone();
        out.simplices[id].faces[i] = nf;
        out.verts = vertex_table(&out.simplices);
        out
    }

    /// Connected-component label of every vertex (indexed by vertex id),
    /// and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let nv = self.ids_of_dim(0).len();
        let mut uf = UnionFind::new(nv);
        for e in self.ids_of_dim(1) {
            let v = self.vertices(e);
            uf.union(v[0], v[1]);
        }
        uf.labels()
    }

    /// The same simplicial set over another poset, with filtrations mapped
    /// elementwise. `f` must be order-preserving.
    pub fn refiltered(&self, poset: Arc<Poset>, f: impl Fn(usize, &[usize]) -> Chain) -> Result<FSSet> {
        let mut b = Builder::new(poset);
        for (id, s) in self.simplices.iter().enumerate() {
            b.add(&s.name, f(id, &s.filt), s.faces.clone())?;
        }
        Ok(b.finish().0)
    }
}

/// Incremental construction. Faces must refer to already-added simplices.
pub struct Builder {
    poset: Arc<Poset>,
    simplices: Vec<Simplex>,
    by_name: HashMap<String, usize>,
}

impl Builder {
    pub fn new(poset: Arc<Poset>) -> Builder {
        Builder { poset, simplices: Vec::new(), by_name: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn dim(&self, id: usize) -> usize {
        self.simplices[id].dim()
    }

    pub fn add(&mut self, name: &str, filt: Chain, faces: Vec<Nf>) -> Result<usize> {
        if self.by_name.contains_key(name) {
            return Err(Error::Parse(format!("duplicate simplex key `{name}`")));
        }
        if !self.poset.is_chain(&filt) {
            return Err(Error::Parse(format!("simplex `{name}` has an invalid filtration")));
        }
        let dim = filt.len() - 1;
        let expected = if dim == 0 { 0 } else { dim + 1 };
        if faces.len() != expected {
            return Err(Error::Parse(format!("simplex `{name}` needs {expected} faces, got {}", faces.len())));
        }
        for f in &faces {
            if f.base >= self.simplices.len() {
                return Err(Error::Parse(format!("simplex `{name}` has a face on an unknown key")));
            }
            let fd = self.simplices[f.base].dim() + simplex::word_len(f.word);
            if fd + 1 != dim || f.word >> fd != 0 {
                return Err(Error::Parse(format!("simplex `{name}` has a face of the wrong dimension")));
            }
        }
        let id = self.simplices.len();
        self.by_name.insert(name.to_string(), id);
        self.simplices.push(Simplex { name: name.to_string(), faces, filt });
        Ok(id)
    }

    /// Sorts by dimension (stable) and returns the renumbering `old -> new`.
    pub fn finish(self) -> (FSSet, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.simplices.len()).collect();
        order.sort_by_key(|&i| self.simplices[i].dim());
        let mut remap = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let mut simplices = Vec::with_capacity(order.len());
        for &old in &order {
            let s = &self.simplices[old];
            simplices.push(Simplex {
                name: s.name.clone(),
                faces: s.faces.iter().map(|f| Nf { base: remap[f.base], word: f.word }).collect(),
                filt: s.filt.clone(),
            });
        }
        let by_name = simplices.iter().enumerate().map(|(i, s)| (s.name.clone(), i)).collect();
        let top = simplices.last().map(|s| s.dim() + 1).unwrap_or(0);
        let mut dim_start = vec![0; top + 1];
        for d in 0..=top {
            dim_start[d] = simplices.partition_point(|s| s.dim() < d);
        }
        let verts = vertex_table(&simplices);
        (FSSet { poset: self.poset, simplices, by_name, dim_start, verts }, remap)
    }
}

// Same face path as `restrict(id, &[i])`: vertex i < n lives on d_n, the
// last vertex on d_{n-1} (d_0 for edges).
fn vertex_table(simplices: &[Simplex]) -> Vec<Option<Vec<usize>>> {
    let mut table: Vec<Option<Vec<usize>>> = Vec::with_capacity(simplices.len());
    for (id, s) in simplices.iter().enumerate() {
        let n = s.dim();
        if n == 0 {
            table.push(Some(vec![id]));
            continue;
        }
        let of_face = |f: Nf| -> Option<Vec<usize>> {
            if f.base >= id {
                return None;
            }
            let v = table[f.base].as_ref()?;
            if v.len() + simplex::word_len(f.word) != n {
                return None;
            }
            Some(simplex::surjection(f.word, n - 1).into_iter().map(|i| v[i]).collect())
        };
        let entry = (|| {
            let mut front = of_face(s.faces[n])?;
            let back = of_face(s.faces[if n == 1 { 0 } else { n - 1 }])?;
            front.push(*back.last()?);
            Some(front)
        })();
        table.push(entry);
    }
    table
}

/// A filtered map, given on non-degenerate simplices of the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FMap {
    pub images: Vec<Nf>,
}

impl FMap {
    pub fn identity(x: &FSSet) -> FMap {
        FMap { images: (0..x.len()).map(Nf::nd).collect() }
    }

    /// Image of an arbitrary simplex of `dom`.
    pub fn apply(&self, dom: &FSSet, y: Nf) -> Nf {
        let img = self.images[y.base];
        if y.word == 0 {
            return img;
        }
        let d = dom.dim(y.base);
        let mu = simplex::surjection(img.word, d);
        let eta = dom.surjection_of(y);
        Nf { base: img.base, word: simplex::repeat_mask(&simplex::compose(&mu, &eta)) }
    }

    /// `g ∘ self` where `self: dom -> mid`.
    pub fn then(&self, dom: &FSSet, mid: &FSSet, g: &FMap) -> FMap {
        let _ = dom;
        FMap { images: self.images.iter().map(|&y| g.apply(mid, y)).collect() }
    }

    pub fn is_injective_nd(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.images.iter().all(|y| y.word == 0 && seen.insert(y.base))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub identity: String,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub issues: Vec<Issue>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, identity: &str, witness: String) {
        self.issues.push(Issue { identity: identity.to_string(), witness });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return writeln!(f, "clean");
        }
        for i in &self.issues {
            writeln!(f, "{}: {}", i.identity, i.witness)?;
        }
        Ok(())
    }
}

/// Checks the simplicial identities and the filtration on every
/// non-degenerate simplex.
pub fn validate(x: &FSSet) -> Report {
    let mut r = Report::default();
    for id in 0..x.len() {
        let s = x.simplex(id);
        let n = s.dim();
        if !x.poset().is_chain(&s.filt) {
            r.push("filtration is a chain", s.name.clone());
        }
        for (i, &f) in s.faces.iter().enumerate() {
            if f.base >= x.len() || f.word >> 31 != 0 || x.nf_dim(f) + 1 != n || f.word >> x.nf_dim(f) != 0 {
                r.push("face reference", format!("d{i} {}", s.name));
                return r;
            }
        }
        for i in 0..s.faces.len() {
            let mut expect = s.filt.clone();
            expect.remove(i);
            if x.nf_filt(s.faces[i]) != expect {
                r.push("filt(d_i x) = d_i filt(x)", format!("d{i} {}", s.name));
            }
        }
        if n >= 2 {
            for j in 0..=n {
                for i in 0..j {
                    let a = x.nf_face(s.faces[j], i);
                    let b = x.nf_face(s.faces[i], j - 1);
                    if a != b {
                        r.push(
                            "d_i d_j = d_{j-1} d_i (i < j)",
                            format!("i={i} j={j} on {}: {} vs {}", s.name, x.fmt_nf(a), x.fmt_nf(b)),
                        );
                    }
                }
            }
        }
        let y = Nf::nd(id);
        for j in 0..=n {
            let sy = x.nf_degeneracy(y, j);
            for i in 0..=n + 1 {
                let lhs = x.nf_face(sy, i);
                let rhs = if i == j || i == j + 1 {
                    y
                } else if i < j {
                    x.nf_degeneracy(x.nf_face(y, i), j - 1)
                } else {
                    x.nf_degeneracy(x.nf_face(y, i - 1), j)
                };
                if lhs != rhs {
                    r.push("d_i s_j interchange", format!("i={i} j={j} on {}", s.name));
                }
            }
        }
    }
    r
}

/// Checks that `f` commutes with faces and preserves filtrations.
pub fn validate_map(dom: &FSSet, cod: &FSSet, f: &FMap) -> Report {
    let mut r = Report::default();
    if f.images.len() != dom.len() {
        r.push("map is total", format!("{} images for {} simplices", f.images.len(), dom.len()));
        return r;
    }
    for (id, &img) in f.images.iter().enumerate() {
        if img.base >= cod.len() || cod.nf_dim(img) != dom.dim(id) {
            r.push("image dimension", dom.name(id).to_string());
            return r;
        }
    }
    for (id, &img) in f.images.iter().enumerate() {
        if cod.nf_filt(img) != dom.filt(id) {
            r.push("filtration preserved", dom.name(id).to_string());
        }
        if dom.dim(id) >= 1 {
            for i in 0..=dom.dim(id) {
                let a = f.apply(dom, dom.face(id, i));
                let b = cod.nf_face(img, i);
                if a != b {
                    r.push("f d_i = d_i f", format!("d{i} {}: {} vs {}", dom.name(id), cod.fmt_nf(a), cod.fmt_nf(b)));
                }
            }
        }
    }
    r
}

/// Sub-object on the kept non-degenerate simplices, with its inclusion.
pub fn sub(x: &FSSet, keep: &[bool]) -> Result<(FSSet, FMap)> {
    let mut b = Builder::new(x.poset_arc());
    let mut new_id = vec![usize::MAX; x.len()];
    let mut incl = Vec::new();
    for id in 0..x.len() {
        if !keep[id] {
            continue;
        }
        let s = x.simplex(id);
        let mut faces = Vec::with_capacity(s.faces.len());
        for f in &s.faces {
            if new_id[f.base] == usize::MAX {
                return Err(Error::Precondition(format!("sub-object not closed under faces at `{}`", s.name)));
            }
            faces.push(Nf { base: new_id[f.base], word: f.word });
        }
        new_id[id] = b.add(&s.name, s.filt.clone(), faces)?;
        incl.push(Nf::nd(id));
    }
    let (out, remap) = b.finish();
    let mut images = vec![Nf::nd(0); out.len()];
    for (old, &img) in incl.iter().enumerate() {
        images[remap[old]] = img;
    }
    Ok((out, FMap { images }))
}

/// Closure under faces of a set of non-degenerate simplices.
pub fn face_closure(x: &FSSet, seeds: &[usize]) -> Vec<bool> {
    let mut keep = vec![false; x.len()];
    let mut stack: Vec<usize> = seeds.to_vec();
    while let Some(id) = stack.pop() {
        if keep[id] {
            continue;
        }
        keep[id] = true;
        for f in &x.simplex(id).faces {
            stack.push(f.base);
        }
    }
    keep
}

/// Image of a map as a sub-object of the codomain.
pub fn image(dom: &FSSet, cod: &FSSet, f: &FMap) -> Vec<bool> {
    let _ = dom;
    let seeds: Vec<usize> = f.images.iter().map(|y| y.base).collect();
    face_closure(cod, &seeds)
}

/// Disjoint union; keys are prefixed with `0/` and `1/`.
pub fn disjoint_union(x: &FSSet, y: &FSSet) -> Result<FSSet> {
    if x.poset() != y.poset() {
        return Err(Error::Precondition("disjoint union over different posets".into()));
    }
    let mut b = Builder::new(x.poset_arc());
    for (tag, z) in [("0", x), ("1", y)] {
        let offset = b.len();
        for s in z.simplices() {
            let faces = s.faces.iter().map(|f| Nf { base: f.base + offset, word: f.word }).collect();
            b.add(&format!("{tag}/{}", s.name), s.filt.clone(), faces)?;
        }
    }
    Ok(b.finish().0)
}

/// Lookup of simplices by vertex sequence, for simplicial sets in which a
/// non-degenerate simplex is determined by its vertices (nerves, ordered
/// simplicial complexes, subdivisions of simplices).
#[derive(Clone, Debug)]
pub struct VertexIndex {
    map: HashMap<Vec<usize>, usize>,
}

impl VertexIndex {
    /// `None` if two non-degenerate simplices share a vertex sequence.
    pub fn new(x: &FSSet) -> Option<VertexIndex> {
        let mut map = HashMap::with_capacity(x.len());
        for id in 0..x.len() {
            if map.insert(x.vertices(id), id).is_some() {
                return None;
            }
        }
        Some(VertexIndex { map })
    }

    pub fn lookup(&self, tuple: &[usize]) -> Option<Nf> {
        let (image, eta) = simplex::epi_mono(tuple);
        let base = *self.map.get(&image)?;
        Some(Nf { base, word: simplex::repeat_mask(&eta) })
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Labels numbered by first appearance.
    pub(crate) fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut label = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut count = 0;
        for i in 0..n {
            let r = self.find(i);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            out[i] = label[r];
        }
        (out, count)
    }
}
