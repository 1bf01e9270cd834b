//! Intersection homology of filtered ordered simplicial complexes.
//!
//! Simplices are vertex sets ordered by the global vertex order. A simplex
//! lies in level `k` exactly when all its vertices do, and the vertex
//! levels must be nondecreasing along every simplex, so that its trace on
//! each level is an initial face.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsset::UnionFind;
use crate::snf::{self, ColumnEchelon, Group, Mat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    names: Vec<String>,
    level: Vec<usize>,
    formal_dim: usize,
    /// All simplices by dimension, each sorted, lists sorted.
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    maximal: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub name: String,
    /// Formal dimension, i.e. the level it belongs to.
    pub dim: usize,
    pub codim: usize,
    pub vertices: Vec<String>,
}

impl FilteredComplex {
    /// `maximal` lists simplices by vertex index; their faces are added.
    pub fn new(names: Vec<String>, level: Vec<usize>, formal_dim: usize, maximal: &[Vec<usize>]) -> Result<FilteredComplex> {
        if names.len() != level.len() {
            return Err(Error::Parse("one level per vertex expected".into()));
        }
        if names.iter().duplicates().next().is_some() {
            return Err(Error::Parse("duplicate vertex name".into()));
        }
        if let Some(l) = level.iter().find(|&&l| l > formal_dim) {
            return Err(Error::Parse(format!("level {l} above the formal dimension {formal_dim}")));
        }
        let mut all: BTreeSet<Vec<usize>> = (0..names.len()).map(|v| vec![v]).collect();
        for m in maximal {
            let mut vs = m.clone();
            vs.sort();
            if vs.is_empty() || vs.windows(2).any(|w| w[0] == w[1]) || vs.iter().any(|&v| v >= names.len()) {
                return Err(Error::Parse("malformed simplex".into()));
            }
            if vs.windows(2).any(|w| level[w[0]] > level[w[1]]) {
                let shown = vs.iter().map(|&v| names[v].as_str()).join(" ");
                return Err(Error::Precondition(format!("simplex [{shown}] does not meet the levels in an initial face")));
            }
            for d in 1..=vs.len() {
                all.extend(vs.iter().copied().combinations(d));
            }
        }
        let top = all.iter().map(|s| s.len()).max().unwrap_or(1);
        let mut simplices = vec![Vec::new(); top];
        for s in all {
            simplices[s.len() - 1].push(s);
        }
        let index = simplices.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        let set: BTreeSet<Vec<usize>> = simplices.iter().flatten().cloned().collect();
        let maximal: Vec<Vec<usize>> = set
            .iter()
            .filter(|s| {
                !(0..names.len()).any(|v| {
                    if s.contains(&v) {
                        return false;
                    }
                    let mut t = (*s).clone();
                    t.push(v);
                    t.sort();
                    set.contains(&t)
                })
            })
            .cloned()
            .sorted_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
            .collect();
        Ok(FilteredComplex { names, level, formal_dim, simplices, index, maximal })
    }

    /// Same complex, every vertex on the top level.
    pub fn trivially_filtered(&self) -> FilteredComplex {
        let level = vec![self.formal_dim; self.names.len()];
        FilteredComplex::new(self.names.clone(), level, self.formal_dim, &self.maximal).expect("valid")
    }

    pub fn formal_dim(&self) -> usize {
        self.formal_dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn top_dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn simplices(&self, n: usize) -> &[Vec<usize>] {
        self.simplices.get(n).map_or(&[], |v| v.as_slice())
    }

    pub fn maximal(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(|l| l.len()).collect()
    }

    pub fn fmt_simplex(&self, s: &[usize]) -> String {
        format!("[{}]", s.iter().map(|&v| self.names[v].as_str()).join(" "))
    }

    /// Strata: components of each level minus the previous one, in level
    /// order, each named after its first vertex.
    pub fn strata(&self) -> Vec<Stratum> {
        self.strata_with_map().0
    }

    /// Strata and the stratum of every vertex.
    pub fn strata_with_map(&self) -> (Vec<Stratum>, Vec<usize>) {
        let n = self.names.len();
        let mut uf = UnionFind::new(n);
        for e in self.simplices(1) {
            if self.level[e[0]] == self.level[e[1]] {
                uf.union(e[0], e[1]);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (self.level[v], v));
        let mut root_to_stratum: HashMap<usize, usize> = HashMap::new();
        let mut strata: Vec<Stratum> = Vec::new();
        let mut of = vec![0; n];
        for v in order {
            let r = uf.find(v);
            let id = *root_to_stratum.entry(r).or_insert_with(|| {
                let k = self.level[v];
                strata.push(Stratum {
                    name: format!("S{k}:{}", self.names[v]),
                    dim: k,
                    codim: self.formal_dim - k,
                    vertices: Vec::new(),
                });
                strata.len() - 1
            });
            strata[id].vertices.push(self.names[v].clone());
            of[v] = id;
        }
        (strata, of)
    }

    /// Sub-complex generated by the given simplices, with the induced
    /// filtration. Unused vertices are dropped.
    pub fn subcomplex(&self, generators: &[Vec<usize>]) -> Result<FilteredComplex> {
        let used: BTreeSet<usize> = generators.iter().flatten().copied().collect();
        let remap: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let names = used.iter().map(|&v| self.names[v].clone()).collect();
        let level = used.iter().map(|&v| self.level[v]).collect();
        let maximal: Vec<Vec<usize>> = generators
            .iter()
            .map(|s| {
                if self.index.get(s.len().wrapping_sub(1)).and_then(|m| m.get(s)).is_none() {
                    return Err(Error::Precondition(format!("{} is not a simplex", self.fmt_simplex(s))));
                }
                Ok(s.iter().map(|v| remap[v]).collect())
            })
            .collect::<Result<_>>()?;
        FilteredComplex::new(names, level, self.formal_dim, &maximal)
    }

    /// Barycentric subdivision. The barycenter of a simplex sits on the
    /// highest level among its vertices and barycenters are ordered by
    /// dimension, which keeps the initial-face discipline.
    pub fn barycentric(&self) -> FilteredComplex {
        let all: Vec<&Vec<usize>> = self.simplices.iter().flatten().collect();
        let pos: HashMap<&Vec<usize>, usize> = all.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let names: Vec<String> = all.iter().map(|s| s.iter().map(|&v| self.names[v].as_str()).join(".")).collect();
        let level: Vec<usize> = all.iter().map(|s| s.iter().map(|&v| self.level[v]).max().unwrap_or(0)).collect();
        let mut maximal = Vec::new();
        for m in &self.maximal {
            for perm in m.iter().copied().permutations(m.len()) {
                let chain: Vec<usize> = (1..=perm.len())
                    .map(|k| {
                        let mut f: Vec<usize> = perm[..k].to_vec();
                        f.sort();
                        pos[&f]
                    })
                    .collect();
                maximal.push(chain);
            }
        }
        FilteredComplex::new(names, level, self.formal_dim, &maximal).expect("subdivision stays valid")
    }

    /// Coefficients of the boundary of an `n`-simplex, by `(n-1)`-simplex
    /// index.
    fn boundary_of(&self, s: &[usize]) -> Vec<(usize, i64)> {
        if s.len() < 2 {
            return Vec::new();
        }
        (0..s.len())
            .map(|i| {
                let mut f = s.to_vec();
                f.remove(i);
                (self.index[s.len() - 2][&f], if i % 2 == 0 { 1 } else { -1 })
            })
            .collect()
    }
}

/// Apex first, levels shifted up by one, apex alone on level 0.
pub fn make_cone(x: &FilteredComplex, apex: &str) -> Result<FilteredComplex> {
    if x.names.iter().any(|n| n == apex) {
        return Err(Error::Precondition(format!("apex `{apex}` is already a vertex")));
    }
    let mut names = vec![apex.to_string()];
    names.extend(x.names.iter().cloned());
    let mut level = vec![0];
    level.extend(x.level.iter().map(|l| l + 1));
    let maximal: Vec<Vec<usize>> = if x.names.is_empty() {
        vec![vec![0]]
    } else {
        x.maximal.iter().map(|m| std::iter::once(0).chain(m.iter().map(|v| v + 1)).collect()).collect()
    };
    FilteredComplex::new(names, level, x.formal_dim + 1, &maximal)
}

/// A perversity: one integer per stratum, zero on the regular ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perversity {
    pub values: Vec<i64>,
}

impl Perversity {
    pub fn zero(x: &FilteredComplex) -> Perversity {
        Perversity { values: vec![0; x.strata().len()] }
    }

    /// Values on singular strata from `f`, zero on regular strata.
    pub fn from_fn(x: &FilteredComplex, f: impl Fn(&Stratum) -> i64) -> Perversity {
        Perversity { values: x.strata().iter().map(|s| if s.codim == 0 { 0 } else { f(s) }).collect() }
    }

    /// Values by stratum name; missing strata get 0.
    pub fn from_map(x: &FilteredComplex, m: &BTreeMap<String, i64>) -> Result<Perversity> {
        let strata = x.strata();
        for (k, &v) in m {
            let s = strata.iter().find(|s| &s.name == k).ok_or_else(|| Error::Parse(format!("unknown stratum `{k}`")))?;
            if s.codim == 0 && v != 0 {
                return Err(Error::Precondition(format!("regular stratum `{k}` must have perversity 0")));
            }
        }
        Ok(Perversity { values: strata.iter().map(|s| m.get(&s.name).copied().unwrap_or(0)).collect() })
    }

    pub fn to_map(&self, x: &FilteredComplex) -> BTreeMap<String, i64> {
        x.strata().into_iter().zip(&self.values).map(|(s, &v)| (s.name, v)).collect()
    }

    /// The perversity induced on a sub-complex `u` of `x`, matching strata
    /// through shared vertex names.
    pub fn restrict(&self, x: &FilteredComplex, u: &FilteredComplex) -> Perversity {
        let (_, of) = x.strata_with_map();
        Perversity::from_fn(u, |s| {
            let v = x.vertex(&s.vertices[0]).expect("sub-complex vertex");
            self.values[of[v]]
        })
    }

    /// Strata where the perversity exceeds `codim - 2`.
    pub fn warnings(&self, x: &FilteredComplex) -> Vec<String> {
        x.strata()
            .iter()
            .zip(&self.values)
            .filter(|(s, &v)| s.codim > 0 && v > s.codim as i64 - 2)
            .map(|(s, v)| format!("perversity {v} on `{}` exceeds codim - 2 = {}", s.name, s.codim as i64 - 2))
            .collect()
    }
}

/// Perverse degree of `s` along the stratum `st`, `None` standing for −∞.
pub fn perverse_degree(x: &FilteredComplex, s: &[usize], st: usize) -> Option<usize> {
    let (strata, of) = x.strata_with_map();
    perverse_degree_with(x, &of, strata[st].dim, s, st)
}

fn perverse_degree_with(x: &FilteredComplex, of: &[usize], k: usize, s: &[usize], st: usize) -> Option<usize> {
    if !s.iter().any(|&v| of[v] == st) {
        return None;
    }
    Some(s.iter().filter(|&&v| x.level[v] <= k).count() - 1)
}

pub fn is_allowable(x: &FilteredComplex, s: &[usize], p: &Perversity) -> bool {
    let (strata, of) = x.strata_with_map();
    allowable_with(x, &strata, &of, s, p)
}

fn allowable_with(x: &FilteredComplex, strata: &[Stratum], of: &[usize], s: &[usize], p: &Perversity) -> bool {
    let n = s.len() as i64 - 1;
    s.iter().map(|&v| of[v]).unique().all(|st| {
        let d = perverse_degree_with(x, of, strata[st].dim, s, st).expect("met") as i64;
        d <= n - strata[st].codim as i64 + p.values[st]
    })
}

/// The complex of intersection chains, with explicit bases.
pub struct IntersectionComplex {
    /// Allowable simplices by degree (indices into the complex).
    pub allowable: Vec<Vec<usize>>,
    /// Basis of each chain group, in coordinates over the allowable
    /// simplices of that degree.
    pub basis: Vec<Vec<Vec<i64>>>,
    /// `differential[n - 1]`: degree `n` to degree `n - 1`, in basis
    /// coordinates.
    pub differential: Vec<Mat>,
}

impl IntersectionComplex {
    pub fn ranks(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.len()).collect()
    }
}

pub fn intersection_chain_complex(x: &FilteredComplex, p: &Perversity) -> Result<IntersectionComplex> {
    let (strata, of) = x.strata_with_map();
    let top = x.top_dim();
    let allowable: Vec<Vec<usize>> = (0..=top)
        .map(|n| (0..x.simplices(n).len()).filter(|&i| allowable_with(x, &strata, &of, &x.simplices(n)[i], p)).collect())
        .collect();
    let pos: Vec<HashMap<usize, usize>> =
        allowable.iter().map(|a| a.iter().enumerate().map(|(j, &i)| (i, j)).collect()).collect();
    let mut basis: Vec<Vec<Vec<i64>>> = Vec::with_capacity(top + 1);
    let mut echelons: Vec<Option<ColumnEchelon>> = Vec::with_capacity(top + 1);
    basis.push((0..allowable[0].len()).map(|j| unit(allowable[0].len(), j)).collect());
    echelons.push(None);
    for n in 1..=top {
        let bad: Vec<usize> = (0..x.simplices(n - 1).len()).filter(|i| !pos[n - 1].contains_key(i)).collect();
        let bad_pos: HashMap<usize, usize> = bad.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        let mut m = Mat::zeros(bad.len(), allowable[n].len());
        for (j, &i) in allowable[n].iter().enumerate() {
            for (f, c) in x.boundary_of(&x.simplices(n)[i]) {
                if let Some(&r) = bad_pos.get(&f) {
                    m.set(r, j, m.get(r, j) + c);
                }
            }
        }
        let ce = ColumnEchelon::new(&m)?;
        basis.push(ce.kernel_basis());
        echelons.push(Some(ce));
    }
    let mut differential = Vec::with_capacity(top);
    for n in 1..=top {
        let mut cols = Vec::with_capacity(basis[n].len());
        for b in &basis[n] {
            let mut img = vec![0i64; allowable[n - 1].len()];
            for (j, &c) in b.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (f, s) in x.boundary_of(&x.simplices(n)[allowable[n][j]]) {
                    if let Some(&r) = pos[n - 1].get(&f) {
                        img[r] = c.checked_mul(s).and_then(|t| img[r].checked_add(t)).ok_or(Error::Overflow)?;
                    }
                }
            }
            let coords = match &echelons[n - 1] {
                None => img,
                Some(ce) => ce.kernel_coords(&img)?,
            };
            cols.push(coords);
        }
        differential.push(Mat::from_columns(&cols, basis[n - 1].len()));
    }
    for n in 1..top {
        if !differential[n - 1].mul(&differential[n])?.is_zero() {
            return Err(Error::Invariant(format!("boundary of boundary is not zero in degree {}", n + 1)));
        }
    }
    Ok(IntersectionComplex { allowable, basis, differential })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub formal_dim: usize,
    pub groups: Vec<Group>,
}

impl HomologyResult {
    pub fn betti(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.rank).collect()
    }

    /// Group in degree `k`, zero outside the computed range.
    pub fn at(&self, k: usize) -> Group {
        self.groups.get(k).cloned().unwrap_or_else(|| Group::free(0))
    }

    pub fn euler(&self) -> i64 {
        self.groups.iter().enumerate().map(|(k, g)| if k % 2 == 0 { g.rank as i64 } else { -(g.rank as i64) }).sum()
    }
}

pub fn intersection_homology(x: &FilteredComplex, p: &Perversity) -> Result<HomologyResult> {
    let c = intersection_chain_complex(x, p)?;
    Ok(HomologyResult { formal_dim: x.formal_dim, groups: snf::homology(&c.ranks(), &c.differential)? })
}

/// Simplicial homology of the underlying complex, from the full boundary
/// matrices.
pub fn ordinary_homology(x: &FilteredComplex) -> Result<HomologyResult> {
    let dims = x.counts();
    let d: Vec<Mat> = (1..dims.len())
        .map(|n| {
            let mut m = Mat::zeros(dims[n - 1], dims[n]);
            for (j, s) in x.simplices(n).iter().enumerate() {
                for (f, c) in x.boundary_of(s) {
                    m.set(f, j, c);
                }
            }
            m
        })
        .collect();
    Ok(HomologyResult { formal_dim: x.formal_dim, groups: snf::homology(&dims, &d)? })
}

/// Cycles and boundaries of the intersection chains of `y` in degree `k`,
/// as vectors over the `k`-simplices of the ambient complex `x`.
fn cycles_and_boundaries(x: &FilteredComplex, y: &FilteredComplex, p: &Perversity, k: usize) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let c = intersection_chain_complex(y, p)?;
    if k > y.top_dim() {
        return Ok((Vec::new(), Vec::new()));
    }
    let ambient = |coords: &[i64]| -> Result<Vec<i64>> {
        let mut out = vec![0i64; x.simplices(k).len()];
        for (b, &t) in c.basis[k].iter().zip(coords) {
            if t == 0 {
                continue;
            }
            for (j, &u) in b.iter().enumerate() {
                if u == 0 {
                    continue;
                }
                let s: Vec<usize> = y.simplices(k)[c.allowable[k][j]]
                    .iter()
                    .map(|&v| x.vertex(&y.names[v]).ok_or_else(|| Error::Precondition("not a sub-complex".into())))
                    .collect::<Result<_>>()?;
                let i = *x.index[k].get(&s).ok_or_else(|| Error::Precondition("not a sub-complex".into()))?;
                out[i] = t.checked_mul(u).and_then(|w| out[i].checked_add(w)).ok_or(Error::Overflow)?;
            }
        }
        Ok(out)
    };
    let n = c.basis[k].len();
    let cycles = if k == 0 {
        (0..n).map(|j| unit(n, j)).collect()
    } else {
        ColumnEchelon::new(&c.differential[k - 1])?.kernel_basis()
    };
    let boundaries = match c.differential.get(k) {
        Some(d) => (0..d.cols).map(|j| d.column(j)).collect(),
        None => Vec::new(),
    };
    let cycles = cycles.iter().map(|v| ambient(v)).collect::<Result<_>>()?;
    let boundaries = boundaries.iter().map(|v| ambient(v)).collect::<Result<_>>()?;
    Ok((cycles, boundaries))
}

fn span_rank(vectors: &[Vec<i64>], len: usize) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    snf::rank(&Mat::from_columns(vectors, len))
}

/// One degree of the Mayer–Vietoris sequence: Betti numbers of the four
/// spaces and ranks of the maps out of `H_k(U∩V)` and `H_k(U) ⊕ H_k(V)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MvDegree {
    pub degree: usize,
    pub x: usize,
    pub u: usize,
    pub v: usize,
    pub uv: usize,
    pub rank_in: usize,
    pub rank_sum: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MvReport {
    pub degrees: Vec<MvDegree>,
    /// Alternating sum of all Betti numbers along the long sequence.
    pub alternating_sum: i64,
    pub exact: bool,
}

/// Rational ranks along the Mayer–Vietoris sequence of the cover of `x`
/// by the sub-complexes generated by `u` and `v`. Exactness at every term
/// is checked from the computed ranks, the connecting map's rank being
/// determined by exactness at `H(X)` and checked at `H(U∩V)`.
pub fn mayer_vietoris(x: &FilteredComplex, p: &Perversity, u: &[Vec<usize>], v: &[Vec<usize>]) -> Result<MvReport> {
    let cu = x.subcomplex(u)?;
    let cv = x.subcomplex(v)?;
    let has = |y: &FilteredComplex, n: usize, s: &[usize]| y.index.get(n).is_some_and(|m| m.contains_key(&names_to(x, y, s)));
    let mut common = Vec::new();
    for n in 0..=x.top_dim() {
        for s in x.simplices(n) {
            match (has(&cu, n, s), has(&cv, n, s)) {
                (true, true) => common.push(s.clone()),
                (false, false) => return Err(Error::Precondition("the two sub-complexes do not cover the complex".into())),
                _ => {}
            }
        }
    }
    let cw = x.subcomplex(&common)?;
    let (pu, pv, pw) = (p.restrict(x, &cu), p.restrict(x, &cv), p.restrict(x, &cw));
    let mut degrees = Vec::new();
    for k in 0..=x.top_dim() {
        let len = x.simplices(k).len();
        let (zx, bx) = cycles_and_boundaries(x, x, p, k)?;
        let (zu, bu) = cycles_and_boundaries(x, &cu, &pu, k)?;
        let (zv, bv) = cycles_and_boundaries(x, &cv, &pv, k)?;
        let (zw, bw) = cycles_and_boundaries(x, &cw, &pw, k)?;
        let betti = |z: &[Vec<i64>], b: &[Vec<i64>]| -> Result<usize> { Ok(span_rank(z, len)? - span_rank(b, len)?) };
        let sum_image: Vec<Vec<i64>> = zu.iter().chain(&zv).chain(&bx).cloned().collect();
        let rank_sum = span_rank(&sum_image, len)? - span_rank(&bx, len)?;
        let pad = |a: &[i64], b: &[i64]| a.iter().chain(b).copied().collect::<Vec<i64>>();
        let zero = vec![0i64; len];
        let mut in_image: Vec<Vec<i64>> = zw.iter().map(|z| pad(z, z)).collect();
        in_image.extend(bu.iter().map(|b| pad(b, &zero)));
        in_image.extend(bv.iter().map(|b| pad(&zero, b)));
        let rank_in = span_rank(&in_image, 2 * len)? - span_rank(&bu, len)? - span_rank(&bv, len)?;
        degrees.push(MvDegree {
            degree: k,
            x: betti(&zx, &bx)?,
            u: betti(&zu, &bu)?,
            v: betti(&zv, &bv)?,
            uv: betti(&zw, &bw)?,
            rank_in,
            rank_sum,
        });
    }
    let mut exact = true;
    for (k, d) in degrees.iter().enumerate() {
        // Exactness at H_k(U) ⊕ H_k(V).
        exact &= d.rank_in + d.rank_sum == d.u + d.v;
        // Connecting map H_k(X) → H_{k-1}(U∩V), by exactness at H_k(X).
        let connecting = d.x - d.rank_sum;
        let expected = if k == 0 { 0 } else { degrees[k - 1].uv - degrees[k - 1].rank_in };
        exact &= connecting == expected;
    }
    exact &= degrees.last().is_none_or(|d| d.rank_in == d.uv);
    let alternating_sum = degrees
        .iter()
        .map(|d| {
            let t = d.uv as i64 - d.u as i64 - d.v as i64 + d.x as i64;
            if d.degree % 2 == 0 { t } else { -t }
        })
        .sum();
    Ok(MvReport { degrees, alternating_sum, exact })
}

fn names_to(x: &FilteredComplex, y: &FilteredComplex, s: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = s.iter().map(|&v| y.vertex(&x.names[v]).unwrap_or(usize::MAX)).collect();
    out.sort();
    out
}

fn unit(n: usize, j: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[j] = 1;
    v
}

/// Serialized form: vertices in order, levels by vertex (default: the
/// formal dimension), maximal simplices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub formal_dim: usize,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub levels: BTreeMap<String, usize>,
    pub simplices: Vec<Vec<String>>,
    /// Optional per-simplex levels; each must agree with its vertices.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub simplex_levels: Vec<(Vec<String>, usize)>,
}

impl ComplexJson {
    pub fn of(x: &FilteredComplex) -> ComplexJson {
        ComplexJson {
            formal_dim: x.formal_dim,
            vertices: x.names.clone(),
            levels: x
                .names
                .iter()
                .zip(&x.level)
                .filter(|(_, &l)| l != x.formal_dim)
                .map(|(n, &l)| (n.clone(), l))
                .collect(),
            simplices: x.maximal.iter().map(|s| s.iter().map(|&v| x.names[v].clone()).collect()).collect(),
            simplex_levels: Vec::new(),
        }
    }

    pub fn to_complex(&self) -> Result<FilteredComplex> {
        let idx = |n: &str| {
            self.vertices.iter().position(|v| v == n).ok_or_else(|| Error::Parse(format!("unknown vertex `{n}`")))
        };
        for k in self.levels.keys() {
            idx(k)?;
        }
        let level: Vec<usize> =
            self.vertices.iter().map(|v| self.levels.get(v).copied().unwrap_or(self.formal_dim)).collect();
        let maximal: Vec<Vec<usize>> =
            self.simplices.iter().map(|s| s.iter().map(|n| idx(n)).collect::<Result<_>>()).collect::<Result<_>>()?;
        let x = FilteredComplex::new(self.vertices.clone(), level, self.formal_dim, &maximal)?;
        for (s, l) in &self.simplex_levels {
            let mut vs: Vec<usize> = s.iter().map(|n| idx(n)).collect::<Result<_>>()?;
            vs.sort();
            if x.index.get(vs.len().wrapping_sub(1)).and_then(|m| m.get(&vs)).is_none() {
                return Err(Error::Parse(format!("level given for a non-simplex {}", x.fmt_simplex(&vs))));
            }
            let want = vs.iter().map(|&v| x.level[v]).max().unwrap_or(0);
            if *l != want {
                return Err(Error::Precondition(format!(
                    "{} on level {l} would not meet level {want} in an initial face",
                    x.fmt_simplex(&vs)
                )));
            }
        }
        Ok(x)
    }
}

/// Line format:
///
/// ```text
/// dim 2
/// vertex c 0
/// vertex a
/// simplex c a
/// level 0 c
/// ```
pub fn parse_complex_text(text: &str) -> Result<FilteredComplex> {
    let mut j = ComplexJson {
        formal_dim: 0,
        vertices: Vec::new(),
        levels: BTreeMap::new(),
        simplices: Vec::new(),
        simplex_levels: Vec::new(),
    };
    let mut dim_seen = false;
    let mut pending_levels: Vec<(String, usize)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("line {}: `{line}`", ln + 1));
        let mut it = line.split_whitespace();
        match it.next() {
            Some("dim") => {
                j.formal_dim = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                dim_seen = true;
            }
            Some("vertex") => {
                let name = it.next().ok_or_else(bad)?.to_string();
                if let Some(l) = it.next() {
                    pending_levels.push((name.clone(), l.parse().map_err(|_| bad())?));
                }
                j.vertices.push(name);
            }
            Some("simplex") => j.simplices.push(it.map(String::from).collect()),
            Some("level") => {
                let l: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                j.simplex_levels.push((it.map(String::from).collect(), l));
            }
            _ => return Err(bad()),
        }
    }
    if !dim_seen {
        return Err(Error::Parse("missing `dim` line".into()));
    }
    j.levels = pending_levels.into_iter().collect();
    j.to_complex()
}

pub fn complex_to_text(x: &FilteredComplex) -> String {
    let mut out = format!("dim {}\n", x.formal_dim);
    for (n, &l) in x.names.iter().zip(&x.level) {
        if l == x.formal_dim {
            out.push_str(&format!("vertex {n}\n"));
        } else {
            out.push_str(&format!("vertex {n} {l}\n"));
        }
    }
    for s in &x.maximal {
        out.push_str(&format!("simplex {}\n", s.iter().map(|&v| x.names[v].as_str()).join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    fn circle() -> FilteredComplex {
        FilteredComplex::new(names(&["a", "b", "c"]), vec![1; 3], 1, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn cone_on_a_point_is_an_edge() {
        let pt = FilteredComplex::new(names(&["x"]), vec![0], 0, &[vec![0]]).unwrap();
        let c = make_cone(&pt, "v").unwrap();
        assert_eq!(c.counts(), vec![2, 1]);
        assert_eq!(c.level(0), 0);
        assert!(make_cone(&pt, "x").is_err());
    }

    #[test]
    fn cone_on_triangle_boundary() {
        let c = make_cone(&circle(), "v").unwrap();
        assert_eq!(c.formal_dim(), 2);
        let strata = c.strata();
        assert_eq!(strata.len(), 2);
        assert_eq!((strata[0].dim, strata[0].vertices.clone()), (0, names(&["v"])));
        let p = Perversity::zero(&c);
        // The apex itself is not allowable: 0 > 0 - 2 + 0.
        assert!(!is_allowable(&c, &[0], &p));
        assert_eq!(perverse_degree(&c, &[0, 1, 2], 0), Some(0));
        assert_eq!(perverse_degree(&c, &[1, 2], 0), None);
        assert_eq!(perverse_degree(&c, &[0, 1, 2], 1), Some(2));
    }

    #[test]
    fn initial_face_is_enforced() {
        let r = FilteredComplex::new(names(&["a", "b"]), vec![1, 0], 1, &[vec![0, 1]]);
        assert!(r.is_err());
    }

    #[test]
    fn circle_homology_both_routes() {
        let x = circle();
        let h = ordinary_homology(&x).unwrap();
        assert_eq!(h.groups, vec![Group::free(1), Group::free(1)]);
        assert_eq!(intersection_homology(&x, &Perversity::zero(&x)).unwrap(), h);
    }

    #[test]
    fn text_and_json_round_trip() {
        let c = make_cone(&circle(), "v").unwrap();
        let t = complex_to_text(&c);
        let back = parse_complex_text(&t).unwrap();
        assert_eq!(back, c);
        assert_eq!(complex_to_text(&back), t);
        let j = serde_json::to_string(&ComplexJson::of(&c)).unwrap();
        let back: ComplexJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_complex().unwrap(), c);
        assert!(parse_complex_text("dim 1\nvertex a\nvertex b\nsimplex a b\nlevel 0 a b\n").is_err());
    }

    #[test]
    fn subdivision_keeps_circle() {
        let s = circle().barycentric();
        assert_eq!(s.counts(), vec![6, 6]);
        assert_eq!(ordinary_homology(&s).unwrap(), ordinary_homology(&circle()).unwrap());
    }

    // Degree-by-degree cone formula for a cone of formal dimension d + 1
    // on a trivially filtered link of dimension d.
    fn cone_expected(link: &HomologyResult, d: usize, pv: i64) -> Vec<Group> {
        (0..=d + 1).map(|k| if (k as i64) < d as i64 - pv { link.at(k) } else { Group::free(0) }).collect()
    }

    #[test]
    fn cone_formula() {
        for name in ["circle", "two-circles", "sphere"] {
            let link = crate::models::complex(name).unwrap();
            let d = link.formal_dim();
            let h = ordinary_homology(&link).unwrap();
            let c = make_cone(&link, "v").unwrap();
            for pv in -1..d as i64 {
                let p = Perversity::from_fn(&c, |_| pv);
                let got = intersection_homology(&c, &p).unwrap();
                let want = cone_expected(&h, d, pv);
                assert_eq!((0..=d + 1).map(|k| got.at(k)).collect::<Vec<_>>(), want, "{name} p={pv}");
            }
        }
    }

    #[test]
    fn trivial_filtration_is_ordinary() {
        for name in crate::models::complex_names() {
            let x = crate::models::complex(name).unwrap().trivially_filtered();
            assert_eq!(intersection_homology(&x, &Perversity::zero(&x)).unwrap(), ordinary_homology(&x).unwrap(), "{name}");
        }
    }

    fn pinched_cover(x: &FilteredComplex) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let c = x.vertex("c").unwrap();
        x.maximal().iter().cloned().partition(|s| s.contains(&c))
    }

    #[test]
    fn mayer_vietoris_on_pinched_torus() {
        let x = crate::models::complex("pinched-torus").unwrap();
        let (u, v) = pinched_cover(&x);
        for pc in -1..=2 {
            let p = Perversity::from_fn(&x, |_| pc);
            let r = mayer_vietoris(&x, &p, &u, &v).unwrap();
            assert!(r.exact, "p={pc}: {r:?}");
            assert_eq!(r.alternating_sum, 0);
            let h = intersection_homology(&x, &p).unwrap();
            assert_eq!(r.degrees.iter().map(|d| d.x).collect::<Vec<_>>(), h.betti());
        }
        let p = Perversity::zero(&x);
        assert!(mayer_vietoris(&x, &p, &u, &u).is_err());
    }

    #[test]
    fn pinched_torus_values() {
        // The normalization separates the pinch: I⁰H is the homology of a
        // sphere while ordinary homology sees the pinched loop.
        let x = crate::models::complex("pinched-torus").unwrap();
        let h = intersection_homology(&x, &Perversity::zero(&x)).unwrap();
        assert_eq!(h.groups, vec![Group::free(1), Group::free(0), Group::free(1)]);
    }

    #[test]
    fn subdivision_invariance_for_small_perversities() {
        for name in ["cone-circle", "cone-sphere", "mobius", "pinched-torus"] {
            let x = crate::models::complex(name).unwrap();
            let sx = x.barycentric();
            for pv in [-1i64, 0] {
                let p = Perversity::from_fn(&x, |s| pv.min(s.codim as i64 - 2));
                let ps = Perversity::from_fn(&sx, |s| pv.min(s.codim as i64 - 2));
                assert!(p.warnings(&x).is_empty());
                assert_eq!(intersection_homology(&x, &p).unwrap(), intersection_homology(&sx, &ps).unwrap(), "{name} {pv}");
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn allowability_is_monotone(pv in -2i64..3, which in 0usize..4, dim in 0usize..3) {
            let name = ["cone-circle", "cone-two-circles", "cone-sphere", "pinched-torus"][which];
            let x = crate::models::complex(name).unwrap();
            let lo = Perversity::from_fn(&x, |_| pv);
            let hi = Perversity::from_fn(&x, |_| pv + 1);
            for s in x.simplices(dim.min(x.top_dim())) {
                proptest::prop_assert!(!is_allowable(&x, s, &lo) || is_allowable(&x, s, &hi));
            }
            let a = intersection_chain_complex(&x, &lo).unwrap();
            let b = intersection_chain_complex(&x, &hi).unwrap();
            for (l, h) in a.ranks().iter().zip(b.ranks()) {
                proptest::prop_assert!(*l <= h);
            }
        }
    }
}
