//! Standard filtered objects: simplices, boundaries, horns, outer
//! skeleta, truncated nerves, ordered complexes, strata, and horn
//! admissibility with its retraction witness.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::fsset::{face_closure, sub, Builder, FMap, FSSet, Nf, VertexIndex};
use crate::poset::{Chain, Poset};
use crate::product::{tensor, tensor_factors};
use crate::simplex;

/// Canonical key of a vertex subset, e.g. `{0,2}`.
pub fn subset_key(vs: &[usize]) -> String {
    format!("{{{}}}", vs.iter().join(","))
}

pub fn parse_subset_key(key: &str) -> Option<Vec<usize>> {
    let inner = key.strip_prefix('{')?.strip_suffix('}')?;
    inner.split(',').map(|t| t.trim().parse().ok()).collect()
}

/// The filtered simplex Δ^φ. Keys are vertex subsets; enumeration is by
/// dimension, then lexicographic on subsets.
pub fn standard_simplex(poset: Arc<Poset>, phi: &[usize]) -> Result<FSSet> {
    simplex_sub(poset, phi, |_| true)
}

/// Sub-object of Δ^φ on the vertex subsets satisfying `keep`, which must be
/// closed under taking nonempty subsets.
pub fn simplex_sub(poset: Arc<Poset>, phi: &[usize], keep: impl Fn(&[usize]) -> bool) -> Result<FSSet> {
    if phi.is_empty() || !poset.is_chain(phi) {
        return Err(Error::Precondition("φ must be a nonempty nondecreasing chain".into()));
    }
    let n = phi.len() - 1;
    let mut b = Builder::new(poset);
    for d in 0..=n {
        for vs in (0..=n).combinations(d + 1) {
            if !keep(&vs) {
                continue;
            }
            let filt: Chain = vs.iter().map(|&v| phi[v]).collect();
            let faces = if d == 0 {
                Vec::new()
            } else {
                (0..=d)
                    .map(|i| {
                        let mut f = vs.clone();
                        f.remove(i);
                        let id = b.id(&subset_key(&f)).ok_or_else(|| {
                            Error::Precondition(format!("sub-object not closed under faces at {}", subset_key(&vs)))
                        })?;
                        Ok(Nf::nd(id))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            b.add(&subset_key(&vs), filt, faces)?;
        }
    }
    Ok(b.finish().0)
}

pub fn boundary(poset: Arc<Poset>, phi: &[usize]) -> Result<FSSet> {
    if phi.len() < 2 {
        return Err(Error::Precondition("boundary needs dimension ≥ 1".into()));
    }
    let n = phi.len();
    simplex_sub(poset, phi, |vs| vs.len() < n)
}

/// Λ_k^φ: union of the faces d_iΔ^φ with i ≠ k.
pub fn horn(poset: Arc<Poset>, phi: &[usize], k: usize) -> Result<FSSet> {
    check_horn(phi, k)?;
    let n = phi.len() - 1;
    simplex_sub(poset, phi, |vs| in_horn(vs, n, k))
}

/// Whether the face spanned by `vs` lies in Λ_k of Δ^n.
pub fn in_horn(vs: &[usize], n: usize, k: usize) -> bool {
    (0..=n).any(|i| i != k && !vs.contains(&i))
}

pub fn outer_skeleton(poset: Arc<Poset>, phi: &[usize]) -> Result<FSSet> {
    if !phi.windows(2).all(|w| poset.lt(w[0], w[1])) {
        return Err(Error::Precondition("outer skeleton needs a strictly increasing chain".into()));
    }
    simplex_sub(poset, phi, |vs| vs.len() == 1 || (vs.len() == 2 && vs[1] == vs[0] + 1))
}

fn check_horn(phi: &[usize], k: usize) -> Result<()> {
    if phi.len() < 2 {
        return Err(Error::Precondition("horns need dimension ≥ 1".into()));
    }
    if k >= phi.len() {
        return Err(Error::Precondition(format!("horn index {k} out of range for a {}-simplex", phi.len() - 1)));
    }
    Ok(())
}

/// φ(e_k) equals the filtration of a neighbouring vertex.
pub fn is_admissible(phi: &[usize], k: usize) -> Result<bool> {
    check_horn(phi, k)?;
    let n = phi.len() - 1;
    Ok((k < n && phi[k] == phi[k + 1]) || (k > 0 && phi[k] == phi[k - 1]))
}

/// φ = φ ∘ D_k ∘ S_m for some m ∈ {k − 1, k}, evaluated on vertices.
pub fn is_admissible_via_degeneracy(phi: &[usize], k: usize) -> Result<bool> {
    check_horn(phi, k)?;
    let n = phi.len() - 1;
    let candidates = [k.checked_sub(1), Some(k)];
    Ok(candidates.into_iter().flatten().filter(|&m| m < n).any(|m| {
        let composite = simplex::compose(&simplex::coface(k, n), &simplex::codegeneracy(m, n - 1));
        composite.iter().enumerate().all(|(i, &c)| phi[c] == phi[i])
    }))
}

/// The neighbour `k'` used by the horn constructions: `k + 1` when it
/// matches, else `k − 1`.
pub fn default_partner(phi: &[usize], k: usize) -> Result<usize> {
    if !is_admissible(phi, k)? {
        return Err(Error::Precondition("horn is not admissible".into()));
    }
    let n = phi.len() - 1;
    Ok(if k < n && phi[k + 1] == phi[k] { k + 1 } else { k - 1 })
}

/// Constructive witness that Λ_k^φ ⊆ Δ^φ is a filtered homotopy
/// equivalence.
#[derive(Clone, Debug)]
pub struct HornRetraction {
    pub simplex: FSSet,
    pub horn: FSSet,
    pub incl: FMap,
    /// Δ^φ → Λ_k^φ collapsing e_{k'} onto e_k.
    pub r: FMap,
    /// Δ¹ ⊗ Δ^φ.
    pub cylinder: FSSet,
    /// Δ¹ ⊗ Δ^φ → Δ^φ.
    pub h: FMap,
    /// Factor simplices of each non-degenerate simplex of the cylinder.
    pub factors: Vec<(Nf, Nf)>,
    pub partner: usize,
    /// Which end of the cylinder carries `incl ∘ r`; the other carries the
    /// identity.
    pub retraction_end: usize,
}

pub fn horn_retraction(poset: Arc<Poset>, phi: &[usize], k: usize) -> Result<HornRetraction> {
    let kp = default_partner(phi, k)?;
    let simplex = standard_simplex(poset.clone(), phi)?;
    let horn_set = horn(poset.clone(), phi, k)?;
    let incl = FMap {
        images: (0..horn_set.len()).map(|i| Nf::nd(simplex.id(horn_set.name(i)).expect("horn key"))).collect(),
    };
    let r_vertex = |v: usize| if v == kp { k } else { v };
    let hidx = VertexIndex::new(&horn_set).expect("horn is vertex-determined");
    let mut r = Vec::with_capacity(simplex.len());
    for id in 0..simplex.len() {
        let tuple: Vec<usize> = simplex.vertices(id).into_iter().map(r_vertex).collect();
        let keys: Vec<usize> = tuple
            .iter()
            .map(|&v| horn_set.id(&subset_key(&[v])).expect("vertex in horn"))
            .collect();
        r.push(hidx.lookup(&keys).ok_or_else(|| Error::Invariant("retraction leaves the horn".into()))?);
    }
    let interval = standard_simplex(Arc::new(Poset::point()), &[0, 0])?;
    let (cylinder, factors) = tensor_factors(&interval, &simplex)?;
    let sidx = VertexIndex::new(&simplex).expect("simplex is vertex-determined");
    // The collapse must happen at the end that keeps the vertex map monotone.
    let retraction_end = if kp == k + 1 { 0 } else { 1 };
    let mut h = Vec::with_capacity(cylinder.len());
    let vertex_coords = cylinder_vertex_coords(&cylinder, &factors, &interval, &simplex);
    for id in 0..cylinder.len() {
        let tuple: Vec<usize> = cylinder
            .vertices(id)
            .into_iter()
            .map(|v| {
                let (eps, i) = vertex_coords[v];
                let target = if eps == retraction_end { r_vertex(i) } else { i };
                simplex.id(&subset_key(&[target])).expect("vertex")
            })
            .collect();
        h.push(sidx.lookup(&tuple).ok_or_else(|| Error::Invariant("homotopy is not simplicial".into()))?);
    }
    Ok(HornRetraction {
        simplex,
        horn: horn_set,
        incl,
        r: FMap { images: r },
        cylinder,
        h: FMap { images: h },
        factors,
        partner: kp,
        retraction_end,
    })
}

/// `(ε, i)` coordinates of the vertices of Δ¹ ⊗ Δ^φ.
pub fn cylinder_vertex_coords(
    cyl: &FSSet,
    factors: &[(Nf, Nf)],
    interval: &FSSet,
    simplex: &FSSet,
) -> Vec<(usize, usize)> {
    cyl.ids_of_dim(0)
        .map(|v| {
            let (a, b) = factors[v];
            (interval.vertices(a.base)[0], simplex.vertices(b.base)[0])
        })
        .collect()
}

/// Outcome of checking a [`HornRetraction`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetractionCheck {
    pub r_valid: bool,
    pub h_valid: bool,
    pub identity_end: bool,
    pub retraction_end: bool,
    pub restricts_to_horn: bool,
    pub r_is_left_inverse: bool,
}

impl RetractionCheck {
    /// Everything the witness can honestly certify.
    pub fn witness_holds(&self) -> bool {
        self.r_valid && self.h_valid && self.identity_end && self.retraction_end && self.restricts_to_horn
    }
}

pub fn check_retraction(w: &HornRetraction) -> RetractionCheck {
    let r_valid = crate::fsset::validate_map(&w.simplex, &w.horn, &w.r).is_clean();
    let h_valid = crate::fsset::validate_map(&w.cylinder, &w.simplex, &w.h).is_clean();
    let interval = standard_simplex(Arc::new(Poset::point()), &[0, 0]).expect("interval");
    let coords = cylinder_vertex_coords(&w.cylinder, &w.factors, &interval, &w.simplex);
    let mut identity_end = true;
    let mut retraction_end = true;
    let mut restricts_to_horn = true;
    let horn_ids: BTreeSet<usize> = w.incl.images.iter().map(|y| y.base).collect();
    let n = w.simplex.dim(w.simplex.len() - 1);
    for id in 0..w.cylinder.len() {
        let vs = w.cylinder.vertices(id);
        let eps: BTreeSet<usize> = vs.iter().map(|&v| coords[v].0).collect();
        let mut second: Vec<usize> = vs.iter().map(|&v| coords[v].1).collect();
        second.dedup();
        let base = w.simplex.id(&subset_key(&second)).expect("projection");
        if eps.len() == 1 && second.len() == vs.len() {
            let end = *eps.iter().next().unwrap();
            let got = w.h.images[id];
            if end == w.retraction_end {
                let r = w.r.images[base];
                let expect = w.incl.apply(&w.horn, r);
                retraction_end &= got == expect;
            } else {
                identity_end &= got == Nf::nd(base);
            }
        }
        if in_horn(&w.simplex.vertices(base), n, horn_index(w)) {
            restricts_to_horn &= horn_ids.contains(&w.h.images[id].base);
        }
    }
    let ri = w.incl.then(&w.horn, &w.simplex, &w.r);
    let r_is_left_inverse = ri == FMap::identity(&w.horn);
    RetractionCheck { r_valid, h_valid, identity_end, retraction_end, restricts_to_horn, r_is_left_inverse }
}

fn horn_index(w: &HornRetraction) -> usize {
    // The horn omits exactly one codimension-one face; recover its index.
    let n = w.simplex.dim(w.simplex.len() - 1);
    (0..=n)
        .find(|&k| {
            let mut f: Vec<usize> = (0..=n).collect();
            f.remove(k);
            w.horn.id(&subset_key(&f)).is_none()
        })
        .expect("horn misses one face")
}

/// N(P) truncated at dimension `d`, with chains as keys.
pub fn nerve(poset: Arc<Poset>, d: usize) -> FSSet {
    let mut b = Builder::new(poset.clone());
    for n in 0..=d {
        for c in poset.nondegenerate_simplices(n) {
            let faces = if n == 0 {
                Vec::new()
            } else {
                (0..=n)
                    .map(|i| {
                        let mut f = c.clone();
                        f.remove(i);
                        Nf::nd(b.id(&poset.fmt_chain(&f)).expect("face chain"))
                    })
                    .collect()
            };
            b.add(&poset.fmt_chain(&c), c.clone(), faces).expect("nerve simplex");
        }
    }
    b.finish().0
}

/// Ordered simplicial complex given by maximal simplices and a global
/// vertex order (the order of `vertices`). Filtration comes from
/// `vertex_filt`, which must be monotone along every simplex.
pub fn ordered_complex(
    poset: Arc<Poset>,
    vertices: &[&str],
    vertex_filt: &[usize],
    maximal: &[Vec<&str>],
) -> Result<FSSet> {
    let pos = |name: &str| {
        vertices
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::Parse(format!("unknown vertex `{name}`")))
    };
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    for m in maximal {
        let mut vs: Vec<usize> = m.iter().map(|v| pos(v)).collect::<Result<_>>()?;
        vs.sort();
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse("repeated vertex in a simplex".into()));
        }
        for d in 1..=vs.len() {
            for f in vs.iter().copied().combinations(d) {
                all.insert(f);
            }
        }
    }
    for v in 0..vertices.len() {
        all.insert(vec![v]);
    }
    let mut sorted: Vec<Vec<usize>> = all.into_iter().collect();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let key = |vs: &[usize]| vs.iter().map(|&v| vertices[v]).join(".");
    let mut b = Builder::new(poset);
    for vs in &sorted {
        let filt: Chain = vs.iter().map(|&v| vertex_filt[v]).collect();
        let faces = if vs.len() == 1 {
            Vec::new()
        } else {
            (0..vs.len())
                .map(|i| {
                    let mut f = vs.clone();
                    f.remove(i);
                    Nf::nd(b.id(&key(&f)).expect("face present"))
                })
                .collect()
        };
        b.add(&key(vs), filt, faces)?;
    }
    Ok(b.finish().0)
}

/// Sub-object of simplices with constant filtration `p`.
pub fn stratum(x: &FSSet, p: usize) -> Result<(FSSet, FMap)> {
    if p >= x.poset().len() {
        return Err(Error::UnknownElement(format!("#{p}")));
    }
    let keep: Vec<bool> = (0..x.len()).map(|id| x.filt(id).iter().all(|&q| q == p)).collect();
    sub(x, &keep)
}

/// Forgets the filtration (result lives over `{*}`).
pub fn forget(x: &FSSet) -> FSSet {
    let point = Arc::new(Poset::point());
    x.refiltered(point, |_, f| vec![0; f.len()]).expect("trivial refiltration")
}

/// F(K) = K ⊗ N(P), with N(P) truncated at `trunc`.
pub fn free(k: &FSSet, poset: Arc<Poset>, trunc: usize) -> Result<FSSet> {
    tensor(k, &nerve(poset, trunc))
}

/// Smallest sub-object containing the given keys.
pub fn generated(x: &FSSet, keys: &[&str]) -> Result<(FSSet, FMap)> {
    let seeds: Vec<usize> =
        keys.iter().map(|k| x.id(k).ok_or_else(|| Error::Parse(format!("unknown key `{k}`")))).collect::<Result<_>>()?;
    sub(x, &face_closure(x, &seeds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsset::{validate, validate_map};

    fn p2() -> Arc<Poset> {
        Arc::new(Poset::chain(2))
    }

    #[test]
    fn standard_counts() {
        let p = p2();
        let s = standard_simplex(p.clone(), &[0, 0, 1]).unwrap();
        assert_eq!(s.nd_counts(), vec![3, 3, 1]);
        assert!(validate(&s).is_clean());
        let e = standard_simplex(p.clone(), &[0, 1]).unwrap();
        assert_eq!(e.filt(0), &[0]);
        assert_eq!(e.filt(1), &[1]);
        assert_eq!(standard_simplex(p.clone(), &[1]).unwrap().nd_counts(), vec![1]);
    }

    #[test]
    fn boundary_and_horn_counts() {
        let p = p2();
        assert_eq!(boundary(p.clone(), &[0, 1]).unwrap().nd_counts(), vec![2]);
        assert_eq!(boundary(p.clone(), &[0, 0, 1]).unwrap().nd_counts(), vec![3, 3]);
        assert!(boundary(p.clone(), &[0]).is_err());
        let h = horn(p.clone(), &[0, 1], 0).unwrap();
        assert_eq!(h.nd_counts(), vec![1]);
        assert_eq!(h.name(0), "{0}");
        assert_eq!(horn(p.clone(), &[0, 0, 1], 1).unwrap().nd_counts(), vec![3, 2]);
        assert!(horn(p.clone(), &[0, 0, 1], 3).is_err());
    }

    #[test]
    fn sub_objects_validate_as_inclusions() {
        let p = p2();
        let phi = [0, 0, 1];
        let s = standard_simplex(p.clone(), &phi).unwrap();
        for obj in [boundary(p.clone(), &phi).unwrap(), horn(p.clone(), &phi, 1).unwrap()] {
            assert!(validate(&obj).is_clean());
            let incl = FMap { images: (0..obj.len()).map(|i| Nf::nd(s.id(obj.name(i)).unwrap())).collect() };
            assert!(validate_map(&obj, &s, &incl).is_clean());
            assert!(incl.is_injective_nd());
        }
    }

    #[test]
    fn outer_skeleta() {
        let p = Arc::new(Poset::chain(3));
        assert_eq!(outer_skeleton(p.clone(), &[0, 1, 2]).unwrap().nd_counts(), vec![3, 2]);
        assert_eq!(outer_skeleton(p.clone(), &[0, 1]).unwrap().nd_counts(), vec![2, 1]);
        assert_eq!(outer_skeleton(p.clone(), &[0]).unwrap().nd_counts(), vec![1]);
        assert!(outer_skeleton(p, &[0, 0]).is_err());
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&[0, 0, 1], 1).unwrap());
        assert!(!is_admissible(&[0, 1], 0).unwrap());
        for k in 0..3 {
            assert!(is_admissible(&[2, 2, 2], k).unwrap());
        }
        assert!(is_admissible_via_degeneracy(&[0, 0, 1], 1).unwrap());
        assert!(!is_admissible_via_degeneracy(&[0, 1], 1).unwrap());
        assert!(is_admissible(&[0, 1], 2).is_err());
    }

    #[test]
    fn retraction_collapses_towards_k() {
        let p = p2();
        let w = horn_retraction(p.clone(), &[0, 0, 1], 1).unwrap();
        assert_eq!(w.partner, 0);
        let e0 = w.simplex.id("{0}").unwrap();
        let img = w.r.images[e0];
        assert_eq!(w.horn.name(img.base), "{1}");
        let c = check_retraction(&w);
        assert!(c.witness_holds(), "{c:?}");
        assert!(!c.r_is_left_inverse);

        let w = horn_retraction(p, &[0, 0], 0).unwrap();
        let e1 = w.simplex.id("{1}").unwrap();
        assert_eq!(w.horn.name(w.r.images[e1].base), "{0}");
        assert_eq!(w.cylinder.nd_counts(), vec![4, 5, 2]);
        assert!(check_retraction(&w).witness_holds());
        // For Δ¹ the horn is a point and r really is a retraction.
        assert!(check_retraction(&w).r_is_left_inverse);
    }

    #[test]
    fn inadmissible_retraction_is_rejected() {
        assert!(horn_retraction(p2(), &[0, 1], 0).is_err());
    }

    #[test]
    fn strata_of_an_edge() {
        let p = p2();
        let e = standard_simplex(p.clone(), &[0, 1]).unwrap();
        let (s0, _) = stratum(&e, 0).unwrap();
        assert_eq!(s0.nd_counts(), vec![1]);
        assert_eq!(s0.name(0), "{0}");
        let q = Arc::new(Poset::chain(3));
        let e = standard_simplex(q, &[0, 1]).unwrap();
        assert!(stratum(&e, 2).unwrap().0.is_empty());
    }

    #[test]
    fn forget_and_free() {
        let p = p2();
        let e = standard_simplex(p.clone(), &[0, 1]).unwrap();
        let u = forget(&e);
        assert_eq!(u.nd_counts(), vec![2, 1]);
        let pt = standard_simplex(Arc::new(Poset::point()), &[0]).unwrap();
        let f = free(&pt, p.clone(), 1).unwrap();
        assert_eq!(f.nd_counts(), vec![2, 1]);
        assert!(validate(&f).is_clean());
    }
}
