//! Enumeration of filtered maps between finite filtered simplicial sets.
//!
//! Vertices are assigned first; every simplex is scheduled as soon as all
//! of its vertices are, so that face constraints are checked as early as
//! possible. Candidates for an edge are looked up by vertex pair, and for
//! a higher simplex by the images of its first two faces.

use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::fsset::{FMap, FSSet, Nf};

/// Every simplex (degenerate or not) of `x` in dimension `d`, grouped by
/// lookup key.
pub struct Candidates {
    by_dim: Vec<HashMap<Vec<usize>, Vec<Nf>>>,
}

impl Candidates {
    pub fn new(x: &FSSet, max_dim: usize) -> Candidates {
        let mut by_dim: Vec<HashMap<Vec<usize>, Vec<Nf>>> = vec![HashMap::new(); max_dim + 1];
        for base in 0..x.len() {
            let m = x.dim(base);
            for d in m.max(1)..=max_dim {
                for rep in (0..d).combinations(d - m) {
                    let word = rep.iter().fold(0u32, |w, &i| w | 1 << i);
                    let y = Nf { base, word };
                    let key = if d == 1 { x.nf_vertices(y) } else { Self::key(x.nf_face(y, 0), x.nf_face(y, 1)) };
                    by_dim[d].entry(key).or_default().push(y);
                }
            }
        }
        Candidates { by_dim }
    }

    fn key(f0: Nf, f1: Nf) -> Vec<usize> {
        vec![f0.base, f0.word as usize, f1.base, f1.word as usize]
    }

    /// Edges of `x` with the given endpoints.
    pub fn edges(&self, u: usize, v: usize) -> &[Nf] {
        self.lookup(1, &[u, v])
    }

    /// Simplices of dimension `d ≥ 2` whose faces 0 and 1 are `f0`, `f1`.
    pub fn with_faces(&self, d: usize, f0: Nf, f1: Nf) -> &[Nf] {
        self.lookup(d, &Self::key(f0, f1))
    }

    fn lookup(&self, d: usize, key: &[usize]) -> &[Nf] {
        self.by_dim.get(d).and_then(|m| m.get(key)).map_or(&[], |v| v.as_slice())
    }
}

fn schedule(a: &FSSet) -> Vec<usize> {
    let mut placed = vec![false; a.len()];
    let mut order = Vec::with_capacity(a.len());
    let higher: Vec<usize> = (0..a.len()).filter(|&i| a.dim(i) > 0).collect();
    for v in a.ids_of_dim(0) {
        placed[v] = true;
        order.push(v);
        for &s in &higher {
            if !placed[s] && a.simplex(s).faces.iter().all(|f| placed[f.base]) {
                placed[s] = true;
                order.push(s);
            }
        }
    }
    order
}

/// All filtered maps `a → x`. Fails once more than `budget` maps exist.
pub fn enum_fmaps(a: &FSSet, x: &FSSet, budget: usize) -> Result<Vec<FMap>> {
    let mut out = Vec::new();
    search(a, x, budget, &mut |f| out.push(f))?;
    Ok(out)
}

/// Number of filtered maps `a → x`, with the same budget semantics.
pub fn count_fmaps(a: &FSSet, x: &FSSet, budget: usize) -> Result<usize> {
    let mut n = 0;
    search(a, x, budget, &mut |_| n += 1)?;
    Ok(n)
}

fn search(a: &FSSet, x: &FSSet, budget: usize, emit: &mut dyn FnMut(FMap)) -> Result<()> {
    if a.is_empty() {
        emit(FMap { images: Vec::new() });
        return Ok(());
    }
    let top = a.top_dim().unwrap_or(0);
    let cands = Candidates::new(x, top);
    let order = schedule(a);
    let verts: Vec<Vec<usize>> = (0..a.len()).map(|i| a.vertices(i)).collect();
    let mut st = State { a, x, cands: &cands, order: &order, verts: &verts, images: vec![None; a.len()], found: 0, budget };
    st.go(0, emit)
}

struct State<'a> {
    a: &'a FSSet,
    x: &'a FSSet,
    cands: &'a Candidates,
    order: &'a [usize],
    verts: &'a [Vec<usize>],
    images: Vec<Option<Nf>>,
    found: usize,
    budget: usize,
}

impl State<'_> {
    fn go(&mut self, pos: usize, emit: &mut dyn FnMut(FMap)) -> Result<()> {
        if pos == self.order.len() {
            self.found += 1;
            if self.found > self.budget {
                return Err(Error::Budget { limit: self.budget, context: "enumerating filtered maps".into() });
            }
            emit(FMap { images: self.images.iter().map(|y| y.expect("assigned")).collect() });
            return Ok(());
        }
        let s = self.order[pos];
        let filt = self.a.filt(s);
        let options: Vec<Nf> = if self.a.dim(s) == 0 {
            self.x.ids_of_dim(0).filter(|&v| self.x.filt(v) == filt).map(Nf::nd).collect()
        } else {
            let faces = &self.a.simplex(s).faces;
            let pool = if faces.len() == 2 {
                let v = &self.verts[s];
                let img = |i: usize| self.images[v[i]].expect("vertex first").base;
                self.cands.edges(img(0), img(1))
            } else {
                self.cands.with_faces(faces.len() - 1, self.image_of(faces[0]), self.image_of(faces[1]))
            };
            pool.iter()
                .copied()
                .filter(|&y| {
                    self.x.nf_filt(y) == filt
                        && faces.iter().enumerate().all(|(i, &f)| self.x.nf_face(y, i) == self.image_of(f))
                })
                .collect()
        };
        for y in options {
            self.images[s] = Some(y);
            self.go(pos + 1, emit)?;
        }
        self.images[s] = None;
        Ok(())
    }

    fn image_of(&self, f: Nf) -> Nf {
        let img = self.images[f.base].expect("face first");
        if f.word == 0 {
            return img;
        }
        FMap::apply_one(self.a, img, f)
    }
}

impl FMap {
    /// Image of `y` under a map sending `y.base` to `img`.
    pub fn apply_one(dom: &FSSet, img: Nf, y: Nf) -> Nf {
        let d = dom.dim(y.base);
        let mu = crate::simplex::surjection(img.word, d);
        let eta = dom.surjection_of(y);
        Nf { base: img.base, word: crate::simplex::repeat_mask(&crate::simplex::compose(&mu, &eta)) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsset::validate_map;
    use crate::poset::Poset;
    use crate::standard::{horn, standard_simplex};
    use crate::subdivision::sd_simplex;
    use std::sync::Arc;

    // Brute force over all dimension-compatible assignments.
    fn brute(a: &FSSet, x: &FSSet) -> usize {
        let top = a.top_dim().unwrap();
        let c = Candidates::new(x, top);
        let pools: Vec<Vec<Nf>> = (0..a.len())
            .map(|i| match a.dim(i) {
                0 => x.ids_of_dim(0).map(Nf::nd).collect(),
                d => c.by_dim[d].values().flatten().copied().collect(),
            })
            .collect();
        pools
            .iter()
            .map(|p| p.iter().copied())
            .multi_cartesian_product()
            .filter(|imgs| validate_map(a, x, &FMap { images: imgs.clone() }).is_clean())
            .count()
    }

    #[test]
    fn small_counts() {
        let p = Arc::new(Poset::chain(2));
        let e = standard_simplex(p.clone(), &[0, 1]).unwrap();
        assert_eq!(count_fmaps(&e, &e, 100).unwrap(), 1);
        let v0 = standard_simplex(p.clone(), &[0]).unwrap();
        let x = standard_simplex(p.clone(), &[0, 0, 1]).unwrap();
        assert_eq!(count_fmaps(&v0, &x, 100).unwrap(), 2);
        let s = sd_simplex(p.clone(), &[0, 1]).unwrap();
        assert_eq!(count_fmaps(&s.set, &e, 100).unwrap(), 1);
        let h = horn(p.clone(), &[0, 0, 1], 1).unwrap();
        for (a, b) in [(&e, &x), (&h, &x), (&x, &x), (&h, &h)] {
            assert_eq!(count_fmaps(a, b, 10_000).unwrap(), brute(a, b));
        }
        for f in enum_fmaps(&h, &x, 100).unwrap() {
            assert!(validate_map(&h, &x, &f).is_clean());
        }
    }

    #[test]
    fn budget_is_loud() {
        let p = Arc::new(Poset::point());
        let x = standard_simplex(p.clone(), &[0, 0, 0]).unwrap();
        let e = standard_simplex(p, &[0, 0]).unwrap();
        assert_eq!(count_fmaps(&e, &x, 100).unwrap(), 6);
        assert!(matches!(count_fmaps(&e, &x, 5), Err(Error::Budget { limit: 5, .. })));
    }
}
