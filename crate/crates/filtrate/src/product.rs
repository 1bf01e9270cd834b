//! Products of filtered simplicial sets.
//!
//! Non-degenerate simplices of `X × Y` are pairs `(x ∘ μ, y ∘ ν)` with `x`,
//! `y` non-degenerate and `μ`, `ν` surjections with disjoint repeat sets.
//! For Δ^p × Δ^q in top dimension these are the (p,q)-shuffles.

use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::fsset::{Builder, FSSet, Nf};
use crate::poset::{Chain, Poset};
use crate::simplex;
use std::sync::Arc;

/// Which filtration the product carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    /// Filtration of the right factor; the left one is treated as a plain
    /// simplicial set.
    Tensor,
    /// Pairs with equal filtration.
    Fibered,
}

/// Product with the factor simplices of each non-degenerate simplex.
pub fn product(x: &FSSet, y: &FSSet, kind: ProductKind) -> Result<(FSSet, Vec<(Nf, Nf)>)> {
    if kind == ProductKind::Fibered && x.poset() != y.poset() {
        return Err(Error::Precondition("fibered product over different posets".into()));
    }
    let poset: Arc<Poset> = y.poset_arc();
    let mut b = Builder::new(poset);
    let mut index: HashMap<(usize, usize, u32, u32), usize> = HashMap::new();
    let mut factors: Vec<(Nf, Nf)> = Vec::new();
    let xt = x.top_dim();
    let yt = y.top_dim();
    let (Some(xt), Some(yt)) = (xt, yt) else {
        return Ok((b.finish().0, Vec::new()));
    };
    for n in 0..=(xt + yt) {
        for a in 0..=xt.min(n) {
            for bd in 0..=yt.min(n) {
                if a + bd < n {
                    continue;
                }
                let masks = mask_pairs(n, a, bd);
                for xi in x.ids_of_dim(a) {
                    for yi in y.ids_of_dim(bd) {
                        for &(mx, my) in &masks {
                            let xs = Nf { base: xi, word: mx };
                            let ys = Nf { base: yi, word: my };
                            let filt: Chain = match kind {
                                ProductKind::Tensor => y.nf_filt(ys),
                                ProductKind::Fibered => {
                                    let fx = x.nf_filt(xs);
                                    if fx != y.nf_filt(ys) {
                                        continue;
                                    }
                                    fx
                                }
                            };
                            let faces = if n == 0 {
                                Vec::new()
                            } else {
                                (0..=n).map(|i| product_face(x, y, &index, xs, ys, i)).collect::<Result<Vec<_>>>()?
                            };
                            let name = format!("({},{})", x.fmt_nf(xs), y.fmt_nf(ys));
                            let id = b.add(&name, filt, faces)?;
                            index.insert((xi, yi, mx, my), id);
                            factors.push((xs, ys));
                        }
                    }
                }
            }
        }
    }
    let (out, remap) = b.finish();
    let mut sorted = vec![(Nf::nd(0), Nf::nd(0)); factors.len()];
    for (old, f) in factors.into_iter().enumerate() {
        sorted[remap[old]] = f;
    }
    Ok((out, sorted))
}

fn mask_pairs(n: usize, a: usize, b: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let positions: Vec<usize> = (0..n).collect();
    for jx in positions.iter().copied().combinations(n - a) {
        let rest: Vec<usize> = positions.iter().copied().filter(|p| !jx.contains(p)).collect();
        for jy in rest.into_iter().combinations(n - b) {
            let mx = jx.iter().fold(0u32, |m, &i| m | 1 << i);
            let my = jy.iter().fold(0u32, |m, &i| m | 1 << i);
            out.push((mx, my));
        }
    }
    out
}

fn product_face(
    x: &FSSet,
    y: &FSSet,
    index: &HashMap<(usize, usize, u32, u32), usize>,
    xs: Nf,
    ys: Nf,
    i: usize,
) -> Result<Nf> {
    let fx = x.nf_face(xs, i);
    let fy = y.nf_face(ys, i);
    pair_in(index, x.nf_dim(fx), fx, fy).ok_or_else(|| Error::Invariant("product face not yet constructed".into()))
}

fn pair_in(index: &HashMap<(usize, usize, u32, u32), usize>, m: usize, fx: Nf, fy: Nf) -> Option<Nf> {
    let common = fx.word & fy.word;
    let collapse = simplex::surjection(common, m);
    let reduce = |full: Vec<usize>| -> u32 {
        let mut reduced = vec![0; collapse[m] + 1];
        for (t, &c) in collapse.iter().enumerate() {
            reduced[c] = full[t];
        }
        simplex::repeat_mask(&reduced)
    };
    let mx = reduce(simplex::surjection(fx.word, m));
    let my = reduce(simplex::surjection(fy.word, m));
    index.get(&(fx.base, fy.base, mx, my)).map(|&id| Nf { base: id, word: common })
}

/// Finds the simplex of a product with given factor simplices.
pub struct PairIndex {
    map: HashMap<(usize, usize, u32, u32), usize>,
}

impl PairIndex {
    pub fn new(factors: &[(Nf, Nf)]) -> PairIndex {
        PairIndex { map: factors.iter().enumerate().map(|(id, (a, b))| ((a.base, b.base, a.word, b.word), id)).collect() }
    }

    /// The simplex `(xs, ys)` of `X × Y`; both must have the same dimension.
    pub fn lookup(&self, x: &FSSet, xs: Nf, ys: Nf) -> Option<Nf> {
        pair_in(&self.map, x.nf_dim(xs), xs, ys)
    }
}

/// K ⊗ X: the product K × X filtered through X.
pub fn tensor(k: &FSSet, x: &FSSet) -> Result<FSSet> {
    Ok(product(k, x, ProductKind::Tensor)?.0)
}

pub fn tensor_factors(k: &FSSet, x: &FSSet) -> Result<(FSSet, Vec<(Nf, Nf)>)> {
    product(k, x, ProductKind::Tensor)
}

/// X ×_{N(P)} Y.
pub fn fibered_product(x: &FSSet, y: &FSSet) -> Result<FSSet> {
    Ok(product(x, y, ProductKind::Fibered)?.0)
}
