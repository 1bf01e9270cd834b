use std::collections::HashSet;
use std::sync::Arc;

use filtrate::ex::{beta, check_horn_fill, ex, ex3_horn_fill, ex_on_map, transpose, transpose_back};
use filtrate::fsset::{validate_map, FMap, FSSet, Nf};
use filtrate::hom::enum_fmaps;
use filtrate::standard::{boundary, horn, standard_simplex};
use filtrate::subdivision::{last_vertex_filtered, mask_vertices, sd};
use filtrate::Poset;

const BUDGET: usize = 200_000;

fn pairs() -> Vec<(&'static str, FSSet, FSSet)> {
    let p = Arc::new(Poset::chain(2));
    let s = |phi: &[usize]| standard_simplex(p.clone(), phi).unwrap();
    vec![
        ("horn into simplex", horn(p.clone(), &[0, 0, 1], 1).unwrap(), s(&[0, 0, 1])),
        ("edge into edge", s(&[0, 1]), s(&[0, 1])),
        ("circle into edge", boundary(p.clone(), &[0, 0]).unwrap(), s(&[0, 0])),
        ("edge into horn", s(&[0, 0]), horn(p.clone(), &[0, 0, 1], 1).unwrap()),
        ("outer horn into horn", horn(p.clone(), &[0, 0, 1], 0).unwrap(), horn(p.clone(), &[0, 0, 1], 1).unwrap()),
        ("edge into simplex", s(&[1, 1]), s(&[0, 1, 1])),
    ]
}

#[test]
fn transposition_is_a_bijection() {
    for (tag, a, x) in pairs() {
        let sda = sd(&a).unwrap();
        let cap = a.top_dim().unwrap();
        let e = ex(&x, cap, BUDGET).unwrap();
        let down = enum_fmaps(&sda.set, &x, BUDGET).unwrap();
        let up = enum_fmaps(&a, &e.set, BUDGET).unwrap();
        assert_eq!(down.len(), up.len(), "{tag}");
        assert!(!down.is_empty(), "{tag}");
        let mut seen = HashSet::new();
        for g in &down {
            let t = transpose(&a, &sda, &x, &e, g).unwrap();
            assert!(validate_map(&a, &e.set, &t).is_clean(), "{tag}");
            assert_eq!(&transpose_back(&a, &sda, &x, &e, &t).unwrap(), g, "{tag}");
            assert!(seen.insert(t));
        }
        for f in &up {
            let back = transpose_back(&a, &sda, &x, &e, f).unwrap();
            assert!(validate_map(&sda.set, &x, &back).is_clean(), "{tag}");
            assert_eq!(&transpose(&a, &sda, &x, &e, &back).unwrap(), f, "{tag}");
        }
    }
}

#[test]
fn transposition_is_natural_in_the_target() {
    for (tag, a, x) in pairs() {
        let sda = sd(&a).unwrap();
        let cap = a.top_dim().unwrap();
        let ex_x = ex(&x, cap, BUDGET).unwrap();
        // v: X → X given by any endomorphism
        for v in enum_fmaps(&x, &x, BUDGET).unwrap().into_iter().take(4) {
            let ex_v = ex_on_map(&x, &ex_x, &x, &ex_x, &v).unwrap();
            for g in enum_fmaps(&sda.set, &x, BUDGET).unwrap().into_iter().take(6) {
                let vg = g.then(&sda.set, &x, &v);
                let lhs = transpose(&a, &sda, &x, &ex_x, &vg).unwrap();
                let rhs = transpose(&a, &sda, &x, &ex_x, &g).unwrap().then(&a, &ex_x.set, &ex_v);
                assert_eq!(lhs, rhs, "{tag}");
            }
        }
    }
}

#[test]
fn unit_is_a_natural_monomorphism() {
    for (tag, a, x) in pairs() {
        let cap = a.top_dim().unwrap().max(x.top_dim().unwrap());
        let ex_a = ex(&a, cap, BUDGET).unwrap();
        let ex_x = ex(&x, cap, BUDGET).unwrap();
        let ba = beta(&a, &ex_a).unwrap();
        let bx = beta(&x, &ex_x).unwrap();
        for (obj, e, b) in [(&a, &ex_a, &ba), (&x, &ex_x, &bx)] {
            assert!(b.is_injective_nd(), "{tag}");
            assert!(validate_map(obj, &e.set, b).is_clean(), "{tag}");
        }
        for f in enum_fmaps(&a, &x, BUDGET).unwrap() {
            let ex_f = ex_on_map(&a, &ex_a, &x, &ex_x, &f).unwrap();
            assert_eq!(f.then(&a, &x, &bx), ba.then(&a, &ex_a.set, &ex_f), "{tag}");
        }
    }
}

#[test]
fn unit_is_the_transpose_of_last_vertex() {
    let p = Arc::new(Poset::chain(2));
    for phi in [vec![0, 1], vec![0, 0, 1]] {
        let x = standard_simplex(p.clone(), &phi).unwrap();
        let sdx = sd(&x).unwrap();
        let e = ex(&x, phi.len() - 1, BUDGET).unwrap();
        let lv = last_vertex_filtered(&x, &sdx);
        assert_eq!(transpose(&x, &sdx, &x, &e, &lv).unwrap(), beta(&x, &e).unwrap());
    }
}

#[test]
fn transpose_rejects_small_caps() {
    let p = Arc::new(Poset::chain(2));
    let x = standard_simplex(p, &[0, 0, 1]).unwrap();
    let sdx = sd(&x).unwrap();
    let e = ex(&x, 1, BUDGET).unwrap();
    let lv = last_vertex_filtered(&x, &sdx);
    assert!(transpose(&x, &sdx, &x, &e, &lv).is_err());
}

// λ = transpose of `incl ∘ l.v_P` on sd(Λ).
fn unit_on_horn(x: &FSSet, h: &FSSet, e: &filtrate::ex::Ex, incl: &FMap) -> FMap {
    let sdh = sd(h).unwrap();
    let lv = last_vertex_filtered(h, &sdh).then(&sdh.set, h, incl);
    transpose(h, &sdh, x, e, &lv).unwrap()
}

fn horn_case(p: Arc<Poset>, phi: &[usize], k: usize) -> (FSSet, FSSet, FMap) {
    let x = standard_simplex(p.clone(), phi).unwrap();
    let h = horn(p, phi, k).unwrap();
    let incl = FMap { images: (0..h.len()).map(|i| Nf::nd(x.id(h.name(i)).unwrap())).collect() };
    (x, h, incl)
}

#[test]
fn horn_fill_restricts_to_lambda() {
    let p = Arc::new(Poset::chain(2));
    let phi = [0, 0, 1];
    let (x, h, incl) = horn_case(p, &phi, 1);
    let e = ex(&x, 1, BUDGET).unwrap();
    let lambda = unit_on_horn(&x, &h, &e, &incl);
    let fill = ex3_horn_fill(&x, &h, &e, &lambda, &phi, 1).unwrap();
    let check = check_horn_fill(&x, &h, &e, &lambda, &fill).unwrap();
    assert!(check.all(), "{check:?}");
}

#[test]
fn collapsing_lambda_respects_colors() {
    let p = Arc::new(Poset::chain(2));
    let phi = [0, 0, 1];
    let x = standard_simplex(p.clone(), &[0, 1]).unwrap();
    let h = horn(p.clone(), &phi, 0).unwrap();
    let e = ex(&x, 1, BUDGET).unwrap();
    // collapse e0, e1 to {0} and e2 to {1}
    let collapse = FMap {
        images: (0..h.len())
            .map(|i| {
                let vs: Vec<usize> = h.vertices(i).iter().map(|&v| if h.name(v) == "{2}" { 1 } else { 0 }).collect();
                let tuple: Vec<usize> = vs.iter().map(|&v| x.id(&format!("{{{v}}}")).unwrap()).collect();
                filtrate::fsset::VertexIndex::new(&x).unwrap().lookup(&tuple).unwrap()
            })
            .collect(),
    };
    assert!(validate_map(&h, &x, &collapse).is_clean());
    let lambda = unit_on_horn(&x, &h, &e, &collapse);
    let fill = ex3_horn_fill(&x, &h, &e, &lambda, &phi, 0).unwrap();
    assert!(check_horn_fill(&x, &h, &e, &lambda, &fill).unwrap().all());
    for cell in &fill.cells {
        // every image is a degeneracy of a vertex or of the edge, determined by colors
        for img in &cell.images {
            let vs = x.nf_vertices(*img);
            for v in vs {
                let expected = if x.filt(v) == [0] { "{0}" } else { "{1}" };
                assert_eq!(x.name(v), expected);
            }
        }
    }
}

// Classical last-vertex lift on unfiltered chains of subsets.
fn classical_h(k: usize, n_vertices: usize, sigma: &[Vec<u32>], mu: &[u32]) -> Vec<u32> {
    let dk = ((1u32 << n_vertices) - 1) & !(1 << k);
    let f: Vec<usize> = sigma
        .iter()
        .map(|chain| {
            let last = *chain.last().unwrap();
            if last & dk == dk {
                k
            } else {
                31 - last.leading_zeros() as usize
            }
        })
        .collect();
    mu.iter().map(|&m| mask_vertices(m).into_iter().fold(0u32, |acc, d| acc | 1 << f[d])).collect()
}

#[test]
fn trivial_poset_matches_the_classical_lift() {
    let p = Arc::new(Poset::point());
    for (phi, k) in [(vec![0, 0], 0), (vec![0, 0, 0], 1), (vec![0, 0, 0], 2)] {
        let (x, h, incl) = horn_case(p.clone(), &phi, k);
        let e = ex(&x, phi.len() - 2, BUDGET).unwrap();
        let lambda = unit_on_horn(&x, &h, &e, &incl);
        let fill = ex3_horn_fill(&x, &h, &e, &lambda, &phi, k).unwrap();
        assert!(check_horn_fill(&x, &h, &e, &lambda, &fill).unwrap().all());
        for id in 0..fill.sd2.set.len() {
            let (xid, cid) = fill.sd2.keys[id];
            let outer = &fill.sd1.chains[xid];
            let inner = e.shapes.simplex(&p, fill.sd1.set.filt(xid)).unwrap();
            let sigma: Vec<Vec<u32>> = inner.chains[cid]
                .iter()
                .map(|&(m, _)| mask_vertices(m).into_iter().map(|i| outer[i].0).collect())
                .collect();
            let s = e.shapes.simplex(&p, fill.sd2.set.filt(id)).unwrap();
            for (ci, ch) in s.chains.iter().enumerate() {
                let mu: Vec<u32> = ch.iter().map(|pr| pr.0).collect();
                let mut expect = classical_h(k, phi.len(), &sigma, &mu);
                expect.dedup();
                let got: Vec<u32> = fill.sd1.chains[fill.h[id].images[ci].base].iter().map(|pr| pr.0).collect();
                assert_eq!(got, expect);
            }
        }
    }
}

// Order-preserving maps from the nonempty faces of Δ^n to {0 < 1}.
fn classical_ex_interval(n: usize) -> usize {
    let faces: Vec<u32> = (1u32..(1 << (n + 1))).collect();
    (0u64..(1 << faces.len()))
        .filter(|assign| {
            faces.iter().enumerate().all(|(i, &a)| {
                faces.iter().enumerate().all(|(j, &b)| a & b != a || (assign >> i & 1) <= (assign >> j & 1))
            })
        })
        .count()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn trivial_poset_ex_of_an_interval_is_classical() {
    let p = Arc::new(Poset::point());
    let x = standard_simplex(p, &[0, 0]).unwrap();
    let e = ex(&x, 2, BUDGET).unwrap();
    let nd = e.set.nd_counts();
    for n in 0..=2 {
        let total: usize = (0..=n).map(|m| nd.get(m).copied().unwrap_or(0) * binomial(n, m)).sum();
        assert_eq!(total, classical_ex_interval(n), "dimension {n}");
    }
}

#[test]
fn constant_lambda_on_a_point() {
    let p = Arc::new(Poset::point());
    let x = standard_simplex(p.clone(), &[0]).unwrap();
    let h = horn(p, &[0, 0, 0], 1).unwrap();
    let e = ex(&x, 1, BUDGET).unwrap();
    let constant = FMap { images: (0..h.len()).map(|i| Nf { base: 0, word: (1u32 << h.dim(i)) - 1 }).collect() };
    assert!(validate_map(&h, &x, &constant).is_clean());
    let lambda = unit_on_horn(&x, &h, &e, &constant);
    let fill = ex3_horn_fill(&x, &h, &e, &lambda, &[0, 0, 0], 1).unwrap();
    assert!(check_horn_fill(&x, &h, &e, &lambda, &fill).unwrap().all());
    for cell in &fill.cells {
        assert!(cell.images.iter().all(|y| y.base == 0));
    }
}
