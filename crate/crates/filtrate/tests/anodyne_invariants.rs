use std::collections::HashSet;
use std::sync::Arc;

use filtrate::anodyne::{
    ancestral_order, build_presentation, classify_sd_horn, horn_objects, unique_face_indices, verify_presentation,
    ClassLabel, EdgeRule,
};
use filtrate::standard::{horn, is_admissible};
use filtrate::subdivision::sd;
use filtrate::Poset;

fn posets() -> Vec<Arc<Poset>> {
    vec![
        Arc::new(Poset::chain(3)),
        Arc::new(Poset::from_covers(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap()),
    ]
}

/// Every admissible `(φ, k, k')` with `len(φ) ≤ 4`.
fn cases(p: &Poset) -> Vec<(Vec<usize>, usize, usize)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for phi in p.nerve_simplices(n) {
            for k in 0..=n {
                if !is_admissible(&phi, k).unwrap() {
                    continue;
                }
                for kp in [k.checked_sub(1), Some(k + 1)].into_iter().flatten() {
                    if kp <= n && phi[kp] == phi[k] {
                        out.push((phi.clone(), k, kp));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn classes_partition_and_rho_is_a_bijection() {
    let mut checked = 0;
    for p in posets() {
        for (phi, k, kp) in cases(&p) {
            let c = classify_sd_horn(p.clone(), &phi, k, kp).unwrap();
            let tag = format!("{} k={k} k'={kp}", p.fmt_chain(&phi));
            // Lambda coincides with the subdivided horn, built independently.
            let lam = sd(&horn(p.clone(), &phi, k).unwrap()).unwrap();
            let lambda_count = c.labels.iter().filter(|&&l| l == ClassLabel::Lambda).count();
            assert_eq!(lambda_count, lam.set.len(), "{tag}");
            for (i, &l) in c.labels.iter().enumerate() {
                let top = c.sd.chains[i].last().unwrap().0;
                let misses_other = (0..phi.len()).any(|v| v != k && top & (1 << v) == 0);
                assert_eq!(l == ClassLabel::Lambda, misses_other, "{tag}");
            }
            let mut hit = HashSet::new();
            for (s, &l) in c.labels.iter().enumerate() {
                if !l.is_type_ii() {
                    assert!(c.rho[s].is_none());
                    continue;
                }
                let r = c.rho[s].unwrap();
                assert_eq!(Some(c.labels[r]), l.partner(), "{tag}: {}", c.sd.set.name(s));
                assert!(hit.insert(r), "{tag}: ρ not injective");
                assert_eq!(c.sd.set.dim(r), c.sd.set.dim(s) + 1);
                let idx = unique_face_indices(&c, s);
                assert_eq!(idx.len(), 1, "{tag}");
                assert!(is_admissible(c.sd.set.filt(r), idx[0]).unwrap(), "{tag}");
            }
            let type_i: HashSet<usize> = (0..c.labels.len()).filter(|&i| c.labels[i].is_type_i()).collect();
            assert_eq!(hit, type_i, "{tag}: ρ not onto type I");
            let counts = c.counts();
            for (two, one) in [(ClassLabel::A, ClassLabel::B), (ClassLabel::C, ClassLabel::D), (ClassLabel::E, ClassLabel::F), (ClassLabel::G, ClassLabel::H)] {
                assert_eq!(counts[&two], counts[&one], "{tag}");
            }
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn presentations_replay() {
    for p in posets() {
        for (phi, k, kp) in cases(&p) {
            let c = classify_sd_horn(p.clone(), &phi, k, kp).unwrap();
            let pres = build_presentation(&c).unwrap();
            let (x, y, incl) = horn_objects(&c).unwrap();
            let v = verify_presentation(&x, &y, &incl, &pres);
            assert!(v.ok, "{} k={k} k'={kp}: {:?}", p.fmt_chain(&phi), v.diagnostics);
            let type_ii = c.labels.iter().filter(|l| l.is_type_ii()).count();
            assert_eq!(pres.total_fills(), type_ii);
        }
    }
}

#[test]
fn horn_simplices_are_minimal() {
    let p = Arc::new(Poset::point());
    let c = classify_sd_horn(p, &[0, 0], 0, 1).unwrap();
    let edges = ancestral_order(&c);
    let lam = c.in_horn();
    for e in &edges {
        assert!(!lam[e.greater]);
        if e.rule != EdgeRule::FromHorn {
            assert!(!lam[e.lesser]);
        }
    }
    // every type II simplex of the edge has only horn simplices as proper faces
    for (s, l) in c.labels.iter().enumerate() {
        if l.is_type_ii() {
            for f in &c.sd.set.simplex(s).faces {
                assert!(lam[f.base]);
            }
        }
    }
}
