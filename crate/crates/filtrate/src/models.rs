//! Built-in models: filtered triangulations over `p0 < p1` and filtered
//! complexes for intersection homology.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fsset::{validate, FSSet};
use crate::ih::{make_cone, FilteredComplex};
use crate::poset::Poset;
use crate::standard::ordered_complex;

struct Model {
    name: &'static str,
    about: &'static str,
    vertices: Vec<String>,
    /// Poset element per vertex (0 or 1).
    colors: Vec<usize>,
    /// Level of the `p0` part when read as a filtered complex of formal
    /// dimension 2.
    low_level: usize,
    maximal: Vec<Vec<String>>,
    counts: [usize; 3],
}

fn v(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}")
}

fn cylinder() -> Model {
    let mut vertices: Vec<String> = (0..3).map(|i| v("a", i)).collect();
    vertices.extend((0..3).map(|i| v("b", i)));
    let mut colors = vec![0; 3];
    colors.extend([1; 3]);
    let mut maximal = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        maximal.push(vec![v("a", i), v("a", j), v("b", j)]);
        maximal.push(vec![v("a", i), v("b", i), v("b", j)]);
    }
    Model {
        name: "cylinder",
        about: "annulus, one boundary circle on p0",
        vertices,
        colors,
        low_level: 1,
        maximal,
        counts: [6, 12, 6],
    }
}

fn mobius() -> Model {
    let mut vertices: Vec<String> = (0..3).map(|i| v("a", i)).collect();
    vertices.extend((0..6).map(|i| v("b", i)));
    let mut colors = vec![0; 3];
    colors.extend([1; 6]);
    let mut maximal = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        maximal.push(vec![v("a", i), v("a", j), v("b", i + 1)]);
        maximal.push(vec![v("a", i), v("b", i), v("b", i + 1)]);
        maximal.push(vec![v("a", i), v("a", j), v("b", (i + 4) % 6)]);
        maximal.push(vec![v("a", i), v("b", i + 3), v("b", (i + 4) % 6)]);
    }
    Model {
        name: "mobius",
        about: "Möbius band, core circle on p0",
        vertices,
        colors,
        low_level: 1,
        maximal,
        counts: [9, 21, 12],
    }
}

fn pinched_torus() -> Model {
    let mut vertices = vec!["c".to_string()];
    vertices.extend((0..3).map(|i| v("u", i)));
    vertices.extend((0..3).map(|i| v("w", i)));
    let mut colors = vec![0];
    colors.extend([1; 6]);
    let mut maximal = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        maximal.push(vec!["c".into(), v("u", i), v("u", j)]);
        maximal.push(vec!["c".into(), v("w", i), v("w", j)]);
        maximal.push(vec![v("u", i), v("u", j), v("w", j)]);
        maximal.push(vec![v("u", i), v("w", i), v("w", j)]);
    }
    Model {
        name: "pinched-torus",
        about: "torus with a meridian collapsed to the point c on p0",
        vertices,
        colors,
        low_level: 0,
        maximal,
        counts: [7, 18, 12],
    }
}

fn filtered_models() -> Vec<Model> {
    vec![cylinder(), mobius(), pinched_torus()]
}

/// Names and one-line descriptions of every built-in model.
pub fn catalogue() -> Vec<(&'static str, &'static str)> {
    let mut out: Vec<(&'static str, &'static str)> = filtered_models().iter().map(|m| (m.name, m.about)).collect();
    out.extend(COMPLEXES.iter().map(|(n, a)| (*n, *a)));
    out
}

const COMPLEXES: [(&str, &str); 9] = [
    ("circle", "boundary of a triangle"),
    ("two-circles", "two disjoint triangle boundaries"),
    ("sphere", "boundary of a tetrahedron"),
    ("torus", "seven-vertex torus"),
    ("rp2", "six-vertex projective plane"),
    ("klein", "nine-vertex Klein bottle"),
    ("cone-circle", "cone on a circle, apex on level 0"),
    ("cone-two-circles", "cone on two disjoint circles"),
    ("cone-sphere", "cone on a 2-sphere"),
];

pub fn poset() -> Arc<Poset> {
    Arc::new(Poset::chain(2))
}

/// A built-in filtered simplicial set over `p0 < p1`.
pub fn fsset(name: &str) -> Result<FSSet> {
    let m = filtered_models()
        .into_iter()
        .find(|m| m.name == name)
        .ok_or_else(|| Error::Parse(format!("no filtered model named `{name}`")))?;
    let verts: Vec<&str> = m.vertices.iter().map(String::as_str).collect();
    let maximal: Vec<Vec<&str>> = m.maximal.iter().map(|s| s.iter().map(String::as_str).collect()).collect();
    let x = ordered_complex(poset(), &verts, &m.colors, &maximal)?;
    if x.nd_counts() != m.counts {
        return Err(Error::Invariant(format!("model `{name}` has counts {:?}, expected {:?}", x.nd_counts(), m.counts)));
    }
    let r = validate(&x);
    if !r.is_clean() {
        return Err(Error::Invariant(format!("model `{name}` fails validation: {r}")));
    }
    Ok(x)
}

pub fn fsset_names() -> Vec<&'static str> {
    filtered_models().iter().map(|m| m.name).collect()
}

fn closed(names: Vec<String>, maximal: Vec<Vec<usize>>, dim: usize) -> FilteredComplex {
    let n = names.len();
    FilteredComplex::new(names, vec![dim; n], dim, &maximal).expect("built-in complex")
}

fn circle_named(p: &str) -> (Vec<String>, Vec<Vec<usize>>) {
    ((0..3).map(|i| v(p, i)).collect(), vec![vec![0, 1], vec![1, 2], vec![0, 2]])
}

fn complex_raw(name: &str) -> Option<FilteredComplex> {
    let x = match name {
        "circle" => {
            let (n, m) = circle_named("x");
            closed(n, m, 1)
        }
        "two-circles" => {
            let (mut n, mut m) = circle_named("x");
            let (n2, m2) = circle_named("y");
            n.extend(n2);
            m.extend(m2.into_iter().map(|s| s.into_iter().map(|i| i + 3).collect()));
            closed(n, m, 1)
        }
        "sphere" => closed((0..4).map(|i| v("s", i)).collect(), vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], 2),
        "torus" => {
            let m = (0..7).flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]]).collect();
            closed((0..7).map(|i| v("t", i)).collect(), m, 2)
        }
        "rp2" => {
            let faces = [[1, 2, 3], [1, 3, 4], [1, 4, 5], [1, 5, 6], [1, 6, 2], [2, 3, 5], [3, 4, 6], [4, 5, 2], [5, 6, 3], [6, 2, 4]];
            closed((1..=6).map(|i| v("r", i)).collect(), faces.iter().map(|f| f.iter().map(|i| i - 1).collect()).collect(), 2)
        }
        "klein" => {
            // 3×3 grid, left and right sides glued with a flip.
            let id = |i: usize, j: usize| {
                let j = j % 3;
                if i == 3 { (3 - j) % 3 } else { 3 * i + j }
            };
            let mut m = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    m.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    m.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
                }
            }
            closed((0..9).map(|i| format!("k{}{}", i / 3, i % 3)).collect(), m, 2)
        }
        "cone-circle" => make_cone(&complex_raw("circle")?, "v").ok()?,
        "cone-two-circles" => make_cone(&complex_raw("two-circles")?, "v").ok()?,
        "cone-sphere" => make_cone(&complex_raw("sphere")?, "v").ok()?,
        _ => {
            let m = filtered_models().into_iter().find(|m| m.name == name)?;
            let level: Vec<usize> = m.colors.iter().map(|&c| if c == 0 { m.low_level } else { 2 }).collect();
            let maximal: Vec<Vec<usize>> = m
                .maximal
                .iter()
                .map(|s| s.iter().map(|n| m.vertices.iter().position(|x| x == n).expect("vertex")).collect())
                .collect();
            FilteredComplex::new(m.vertices.clone(), level, 2, &maximal).expect("built-in complex")
        }
    };
    Some(x)
}

/// A built-in filtered complex. The three models over `p0 < p1` are
/// included, with `p0` on level 1 (circles) or 0 (the pinch point).
pub fn complex(name: &str) -> Result<FilteredComplex> {
    complex_raw(name).ok_or_else(|| Error::Parse(format!("no complex named `{name}`")))
}

pub fn complex_names() -> Vec<&'static str> {
    let mut out: Vec<&'static str> = COMPLEXES.iter().map(|(n, _)| *n).collect();
    out.extend(fsset_names());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ih::ordinary_homology;
    use crate::snf::Group;
    use crate::standard::stratum;

    #[test]
    fn filtered_models_load() {
        for n in fsset_names() {
            let x = fsset(n).unwrap();
            for p in 0..2 {
                let (s, _) = stratum(&x, p).unwrap();
                assert_eq!(s.components().1, 1, "{n} stratum {p}");
            }
        }
        assert!(fsset("nothing").is_err());
    }

    #[test]
    fn surfaces_have_their_homology() {
        let z = Group::free;
        let cases: Vec<(&str, Vec<Group>)> = vec![
            ("circle", vec![z(1), z(1)]),
            ("two-circles", vec![z(2), z(2)]),
            ("sphere", vec![z(1), z(0), z(1)]),
            ("torus", vec![z(1), z(2), z(1)]),
            ("rp2", vec![z(1), Group { rank: 0, torsion: vec![2] }, z(0)]),
            ("klein", vec![z(1), Group { rank: 1, torsion: vec![2] }, z(0)]),
            ("cylinder", vec![z(1), z(1), z(0)]),
            ("mobius", vec![z(1), z(1), z(0)]),
            ("pinched-torus", vec![z(1), z(1), z(1)]),
        ];
        for (n, want) in cases {
            assert_eq!(ordinary_homology(&complex(n).unwrap()).unwrap().groups, want, "{n}");
        }
    }
}
