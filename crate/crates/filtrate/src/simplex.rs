//! Arithmetic on the simplex category: monotone maps `[m] -> [n]` as value
//! lists, and degeneracy words as bitmasks of repeat positions.
//!
//! A degeneracy word `s_{i_1} ... s_{i_k}` with `i_1 > ... > i_k` acting on
//! an `m`-simplex is the surjection `eta: [m + k] -> [m]` whose repeat set
//! `{ i : eta(i) = eta(i + 1) }` is `{i_1, ..., i_k}`. We store the repeat
//! set as bit `i` of a `u32`.

/// Monotone map, `theta[i]` is the image of `i`.
pub type Mono = Vec<usize>;

pub fn identity(n: usize) -> Mono {
    (0..=n).collect()
}

/// Coface `delta_i: [n - 1] -> [n]` skipping `i`.
pub fn coface(i: usize, n: usize) -> Mono {
    (0..n).map(|t| if t < i { t } else { t + 1 }).collect()
}

/// Codegeneracy `sigma_j: [n + 1] -> [n]` hitting `j` twice.
pub fn codegeneracy(j: usize, n: usize) -> Mono {
    (0..=n + 1).map(|t| if t <= j { t } else { t - 1 }).collect()
}

/// `a ∘ b`.
pub fn compose(a: &[usize], b: &[usize]) -> Mono {
    b.iter().map(|&x| a[x]).collect()
}

pub fn is_monotone(theta: &[usize]) -> bool {
    theta.windows(2).all(|w| w[0] <= w[1])
}

/// Surjection `[n] -> [n - |J|]` with repeat set `mask`.
pub fn surjection(mask: u32, n: usize) -> Mono {
    let mut out = Vec::with_capacity(n + 1);
    let mut v = 0;
    for i in 0..=n {
        if i > 0 && mask & (1 << (i - 1)) == 0 {
            v += 1;
        }
        out.push(v);
    }
    out
}

/// Repeat set of a monotone map.
pub fn repeat_mask(theta: &[usize]) -> u32 {
    let mut m = 0;
    for (i, w) in theta.windows(2).enumerate() {
        if w[0] == w[1] {
            m |= 1 << i;
        }
    }
    m
}

pub fn word_len(mask: u32) -> usize {
    mask.count_ones() as usize
}

/// Indices of the degeneracy word, strictly decreasing.
pub fn word_indices(mask: u32) -> Vec<usize> {
    (0..32).rev().filter(|i| mask & (1 << i) != 0).collect()
}

pub fn mask_from_indices(indices: &[usize]) -> Option<u32> {
    if !indices.windows(2).all(|w| w[0] > w[1]) {
        return None;
    }
    let mut m = 0u32;
    for &i in indices {
        if i >= 31 {
            return None;
        }
        m |= 1 << i;
    }
    Some(m)
}

/// Factors a monotone map through its image: `theta = delta ∘ eta` with
/// `eta` surjective onto `[image.len() - 1]`. Returns `(image, eta)`.
pub fn epi_mono(theta: &[usize]) -> (Vec<usize>, Mono) {
    let mut image: Vec<usize> = Vec::new();
    let mut eta = Vec::with_capacity(theta.len());
    for &x in theta {
        if image.last() != Some(&x) {
            image.push(x);
        }
        eta.push(image.len() - 1);
    }
    (image, eta)
}

/// Writes `theta = delta_t ∘ theta'` where `t` is the largest value of
/// `[n]` missing from the image, or `None` if `theta` is onto `[n]`.
pub fn split_largest_missing(theta: &[usize], n: usize) -> Option<(usize, Mono)> {
    let mut hit = vec![false; n + 1];
    for &x in theta {
        hit[x] = true;
    }
    let t = (0..=n).rev().find(|&v| !hit[v])?;
    Some((t, theta.iter().map(|&x| if x < t { x } else { x - 1 }).collect()))
}

/// Renders a degeneracy word as `s2s0`, empty for the identity.
pub fn fmt_word(mask: u32) -> String {
    word_indices(mask).iter().map(|i| format!("s{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn word_and_surjection() {
        assert_eq!(surjection(0b1, 2), vec![0, 0, 1]);
        assert_eq!(surjection(0b10, 2), vec![0, 1, 1]);
        assert_eq!(surjection(0b101, 3), vec![0, 0, 1, 1]);
        assert_eq!(word_indices(0b101), vec![2, 0]);
        assert_eq!(fmt_word(0b101), "s2s0");
    }

    #[test]
    fn cosimplicial_identities() {
        for n in 1..5 {
            for j in 0..=n {
                for i in 0..j {
                    // delta_j delta_i = delta_i delta_{j-1}
                    assert_eq!(compose(&coface(j, n + 1), &coface(i, n)), compose(&coface(i, n + 1), &coface(j - 1, n)));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn mask_surjection_round_trip(n in 0usize..10, raw in 0u32..1024) {
            let mask = raw & ((1u32 << n) - 1);
            let s = surjection(mask, n);
            prop_assert_eq!(repeat_mask(&s), mask);
            prop_assert_eq!(*s.last().unwrap(), n - word_len(mask));
            prop_assert_eq!(mask_from_indices(&word_indices(mask)), Some(mask));
        }

        #[test]
        fn epi_mono_factors(v in proptest::collection::vec(0usize..6, 1..8)) {
            let mut theta = v.clone();
            theta.sort();
            let (image, eta) = epi_mono(&theta);
            prop_assert_eq!(compose(&image, &eta), theta);
        }
    }
}
