//! Exact integer linear algebra: Smith invariants, ranks, kernel lattices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    a: Vec<i64>,
}

fn ovf() -> Error {
    Error::Overflow
}

fn sub_mul(x: i64, q: i64, y: i64) -> Result<i64> {
    q.checked_mul(y).and_then(|p| x.checked_sub(p)).ok_or_else(ovf)
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, a: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Mat {
        let mut m = Mat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            m.a[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.a[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, o: &Mat) -> Result<Mat> {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let v = x.checked_mul(o.get(k, j)).and_then(|p| p.checked_add(out.get(i, j))).ok_or_else(ovf)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(0i64, |acc, (&x, &y)| {
                    x.checked_mul(y).and_then(|p| acc.checked_add(p)).ok_or_else(ovf)
                })
            })
            .collect()
    }

    /// Matrix with the given columns.
    pub fn from_columns(cols: &[Vec<i64>], rows: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i != k {
            for j in 0..self.cols {
                self.a.swap(i * self.cols + j, k * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j != k {
            for i in 0..self.rows {
                self.a.swap(i * self.cols + j, i * self.cols + k);
            }
        }
    }

    /// row_i -= q row_k
    fn row_sub(&mut self, i: usize, q: i64, k: usize) -> Result<()> {
        for j in 0..self.cols {
            let v = sub_mul(self.get(i, j), q, self.get(k, j))?;
            self.set(i, j, v);
        }
        Ok(())
    }

    /// col_j -= q col_k
    fn col_sub(&mut self, j: usize, q: i64, k: usize) -> Result<()> {
        for i in 0..self.rows {
            let v = sub_mul(self.get(i, j), q, self.get(i, k))?;
            self.set(i, j, v);
        }
        Ok(())
    }
}

/// Nonzero diagonal of the Smith normal form, positive and each dividing
/// the next.
pub fn smith_invariants(m: &Mat) -> Result<Vec<i64>> {
    let mut a = m.clone();
    let mut out = Vec::new();
    let n = a.rows.min(a.cols);
    for t in 0..n {
        let Some((pi, pj)) = smallest_entry(&a, t) else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..a.rows {
                let q = a.get(i, t).div_euclid(a.get(t, t));
                if q != 0 {
                    a.row_sub(i, q, t)?;
                }
                if a.get(i, t) != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..a.cols {
                let q = a.get(t, j).div_euclid(a.get(t, t));
                if q != 0 {
                    a.col_sub(j, q, t)?;
                }
                if a.get(t, j) != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                let p = a.get(t, t);
                let bad = (t + 1..a.rows).find(|&i| (t + 1..a.cols).any(|j| a.get(i, j) % p != 0));
                match bad {
                    None => break,
                    Some(i) => {
                        a.row_sub(t, -1, i)?;
                        continue;
                    }
                }
            }
            let col = (t + 1..a.rows).filter(|&i| a.get(i, t) != 0).map(|i| (i, t));
            let row = (t + 1..a.cols).filter(|&j| a.get(t, j) != 0).map(|j| (t, j));
            let (pi, pj) = col.chain(row).min_by_key(|&(i, j)| a.get(i, j).abs()).expect("remainder");
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
        }
        out.push(a.get(t, t).abs());
    }
    Ok(out)
}

fn smallest_entry(a: &Mat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let v = a.get(i, j);
            if v != 0 && best.is_none_or(|(bi, bj)| v.abs() < a.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

pub fn rank(m: &Mat) -> Result<usize> {
    Ok(smith_invariants(m)?.len())
}

/// Column reduction `m · u = e` with `u` unimodular and `e` in column
/// echelon form with `rank` nonzero columns first.
pub struct ColumnEchelon {
    pub rank: usize,
    pub u: Mat,
    pub u_inv: Mat,
}

impl ColumnEchelon {
    pub fn new(m: &Mat) -> Result<ColumnEchelon> {
        let c = m.cols;
        let mut e = m.clone();
        let mut u = Mat::identity(c);
        let mut u_inv = Mat::identity(c);
        let mut p = 0;
        for i in 0..m.rows {
            if p == c {
                break;
            }
            loop {
                let piv = (p..c).filter(|&j| e.get(i, j) != 0).min_by_key(|&j| e.get(i, j).abs());
                let Some(k) = piv else { break };
                if k != p {
                    e.swap_cols(p, k);
                    u.swap_cols(p, k);
                    u_inv.swap_rows(p, k);
                }
                let mut done = true;
                for j in p + 1..c {
                    let q = e.get(i, j).div_euclid(e.get(i, p));
                    if q != 0 {
                        e.col_sub(j, q, p)?;
                        u.col_sub(j, q, p)?;
                        u_inv.row_sub(p, -q, j)?;
                    }
                    if e.get(i, j) != 0 {
                        done = false;
                    }
                }
                if done {
                    p += 1;
                    break;
                }
            }
        }
        Ok(ColumnEchelon { rank: p, u, u_inv })
    }

    /// Basis of the kernel, as columns.
    pub fn kernel_basis(&self) -> Vec<Vec<i64>> {
        (self.rank..self.u.cols).map(|j| self.u.column(j)).collect()
    }

    /// Coordinates of a kernel vector in [`Self::kernel_basis`].
    pub fn kernel_coords(&self, v: &[i64]) -> Result<Vec<i64>> {
        let full = self.u_inv.mul_vec(v)?;
        if full[..self.rank].iter().any(|&x| x != 0) {
            return Err(Error::Invariant("vector is not in the kernel lattice".into()));
        }
        Ok(full[self.rank..].to_vec())
    }
}

/// Rank and torsion of one homology group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl Group {
    pub fn free(rank: usize) -> Group {
        Group { rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Order, or `None` when infinite.
    pub fn order(&self) -> Option<i64> {
        if self.rank > 0 {
            return None;
        }
        self.torsion.iter().try_fold(1i64, |a, &t| a.checked_mul(t))
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Cokernel of `Z^cols → Z^rows`, given by the matrix.
pub fn cokernel(m: &Mat) -> Result<Group> {
    let inv = smith_invariants(m)?;
    Ok(Group { rank: m.rows - inv.len(), torsion: inv.into_iter().filter(|&t| t > 1).collect() })
}

/// Homology of a chain complex given by `d[n]: C_n → C_{n-1}` for
/// `n = 1..`, with `dims[n] = rank C_n`.
pub fn homology(dims: &[usize], d: &[Mat]) -> Result<Vec<Group>> {
    let mut ranks = Vec::with_capacity(d.len());
    let mut invs = Vec::with_capacity(d.len());
    for m in d {
        let inv = smith_invariants(m)?;
        ranks.push(inv.len());
        invs.push(inv);
    }
    // d[n - 1] is the differential out of degree n.
    Ok((0..dims.len())
        .map(|n| {
            let out = if n == 0 { 0 } else { ranks.get(n - 1).copied().unwrap_or(0) };
            let inc = ranks.get(n).copied().unwrap_or(0);
            let torsion = invs.get(n).map(|v| v.iter().copied().filter(|&t| t > 1).collect()).unwrap_or_default();
            Group { rank: dims[n] - out - inc, torsion }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn det2(m: &Mat) -> i64 {
        m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0)
    }

    #[test]
    fn small_smith() {
        let m = Mat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        assert_eq!(smith_invariants(&m).unwrap(), vec![2, 6, 12]);
        let m = Mat::from_rows(&[vec![2, 0], vec![0, 3]], 2);
        assert_eq!(smith_invariants(&m).unwrap(), vec![1, 6]);
        assert_eq!(smith_invariants(&Mat::zeros(2, 3)).unwrap(), Vec::<i64>::new());
    }

    #[test]
    fn circle_homology() {
        // Triangle boundary: three vertices, three edges.
        let d1 = Mat::from_rows(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]], 3);
        let h = homology(&[3, 3], &[d1]).unwrap();
        assert_eq!(h, vec![Group::free(1), Group::free(1)]);
    }

    proptest! {
        #[test]
        fn two_by_two_invariants(a in -20i64..20, b in -20i64..20, c in -20i64..20, d in -20i64..20) {
            let m = Mat::from_rows(&[vec![a, b], vec![c, d]], 2);
            let inv = smith_invariants(&m).unwrap();
            let g = [a, b, c, d].iter().fold(0i64, |g, &x| gcd(g, x));
            let det = det2(&m).abs();
            match inv.len() {
                0 => prop_assert!(g == 0),
                1 => { prop_assert_eq!(inv[0], g); prop_assert_eq!(det, 0); }
                _ => { prop_assert_eq!(inv[0], g); prop_assert_eq!(inv[0] * inv[1], det); }
            }
        }

        #[test]
        fn kernel_is_saturated_and_exact(rows in proptest::collection::vec(proptest::collection::vec(-4i64..5, 5), 0..4)) {
            let m = Mat::from_rows(&rows, 5);
            let ce = ColumnEchelon::new(&m).unwrap();
            prop_assert_eq!(ce.rank, rank(&m).unwrap());
            prop_assert!(ce.u.mul(&ce.u_inv).unwrap() == Mat::identity(5));
            let basis = ce.kernel_basis();
            prop_assert_eq!(basis.len(), 5 - ce.rank);
            for (i, v) in basis.iter().enumerate() {
                prop_assert!(m.mul_vec(v).unwrap().iter().all(|&x| x == 0));
                let mut e = vec![0; basis.len()];
                e[i] = 1;
                prop_assert_eq!(ce.kernel_coords(v).unwrap(), e);
            }
        }
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
}
