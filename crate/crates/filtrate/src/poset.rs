//! Finite posets, chains, the nerve N(P) and its category of
//! non-degenerate simplices R(P).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use itertools::Itertools;

use crate::error::{Error, Result};

/// A chain of the nerve, stored as element indices.
pub type Chain = Vec<usize>;

/// Finite partial order. Elements are kept sorted by id, so index order is
/// the lexicographic order on ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    rank: Vec<usize>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of a cover relation.
    pub fn from_covers<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<Poset> {
        let mut set: BTreeSet<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        for (a, b) in covers {
            set.insert(a.as_ref().to_string());
            set.insert(b.as_ref().to_string());
        }
        let names: Vec<String> = set.into_iter().collect();
        for n in &names {
            validate_id(n)?;
        }
        let idx: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in covers {
            leq[idx[a.as_ref()]][idx[b.as_ref()]] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::NotAPartialOrder(format!(
                        "`{}` and `{}` lie on a cycle",
                        names[i], names[j]
                    )));
                }
            }
        }
        let rank = linear_extension(&leq);
        Ok(Poset { names, leq, rank })
    }

    /// The one-element poset `{*}`.
    pub fn point() -> Poset {
        Poset::from_covers::<&str>(&["*"], &[]).expect("singleton poset")
    }

    /// The chain `p0 < p1 < ... < p{n-1}`.
    pub fn chain(n: usize) -> Poset {
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let covers: Vec<(String, String)> =
            names.iter().tuple_windows().map(|(a, b)| (a.clone(), b.clone())).collect();
        Poset::from_covers(&names, &covers).expect("chain poset")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| Error::UnknownElement(name.to_string()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    /// Position of `a` in the fixed linear extension (lexicographic
    /// tie-breaking among available minima).
    pub fn rank(&self, a: usize) -> usize {
        self.rank[a]
    }

    /// Covering pairs `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.lt(a, b) && !(0..n).any(|c| self.lt(a, c) && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_chain(&self, c: &[usize]) -> bool {
        !c.is_empty() && c.iter().all(|&x| x < self.len()) && c.windows(2).all(|w| self.leq(w[0], w[1]))
    }

    pub fn parse_chain(&self, text: &str) -> Result<Chain> {
        let inner = text.trim();
        let inner = inner.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(inner);
        let c: Chain = inner
            .split(',')
            .map(|s| self.index(s.trim()))
            .collect::<Result<_>>()?;
        if !self.is_chain(&c) {
            return Err(Error::Precondition(format!("`{text}` is not a nondecreasing chain")));
        }
        Ok(c)
    }

    pub fn chain_names(&self, c: &[usize]) -> Vec<String> {
        c.iter().map(|&i| self.names[i].clone()).collect()
    }

    pub fn chain_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Chain> {
        let c: Chain = names.iter().map(|s| self.index(s.as_ref())).collect::<Result<_>>()?;
        if !self.is_chain(&c) {
            return Err(Error::Precondition("chain is empty or not nondecreasing".into()));
        }
        Ok(c)
    }

    pub fn fmt_chain(&self, c: &[usize]) -> String {
        format!("[{}]", c.iter().map(|&i| self.name(i)).join(","))
    }

    /// All nondecreasing chains with `n + 1` entries, in lexicographic
    /// index order.
    pub fn nerve_simplices(&self, n: usize) -> Vec<Chain> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n + 1);
        self.extend_chains(n + 1, &mut cur, &mut out, false);
        out
    }

    /// Strictly increasing chains with `n + 1` entries.
    pub fn nondegenerate_simplices(&self, n: usize) -> Vec<Chain> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n + 1);
        self.extend_chains(n + 1, &mut cur, &mut out, true);
        out
    }

    fn extend_chains(&self, len: usize, cur: &mut Chain, out: &mut Vec<Chain>, strict: bool) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in 0..self.len() {
            let ok = match cur.last() {
                None => true,
                Some(&l) => {
                    if strict {
                        self.lt(l, x)
                    } else {
                        self.leq(l, x)
                    }
                }
            };
            if ok {
                cur.push(x);
                self.extend_chains(len, cur, out, strict);
                cur.pop();
            }
        }
    }

    /// Length of the longest strictly increasing chain, minus one.
    pub fn height(&self) -> usize {
        (0..self.len()).rev().find(|&n| !self.nondegenerate_simplices(n).is_empty()).unwrap_or(0)
    }

    /// Objects and non-identity morphisms of R(P).
    pub fn rp_category(&self) -> RpCategory {
        let mut objects = Vec::new();
        for n in 0..self.len() {
            let level = self.nondegenerate_simplices(n);
            if level.is_empty() {
                break;
            }
            objects.extend(level);
        }
        let mut morphisms = Vec::new();
        for (i, a) in objects.iter().enumerate() {
            for (j, b) in objects.iter().enumerate() {
                if i != j && a.iter().all(|x| b.contains(x)) {
                    morphisms.push((i, j));
                }
            }
        }
        RpCategory { objects, morphisms }
    }

    /// `P` with a new global minimum named `bottom`.
    pub fn cone(&self, bottom: &str) -> Result<Poset> {
        if self.names.iter().any(|n| n == bottom) {
            return Err(Error::Precondition(format!("cone point `{bottom}` already names an element")));
        }
        let mut elements: Vec<String> = self.names.clone();
        elements.push(bottom.to_string());
        let mut covers: Vec<(String, String)> = self
            .covers()
            .into_iter()
            .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
            .collect();
        for i in 0..self.len() {
            if (0..self.len()).all(|j| !self.lt(j, i)) {
                covers.push((bottom.to_string(), self.names[i].clone()));
            }
        }
        Poset::from_covers(&elements, &covers)
    }

    /// Text form: one cover `a < b` per line, then isolated elements alone.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let covers = self.covers();
        for &(a, b) in &covers {
            let _ = writeln!(out, "{} < {}", self.names[a], self.names[b]);
        }
        for (i, n) in self.names.iter().enumerate() {
            if !covers.iter().any(|&(a, b)| a == i || b == i) {
                let _ = writeln!(out, "{n}");
            }
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Poset> {
        let mut elements = Vec::new();
        let mut covers = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((a, b)) = line.split_once('<') {
                let (a, b) = (a.trim(), b.trim());
                if a.is_empty() || b.is_empty() || b.contains('<') {
                    return Err(Error::Parse(format!("line {}: malformed cover `{raw}`", lineno + 1)));
                }
                covers.push((a.to_string(), b.to_string()));
            } else if line.split_whitespace().count() == 1 {
                elements.push(line.to_string());
            } else {
                return Err(Error::Parse(format!("line {}: expected `a < b` or a single id", lineno + 1)));
            }
        }
        Poset::from_covers(&elements, &covers)
    }
}

fn validate_id(id: &str) -> Result<()> {
    if id.is_empty() || id.chars().any(|c| c.is_whitespace() || matches!(c, '<' | ',' | '#' | '[' | ']' | '(' | ')')) {
        return Err(Error::Parse(format!("invalid element id `{id}`")));
    }
    Ok(())
}

fn linear_extension(leq: &[Vec<bool>]) -> Vec<usize> {
    let n = leq.len();
    let mut placed = vec![false; n];
    let mut rank = vec![0; n];
    for r in 0..n {
        let next = (0..n)
            .find(|&x| !placed[x] && (0..n).all(|y| placed[y] || y == x || !leq[y][x]))
            .expect("acyclic relation has a minimal element");
        placed[next] = true;
        rank[next] = r;
    }
    rank
}

/// R(P): strictly increasing chains, with inclusions as morphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RpCategory {
    pub objects: Vec<Chain>,
    /// Non-identity inclusions `(source, target)` as object indices.
    pub morphisms: Vec<(usize, usize)>,
}
