//! Split type-A root data, endoscopic data and finite abelian groups.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finfield::is_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    GL,
    SL,
    PGL,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::GL => "GL",
            GroupKind::SL => "SL",
            GroupKind::PGL => "PGL",
        })
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GL" => Ok(GroupKind::GL),
            "SL" => Ok(GroupKind::SL),
            "PGL" => Ok(GroupKind::PGL),
            _ => Err(Error::InvalidInput(format!("unknown group kind {s:?}"))),
        }
    }
}

/// Split root datum of `GL_n`, `SL_n` or `PGL_n`.
///
/// Cocharacters are written in a fixed basis of `X_*`:
/// the standard basis for `GL_n`, the simple coroots for `SL_n`, and the
/// images of `e_1..e_{n-1}` in `Z^n / Z(1,..,1)` for `PGL_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub kind: GroupKind,
    pub n: usize,
    pub p: u32,
    pub rank: usize,
    /// Roots `e_i - e_j` (`i != j`), as characters in the dual basis.
    pub roots: Vec<Vec<i64>>,
    /// Coroots in the `X_*` basis, aligned with `roots`.
    pub coroots: Vec<Vec<i64>>,
    /// `(i, j)` labels of the roots.
    pub root_labels: Vec<(usize, usize)>,
    pub exponents: Vec<u32>,
    pub weyl_order: u64,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn build_root_datum(kind: GroupKind, n: usize, p: u32) -> Result<RootDatum> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if !is_prime(p as u64) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let weyl_order = factorial(n);
    if weyl_order.is_multiple_of(p as u64) {
        return Err(Error::BadCharacteristic { p, weyl_order });
    }
    let rank = match kind {
        GroupKind::GL => n,
        _ => n - 1,
    };
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    let mut root_labels = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut v = vec![0i64; n];
            v[i] = 1;
            v[j] = -1;
            coroots.push(to_basis(kind, n, &v));
            let basis = basis_vectors(kind, n);
            roots.push(basis.iter().map(|b| b[i] - b[j]).collect());
            root_labels.push((i, j));
        }
    }
    let exponents = match kind {
        GroupKind::GL => (1..=n as u32).collect(),
        _ => (2..=n as u32).collect(),
    };
    Ok(RootDatum { kind, n, p, rank, roots, coroots, root_labels, exponents, weyl_order })
}

/// Basis of `X_*` as vectors in `Z^n` (representatives for `PGL_n`).
pub fn basis_vectors(kind: GroupKind, n: usize) -> Vec<Vec<i64>> {
    let unit = |k: usize| {
        let mut v = vec![0i64; n];
        v[k] = 1;
        v
    };
    match kind {
        GroupKind::GL => (0..n).map(unit).collect(),
        GroupKind::SL => (0..n.saturating_sub(1))
            .map(|k| {
                let mut v = unit(k);
                v[k + 1] = -1;
                v
            })
            .collect(),
        GroupKind::PGL => (0..n.saturating_sub(1)).map(unit).collect(),
    }
}

/// Coordinates in the `X_*` basis of a vector of `Z^n` (which must have
/// coordinate sum zero for `SL_n`).
pub fn to_basis(kind: GroupKind, n: usize, v: &[i64]) -> Vec<i64> {
    match kind {
        GroupKind::GL => v.to_vec(),
        GroupKind::SL => {
            // v = sum c_k (e_k - e_{k+1})  =>  c_k = v_1 + ... + v_k
            let mut acc = 0;
            (0..n - 1)
                .map(|k| {
                    acc += v[k];
                    acc
                })
                .collect()
        }
        GroupKind::PGL => (0..n - 1).map(|k| v[k] - v[n - 1]).collect(),
    }
}

/// Matrix (columns = images of basis vectors) of the automorphism of `X_*`
/// induced by a permutation of `{0..n-1}`.
pub fn permutation_action(kind: GroupKind, n: usize, perm: &[usize]) -> Vec<Vec<i64>> {
    let cols: Vec<Vec<i64>> = basis_vectors(kind, n)
        .iter()
        .map(|b| {
            let mut w = vec![0i64; n];
            for (i, &x) in b.iter().enumerate() {
                w[perm[i]] += x;
            }
            to_basis(kind, n, &w)
        })
        .collect();
    transpose(&cols)
}

/// A finite-order character of `X_*`, as a vector in `(Q/Z)^rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Kappa {
    pub vector: Vec<Ratio<i64>>,
}

impl Kappa {
    pub fn trivial(rank: usize) -> Kappa {
        Kappa { vector: vec![Ratio::zero(); rank] }
    }

    pub fn new(vector: Vec<Ratio<i64>>) -> Kappa {
        let vector = vector.into_iter().map(|x| x - x.floor()).collect();
        Kappa { vector }
    }

    pub fn order(&self) -> u64 {
        self.vector.iter().fold(1i64, |acc, x| acc.lcm(x.denom())) as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.vector.iter().all(|x| x.is_zero())
    }

    /// `kappa(x)` as an element of `Q/Z` in `[0, 1)`.
    pub fn pair(&self, x: &[i64]) -> Ratio<i64> {
        let s: Ratio<i64> = self.vector.iter().zip(x).map(|(k, &c)| k * c).sum();
        s - s.floor()
    }

    pub fn inverse(&self) -> Kappa {
        Kappa::new(self.vector.iter().map(|x| -x).collect())
    }

    pub fn display(&self) -> String {
        let parts: Vec<String> = self.vector.iter().map(|x| x.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HKind {
    /// `kappa` trivial on all coroots: `H = G`.
    Group,
    /// No root survives: `H` is a maximal torus.
    Torus,
    /// Blocks of indices `{0..n-1}` joined by the surviving roots.
    Blocks(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoscopicDatum {
    pub parent: RootDatum,
    pub kappa: Kappa,
    /// Indices into `parent.roots` with `kappa(alpha^vee) = 1`.
    pub sub_roots: Vec<usize>,
    pub h_kind: HKind,
}

impl EndoscopicDatum {
    pub fn kappa_order(&self) -> u64 {
        self.kappa.order()
    }
}

pub fn endoscopic_datum(rd: &RootDatum, kappa: &Kappa) -> Result<EndoscopicDatum> {
    if kappa.vector.len() != rd.rank {
        return Err(Error::InvalidInput(format!(
            "kappa has {} entries, rank is {}",
            kappa.vector.len(),
            rd.rank
        )));
    }
    let order = kappa.order();
    if order > 4 {
        return Err(Error::UnsupportedOrder(order));
    }
    let sub_roots: Vec<usize> = (0..rd.roots.len())
        .filter(|&i| kappa.pair(&rd.coroots[i]).is_zero())
        .collect();
    let h_kind = if sub_roots.len() == rd.roots.len() {
        HKind::Group
    } else if sub_roots.is_empty() {
        HKind::Torus
    } else {
        // union-find over indices joined by surviving roots
        let mut parent: Vec<usize> = (0..rd.n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &r in &sub_roots {
            let (i, j) = rd.root_labels[r];
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for i in 0..rd.n {
            let root = find(&mut parent, i);
            match blocks.iter_mut().find(|b| b[0] == root) {
                Some(b) => b.push(i),
                None => blocks.push(vec![i]),
            }
        }
        HKind::Blocks(blocks)
    };
    Ok(EndoscopicDatum { parent: rd.clone(), kappa: kappa.clone(), sub_roots, h_kind })
}

/// Degree of the global resultant divisor: `(#Phi - #Phi_H) deg D / 2`.
pub fn resultant_degree_global(ed: &EndoscopicDatum, deg_d: u64) -> u64 {
    (ed.parent.roots.len() - ed.sub_roots.len()) as u64 * deg_d / 2
}

/// Whether `(rd1, rd2)` is a pair of isogenous data with `p` good for the
/// isogeny: the identity, or `SL_n` against `PGL_n` with `p` prime to `n`.
pub fn nonstandard_pair_check(rd1: &RootDatum, rd2: &RootDatum, p: u32) -> bool {
    if rd1.n != rd2.n {
        return false;
    }
    if rd1.kind == rd2.kind {
        return true;
    }
    let pair = (rd1.kind, rd2.kind);
    let isogenous = matches!(pair, (GroupKind::SL, GroupKind::PGL) | (GroupKind::PGL, GroupKind::SL));
    isogenous && !(rd1.n as u64).is_multiple_of(p as u64)
}

/// Finitely generated abelian group `Z^free_rank + sum Z/d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup { free_rank: rank, torsion: vec![] }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order, if finite.
    pub fn order(&self) -> Option<u64> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Group from arbitrary cyclic factors (zero means `Z`).
    pub fn from_cyclic(factors: &[i64]) -> Self {
        let mut free_rank = 0;
        let mut tors: Vec<i64> = Vec::new();
        for &d in factors {
            let d = d.abs();
            if d == 0 {
                free_rank += 1;
            } else if d > 1 {
                tors.push(d);
            }
        }
        // normalize to a divisibility chain
        let mut changed = true;
        while changed {
            changed = false;
            tors.sort_unstable();
            for i in 0..tors.len() {
                for j in i + 1..tors.len() {
                    if tors[j] % tors[i] != 0 {
                        let (g, l) = (tors[i].gcd(&tors[j]), tors[i].lcm(&tors[j]));
                        tors[i] = g;
                        tors[j] = l;
                        changed = true;
                    }
                }
            }
            tors.retain(|&d| d > 1);
        }
        FinAbGroup { free_rank, torsion: tors.into_iter().map(|d| d as u64).collect() }
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

/// Diagonal of the Smith normal form of an integer matrix (nonzero entries
/// only, in divisibility order).
pub fn smith_diagonal(m: &[Vec<i64>]) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot of least absolute value
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t].div_euclid(a[t][t]);
            if q != 0 {
                for j in t..cols {
                    a[i][j] -= q * a[t][j];
                }
            }
            clean &= a[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = a[t][j].div_euclid(a[t][t]);
            if q != 0 {
                for i in t..rows {
                    a[i][j] -= q * a[i][t];
                }
            }
            clean &= a[t][j] == 0;
        }
        if clean {
            diag.push(a[t][t].abs() as i64);
            t += 1;
        }
    }
    let g = FinAbGroup::from_cyclic(&diag);
    let mut out = vec![1i64; diag.len() - g.torsion.len()];
    out.extend(g.torsion.iter().map(|&d| d as i64));
    out
}

/// Rank of an integer matrix.
pub fn int_rank(m: &[Vec<i64>]) -> usize {
    smith_diagonal(m).len()
}

/// `X / sum_w (w - 1) X` for `X = Z^rank`.
pub fn coinvariants(rank: usize, generators: &[Vec<Vec<i64>>]) -> FinAbGroup {
    // columns of all (w - 1) side by side
    let mut a = vec![Vec::new(); rank];
    for w in generators {
        for i in 0..rank {
            for j in 0..rank {
                let delta = if i == j { 1 } else { 0 };
                a[i].push(w[i][j] - delta);
            }
        }
    }
    if a.iter().all(|r| r.is_empty()) {
        return FinAbGroup::free(rank);
    }
    let d = smith_diagonal(&a);
    let mut factors: Vec<i64> = d.clone();
    factors.extend(std::iter::repeat_n(0, rank - d.len()));
    FinAbGroup::from_cyclic(&factors)
}

/// Rank of the invariants `X^W` for `X = Z^rank`.
pub fn invariant_rank(rank: usize, generators: &[Vec<Vec<i64>>]) -> usize {
    let mut a: Vec<Vec<i64>> = Vec::new();
    for w in generators {
        for i in 0..rank {
            a.push((0..rank).map(|j| w[i][j] - if i == j { 1 } else { 0 }).collect());
        }
    }
    if a.is_empty() {
        return rank;
    }
    rank - int_rank(&a)
}

/// `kappa` vector from strings like `"1/2"`.
pub fn parse_kappa(parts: &[String]) -> Result<Kappa> {
    let v = parts
        .iter()
        .map(|s| {
            let s = s.trim();
            let (num, den) = match s.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (s, "1"),
            };
            let num: i64 = num.parse().map_err(|_| Error::InvalidInput(format!("bad kappa entry {s:?}")))?;
            let den: i64 = den.parse().map_err(|_| Error::InvalidInput(format!("bad kappa entry {s:?}")))?;
            if den == 0 {
                return Err(Error::InvalidInput("kappa denominator is zero".into()));
            }
            Ok(Ratio::new(num, den))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Kappa::new(v))
}
