//! Linear algebra over a finite field and finite commutative F_q-algebras.

use crate::finfield::{Fe, Gf};

/// Reduced row echelon form; zero rows dropped.
pub fn rref(f: &Gf, rows: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    let mut m: Vec<Vec<Fe>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = f.inv(m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let k = m[i][c];
                for j in 0..cols {
                    let t = f.mul(k, m[r][j]);
                    m[i][j] = f.sub(m[i][j], t);
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

pub fn rank(f: &Gf, rows: &[Vec<Fe>]) -> usize {
    rref(f, rows).len()
}

fn pivot(row: &[Fe]) -> usize {
    row.iter().position(|&x| x != 0).unwrap_or(row.len())
}

/// Remainder of `v` modulo the span of an RREF basis.
pub fn reduce(f: &Gf, basis: &[Vec<Fe>], v: &[Fe]) -> Vec<Fe> {
    let mut v = v.to_vec();
    for b in basis {
        let p = pivot(b);
        if p < v.len() && v[p] != 0 {
            let k = v[p];
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.sub(*x, f.mul(k, y));
            }
        }
    }
    v
}

/// Basis of `{x : sum_i x_i v_i = 0}` for the given vectors `v_i`.
pub fn relations(f: &Gf, vecs: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    let k = vecs.len();
    if k == 0 {
        return vec![];
    }
    let dim = vecs[0].len();
    // solve M x = 0 where the columns of M are the v_i
    let rows: Vec<Vec<Fe>> = (0..dim).map(|i| vecs.iter().map(|v| v[i]).collect()).collect();
    kernel(f, &rows, k)
}

/// Kernel of the matrix with the given rows (`cols` columns).
pub fn kernel(f: &Gf, rows: &[Vec<Fe>], cols: usize) -> Vec<Vec<Fe>> {
    let r = rref(f, rows);
    let pivots: Vec<usize> = r.iter().map(|row| pivot(row)).collect();
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![0; cols];
        x[free] = 1;
        for (row, &p) in r.iter().zip(&pivots) {
            x[p] = f.neg(row[free]);
        }
        out.push(x);
    }
    out
}

/// Subspace of `F^dim` in canonical (RREF) form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    pub dim: usize,
    pub basis: Vec<Vec<Fe>>,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Subspace { dim, basis: vec![] }
    }

    pub fn span(f: &Gf, dim: usize, vecs: &[Vec<Fe>]) -> Self {
        Subspace { dim, basis: rref(f, vecs) }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, f: &Gf, v: &[Fe]) -> bool {
        reduce(f, &self.basis, v).iter().all(|&x| x == 0)
    }

    pub fn add(&self, f: &Gf, vecs: &[Vec<Fe>]) -> Self {
        let mut all = self.basis.clone();
        all.extend(vecs.iter().cloned());
        Subspace::span(f, self.dim, &all)
    }

    pub fn contains_space(&self, f: &Gf, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(f, v))
    }

    /// Vectors of `self.basis` completing a basis of `sub` to one of `self`.
    pub fn complement_basis(&self, f: &Gf, sub: &Subspace) -> Vec<Vec<Fe>> {
        let mut cur = sub.clone();
        let mut out = Vec::new();
        for v in &self.basis {
            if !cur.contains(f, v) {
                cur = cur.add(f, std::slice::from_ref(v));
                out.push(v.clone());
            }
        }
        out
    }
}

/// Finite commutative F_q-algebra with basis `e_0..e_{dim-1}`.
#[derive(Clone, Debug)]
pub struct FinAlg {
    pub field: Gf,
    pub dim: usize,
    /// `table[i][j]` = coordinates of `e_i e_j`.
    pub table: Vec<Vec<Vec<Fe>>>,
    pub one: Vec<Fe>,
}

impl FinAlg {
    pub fn mul(&self, x: &[Fe], y: &[Fe]) -> Vec<Fe> {
        let f = &self.field;
        let mut out = vec![0; self.dim];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let c = f.mul(a, b);
                for (o, &t) in out.iter_mut().zip(&self.table[i][j]) {
                    if t != 0 {
                        *o = f.add(*o, f.mul(c, t));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &[Fe], mut e: u64) -> Vec<Fe> {
        let mut base = x.to_vec();
        let mut acc = self.one.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn unit(&self, i: usize) -> Vec<Fe> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }

    /// Smallest subalgebra-stable subspace containing `gens` and closed
    /// under multiplication by the elements of `ring` (a spanning set).
    pub fn module_closure(&self, start: &Subspace, gens: &[Vec<Fe>], ring: &[Vec<Fe>]) -> Subspace {
        let f = &self.field;
        let mut cur = start.clone();
        let mut queue: Vec<Vec<Fe>> = gens.iter().filter(|v| !cur.contains(f, v)).cloned().collect();
        while let Some(v) = queue.pop() {
            if cur.contains(f, &v) {
                continue;
            }
            cur = cur.add(f, std::slice::from_ref(&v));
            for r in ring {
                let w = self.mul(r, &v);
                if !cur.contains(f, &w) {
                    queue.push(w);
                }
            }
        }
        cur
    }

    /// Number of units of the subalgebra spanned by `sub` (which must
    /// contain 1 and be closed under multiplication).
    pub fn unit_count(&self, sub: &[Vec<Fe>]) -> u128 {
        let f = &self.field;
        let q = f.size();
        let s = sub.len();
        if s == 0 {
            return 1;
        }
        // Frobenius iterates of the basis
        let mut iters: Vec<Vec<Vec<Fe>>> = vec![sub.to_vec()];
        let mut k = 0u32;
        let mut qk: u128 = 1;
        while qk < s as u128 + 1 {
            qk *= q as u128;
            k += 1;
        }
        let steps = (s as u32).max(k) as usize;
        for j in 0..steps {
            let next: Vec<Vec<Fe>> = iters[j].iter().map(|b| self.pow(b, q)).collect();
            iters.push(next);
        }
        let rad = relations(f, &iters[k as usize]).len();
        let h: Vec<usize> = (0..=s)
            .map(|j| {
                if j == 0 {
                    return 0;
                }
                let diffs: Vec<Vec<Fe>> =
                    iters[j].iter().zip(sub).map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()).collect();
                relations(f, &diffs).len()
            })
            .collect();
        // phi(j) M_j = sum_{d | j} mu(j/d) h(d); N_f = sum_k mu(k) M_{fk}
        let mut m = vec![0i64; s + 1];
        for j in 1..=s {
            let mut acc = 0i64;
            for d in 1..=j {
                if j % d == 0 {
                    acc += mobius(j / d) * h[d] as i64;
                }
            }
            m[j] = acc / phi(j) as i64;
        }
        let mut count: u128 = (q as u128).pow(rad as u32);
        for fdeg in 1..=s {
            let mut nf = 0i64;
            let mut kk = 1;
            while fdeg * kk <= s {
                nf += mobius(kk) * m[fdeg * kk];
                kk += 1;
            }
            if nf > 0 {
                count *= ((q as u128).pow(fdeg as u32) - 1).pow(nf as u32);
            }
        }
        count
    }

    /// Matrix (rows) of multiplication by `x`, acting on column vectors.
    pub fn mult_matrix(&self, x: &[Fe]) -> Vec<Vec<Fe>> {
        let cols: Vec<Vec<Fe>> = (0..self.dim).map(|j| self.mul(x, &self.unit(j))).collect();
        (0..self.dim).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
    }

    /// Norm to F_q (determinant of multiplication).
    pub fn norm(&self, x: &[Fe]) -> Fe {
        det(&self.field, &self.mult_matrix(x))
    }
}

pub fn det(f: &Gf, m: &[Vec<Fe>]) -> Fe {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = 1;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| a[i][c] != 0) else { return 0 };
        if p != c {
            a.swap(p, c);
            d = f.neg(d);
        }
        d = f.mul(d, a[c][c]);
        let inv = f.inv(a[c][c]).unwrap();
        for i in c + 1..n {
            if a[i][c] != 0 {
                let k = f.mul(a[i][c], inv);
                for j in c..n {
                    let t = f.mul(k, a[c][j]);
                    a[i][j] = f.sub(a[i][j], t);
                }
            }
        }
    }
    d
}

pub fn mobius(n: usize) -> i64 {
    let mut n = n;
    let mut res = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            res = -res;
        }
        p += 1;
    }
    if n > 1 {
        res = -res;
    }
    res
}

pub fn phi(n: usize) -> usize {
    (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// F_q[x]/(g) as a FinAlg in the monomial basis.
    fn quotient_alg(f: &Gf, g: &[Fe]) -> FinAlg {
        let n = g.len() - 1;
        let table = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut m = vec![0; i + j + 1];
                        m[i + j] = 1;
                        let (_, r) = f.poly_divrem(&m, g).unwrap();
                        let mut r = r;
                        r.resize(n, 0);
                        r
                    })
                    .collect()
            })
            .collect();
        let mut one = vec![0; n];
        one[0] = 1;
        FinAlg { field: f.clone(), dim: n, table, one }
    }

    #[test]
    fn unit_counts() {
        let f = Gf::new(3, 1).unwrap();
        let all = |n: usize| (0..n).map(|i| { let mut v = vec![0; n]; v[i] = 1; v }).collect::<Vec<_>>();
        // F_3[x]/(x^2+1) = F_9: 8 units
        assert_eq!(quotient_alg(&f, &[1, 0, 1]).unit_count(&all(2)), 8);
        // F_3[x]/(x^2): 6 units
        assert_eq!(quotient_alg(&f, &[0, 0, 1]).unit_count(&all(2)), 6);
        // F_3[x]/(x(x-1)) = F_3^2: 4 units
        assert_eq!(quotient_alg(&f, &[0, 2, 1]).unit_count(&all(2)), 4);
        // F_3[x]/((x^2+1)^2 x): (9-1) 9 (3-1)
        let g = f.poly_mul(&f.poly_mul(&[1, 0, 1], &[1, 0, 1]), &[0, 1]);
        assert_eq!(quotient_alg(&f, &g).unit_count(&all(5)), 8 * 9 * 2);
        // subalgebra F_3 inside F_9
        assert_eq!(quotient_alg(&f, &[1, 0, 1]).unit_count(&[vec![1, 0]]), 2);
    }

    #[test]
    fn kernel_and_rref() {
        let f = Gf::new(5, 1).unwrap();
        let rows = vec![vec![1, 2, 3], vec![2, 4, 0]];
        let k = kernel(&f, &rows, 3);
        assert_eq!(k.len(), 1);
        for r in &rows {
            let s = r.iter().zip(&k[0]).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
            assert_eq!(s, 0);
        }
        assert_eq!(det(&f, &[vec![1, 2], vec![3, 4]]), f.from_int(-2));
    }
}
