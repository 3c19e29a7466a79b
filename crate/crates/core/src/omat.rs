//! Polynomials and matrices over O = F[[e]] with truncated coefficients.

use crate::error::{Error, Result};
use crate::finfield::Gf;
use crate::series::{TruncSeries, EXACT};

/// Polynomial over O, coefficients low degree first.
pub type OPoly = Vec<TruncSeries>;
pub type OMat = Vec<Vec<TruncSeries>>;

pub fn poly_degree(p: &OPoly) -> usize {
    p.len().saturating_sub(1)
}

pub fn poly_add(f: &Gf, a: &OPoly, b: &OPoly) -> OPoly {
    let n = a.len().max(b.len());
    let z = TruncSeries::zero(EXACT);
    (0..n).map(|i| a.get(i).unwrap_or(&z).add(f, b.get(i).unwrap_or(&z))).collect()
}

pub fn poly_sub(f: &Gf, a: &OPoly, b: &OPoly) -> OPoly {
    let nb: OPoly = b.iter().map(|x| x.neg(f)).collect();
    poly_add(f, a, &nb)
}

pub fn poly_mul(f: &Gf, a: &OPoly, b: &OPoly) -> OPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![TruncSeries::zero(EXACT); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(f, &x.mul(f, y));
        }
    }
    out
}

pub fn poly_scale(f: &Gf, a: &OPoly, c: &TruncSeries) -> OPoly {
    a.iter().map(|x| x.mul(f, c)).collect()
}

/// Division with remainder by a monic polynomial.
pub fn poly_divrem_monic(f: &Gf, a: &OPoly, m: &OPoly) -> (OPoly, OPoly) {
    let dm = poly_degree(m);
    if a.len() <= dm {
        return (vec![], a.clone());
    }
    let mut r = a.clone();
    let mut q = vec![TruncSeries::zero(EXACT); a.len() - dm];
    for i in (dm..a.len()).rev() {
        let c = r[i].clone();
        q[i - dm] = c.clone();
        if c.is_zero() {
            r[i] = TruncSeries::zero(EXACT);
            continue;
        }
        for j in 0..=dm {
            r[i - dm + j] = r[i - dm + j].sub(f, &c.mul(f, &m[j]));
        }
        r[i] = TruncSeries::zero(EXACT);
    }
    r.truncate(dm);
    (q, r)
}

pub fn poly_derivative(f: &Gf, a: &OPoly) -> OPoly {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale(f, f.from_int(i as i64)))
        .collect()
}

pub fn poly_eval(f: &Gf, a: &OPoly, x: &TruncSeries) -> TruncSeries {
    a.iter().rev().fold(TruncSeries::zero(EXACT), |acc, c| acc.mul(f, x).add(f, c))
}

/// Matrix of multiplication by `x` on O[t]/(m) in the basis 1, t, ..., t^{n-1}.
/// Column `j` holds the coordinates of `x * t^j`.
pub fn mult_matrix(f: &Gf, x: &OPoly, m: &OPoly) -> OMat {
    let n = poly_degree(m);
    let mut cols = Vec::with_capacity(n);
    let mut cur = poly_divrem_monic(f, x, m).1;
    for _ in 0..n {
        let mut col = cur.clone();
        col.resize(n, TruncSeries::zero(EXACT));
        cols.push(col);
        let mut shifted = vec![TruncSeries::zero(EXACT)];
        shifted.extend(cur.iter().cloned());
        cur = poly_divrem_monic(f, &shifted, m).1;
    }
    transpose(&cols)
}

pub fn transpose(m: &OMat) -> OMat {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul(f: &Gf, a: &OMat, b: &OMat) -> OMat {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..k).fold(TruncSeries::zero(EXACT), |acc, l| acc.add(f, &a[i][l].mul(f, &b[l][j])))
                })
                .collect()
        })
        .collect()
}

/// Valuation of the determinant of a square matrix over O, by elimination
/// with minimal-valuation pivots.
pub fn det_valuation(f: &Gf, m: &OMat) -> Result<usize> {
    let n = m.len();
    let mut a = m.clone();
    let mut total = 0usize;
    for k in 0..n {
        // pivot of least valuation in the remaining block
        let mut best: Option<(usize, usize, usize)> = None;
        let mut min_unknown = usize::MAX;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                match x.val() {
                    Some(v) => {
                        if best.is_none_or(|b| v < b.2) {
                            best = Some((i, j, v));
                        }
                    }
                    None => min_unknown = min_unknown.min(x.prec),
                }
            }
        }
        let (pi, pj, pv) = best.ok_or_else(|| {
            Error::PrecisionExhausted("determinant vanishes at working precision".into())
        })?;
        if min_unknown < pv {
            return Err(Error::PrecisionExhausted("pivot choice ambiguous at working precision".into()));
        }
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        total += pv;
        let piv = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].div(f, &piv)?;
            for j in k..n {
                let t = factor.mul(f, &a[k][j]);
                a[i][j] = a[i][j].sub(f, &t);
            }
        }
    }
    Ok(total)
}

/// Characteristic polynomial coefficients of a square matrix via the
/// division-free Berkowitz algorithm. Returns `c` with
/// `det(T - M) = sum c_i T^i` (monic, `c[n] = 1`).
pub fn char_poly(f: &Gf, m: &OMat) -> OPoly {
    let n = m.len();
    if n == 0 {
        return vec![TruncSeries::one()];
    }
    // v holds coefficients of the char poly of the leading r x r block,
    // highest degree first, in the convention det(T - A).
    let mut v: Vec<TruncSeries> = vec![TruncSeries::one(), m[0][0].neg(f)];
    for r in 1..n {
        // Partition: A_r = [[B, C],[R, a]] with B = leading r x r block.
        let a_rr = m[r][r].clone();
        let row: Vec<TruncSeries> = (0..r).map(|j| m[r][j].clone()).collect();
        let col: Vec<TruncSeries> = (0..r).map(|i| m[i][r].clone()).collect();
        // Toeplitz first column: 1, -a, -R C, -R B C, -R B^2 C, ...
        let mut t = vec![TruncSeries::one(), a_rr.neg(f)];
        let mut bc = col.clone();
        for _ in 0..r {
            let rc = row.iter().zip(&bc).fold(TruncSeries::zero(EXACT), |acc, (x, y)| acc.add(f, &x.mul(f, y)));
            t.push(rc.neg(f));
            bc = (0..r)
                .map(|i| (0..r).fold(TruncSeries::zero(EXACT), |acc, j| acc.add(f, &m[i][j].mul(f, &bc[j]))))
                .collect();
        }
        // new v = T * v, T lower-triangular Toeplitz of size (r+2) x (r+1)
        let mut nv = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut acc = TruncSeries::zero(EXACT);
            for j in 0..=r.min(i) {
                if i - j < t.len() {
                    acc = acc.add(f, &t[i - j].mul(f, &v[j]));
                }
            }
            nv.push(acc);
        }
        v = nv;
    }
    v.reverse();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[u64]) -> TruncSeries {
        TruncSeries::from_coeffs(c.to_vec(), 20)
    }

    #[test]
    fn char_poly_matches_companion() {
        let f = Gf::new(5, 1).unwrap();
        // P = t^3 + 2 t^2 + e t + (1 + e)
        let p: OPoly = vec![s(&[1, 1]), s(&[0, 1]), s(&[2]), TruncSeries::one()];
        let t: OPoly = vec![TruncSeries::zero(EXACT), TruncSeries::one()];
        let m = mult_matrix(&f, &t, &p);
        let cp = char_poly(&f, &m);
        for i in 0..=3 {
            assert_eq!(cp[i].coeffs, p[i].coeffs, "coefficient {i}");
        }
    }

    #[test]
    fn det_valuation_diag() {
        let f = Gf::new(3, 1).unwrap();
        let m = vec![vec![s(&[0, 1]), s(&[1])], vec![s(&[0, 0, 1]), s(&[0, 2])]];
        // det = e*2e - e^2 = e^2
        assert_eq!(det_valuation(&f, &m).unwrap(), 2);
    }
}
