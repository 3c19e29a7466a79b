//! Finite fields F_{p^k} with a canonical defining polynomial.
//!
//! Elements are packed into a `u64` as base-`p` digits: digit `i` is the
//! coefficient of `x^i` in the polynomial basis over F_p. Small fields carry
//! log/exp tables; larger ones multiply in the polynomial basis.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Fields up to this many elements get log/exp tables.
const TABLE_LIMIT: u64 = 1 << 21;

/// A field element, packed as base-`p` digits.
pub type Fe = u64;

#[derive(Clone)]
pub struct Gf {
    p: u32,
    k: u32,
    /// Monic defining polynomial, `modulus[i]` is the coefficient of `x^i`, length `k + 1`.
    modulus: Vec<u32>,
    size: u64,
    pow_p: Vec<u64>,
    tables: Option<Tables>,
}

#[derive(Clone)]
struct Tables {
    log: Vec<u32>,
    exp: Vec<u64>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; modulus {:?})", self.p, self.k, self.modulus)
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}
impl Eq for Gf {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Gf {
    /// The field with `p^k` elements, defined by the lexicographically least
    /// monic irreducible polynomial of degree `k` (coefficients compared in
    /// the order `c_0, c_1, ...`).
    pub fn new(p: u32, k: u32) -> Result<Gf> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be positive".into()));
        }
        let size = (p as u64)
            .checked_pow(k)
            .filter(|s| *s < (1u64 << 62))
            .ok_or_else(|| Error::InvalidInput(format!("field {p}^{k} too large")))?;
        let modulus = canonical_modulus(p, k);
        Ok(Self::with_modulus(p, k, modulus, size))
    }

    fn with_modulus(p: u32, k: u32, modulus: Vec<u32>, size: u64) -> Gf {
        let mut pow_p = Vec::with_capacity(k as usize + 1);
        let mut acc = 1u64;
        for _ in 0..=k {
            pow_p.push(acc);
            acc = acc.saturating_mul(p as u64);
        }
        let mut gf = Gf { p, k, modulus, size, pow_p, tables: None };
        if k > 1 && size <= TABLE_LIMIT {
            gf.tables = Some(gf.build_tables());
        }
        gf
    }

    fn build_tables(&self) -> Tables {
        let order = self.size - 1;
        let factors = prime_factors(order);
        let mut g = 2u64;
        loop {
            if g >= self.size {
                panic!("no generator found for {:?}", self);
            }
            if factors.iter().all(|&f| self.pow_slow(g, order / f) != 1) {
                break;
            }
            g += 1;
        }
        let mut exp = vec![0u64; order as usize];
        let mut log = vec![0u32; self.size as usize];
        let mut x = 1u64;
        for i in 0..order {
            exp[i as usize] = x;
            log[x as usize] = i as u32;
            x = self.mul_poly(x, g);
        }
        Tables { log, exp }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.k
    }
    pub fn size(&self) -> u64 {
        self.size
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn digits(&self, a: Fe) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.k as usize);
        let mut a = a;
        for _ in 0..self.k {
            d.push((a % self.p as u64) as u32);
            a /= self.p as u64;
        }
        d
    }

    #[inline]
    pub fn from_digits(&self, d: &[u32]) -> Fe {
        d.iter().rev().fold(0u64, |acc, &x| acc * self.p as u64 + x as u64)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> Fe {
        v.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p as u64 { s - self.p as u64 } else { s };
        }
        let p = self.p as u64;
        let (mut a, mut b, mut out) = (a, b, 0u64);
        for i in 0..self.k as usize {
            let s = (a % p + b % p) % p;
            out += s * self.pow_p[i];
            a /= p;
            b /= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p as u64 - a };
        }
        let p = self.p as u64;
        let (mut a, mut out) = (a, 0u64);
        for i in 0..self.k as usize {
            let d = a % p;
            out += ((p - d) % p) * self.pow_p[i];
            a /= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.k == 1 {
            return a * b % self.p as u64;
        }
        if let Some(t) = &self.tables {
            let l = t.log[a as usize] as u64 + t.log[b as usize] as u64;
            return t.exp[(l % (self.size - 1)) as usize];
        }
        self.mul_poly(a, b)
    }

    fn mul_poly(&self, a: Fe, b: Fe) -> Fe {
        let k = self.k as usize;
        let p = self.p as u64;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                let m = self.modulus[j] as u64;
                prod[i - k + j] = (prod[i - k + j] + (p - c) * m) % p;
            }
            prod[i] = 0;
        }
        prod.iter().take(k).rev().fold(0u64, |acc, &x| acc * p + x)
    }

    fn pow_slow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly_or_prime(acc, base);
            }
            base = self.mul_poly_or_prime(base, base);
            e >>= 1;
        }
        acc
    }

    fn mul_poly_or_prime(&self, a: Fe, b: Fe) -> Fe {
        if self.k == 1 {
            a * b % self.p as u64
        } else {
            self.mul_poly(a, b)
        }
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        if let (Some(t), true) = (&self.tables, a != 0) {
            let l = (t.log[a as usize] as u128 * e as u128 % (self.size - 1) as u128) as usize;
            return t.exp[l];
        }
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let l = t.log[a as usize] as u64;
            return Ok(t.exp[((self.size - 1 - l) % (self.size - 1)) as usize]);
        }
        Ok(self.pow(a, self.size - 2))
    }

    /// Frobenius `a -> a^(p^j)`.
    pub fn frob(&self, a: Fe, j: u32) -> Fe {
        let mut x = a;
        for _ in 0..j {
            x = self.pow(x, self.p as u64);
        }
        x
    }

    pub fn is_square(&self, a: Fe) -> bool {
        a == 0 || self.pow(a, (self.size - 1) / 2) == 1
    }

    /// Least non-square in the canonical element order.
    pub fn least_nonsquare(&self) -> Fe {
        (1..self.size).find(|&x| !self.is_square(x)).expect("odd characteristic")
    }

    /// An element of exact multiplicative order `n`, if `n | size - 1`.
    pub fn root_of_unity(&self, n: u64) -> Option<Fe> {
        if !(self.size - 1).is_multiple_of(n) {
            return None;
        }
        let factors = prime_factors(n);
        (2..self.size).chain(1..2).find_map(|g| {
            let z = self.pow(g, (self.size - 1) / n);
            factors.iter().all(|&f| self.pow(z, n / f) != 1).then_some(z)
        })
    }

    /// Elements of `self` as an iterator in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.size
    }

    // ---------------------------------------------------------------------
    // Polynomials over the field. Coefficient vectors are low degree first
    // and kept trimmed (no trailing zeros; the zero polynomial is empty).

    pub fn poly_trim(v: &mut Vec<Fe>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn poly_add(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        let n = a.len().max(b.len());
        let mut r: Vec<Fe> = (0..n)
            .map(|i| self.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        Self::poly_trim(&mut r);
        r
    }

    pub fn poly_sub(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        let nb: Vec<Fe> = b.iter().map(|&x| self.neg(x)).collect();
        self.poly_add(a, &nb)
    }

    pub fn poly_mul(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut r = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = self.add(r[i + j], self.mul(x, y));
            }
        }
        Self::poly_trim(&mut r);
        r
    }

    pub fn poly_divrem(&self, a: &[Fe], b: &[Fe]) -> Result<(Vec<Fe>, Vec<Fe>)> {
        if b.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let mut r = a.to_vec();
        Self::poly_trim(&mut r);
        if r.len() < b.len() {
            return Ok((vec![], r));
        }
        let lead_inv = self.inv(*b.last().unwrap())?;
        let mut q = vec![0; r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = self.mul(*r.last().unwrap(), lead_inv);
            q[shift] = c;
            for (j, &y) in b.iter().enumerate() {
                r[shift + j] = self.sub(r[shift + j], self.mul(c, y));
            }
            Self::poly_trim(&mut r);
        }
        Self::poly_trim(&mut q);
        Ok((q, r))
    }

    pub fn poly_monic(&self, a: &[Fe]) -> Vec<Fe> {
        match a.last() {
            None => vec![],
            Some(&l) => {
                let li = self.inv(l).expect("nonzero lead");
                a.iter().map(|&x| self.mul(x, li)).collect()
            }
        }
    }

    pub fn poly_gcd(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        Self::poly_trim(&mut x);
        Self::poly_trim(&mut y);
        while !y.is_empty() {
            let (_, r) = self.poly_divrem(&x, &y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        self.poly_monic(&x)
    }

    pub fn poly_mulmod(&self, a: &[Fe], b: &[Fe], m: &[Fe]) -> Vec<Fe> {
        let prod = self.poly_mul(a, b);
        self.poly_divrem(&prod, m).expect("nonzero modulus").1
    }

    pub fn poly_powmod(&self, a: &[Fe], mut e: u64, m: &[Fe]) -> Vec<Fe> {
        let mut base = self.poly_divrem(a, m).expect("nonzero modulus").1;
        let mut acc = vec![1];
        if m.len() == 1 {
            return vec![];
        }
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mulmod(&acc, &base, m);
            }
            base = self.poly_mulmod(&base, &base, m);
            e >>= 1;
        }
        acc
    }

    pub fn poly_eval(&self, a: &[Fe], x: Fe) -> Fe {
        a.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// `x^size mod m`, via repeated `p`-th powers.
    fn x_pow_size_mod(&self, m: &[Fe]) -> Vec<Fe> {
        let mut r = vec![0, 1];
        for _ in 0..self.k {
            r = self.poly_powmod(&r, self.p as u64, m);
        }
        r
    }

    /// Roots of `f` in this field with multiplicities, sorted by element code.
    pub fn poly_roots(&self, f: &[Fe]) -> Vec<(Fe, usize)> {
        let mut f = f.to_vec();
        Self::poly_trim(&mut f);
        if f.len() <= 1 {
            return vec![];
        }
        let f = self.poly_monic(&f);
        let xq = self.x_pow_size_mod(&f);
        let g = self.poly_gcd(&f, &self.poly_sub(&xq, &[0, 1]));
        let mut roots = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        self.split_linear(&g, &mut roots, &mut rng);
        roots.sort_unstable();
        roots
            .into_iter()
            .map(|r| {
                let mut mult = 0;
                let mut cur = f.clone();
                loop {
                    let (q, rem) = self.poly_divrem(&cur, &[self.neg(r), 1]).unwrap();
                    if !rem.is_empty() {
                        break;
                    }
                    mult += 1;
                    cur = q;
                }
                (r, mult)
            })
            .collect()
    }

    fn split_linear(&self, g: &[Fe], out: &mut Vec<Fe>, rng: &mut ChaCha8Rng) {
        match g.len() {
            0 | 1 => {}
            2 => out.push(self.neg(self.mul(g[0], self.inv(g[1]).unwrap()))),
            _ => loop {
                let a = rng.gen_range(0..self.size);
                let h = self.poly_powmod(&[a, 1], (self.size - 1) / 2, g);
                let d = self.poly_gcd(g, &self.poly_sub(&h, &[1]));
                if d.len() > 1 && d.len() < g.len() {
                    let (q, _) = self.poly_divrem(g, &d).unwrap();
                    self.split_linear(&d, out, rng);
                    self.split_linear(&self.poly_monic(&q), out, rng);
                    return;
                }
            },
        }
    }

    /// Is the polynomial (over this field) irreducible?
    pub fn poly_is_irreducible(&self, f: &[Fe]) -> bool {
        let f = self.poly_monic(f);
        let n = f.len() - 1;
        if n <= 1 {
            return n == 1;
        }
        let mut xp = vec![0, 1];
        for _ in 1..=n / 2 {
            for _ in 0..self.k {
                xp = self.poly_powmod(&xp, self.p as u64, &f);
            }
            if self.poly_gcd(&f, &self.poly_sub(&xp, &[0, 1])).len() > 1 {
                return false;
            }
        }
        true
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Lexicographically least monic irreducible polynomial of degree `k` over F_p,
/// comparing coefficient tuples `(c_0, c_1, ..., c_{k-1})`.
pub fn canonical_modulus(p: u32, k: u32) -> Vec<u32> {
    let prime = Gf::with_modulus(p, 1, vec![0, 1], p as u64);
    let total = (p as u64).pow(k);
    // for k > 1 every candidate with c_0 = 0 is divisible by x
    let first = if k > 1 { total / p as u64 } else { 0 };
    for idx in first..total {
        // c_0 is the most significant digit of idx.
        let mut coeffs = vec![0u32; k as usize + 1];
        let mut rest = idx;
        for i in (0..k as usize).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[k as usize] = 1;
        let f: Vec<Fe> = coeffs.iter().map(|&c| c as Fe).collect();
        if prime.poly_is_irreducible(&f) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// A field `big` containing a copy of `small`, with the embedding given by
/// the image of the generator of `small`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub small: Gf,
    pub big: Gf,
    gen_image: Fe,
    /// Images of the powers `x^i`, `i < deg small`.
    basis_images: Vec<Fe>,
}

impl Embedding {
    pub fn new(small: &Gf, big: &Gf) -> Result<Embedding> {
        if small.p != big.p || !big.k.is_multiple_of(small.k) {
            return Err(Error::InvalidInput("field does not embed".into()));
        }
        let gen_image = if small.k == 1 {
            0
        } else {
            let m: Vec<Fe> = small.modulus.iter().map(|&c| c as Fe).collect();
            big.poly_roots(&m)
                .first()
                .map(|r| r.0)
                .ok_or_else(|| Error::InvalidInput("no embedding".into()))?
        };
        let basis_images = (0..small.k as u64).map(|i| big.pow(gen_image, i)).collect();
        Ok(Embedding { small: small.clone(), big: big.clone(), gen_image, basis_images })
    }

    pub fn map(&self, a: Fe) -> Fe {
        if self.small.k == 1 {
            return a;
        }
        self.small.digits(a).iter().zip(&self.basis_images).fold(0, |acc, (&d, &b)| {
            self.big.add(acc, self.big.mul(self.big.from_int(d as i64), b))
        })
    }

    /// Inverse image of `a`, if `a` lies in the subfield.
    pub fn preimage(&self, a: Fe) -> Option<Fe> {
        if self.small.k == 1 {
            return (a < self.small.p as u64).then_some(a);
        }
        if self.big.pow(a, self.small.size) != a {
            return None;
        }
        self.small.elements().find(|&x| self.map(x) == a)
    }

    pub fn generator_image(&self) -> Fe {
        self.gen_image
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        assert_eq!(canonical_modulus(3, 2), vec![1, 0, 1]); // x^2 + 1
        assert_eq!(canonical_modulus(2, 3), vec![1, 0, 1, 1]); // x^3 + x^2 + 1
        assert_eq!(canonical_modulus(5, 2), vec![1, 1, 1]); // x^2 + x + 1
        assert_eq!(canonical_modulus(7, 1), vec![0, 1]);
    }

    #[test]
    fn field_axioms_small() {
        for (p, k) in [(3, 2), (5, 2), (3, 3), (7, 1)] {
            let f = Gf::new(p, k).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements().step_by(3) {
                    assert_eq!(f.mul(a, b), f.mul_poly_or_prime(a, b));
                }
            }
        }
    }

    #[test]
    fn poly_path_matches_tables() {
        let f = Gf::new(3, 4).unwrap();
        let mut g = f.clone();
        g.tables = None;
        for a in (0..f.size()).step_by(7) {
            for b in (0..f.size()).step_by(5) {
                assert_eq!(f.mul(a, b), g.mul(a, b));
            }
        }
    }

    #[test]
    fn roots_and_embedding() {
        let f9 = Gf::new(3, 2).unwrap();
        // x^2 - 2 = x^2 + 1 over F_3 has two roots in F_9.
        let r = f9.poly_roots(&[1, 0, 1]);
        assert_eq!(r.len(), 2);
        let f81 = Gf::new(3, 4).unwrap();
        let e = Embedding::new(&f9, &f81).unwrap();
        for a in f9.elements() {
            for b in f9.elements() {
                assert_eq!(e.map(f9.mul(a, b)), f81.mul(e.map(a), e.map(b)));
                assert_eq!(e.map(f9.add(a, b)), f81.add(e.map(a), e.map(b)));
            }
            assert_eq!(e.preimage(e.map(a)), Some(a));
        }
        // repeated root
        let sq = f9.poly_mul(&[2, 1], &[2, 1]);
        assert_eq!(f9.poly_roots(&sq), vec![(1, 2)]);
    }

    #[test]
    fn nonsquares_and_roots_of_unity() {
        let f = Gf::new(7, 1).unwrap();
        assert_eq!(f.least_nonsquare(), 3);
        let z = f.root_of_unity(3).unwrap();
        assert_eq!(f.pow(z, 3), 1);
        assert_ne!(z, 1);
        assert!(f.root_of_unity(4).is_none());
    }
}
