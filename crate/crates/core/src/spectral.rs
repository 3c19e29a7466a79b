//! Local invariants of a characteristic `a`: the order `B = O[t]/P`, its
//! normalization, `d`, `c`, `s`, `delta`, component groups, radicial
//! valuations, unit indices and the endoscopic transfer.

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finfield::{Fe, Gf};
use crate::fqlin::{self, FinAlg, Subspace};
use crate::localfield::{self, BranchData, Q64};
use crate::omat::{self, OMat, OPoly};
use crate::rootdata::{
    coinvariants, invariant_rank, permutation_action, EndoscopicDatum, FinAbGroup, GroupKind, HKind, Kappa,
    RootDatum,
};
use crate::series::{TruncSeries, EXACT};

pub const DEFAULT_PRECISION_CAP: usize = 256;

/// Hard precision cap, overridable through `FLCHECK_PRECISION_CAP`.
pub fn precision_cap() -> usize {
    std::env::var("FLCHECK_PRECISION_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_PRECISION_CAP)
}

/// A point `a` of the Chevalley base over `O`:
/// `P(a, t) = t^n - a_1 t^{n-1} + ... + (-1)^n a_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalChar {
    pub rd: RootDatum,
    pub field: Gf,
    pub a: Vec<TruncSeries>,
}

impl LocalChar {
    pub fn new(rd: &RootDatum, field: &Gf, a: Vec<TruncSeries>) -> Result<LocalChar> {
        if a.len() != rd.n {
            return Err(Error::InvalidInput(format!("expected {} coefficients, got {}", rd.n, a.len())));
        }
        if field.p() != rd.p {
            return Err(Error::InvalidInput("field characteristic differs from the root datum".into()));
        }
        if rd.kind != GroupKind::GL && rd.n >= 2 && !a[0].is_zero() {
            return Err(Error::InvalidInput(format!("{}_{} requires a_1 = 0", rd.kind, rd.n)));
        }
        Ok(LocalChar { rd: rd.clone(), field: field.clone(), a })
    }

    pub fn n(&self) -> usize {
        self.rd.n
    }

    /// Monic `P(a, t)`, low degree first.
    pub fn poly(&self) -> OPoly {
        let f = &self.field;
        let n = self.n();
        let mut p = vec![TruncSeries::zero(EXACT); n + 1];
        p[n] = TruncSeries::one();
        for (i, ai) in self.a.iter().enumerate() {
            let k = i + 1;
            p[n - k] = if k % 2 == 1 { ai.neg(f) } else { ai.clone() };
        }
        p
    }

    pub fn from_poly(rd: &RootDatum, field: &Gf, p: &OPoly) -> Result<LocalChar> {
        let n = omat::poly_degree(p);
        let a = (1..=n)
            .map(|k| if k % 2 == 1 { p[n - k].neg(field) } else { p[n - k].clone() })
            .collect();
        LocalChar::new(rd, field, a)
    }

    /// `a mod e^N`, regarded as an exact characteristic.
    pub fn truncated(&self, prec: usize) -> LocalChar {
        LocalChar { a: self.a.iter().map(|c| c.with_prec(prec).set_prec(EXACT)).collect(), ..self.clone() }
    }

    pub fn is_exact(&self) -> bool {
        self.a.iter().all(|c| c.is_exact())
    }

    pub fn display(&self) -> Vec<String> {
        self.a.iter().map(|c| c.display(&self.field)).collect()
    }
}

/// Companion matrix of `P(a, t)`: ones below the diagonal, last column
/// `-p_0, ..., -p_{n-1}`.
pub fn companion_point(a: &LocalChar) -> OMat {
    let f = &a.field;
    let p = a.poly();
    let n = a.n();
    let mut m = vec![vec![TruncSeries::zero(EXACT); n]; n];
    for i in 1..n {
        m[i][i - 1] = TruncSeries::one();
    }
    for j in 0..n {
        m[j][n - 1] = p[j].neg(f);
    }
    m
}

/// `B = O[t]/P` and its normalization `B'`, with the finite algebra
/// `B' / e^K B'` used for lattice and unit computations.
#[derive(Clone, Debug)]
pub struct OrderData {
    pub field: Gf,
    pub n: usize,
    pub d: usize,
    pub poly: OPoly,
    /// `e^d beta_k` in the monomial basis of `B`, for an `O`-basis `beta` of
    /// `B'`; triangular with pivot `e^{pivots[k]}` in coordinate `k`.
    pub embed: Vec<Vec<TruncSeries>>,
    pub pivots: Vec<usize>,
    pub delta: usize,
    /// Least `c'` with `e^{c'} B' in B`.
    pub cond_exp: usize,
    /// `B'/e^K B'`, `K = max(c', 1)`; basis `beta_l e^j` at index `l K + j`.
    pub alg: FinAlg,
    pub k: usize,
    /// Image of `B` in `alg`.
    pub b_sub: Subspace,
    /// Spanning set of the image of `B` (monomials times powers of `e`).
    pub b_span: Vec<Vec<Fe>>,
    /// Image of the conductor `{x : x B' in B}`.
    pub conductor: Subspace,
    /// `B'/e B'` and the image of `B` there.
    pub residue: FinAlg,
    pub residue_b: Subspace,
}

fn exact_poly(p: &OPoly) -> OPoly {
    p.iter().map(|c| c.set_prec(EXACT)).collect()
}

/// Coordinates of an element of `O[t]/P` as a polynomial in `t`.
fn as_tpoly(v: &[TruncSeries]) -> OPoly {
    v.to_vec()
}

fn reduce_mod(f: &Gf, x: &OPoly, p: &OPoly) -> Vec<TruncSeries> {
    let n = omat::poly_degree(p);
    let mut r = omat::poly_divrem_monic(f, x, p).1;
    r.resize(n, TruncSeries::zero(EXACT));
    r
}

/// `(O/e^D)^n` coordinates: index `k D + j` is the coefficient of `e^j` in
/// coordinate `k`.
fn from_flat(v: &[Fe], n: usize, dd: usize) -> Vec<TruncSeries> {
    (0..n).map(|k| TruncSeries::from_coeffs(v[k * dd..(k + 1) * dd].to_vec(), EXACT)).collect()
}

fn shift_flat(v: &[Fe], n: usize, dd: usize) -> Vec<Fe> {
    let mut out = vec![0; v.len()];
    for k in 0..n {
        for j in 0..dd - 1 {
            out[k * dd + j + 1] = v[k * dd + j];
        }
    }
    out
}

/// Is `z = Z / e^d` integral over `O`, for `Z` in `O[t]/P`?
fn is_integral(f: &Gf, zc: &[TruncSeries], p: &OPoly, d: usize) -> bool {
    let m = omat::mult_matrix(f, &as_tpoly(zc), p);
    let cp = omat::char_poly(f, &m);
    let n = cp.len() - 1;
    (1..=n).all(|i| {
        let c = &cp[n - i];
        match c.val() {
            None => true,
            Some(v) => v >= d * i,
        }
    })
}

impl OrderData {
    pub fn compute(field: &Gf, poly: &OPoly, d: usize) -> Result<OrderData> {
        let f = field;
        let p = exact_poly(poly);
        let n = omat::poly_degree(&p);
        let dd = d + 1;
        let dim = n * dd;
        // e^d B' mod e^{d+1}, starting from e^d B
        let base: Vec<Vec<Fe>> = (0..n)
            .map(|k| {
                let mut v = vec![0; dim];
                v[k * dd + d] = 1;
                v
            })
            .collect();
        let shift = |v: &Vec<Fe>| shift_flat(v, n, dd);
        let mut w = Subspace::span(f, dim, &base);
        if d > 0 {
            loop {
                // w / e w
                let ew: Vec<Vec<Fe>> = w.basis.iter().map(shift).collect();
                let ew = Subspace::span(f, dim, &ew);
                let reps = w.complement_basis(f, &ew);
                let mut found: Vec<Vec<Fe>> = Vec::new();
                for coeffs in combos(f, reps.len()) {
                    let mut x = vec![0; dim];
                    for (c, r) in coeffs.iter().zip(&reps) {
                        if *c != 0 {
                            for (xi, &ri) in x.iter_mut().zip(r) {
                                *xi = f.add(*xi, f.mul(*c, ri));
                            }
                        }
                    }
                    // z = x / e must have integral coordinates
                    if (0..n).any(|k| x[k * dd] != 0) {
                        continue;
                    }
                    let mut z = vec![0; dim];
                    for k in 0..n {
                        for j in 1..dd {
                            z[k * dd + j - 1] = x[k * dd + j];
                        }
                    }
                    if w.contains(f, &z) {
                        continue;
                    }
                    if is_integral(f, &from_flat(&z, n, dd), &p, d) {
                        found.push(z);
                    }
                }
                if found.is_empty() {
                    break;
                }
                let mut gens = w.basis.clone();
                gens.extend(found);
                // close under e
                let mut sub = Subspace::span(f, dim, &gens);
                loop {
                    let more: Vec<Vec<Fe>> = sub.basis.iter().map(shift).collect();
                    let next = sub.add(f, &more);
                    if next.rank() == sub.rank() {
                        break;
                    }
                    sub = next;
                }
                w = sub;
            }
        }
        let delta = w.rank() - n;
        // triangular O-basis from the RREF
        let mut embed = Vec::with_capacity(n);
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let row = w
                .basis
                .iter()
                .find(|r| {
                    let piv = r.iter().position(|&x| x != 0).unwrap();
                    piv >= k * dd && piv < (k + 1) * dd
                })
                .ok_or_else(|| Error::Inconsistent("normalization basis is degenerate".into()))?;
            pivots.push(row.iter().position(|&x| x != 0).unwrap() - k * dd);
            embed.push(from_flat(row, n, dd));
        }
        if pivots.iter().sum::<usize>() != n * d - delta {
            return Err(Error::Inconsistent("normalization basis has wrong index".into()));
        }
        let min_val = embed
            .iter()
            .flat_map(|v| v.iter().filter_map(|c| c.val()))
            .min()
            .unwrap_or(d);
        let cond_exp = d - min_val.min(d);
        let k = cond_exp.max(1);
        let mut od = OrderData {
            field: f.clone(),
            n,
            d,
            poly: p,
            embed,
            pivots,
            delta,
            cond_exp,
            alg: FinAlg { field: f.clone(), dim: 0, table: vec![], one: vec![] },
            k,
            b_sub: Subspace::zero(0),
            b_span: vec![],
            conductor: Subspace::zero(0),
            residue: FinAlg { field: f.clone(), dim: 0, table: vec![], one: vec![] },
            residue_b: Subspace::zero(0),
        };
        let (alg, b_span) = od.build_alg(k)?;
        let b_sub = Subspace::span(f, alg.dim, &b_span);
        let conductor = conductor_of(&alg, &b_sub);
        let (residue, rb_span) = od.build_alg(1)?;
        od.residue_b = Subspace::span(f, residue.dim, &rb_span);
        od.residue = residue;
        od.alg = alg;
        od.b_span = b_span;
        od.b_sub = b_sub;
        od.conductor = conductor;
        Ok(od)
    }

    /// Coordinates over `O` (mod `e^prec`) of `y / e^d` in the basis `beta`,
    /// i.e. of `y` in the basis `e^d beta`.
    fn solve(&self, y: &[TruncSeries], prec: usize) -> Result<Vec<TruncSeries>> {
        let f = &self.field;
        let n = self.n;
        let work = prec + self.d * (n + 1) + 2;
        let mut rest: Vec<TruncSeries> = y.iter().map(|c| c.with_prec(work)).collect();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let piv = self.embed[k][k].with_prec(work);
            let c = rest[k].div(f, &piv)?;
            for (i, r) in rest.iter_mut().enumerate().skip(k) {
                *r = r.sub(f, &c.mul(f, &self.embed[k][i].with_prec(work)));
            }
            out.push(c);
        }
        if rest.iter().any(|r| !r.is_zero()) {
            return Err(Error::Inconsistent("element outside the normalization".into()));
        }
        out.iter()
            .map(|c| {
                if c.prec < prec {
                    return Err(Error::PrecisionExhausted("structure constants".into()));
                }
                Ok(c.with_prec(prec))
            })
            .collect()
    }

    /// Coordinates of `x/e^d` for `x` in `O[t]/P` given as `e^d`-scaled.
    fn coords(&self, y: &[TruncSeries], prec: usize) -> Result<Vec<TruncSeries>> {
        self.solve(y, prec)
    }

    /// Build `B'/e^K B'` and a spanning set of the image of `B`.
    fn build_alg(&self, k: usize) -> Result<(FinAlg, Vec<Vec<Fe>>)> {
        let f = &self.field;
        let n = self.n;
        let d = self.d;
        let dim = n * k;
        // structure constants: beta_i beta_j = sum_l c_ijl beta_l, i.e.
        // (e^d beta_i)(e^d beta_j) / e^d in the basis e^d beta
        let mut sc = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let prod = reduce_mod(f, &omat::poly_mul(f, &self.embed[i], &self.embed[j]), &self.poly);
                let prod: Vec<TruncSeries> = prod.iter().map(|c| c.shift_down(d)).collect::<Result<_>>()?;
                let c = self.coords(&prod, k)?;
                sc[i][j] = c.clone();
                sc[j][i] = c;
            }
        }
        let mut table = vec![vec![vec![0; dim]; dim]; dim];
        for i in 0..n {
            for a in 0..k {
                for j in 0..n {
                    for b in 0..k {
                        let mut v = vec![0; dim];
                        for (l, c) in sc[i][j].iter().enumerate() {
                            for t in 0..k {
                                if a + b + t < k {
                                    v[l * k + a + b + t] = c.coeff(t);
                                }
                            }
                        }
                        table[i * k + a][j * k + b] = v;
                    }
                }
            }
        }
        let embed_flat = |c: &[TruncSeries], shift: usize| {
            let mut v = vec![0; dim];
            for (l, s) in c.iter().enumerate() {
                for t in 0..k {
                    if t + shift < k {
                        v[l * k + t + shift] = s.coeff(t);
                    }
                }
            }
            v
        };
        // monomials t^m = e^d t^m / e^d
        let mut b_span = Vec::new();
        let mut one = vec![0; dim];
        for m in 0..n {
            let mut y = vec![TruncSeries::zero(EXACT); n];
            y[m] = TruncSeries::monomial(1, d);
            let c = self.coords(&y, k)?;
            if m == 0 {
                one = embed_flat(&c, 0);
            }
            for j in 0..k {
                b_span.push(embed_flat(&c, j));
            }
        }
        Ok((FinAlg { field: f.clone(), dim, table, one }, b_span))
    }

    /// Monomial `t` in the algebra.
    pub fn t_elem(&self) -> Vec<Fe> {
        if self.n > 1 {
            self.b_span[self.k].clone()
        } else {
            self.b_span[0].clone()
        }
    }

    /// `e` in the algebra.
    pub fn eps_elem(&self) -> Vec<Fe> {
        if self.k > 1 {
            self.b_span[1].clone()
        } else {
            vec![0; self.alg.dim]
        }
    }

    /// Generators of `B` as an algebra acting on `alg`: `t` and `e`.
    pub fn b_generators(&self) -> Vec<Vec<Fe>> {
        vec![self.t_elem(), self.eps_elem()]
    }

    /// `B'`-span of a subspace of `alg`.
    pub fn bflat_span(&self, m: &Subspace) -> Subspace {
        let f = &self.field;
        let mut gens = Vec::new();
        for v in &m.basis {
            for i in 0..self.alg.dim {
                gens.push(self.alg.mul(&self.alg.unit(i), v));
            }
        }
        Subspace::span(f, self.alg.dim, &gens)
    }

    /// Multiplier ring `{x in B' : x M in M}` as a subspace of `alg`.
    pub fn multiplier_ring(&self, m: &Subspace) -> Subspace {
        let f = &self.field;
        let dim = self.alg.dim;
        // x -> (x m_j mod M)_j is linear in x
        let vecs: Vec<Vec<Fe>> = (0..dim)
            .map(|i| {
                let e = self.alg.unit(i);
                m.basis.iter().flat_map(|mj| fqlin::reduce(f, &m.basis, &self.alg.mul(&e, mj))).collect()
            })
            .collect();
        if m.basis.is_empty() {
            return Subspace::span(f, dim, &(0..dim).map(|i| self.alg.unit(i)).collect::<Vec<_>>());
        }
        let ker = fqlin::relations(f, &vecs);
        Subspace::span(f, dim, &ker)
    }

    pub fn units_bflat(&self) -> u128 {
        let all: Vec<Vec<Fe>> = (0..self.alg.dim).map(|i| self.alg.unit(i)).collect();
        self.alg.unit_count(&all)
    }

    pub fn units_of(&self, sub: &Subspace) -> u128 {
        self.alg.unit_count(&sub.basis)
    }

    /// `[B'^x : B^x]`.
    pub fn unit_index_gl(&self) -> u128 {
        self.units_bflat() / self.units_of(&self.b_sub)
    }

    /// Reduction mod `e` of an element of `alg`.
    pub fn to_residue(&self, x: &[Fe]) -> Vec<Fe> {
        (0..self.n).map(|l| x[l * self.k]).collect()
    }

    /// Does some unit of the subring (given by a spanning set in `alg`, or
    /// all of `B'` when `None`) have a non-square norm?
    pub fn has_nonsquare_norm(&self, sub: Option<&Subspace>) -> bool {
        let f = &self.field;
        let res = &self.residue;
        let span: Vec<Vec<Fe>> = match sub {
            None => (0..res.dim).map(|i| res.unit(i)).collect(),
            Some(s) => fqlin::rref(f, &s.basis.iter().map(|v| self.to_residue(v)).collect::<Vec<_>>()),
        };
        combos(f, span.len()).into_iter().any(|c| {
            let mut x = vec![0; res.dim];
            for (ci, v) in c.iter().zip(&span) {
                for (xi, &vi) in x.iter_mut().zip(v) {
                    *xi = f.add(*xi, f.mul(*ci, vi));
                }
            }
            let nm = res.norm(&x);
            nm != 0 && !f.is_square(nm)
        })
    }

    /// `[R^1 : B^1]` for a multiplier ring `R` (norm-one units).
    pub fn norm_one_index(&self, r: &Subspace) -> Ratio<i128> {
        let idx = (self.units_of(r) / self.units_of(&self.b_sub)) as i128;
        let nr = if self.has_nonsquare_norm(Some(r)) { 2 } else { 1 };
        let nb = if self.has_nonsquare_norm(Some(&self.b_sub)) { 2 } else { 1 };
        Ratio::new(idx * nb, nr)
    }
}

fn conductor_of(alg: &FinAlg, b_sub: &Subspace) -> Subspace {
    let f = &alg.field;
    let dim = alg.dim;
    let vecs: Vec<Vec<Fe>> = (0..dim)
        .map(|j| {
            let e = alg.unit(j);
            (0..dim).flat_map(|i| fqlin::reduce(f, &b_sub.basis, &alg.mul(&e, &alg.unit(i)))).collect()
        })
        .collect();
    Subspace::span(f, dim, &fqlin::relations(f, &vecs))
}

/// All coefficient vectors in `F^k` (including zero), in a fixed order.
pub fn combos(f: &Gf, k: usize) -> Vec<Vec<Fe>> {
    let q = f.size();
    let total = q.pow(k as u32);
    (0..total)
        .map(|mut x| {
            (0..k)
                .map(|_| {
                    let c = x % q;
                    x /= q;
                    c
                })
                .collect()
        })
        .collect()
}

/// Torus type of a one-dimensional anisotropic/split torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorusType {
    Split,
    Unramified,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalInvariants {
    pub d: usize,
    pub s: usize,
    pub c: usize,
    pub delta: usize,
    pub pi0_rank: usize,
    /// `None` for `SL_n`, `n >= 3`, with ramified branches.
    pub pi0: Option<FinAbGroup>,
    /// `((i, j), r(e_i - e_j))`.
    pub radicial: Vec<((usize, usize), Q64)>,
    pub simple_case: bool,
    pub ram_indices: Vec<usize>,
    pub residue_degrees: Vec<usize>,
}

/// Everything derived from `a` at a fixed working precision.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub a: LocalChar,
    pub precision: usize,
    pub branches: BranchData,
    pub order: OrderData,
    pub inv: LocalInvariants,
}

impl Analysis {
    /// Is some geometric branch ramified?
    pub fn ramified(&self) -> bool {
        self.inv.c > 0
    }

    /// Number of components of the special fiber of `J_a`, `n = 2`.
    pub fn pi0_special_fiber(&self) -> u64 {
        if self.inv.d > 0 {
            2
        } else {
            1
        }
    }

    /// `c_K`: number of classes sharing the point set, for `SL_2`.
    pub fn c_k(&self) -> u64 {
        if self.ramified() && self.a.rd.kind == GroupKind::SL {
            2
        } else {
            1
        }
    }

    pub fn torus_type(&self) -> TorusType {
        if self.ramified() {
            TorusType::Ramified
        } else if self.branches.arithmetic.len() == self.a.n() {
            TorusType::Split
        } else {
            TorusType::Unramified
        }
    }
}

fn with_retry<T>(start: usize, mut f: impl FnMut(usize) -> Result<T>) -> Result<(T, usize)> {
    let cap = precision_cap();
    let mut prec = start.min(cap).max(1);
    loop {
        match f(prec) {
            Ok(v) => return Ok((v, prec)),
            Err(Error::PrecisionExhausted(msg)) => {
                if prec >= cap {
                    return Err(Error::PrecisionExhausted(format!("{msg} (cap {cap})")));
                }
                prec = (prec * 2).min(cap);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Discriminant valuation with automatic precision increase.
pub fn disc_valuation_of(a: &LocalChar, start: Option<usize>) -> Result<usize> {
    let p = a.poly();
    let start = start.unwrap_or(4 * a.n() + 8);
    let (d, _) = with_retry(start, |prec| localfield::disc_valuation(&a.field, &localfield::with_precision(&p, prec)))
        .map_err(|e| match e {
            Error::PrecisionExhausted(_) if a.is_exact() => Error::NotRegular,
            e => e,
        })?;
    Ok(d)
}

/// Compute all local invariants. `precision` overrides the default working
/// precision `4 (n + d)`.
pub fn analyze(a: &LocalChar, precision: Option<usize>) -> Result<Analysis> {
    let n = a.n();
    let d = disc_valuation_of(a, precision)?;
    let start = precision.unwrap_or(4 * (n + d)).max(2 * d + 2);
    let p = a.poly();
    let (branches, prec) = with_retry(start, |prec| localfield::factor_tame(&a.field, &localfield::with_precision(&p, prec)))?;
    let order = OrderData::compute(&a.field, &a.truncated(prec.max(2 * d + 2)).poly(), d)?;
    let inv = invariants_from(a, d, &branches, &order)?;
    Ok(Analysis { a: a.clone(), precision: prec, branches, order, inv })
}

fn invariants_from(a: &LocalChar, d: usize, bd: &BranchData, order: &OrderData) -> Result<LocalInvariants> {
    let rd = &a.rd;
    let n = rd.n;
    let s = bd.s();
    let inertia = permutation_action(rd.kind, n, &bd.root_inertia);
    let c = rd.rank - invariant_rank(rd.rank, std::slice::from_ref(&inertia));
    if (d as i64 - c as i64) % 2 != 0 || c > d {
        return Err(Error::Inconsistent(format!("d - c is not even and nonnegative (d = {d}, c = {c})")));
    }
    let delta_formula = (d - c) / 2;
    if delta_formula != order.delta {
        return Err(Error::Inconsistent(format!(
            "delta mismatch: (d - c)/2 = {delta_formula}, dim B'/B = {}",
            order.delta
        )));
    }
    let pi0 = match rd.kind {
        GroupKind::GL | GroupKind::PGL => Some(coinvariants(rd.rank, std::slice::from_ref(&inertia))),
        GroupKind::SL if c == 0 => Some(coinvariants(rd.rank, std::slice::from_ref(&inertia))),
        GroupKind::SL if n == 2 => Some(FinAbGroup::trivial()),
        GroupKind::SL => None,
    };
    let pi0_rank = rd.rank - c;
    let mut radicial = Vec::new();
    let mut total = Q64::from_integer(0);
    for &(i, j) in &rd.root_labels {
        let r = bd.pair_valuation(i, j)?;
        total += r;
        radicial.push(((i, j), r));
    }
    if total != Q64::from_integer(d as i64) {
        return Err(Error::Inconsistent(format!("radicial valuations sum to {total}, d = {d}")));
    }
    Ok(LocalInvariants {
        d,
        s,
        c,
        delta: order.delta,
        pi0_rank,
        pi0,
        radicial,
        simple_case: false,
        ram_indices: bd.ram_indices(),
        residue_degrees: bd.arithmetic.iter().map(|b| b.f).collect(),
    })
}

pub fn compute_invariants(a: &LocalChar) -> Result<LocalInvariants> {
    Ok(analyze(a, None)?.inv)
}

pub fn radicial_valuations(a: &LocalChar) -> Result<Vec<((usize, usize), Q64)>> {
    Ok(analyze(a, None)?.inv.radicial)
}

/// `[J'^0(O) : J^0(O)]`: the constant converting between the Néron and the
/// connected normalizations.
pub fn unit_index(an: &Analysis) -> Result<Ratio<i128>> {
    let od = &an.order;
    match an.a.rd.kind {
        GroupKind::GL => Ok(Ratio::from_integer(od.unit_index_gl() as i128)),
        GroupKind::PGL if an.a.n() == 2 => Ok(Ratio::from_integer(od.unit_index_gl() as i128)),
        GroupKind::SL if an.a.n() == 2 => {
            let all = Subspace::span(&od.field, od.alg.dim, &(0..od.alg.dim).map(|i| od.alg.unit(i)).collect::<Vec<_>>());
            let idx = od.norm_one_index(&all);
            Ok(idx * Ratio::from_integer(an.pi0_special_fiber() as i128) / Ratio::from_integer(an.c_k() as i128))
        }
        k => Err(Error::Unsupported(format!("unit index for {k}_{}", an.a.n()))),
    }
}

/// The `H`-side characteristic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HChar {
    /// `H = G`.
    Same(LocalChar),
    /// `SL_2` with `kappa = -1`: torus coordinate `y` and the torus type.
    Torus { y: TruncSeries, torus: TorusType },
    /// Block characteristics for a Levi-type `H` inside `GL_n`.
    Blocks(Vec<LocalChar>),
}

/// Transfer `nu: c_H -> c`.
pub fn transfer_a(ed: &EndoscopicDatum, field: &Gf, a_h: &HChar) -> Result<LocalChar> {
    let rd = &ed.parent;
    let f = field;
    let a = match (a_h, &ed.h_kind) {
        (HChar::Same(a), _) => a.clone(),
        (HChar::Torus { y, torus }, HKind::Torus) if rd.n == 2 && rd.kind != GroupKind::GL => {
            let u = match torus {
                TorusType::Split => TruncSeries::one(),
                TorusType::Unramified => TruncSeries::constant(f.least_nonsquare(), EXACT),
                TorusType::Ramified => TruncSeries::monomial(1, 1),
            };
            // P = t^2 - u y^2
            let c = u.mul(f, &y.mul(f, y));
            LocalChar::new(rd, f, vec![TruncSeries::zero(EXACT), c.neg(f)])?
        }
        (HChar::Blocks(blocks), HKind::Blocks(_) | HKind::Torus) if rd.kind == GroupKind::GL => {
            let p = blocks.iter().fold(vec![TruncSeries::one()], |acc, b| omat::poly_mul(f, &acc, &b.poly()));
            if omat::poly_degree(&p) != rd.n {
                return Err(Error::InvalidInput("block sizes do not add up to n".into()));
            }
            LocalChar::from_poly(rd, f, &p)?
        }
        _ => return Err(Error::UnsupportedH(format!("{:?} for {}_{}", ed.h_kind, rd.kind, rd.n))),
    };
    match disc_valuation_of(&a, None) {
        Ok(_) => Ok(a),
        Err(Error::NotRegular) | Err(Error::PrecisionExhausted(_)) => Err(Error::NotGRegular),
        Err(e) => Err(e),
    }
}

/// Discriminant valuation on the `H` side.
pub fn h_disc_valuation(a_h: &HChar) -> Result<usize> {
    match a_h {
        HChar::Same(a) => disc_valuation_of(a, None),
        HChar::Torus { .. } => Ok(0),
        HChar::Blocks(bs) => bs.iter().map(|b| disc_valuation_of(b, None)).sum(),
    }
}

/// `r_v = (d_G(a) - d_H(a_H)) / 2`.
pub fn resultant_valuation(ed: &EndoscopicDatum, field: &Gf, a_h: &HChar) -> Result<usize> {
    let a = transfer_a(ed, field, a_h)?;
    let dg = disc_valuation_of(&a, None)?;
    let dh = h_disc_valuation(a_h)?;
    if dg < dh || (dg - dh) % 2 != 0 {
        return Err(Error::Inconsistent(format!("d_G - d_H = {dg} - {dh} is not a nonnegative even integer")));
    }
    Ok((dg - dh) / 2)
}

/// The root pair `(i, j)` with `r = 1` in the case `d = 2`, `c = 0`.
pub fn simple_pair(an: &Analysis) -> Option<(usize, usize)> {
    if an.inv.d != 2 || an.inv.c != 0 {
        return None;
    }
    let one = Q64::from_integer(1);
    let pairs: Vec<(usize, usize)> =
        an.inv.radicial.iter().filter(|(ij, r)| *r == one && ij.0 < ij.1).map(|x| x.0).collect();
    (pairs.len() == 1).then(|| pairs[0])
}

/// Is `kappa` fixed by the Frobenius action on `X_*`?
pub fn kappa_frobenius_invariant(an: &Analysis, kappa: &Kappa) -> bool {
    let rd = &an.a.rd;
    let frob = permutation_action(rd.kind, rd.n, &an.branches.root_frob);
    (0..rd.rank).all(|k| {
        let col: Vec<i64> = frob.iter().map(|row| row[k]).collect();
        kappa.pair(&col) == kappa.vector[k]
    })
}

/// `d = 2`, `c = 0`, `kappa(alpha^vee) != 1` for the colliding pair, and
/// `kappa` Frobenius-invariant.
pub fn detect_simple_case(an: &Analysis, ed: &EndoscopicDatum) -> bool {
    let Some((i, j)) = simple_pair(an) else { return false };
    let rd = &an.a.rd;
    let idx = rd.root_labels.iter().position(|&l| l == (i, j)).unwrap();
    let nontrivial = !ed.kappa.pair(&rd.coroots[idx]).is_zero();
    nontrivial && kappa_frobenius_invariant(an, &ed.kappa)
}

/// `#A_{+-alpha}(k)`: `q - 1` if the colliding roots are rational, `q + 1`
/// if Frobenius swaps them.
pub fn simple_torus_order(an: &Analysis) -> Option<u64> {
    let (i, j) = simple_pair(an)?;
    let q = an.a.field.size();
    let fr = &an.branches.root_frob;
    if fr[i] == i && fr[j] == j {
        Some(q - 1)
    } else if fr[i] == j && fr[j] == i {
        Some(q + 1)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::build_root_datum;
    use crate::series::parse_series;

    fn lc(kind: GroupKind, p: u32, a: &[&str]) -> LocalChar {
        let rd = build_root_datum(kind, a.len(), p).unwrap();
        let f = Gf::new(p, 1).unwrap();
        let a = a.iter().map(|s| parse_series(s, &f, EXACT).unwrap()).collect();
        LocalChar::new(&rd, &f, a).unwrap()
    }

    #[test]
    fn companion_examples() {
        let a = lc(GroupKind::GL, 3, &["0", "-1*e"]);
        let m = companion_point(&a);
        assert_eq!(m[0][1].coeffs, vec![0, 1]);
        assert_eq!(m[1][0].coeffs, vec![1]);
        assert!(m[0][0].is_zero() && m[1][1].is_zero());
        let a = lc(GroupKind::GL, 5, &["1", "0", "-1"]);
        let m = companion_point(&a);
        let col: Vec<Vec<Fe>> = (0..3).map(|i| m[i][2].coeffs.clone()).collect();
        assert_eq!(col, vec![vec![4], vec![], vec![1]]);
        let cp = omat::char_poly(&a.field, &m);
        assert_eq!(cp, a.poly());
    }

    #[test]
    fn invariants_gl2() {
        let an = analyze(&lc(GroupKind::GL, 3, &["0", "-2*e^2"]), None).unwrap();
        assert_eq!((an.inv.d, an.inv.s, an.inv.c, an.inv.delta, an.inv.pi0_rank), (2, 2, 0, 1, 2));
        assert_eq!(unit_index(&an).unwrap(), Ratio::from_integer(4));
        let an = analyze(&lc(GroupKind::GL, 3, &["0", "-1*e"]), None).unwrap();
        assert_eq!((an.inv.d, an.inv.s, an.inv.c, an.inv.delta), (1, 1, 1, 0));
        let an = analyze(&lc(GroupKind::GL, 3, &["0", "1"]), None).unwrap();
        assert_eq!((an.inv.d, an.inv.c, an.inv.delta), (0, 0, 0));
        assert_eq!(unit_index(&an).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn unit_index_depth_two() {
        let an = analyze(&lc(GroupKind::GL, 3, &["0", "-2*e^4"]), None).unwrap();
        assert_eq!(an.inv.delta, 2);
        // (q^2 - 1) q^2 / ((q - 1) q) = (q + 1) q
        assert_eq!(unit_index(&an).unwrap(), Ratio::from_integer(12));
    }

    #[test]
    fn sl2_unit_indices() {
        // unramified depth 1: q + 1; split depth 1: q - 1; ramified: 1
        let an = analyze(&lc(GroupKind::SL, 3, &["0", "-2*e^2"]), None).unwrap();
        assert_eq!(unit_index(&an).unwrap(), Ratio::from_integer(4));
        let an = analyze(&lc(GroupKind::SL, 3, &["0", "-1*e^2"]), None).unwrap();
        assert_eq!(unit_index(&an).unwrap(), Ratio::from_integer(2));
        let an = analyze(&lc(GroupKind::SL, 3, &["0", "-1*e"]), None).unwrap();
        assert_eq!(unit_index(&an).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn radicial_examples() {
        let an = analyze(&lc(GroupKind::GL, 3, &["0", "-2*e^2"]), None).unwrap();
        assert!(an.inv.radicial.iter().all(|(_, r)| *r == Q64::from_integer(1)));
        let an = analyze(&lc(GroupKind::GL, 3, &["0", "-1*e"]), None).unwrap();
        assert!(an.inv.radicial.iter().all(|(_, r)| *r == Q64::new(1, 2)));
    }

    #[test]
    fn cubic_delta() {
        // cusp-like t^3 - e^2 and a node-like product
        let an = analyze(&lc(GroupKind::GL, 5, &["0", "0", "1*e^2"]), None).unwrap();
        assert_eq!((an.inv.d, an.inv.c, an.inv.delta), (4, 2, 1));
        let an = analyze(&lc(GroupKind::GL, 7, &["0", "-1*e^2", "0"]), None).unwrap();
        // t (t^2 - e^2): roots 0, e, -e
        assert_eq!((an.inv.d, an.inv.s, an.inv.c, an.inv.delta), (6, 3, 0, 3));
    }

    #[test]
    fn transfer_and_resultant() {
        let rd = build_root_datum(GroupKind::SL, 2, 3).unwrap();
        let f = Gf::new(3, 1).unwrap();
        let ed = crate::rootdata::endoscopic_datum(&rd, &Kappa::new(vec![Ratio::new(1, 2)])).unwrap();
        let y = TruncSeries::monomial(1, 1);
        let ah = HChar::Torus { y: y.clone(), torus: TorusType::Unramified };
        let a = transfer_a(&ed, &f, &ah).unwrap();
        assert_eq!(disc_valuation_of(&a, None).unwrap(), 2);
        assert_eq!(resultant_valuation(&ed, &f, &ah).unwrap(), 1);
        let ah = HChar::Torus { y, torus: TorusType::Ramified };
        assert!(matches!(resultant_valuation(&ed, &f, &ah), Err(Error::Inconsistent(_))));

        let an = analyze(&a, None).unwrap();
        assert!(detect_simple_case(&an, &ed));
        let triv = crate::rootdata::endoscopic_datum(&rd, &Kappa::trivial(1)).unwrap();
        assert!(!detect_simple_case(&an, &triv));
    }
}
