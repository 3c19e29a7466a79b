//! Polynomials over F_q[[e]]: Newton polygons, discriminant valuations,
//! Puiseux expansion of the roots with the Galois action on them, and
//! Hensel lifting of coprime factorizations.

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::finfield::{Embedding, Fe, Gf};
use crate::omat::{self, OPoly};
use crate::series::{TruncSeries, EXACT};

pub type Q64 = Ratio<i64>;

fn lcm_upto(n: usize, skip_p: Option<u32>) -> usize {
    (1..=n.max(1))
        .filter(|&k| skip_p.is_none_or(|p| k % p as usize != 0))
        .fold(1, |acc, k| acc.lcm(&k))
}

fn check_monic(p: &OPoly) -> Result<()> {
    match p.last() {
        Some(c) if c.coeffs == [1] => Ok(()),
        _ => Err(Error::InvalidInput("polynomial must be monic".into())),
    }
}

fn cpoly(c: TruncSeries) -> OPoly {
    vec![c]
}

/// Valuation of the discriminant of a monic polynomial, computed as the
/// valuation of the norm of `P'` in `O[t]/P`.
pub fn disc_valuation(f: &Gf, p: &OPoly) -> Result<usize> {
    check_monic(p)?;
    if omat::poly_degree(p) == 0 {
        return Ok(0);
    }
    let dp = omat::poly_derivative(f, p);
    let m = omat::mult_matrix(f, &dp, p);
    omat::det_valuation(f, &m)
}

/// Lower Newton polygon: `(slope, multiplicity)` where `slope` is the
/// valuation of the corresponding roots, in increasing order.
pub fn newton_polygon(p: &OPoly) -> Result<Vec<(Q64, usize)>> {
    check_monic(p)?;
    let n = omat::poly_degree(p);
    let pts: Vec<(i64, i64)> = p
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.val().map(|v| (i as i64, v as i64)))
        .collect();
    if pts.first().map(|x| x.0) != Some(0) {
        return Err(Error::PrecisionExhausted("constant term vanishes at working precision".into()));
    }
    // lower convex hull from left to right
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above segment a..pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    // unresolved coefficients must sit on or above the hull
    for (i, c) in p.iter().enumerate() {
        if c.val().is_none() && c.prec < EXACT {
            let i = i as i64;
            for w in hull.windows(2) {
                if w[0].0 <= i && i <= w[1].0 {
                    let h = Q64::new(w[0].1 * (w[1].0 - i) + w[1].1 * (i - w[0].0), w[1].0 - w[0].0);
                    if Q64::from_integer(c.prec as i64) < h {
                        return Err(Error::PrecisionExhausted("Newton polygon unresolved".into()));
                    }
                }
            }
        }
    }
    let mut out: Vec<(Q64, usize)> = hull
        .windows(2)
        .map(|w| (Q64::new(w[0].1 - w[1].1, w[1].0 - w[0].0), (w[1].0 - w[0].0) as usize))
        .collect();
    out.reverse();
    debug_assert_eq!(out.iter().map(|x| x.1).sum::<usize>(), n);
    Ok(out)
}

/// The splitting data used for root expansions: roots live in
/// `K[[u]]` with `K = F_{q^L}` and `u^E = e`.
#[derive(Clone, Debug)]
pub struct RootField {
    pub base: Gf,
    pub big: Gf,
    pub emb: Embedding,
    /// `E`: roots are series in `u = e^(1/E)`.
    pub ram: usize,
    /// Primitive `E`-th root of unity in `K`.
    pub zeta: Fe,
    pub q: u64,
}

impl RootField {
    pub fn new(base: &Gf, n: usize) -> Result<RootField> {
        let ram = lcm_upto(n, Some(base.p()));
        let l = lcm_upto(n, None);
        let big = Gf::new(base.p(), base.degree() * l as u32)?;
        let emb = Embedding::new(base, &big)?;
        let zeta = big
            .root_of_unity(ram as u64)
            .ok_or_else(|| Error::Inconsistent("missing root of unity".into()))?;
        Ok(RootField { base: base.clone(), big, emb, ram, zeta, q: base.size() })
    }

    /// `c(e)` as a series in `u`.
    pub fn lift(&self, c: &TruncSeries) -> TruncSeries {
        let mut coeffs = vec![0; c.coeffs.len().saturating_sub(1) * self.ram + 1];
        for (i, &x) in c.coeffs.iter().enumerate() {
            coeffs[i * self.ram] = self.emb.map(x);
        }
        let prec = if c.is_exact() { EXACT } else { c.prec * self.ram };
        TruncSeries::from_coeffs(coeffs, prec)
    }

    /// Inverse of `lift`, if the series lies in `F_q[[e]]`.
    pub fn descend(&self, c: &TruncSeries) -> Option<TruncSeries> {
        let mut coeffs = Vec::new();
        for (i, &x) in c.coeffs.iter().enumerate() {
            if i % self.ram != 0 {
                if x != 0 {
                    return None;
                }
                continue;
            }
            coeffs.push(self.emb.preimage(x)?);
        }
        let prec = if c.is_exact() { EXACT } else { c.prec / self.ram };
        Some(TruncSeries::from_coeffs(coeffs, prec))
    }

    /// Arithmetic Frobenius: `q`-th power on coefficients.
    pub fn sigma(&self, x: &TruncSeries) -> TruncSeries {
        let c = x.coeffs.iter().map(|&a| self.big.pow(a, self.q)).collect();
        TruncSeries::from_coeffs(c, x.prec)
    }

    /// Inertia generator: `u -> zeta u`.
    pub fn tau(&self, x: &TruncSeries) -> TruncSeries {
        let mut z = 1;
        let mut c = Vec::with_capacity(x.coeffs.len());
        for &a in &x.coeffs {
            c.push(self.big.mul(a, z));
            z = self.big.mul(z, self.zeta);
        }
        TruncSeries::from_coeffs(c, x.prec)
    }
}

/// Roots of `q` in `K[[u]]` that are integral, with `q` normalized so that
/// its reduction has degree equal to the number of such roots.
fn integral_roots(k: &Gf, q: &OPoly, depth: usize) -> Result<Vec<TruncSeries>> {
    if depth > 4096 {
        return Err(Error::PrecisionExhausted("root expansion does not separate".into()));
    }
    if q.iter().any(|c| c.prec == 0) {
        return Err(Error::PrecisionExhausted("root expansion ran out of precision".into()));
    }
    let mut qbar: Vec<Fe> = q.iter().map(|c| c.coeff(0)).collect();
    Gf::poly_trim(&mut qbar);
    let deg = qbar.len().saturating_sub(1);
    if deg == 0 {
        return Ok(vec![]);
    }
    let roots = k.poly_roots(&qbar);
    if roots.iter().map(|r| r.1).sum::<usize>() != deg {
        return Err(Error::Unsupported("residue polynomial does not split".into()));
    }
    let mut out = Vec::new();
    for (b, mu) in roots {
        if mu == 1 {
            out.push(newton_root(k, q, b)?);
            continue;
        }
        // q(b + u t) / u^w
        let lin: OPoly = vec![TruncSeries::constant(b, EXACT), TruncSeries::monomial(1, 1)];
        let mut shifted: OPoly = Vec::new();
        for c in q.iter().rev() {
            shifted = omat::poly_add(k, &omat::poly_mul(k, &shifted, &lin), &cpoly(c.clone()));
        }
        let w = shifted
            .iter()
            .filter_map(|c| c.val())
            .min()
            .ok_or_else(|| Error::PrecisionExhausted("shifted polynomial vanishes".into()))?;
        let shifted = shifted.iter().map(|c| c.shift_down(w)).collect::<Result<OPoly>>()?;
        let sub = integral_roots(k, &shifted, depth + 1)?;
        if sub.len() != mu {
            return Err(Error::Inconsistent("root count mismatch in expansion".into()));
        }
        for r in sub {
            out.push(r.shift_up(1).add(k, &TruncSeries::constant(b, EXACT)));
        }
    }
    Ok(out)
}

/// Newton iteration from a simple residual root.
fn newton_root(k: &Gf, q: &OPoly, b: Fe) -> Result<TruncSeries> {
    let target = q.iter().map(|c| c.prec).min().unwrap_or(EXACT);
    let dq = omat::poly_derivative(k, q);
    let mut x = TruncSeries::constant(b, target);
    for _ in 0..80 {
        let fx = omat::poly_eval(k, q, &x);
        if fx.is_zero() {
            return Ok(x.with_prec(target));
        }
        let dx = omat::poly_eval(k, &dq, &x);
        let step = fx.div(k, &dx)?;
        x = x.sub(k, &step).with_prec(target);
    }
    Err(Error::PrecisionExhausted("Newton iteration did not converge".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricBranch {
    pub e: usize,
    /// Indices into `BranchData::roots`.
    pub roots: Vec<usize>,
    /// Index of the arithmetic branch containing this one.
    pub arith: usize,
}

#[derive(Clone, Debug)]
pub struct ArithBranch {
    pub e: usize,
    pub f: usize,
    pub geometric: Vec<usize>,
    /// The irreducible factor of `P` over `F_q[[e]]`.
    pub factor: OPoly,
}

#[derive(Clone, Debug)]
pub struct BranchData {
    pub field: RootField,
    /// Roots of `P` as series in `u`.
    pub roots: Vec<TruncSeries>,
    pub root_frob: Vec<usize>,
    pub root_inertia: Vec<usize>,
    pub geometric: Vec<GeometricBranch>,
    /// Frobenius permutation of the geometric branches.
    pub frobenius: Vec<usize>,
    pub arithmetic: Vec<ArithBranch>,
}

impl BranchData {
    pub fn s(&self) -> usize {
        self.geometric.len()
    }

    pub fn root_valuation(&self, i: usize) -> Q64 {
        let r = &self.roots[i];
        let v = r.val().unwrap_or(r.prec);
        Q64::new(v as i64, self.field.ram as i64)
    }

    /// `val(root_i - root_j)` as a rational.
    pub fn pair_valuation(&self, i: usize, j: usize) -> Result<Q64> {
        let d = self.roots[i].sub(&self.field.big, &self.roots[j]);
        let v = d
            .val()
            .ok_or_else(|| Error::PrecisionExhausted("roots agree at working precision".into()))?;
        Ok(Q64::new(v as i64, self.field.ram as i64))
    }

    /// Ramification indices of the geometric branches in order.
    pub fn ram_indices(&self) -> Vec<usize> {
        self.geometric.iter().map(|g| g.e).collect()
    }

    /// Product of the arithmetic factors.
    pub fn factor_product(&self) -> OPoly {
        let f = &self.field.base;
        self.arithmetic
            .iter()
            .fold(vec![TruncSeries::one()], |acc, a| omat::poly_mul(f, &acc, &a.factor))
    }
}

fn find_match(k: &Gf, roots: &[TruncSeries], x: &TruncSeries) -> Result<usize> {
    let hits: Vec<usize> = (0..roots.len()).filter(|&j| roots[j].sub(k, x).is_zero()).collect();
    match hits.as_slice() {
        [j] => Ok(*j),
        [] => Err(Error::Inconsistent("Galois image of a root is not a root".into())),
        _ => Err(Error::PrecisionExhausted("roots not separated at working precision".into())),
    }
}

fn orbits(perms: &[&[usize]], n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for p in perms {
                let y = p[x];
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Factor a monic separable polynomial over `F_q[[e]]` into its tame
/// branches. Coefficients must already carry the working precision.
pub fn factor_tame(base: &Gf, p: &OPoly) -> Result<BranchData> {
    check_monic(p)?;
    let n = omat::poly_degree(p);
    let pc = base.p();
    if let Ok(np) = newton_polygon(p) {
        for (slope, _) in &np {
            let den = *slope.denom() as u32;
            if den.is_multiple_of(pc) {
                return Err(Error::WildRamification { p: pc, e: den as usize });
            }
        }
    }
    let field = RootField::new(base, n)?;
    let k = &field.big;
    let lifted: OPoly = p.iter().map(|c| field.lift(c)).collect();
    let roots = match integral_roots(k, &lifted, 0) {
        Ok(r) => r,
        Err(Error::Unsupported(_)) | Err(Error::Inconsistent(_)) if pc as usize <= n => {
            return Err(Error::WildRamification { p: pc, e: pc as usize })
        }
        Err(e) => return Err(e),
    };
    if roots.len() != n {
        return Err(Error::Inconsistent("wrong number of roots".into()));
    }

    let mut root_frob = Vec::with_capacity(n);
    let mut root_inertia = Vec::with_capacity(n);
    for r in &roots {
        root_frob.push(find_match(k, &roots, &field.sigma(r))?);
        root_inertia.push(find_match(k, &roots, &field.tau(r))?);
    }

    // geometric branches: inertia orbits, in canonical order
    let mut geo = orbits(&[&root_inertia], n);
    let key = |orbit: &Vec<usize>| {
        let best = orbit
            .iter()
            .map(|&i| {
                let r = &roots[i];
                (r.val().unwrap_or(r.prec), r.coeffs.clone())
            })
            .min()
            .unwrap();
        (orbit.len(), best)
    };
    geo.sort_by_key(key);
    let geo_of_root = {
        let mut v = vec![0; n];
        for (g, orbit) in geo.iter().enumerate() {
            for &i in orbit {
                v[i] = g;
            }
        }
        v
    };
    let frobenius: Vec<usize> = geo.iter().map(|o| geo_of_root[root_frob[o[0]]]).collect();

    // arithmetic branches: Frobenius orbits on geometric branches
    let arith_orbits = orbits(&[&frobenius], geo.len());
    let mut geometric = Vec::with_capacity(geo.len());
    for orbit in &geo {
        geometric.push(GeometricBranch { e: orbit.len(), roots: orbit.clone(), arith: 0 });
    }
    let mut arithmetic = Vec::new();
    for (a, orbit) in arith_orbits.iter().enumerate() {
        let mut fac: OPoly = vec![TruncSeries::one()];
        for &g in orbit {
            geometric[g].arith = a;
            for &i in &geometric[g].roots {
                fac = omat::poly_mul(k, &fac, &vec![roots[i].neg(k), TruncSeries::one()]);
            }
        }
        let factor = fac
            .iter()
            .map(|c| field.descend(c))
            .collect::<Option<OPoly>>()
            .ok_or_else(|| Error::Inconsistent("branch factor not defined over the base".into()))?;
        arithmetic.push(ArithBranch {
            e: geometric[orbit[0]].e,
            f: orbit.len(),
            geometric: orbit.clone(),
            factor,
        });
    }
    Ok(BranchData { field, roots, root_frob, root_inertia, geometric, frobenius, arithmetic })
}

/// Lift a factorization `P = g h mod e` with `g`, `h` monic and coprime mod
/// `e` to precision `target`.
pub fn hensel_lift(f: &Gf, p: &OPoly, g: &OPoly, h: &OPoly, target: usize) -> Result<(OPoly, OPoly)> {
    check_monic(p)?;
    check_monic(g)?;
    check_monic(h)?;
    if omat::poly_degree(g) + omat::poly_degree(h) != omat::poly_degree(p) {
        return Err(Error::InvalidInput("factor degrees do not add up".into()));
    }
    let red = |x: &OPoly| -> Vec<Fe> {
        let mut v: Vec<Fe> = x.iter().map(|c| c.coeff(0)).collect();
        Gf::poly_trim(&mut v);
        v
    };
    let (gb, hb) = (red(g), red(h));
    let (gcd, sb, tb) = ext_gcd(f, &gb, &hb)?;
    if gcd.len() != 1 {
        return Err(Error::NotCoprime);
    }
    let prod_bar = red(&omat::poly_mul(f, g, h));
    if prod_bar != red(p) {
        return Err(Error::InvalidInput("seed factors do not multiply to P mod e".into()));
    }
    let lift = |v: &[Fe]| -> OPoly { v.iter().map(|&c| TruncSeries::constant(c, EXACT)).collect() };
    let trunc = |x: &OPoly, k: usize| -> OPoly { x.iter().map(|c| c.with_prec(k)).collect() };
    let (mut g, mut h) = (g.clone(), h.clone());
    let (mut s, mut t) = (lift(&sb), lift(&tb));
    let mut k = 1usize;
    while k < target {
        k = (k * 2).min(target);
        let e = trunc(&omat::poly_sub(f, p, &omat::poly_mul(f, &g, &h)), k);
        let se = omat::poly_mul(f, &s, &e);
        let (qq, r) = omat::poly_divrem_monic(f, &se, &h);
        let g2 = trunc(
            &omat::poly_add(f, &g, &omat::poly_add(f, &omat::poly_mul(f, &t, &e), &omat::poly_mul(f, &qq, &g))),
            k,
        );
        let h2 = trunc(&omat::poly_add(f, &h, &r), k);
        let b = trunc(
            &omat::poly_sub(
                f,
                &omat::poly_add(f, &omat::poly_mul(f, &s, &g2), &omat::poly_mul(f, &t, &h2)),
                &vec![TruncSeries::one()],
            ),
            k,
        );
        let (c, d) = omat::poly_divrem_monic(f, &omat::poly_mul(f, &s, &b), &h2);
        s = trunc(&omat::poly_sub(f, &s, &d), k);
        t = trunc(
            &omat::poly_sub(f, &omat::poly_sub(f, &t, &omat::poly_mul(f, &t, &b)), &omat::poly_mul(f, &c, &g2)),
            k,
        );
        g = shrink(g2, omat::poly_degree(&g));
        h = shrink(h2, omat::poly_degree(&h));
    }
    Ok((trunc(&g, target), trunc(&h, target)))
}

fn shrink(mut x: OPoly, deg: usize) -> OPoly {
    x.resize(deg + 1, TruncSeries::zero(EXACT));
    x[deg] = TruncSeries::one();
    x
}

/// Extended gcd over a finite field: `(g, s, t)` with `s a + t b = g`, `g` monic.
pub fn ext_gcd(f: &Gf, a: &[Fe], b: &[Fe]) -> Result<(Vec<Fe>, Vec<Fe>, Vec<Fe>)> {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = f.poly_divrem(&r0, &r1)?;
        let s2 = f.poly_sub(&s0, &f.poly_mul(&q, &s1));
        let t2 = f.poly_sub(&t0, &f.poly_mul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_empty() {
        return Ok((r0, s0, t0));
    }
    let lc = f.inv(*r0.last().unwrap())?;
    let sc = |v: &[Fe]| -> Vec<Fe> {
        let mut w: Vec<Fe> = v.iter().map(|&x| f.mul(x, lc)).collect();
        Gf::poly_trim(&mut w);
        w
    };
    Ok((sc(&r0), sc(&s0), sc(&t0)))
}

/// Apply a working precision to every coefficient.
pub fn with_precision(p: &OPoly, prec: usize) -> OPoly {
    p.iter().map(|c| c.with_prec(prec)).collect()
}
