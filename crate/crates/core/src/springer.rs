//! Affine Springer fibers as sets of `B`-lattices, their symmetry groups and
//! weighted groupoid counts.

use num_rational::BigRational;
use num_bigint::BigInt;
use serde::Serialize;
use std::collections::{BTreeMap, HashSet, VecDeque};

use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::finfield::Fe;
use crate::fqlin::{self, Subspace};
use crate::rootdata::{GroupKind, Kappa};
use crate::series::TruncSeries;
use crate::spectral::{analyze, combos, disc_valuation_of, precision_cap, unit_index, Analysis, LocalChar, OrderData, TorusType};

/// Candidate guard for the lattice search.
pub const CANDIDATE_GUARD: u64 = 10_000_000;

/// Truncation level `N = 2d + 4` at which the fiber of `a mod e^N` is used.
pub fn truncation_level(d: usize) -> usize {
    2 * d + 4
}

fn squarefree_residue(od: &OrderData) -> Vec<Fe> {
    let f = &od.field;
    let pbar: Vec<Fe> = od.poly.iter().map(|c| c.coeff(0)).collect();
    let dp: Vec<Fe> = pbar.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, f.from_int(i as i64))).collect();
    let g = f.poly_gcd(&pbar, &dp);
    f.poly_divrem(&pbar, &g).map(|(q, _)| q).unwrap_or(pbar)
}

/// The `B`-submodules `M` of `B'/e^K B'` containing the conductor with
/// `B' M = B'`, sorted by colength then canonical form.
pub fn enumerate_lattices(od: &OrderData) -> Result<Vec<Subspace>> {
    let f = &od.field;
    let alg = &od.alg;
    let ring = od.b_generators();
    let g = squarefree_residue(od);
    let t = od.t_elem();
    let mut g_elem = vec![0; alg.dim];
    let mut tp = alg.one.clone();
    for &c in &g {
        for (x, &y) in g_elem.iter_mut().zip(&tp) {
            *x = f.add(*x, f.mul(c, y));
        }
        tp = alg.mul(&tp, &t);
    }
    let rad = [od.eps_elem(), g_elem];
    let start = od.conductor.clone();
    let mut seen: HashSet<Subspace> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    let mut candidates = 0u64;
    while let Some(m) = queue.pop_front() {
        // socle of A/M: v with rad v in M
        let images: Vec<Vec<Fe>> = (0..alg.dim)
            .map(|i| {
                let e = alg.unit(i);
                rad.iter().flat_map(|r| fqlin::reduce(f, &m.basis, &alg.mul(r, &e))).collect()
            })
            .collect();
        let soc = Subspace::span(f, alg.dim, &fqlin::relations(f, &images));
        let soc = soc.add(f, &m.basis);
        let reps = soc.complement_basis(f, &m);
        for c in combos(f, reps.len()) {
            // one representative per line
            match c.iter().rev().find(|&&x| x != 0) {
                Some(&1) => {}
                _ => continue,
            }
            candidates += 1;
            if candidates > CANDIDATE_GUARD {
                return Err(Error::CombinatorialBlowup(candidates));
            }
            let mut v = vec![0; alg.dim];
            for (ci, r) in c.iter().zip(&reps) {
                for (x, &y) in v.iter_mut().zip(r) {
                    *x = f.add(*x, f.mul(*ci, y));
                }
            }
            let next = alg.module_closure(&m, &[v], &ring);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Subspace> = seen.into_iter().filter(|m| od.bflat_span(m).rank() == alg.dim).collect();
    out.sort_by(|a, b| b.rank().cmp(&a.rank()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Canonical form of a lattice `M`: the subspace `e^d M / e^{2d} O^n` in
/// monomial coordinates.
pub fn lattice_key(od: &OrderData, m: &Subspace) -> Subspace {
    let f = &od.field;
    let n = od.n;
    let dd = 2 * od.d;
    let k = od.k;
    let dim = n * dd;
    if dd == 0 {
        return Subspace::zero(0);
    }
    let embed_shift = |l: usize, j: usize| -> Vec<Fe> {
        let mut v = vec![0; dim];
        for (c, s) in od.embed[l].iter().enumerate() {
            let s: &TruncSeries = s;
            for (i, &x) in s.coeffs.iter().enumerate() {
                if i + j < dd {
                    v[c * dd + i + j] = x;
                }
            }
        }
        v
    };
    let mut gens = Vec::new();
    for x in &m.basis {
        let mut v = vec![0; dim];
        for l in 0..n {
            for j in 0..k {
                let c = x[l * k + j];
                if c != 0 {
                    for (a, b) in v.iter_mut().zip(embed_shift(l, j)) {
                        *a = f.add(*a, f.mul(c, b));
                    }
                }
            }
        }
        gens.push(v);
    }
    for l in 0..n {
        for j in k..dd {
            gens.push(embed_shift(l, j));
        }
    }
    Subspace::span(f, dim, &gens)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberPoint {
    /// Index into `Fiber::lattices`.
    pub lattice: usize,
    /// `length(B'/M)`.
    pub colength: usize,
    /// Shift by branch uniformizers, reduced modulo the chosen `Lambda`.
    pub component: Vec<i64>,
    /// Class in `H^1(k, pi_0)`, as a multiple of `Fiber::class_generator`.
    pub class: i64,
    pub stabilizer_order: u128,
    pub frobenius_image: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fiber {
    pub kind: GroupKind,
    pub q: u64,
    pub truncation: usize,
    #[serde(skip)]
    pub lattices: Vec<Subspace>,
    #[serde(skip)]
    pub keys: Vec<Subspace>,
    pub points: Vec<FiberPoint>,
    /// Order of the finite symmetry group the points are counted against.
    pub group_order: u128,
    /// Order of the class group and its generator in `X_*`.
    pub class_order: u32,
    pub class_generator: Vec<i64>,
    pub lambda_rank: usize,
    pub lambda_index: u64,
    /// `c_K`: classes carrying the same point set are divided by it.
    pub c_k: u64,
}

impl Fiber {
    pub fn lattice_count(&self) -> usize {
        self.lattices.len()
    }

    /// Index of the Kostant base point `M = B`.
    pub fn base_point(&self) -> Option<usize> {
        self.points.iter().position(|p| p.stabilizer_order == 1 && p.component.iter().all(|&c| c == 0) && p.class == 0)
    }
}

fn component_vectors(rank: usize, n: u64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n as i64).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// Enumerate the fiber of `an.a`, one point per `Lambda'`-orbit, where
/// `Lambda'` has index `lambda_index^rank` in the branch-uniformizer lattice.
pub fn enumerate_fiber(an: &Analysis, lambda_index: u64) -> Result<Fiber> {
    let od = &an.order;
    let rd = &an.a.rd;
    let kind = rd.kind;
    if kind != GroupKind::GL && rd.n != 2 {
        return Err(Error::Unsupported(format!("fibers for {kind}_{}", rd.n)));
    }
    if lambda_index == 0 {
        return Err(Error::InvalidInput("Lambda index must be positive".into()));
    }
    let lattices = enumerate_lattices(od)?;
    let keys: Vec<Subspace> = lattices.iter().map(|m| lattice_key(od, m)).collect();
    let torus = an.torus_type();
    let ui = unit_index(an)?;
    let c_k = an.c_k();
    let lambda_rank = match kind {
        GroupKind::GL => an.inv.s,
        _ if torus == TorusType::Split => 1,
        _ => 0,
    };
    let refine = (lambda_index as u128).pow(lambda_rank as u32);
    // (class order, classes attached to each lattice, extra copies)
    let (class_order, dup_classes, copies) = match (kind, torus) {
        (GroupKind::GL, _) | (_, TorusType::Split) => (1, false, 1),
        (GroupKind::SL, TorusType::Ramified) => (2, true, 1),
        (GroupKind::PGL, TorusType::Ramified) => (1, false, 2),
        (_, TorusType::Unramified) => (2, false, 1),
    };
    let pi0j = an.pi0_special_fiber() as u128;
    let base_group = (ui * num_rational::Ratio::from_integer(c_k as i128)).to_integer() as u128;
    let group_order = base_group * refine * copies as u128;
    let mut points = Vec::new();
    for (idx, m) in lattices.iter().enumerate() {
        let colength = od.alg.dim - m.rank();
        let r = od.multiplier_ring(m);
        let stab = match kind {
            GroupKind::SL => (od.norm_one_index(&r) * num_rational::Ratio::from_integer(pi0j as i128)).to_integer() as u128,
            _ => od.units_of(&r) / od.units_of(&od.b_sub),
        };
        let deg = colength as i64 - od.delta as i64;
        let classes: Vec<i64> = if dup_classes {
            vec![0, 1]
        } else if class_order == 2 {
            vec![deg.rem_euclid(2)]
        } else {
            vec![0]
        };
        for class in classes {
            for copy in 0..copies {
                for comp in component_vectors(lambda_rank, lambda_index) {
                    let mut component = comp;
                    if copies > 1 {
                        component.push(copy);
                    }
                    points.push(FiberPoint {
                        lattice: idx,
                        colength,
                        component,
                        class,
                        stabilizer_order: stab,
                        frobenius_image: points.len(),
                    });
                }
            }
        }
    }
    Ok(Fiber {
        kind,
        q: an.a.field.size(),
        truncation: truncation_level(an.inv.d),
        lattices,
        keys,
        points,
        group_order,
        class_order,
        class_generator: vec![1; rd.rank.min(1)],
        lambda_rank,
        lambda_index,
        c_k,
    })
}

/// Enumerate at `N = truncation_level(d)` and check that `a mod e^{N+2}`
/// has the same canonical lattice set; raise `N` until stable.
pub fn stable_fiber(a: &LocalChar, precision: Option<usize>, lambda_index: u64) -> Result<(Analysis, Fiber)> {
    let d = disc_valuation_of(a, precision)?;
    let cap = precision_cap();
    let mut level = truncation_level(d);
    loop {
        let an = analyze(&a.truncated(level), precision)?;
        let fib = enumerate_fiber(&an, lambda_index)?;
        let an2 = analyze(&a.truncated(level + 2), precision)?;
        let fib2 = enumerate_fiber(&an2, lambda_index)?;
        if sorted_keys(&fib) == sorted_keys(&fib2) {
            let mut fib = fib;
            fib.truncation = level;
            return Ok((an, fib));
        }
        level += 2;
        if level > cap {
            return Err(Error::PrecisionExhausted(format!("fiber unstable up to level {cap}")));
        }
    }
}

pub fn sorted_keys(fib: &Fiber) -> Vec<Subspace> {
    let mut k = fib.keys.clone();
    k.sort();
    k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassBreakdown {
    pub class: i64,
    pub points: usize,
    /// `(automorphism order, number of isomorphism classes)`.
    pub iso_classes: Vec<(u128, u128)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupoidCount {
    pub value: Cyclo,
    pub breakdown: Vec<ClassBreakdown>,
}

/// `kappa(class)` as an element of `Q/Z`; fails when `kappa` does not
/// factor through the class group.
pub fn kappa_on_class(fib: &Fiber, kappa: &Kappa, class: i64) -> Result<num_rational::Ratio<i64>> {
    if fib.class_order == 1 {
        return Ok(num_rational::Ratio::from_integer(0));
    }
    let gen: Vec<i64> = fib.class_generator.clone();
    let ord: Vec<i64> = gen.iter().map(|x| x * fib.class_order as i64).collect();
    if !kappa.pair(&ord).is_integer() {
        return Err(Error::UnsupportedKappa(format!("{} does not factor through the class group", kappa.display())));
    }
    let v: Vec<i64> = gen.iter().map(|x| x * class).collect();
    Ok(kappa.pair(&v))
}

/// `sum_x <cl(x), kappa> / #Aut(x)` over isomorphism classes.
pub fn groupoid_count(fib: &Fiber, kappa: &Kappa) -> Result<GroupoidCount> {
    let m = kappa.order().max(1) as u32;
    let mut value = Cyclo::zero(m)?;
    let mut by_class: BTreeMap<i64, Vec<&FiberPoint>> = BTreeMap::new();
    for p in &fib.points {
        by_class.entry(p.class).or_default().push(p);
    }
    let g = BigInt::from(fib.group_order);
    let mut breakdown = Vec::new();
    for (class, pts) in by_class {
        let r = kappa_on_class(fib, kappa, class)?;
        let w = Cyclo::exp(m, *r.numer(), *r.denom())?;
        let total = BigRational::new(BigInt::from(pts.len()), g.clone());
        value = value.add(&w.scale(&total));
        let mut by_stab: BTreeMap<u128, u128> = BTreeMap::new();
        for p in &pts {
            *by_stab.entry(p.stabilizer_order).or_default() += 1;
        }
        let mut iso = Vec::new();
        for (stab, cnt) in by_stab {
            let num = cnt * stab;
            if num % fib.group_order != 0 {
                return Err(Error::Inconsistent(format!(
                    "{cnt} points with stabilizer {stab} do not form whole orbits of a group of order {}",
                    fib.group_order
                )));
            }
            iso.push((stab, num / fib.group_order));
        }
        breakdown.push(ClassBreakdown { class, points: pts.len(), iso_classes: iso });
    }
    Ok(GroupoidCount { value, breakdown })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finfield::Gf;
    use crate::rootdata::build_root_datum;
    use crate::series::{parse_series, EXACT};
    use num_rational::Ratio;

    fn lc(kind: GroupKind, p: u32, a: &[&str]) -> LocalChar {
        let rd = build_root_datum(kind, a.len(), p).unwrap();
        let f = Gf::new(p, 1).unwrap();
        let a = a.iter().map(|s| parse_series(s, &f, EXACT).unwrap()).collect();
        LocalChar::new(&rd, &f, a).unwrap()
    }

    fn rat(x: &Cyclo) -> BigRational {
        x.as_rational().unwrap()
    }

    fn br(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn levels() {
        assert_eq!(truncation_level(2), 8);
        assert_eq!(truncation_level(0), 4);
        assert_eq!(truncation_level(6), 16);
    }

    #[test]
    fn tree_ball_gl2() {
        let (_, fib) = stable_fiber(&lc(GroupKind::GL, 3, &["0", "-2*e^2"]), None, 1).unwrap();
        assert_eq!(fib.points.len(), 5);
        assert!(fib.base_point().is_some());
        let (_, fib) = stable_fiber(&lc(GroupKind::GL, 3, &["0", "-2*e^4"]), None, 1).unwrap();
        assert_eq!(fib.points.len(), 1 + 4 * 8 / 2);
    }

    #[test]
    fn regular_single_point() {
        let (_, fib) = stable_fiber(&lc(GroupKind::GL, 5, &["1", "3"]), None, 1).unwrap();
        assert_eq!(fib.points.len(), 1);
        assert_eq!(fib.points[0].stabilizer_order, 1);
        let c = groupoid_count(&fib, &Kappa::trivial(2)).unwrap();
        assert_eq!(rat(&c.value), br(1, 1));
    }

    #[test]
    fn chain_examples() {
        let q = 3;
        // split: q/(q-1)
        let (_, fib) = stable_fiber(&lc(GroupKind::SL, 3, &["0", "-1*e^2"]), None, 1).unwrap();
        let c = groupoid_count(&fib, &Kappa::trivial(1)).unwrap();
        assert_eq!(rat(&c.value), br(q, q - 1));
        let (_, fib) = stable_fiber(&lc(GroupKind::GL, 3, &["0", "-1*e^2"]), None, 1).unwrap();
        let c = groupoid_count(&fib, &Kappa::trivial(2)).unwrap();
        assert_eq!(rat(&c.value), br(q, q - 1));
        // nonsplit, kappa = -1: q/(q+1)
        let (_, fib) = stable_fiber(&lc(GroupKind::SL, 3, &["0", "-2*e^2"]), None, 1).unwrap();
        let c = groupoid_count(&fib, &Kappa::new(vec![Ratio::new(1, 2)])).unwrap();
        assert_eq!(rat(&c.value), br(q, q + 1));
        // parity split: 1 vertex class + 4
        let pts: Vec<usize> = c.breakdown.iter().map(|b| b.points).collect();
        assert_eq!(pts, vec![4, 1]);
    }

    #[test]
    fn lambda_refinement_invariant() {
        for a in [&["0", "-1*e^2"][..], &["0", "-2*e^2"][..]] {
            let (an, fib1) = stable_fiber(&lc(GroupKind::GL, 3, a), None, 1).unwrap();
            let fib2 = enumerate_fiber(&an, 2).unwrap();
            assert_eq!(fib2.points.len(), fib1.points.len() * 2usize.pow(an.inv.s as u32));
            let k = Kappa::trivial(2);
            assert_eq!(groupoid_count(&fib1, &k).unwrap().value, groupoid_count(&fib2, &k).unwrap().value);
        }
    }

    #[test]
    fn kappa_must_factor() {
        let (_, fib) = stable_fiber(&lc(GroupKind::SL, 3, &["0", "-2*e^2"]), None, 1).unwrap();
        assert!(matches!(
            groupoid_count(&fib, &Kappa::new(vec![Ratio::new(1, 4)])),
            Err(Error::UnsupportedKappa(_))
        ));
    }
}
