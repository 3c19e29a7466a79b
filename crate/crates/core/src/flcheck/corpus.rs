//! Seeded random corpora of cases.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::finfield::{is_prime, Gf};
use crate::rootdata::{build_root_datum, GroupKind};
use crate::series::{TruncSeries, EXACT};
use crate::spectral::{analyze, transfer_a, TorusType};

use super::case::{CaseFile, HSpec, KappaSpec, Mode};
use super::report::{run_case, CaseReport};

#[derive(Clone, Debug)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub n: Vec<usize>,
    pub q: Vec<u64>,
    pub kinds: Vec<GroupKind>,
    pub modes: Vec<Mode>,
    /// Largest discriminant valuation kept.
    pub max_d: usize,
    /// Largest valuation used when drawing coefficients.
    pub depth: usize,
    /// Largest `y` valuation for `SL_2` endoscopic cases.
    pub max_ls_depth: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 1,
            count: 50,
            n: vec![2],
            q: vec![3],
            kinds: vec![GroupKind::GL, GroupKind::SL, GroupKind::PGL],
            modes: vec![Mode::Invariants, Mode::Orbital, Mode::Ls, Mode::Nonstandard],
            max_d: 6,
            depth: 3,
            max_ls_depth: 2,
        }
    }
}

fn prime_power(q: u64) -> Option<(u32, u32)> {
    let p = (2..=q).find(|&p| q.is_multiple_of(p))?;
    if !is_prime(p) {
        return None;
    }
    let mut m = 0;
    let mut x = q;
    while x.is_multiple_of(p) {
        x /= p;
        m += 1;
    }
    (x == 1).then_some((p as u32, m))
}

/// `e^v * (unit)` with `len` random coefficients in the prime field.
fn rand_series(rng: &mut ChaCha8Rng, f: &Gf, v: usize, len: usize) -> String {
    let p = f.p() as u64;
    let mut coeffs = vec![0; v];
    coeffs.push(rng.gen_range(1..p));
    for _ in 1..len {
        coeffs.push(rng.gen_range(0..p));
    }
    TruncSeries::from_coeffs(coeffs, EXACT).display(f)
}

fn rand_coeff(rng: &mut ChaCha8Rng, f: &Gf, depth: usize) -> String {
    // zero with some probability, else a unit times a random power of e
    if rng.gen_ratio(1, 5) {
        return "0".into();
    }
    let v = rng.gen_range(0..=depth);
    let len = rng.gen_range(1..=2);
    rand_series(rng, f, v, len)
}

fn rand_char(rng: &mut ChaCha8Rng, f: &Gf, kind: GroupKind, n: usize, depth: usize) -> Vec<String> {
    (0..n)
        .map(|i| if i == 0 && kind != GroupKind::GL { "0".into() } else { rand_coeff(rng, f, depth) })
        .collect()
}

fn kappa_choices(kind: GroupKind, n: usize) -> Vec<Vec<&'static str>> {
    match (kind, n) {
        (GroupKind::SL, 2) | (GroupKind::PGL, 2) => vec![vec!["0"], vec!["1/2"]],
        (GroupKind::GL, 2) => vec![vec!["0", "0"], vec!["1/2", "0"], vec!["1/4", "3/4"]],
        (GroupKind::GL, 3) => vec![vec!["0", "0", "0"], vec!["1/2", "0", "0"], vec!["1/2", "1/2", "0"], vec!["1/3", "2/3", "0"]],
        (GroupKind::GL, _) => vec![vec!["0"; n]],
        _ => vec![vec!["0"; n - 1]],
    }
}

fn kappa_spec(v: &[&str]) -> KappaSpec {
    let vector: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    let order = crate::rootdata::parse_kappa(&vector).map(|k| k.order()).unwrap_or(1);
    KappaSpec { order, vector }
}

fn valid_modes(kind: GroupKind, n: usize, modes: &[Mode]) -> Vec<Mode> {
    modes
        .iter()
        .copied()
        .filter(|m| match m {
            Mode::Invariants => true,
            Mode::Orbital => kind == GroupKind::GL || n == 2,
            Mode::Ls => (kind == GroupKind::SL && n == 2) || (kind == GroupKind::GL && (n == 2 || n == 3)),
            Mode::Nonstandard => kind == GroupKind::SL && n == 2,
        })
        .collect()
}

/// Draw one candidate case (not yet validated).
fn draw(rng: &mut ChaCha8Rng, spec: &CorpusSpec) -> Option<CaseFile> {
    let q = *spec.q.choose(rng)?;
    let (p, m) = prime_power(q)?;
    let n = *spec.n.choose(rng)?;
    let kind = *spec.kinds.choose(rng)?;
    build_root_datum(kind, n, p).ok()?;
    let mode = *valid_modes(kind, n, &spec.modes).choose(rng)?;
    let f = Gf::new(p, m).ok()?;
    let mut case = CaseFile { id: String::new(), q, p, m, kind, n, mode, a: None, a_h: None, kappa: None, precision: None };
    match mode {
        Mode::Invariants | Mode::Nonstandard => case.a = Some(rand_char(rng, &f, kind, n, spec.depth)),
        Mode::Orbital => {
            case.a = Some(rand_char(rng, &f, kind, n, spec.depth));
            case.kappa = Some(kappa_spec(kappa_choices(kind, n).choose(rng)?));
        }
        Mode::Ls if kind == GroupKind::SL => {
            let torus = *[TorusType::Split, TorusType::Unramified].choose(rng)?;
            let v = rng.gen_range(0..=spec.max_ls_depth);
            let len = rng.gen_range(1..=2);
            let y = rand_series(rng, &f, v, len);
            case.a_h = Some(HSpec { torus: Some(torus), y: Some(y), blocks: None });
            case.kappa = Some(kappa_spec(&["1/2"]));
        }
        Mode::Ls => {
            let (kv, sizes): (Vec<&str>, Vec<usize>) =
                if n == 2 { (vec!["1/2", "0"], vec![1, 1]) } else { (vec!["1/2", "1/2", "0"], vec![2, 1]) };
            let blocks = sizes.iter().map(|&k| rand_char(rng, &f, GroupKind::GL, k, spec.depth)).collect();
            case.a_h = Some(HSpec { torus: None, y: None, blocks: Some(blocks) });
            case.kappa = Some(kappa_spec(&kv));
        }
    }
    Some(case)
}

/// Is this error a legitimate reason to reject a draw (outside the domain
/// of the checks) rather than a failure to report?
fn out_of_domain(e: &Error) -> bool {
    matches!(
        e,
        Error::NotRegular
            | Error::NotGRegular
            | Error::WildRamification { .. }
            | Error::BadCharacteristic { .. }
            | Error::PrecisionExhausted(_)
    )
}

/// Dedup key: `(q, kind, n, mode, kappa, H data, d, c, branch signature)`.
/// `None` rejects the draw; analysis failures other than out-of-domain ones
/// are kept so that the run reports them.
fn signature(case: &CaseFile, max_d: usize) -> Option<String> {
    let a = match case.mode {
        Mode::Ls => case
            .endoscopic()
            .and_then(|ed| transfer_a(&ed, &case.field()?, &case.h_char()?)),
        _ => case.local_char(),
    };
    let an = match a.and_then(|a| analyze(&a, case.precision)) {
        Ok(an) => an,
        Err(e) if out_of_domain(&e) => return None,
        Err(e) => return Some(format!("{}|{}|{}|{}|error|{e}|{:?}", case.q, case.kind, case.n, case.mode, case.a)),
    };
    if an.inv.d > max_d {
        return None;
    }
    let mut rad: Vec<String> = an.inv.radicial.iter().map(|(_, r)| r.to_string()).collect();
    rad.sort();
    let mut br: Vec<(usize, usize)> = an.branches.arithmetic.iter().map(|b| (b.e, b.f)).collect();
    br.sort();
    let h = match &case.a_h {
        Some(HSpec { torus: Some(t), .. }) => format!("{t:?}"),
        Some(HSpec { blocks: Some(b), .. }) => format!("blocks{}", b.len()),
        _ => String::new(),
    };
    let kappa = case.kappa.as_ref().map(|k| k.vector.join(",")).unwrap_or_default();
    Some(format!(
        "{}|{}|{}|{}|{}|{}|{}|{}|{:?}|{}",
        case.q, case.kind, case.n, case.mode, kappa, h, an.inv.d, an.inv.c, br, rad.join(",")
    ))
}

/// Draws without a new case before another copy of a structural signature
/// is allowed.
const STALE_DRAWS: usize = 100;

/// Deterministic case list for a corpus spec; stops early when the draw space is
/// exhausted. Each structural signature is used once until the space of
/// signatures runs dry, then the per-signature quota grows by one.
pub fn generate_cases(spec: &CorpusSpec) -> Result<Vec<CaseFile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut seen_exact = HashSet::new();
    let mut uses: HashMap<String, usize> = HashMap::new();
    let mut quota = 1;
    let mut stale = 0;
    let mut out = Vec::new();
    let max_attempts = spec.count * 400 + 1000;
    for _ in 0..max_attempts {
        if out.len() >= spec.count {
            break;
        }
        stale += 1;
        if stale > STALE_DRAWS {
            quota += 1;
            stale = 0;
        }
        let Some(mut case) = draw(&mut rng, spec) else { continue };
        let Some(sig) = signature(&case, spec.max_d) else { continue };
        let exact = format!("{sig}|{:?}|{:?}", case.a, case.a_h);
        let used = uses.entry(sig).or_default();
        if *used >= quota || !seen_exact.insert(exact) {
            continue;
        }
        *used += 1;
        stale = 0;
        case.id = format!("s{}-{:04}", spec.seed, out.len() + 1);
        out.push(case);
    }
    Ok(out)
}

/// Run cases in parallel; reports come back ordered by case id.
pub fn run_cases(cases: &[CaseFile]) -> Vec<CaseReport> {
    let mut reports: Vec<CaseReport> = cases.par_iter().map(run_case).collect();
    reports.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    reports
}

pub fn run_corpus(spec: &CorpusSpec) -> Result<Vec<CaseReport>> {
    Ok(run_cases(&generate_cases(spec)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_deduplicated() {
        let spec = CorpusSpec { count: 12, ..Default::default() };
        let a = generate_cases(&spec).unwrap();
        let b = generate_cases(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
        let sigs: HashSet<String> = a.iter().map(|c| signature(c, 6).unwrap()).collect();
        assert_eq!(sigs.len(), a.len());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
    }
}
