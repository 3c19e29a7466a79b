//! Running one case and recording the outcome.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbital::{kappa_orbital, ls_check, nonstandard_check, Convention, IdentityCheck, OrbitalRun};
use crate::spectral::{analyze, detect_simple_case, simple_torus_order, Analysis};
use crate::springer::groupoid_count;

use super::case::{to_sorted_json, CaseFile, Mode};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case_id: String,
    pub mode: String,
    pub q: u64,
    pub kind: String,
    pub n: usize,
    pub a: Vec<String>,
    pub kappa: String,
    pub kappa_order: u64,
    pub d: Option<usize>,
    pub c: Option<usize>,
    pub s: Option<usize>,
    pub delta: Option<usize>,
    pub pi0: Option<String>,
    pub radicial: Vec<String>,
    pub r_v: Option<usize>,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub normalization: Option<String>,
    pub conversion: Option<String>,
    pub groupoid_count: Option<String>,
    pub points: Option<usize>,
    pub simple_case: bool,
    pub torus_order: Option<u64>,
    pub precision: Option<usize>,
    pub truncation: Option<usize>,
    pub pass: bool,
    pub error: Option<String>,
    pub timing_ms: u64,
}

impl CaseReport {
    pub fn to_json(&self) -> Result<String> {
        to_sorted_json(self)
    }

    /// JSON without the timing field, stable across runs.
    pub fn canonical_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("timing_ms");
        }
        Ok(serde_json::to_string(&v)?)
    }
}

fn fill_invariants(r: &mut CaseReport, an: &Analysis) {
    let inv = &an.inv;
    r.d = Some(inv.d);
    r.c = Some(inv.c);
    r.s = Some(inv.s);
    r.delta = Some(inv.delta);
    r.pi0 = Some(inv.pi0.as_ref().map_or_else(|| "unsupported".to_string(), |g| g.to_string()));
    r.radicial = inv.radicial.iter().map(|((i, j), v)| format!("e{}-e{}:{}", i + 1, j + 1, v)).collect();
    r.precision = Some(an.precision);
}

fn fill_run(r: &mut CaseReport, run: &OrbitalRun) {
    fill_invariants(r, &run.analysis);
    r.truncation = Some(run.fiber.truncation);
    r.points = Some(run.fiber.points.len());
    r.groupoid_count = Some(run.count.value.to_string());
    r.normalization = Some(format!("{:?}", run.value.normalization.convention));
    r.conversion = Some(run.value.normalization.conversion.to_string());
}

fn fill_identity(r: &mut CaseReport, chk: &IdentityCheck) {
    fill_run(r, &chk.run);
    r.a = chk.a.display();
    r.r_v = Some(chk.r_v);
    r.lhs = Some(chk.lhs.value.to_string());
    r.rhs = Some(chk.rhs.value.to_string());
    r.pass = chk.pass;
}

fn run_inner(case: &CaseFile, r: &mut CaseReport) -> Result<()> {
    let precision = case.precision;
    match case.mode {
        Mode::Invariants => {
            let a = case.local_char()?;
            r.a = a.display();
            let an = analyze(&a, precision)?;
            fill_invariants(r, &an);
            // delta cross-check happens inside analyze
            r.lhs = Some(an.inv.delta.to_string());
            r.rhs = Some(((an.inv.d - an.inv.c) / 2).to_string());
            r.pass = r.lhs == r.rhs;
        }
        Mode::Orbital => {
            let a = case.local_char()?;
            r.a = a.display();
            let kappa = case.kappa(&a.rd)?;
            let run = kappa_orbital(&a, &kappa, Convention::NeronConnected, precision)?;
            fill_run(r, &run);
            // normalization coherence: ConnectedModel * conversion = NeronConnected
            let conn = crate::orbital::orbital_from_count(&run.analysis, &run.fiber, &kappa, &run.count, Convention::ConnectedModel)?;
            let conv = &run.value.normalization.conversion;
            let scaled = conn.value.scale(&BigRational::new(BigInt::from(*conv.numer()), BigInt::from(*conv.denom())));
            let mut pass = scaled == run.value.value;
            r.lhs = Some(run.value.value.to_string());
            r.rhs = Some(scaled.to_string());
            let ed = case.endoscopic()?;
            if detect_simple_case(&run.analysis, &ed) {
                r.simple_case = true;
                let a_ord = simple_torus_order(&run.analysis).ok_or_else(|| Error::Inconsistent("torus order".into()))?;
                r.torus_order = Some(a_ord);
                let law = run.count.value.scale(&BigRational::from_integer(a_ord.into()));
                let q = BigRational::from_integer(case.q.into());
                r.lhs = Some(law.to_string());
                r.rhs = Some(q.to_string());
                pass &= law.as_rational() == Some(q);
            }
            r.pass = pass;
        }
        Mode::Ls => {
            let ed = case.endoscopic()?;
            let f = case.field()?;
            let chk = ls_check(&ed, &f, &case.h_char()?, precision)?;
            fill_identity(r, &chk);
        }
        Mode::Nonstandard => {
            let a = case.local_char()?;
            let chk = nonstandard_check(&a, precision)?;
            fill_identity(r, &chk);
        }
    }
    Ok(())
}

/// Run one case; errors are recorded in the report rather than returned.
pub fn run_case(case: &CaseFile) -> CaseReport {
    let start = Instant::now();
    let mut r = CaseReport {
        case_id: case.id.clone(),
        mode: case.mode.to_string(),
        q: case.q,
        kind: case.kind.to_string(),
        n: case.n,
        a: case.a.clone().unwrap_or_default(),
        kappa: case.kappa.as_ref().map(|k| format!("[{}]", k.vector.join(","))).unwrap_or_else(|| "trivial".into()),
        kappa_order: case.kappa.as_ref().map_or(1, |k| k.order.max(1)),
        ..Default::default()
    };
    if let Err(e) = run_inner(case, &mut r) {
        r.pass = false;
        r.error = Some(e.to_string());
    }
    r.timing_ms = start.elapsed().as_millis() as u64;
    r
}

/// Groupoid count of a case at a refined `Lambda`, for independence checks.
pub fn refined_count(case: &CaseFile, index: u64) -> Result<String> {
    let a = case.local_char()?;
    let kappa = case.kappa(&a.rd)?;
    let (an, _) = crate::springer::stable_fiber(&a, case.precision, 1)?;
    let fib = crate::springer::enumerate_fiber(&an, index)?;
    Ok(groupoid_count(&fib, &kappa)?.value.to_string())
}

pub const CSV_HEADER: [&str; 12] = ["case_id", "q", "kind", "n", "d", "c", "delta", "r_v", "kappa_order", "lhs", "rhs", "pass"];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn csv_row(r: &CaseReport) -> Vec<String> {
    vec![
        r.case_id.clone(),
        r.q.to_string(),
        r.kind.clone(),
        r.n.to_string(),
        opt(&r.d),
        opt(&r.c),
        opt(&r.delta),
        opt(&r.r_v),
        r.kappa_order.to_string(),
        opt(&r.lhs),
        opt(&r.rhs),
        r.pass.to_string(),
    ]
}

pub fn write_csv<W: std::io::Write>(w: W, reports: &[CaseReport]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        wr.write_record(csv_row(r)).map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_jsonl<W: std::io::Write>(mut w: W, reports: &[CaseReport]) -> Result<()> {
    for r in reports {
        writeln!(w, "{}", r.to_json()?)?;
    }
    Ok(())
}
