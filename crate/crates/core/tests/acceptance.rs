//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use common::{br, gf, lc, rat};
use flcheck_core::flcheck::report::refined_count;
use flcheck_core::flcheck::{generate_cases, global_formulas, run_cases, CaseFile, CaseReport, CorpusSpec, Mode};
use flcheck_core::orbital::ls_check;
use flcheck_core::rootdata::{build_root_datum, endoscopic_datum, GroupKind, Kappa};
use flcheck_core::series::{parse_series, EXACT};
use flcheck_core::spectral::{analyze, HChar, TorusType};
use flcheck_core::springer::{enumerate_fiber, groupoid_count, sorted_keys, stable_fiber, truncation_level};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn failures(reports: &[CaseReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} ({})", r.case_id, r.error.as_deref().unwrap_or("identity fails")))
        .collect()
}

fn short(v: &[String]) -> String {
    v.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
}

fn orbital_corpus(count: usize, max_d: usize) -> Vec<CaseFile> {
    generate_cases(&CorpusSpec {
        count,
        max_d,
        n: vec![2, 3],
        q: vec![3, 5, 7],
        kinds: vec![GroupKind::GL, GroupKind::SL],
        modes: vec![Mode::Orbital],
        ..Default::default()
    })
    .unwrap()
}

fn ls_suite() -> Outcome {
    let mut slow = Duration::ZERO;
    let mut bad = Vec::new();
    let mut n = 0;
    for p in [3u32, 5, 7] {
        let rd = build_root_datum(GroupKind::SL, 2, p).unwrap();
        let ed = endoscopic_datum(&rd, &Kappa::new(vec![Ratio::new(1, 2)])).unwrap();
        let f = gf(p);
        for m in 0..3 {
            let y = parse_series(&format!("e^{m}"), &f, EXACT).unwrap();
            let t = Instant::now();
            let chk = ls_check(&ed, &f, &HChar::Torus { y, torus: TorusType::Unramified }, Some(16));
            slow = slow.max(t.elapsed());
            n += 1;
            let expect = (p as u64).pow(m as u32).to_string();
            match chk {
                Ok(c) if c.pass && c.r_v == m && c.lhs.value.to_string() == expect => {}
                Ok(c) => bad.push(format!("q={p} m={m}: {} vs {}", c.lhs.value, c.rhs.value)),
                Err(e) => bad.push(format!("q={p} m={m}: {e}")),
            }
        }
    }
    let pass = bad.is_empty() && slow < Duration::from_secs(60);
    outcome(pass, format!("{n} cases, slowest {:.2}s {}", slow.as_secs_f64(), short(&bad)))
}

fn simple_cases(reports: &[CaseReport]) -> Outcome {
    let simple: Vec<&CaseReport> = reports.iter().filter(|r| r.simple_case).collect();
    let bad: Vec<String> = simple.iter().filter(|r| !r.pass || r.rhs.as_deref() != Some(&r.q.to_string())).map(|r| r.case_id.clone()).collect();
    let other = failures(reports);
    outcome(
        simple.len() >= 20 && bad.is_empty() && other.is_empty(),
        format!("{} simple cases of {}, {} violations, {} other failures {}", simple.len(), reports.len(), bad.len(), other.len(), short(&other)),
    )
}

fn delta_consistency() -> Outcome {
    let cases = generate_cases(&CorpusSpec {
        count: 200,
        n: vec![2, 3],
        q: vec![3, 5, 7],
        modes: vec![Mode::Invariants],
        max_d: 6,
        ..Default::default()
    })
    .unwrap();
    let reports = run_cases(&cases);
    let bad = failures(&reports);
    let max_d = reports.iter().filter_map(|r| r.d).max().unwrap_or(0);
    outcome(
        reports.len() == 200 && bad.is_empty() && max_d <= 6,
        format!("{} cases, max d {max_d}, {} failures {}", reports.len(), bad.len(), short(&bad)),
    )
}

fn tree_ball() -> Outcome {
    let mut bad = Vec::new();
    let mut slow = Duration::ZERO;
    for q in [3u32, 5] {
        // 2 is a nonsquare mod 3 and mod 5
        for delta in 1..=3u32 {
            let a = lc(GroupKind::GL, q, &["0", &format!("-2*e^{}", 2 * delta)]);
            let t = Instant::now();
            let got = stable_fiber(&a, None, 1).map(|(_, f)| f.points.len() as u64);
            slow = slow.max(t.elapsed());
            let q = q as u64;
            let expect = 1 + (q + 1) * (q.pow(delta) - 1) / (q - 1);
            if got.as_ref().ok() != Some(&expect) {
                bad.push(format!("q={q} delta={delta}: {got:?} vs {expect}"));
            }
        }
    }
    let pass = bad.is_empty() && slow < Duration::from_secs(120);
    outcome(pass, format!("6 cases, slowest {:.2}s {}", slow.as_secs_f64(), short(&bad)))
}

fn chain_values() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for q in [3i64, 5] {
        let p = q as u32;
        let cases = [
            (GroupKind::SL, "-1*e^2", Kappa::trivial(1), br(q, q - 1)),
            (GroupKind::GL, "-1*e^2", Kappa::trivial(2), br(q, q - 1)),
            (GroupKind::SL, "-2*e^2", Kappa::new(vec![Ratio::new(1, 2)]), br(q, q + 1)),
        ];
        for (kind, a2, kappa, expect) in cases {
            n += 1;
            let got = stable_fiber(&lc(kind, p, &["0", a2]), None, 1)
                .and_then(|(_, fib)| groupoid_count(&fib, &kappa))
                .map(|c| rat(&c.value));
            if got.as_ref().ok() != Some(&expect) {
                bad.push(format!("{kind} q={q} {a2}: {got:?} vs {expect}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{n} cases {}", short(&bad)))
}

fn nonstandard() -> Outcome {
    let cases = generate_cases(&CorpusSpec {
        count: 12,
        n: vec![2],
        q: vec![3, 5],
        kinds: vec![GroupKind::SL],
        modes: vec![Mode::Nonstandard],
        max_d: 4,
        ..Default::default()
    })
    .unwrap();
    let reports = run_cases(&cases);
    let bad = failures(&reports);
    let qs: std::collections::BTreeSet<u64> = reports.iter().map(|r| r.q).collect();
    outcome(
        reports.len() >= 6 && bad.is_empty() && qs.len() == 2,
        format!("{} cases over q in {qs:?}, {} failures {}", reports.len(), bad.len(), short(&bad)),
    )
}

fn lambda_independence(cases: &[CaseFile]) -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for c in cases.iter().filter(|c| c.kind == GroupKind::GL || c.n == 2).take(20) {
        n += 1;
        let base = refined_count(c, 1);
        for idx in [2, 3] {
            let r = refined_count(c, idx);
            if base.is_err() || r.as_ref().ok() != base.as_ref().ok() {
                bad.push(format!("{} index {idx}: {r:?} vs {base:?}", c.id));
            }
        }
    }
    outcome(n == 20 && bad.is_empty(), format!("{n} cases {}", short(&bad)))
}

fn precision_stability(cases: &[CaseFile]) -> Outcome {
    let mut bad = Vec::new();
    for c in cases {
        let res = c.local_char().and_then(|a| {
            let an = analyze(&a, c.precision)?;
            let n = truncation_level(an.inv.d);
            let f1 = enumerate_fiber(&analyze(&a.truncated(n), c.precision)?, 1)?;
            let f2 = enumerate_fiber(&analyze(&a.truncated(n + 2), c.precision)?, 1)?;
            Ok(sorted_keys(&f1) == sorted_keys(&f2) && f1.points.len() == f2.points.len())
        });
        match res {
            Ok(true) => {}
            Ok(false) => bad.push(c.id.clone()),
            Err(e) => bad.push(format!("{}: {e}", c.id)),
        }
    }
    outcome(bad.is_empty(), format!("{} cases, {} unstable {}", cases.len(), bad.len(), short(&bad)))
}

fn formulas() -> Outcome {
    let fixed = [
        (GroupKind::SL, 2, 0, 2, 5, 1),
        (GroupKind::GL, 1, 1, 1, 1, 0),
        (GroupKind::GL, 2, 1, 2, 6, 2),
        (GroupKind::SL, 3, 2, 3, 13, 11),
        (GroupKind::PGL, 2, 0, 3, 7, 2),
    ];
    let mut bad = Vec::new();
    for (kind, n, g, deg, a, pa) in fixed {
        let rd = build_root_datum(kind, n, 7).unwrap();
        match global_formulas(&rd, g, deg) {
            Ok(f) if (f.dim_a, f.dim_pa) == (a, pa) => {}
            other => bad.push(format!("{kind}{n} g={g} D={deg}: {other:?}")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let kind = [GroupKind::GL, GroupKind::SL, GroupKind::PGL][rng.gen_range(0..3)];
        let n = rng.gen_range(if kind == GroupKind::GL { 1 } else { 2 }..=5);
        let g = rng.gen_range(0..6i64);
        let deg = rng.gen_range((2 * g - 1).max(0)..2 * g + 12);
        let rd = build_root_datum(kind, n, 7).unwrap();
        let lhs = global_formulas(&rd, g, deg).map(|f| f.dim_a + f.dim_pa);
        let rhs = (rd.rank + rd.roots.len()) as i64 * deg;
        if lhs.as_ref().ok() != Some(&rhs) {
            bad.push(format!("{kind}{n} g={g} D={deg}: {lhs:?} vs {rhs}"));
        }
    }
    outcome(bad.is_empty(), format!("5 fixed + 20 random tuples {}", short(&bad)))
}

fn main() {
    let orbital = orbital_corpus(150, 6);
    let low_depth = run_cases(&orbital_corpus(250, 2));
    let results = [
        ("LS identity", ls_suite()),
        ("simple-case closed form", simple_cases(&low_depth)),
        ("delta consistency", delta_consistency()),
        ("tree-ball law", tree_ball()),
        ("chain-example values", chain_values()),
        ("non-standard identity", nonstandard()),
        ("Lambda independence", lambda_independence(&orbital)),
        ("precision stability", precision_stability(&orbital)),
        ("formula evaluators", formulas()),
    ];
    let mut all = true;
    for (i, (name, o)) in results.iter().enumerate() {
        all &= o.pass;
        println!("criterion {} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail.trim_end());
    }
    if !all {
        std::process::exit(1);
    }
}
