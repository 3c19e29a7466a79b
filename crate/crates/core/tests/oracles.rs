//! Frozen reference values for the public operations.

mod common;

use common::{br, gf, lc, rat};
use flcheck_core::flcheck::{global_formulas, run_case, CaseFile};
use flcheck_core::localfield::{disc_valuation, factor_tame, newton_polygon, Q64};
use flcheck_core::orbital::{kappa_orbital, ls_check, nonstandard_check, stable_orbital_h, Convention};
use flcheck_core::rootdata::{
    build_root_datum, coinvariants, endoscopic_datum, nonstandard_pair_check, resultant_degree_global, FinAbGroup,
    GroupKind, HKind, Kappa,
};
use flcheck_core::series::{parse_series, TruncSeries, EXACT};
use flcheck_core::spectral::{
    analyze, companion_point, detect_simple_case, resultant_valuation, transfer_a, unit_index, HChar, TorusType,
};
use flcheck_core::springer::{groupoid_count, stable_fiber, truncation_level};
use flcheck_core::Error;
use num_rational::Ratio;

fn half() -> Kappa {
    Kappa::new(vec![Ratio::new(1, 2)])
}

fn quad(p: u32, c0: &str) -> Vec<TruncSeries> {
    let f = gf(p);
    [c0, "0", "1"].iter().map(|s| parse_series(s, &f, EXACT).unwrap().with_prec(8)).collect()
}

#[test]
fn root_data() {
    let sl2 = build_root_datum(GroupKind::SL, 2, 3).unwrap();
    assert_eq!((sl2.rank, sl2.roots.len(), sl2.exponents.clone(), sl2.weyl_order), (1, 2, vec![2], 2));
    let gl3 = build_root_datum(GroupKind::GL, 3, 5).unwrap();
    assert_eq!((gl3.rank, gl3.roots.len(), gl3.exponents.clone()), (3, 6, vec![1, 2, 3]));
    assert_eq!(build_root_datum(GroupKind::SL, 2, 2), Err(Error::BadCharacteristic { p: 2, weyl_order: 2 }));
}

#[test]
fn endoscopic_data() {
    let sl2 = build_root_datum(GroupKind::SL, 2, 3).unwrap();
    let ed = endoscopic_datum(&sl2, &half()).unwrap();
    assert_eq!(ed.h_kind, HKind::Torus);
    assert_eq!(resultant_degree_global(&ed, 4), 4);
    let ed = endoscopic_datum(&sl2, &Kappa::trivial(1)).unwrap();
    assert_eq!(ed.h_kind, HKind::Group);
    assert_eq!(resultant_degree_global(&ed, 7), 0);
    let sl3 = build_root_datum(GroupKind::SL, 3, 5).unwrap();
    let ed = endoscopic_datum(&sl3, &Kappa::new(vec![Ratio::new(1, 3), Ratio::new(1, 3)])).unwrap();
    assert!(ed.sub_roots.is_empty());
    assert_eq!(resultant_degree_global(&ed, 2), 6);
}

#[test]
fn abelian_groups_and_pairs() {
    assert_eq!(coinvariants(1, &[vec![vec![1]]]), FinAbGroup::free(1));
    assert_eq!(coinvariants(1, &[vec![vec![-1]]]), FinAbGroup { free_rank: 0, torsion: vec![2] });
    assert_eq!(coinvariants(2, &[vec![vec![0, 1], vec![1, 0]]]), FinAbGroup::free(1));
    let sl2 = build_root_datum(GroupKind::SL, 2, 3).unwrap();
    let pgl2 = build_root_datum(GroupKind::PGL, 2, 3).unwrap();
    assert!(nonstandard_pair_check(&sl2, &pgl2, 3));
    assert!(!nonstandard_pair_check(&sl2, &pgl2, 2));
}

#[test]
fn local_field_examples() {
    let f = gf(3);
    assert_eq!(disc_valuation(&f, &quad(3, "-1*e")).unwrap(), 1);
    assert_eq!(disc_valuation(&f, &quad(3, "-2*e^2")).unwrap(), 2);
    assert_eq!(disc_valuation(&f, &quad(3, "-1")).unwrap(), 0);
    assert_eq!(newton_polygon(&quad(3, "-1*e")).unwrap(), vec![(Q64::new(1, 2), 2)]);
    assert_eq!(newton_polygon(&quad(3, "-2*e^2")).unwrap(), vec![(Q64::from_integer(1), 2)]);
    let bd = factor_tame(&f, &quad(3, "-2*e^2")).unwrap();
    assert_eq!((bd.arithmetic.len(), bd.arithmetic[0].e, bd.arithmetic[0].f, bd.s()), (1, 1, 2, 2));
    let bd = factor_tame(&f, &quad(3, "-1*e")).unwrap();
    assert_eq!((bd.arithmetic[0].e, bd.arithmetic[0].f, bd.s()), (2, 1, 1));
}

#[test]
fn spectral_examples() {
    let m = companion_point(&lc(GroupKind::GL, 3, &["0", "-1*e"]));
    assert_eq!(m[0][1].coeffs, vec![0, 1]);
    assert_eq!(m[1][0].coeffs, vec![1]);

    let an = analyze(&lc(GroupKind::GL, 3, &["0", "-2*e^2"]), None).unwrap();
    assert_eq!((an.inv.d, an.inv.s, an.inv.c, an.inv.delta, an.inv.pi0_rank), (2, 2, 0, 1, 2));
    assert!(an.inv.radicial.iter().all(|(_, r)| *r == Q64::from_integer(1)));
    assert_eq!(unit_index(&an).unwrap(), Ratio::from_integer(4));

    let an = analyze(&lc(GroupKind::GL, 3, &["0", "-1*e"]), None).unwrap();
    assert_eq!((an.inv.d, an.inv.s, an.inv.c, an.inv.delta), (1, 1, 1, 0));
    assert!(an.inv.radicial.iter().all(|(_, r)| *r == Q64::new(1, 2)));

    let an = analyze(&lc(GroupKind::GL, 3, &["0", "1"]), None).unwrap();
    assert_eq!((an.inv.d, an.inv.c, an.inv.delta), (0, 0, 0));
    assert_eq!(unit_index(&an).unwrap(), Ratio::from_integer(1));

    // finite-ring enumeration: (q + 1) q
    let an = analyze(&lc(GroupKind::GL, 3, &["0", "-2*e^4"]), None).unwrap();
    assert_eq!(unit_index(&an).unwrap(), Ratio::from_integer(12));
}

#[test]
fn transfer_examples() {
    let f = gf(3);
    let sl2 = build_root_datum(GroupKind::SL, 2, 3).unwrap();
    let ed = endoscopic_datum(&sl2, &half()).unwrap();
    for m in 0..3 {
        let ah = HChar::Torus { y: TruncSeries::monomial(1, m), torus: TorusType::Unramified };
        let a = transfer_a(&ed, &f, &ah).unwrap();
        assert_eq!(analyze(&a, None).unwrap().inv.d, 2 * m);
        assert_eq!(resultant_valuation(&ed, &f, &ah).unwrap(), m);
    }
    let triv = endoscopic_datum(&sl2, &Kappa::trivial(1)).unwrap();
    let a = lc(GroupKind::SL, 3, &["0", "-2*e^2"]);
    assert_eq!(resultant_valuation(&triv, &f, &HChar::Same(a.clone())).unwrap(), 0);
    let an = analyze(&a, None).unwrap();
    assert!(detect_simple_case(&an, &ed));
    assert!(!detect_simple_case(&an, &triv));
    let an = analyze(&lc(GroupKind::SL, 3, &["0", "-2*e^4"]), None).unwrap();
    assert!(!detect_simple_case(&an, &ed));
}

#[test]
fn fiber_examples() {
    assert_eq!((truncation_level(2), truncation_level(0), truncation_level(6)), (8, 4, 16));
    let (_, fib) = stable_fiber(&lc(GroupKind::GL, 3, &["0", "-2*e^2"]), None, 1).unwrap();
    assert_eq!(fib.points.len(), 5);
    let (_, fib) = stable_fiber(&lc(GroupKind::SL, 3, &["0", "-2*e^2"]), None, 1).unwrap();
    let c = groupoid_count(&fib, &half()).unwrap();
    let pts: Vec<usize> = c.breakdown.iter().map(|b| b.points).collect();
    assert_eq!(pts, vec![4, 1]);
    assert_eq!(rat(&c.value), br(3, 4));
}

#[test]
fn orbital_examples() {
    let a = lc(GroupKind::GL, 3, &["0", "-2*e^2"]);
    let v = kappa_orbital(&a, &Kappa::trivial(2), Convention::NeronConnected, None).unwrap().value;
    assert_eq!(rat(&v.value), br(5, 1));
    let a = lc(GroupKind::GL, 5, &["1", "3"]);
    for c in [Convention::NeronConnected, Convention::ConnectedModel] {
        assert_eq!(rat(&kappa_orbital(&a, &Kappa::trivial(2), c, None).unwrap().value.value), br(1, 1));
    }
    let a = lc(GroupKind::SL, 3, &["0", "-2*e^2"]);
    let v = kappa_orbital(&a, &half(), Convention::NeronConnected, None).unwrap().value;
    assert_eq!(rat(&v.value), br(3, 1));

    let sl2 = build_root_datum(GroupKind::SL, 2, 3).unwrap();
    let ed = endoscopic_datum(&sl2, &half()).unwrap();
    let ah = HChar::Torus { y: TruncSeries::monomial(1, 1), torus: TorusType::Unramified };
    assert_eq!(rat(&stable_orbital_h(&ed, &ah, Convention::NeronConnected, None).unwrap().value), br(1, 1));

    let gl2 = build_root_datum(GroupKind::GL, 2, 5).unwrap();
    let ed = endoscopic_datum(&gl2, &Kappa::new(vec![Ratio::new(1, 2), Ratio::from_integer(0)])).unwrap();
    let blocks = HChar::Blocks(vec![lc(GroupKind::GL, 5, &["1"]), lc(GroupKind::GL, 5, &["2"])]);
    assert_eq!(rat(&stable_orbital_h(&ed, &blocks, Convention::NeronConnected, None).unwrap().value), br(1, 1));
}

#[test]
fn identity_examples() {
    for (p, m, expect) in [(3u32, 1usize, "3"), (5, 2, "25")] {
        let sl2 = build_root_datum(GroupKind::SL, 2, p).unwrap();
        let ed = endoscopic_datum(&sl2, &half()).unwrap();
        let ah = HChar::Torus { y: TruncSeries::monomial(1, m), torus: TorusType::Unramified };
        let chk = ls_check(&ed, &gf(p), &ah, None).unwrap();
        assert!(chk.pass);
        assert_eq!((chk.r_v, chk.lhs.value.to_string()), (m, expect.to_string()));
    }
    let sl2 = build_root_datum(GroupKind::SL, 2, 3).unwrap();
    let ed = endoscopic_datum(&sl2, &Kappa::trivial(1)).unwrap();
    let chk = ls_check(&ed, &gf(3), &HChar::Same(lc(GroupKind::SL, 3, &["0", "-2*e^2"])), None).unwrap();
    assert!(chk.pass);
    assert_eq!(chk.r_v, 0);

    let chk = nonstandard_check(&lc(GroupKind::SL, 3, &["0", "-2*e^2"]), None).unwrap();
    assert!(chk.pass);
    let chk = nonstandard_check(&lc(GroupKind::SL, 3, &["0", "1"]), None).unwrap();
    assert_eq!((chk.pass, chk.lhs.value.to_string()), (true, "1".to_string()));
    let chk = nonstandard_check(&lc(GroupKind::SL, 5, &["0", "-1*e"]), None).unwrap();
    assert_eq!((chk.pass, chk.lhs.value.to_string()), (true, "1".to_string()));
}

#[test]
fn global_formula_examples() {
    let sl2 = build_root_datum(GroupKind::SL, 2, 5).unwrap();
    let g = global_formulas(&sl2, 0, 2).unwrap();
    assert_eq!((g.dim_a, g.dim_pa), (5, 1));
    let gl1 = build_root_datum(GroupKind::GL, 1, 5).unwrap();
    let g = global_formulas(&gl1, 1, 1).unwrap();
    assert_eq!((g.dim_a, g.dim_pa), (1, 0));
}

#[test]
fn case_file_errors() {
    let bad = r#"{"id":"x","q":3,"p":3,"m":1,"kind":"GL","n":2,"mode":"invariants","a":["0","2**e"]}"#;
    match CaseFile::parse(bad) {
        Err(Error::Parse { column, .. }) => assert_eq!(column, 2),
        other => panic!("expected parse error, got {other:?}"),
    }
    let zero = r#"{"id":"z","q":3,"p":3,"m":1,"kind":"GL","n":2,"mode":"invariants","a":["0","0"]}"#;
    let r = run_case(&CaseFile::parse(zero).unwrap());
    assert!(!r.pass);
    assert_eq!(r.error.as_deref(), Some(Error::NotRegular.to_string().as_str()));
}
