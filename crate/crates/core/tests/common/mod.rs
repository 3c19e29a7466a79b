#![allow(dead_code)]

use flcheck_core::cyclo::Cyclo;
use flcheck_core::finfield::Gf;
use flcheck_core::rootdata::{build_root_datum, GroupKind};
use flcheck_core::series::{parse_series, EXACT};
use flcheck_core::spectral::LocalChar;
use num_rational::BigRational;

pub fn gf(p: u32) -> Gf {
    Gf::new(p, 1).unwrap()
}

pub fn lc(kind: GroupKind, p: u32, a: &[&str]) -> LocalChar {
    let rd = build_root_datum(kind, a.len(), p).unwrap();
    let f = gf(p);
    let a = a.iter().map(|s| parse_series(s, &f, EXACT).unwrap()).collect();
    LocalChar::new(&rd, &f, a).unwrap()
}

pub fn br(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn rat(x: &Cyclo) -> BigRational {
    x.as_rational().expect("rational value")
}
