//! Stable and kappa-orbital integrals from groupoid counts, and the two
//! sides of the endoscopic identities.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use serde::{Serialize, Serializer};

use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::finfield::Gf;
use crate::rootdata::{build_root_datum, nonstandard_pair_check, EndoscopicDatum, GroupKind, HKind, Kappa};
use crate::spectral::{resultant_valuation, transfer_a, unit_index, Analysis, HChar, LocalChar};
use crate::springer::{groupoid_count, stable_fiber, Fiber, GroupoidCount};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum Convention {
    /// Volume one for the connected Néron model `J'^0(O)`.
    NeronConnected,
    /// Volume one for the connected model `J^0(O)`.
    ConnectedModel,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "neronconnected" | "neron" => Ok(Convention::NeronConnected),
            "connectedmodel" | "connected" => Ok(Convention::ConnectedModel),
            _ => Err(Error::InvalidInput(format!("unknown normalization '{s}'"))),
        }
    }
}

fn ser_ratio<S: Serializer>(r: &Ratio<i128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureNormalization {
    pub convention: Convention,
    /// `#(J'^0(O) / J^0(O))`.
    #[serde(serialize_with = "ser_ratio")]
    pub conversion: Ratio<i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitalValue {
    pub value: Cyclo,
    pub normalization: MeasureNormalization,
    /// Per-class contributions `(class, <class, kappa> O_gamma)`.
    pub breakdown: Vec<(i64, Cyclo)>,
}

fn to_big(r: &Ratio<i128>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Convert a groupoid count into an orbital integral.
pub fn orbital_from_count(
    an: &Analysis,
    fib: &Fiber,
    kappa: &Kappa,
    count: &GroupoidCount,
    conv: Convention,
) -> Result<OrbitalValue> {
    let conversion = unit_index(an)?;
    let factor = match conv {
        Convention::NeronConnected => to_big(&conversion),
        Convention::ConnectedModel => BigRational::from_integer(1.into()),
    };
    let m = count.value.m;
    let g = BigInt::from(fib.group_order);
    let mut breakdown = Vec::new();
    for b in &count.breakdown {
        let r = crate::springer::kappa_on_class(fib, kappa, b.class)?;
        let w = Cyclo::exp(m, *r.numer(), *r.denom())?;
        let part = BigRational::new(BigInt::from(b.points), g.clone()) * &factor;
        breakdown.push((b.class, w.scale(&part)));
    }
    Ok(OrbitalValue {
        value: count.value.scale(&factor),
        normalization: MeasureNormalization { convention: conv, conversion },
        breakdown,
    })
}

/// Everything produced while computing `O^kappa_a`.
#[derive(Clone, Debug)]
pub struct OrbitalRun {
    pub analysis: Analysis,
    pub fiber: Fiber,
    pub count: GroupoidCount,
    pub value: OrbitalValue,
}

/// `O^kappa_a(1_g)` under the chosen normalization.
pub fn kappa_orbital(a: &LocalChar, kappa: &Kappa, conv: Convention, precision: Option<usize>) -> Result<OrbitalRun> {
    if kappa.vector.len() != a.rd.rank {
        return Err(Error::InvalidInput(format!("kappa has {} entries, rank is {}", kappa.vector.len(), a.rd.rank)));
    }
    let (analysis, fiber) = stable_fiber(a, precision, 1)?;
    let count = groupoid_count(&fiber, kappa)?;
    let value = orbital_from_count(&analysis, &fiber, kappa, &count, conv)?;
    Ok(OrbitalRun { analysis, fiber, count, value })
}

fn unit_value(m: u32, conv: Convention) -> Result<OrbitalValue> {
    Ok(OrbitalValue {
        value: Cyclo::from_ratio(m, 1, 1)?,
        normalization: MeasureNormalization { convention: conv, conversion: Ratio::from_integer(1) },
        breakdown: vec![(0, Cyclo::from_ratio(m, 1, 1)?)],
    })
}

/// `SO_{a_H}(1_h)` for `H` a torus, a Levi-type subgroup of `GL_n`, or `G`.
pub fn stable_orbital_h(ed: &EndoscopicDatum, a_h: &HChar, conv: Convention, precision: Option<usize>) -> Result<OrbitalValue> {
    let m = ed.kappa.order().max(1) as u32;
    match (a_h, &ed.h_kind) {
        (HChar::Torus { .. }, HKind::Torus) => unit_value(m, conv),
        (HChar::Same(a), HKind::Group) => {
            let run = kappa_orbital(a, &Kappa::trivial(a.rd.rank), conv, precision)?;
            Ok(OrbitalValue { value: run.value.value.with_order(m)?, ..run.value })
        }
        (HChar::Blocks(bs), HKind::Blocks(_) | HKind::Torus) => {
            let mut value = BigRational::from_integer(1.into());
            let mut conversion = Ratio::from_integer(1);
            for b in bs {
                let run = kappa_orbital(b, &Kappa::trivial(b.rd.rank), conv, precision)?;
                let v = run.value.value.as_rational().ok_or_else(|| Error::Inconsistent("non-rational stable value".into()))?;
                value *= v;
                conversion *= run.value.normalization.conversion;
            }
            let c = Cyclo::from_rational(m, value)?;
            Ok(OrbitalValue {
                value: c.clone(),
                normalization: MeasureNormalization { convention: conv, conversion },
                breakdown: vec![(0, c)],
            })
        }
        _ => Err(Error::UnsupportedH(format!("{:?}", ed.h_kind))),
    }
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub a: LocalChar,
    pub r_v: usize,
    pub lhs: OrbitalValue,
    pub rhs: OrbitalValue,
    pub pass: bool,
    pub run: OrbitalRun,
}

/// `O^kappa_a = q^{r_v} SO_{a_H}`, both sides under the Néron normalization.
pub fn ls_check(ed: &EndoscopicDatum, field: &Gf, a_h: &HChar, precision: Option<usize>) -> Result<IdentityCheck> {
    let a = transfer_a(ed, field, a_h)?;
    let r_v = resultant_valuation(ed, field, a_h)?;
    let run = kappa_orbital(&a, &ed.kappa, Convention::NeronConnected, precision)?;
    let so_h = stable_orbital_h(ed, a_h, Convention::NeronConnected, precision)?;
    let qr = BigRational::from_integer(BigInt::from(field.size()).pow(r_v as u32));
    let rhs = OrbitalValue { value: so_h.value.scale(&qr), ..so_h };
    let lhs = run.value.clone();
    let pass = lhs.value == rhs.value;
    Ok(IdentityCheck { a, r_v, lhs, rhs, pass, run })
}

/// `SO_a(1_{SL_2}) = SO_a(1_{PGL_2})` for `a` on the shared base.
pub fn nonstandard_check(a: &LocalChar, precision: Option<usize>) -> Result<IdentityCheck> {
    let n = a.n();
    let p = a.field.p();
    let sl = build_root_datum(GroupKind::SL, n, p)?;
    let pgl = build_root_datum(GroupKind::PGL, n, p)?;
    if !nonstandard_pair_check(&sl, &pgl, p) {
        return Err(Error::BadCharacteristic { p, weyl_order: sl.weyl_order });
    }
    let a1 = LocalChar::new(&sl, &a.field, a.a.clone())?;
    let a2 = LocalChar::new(&pgl, &a.field, a.a.clone())?;
    let run = kappa_orbital(&a1, &Kappa::trivial(sl.rank), Convention::NeronConnected, precision)?;
    let run2 = kappa_orbital(&a2, &Kappa::trivial(pgl.rank), Convention::NeronConnected, precision)?;
    let pass = run.value.value == run2.value.value;
    Ok(IdentityCheck { a: a1, r_v: 0, lhs: run.value.clone(), rhs: run2.value, pass, run })
}
