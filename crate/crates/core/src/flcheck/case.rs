//! Case files: one local check, stored as JSON with sorted keys.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finfield::Gf;
use crate::rootdata::{build_root_datum, endoscopic_datum, parse_kappa, EndoscopicDatum, GroupKind, Kappa, RootDatum};
use crate::series::{parse_series, TruncSeries, EXACT};
use crate::spectral::{HChar, LocalChar, TorusType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Invariants,
    Orbital,
    Ls,
    Nonstandard,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Invariants => "invariants",
            Mode::Orbital => "orbital",
            Mode::Ls => "ls",
            Mode::Nonstandard => "nonstandard",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaSpec {
    pub order: u64,
    pub vector: Vec<String>,
}

/// The `H`-side characteristic of an endoscopic check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HSpec {
    /// Torus type for `SL_2` with `H` a torus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusType>,
    /// Torus coordinate `y`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    /// Per-block coefficients for a Levi-type `H` in `GL_n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseFile {
    pub id: String,
    pub q: u64,
    pub p: u32,
    pub m: u32,
    pub kind: GroupKind,
    pub n: usize,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_h: Option<HSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<KappaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
}

/// JSON with keys sorted at every level.
pub fn to_sorted_json<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    Ok(serde_json::to_string(&value)?)
}

pub fn to_sorted_json_pretty<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    Ok(serde_json::to_string_pretty(&value)?)
}

impl CaseFile {
    pub fn parse(text: &str) -> Result<CaseFile> {
        let c: CaseFile = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<CaseFile> {
        CaseFile::parse(&std::fs::read_to_string(path)?)
    }

    pub fn emit(&self) -> Result<String> {
        to_sorted_json_pretty(self)
    }

    fn validate(&self) -> Result<()> {
        if (self.p as u64).checked_pow(self.m) != Some(self.q) {
            return Err(Error::InvalidInput(format!("q = {} is not {}^{}", self.q, self.p, self.m)));
        }
        if let Some(k) = &self.kappa {
            let kv = parse_kappa(&k.vector)?;
            if kv.order() != k.order.max(1) {
                return Err(Error::InvalidInput(format!("kappa vector has order {}, declared {}", kv.order(), k.order)));
            }
        }
        let f = self.field()?;
        let mut all: Vec<&String> = self.a.iter().flatten().collect();
        if let Some(h) = &self.a_h {
            all.extend(h.y.iter());
            all.extend(h.blocks.iter().flatten().flatten());
        }
        for s in all {
            self.series(&f, s)?;
        }
        Ok(())
    }

    pub fn field(&self) -> Result<Gf> {
        Gf::new(self.p, self.m)
    }

    pub fn root_datum(&self) -> Result<RootDatum> {
        build_root_datum(self.kind, self.n, self.p)
    }

    pub fn kappa(&self, rd: &RootDatum) -> Result<Kappa> {
        match &self.kappa {
            None => Ok(Kappa::trivial(rd.rank)),
            Some(k) => parse_kappa(&k.vector),
        }
    }

    pub fn endoscopic(&self) -> Result<EndoscopicDatum> {
        let rd = self.root_datum()?;
        endoscopic_datum(&rd, &self.kappa(&rd)?)
    }

    fn series(&self, f: &Gf, s: &str) -> Result<TruncSeries> {
        parse_series(s, f, EXACT)
    }

    pub fn local_char(&self) -> Result<LocalChar> {
        let rd = self.root_datum()?;
        let f = self.field()?;
        let a = self.a.as_ref().ok_or_else(|| Error::InvalidInput("case has no 'a'".into()))?;
        let coeffs = a.iter().map(|s| self.series(&f, s)).collect::<Result<Vec<_>>>()?;
        LocalChar::new(&rd, &f, coeffs)
    }

    pub fn h_char(&self) -> Result<HChar> {
        let f = self.field()?;
        let Some(h) = &self.a_h else {
            return Ok(HChar::Same(self.local_char()?));
        };
        if let Some(blocks) = &h.blocks {
            let bs = blocks
                .iter()
                .map(|b| {
                    let rd = build_root_datum(GroupKind::GL, b.len(), self.p)?;
                    let coeffs = b.iter().map(|s| self.series(&f, s)).collect::<Result<Vec<_>>>()?;
                    LocalChar::new(&rd, &f, coeffs)
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(HChar::Blocks(bs));
        }
        match (&h.torus, &h.y) {
            (Some(t), Some(y)) => Ok(HChar::Torus { y: self.series(&f, y)?, torus: *t }),
            _ => Err(Error::InvalidInput("a_h needs either blocks or torus and y".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = CaseFile {
            id: "ls-q3-m1".into(),
            q: 3,
            p: 3,
            m: 1,
            kind: GroupKind::SL,
            n: 2,
            mode: Mode::Ls,
            a: None,
            a_h: Some(HSpec { torus: Some(TorusType::Unramified), y: Some("1*e".into()), blocks: None }),
            kappa: Some(KappaSpec { order: 2, vector: vec!["1/2".into()] }),
            precision: None,
        };
        let text = c.emit().unwrap();
        let back = CaseFile::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.emit().unwrap(), text);
        // keys sorted
        let ia = text.find("\"a_h\"").unwrap();
        let ik = text.find("\"kappa\"").unwrap();
        let iq = text.find("\"q\"").unwrap();
        assert!(ia < ik && ik < iq);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(CaseFile::parse("{\n  \"id\": 3,"), Err(Error::Parse { line: 2, .. })));
        let bad = r#"{"id":"x","q":4,"p":3,"m":1,"kind":"GL","n":2,"mode":"orbital","a":["0","1"]}"#;
        assert!(matches!(CaseFile::parse(bad), Err(Error::InvalidInput(_))));
        let bad = r#"{"id":"x","q":3,"p":3,"m":1,"kind":"GL","n":2,"mode":"orbital","a":["0","2**e"]}"#;
        assert!(matches!(CaseFile::parse(bad), Err(Error::Parse { column: 2, .. })));
    }
}
