//! Truncated power series over a finite field: elements of F[[e]]/(e^N)
//! with tracked absolute precision, Laurent elements, and the series
//! literal grammar used in case files.

use crate::error::{Error, Result};
use crate::finfield::{Fe, Gf};

/// Precision marker for exactly known series.
pub const EXACT: usize = usize::MAX / 4;

/// `sum c_i e^i`, known modulo `e^prec`. Coefficients past `coeffs.len()`
/// and below `prec` are zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    pub prec: usize,
    pub coeffs: Vec<Fe>,
}

impl TruncSeries {
    pub fn zero(prec: usize) -> Self {
        TruncSeries { prec, coeffs: vec![] }
    }

    pub fn constant(c: Fe, prec: usize) -> Self {
        let mut s = TruncSeries { prec, coeffs: vec![c] };
        s.normalize();
        s
    }

    pub fn one() -> Self {
        Self::constant(1, EXACT)
    }

    /// `c * e^k`, exact.
    pub fn monomial(c: Fe, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        let mut s = TruncSeries { prec: EXACT, coeffs };
        s.normalize();
        s
    }

    pub fn from_coeffs(coeffs: Vec<Fe>, prec: usize) -> Self {
        let mut s = TruncSeries { prec, coeffs };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        self.coeffs.truncate(self.prec);
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn coeff(&self, i: usize) -> Fe {
        *self.coeffs.get(i).unwrap_or(&0)
    }

    /// Valuation, or `None` if the series vanishes at its precision.
    pub fn val(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        let mut s = self.clone();
        s.prec = s.prec.min(prec);
        s.normalize();
        s
    }

    /// Same series, forgotten precision replaced by `prec` (used when a value
    /// is known to be exact, e.g. an input polynomial).
    pub fn set_prec(&self, prec: usize) -> Self {
        let mut s = self.clone();
        s.prec = prec;
        s.normalize();
        s
    }

    pub fn add(&self, f: &Gf, b: &Self) -> Self {
        let prec = self.prec.min(b.prec);
        let n = self.coeffs.len().max(b.coeffs.len()).min(prec);
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), b.coeff(i))).collect();
        Self::from_coeffs(coeffs, prec)
    }

    pub fn neg(&self, f: &Gf) -> Self {
        TruncSeries { prec: self.prec, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn sub(&self, f: &Gf, b: &Self) -> Self {
        self.add(f, &b.neg(f))
    }

    pub fn scale(&self, f: &Gf, c: Fe) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&x| f.mul(x, c)).collect(), self.prec)
    }

    pub fn mul(&self, f: &Gf, b: &Self) -> Self {
        let va = self.val().unwrap_or(self.prec);
        let vb = b.val().unwrap_or(b.prec);
        let prec = self.prec.saturating_add(vb).min(b.prec.saturating_add(va)).min(EXACT);
        if self.is_zero() || b.is_zero() {
            return Self::zero(prec);
        }
        let n = (self.coeffs.len() + b.coeffs.len() - 1).min(prec);
        let mut out = vec![0; n];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 || i >= n {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                if y != 0 {
                    out[i + j] = f.add(out[i + j], f.mul(x, y));
                }
            }
        }
        Self::from_coeffs(out, prec)
    }

    /// Multiply by `e^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero(self.prec.saturating_add(k).min(EXACT));
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::from_coeffs(coeffs, self.prec.saturating_add(k).min(EXACT))
    }

    /// Divide by `e^k`; the caller guarantees divisibility at known precision.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if self.prec < k {
            return Err(Error::PrecisionExhausted(format!(
                "cannot divide by e^{k} at precision {}",
                self.prec
            )));
        }
        if self.coeffs.iter().take(k).any(|&c| c != 0) {
            return Err(Error::Inconsistent(format!("series not divisible by e^{k}")));
        }
        let coeffs = self.coeffs.iter().skip(k).copied().collect();
        let prec = if self.is_exact() { EXACT } else { self.prec - k };
        Ok(Self::from_coeffs(coeffs, prec))
    }

    /// Inverse of a unit (nonzero constant term).
    pub fn inv_unit(&self, f: &Gf) -> Result<Self> {
        let c0 = self.coeff(0);
        if c0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec;
        let inv0 = f.inv(c0)?;
        if self.coeffs.len() == 1 {
            return Ok(Self::constant(inv0, prec));
        }
        // Working length is finite even for exact inputs with tails.
        let n = if self.is_exact() { self.coeffs.len() * 8 + 64 } else { prec };
        let mut out = vec![0; n];
        out[0] = inv0;
        for i in 1..n {
            let mut acc = 0;
            for j in 1..=i.min(self.coeffs.len() - 1) {
                acc = f.add(acc, f.mul(self.coeffs[j], out[i - j]));
            }
            out[i] = f.neg(f.mul(acc, inv0));
        }
        Ok(Self::from_coeffs(out, n))
    }

    /// Exact quotient `self / b` when `val(b) <= val(self)`.
    pub fn div(&self, f: &Gf, b: &Self) -> Result<Self> {
        let vb = b.val().ok_or(Error::DivisionByZero)?;
        let num = self.shift_down(vb)?;
        let den = b.shift_down(vb)?;
        Ok(num.mul(f, &den.inv_unit(f)?))
    }

    pub fn display(&self, f: &Gf) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let cs = if c < f.p() as u64 { c.to_string() } else { format!("[{}]", c) };
            terms.push(match i {
                0 => cs,
                1 => format!("{cs}*e"),
                _ => format!("{cs}*e^{i}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Element of F((e)): `e^val * unit`, or zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentElt {
    /// `None` is the zero element.
    pub val: Option<i64>,
    pub unit: TruncSeries,
}

impl LaurentElt {
    pub fn zero() -> Self {
        LaurentElt { val: None, unit: TruncSeries::zero(EXACT) }
    }

    pub fn from_series(s: &TruncSeries) -> Result<Self> {
        match s.val() {
            None => Err(Error::PrecisionExhausted("series vanishes at its precision".into())),
            Some(v) => Ok(LaurentElt { val: Some(v as i64), unit: s.shift_down(v)? }),
        }
    }

    pub fn mul(&self, f: &Gf, b: &Self) -> Self {
        match (self.val, b.val) {
            (Some(x), Some(y)) => LaurentElt { val: Some(x + y), unit: self.unit.mul(f, &b.unit) },
            _ => Self::zero(),
        }
    }

    pub fn inv(&self, f: &Gf) -> Result<Self> {
        let v = self.val.ok_or(Error::DivisionByZero)?;
        Ok(LaurentElt { val: Some(-v), unit: self.unit.inv_unit(f)? })
    }
}

/// Parse a series literal: integer coefficients reduced mod `p`, terms
/// `c*e^k`, `c*e`, `e^k`, `c` joined by `+` or `-`. A coefficient `[c]`
/// is the element of `F_q` with code `c`, as printed by `display`.
pub fn parse_series(input: &str, f: &Gf, prec: usize) -> Result<TruncSeries> {
    Parser { s: input.as_bytes(), pos: 0 }.series(f, prec)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { line: 1, column: self.pos, message: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn int(&mut self) -> Option<u64> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn series(&mut self, f: &Gf, prec: usize) -> Result<TruncSeries> {
        let mut coeffs: Vec<Fe> = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return self.err("empty series literal");
        }
        let mut first = true;
        loop {
            self.skip_ws();
            let mut sign = 1i64;
            match self.peek() {
                Some(b'+') if !first => self.pos += 1,
                Some(b'-') => {
                    sign = -1;
                    self.pos += 1;
                }
                _ if !first => return self.err("expected '+' or '-'"),
                _ => {}
            }
            self.skip_ws();
            let (c, k) = self.term(f)?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0);
            }
            coeffs[k] = if sign < 0 { f.sub(coeffs[k], c) } else { f.add(coeffs[k], c) };
            first = false;
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
        }
        Ok(TruncSeries::from_coeffs(coeffs, prec))
    }

    fn coeff(&mut self, f: &Gf) -> Result<Option<Fe>> {
        if self.peek() != Some(b'[') {
            return Ok(self.int().map(|c| f.from_int((c % f.p() as u64) as i64)));
        }
        self.pos += 1;
        let code = match self.int() {
            Some(c) if c < f.size() => c,
            Some(_) => return self.err("element code out of range"),
            None => return self.err("expected element code after '['"),
        };
        if self.peek() != Some(b']') {
            return self.err("expected ']'");
        }
        self.pos += 1;
        Ok(Some(code))
    }

    fn term(&mut self, f: &Gf) -> Result<(Fe, usize)> {
        let coeff = self.coeff(f)?;
        self.skip_ws();
        let has_star = if self.peek() == Some(b'*') {
            if coeff.is_none() {
                return self.err("expected coefficient before '*'");
            }
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        };
        if self.peek() == Some(b'e') {
            self.pos += 1;
            self.skip_ws();
            let mut k = 1usize;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                self.skip_ws();
                k = match self.int() {
                    Some(v) if v < 100_000 => v as usize,
                    Some(_) => return self.err("exponent too large"),
                    None => return self.err("expected exponent after '^'"),
                };
            }
            return Ok((coeff.unwrap_or(1), k));
        }
        if has_star {
            return self.err("expected 'e' after '*'");
        }
        match coeff {
            Some(c) => Ok((c, 0)),
            None => self.err("expected coefficient or 'e'"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Gf {
        Gf::new(3, 1).unwrap()
    }

    #[test]
    fn parse_literals() {
        let f = f3();
        let s = parse_series("1 + 2*e", &f, 8).unwrap();
        assert_eq!(s.coeffs, vec![1, 2]);
        let s = parse_series("2*e^2", &f, 8).unwrap();
        assert_eq!(s.coeffs, vec![0, 0, 2]);
        let s = parse_series("-e + 4", &f, 8).unwrap();
        assert_eq!(s.coeffs, vec![1, 2]);
        let s = parse_series("0", &f, 8).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn display_round_trip_over_extension() {
        let f = Gf::new(3, 2).unwrap();
        let s = TruncSeries::from_coeffs(vec![5, 0, 2, 7], EXACT);
        assert_eq!(s.display(&f), "[5] + 2*e^2 + [7]*e^3");
        assert_eq!(parse_series(&s.display(&f), &f, EXACT).unwrap(), s);
        assert!(matches!(parse_series("[9]", &f, 8), Err(Error::Parse { column: 2, .. })));
    }

    #[test]
    fn parse_errors_carry_position() {
        let f = f3();
        match parse_series("2**e", &f, 8) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_series("", &f, 8), Err(Error::Parse { .. })));
        assert!(matches!(parse_series("1 + ", &f, 8), Err(Error::Parse { column: 4, .. })));
        assert!(matches!(parse_series("e^", &f, 8), Err(Error::Parse { .. })));
        assert!(matches!(parse_series("1 2", &f, 8), Err(Error::Parse { column: 2, .. })));
    }

    #[test]
    fn arithmetic_tracks_precision() {
        let f = f3();
        let a = TruncSeries::from_coeffs(vec![1, 1], 5);
        let b = TruncSeries::from_coeffs(vec![0, 0, 1], 4);
        let c = a.mul(&f, &b);
        // precision min(5 + 2, 4 + 0)
        assert_eq!(c.prec, 4);
        assert_eq!(c.coeffs, vec![0, 0, 1, 1]);
        let s = a.add(&f, &b);
        assert_eq!(s.prec, 4);
        let inv = a.inv_unit(&f).unwrap();
        let one = a.mul(&f, &inv);
        assert_eq!(one.coeffs, vec![1]);
        assert_eq!(one.prec, 5);
        let q = c.div(&f, &b).unwrap();
        assert_eq!(q.coeffs, a.coeffs);
        assert_eq!(q.prec, 2);
    }

    #[test]
    fn laurent_inverse() {
        let f = f3();
        let s = TruncSeries::from_coeffs(vec![0, 0, 2, 1], 10);
        let l = LaurentElt::from_series(&s).unwrap();
        assert_eq!(l.val, Some(2));
        let inv = l.inv(&f).unwrap();
        assert_eq!(inv.val, Some(-2));
        let one = l.mul(&f, &inv);
        assert_eq!(one.val, Some(0));
        assert_eq!(one.unit.coeffs, vec![1]);
    }
}
