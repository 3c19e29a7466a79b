//! Exact elements of `Q(zeta_m)` for `m <= 4`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `sum coeffs[k] zeta_m^k`, reduced modulo the `m`-th cyclotomic polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclo {
    pub m: u32,
    pub coeffs: Vec<BigRational>,
}

fn phi_deg(m: u32) -> usize {
    match m {
        1 | 2 => 1,
        _ => 2,
    }
}

impl Cyclo {
    pub fn zero(m: u32) -> Result<Cyclo> {
        if !(1..=4).contains(&m) {
            return Err(Error::UnsupportedOrder(m as u64));
        }
        Ok(Cyclo { m, coeffs: vec![BigRational::zero(); phi_deg(m)] })
    }

    pub fn from_rational(m: u32, r: BigRational) -> Result<Cyclo> {
        let mut c = Cyclo::zero(m)?;
        c.coeffs[0] = r;
        Ok(c)
    }

    pub fn from_ratio(m: u32, num: i128, den: i128) -> Result<Cyclo> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Cyclo::from_rational(m, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `zeta_m^k`.
    pub fn root(m: u32, k: i64) -> Result<Cyclo> {
        let mut c = Cyclo::zero(m)?;
        let k = k.rem_euclid(m as i64) as usize;
        let one = BigRational::one();
        match (m, k) {
            (1, _) => c.coeffs[0] = one,
            (2, 0) => c.coeffs[0] = one,
            (2, _) => c.coeffs[0] = -one,
            (3, 0) | (4, 0) => c.coeffs[0] = one,
            (3, 1) | (4, 1) => c.coeffs[1] = one,
            // zeta_3^2 = -1 - zeta_3
            (3, _) => {
                c.coeffs[0] = -one.clone();
                c.coeffs[1] = -one;
            }
            (4, 2) => c.coeffs[0] = -one,
            _ => c.coeffs[1] = -one,
        }
        Ok(c)
    }

    /// `exp(2 pi i r)` for `r` in `Q/Z` with denominator dividing `m`.
    pub fn exp(m: u32, num: i64, den: i64) -> Result<Cyclo> {
        if (m as i64 * num) % den != 0 {
            return Err(Error::UnsupportedKappa(format!("{num}/{den} is not of order dividing {m}")));
        }
        Cyclo::root(m, m as i64 * num / den)
    }

    pub fn add(&self, b: &Cyclo) -> Cyclo {
        assert_eq!(self.m, b.m);
        Cyclo { m: self.m, coeffs: self.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, b: &Cyclo) -> Cyclo {
        assert_eq!(self.m, b.m);
        Cyclo { m: self.m, coeffs: self.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect() }
    }

    pub fn scale(&self, r: &BigRational) -> Cyclo {
        Cyclo { m: self.m, coeffs: self.coeffs.iter().map(|x| x * r).collect() }
    }

    pub fn mul(&self, b: &Cyclo) -> Cyclo {
        assert_eq!(self.m, b.m);
        if phi_deg(self.m) == 1 {
            return Cyclo { m: self.m, coeffs: vec![&self.coeffs[0] * &b.coeffs[0]] };
        }
        let (a0, a1, b0, b1) = (&self.coeffs[0], &self.coeffs[1], &b.coeffs[0], &b.coeffs[1]);
        let z2 = a1 * b1;
        let (c0, c1) = if self.m == 3 {
            (a0 * b0 - &z2, a0 * b1 + a1 * b0 - &z2)
        } else {
            (a0 * b0 - &z2, a0 * b1 + a1 * b0)
        };
        Cyclo { m: self.m, coeffs: vec![c0, c1] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    pub fn with_order(&self, m: u32) -> Result<Cyclo> {
        if m == self.m {
            return Ok(self.clone());
        }
        match self.as_rational() {
            Some(r) => Cyclo::from_rational(m, r),
            None => Err(Error::UnsupportedOrder(m as u64)),
        }
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let sym = if self.m == 4 { "i" } else { "z3" };
        let (a, b) = (&self.coeffs[0], &self.coeffs[1]);
        if a.is_zero() {
            write!(f, "({b})*{sym}")
        } else {
            write!(f, "{a} + ({b})*{sym}")
        }
    }
}

impl Serialize for Cyclo {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_multiply() {
        for m in 1..=4u32 {
            let z = Cyclo::root(m, 1).unwrap();
            let mut acc = Cyclo::root(m, 0).unwrap();
            for _ in 0..m {
                acc = acc.mul(&z);
            }
            assert_eq!(acc, Cyclo::root(m, 0).unwrap());
        }
        let i = Cyclo::root(4, 1).unwrap();
        assert_eq!(i.mul(&i), Cyclo::root(4, 2).unwrap());
        assert_eq!(Cyclo::root(4, 2).unwrap().as_rational(), Some(-BigRational::one()));
        // 1 + z + z^2 = 0
        let s = Cyclo::root(3, 0).unwrap().add(&Cyclo::root(3, 1).unwrap()).add(&Cyclo::root(3, 2).unwrap());
        assert!(s.is_zero());
    }

    #[test]
    fn exp_values() {
        assert_eq!(Cyclo::exp(2, 1, 2).unwrap().to_string(), "-1");
        assert_eq!(Cyclo::exp(4, 1, 4).unwrap().to_string(), "(1)*i");
        assert!(Cyclo::exp(2, 1, 3).is_err());
        assert_eq!(Cyclo::from_ratio(1, 3, 4).unwrap().to_string(), "3/4");
    }
}
