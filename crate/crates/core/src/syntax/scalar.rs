use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("scalars must be nonnegative, got {0}")]
    Negative(String),
    #[error("malformed scalar literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// An exact nonnegative rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn new(value: BigRational) -> Result<Self, ScalarError> {
        if value.is_negative() {
            return Err(ScalarError::Negative(value.to_string()));
        }
        Ok(Scalar(value))
    }

    pub fn ratio(numer: u64, denom: u64) -> Result<Self, ScalarError> {
        if denom == 0 {
            return Err(ScalarError::ZeroDenominator(format!("{numer}/{denom}")));
        }
        Ok(Scalar(BigRational::new(numer.into(), denom.into())))
    }

    pub fn from_integer(n: u64) -> Self {
        Scalar(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// ⌊α⌋ as a machine integer.
    ///
    /// Panics if the floor does not fit in `usize`; such a scalar would
    /// require materializing that many type summands anyway.
    pub fn floor(&self) -> usize {
        self.0
            .floor()
            .to_integer()
            .to_usize()
            .expect("scalar floor exceeds usize")
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 + &rhs.0)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 * &rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts `7`, `0.9`, `2.50` and `9/10`.
impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || ScalarError::Malformed(s.to_string());
        let digits = |part: &str| -> Result<BigInt, ScalarError> {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            part.parse::<BigInt>().map_err(|_| malformed())
        };
        if let Some(stripped) = s.strip_prefix('-') {
            if stripped.parse::<Scalar>().is_ok() {
                return Err(ScalarError::Negative(s.to_string()));
            }
            return Err(malformed());
        }
        if let Some((num, den)) = s.split_once('/') {
            let num = digits(num)?;
            let den = digits(den)?;
            if den.is_zero() {
                return Err(ScalarError::ZeroDenominator(s.to_string()));
            }
            return Ok(Scalar(BigRational::new(num, den)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int = digits(int)?;
            let frac_digits = digits(frac)?;
            let scale = num_traits::pow(BigInt::from(10u32), frac.len());
            let value = BigRational::new(int * &scale + frac_digits, scale);
            return Ok(Scalar(value));
        }
        Ok(Scalar(BigRational::from_integer(digits(s)?)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(s("0.9"), Scalar::ratio(9, 10).unwrap());
        assert_eq!(s("9/10"), s("0.9"));
        assert_eq!(s("2.50"), Scalar::ratio(5, 2).unwrap());
        assert_eq!(s("3"), Scalar::from_integer(3));
    }

    #[test]
    fn rejects_negative_and_garbage() {
        assert!(matches!("-1".parse::<Scalar>(), Err(ScalarError::Negative(_))));
        assert!(matches!("1/0".parse::<Scalar>(), Err(ScalarError::ZeroDenominator(_))));
        assert!("1.".parse::<Scalar>().is_err());
        assert!("a".parse::<Scalar>().is_err());
        assert!(Scalar::new(BigRational::from_integer((-2).into())).is_err());
    }

    #[test]
    fn exact_arithmetic() {
        assert_eq!(&s("0.9") + &s("1.1"), Scalar::from_integer(2));
        assert_eq!(&s("1/3") * &s("3"), Scalar::one());
        assert_eq!(s("0.9").floor(), 0);
        assert_eq!(s("2.5").floor(), 2);
        assert_eq!(s("2").floor(), 2);
    }

    #[test]
    fn display_round_trips() {
        for text in ["0", "1", "9/10", "5/2", "7"] {
            assert_eq!(s(text).to_string().parse::<Scalar>().unwrap(), s(text));
        }
        assert_eq!(s("0.5").to_string(), "1/2");
    }

    #[test]
    fn floor_is_superadditive() {
        // ⌊α+β⌋ ≥ ⌊α⌋+⌊β⌋ over a grid of rationals with denominators up to 6
        let mut grid = Vec::new();
        for den in 1..=6u64 {
            for num in 0..=18u64 {
                grid.push(Scalar::ratio(num, den).unwrap());
            }
        }
        for a in &grid {
            for b in &grid {
                assert!((a + b).floor() >= a.floor() + b.floor());
                assert!((a * b).floor() >= a.floor() * b.floor());
            }
        }
    }
}
