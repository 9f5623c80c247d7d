//! Exact non-negative dyadic rationals, `mantissa / 2^exponent`.
//!
//! Every probability of the symmetric ±1 walk has a power-of-two
//! denominator, so this is the only number type the exact modules need.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::WalkError;

/// A non-negative dyadic rational kept in canonical form: the mantissa is odd
/// unless the exponent is already zero, and zero is stored as `(0, 0)`.
///
/// Values produced by the walk model are probabilities and lie in `[0, 1]`;
/// arithmetic itself is closed over all non-negative dyadics so that sums of
/// arbitrary tables can be formed and then checked.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicProb {
    mantissa: BigUint,
    exponent: u64,
}

impl DyadicProb {
    pub fn zero() -> Self {
        DyadicProb {
            mantissa: BigUint::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        DyadicProb {
            mantissa: BigUint::one(),
            exponent: 0,
        }
    }

    /// `mantissa / 2^exponent`, reduced to canonical form.
    pub fn new(mantissa: BigUint, exponent: u64) -> Self {
        let mut d = DyadicProb { mantissa, exponent };
        d.canonicalize();
        d
    }

    /// `count / 2^steps`, the probability of `count` out of `2^steps` equally
    /// likely paths.
    pub fn from_count(count: impl Into<BigUint>, steps: u64) -> Self {
        Self::new(count.into(), steps)
    }

    fn canonicalize(&mut self) {
        match self.mantissa.trailing_zeros() {
            None => self.exponent = 0,
            Some(tz) => {
                let shift = tz.min(self.exponent);
                if shift > 0 {
                    self.mantissa >>= shift;
                    self.exponent -= shift;
                }
            }
        }
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// True when the value lies in `[0, 1]`.
    pub fn is_probability(&self) -> bool {
        *self <= Self::one()
    }

    pub fn half(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        DyadicProb {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + 1,
        }
    }

    /// Mantissas of `self` and `other` over the common denominator
    /// `2^max(e1, e2)`.
    fn aligned(&self, other: &Self) -> (BigUint, BigUint, u64) {
        let e = self.exponent.max(other.exponent);
        (
            &self.mantissa << (e - self.exponent),
            &other.mantissa << (e - other.exponent),
            e,
        )
    }

    /// `self - other`, or `None` if the difference would be negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let (a, b, e) = self.aligned(other);
        if a < b {
            None
        } else {
            Some(Self::new(a - b, e))
        }
    }

    /// Signed difference as an exact rational.
    pub fn signed_sub(&self, other: &Self) -> BigRational {
        self.to_rational() - other.to_rational()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.mantissa.clone()),
            BigInt::one() << self.exponent,
        )
    }

    /// Nearest `f64` (within one ulp; exact whenever representable).
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.mantissa, self.exponent)
    }
}

/// `mantissa / 2^exponent` as the nearest `f64`, within one ulp.
pub(crate) fn ratio_to_f64(mantissa: &BigUint, exponent: u64) -> f64 {
    if mantissa.is_zero() {
        return 0.0;
    }
    let bits = mantissa.bits();
    let (top, shift) = if bits > 64 {
        let shift = bits - 64;
        let mut top = (mantissa >> shift).to_u64().expect("64 bits");
        // Sticky bit: the low bit of a 64-bit value sits below f64
        // precision and only steers round-to-nearest.
        if mantissa.trailing_zeros().unwrap_or(0) < shift {
            top |= 1;
        }
        (top, shift)
    } else {
        (mantissa.to_u64().expect("fits"), 0)
    };
    scale_by_pow2(top as f64, shift as i64 - exponent as i64)
}

/// `value * 2^power` without intermediate overflow or underflow for the
/// ranges used here.
pub(crate) fn scale_by_pow2(mut value: f64, mut power: i64) -> f64 {
    const STEP: i32 = 1000;
    while power > STEP as i64 {
        value *= 2f64.powi(STEP);
        power -= STEP as i64;
    }
    while power < -(STEP as i64) {
        value *= 2f64.powi(-STEP);
        power += STEP as i64;
    }
    value * 2f64.powi(power as i32)
}

impl Default for DyadicProb {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialOrd for DyadicProb {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicProb {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add<&DyadicProb> for &DyadicProb {
    type Output = DyadicProb;

    fn add(self, rhs: &DyadicProb) -> DyadicProb {
        let (a, b, e) = self.aligned(rhs);
        DyadicProb::new(a + b, e)
    }
}

impl Add for DyadicProb {
    type Output = DyadicProb;

    fn add(self, rhs: DyadicProb) -> DyadicProb {
        &self + &rhs
    }
}

impl Mul<&DyadicProb> for &DyadicProb {
    type Output = DyadicProb;

    fn mul(self, rhs: &DyadicProb) -> DyadicProb {
        DyadicProb::new(
            &self.mantissa * &rhs.mantissa,
            self.exponent + rhs.exponent,
        )
    }
}

impl<'a> Sum<&'a DyadicProb> for DyadicProb {
    fn sum<I: Iterator<Item = &'a DyadicProb>>(iter: I) -> Self {
        // Accumulate over a common denominator, canonicalize once.
        let mut acc = BigUint::zero();
        let mut exp = 0u64;
        for d in iter {
            if d.exponent > exp {
                acc <<= d.exponent - exp;
                exp = d.exponent;
            }
            acc += &d.mantissa << (exp - d.exponent);
        }
        DyadicProb::new(acc, exp)
    }
}

impl Sum for DyadicProb {
    fn sum<I: Iterator<Item = DyadicProb>>(iter: I) -> Self {
        let items: Vec<DyadicProb> = iter.collect();
        items.iter().sum()
    }
}

/// Written as `m/2^e`.
impl fmt::Display for DyadicProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Debug for DyadicProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for DyadicProb {
    type Err = WalkError;

    /// Accepts `m/2^e` as well as a bare integer `m`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WalkError::ParseDyadic(s.to_string());
        let t = s.trim();
        let (m, e) = match t.split_once('/') {
            None => (t, "0"),
            Some((m, rest)) => (m, rest.strip_prefix("2^").ok_or_else(bad)?),
        };
        let mantissa: BigUint = m.parse().map_err(|_| bad())?;
        let exponent: u64 = e.parse().map_err(|_| bad())?;
        Ok(DyadicProb::new(mantissa, exponent))
    }
}
