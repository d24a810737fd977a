//! Fixed-point CPM amounts.
//!
//! Every price in the toolkit is stored as an integer count of 1/10000 dollar
//! so that ledger sums are exact and independent of summation order.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Fractional digits kept by [`Money`].
pub const FRACTION_DIGITS: u32 = 4;
/// Units per dollar.
pub const SCALE: i64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoneyError {
    #[error("money amount must be non-negative, got {0}")]
    Negative(String),
    #[error("money amount is not finite")]
    NotFinite,
    #[error("money amount {0} out of range")]
    Overflow(String),
    #[error("cannot parse money amount {0:?}")]
    Parse(String),
}

/// Non-negative CPM dollar amount with four fractional digits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);
    /// Largest representable amount, used as an "always block" reserve.
    pub const MAX: Money = Money(i64::MAX / 4);

    pub fn from_units(units: i64) -> Result<Self, MoneyError> {
        if units < 0 {
            return Err(MoneyError::Negative(SignedMoney(units).to_string()));
        }
        Ok(Money(units))
    }

    /// Rounds to the nearest 1/10000 dollar (half away from zero).
    pub fn from_dollars(dollars: f64) -> Result<Self, MoneyError> {
        if !dollars.is_finite() {
            return Err(MoneyError::NotFinite);
        }
        let units = (dollars * SCALE as f64).round();
        if units < 0.0 {
            return Err(MoneyError::Negative(dollars.to_string()));
        }
        if units > Money::MAX.0 as f64 {
            return Err(MoneyError::Overflow(dollars.to_string()));
        }
        Ok(Money(units as i64))
    }

    /// Whole-dollar constructor for constants.
    pub const fn whole(dollars: u32) -> Self {
        Money(dollars as i64 * SCALE)
    }

    pub fn units(self) -> i64 {
        self.0
    }

    pub fn as_dollars(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub fn checked_sub(self, rhs: Money) -> Option<Money> {
        (self.0 >= rhs.0).then(|| Money(self.0 - rhs.0))
    }

    pub fn saturating_sub(self, rhs: Money) -> Money {
        Money((self.0 - rhs.0).max(0))
    }

    /// `self + fraction * (upper - self)`, rounded down to a whole unit.
    pub fn interpolate(self, upper: Money, fraction: f64) -> Money {
        let span = (upper.0 - self.0).max(0) as f64;
        Money(self.0 + (span * fraction.clamp(0.0, 1.0)).floor() as i64)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0.checked_add(rhs.0).expect("money overflow"))
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        *self = *self + rhs;
    }
}

impl Sub for Money {
    type Output = SignedMoney;
    fn sub(self, rhs: Money) -> SignedMoney {
        SignedMoney(self.0 - rhs.0)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        iter.copied().sum()
    }
}

fn write_units(f: &mut fmt::Formatter<'_>, units: i64) -> fmt::Result {
    let sign = if units < 0 { "-" } else { "" };
    let abs = units.unsigned_abs();
    write!(f, "{sign}{}.{:04}", abs / SCALE as u64, abs % SCALE as u64)
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_units(f, self.0)
    }
}

fn parse_units(s: &str) -> Option<i64> {
    let s = s.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if frac.len() > FRACTION_DIGITS as usize {
        return None;
    }
    let whole: i64 = if whole.is_empty() {
        0
    } else {
        whole.parse().ok()?
    };
    let mut frac_units: i64 = if frac.is_empty() {
        0
    } else {
        frac.parse().ok()?
    };
    for _ in frac.len()..FRACTION_DIGITS as usize {
        frac_units *= 10;
    }
    let units = whole.checked_mul(SCALE)?.checked_add(frac_units)?;
    Some(if negative { -units } else { units })
}

impl FromStr for Money {
    type Err = MoneyError;

    /// Exact decimal parse, at most four fractional digits.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let units = parse_units(s).ok_or_else(|| MoneyError::Parse(s.to_string()))?;
        Money::from_units(units)
    }
}

// JSON carries plain numbers; f64 round-trips every value with four decimals
// well below 2^53 units.
impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_dollars())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Money::from_dollars(value).map_err(serde::de::Error::custom)
    }
}

/// Signed amount for deltas between ledgers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedMoney(i64);

impl SignedMoney {
    pub const ZERO: SignedMoney = SignedMoney(0);

    pub fn from_units(units: i64) -> Self {
        SignedMoney(units)
    }

    pub fn units(self) -> i64 {
        self.0
    }

    pub fn as_dollars(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }
}

impl Add for SignedMoney {
    type Output = SignedMoney;
    fn add(self, rhs: SignedMoney) -> SignedMoney {
        SignedMoney(self.0 + rhs.0)
    }
}

impl fmt::Display for SignedMoney {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_units(f, self.0)
    }
}

impl Serialize for SignedMoney {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_dollars())
    }
}

impl<'de> Deserialize<'de> for SignedMoney {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        if !value.is_finite() {
            return Err(serde::de::Error::custom(MoneyError::NotFinite));
        }
        Ok(SignedMoney((value * SCALE as f64).round() as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_displays() {
        let m: Money = "12.34".parse().unwrap();
        assert_eq!(m.units(), 123_400);
        assert_eq!(m.to_string(), "12.3400");
        assert_eq!("0.0005".parse::<Money>().unwrap().units(), 5);
        assert_eq!(".5".parse::<Money>().unwrap().units(), 5_000);
        assert!("1.23456".parse::<Money>().is_err());
        assert!("-1".parse::<Money>().is_err());
        assert!("abc".parse::<Money>().is_err());
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(Money::from_dollars(-0.01).is_err());
        assert!(Money::from_dollars(f64::NAN).is_err());
        assert_eq!(Money::from_dollars(-0.00001).unwrap(), Money::ZERO);
    }

    #[test]
    fn signed_display() {
        assert_eq!((Money::whole(1) - Money::whole(3)).to_string(), "-2.0000");
    }

    #[test]
    fn interpolate_stays_in_range() {
        let lo = Money::whole(10);
        let hi = Money::whole(15);
        assert_eq!(lo.interpolate(hi, 0.0), lo);
        assert_eq!(lo.interpolate(hi, 1.0), hi);
        assert_eq!(lo.interpolate(hi, 0.5), Money::from_dollars(12.5).unwrap());
    }

    proptest! {
        #[test]
        fn json_round_trip(units in 0i64..4_100_000_000) {
            let m = Money::from_units(units).unwrap();
            let json = serde_json::to_string(&m).unwrap();
            let back: Money = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, m);
            prop_assert_eq!(m.to_string().parse::<Money>().unwrap(), m);
        }

        #[test]
        fn sums_are_order_independent(mut xs in proptest::collection::vec(0i64..500_000, 0..64)) {
            let forward: Money = xs.iter().map(|&u| Money::from_units(u).unwrap()).sum();
            xs.reverse();
            let backward: Money = xs.iter().map(|&u| Money::from_units(u).unwrap()).sum();
            prop_assert_eq!(forward, backward);
        }
    }
}
