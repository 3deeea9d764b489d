//! Exact rational values. Every Euler characteristic and index in this crate
//! is a [`Rational`]; floats never leak into the verified identities.

use num::rational::Ratio;
use num::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub type Rational = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Renders `-3/2` style text; integers drop the denominator.
pub fn rat_display(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serialization wrapper: rationals appear in JSON as `{"num": .., "den": ..}`
/// with a positive denominator, never as floats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatJson(pub Rational);

impl Serialize for RatJson {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Rational", 2)?;
        s.serialize_field("num", self.0.numer())?;
        s.serialize_field("den", self.0.denom())?;
        s.end()
    }
}

/// Sum of `1/|G_p|` style terms; convenience for orbit-weighted counts.
pub fn sum_rationals<I: IntoIterator<Item = Rational>>(it: I) -> Rational {
    it.into_iter().fold(Rational::zero(), |a, b| a + b)
}

/// (-1)^k as a rational sign.
pub fn alt_sign(k: usize) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn rat_abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_normalizes_sign_and_integers() {
        assert_eq!(rat_display(&rat(1, -2)), "-1/2");
        assert_eq!(rat_display(&rat(4, 2)), "2");
        assert_eq!(rat_display(&rat(0, 7)), "0");
    }

    #[test]
    fn json_shape_is_num_den() {
        let j = serde_json::to_string(&RatJson(rat(-2, 6))).unwrap();
        assert_eq!(j, r#"{"num":-1,"den":3}"#);
    }

    #[test]
    fn alternating_signs() {
        assert_eq!(alt_sign(0), rat_int(1));
        assert_eq!(alt_sign(3), rat_int(-1));
    }
}
