//! Exact rational arithmetic over checked `i128`.
//!
//! Every quantity in the edgepath pipeline (coordinates, path lengths, Euler
//! numbers, twists, slopes) is rational with small denominators, so `i128`
//! has enormous headroom. All operations use checked arithmetic and panic on
//! overflow: wrapping would silently corrupt slopes, and there is no
//! legitimate input that gets anywhere near the limits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use crate::error::Error;

/// A rational number in canonical form: `den >= 1` and `gcd(num, den) == 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a.rem_euclid(b));
    }
    a
}

#[inline]
fn mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("rational overflow")
}

#[inline]
fn add(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("rational overflow")
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Canonicalizes on construction. Panics on a zero denominator: that is
    /// always a programming error, never a data condition.
    pub fn new(num: i128, den: i128) -> Rational {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num, den).checked_abs().expect("rational overflow");
        let (num, den) = (num / g, den / g);
        if den < 0 {
            Rational {
                num: num.checked_neg().expect("rational overflow"),
                den: den.checked_neg().expect("rational overflow"),
            }
        } else {
            Rational { num, den }
        }
    }

    pub const fn from_int(n: i128) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn numer(self) -> i128 {
        self.num
    }

    /// Always >= 1.
    pub fn denom(self) -> i128 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn is_positive(self) -> bool {
        self.num > 0
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn signum(self) -> i128 {
        self.num.signum()
    }

    pub fn abs(self) -> Rational {
        Rational { num: self.num.abs(), den: self.den }
    }

    pub fn recip(self) -> Rational {
        assert!(self.num != 0, "reciprocal of zero");
        Rational::new(self.den, self.num)
    }

    /// Largest integer `<= self` (true mathematical floor, also for negatives).
    pub fn floor(self) -> i128 {
        self.num.div_euclid(self.den)
    }

    pub fn ceil(self) -> i128 {
        -(-self).floor()
    }

    /// Fractional part in `[0, 1)`: `self - floor(self)`.
    pub fn frac(self) -> Rational {
        self - Rational::from_int(self.floor())
    }

    pub fn min(self, other: Rational) -> Rational {
        if self <= other { self } else { other }
    }

    pub fn max(self, other: Rational) -> Rational {
        if self >= other { self } else { other }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    /// Cross-multiplication; denominators are positive by canonical form.
    /// (A derived lexicographic `Ord` on the fields would be wrong.)
    fn cmp(&self, other: &Rational) -> Ordering {
        mul(self.num, other.den).cmp(&mul(other.num, self.den))
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational::new(add(mul(self.num, rhs.den), mul(rhs.num, self.den)), mul(self.den, rhs.den))
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        self + (-rhs)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational::new(mul(self.num, rhs.num), mul(self.den, rhs.den))
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        self * rhs.recip()
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = *self + rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = *self - rhs;
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"p"` or `"p/q"` with optional sign on either part.
    fn from_str(s: &str) -> Result<Rational, Error> {
        let bad = || Error::Parse(format!("invalid rational {s:?}"));
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num: i128 = n.parse().map_err(|_| bad())?;
        let den: i128 = match d {
            Some(d) => d.parse().map_err(|_| bad())?,
            None => 1,
        };
        if den == 0 {
            return Err(bad());
        }
        Ok(Rational::new(num, den))
    }
}

/// Shorthand used pervasively in tests and internal tables.
pub fn rat(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}
