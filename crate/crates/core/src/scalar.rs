//! Number systems the geometry is generic over.
//!
//! Everything in the tree, the matrices and the uplift regions is computed in a
//! [`Scalar`]: either an [`Exact`] rational, or a [`Real`] carrying its own
//! binary precision. Quantities that leave the field generated by the
//! parameters (square roots, logarithms) are always produced as [`Real`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::{Float, Integer, Rational};
use serde::{Serialize, Serializer};

use crate::error::Error;

/// Working precision used when nothing else is configured.
pub const DEFAULT_PRECISION: u32 = 256;

/// Field operations plus the few extras the geometry needs.
///
/// Constants are created from an existing value with [`Scalar::int`] so that a
/// [`Real`] constant inherits the precision of the value it is combined with.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Serialize
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// True for lossless arithmetic.
    const EXACT: bool;

    /// The integer `v` in the same number system (and precision) as `self`.
    fn int(&self, v: i64) -> Self;

    fn ratio(&self, num: i64, den: i64) -> Self {
        self.int(num) / self.int(den)
    }

    fn is_zero(&self) -> bool;

    /// Sign of `self` relative to zero.
    fn sign(&self) -> Ordering;

    fn abs(&self) -> Self;

    fn square(&self) -> Self {
        self.clone() * self
    }

    /// Square root inside the number system: `None` for negative input, and for
    /// exact values that are not perfect squares.
    fn sqrt_exact(&self) -> Option<Self>;

    fn to_real(&self, prec: u32) -> Real;

    /// A rational in the number system of `self`.
    fn from_rational(&self, r: &Rational) -> Self;

    /// Binary precision, `None` for exact values.
    fn precision(&self) -> Option<u32>;

    /// `self == other` for exact values; `|self - other| <= 2^(slack - p) |scale|`
    /// for reals of precision `p`.
    fn near(&self, other: &Self, scale: &Self, slack_bits: i32) -> bool;

    /// Lossless text form: `p/q` for rationals, every significant digit for reals.
    fn to_decimal(&self) -> String;

    /// Parses `s` into the number system of `self`.
    fn parse_like(&self, s: &str) -> Result<Self, Error>;

    /// Total order; scalars in this crate are never NaN.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("scalar comparison with NaN")
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

// ---------------------------------------------------------------------------
// Exact rationals

/// Lossless rational number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl Exact {
    pub fn from_int(v: i64) -> Self {
        Exact(Rational::from(v))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Exact(Rational::from((num, den)))
    }

    /// Parses integers, `p/q`, and plain decimals such as `-2.75` or `1.5e3`.
    pub fn parse(s: &str) -> Result<Self, Error> {
        parse_rational(s).map(Exact)
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }
}

fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if t.contains('/') {
        return Rational::parse(t).map(Rational::from).map_err(|_| bad());
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num = Integer::from_str_radix(if all.is_empty() { "0" } else { &all }, 10)
        .map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let shift = exponent - frac_part.len() as i32;
    let scale = Integer::from(Integer::u_pow_u(10, shift.unsigned_abs()));
    let mut q = Rational::from(num);
    if shift >= 0 {
        q *= scale;
    } else {
        q /= scale;
    }
    Ok(q)
}

impl Serialize for Exact {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        s.collect_str(&self.to_decimal())
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

macro_rules! exact_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Exact {
            type Output = Exact;
            fn $m(self, rhs: Exact) -> Exact {
                Exact($tr::$m(self.0, rhs.0))
            }
        }
        impl<'a> $tr<&'a Exact> for Exact {
            type Output = Exact;
            fn $m(self, rhs: &'a Exact) -> Exact {
                Exact($tr::$m(self.0, &rhs.0))
            }
        }
    };
}
exact_binop!(Add, add);
exact_binop!(Sub, sub);
exact_binop!(Mul, mul);
exact_binop!(Div, div);

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact(-self.0)
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn int(&self, v: i64) -> Self {
        Exact::from_int(v)
    }

    fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    fn sign(&self) -> Ordering {
        self.0.cmp0()
    }

    fn abs(&self) -> Self {
        Exact(self.0.clone().abs())
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.0.cmp0() == Ordering::Less {
            return None;
        }
        let (n, d) = (self.0.numer(), self.0.denom());
        if n.is_perfect_square() && d.is_perfect_square() {
            Some(Exact(Rational::from((n.clone().sqrt(), d.clone().sqrt()))))
        } else {
            None
        }
    }

    fn to_real(&self, prec: u32) -> Real {
        Real(Float::with_val(prec, &self.0))
    }

    fn from_rational(&self, r: &Rational) -> Self {
        Exact(r.clone())
    }

    fn precision(&self) -> Option<u32> {
        None
    }

    fn near(&self, other: &Self, _scale: &Self, _slack_bits: i32) -> bool {
        self == other
    }

    fn to_decimal(&self) -> String {
        self.0.to_string()
    }

    fn parse_like(&self, s: &str) -> Result<Self, Error> {
        Exact::parse(s)
    }
}

// ---------------------------------------------------------------------------
// Reals

/// Binary floating point number with its own precision (MPFR, round to nearest).
///
/// Binary operations produce the larger of the two operand precisions.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Real(pub Float);

impl Real {
    pub fn from_int(v: i64, prec: u32) -> Self {
        Real(Float::with_val(prec, v))
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        Real(Float::with_val(prec, v))
    }

    pub fn parse(s: &str, prec: u32) -> Result<Self, Error> {
        let parsed = Float::parse(s.trim())
            .map_err(|_| Error::Parse(format!("not a real number: {s:?}")))?;
        Ok(Real(Float::with_val(prec, parsed)))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Real(Float::with_val(prec, &self.0))
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.clone().sqrt())
    }

    pub fn ln(&self) -> Self {
        Real(self.0.clone().ln())
    }

    pub fn exp(&self) -> Self {
        Real(self.0.clone().exp())
    }

    pub fn recip(&self) -> Self {
        Real(self.0.clone().recip())
    }

    /// `2^e` at precision `prec`.
    pub fn pow2(e: i32, prec: u32) -> Self {
        Real(Float::with_val(prec, Float::i_exp(1, e)))
    }

    pub fn floor_integer(&self) -> Integer {
        self.0
            .to_integer_round(Round::Down)
            .map(|(i, _)| i)
            .expect("floor of a non-finite real")
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// Binary exponent (`self = m 2^e` with `1/2 <= |m| < 1`), `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    /// `|self - other| / max(|self|, |other|)`, zero when both are zero.
    pub fn rel_diff(&self, other: &Real) -> Real {
        let diff = (self.clone() - other).abs();
        let scale = self.abs().max_of(other.abs());
        if scale.is_zero() {
            diff
        } else {
            diff / &scale
        }
    }
}

impl Serialize for Real {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        s.collect_str(&self.to_decimal())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $assign:ident, $am:ident) => {
        impl $tr for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                $tr::$m(self, &rhs)
            }
        }
        impl<'a> $tr<&'a Real> for Real {
            type Output = Real;
            fn $m(mut self, rhs: &'a Real) -> Real {
                if self.0.prec() >= rhs.0.prec() {
                    std::ops::$assign::$am(&mut self.0, &rhs.0);
                    self
                } else {
                    Real(Float::with_val(rhs.0.prec(), $tr::$m(&self.0, &rhs.0)))
                }
            }
        }
    };
}
real_binop!(Add, add, AddAssign, add_assign);
real_binop!(Sub, sub, SubAssign, sub_assign);
real_binop!(Mul, mul, MulAssign, mul_assign);
real_binop!(Div, div, DivAssign, div_assign);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Scalar for Real {
    const EXACT: bool = false;

    fn int(&self, v: i64) -> Self {
        Real::from_int(v, self.prec())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn sign(&self) -> Ordering {
        self.0.cmp0().expect("sign of NaN")
    }

    fn abs(&self) -> Self {
        Real(self.0.clone().abs())
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.0.cmp0() == Some(Ordering::Less) {
            None
        } else {
            Some(self.sqrt())
        }
    }

    fn to_real(&self, prec: u32) -> Real {
        self.with_prec(prec)
    }

    fn from_rational(&self, r: &Rational) -> Self {
        Real(Float::with_val(self.prec(), r))
    }

    fn precision(&self) -> Option<u32> {
        Some(self.prec())
    }

    fn near(&self, other: &Self, scale: &Self, slack_bits: i32) -> bool {
        let prec = self.prec().max(other.prec()) as i32;
        let tol = Real::pow2(slack_bits - prec, prec as u32) * &scale.abs();
        (self.clone() - other).abs() <= tol
    }

    fn to_decimal(&self) -> String {
        self.0.to_string()
    }

    fn parse_like(&self, s: &str) -> Result<Self, Error> {
        Real::parse(s, self.prec())
    }
}

// ---------------------------------------------------------------------------
// Quadratic surds

/// Compares `d` with `s1·√p + s2·√q` (signs in `{-1, 0, 1}`, radicands `>= 0`)
/// using only field operations, so the verdict is exact for [`Exact`] inputs.
pub fn cmp_with_sqrts<S: Scalar>(d: &S, s1: i32, p: &S, s2: i32, q: &S) -> Ordering {
    // Normalise to the forms d ? √p + √q, d ? √p − √q, d ? ±√p.
    match (s1.signum(), s2.signum()) {
        (0, 0) => d.sign(),
        (0, s) => cmp_with_sqrts(d, s, q, 0, p),
        (s, 0) => {
            // d ? s√p
            if s > 0 {
                if d.sign() == Ordering::Less {
                    Ordering::Less
                } else {
                    d.square().total_cmp(p)
                }
            } else {
                cmp_with_sqrts(&-d.clone(), 1, p, 0, q).reverse()
            }
        }
        (1, 1) => {
            if d.sign() == Ordering::Less {
                return Ordering::Less;
            }
            // d² ? p + q + 2√(pq)
            let e = d.square() - p - q;
            if e.sign() == Ordering::Less {
                return Ordering::Less;
            }
            let four_pq = p.int(4) * p * q;
            e.square().total_cmp(&four_pq)
        }
        (-1, -1) => cmp_with_sqrts(&-d.clone(), 1, p, 1, q).reverse(),
        (1, -1) => cmp_sqrt_diff(d, p, q),
        (-1, 1) => cmp_sqrt_diff(d, q, p),
        _ => unreachable!(),
    }
}

// d ? √p − √q
fn cmp_sqrt_diff<S: Scalar>(d: &S, p: &S, q: &S) -> Ordering {
    if d.sign() == Ordering::Less {
        // d ? √p − √q  <=>  −d ? √q − √p, reversed
        return cmp_sqrt_diff(&-d.clone(), q, p).reverse();
    }
    // d >= 0: d + √q ? √p, both sides non-negative.
    // d² + q + 2d√q ? p  <=>  2d√q ? p − q − d²
    let e = p.clone() - q - &d.square();
    if e.sign() == Ordering::Less {
        return Ordering::Greater;
    }
    let lhs = d.int(4) * &d.square() * q;
    lhs.total_cmp(&e.square())
}
