//! Real scalars for the analytic code.
//!
//! Everything numeric in [`crate::rademacher`] and [`crate::distrib`] is
//! generic over [`Real`]. Two implementations exist: `f64`, used for the
//! long tails of convergent sums, and [`BigReal`], a binary floating-point
//! number of caller-chosen precision backed by `astro-float`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, Sign as BigSign};
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: usize = Word::BITS as usize;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// A real field with the elementary functions needed by the coefficient formulas.
///
/// `bits` arguments set the precision of newly created values; `f64` ignores them.
/// Binary operations on [`BigReal`] keep the larger of the two precisions.
pub trait Real:
    Clone + fmt::Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Precision in bits of this value.
    fn bits(&self) -> usize;
    fn from_i64(n: i64, bits: usize) -> Self;
    fn from_f64(x: f64, bits: usize) -> Self;
    fn from_bigint(n: &BigInt, bits: usize) -> Self;
    fn pi(bits: usize) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn abs(&self) -> Self;
    /// `self * 2^k`.
    fn ldexp(&self, k: i64) -> Self;
    /// Nearest integer, ties away from zero.
    fn round_to_bigint(&self) -> BigInt;

    fn from_ratio(p: i64, q: i64, bits: usize) -> Self {
        Self::from_i64(p, bits) / Self::from_i64(q, bits)
    }

    /// `2^-bits` at precision `bits`.
    fn epsilon(bits: usize) -> Self {
        Self::from_i64(1, bits).ldexp(-(bits as i64))
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::from_i64(1, self.bits());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        acc
    }

    /// `self^(p/q)` for positive `self`.
    fn pow_ratio(&self, p: i64, q: i64) -> Self {
        let bits = self.bits();
        (self.ln() * Self::from_ratio(p, q, bits)).exp()
    }
}

impl Real for f64 {
    fn bits(&self) -> usize {
        53
    }
    fn from_i64(n: i64, _: usize) -> Self {
        n as f64
    }
    fn from_f64(x: f64, _: usize) -> Self {
        x
    }
    fn from_bigint(n: &BigInt, _: usize) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
    fn pi(_: usize) -> Self {
        std::f64::consts::PI
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn ldexp(&self, k: i64) -> Self {
        self * 2f64.powi(k as i32)
    }
    fn round_to_bigint(&self) -> BigInt {
        let r = self.round();
        num_traits::FromPrimitive::from_f64(r).unwrap_or_default()
    }
}

/// Arbitrary-precision binary float.
#[derive(Clone)]
pub struct BigReal(BigFloat);

impl BigReal {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    fn prec(&self) -> usize {
        self.0.mantissa_max_bit_len().unwrap_or(WORD_BITS)
    }

    fn joint(&self, other: &Self) -> usize {
        self.prec().max(other.prec())
    }

    fn checked(v: BigFloat) -> Self {
        debug_assert!(!v.is_nan(), "BigReal operation produced NaN: {:?}", v.err());
        BigReal(v)
    }

    /// Returns `(m, k)` with `self = m * 2^k` exactly.
    pub fn to_mantissa_exponent(&self) -> (BigInt, i64) {
        match self.0.as_raw_parts() {
            None => (BigInt::zero(), 0),
            Some((words, _, sign, exponent, _)) => {
                let mut digits: Vec<u32> = Vec::with_capacity(words.len() * 2);
                for w in words {
                    let w = *w as u64;
                    digits.push(w as u32);
                    digits.push((w >> 32) as u32);
                }
                let s = if sign == Sign::Neg { BigSign::Minus } else { BigSign::Plus };
                let m = BigInt::from_slice(s, &digits);
                if m.is_zero() {
                    return (m, 0);
                }
                (m, exponent as i64 - (words.len() * WORD_BITS) as i64)
            }
        }
    }

    /// Decimal rendering with `digits` digits after the point.
    pub fn to_fixed(&self, digits: usize) -> String {
        let scaled = self.clone() * BigReal::from_bigint(&BigInt::from(10).pow(digits as u32), self.prec());
        let n = scaled.round_to_bigint();
        let neg = n.is_negative();
        let s = n.abs().to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl Add for BigReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let p = self.joint(&rhs);
        Self::checked(self.0.add(&rhs.0, p, RM))
    }
}

impl Sub for BigReal {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let p = self.joint(&rhs);
        Self::checked(self.0.sub(&rhs.0, p, RM))
    }
}

impl Mul for BigReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let p = self.joint(&rhs);
        Self::checked(self.0.mul(&rhs.0, p, RM))
    }
}

impl Div for BigReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let p = self.joint(&rhs);
        Self::checked(self.0.div(&rhs.0, p, RM))
    }
}

impl Rem for BigReal {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        Self::checked(self.0.rem(&rhs.0))
    }
}

impl Neg for BigReal {
    type Output = Self;
    fn neg(self) -> Self {
        BigReal(self.0.neg())
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal(BigFloat::from_i64(0, WORD_BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal(BigFloat::from_i64(1, WORD_BITS))
    }
}

impl Num for BigReal {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        let bits = (s.len() as f64 * 3.33) as usize + 2 * WORD_BITS;
        let v = with_consts(|cc| BigFloat::parse(s, astro_float::Radix::Dec, bits, RM, cc));
        if v.is_nan() {
            Err(format!("not a number: {s}"))
        } else {
            Ok(BigReal(v))
        }
    }
}

impl Real for BigReal {
    fn bits(&self) -> usize {
        self.prec()
    }
    fn from_i64(n: i64, bits: usize) -> Self {
        BigReal(BigFloat::from_i64(n, bits.max(WORD_BITS)))
    }
    fn from_f64(x: f64, bits: usize) -> Self {
        BigReal(BigFloat::from_f64(x, bits.max(WORD_BITS)))
    }
    fn from_bigint(n: &BigInt, bits: usize) -> Self {
        let bits = bits.max(n.bits() as usize).max(WORD_BITS);
        let (sign, digits) = n.to_u64_digits();
        let base = BigFloat::from_u64(1, bits).mul(&BigFloat::from_u64(1 << 32, bits), bits, RM);
        let base = base.mul(&BigFloat::from_u64(1 << 32, bits), bits, RM);
        let mut acc = BigFloat::from_u64(0, bits);
        for d in digits.iter().rev() {
            acc = acc.mul(&base, bits, RM).add(&BigFloat::from_u64(*d, bits), bits, RM);
        }
        if sign == BigSign::Minus {
            acc = acc.neg();
        }
        BigReal(acc)
    }
    fn pi(bits: usize) -> Self {
        BigReal(with_consts(|cc| cc.pi(bits.max(WORD_BITS), RM)))
    }
    fn to_f64(&self) -> f64 {
        let (m, k) = self.to_mantissa_exponent();
        if m.is_zero() {
            return 0.0;
        }
        let shift = m.bits() as i64 - 64;
        let (top, k) = if shift > 0 { (&m >> shift as usize, k + shift) } else { (m, k) };
        top.to_f64().unwrap_or(f64::NAN) * 2f64.powi(k.clamp(-2000, 2000) as i32)
    }
    fn sqrt(&self) -> Self {
        Self::checked(self.0.sqrt(self.prec(), RM))
    }
    fn exp(&self) -> Self {
        let p = self.prec();
        Self::checked(with_consts(|cc| self.0.exp(p, RM, cc)))
    }
    fn ln(&self) -> Self {
        let p = self.prec();
        Self::checked(with_consts(|cc| self.0.ln(p, RM, cc)))
    }
    fn sin(&self) -> Self {
        let p = self.prec();
        Self::checked(with_consts(|cc| self.0.sin(p, RM, cc)))
    }
    fn cos(&self) -> Self {
        let p = self.prec();
        Self::checked(with_consts(|cc| self.0.cos(p, RM, cc)))
    }
    fn abs(&self) -> Self {
        BigReal(self.0.abs())
    }
    fn ldexp(&self, k: i64) -> Self {
        if self.0.is_zero() {
            return self.clone();
        }
        let mut v = self.0.clone();
        let e = v.exponent().unwrap_or(0) as i64 + k;
        v.set_exponent(e as astro_float::Exponent);
        BigReal(v)
    }
    fn round_to_bigint(&self) -> BigInt {
        let (m, k) = self.to_mantissa_exponent();
        if k >= 0 {
            return m << k as usize;
        }
        let s = (-k) as usize;
        let neg = m.is_negative();
        let a = m.abs();
        let half = BigInt::one() << (s - 1);
        let r = (a + half) >> s;
        if neg {
            -r
        } else {
            r
        }
    }
}
