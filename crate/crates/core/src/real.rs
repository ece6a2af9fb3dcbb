//! Binary floating point with a configurable mantissa width.
//!
//! Only the transcendental side of the crate lives here: `exp`, `ln` and
//! `sqrt` for bounds such as `V(a)` or `e^{-d^3/M^2}`. Probabilities and LP
//! values never pass through this type except for comparison against such
//! bounds. A value is `mant * 2^exp`; results are rounded to nearest at
//! `prec` bits, with wider internal working precision for series.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{format_decimal, Rational};

pub const DEFAULT_PRECISION: u32 = 256;

const GUARD_BITS: u32 = 64;

#[derive(Clone, Debug)]
pub struct Real {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl Real {
    pub fn zero(prec: u32) -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn from_int(value: impl Into<BigInt>, prec: u32) -> Self {
        Self::normalized(value.into(), 0, prec)
    }

    /// Nearest `prec`-bit value to an exact rational.
    pub fn from_rational(value: &Rational, prec: u32) -> Self {
        if value.is_zero() {
            return Self::zero(prec);
        }
        let num = value.numer();
        let den = value.denom();
        // Quotient with prec + 2 significant bits before final rounding.
        let shift = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let shift = shift.max(0);
        let (q, r) = (num.abs() << shift as usize).div_rem(den);
        // Sticky bit keeps round-to-nearest honest on truncated quotients.
        let q = (q << 1usize) + u32::from(!r.is_zero());
        let q = if num.is_negative() { -q } else { q };
        Self::normalized(q, -shift - 1, prec)
    }

    fn normalized(mant: BigInt, exp: i64, prec: u32) -> Self {
        let bits = mant.bits();
        if bits <= prec as u64 {
            return Self { mant, exp, prec };
        }
        let drop = bits - prec as u64;
        let negative = mant.is_negative();
        let mag = mant.abs();
        let half = BigInt::one() << (drop - 1) as usize;
        let mut rounded = (mag + half) >> drop as usize;
        let mut exp = exp + drop as i64;
        if rounded.bits() > prec as u64 {
            rounded >>= 1usize;
            exp += 1;
        }
        let mant = if negative { -rounded } else { rounded };
        Self { mant, exp, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(&self, prec: u32) -> Self {
        Self::normalized(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Exact dyadic value.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as usize)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Keep 64 bits of mantissa, fold the rest into the exponent.
        let bits = self.mant.bits() as i64;
        let drop = (bits - 64).max(0);
        let top = (&self.mant >> drop as usize).to_f64().unwrap_or(0.0);
        let e = self.exp + drop;
        let e = e.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        top * pow2(e)
    }

    /// Rounded to `sig` significant decimal digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        format_decimal(&self.to_rational(), sig)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            self.mant.div_floor(&(BigInt::one() << (-self.exp) as usize))
        }
    }

    fn top_bit(&self) -> i64 {
        self.mant.bits() as i64 + self.exp
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -&self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if other.is_zero() {
            return self.with_precision(prec);
        }
        if self.is_zero() {
            return other.with_precision(prec);
        }
        // A summand below the rounding unit of the other cannot change it
        // except through the sticky bit, which we approximate by one ulp-fraction.
        let gap = prec as i64 + 4;
        if self.top_bit() - other.top_bit() > gap {
            return Self::sticky_add(self, other.signum(), prec);
        }
        if other.top_bit() - self.top_bit() > gap {
            return Self::sticky_add(other, self.signum(), prec);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Self::normalized(a + b, e, prec)
    }

    fn sticky_add(big: &Self, tiny_sign: i32, prec: u32) -> Self {
        let shift = (prec as i64 + 8 - big.mant.bits() as i64).max(0) as usize;
        let mant = (&big.mant << shift) * 2 + BigInt::from(tiny_sign);
        Self::normalized(mant, big.exp - shift as i64 - 1, prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        Self::normalized(&self.mant * &other.mant, self.exp + other.exp, prec)
    }

    /// Panics on division by zero.
    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return Self::zero(prec);
        }
        let shift = (prec as i64 + 2 + other.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let negative = self.is_negative() != other.is_negative();
        let (q, r) = (self.mant.abs() << shift as usize).div_rem(&other.mant.abs());
        let q = (q << 1usize) + u32::from(!r.is_zero());
        let q = if negative { -q } else { q };
        Self::normalized(q, self.exp - shift - other.exp - 1, prec)
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        self.mul(&Self::from_rational(r, self.prec))
    }

    pub fn recip(&self) -> Self {
        Self::from_int(1, self.prec).div(self)
    }

    /// Square root; panics on negative input.
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative number");
        if self.is_zero() {
            return self.clone();
        }
        let want = 2 * (self.prec as i64 + 2);
        let mut shift = (want - self.mant.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = &self.mant << shift as usize;
        let root = scaled.sqrt();
        let sticky = if &root * &root == scaled { 0 } else { 1 };
        let root = root * 2 + BigInt::from(sticky);
        Self::normalized(root, (self.exp - shift) / 2 - 1, self.prec)
    }

    /// Natural logarithm; panics on non-positive input.
    pub fn ln(&self) -> Self {
        assert!(self.signum() > 0, "logarithm of a non-positive number");
        let w = self.prec + GUARD_BITS;
        let one = BigInt::one() << w as usize;
        // self = m * 2^e with m in [1, 2) as a w-bit fixed point number.
        let bits = self.mant.bits() as i64;
        let mut e = self.exp + bits - 1;
        let mut m = shift_signed(&self.mant, w as i64 - (bits - 1));
        // Move m into [1/sqrt2, sqrt2) so the atanh argument stays small.
        let sqrt2 = fixed_sqrt2(w);
        if m > sqrt2 {
            m >>= 1usize;
            e += 1;
        }
        let t = ((&m - &one) << w as usize) / (&m + &one);
        let ln_m = atanh_fixed(&t, w) << 1usize;
        let ln2 = fixed_ln2(w);
        let total = ln2 * e + ln_m;
        Self::normalized(total, -(w as i64), self.prec)
    }

    /// Exponential; panics if the result exponent would not fit in `i64`.
    pub fn exp(&self) -> Self {
        let prec = self.prec;
        if self.is_zero() {
            return Self::from_int(1, prec);
        }
        assert!(self.top_bit() < 60, "exponent argument too large");
        let w = prec + GUARD_BITS + 16;
        let one = BigInt::one() << w as usize;
        let x = shift_signed(&self.mant, self.exp + w as i64);
        let ln2 = fixed_ln2(w);
        // x = k ln2 + r with |r| <= ln2 / 2
        let k = {
            let twice = (&x << 1usize) + &ln2;
            twice.div_floor(&(&ln2 << 1usize))
        };
        let r = x - &k * &ln2;
        const HALVINGS: usize = 12;
        let r = r >> HALVINGS;
        let mut sum = one.clone();
        let mut term = one.clone();
        let mut i = 1u32;
        loop {
            term = ((&term * &r) >> w as usize) / i;
            if term.is_zero() {
                break;
            }
            sum += &term;
            i += 1;
        }
        for _ in 0..HALVINGS {
            sum = (&sum * &sum) >> w as usize;
        }
        let k = k.to_i64().expect("exponent fits in i64");
        Self::normalized(sum, k - w as i64, prec)
    }

    /// `self^y = exp(y ln self)` for positive `self`.
    pub fn powf(&self, y: &Self) -> Self {
        self.ln().mul(y).exp()
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn cmp_rational(&self, other: &Rational) -> Ordering {
        self.to_rational().cmp(other)
    }
}

fn pow2(e: i32) -> f64 {
    let mut v = 1.0f64;
    let step = if e >= 0 { 2.0 } else { 0.5 };
    let mut left = e.unsigned_abs().min(2200);
    // Chunk to avoid overflow in intermediate powers.
    while left > 0 {
        let chunk = left.min(60);
        let mut f = 1.0;
        for _ in 0..chunk {
            f *= step;
        }
        v *= f;
        left -= chunk;
    }
    v
}

fn shift_signed(v: &BigInt, by: i64) -> BigInt {
    if by >= 0 {
        v << by as usize
    } else {
        v >> (-by) as usize
    }
}

/// `atanh(t)` for fixed-point `|t| < 1/2` at `w` fractional bits.
fn atanh_fixed(t: &BigInt, w: u32) -> BigInt {
    let t2 = (t * t) >> w as usize;
    let mut power = t.clone();
    let mut sum = t.clone();
    let mut denom = 1u64;
    loop {
        power = (&power * &t2) >> w as usize;
        denom += 2;
        let term = &power / denom;
        if term.is_zero() {
            break;
        }
        sum += term;
    }
    sum
}

fn fixed_ln2(w: u32) -> BigInt {
    // ln 2 = 2 atanh(1/3)
    let third = (BigInt::one() << w as usize) / 3;
    atanh_fixed(&third, w) << 1usize
}

fn fixed_sqrt2(w: u32) -> BigInt {
    (BigInt::from(2) << (2 * w) as usize).sqrt()
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        a.cmp(&b)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(30);
        f.write_str(&self.to_decimal(sig))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    const P: u32 = DEFAULT_PRECISION;

    fn r(n: i64, d: i64) -> Real {
        Real::from_rational(&rat(n, d), P)
    }

    fn close(a: &Real, b: &Real, rel_bits: i64) -> bool {
        let diff = a.sub(b).abs();
        if diff.is_zero() {
            return true;
        }
        let scale = a.abs().max(b.abs());
        diff.top_bit() <= scale.top_bit() - rel_bits
    }

    #[test]
    fn known_constants() {
        let e = Real::from_int(1, P).exp();
        assert_eq!(
            e.to_decimal(40),
            "2.718281828459045235360287471352662497757"
        );
        let ln2 = Real::from_int(2, P).ln();
        assert_eq!(ln2.to_decimal(40), "0.6931471805599453094172321214581765680755");
        let sqrt2 = Real::from_int(2, P).sqrt();
        assert_eq!(sqrt2.to_decimal(40), "1.41421356237309504880168872420969807857");
        let ln10 = Real::from_int(10, P).ln();
        assert_eq!(ln10.to_decimal(30), "2.30258509299404568401799145468");
    }

    #[test]
    fn exp_ln_round_trip() {
        for (n, d) in [(1, 3), (-7, 2), (100, 1), (-250, 3), (1, 1_000_000), (12, 1)] {
            let x = r(n, d);
            assert!(close(&x.exp().ln(), &x, 220), "{n}/{d}");
        }
        for (n, d) in [(1, 7), (5, 1), (123456789, 1000), (1, 1 << 40)] {
            let x = r(n, d);
            assert!(close(&x.ln().exp(), &x, 240), "{n}/{d}");
        }
    }

    #[test]
    fn arithmetic_is_close_to_exact() {
        let a = r(1, 3);
        let b = r(2, 7);
        assert!(close(&a.add(&b), &r(13, 21), 250));
        assert!(close(&a.sub(&b), &r(1, 21), 245));
        assert!(close(&a.mul(&b), &r(2, 21), 250));
        assert!(close(&a.div(&b), &r(7, 6), 250));
        assert!(close(&r(9, 4).sqrt(), &r(3, 2), 250));
        assert_eq!(r(9, 4).sqrt(), r(3, 2));
        assert_eq!(r(3, 2).floor(), BigInt::from(1));
        assert_eq!(r(-3, 2).floor(), BigInt::from(-2));
    }

    #[test]
    fn ordering_and_conversion() {
        assert!(r(1, 3) < r(1, 2));
        assert!(r(-1, 3) > r(-1, 2));
        assert_eq!(Real::from_rational(&int(5), P).to_rational(), int(5));
        assert!((r(1, 3).to_f64() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(r(1, 2).cmp_rational(&rat(1, 3)), Ordering::Greater);
        assert_eq!(r(-5, 2).to_decimal(5), "-2.5");
    }

    #[test]
    fn tiny_summands() {
        let big = Real::from_int(1, 64);
        let tiny = Real::from_rational(&Rational::new(BigInt::one(), BigInt::one() << 300usize), 64);
        assert_eq!(big.add(&tiny).to_decimal(10), "1");
        assert!(big.add(&tiny) >= big);
        assert!(big.sub(&tiny) <= big);
    }
}
