//! Outward-rounded interval arithmetic on fixed-point dyadic numbers.
//!
//! An [`Interval`] at precision `p` holds two big integers `lo <= hi` and
//! encloses every real in `[lo / 2^p, hi / 2^p]`. Every operation rounds the
//! lower end toward negative infinity and the upper end toward positive
//! infinity, so the true result of a computation on enclosed inputs is always
//! enclosed by the output. `ln` and `exp` are evaluated from their series
//! with explicit remainder bounds.
//!
//! Certification loops ([`certify`]) rerun a computation at doubling
//! precision until it yields a decision or a cap is hit.

use std::cmp::{max, min, Ordering};
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Starting precision (bits) for certification loops.
pub const START_PRECISION: u32 = 64;

/// Default precision cap (bits) for certification loops.
pub const DEFAULT_PRECISION_CAP: u32 = 1 << 16;

fn floor_shr(x: &BigInt, s: u64) -> BigInt {
    // BigInt's `>>` rounds toward negative infinity.
    x >> s
}

fn ceil_shr(x: &BigInt, s: u64) -> BigInt {
    -((-x) >> s)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Interval[{:e}, {:e}] @{}",
            self.lower_f64(),
            self.upper_f64(),
            self.prec
        )
    }
}

impl Interval {
    fn new(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi, prec }
    }

    pub fn from_integer(n: &BigInt, prec: u32) -> Self {
        let v = n << prec;
        Interval::new(v.clone(), v, prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Interval::from_integer(&BigInt::from(n), prec)
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let scaled = r.numer() << prec;
        let (q, rem) = scaled.div_mod_floor(r.denom());
        if rem.is_zero() {
            Interval::new(q.clone(), q, prec)
        } else {
            let hi = &q + 1;
            Interval::new(q, hi, prec)
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn lower(&self) -> Rational {
        Rational::new(self.lo.clone(), BigInt::one() << self.prec)
    }

    pub fn upper(&self) -> Rational {
        Rational::new(self.hi.clone(), BigInt::one() << self.prec)
    }

    pub fn lower_f64(&self) -> f64 {
        self.lower().to_f64().unwrap_or(f64::NAN)
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper().to_f64().unwrap_or(f64::NAN)
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((self.lower() + self.upper()) / Rational::from_integer(BigInt::from(2)))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Radius bound in units of `2^-prec`.
    pub fn width_ulps(&self) -> BigInt {
        &self.hi - &self.lo
    }

    /// Re-express at a different precision, rounding outward when coarsening.
    pub fn with_precision(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = prec - self.prec;
                Interval::new(&self.lo << s, &self.hi << s, prec)
            }
            Ordering::Less => {
                let s = (self.prec - prec) as u64;
                Interval::new(floor_shr(&self.lo, s), ceil_shr(&self.hi, s), prec)
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(k)` when every enclosed value has floor `k`.
    pub fn certified_floor(&self) -> Option<BigInt> {
        let a = floor_shr(&self.lo, self.prec as u64);
        let b = floor_shr(&self.hi, self.prec as u64);
        (a == b).then_some(a)
    }

    /// `Some(true)` if every enclosed value is `<= r`, `Some(false)` if every
    /// enclosed value is `> r`, `None` if undecided.
    pub fn compare_le(&self, r: &Rational) -> Option<bool> {
        if self.upper() <= *r {
            Some(true)
        } else if self.lower() > *r {
            Some(false)
        } else {
            None
        }
    }

    /// `Some(true)` if every enclosed value is `>= r`, `Some(false)` if every
    /// enclosed value is `< r`.
    pub fn compare_ge(&self, r: &Rational) -> Option<bool> {
        if self.lower() >= *r {
            Some(true)
        } else if self.upper() < *r {
            Some(false)
        } else {
            None
        }
    }

    fn check_prec(&self, other: &Interval) {
        assert_eq!(self.prec, other.prec, "interval precision mismatch");
    }

    pub fn add(&self, other: &Interval) -> Interval {
        self.check_prec(other);
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi, self.prec)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.check_prec(other);
        Interval::new(&self.lo - &other.hi, &self.hi - &other.lo, self.prec)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo, self.prec)
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        self.check_prec(other);
        let s = self.prec as u64;
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().expect("four products");
        let hi = products.iter().max().expect("four products");
        Interval::new(floor_shr(lo, s), ceil_shr(hi, s), self.prec)
    }

    pub fn square(&self) -> Interval {
        let s = self.prec as u64;
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        let hi = max(&a, &b).clone();
        let lo = if self.contains_zero() {
            BigInt::zero()
        } else {
            min(a, b)
        };
        Interval::new(floor_shr(&lo, s), ceil_shr(&hi, s), self.prec)
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        if k.is_negative() {
            Interval::new(&self.hi * k, &self.lo * k, self.prec)
        } else {
            Interval::new(&self.lo * k, &self.hi * k, self.prec)
        }
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, other: &Interval) -> Result<Interval> {
        self.check_prec(other);
        if other.contains_zero() {
            return Err(Error::InvalidArgument(
                "interval division by an enclosure of zero".into(),
            ));
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&self.lo, &self.hi] {
            let scaled = x << self.prec;
            for y in [&other.lo, &other.hi] {
                let f = scaled.div_floor(y);
                let c = -((-&scaled).div_floor(y));
                lo = Some(match lo {
                    Some(v) => min(v, f),
                    None => f,
                });
                hi = Some(match hi {
                    Some(v) => max(v, c),
                    None => c,
                });
            }
        }
        Ok(Interval::new(
            lo.expect("nonempty"),
            hi.expect("nonempty"),
            self.prec,
        ))
    }

    /// Division by a positive integer.
    pub fn div_int(&self, k: &BigInt) -> Interval {
        assert!(k.is_positive(), "div_int requires a positive divisor");
        Interval::new(
            self.lo.div_floor(k),
            -((-&self.hi).div_floor(k)),
            self.prec,
        )
    }

    fn magnitude(&self) -> BigInt {
        max(self.lo.abs(), self.hi.abs())
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> Result<Interval> {
        if !self.is_positive() {
            return Err(Error::InvalidArgument(
                "logarithm of a non-positive enclosure".into(),
            ));
        }
        let lo = ln_point(&self.lo, self.prec);
        let hi = if self.lo == self.hi {
            lo.clone()
        } else {
            ln_point(&self.hi, self.prec)
        };
        Ok(Interval::new(lo.lo, hi.hi, self.prec))
    }

    pub fn exp(&self) -> Interval {
        let lo = exp_point(&self.lo, self.prec);
        let hi = if self.lo == self.hi {
            lo.clone()
        } else {
            exp_point(&self.hi, self.prec)
        };
        let lo_end = if lo.lo.is_negative() {
            BigInt::zero()
        } else {
            lo.lo
        };
        Interval::new(lo_end, hi.hi, self.prec)
    }
}

fn guard_bits(prec: u32) -> u32 {
    32 + (32 - prec.leading_zeros())
}

/// Enclosure of `sum_{j>=0} z^(2j+1)/(2j+1)` for `0 <= z <= 1/3`.
fn atanh_series(z: &Interval) -> Interval {
    let prec = z.prec;
    let one_ulp = BigInt::one();
    let z2 = z.square();
    let mut power = z.clone();
    let mut sum = Interval::from_i64(0, prec);
    let mut j: u64 = 0;
    loop {
        let denom = BigInt::from(2 * j + 1);
        sum = sum.add(&power.div_int(&denom));
        power = power.mul(&z2);
        j += 1;
        if power.hi <= one_ulp {
            break;
        }
    }
    // Tail: sum_{m>=j} z^(2m+1)/(2m+1) <= power / ((2j+1)(1 - z^2)), z^2 <= 1/9.
    let tail = power.magnitude() * 9 / (8 * (2 * j + 1)) + 1;
    Interval::new(sum.lo, sum.hi + tail, prec)
}

fn ln2_at(prec: u32) -> Interval {
    let third = Interval::from_rational(&Rational::new(BigInt::one(), BigInt::from(3)), prec);
    atanh_series(&third).mul_int(&BigInt::from(2))
}

/// ln of the positive dyadic `a / 2^prec`, enclosed at precision `prec`.
fn ln_point(a: &BigInt, prec: u32) -> Interval {
    debug_assert!(a.is_positive());
    let wp = prec + guard_bits(prec);
    let bits = a.bits();
    // a / 2^prec = 2^e * f with f = a / 2^(bits-1) in [1, 2).
    let e = bits as i64 - 1 - prec as i64;
    let shift = wp as i64 - (bits as i64 - 1);
    let f = if shift >= 0 {
        let v = a << shift as u64;
        Interval::new(v.clone(), v, wp)
    } else {
        let v = floor_shr(a, (-shift) as u64);
        let hi = &v + 1;
        Interval::new(v, hi, wp)
    };
    let one = Interval::from_i64(1, wp);
    let z = f
        .sub(&one)
        .div(&f.add(&one))
        .expect("f + 1 >= 2 is positive");
    // z may dip just below 0 from rounding when f == 1.
    let z = Interval::new(max(z.lo, BigInt::zero()), z.hi, wp);
    let ln_f = atanh_series(&z).mul_int(&BigInt::from(2));
    let ln_a = ln2_at(wp).mul_int(&BigInt::from(e)).add(&ln_f);
    ln_a.with_precision(prec)
}

/// exp of the dyadic `a / 2^prec`, enclosed at precision `prec`.
fn exp_point(a: &BigInt, prec: u32) -> Interval {
    let int_part = a.abs() >> prec;
    let int_bits = int_part.bits() as u32;
    let base_wp = prec + guard_bits(prec);
    // Extra halvings shorten the Taylor series at the cost of squarings.
    let extra = (base_wp as f64).sqrt() as u32 / 2;
    let halvings = int_bits + 1 + extra;
    // Result magnitude up to e^|a| needs about 1.45 |a| more bits; squarings
    // double the relative error once each.
    let growth = if a.is_positive() {
        (int_part.to_u64().unwrap_or(u64::MAX / 4) + 1).saturating_mul(3) / 2
    } else {
        0
    };
    let wp = base_wp + halvings + growth.min(u32::MAX as u64 / 4) as u32 + 16;
    let t_fixed = a << (wp - prec - halvings);
    let t = Interval::new(t_fixed.clone(), t_fixed, wp);

    let mut sum = Interval::from_i64(1, wp);
    let mut term = Interval::from_i64(1, wp);
    let mut j: u64 = 1;
    loop {
        term = term.mul(&t).div_int(&BigInt::from(j));
        sum = sum.add(&term);
        j += 1;
        if term.magnitude() <= BigInt::one() {
            break;
        }
    }
    // |t| <= 1/2 bounds the remaining terms by the last one.
    let rem = term.magnitude() + 1;
    let mut result = Interval::new(&sum.lo - &rem, &sum.hi + &rem, wp);
    for _ in 0..halvings {
        result = result.square();
    }
    result.with_precision(prec)
}

/// Rerun `attempt` at doubling precision starting from [`START_PRECISION`]
/// until it returns `Some`, giving up beyond `cap` bits.
pub fn certify<T>(cap: u32, mut attempt: impl FnMut(u32) -> Option<T>) -> Result<(T, u32)> {
    let mut prec = START_PRECISION;
    loop {
        if let Some(v) = attempt(prec) {
            return Ok((v, prec));
        }
        if prec >= cap {
            return Err(Error::PrecisionExhausted { cap: cap as u64 });
        }
        prec = prec.saturating_mul(2).min(cap.max(START_PRECISION));
    }
}

/// Enclosure of `ln n` for a positive integer.
pub fn ln_integer(n: &BigInt, prec: u32) -> Result<Interval> {
    if n.sign() != Sign::Plus {
        return Err(Error::InvalidArgument(format!("ln of non-positive {n}")));
    }
    Interval::from_integer(n, prec).ln()
}
