//! The affine maps `tau_{r,s}(x) = r x + s` on rationals and on digit
//! streams.
//!
//! A digit stream only ever reveals a prefix, so the digits of `r x + s` are
//! found by enclosing `x` between the values of its prefix and the prefix
//! bumped by one unit in the last place, mapping both ends, and widening the
//! prefix until the two images agree on the requested digits.

use std::fmt;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::construction::{self, ConstructedQ};
use crate::error::{Error, Result};
use crate::rational::{frac, Rational};
use crate::series::{scan_limit, BasicSequence, DigitPrefix, Position, SCAN_LIMIT};

/// Initial lookahead when resolving a transformed digit.
pub const INITIAL_LOOKAHEAD: u64 = 8;
/// Default cap on the lookahead.
pub const DEFAULT_LOOKAHEAD_CAP: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Rational(Rational),
    Eta,
    Theta { seed: u64 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Rational(x) => write!(f, "rational:{}", crate::rational::render(x)),
            Provenance::Eta => write!(f, "eta"),
            Provenance::Theta { seed } => write!(f, "theta:{seed}"),
        }
    }
}

/// A real number known through its Cantor digits.
pub trait DigitOracle: Send + Sync {
    fn digit_at(&self, n: &Position) -> Result<BigUint>;

    fn base_at(&self, n: &Position) -> Result<BigUint>;

    /// `E_0`.
    fn integer_part(&self) -> BigInt {
        BigInt::zero()
    }

    fn provenance(&self) -> Provenance;

    fn prefix(&self, start: &Position, len: usize) -> Result<DigitPrefix> {
        let mut digits = Vec::with_capacity(len);
        let mut bases = Vec::with_capacity(len);
        let mut n = start.clone();
        for _ in 0..len {
            digits.push(self.digit_at(&n)?);
            bases.push(self.base_at(&n)?);
            n += 1u32;
        }
        DigitPrefix::new(start.clone(), digits, bases)
    }
}

/// Digits of a rational over any basic sequence, computed sequentially and
/// cached.
pub struct RationalDigits<Q> {
    x: Rational,
    q: Q,
    state: Mutex<RationalState>,
}

struct RationalState {
    digits: Vec<BigUint>,
    bases: Vec<BigUint>,
    // Numerator of T_{Q,len}(x) over x's denominator.
    rem: BigUint,
}

impl<Q: BasicSequence> RationalDigits<Q> {
    pub fn new(x: Rational, q: Q) -> Self {
        let rem = frac(&x).numer().to_biguint().expect("fractional part >= 0");
        RationalDigits {
            x,
            q,
            state: Mutex::new(RationalState {
                digits: Vec::new(),
                bases: Vec::new(),
                rem,
            }),
        }
    }

    pub fn value(&self) -> &Rational {
        &self.x
    }

    fn ensure(&self, len: u64) -> Result<std::sync::MutexGuard<'_, RationalState>> {
        let mut st = self.state.lock().expect("digit cache lock");
        let have = st.digits.len() as u64;
        if have < len {
            let den = self.x.denom().to_biguint().expect("positive denominator");
            let more = (len - have) as usize;
            let bases = self.q.bases(&BigUint::from(have + 1), more);
            for b in bases {
                let (d, r) = (&st.rem * &b).div_rem(&den);
                st.rem = r;
                st.digits.push(d);
                st.bases.push(b);
            }
        }
        Ok(st)
    }
}

impl<Q: BasicSequence> DigitOracle for RationalDigits<Q> {
    fn digit_at(&self, n: &Position) -> Result<BigUint> {
        crate::series::check_position(n)?;
        let k = scan_limit(n, SCAN_LIMIT)?;
        Ok(self.ensure(k)?.digits[(k - 1) as usize].clone())
    }

    fn base_at(&self, n: &Position) -> Result<BigUint> {
        crate::series::check_position(n)?;
        Ok(self.q.base_at(n))
    }

    fn integer_part(&self) -> BigInt {
        self.x.floor().to_integer()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Rational(self.x.clone())
    }

    fn prefix(&self, start: &Position, len: usize) -> Result<DigitPrefix> {
        crate::series::check_position(start)?;
        if len == 0 {
            return DigitPrefix::new(start.clone(), vec![], vec![]);
        }
        let first = scan_limit(start, SCAN_LIMIT)?;
        let last = first + len as u64 - 1;
        scan_limit(&BigUint::from(last), SCAN_LIMIT)?;
        let st = self.ensure(last)?;
        let range = (first - 1) as usize..last as usize;
        DigitPrefix::new(
            start.clone(),
            st.digits[range.clone()].to_vec(),
            st.bases[range].to_vec(),
        )
    }
}

/// Digits of `eta` over the constructed basic sequence.
#[derive(Debug, Clone, Copy, Default)]
pub struct EtaDigits;

impl DigitOracle for EtaDigits {
    fn digit_at(&self, n: &Position) -> Result<BigUint> {
        construction::eta_digit(n)
    }

    fn base_at(&self, n: &Position) -> Result<BigUint> {
        construction::base_at(n)
    }

    fn provenance(&self) -> Provenance {
        Provenance::Eta
    }

    fn prefix(&self, start: &Position, len: usize) -> Result<DigitPrefix> {
        construction::eta_prefix(start, len)
    }
}

/// A seeded sample from the Moran set over the constructed basic sequence.
#[derive(Debug, Clone, Copy)]
pub struct ThetaDigits {
    pub seed: u64,
}

impl DigitOracle for ThetaDigits {
    fn digit_at(&self, n: &Position) -> Result<BigUint> {
        construction::theta_digit(self.seed, n)
    }

    fn base_at(&self, n: &Position) -> Result<BigUint> {
        construction::base_at(n)
    }

    fn provenance(&self) -> Provenance {
        Provenance::Theta { seed: self.seed }
    }

    fn prefix(&self, start: &Position, len: usize) -> Result<DigitPrefix> {
        construction::theta_sample(self.seed, start, len)
    }
}

/// The constructed basic sequence paired with a rational.
pub fn rational_over_construction(x: Rational) -> RationalDigits<ConstructedQ> {
    RationalDigits::new(x, ConstructedQ)
}

/// `x -> r x + s` with `r != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    r: Rational,
    s: Rational,
}

impl AffineMap {
    pub fn new(r: Rational, s: Rational) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidArgument("r must be non-zero".into()));
        }
        Ok(AffineMap { r, s })
    }

    pub fn identity() -> Self {
        AffineMap {
            r: Rational::one(),
            s: Rational::zero(),
        }
    }

    /// `sigma_s`.
    pub fn shift(s: Rational) -> Self {
        AffineMap {
            r: Rational::one(),
            s,
        }
    }

    /// `pi_r`.
    pub fn scale(r: Rational) -> Result<Self> {
        AffineMap::new(r, Rational::zero())
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    /// `sigma_s ∘ pi_r` composed with another map applied first.
    pub fn after(&self, inner: &AffineMap) -> AffineMap {
        AffineMap {
            r: &self.r * &inner.r,
            s: &self.r * &inner.s + &self.s,
        }
    }
}

pub fn tau_rational(m: &AffineMap, x: &Rational) -> Rational {
    &m.r * x + &m.s
}

/// Running enclosure `x ∈ [A / P, (A + 1) / P)` from a digit prefix.
struct Enclosure {
    numer: BigInt,
    denom: BigInt,
    len: u64,
}

impl Enclosure {
    fn new(x: &dyn DigitOracle) -> Self {
        Enclosure {
            numer: x.integer_part(),
            denom: BigInt::one(),
            len: 0,
        }
    }

    fn extend_to(&mut self, x: &dyn DigitOracle, len: u64) -> Result<()> {
        if len <= self.len {
            return Ok(());
        }
        let p = x.prefix(&BigUint::from(self.len + 1), (len - self.len) as usize)?;
        for (d, b) in p.digits().iter().zip(p.bases()) {
            let b = BigInt::from(b.clone());
            self.numer = &self.numer * &b + BigInt::from(d.clone());
            self.denom *= b;
        }
        self.len = len;
        Ok(())
    }
}

/// `floor(P * (r v + s))` for `v = a / d`, where `P` is an integer.
fn scaled_floor(m: &AffineMap, a: &BigInt, d: &BigInt, p: &BigInt) -> BigInt {
    let y = Rational::new(a.clone(), d.clone()) * &m.r + &m.s;
    (y * Rational::from_integer(p.clone())).floor().to_integer()
}

/// `Some(floor(P y))` if it is constant over the image of the enclosure.
fn resolved_floor(m: &AffineMap, enc: &Enclosure, p: &BigInt) -> Option<BigInt> {
    let lo = &enc.numer;
    let hi = &enc.numer + 1;
    if m.r.is_positive() {
        // y ∈ [f(lo), f(hi)): constant iff floor(P f(lo)) == ceil(P f(hi)) - 1
        let a = scaled_floor(m, lo, &enc.denom, p);
        let y_hi = (Rational::new(hi, enc.denom.clone()) * &m.r + &m.s)
            * Rational::from_integer(p.clone());
        let b = y_hi.ceil().to_integer() - 1;
        (a == b).then_some(a)
    } else {
        // y ∈ (f(hi), f(lo)]: constant iff floor(P f(hi)) == floor(P f(lo))
        let a = scaled_floor(m, &hi, &enc.denom, p);
        let b = scaled_floor(m, lo, &enc.denom, p);
        (a == b).then_some(a)
    }
}

/// Digits `1..=len` of `r x + s` (normalized through its integer part),
/// together with that integer part.
pub fn tau_prefix(
    m: &AffineMap,
    x: &dyn DigitOracle,
    len: u64,
    lookahead_cap: u64,
) -> Result<(BigInt, DigitPrefix)> {
    scan_limit(&BigUint::from(len), SCAN_LIMIT)?;
    let bases = x.prefix(&BigUint::one(), len as usize)?.bases().to_vec();
    let p_len: BigInt = bases.iter().map(|b| BigInt::from(b.clone())).product();
    let mut enc = Enclosure::new(x);
    let mut k = INITIAL_LOOKAHEAD.min(lookahead_cap.max(1));
    loop {
        enc.extend_to(x, len + k)?;
        if let Some(f) = resolved_floor(m, &enc, &p_len) {
            // Peel mixed-radix digits from the least significant end.
            let mut rest = f;
            let mut digits = vec![BigUint::zero(); len as usize];
            for (slot, b) in digits.iter_mut().zip(&bases).rev() {
                let (q, r) = rest.div_mod_floor(&BigInt::from(b.clone()));
                *slot = r.to_biguint().expect("mod_floor of positive base");
                rest = q;
            }
            let prefix = DigitPrefix::new(BigUint::one(), digits, bases)?;
            return Ok((rest, prefix));
        }
        if k >= lookahead_cap {
            return Err(Error::UnresolvedCarry {
                position: len,
                lookahead: k,
            });
        }
        k = (k * 2).min(lookahead_cap);
    }
}

/// The `n`-th digit of `r x + s`.
pub fn tau_digit(m: &AffineMap, x: &dyn DigitOracle, n: u64, lookahead_cap: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidPosition(BigUint::zero()));
    }
    let (_, p) = tau_prefix(m, x, n, lookahead_cap)?;
    Ok(p.digits()[(n - 1) as usize].clone())
}

/// Positions `<= horizon` where `x + s` and `x` differ.
pub fn diff_positions(
    m: &AffineMap,
    x: &dyn DigitOracle,
    horizon: u64,
    lookahead_cap: u64,
) -> Result<Vec<u64>> {
    if !m.r.is_one() {
        return Err(Error::InvalidArgument(
            "diff_positions compares a pure shift: r must be 1".into(),
        ));
    }
    let (_, image) = tau_prefix(m, x, horizon, lookahead_cap)?;
    let original = x.prefix(&BigUint::one(), horizon as usize)?;
    Ok(image
        .digits()
        .iter()
        .zip(original.digits())
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(k, _)| k as u64 + 1)
        .collect())
}

/// Smallest `N <= limit` with `d | q_1 ... q_N`.
pub fn first_dividing_position(q: &dyn BasicSequence, d: &BigUint, limit: u64) -> Option<u64> {
    if d.is_one() {
        return Some(0);
    }
    let mut rest = d.clone();
    let mut n = BigUint::one();
    for k in 1..=limit {
        let g = rest.gcd(&q.base_at(&n));
        rest /= g;
        if rest.is_one() {
            return Some(k);
        }
        n += 1u32;
    }
    None
}

/// Digits of `r x` on the support `[N, M]` of a finite window, when
/// `r * E` is an integer below `q_N ... q_M` (`E` being the window read as a
/// mixed-radix integer).
pub fn mult_block(e: &DigitPrefix, r: &Rational) -> Result<DigitPrefix> {
    if r.is_zero() {
        return Err(Error::InvalidArgument("r must be non-zero".into()));
    }
    let mut packed = BigUint::zero();
    let mut modulus = BigUint::one();
    for (d, b) in e.digits().iter().zip(e.bases()) {
        packed = packed * b + d;
        modulus *= b;
    }
    let product = r * Rational::from_integer(BigInt::from(packed));
    if !product.is_integer() {
        return Err(Error::ProductNotInteger { product });
    }
    if product.is_negative() {
        return Err(Error::ProductNegative { product });
    }
    let mut value = product
        .to_integer()
        .to_biguint()
        .expect("non-negative integer");
    if value >= modulus {
        return Err(Error::ProductOverflow { product, modulus });
    }
    let mut digits = vec![BigUint::zero(); e.len()];
    for (slot, b) in digits.iter_mut().zip(e.bases()).rev() {
        let (q, d) = value.div_rem(b);
        *slot = d;
        value = q;
    }
    DigitPrefix::new(e.start().clone(), digits, e.bases().to_vec())
}

/// `sum_{n} E_n / (q_1 ... q_n)` over a window, with the bases before the
/// window taken from `q`.
pub fn window_value(e: &DigitPrefix, q: &dyn BasicSequence) -> Result<Rational> {
    let start = e
        .start()
        .to_u64()
        .filter(|s| *s <= SCAN_LIMIT)
        .ok_or_else(|| Error::PositionTooLarge {
            position: e.start().clone(),
            limit: SCAN_LIMIT,
        })?;
    let before: BigUint = q.bases(&BigUint::one(), (start - 1) as usize).into_iter().product();
    Ok(e.local_value() / Rational::from_integer(BigInt::from(before)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::series::{expand_rational, Periodic};

    fn q24() -> Periodic {
        Periodic::new([2u32, 4]).unwrap()
    }

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn tau_rational_examples() {
        let x = ratio(7, 8);
        assert_eq!(tau_rational(&AffineMap::identity(), &x), x);
        let m = AffineMap::new(ratio(3, 2), ratio(1, 3)).unwrap();
        assert_eq!(tau_rational(&m, &ratio(1, 4)), ratio(17, 24));
        let m = AffineMap::new(ratio(-1, 1), ratio(1, 1)).unwrap();
        assert_eq!(tau_rational(&m, &ratio(1, 4)), ratio(3, 4));
        assert!(AffineMap::new(ratio(0, 1), ratio(1, 2)).is_err());
    }

    #[test]
    fn tau_digit_examples() {
        let x = RationalDigits::new(ratio(1, 4), q24());
        let m = AffineMap::shift(ratio(1, 2));
        assert_eq!(tau_digit(&m, &x, 1, DEFAULT_LOOKAHEAD_CAP).unwrap(), u(1));
        assert_eq!(tau_digit(&m, &x, 2, DEFAULT_LOOKAHEAD_CAP).unwrap(), u(2));

        let x = RationalDigits::new(ratio(1, 8), q24());
        let m = AffineMap::scale(ratio(2, 1)).unwrap();
        assert_eq!(tau_digit(&m, &x, 2, DEFAULT_LOOKAHEAD_CAP).unwrap(), u(2));

        for n in 1..=20u64 {
            assert_eq!(
                tau_digit(&AffineMap::identity(), &EtaDigits, n, DEFAULT_LOOKAHEAD_CAP).unwrap(),
                construction::eta_digit(&u(n)).unwrap()
            );
        }
    }

    #[test]
    fn negative_image_normalizes_through_floor() {
        // -(1/3) + 0 = -1 + 2/3
        let x = RationalDigits::new(ratio(1, 3), Periodic::constant(10).unwrap());
        let m = AffineMap::scale(ratio(-1, 1)).unwrap();
        let (e0, p) = tau_prefix(&m, &x, 5, DEFAULT_LOOKAHEAD_CAP).unwrap();
        assert_eq!(e0, BigInt::from(-1));
        assert_eq!(p.digits(), &[u(6), u(6), u(6), u(6), u(6)]);
    }

    #[test]
    fn terminating_image_on_decreasing_side_is_unresolved() {
        // -1/4 has a terminating expansion; the enclosure (f(hi), f(lo)] never
        // closes on it.
        let x = RationalDigits::new(ratio(1, 4), q24());
        let m = AffineMap::scale(ratio(-1, 1)).unwrap();
        assert_eq!(
            tau_digit(&m, &x, 2, 64),
            Err(Error::UnresolvedCarry {
                position: 2,
                lookahead: 64
            })
        );
    }

    #[test]
    fn diff_positions_examples() {
        let none = diff_positions(&AffineMap::shift(ratio(0, 1)), &EtaDigits, 50, 1 << 10).unwrap();
        assert!(none.is_empty());
        let d = diff_positions(&AffineMap::shift(ratio(1, 8)), &EtaDigits, 100, 1 << 10).unwrap();
        assert!(!d.is_empty() && d.iter().all(|&n| n <= 3), "{d:?}");
        let d = diff_positions(&AffineMap::shift(ratio(1, 6)), &EtaDigits, 100, 1 << 10).unwrap();
        assert!(!d.is_empty() && d.iter().all(|&n| n <= 13), "{d:?}");
        let m = AffineMap::new(ratio(2, 1), ratio(0, 1)).unwrap();
        assert!(diff_positions(&m, &EtaDigits, 5, 64).is_err());
    }

    #[test]
    fn first_dividing_positions() {
        assert_eq!(first_dividing_position(&ConstructedQ, &u(8), 100), Some(2));
        assert_eq!(first_dividing_position(&ConstructedQ, &u(6), 100), Some(13));
        assert_eq!(first_dividing_position(&ConstructedQ, &u(12), 100), Some(13));
        assert_eq!(first_dividing_position(&ConstructedQ, &u(5), 100), None);
        assert_eq!(first_dividing_position(&ConstructedQ, &u(1), 100), Some(0));
    }

    #[test]
    fn mult_block_examples() {
        let e = DigitPrefix::new(u(1), vec![u(0), u(2)], vec![u(2), u(4)]).unwrap();
        assert_eq!(mult_block(&e, &ratio(1, 1)).unwrap(), e);
        let doubled = mult_block(&e, &ratio(2, 1)).unwrap();
        assert_eq!(doubled.digits(), &[u(1), u(0)]);
        assert_eq!(window_value(&doubled, &q24()).unwrap(), ratio(1, 2));

        assert!(matches!(
            mult_block(&e, &ratio(4, 1)),
            Err(Error::ProductOverflow { .. })
        ));
        assert!(matches!(
            mult_block(&e, &ratio(1, 3)),
            Err(Error::ProductNotInteger { .. })
        ));
        assert!(matches!(
            mult_block(&e, &ratio(-1, 1)),
            Err(Error::ProductNegative { .. })
        ));
    }

    #[test]
    fn mult_block_on_script_l_block() {
        // z = 2 block of script L_8 scaled by 3/2: the packed value 2 * 8!
        // becomes 3 * 8!, still a multiple of 8! and still tiny against 8^64.
        let digits: Vec<BigUint> = construction::small_block(8, &u(2))
            .unwrap()
            .into_iter()
            .map(BigUint::from)
            .collect();
        let bases = vec![u(8); 64];
        let e = DigitPrefix::new(u(1), digits, bases).unwrap();
        let q = Periodic::constant(8).unwrap();
        let out = mult_block(&e, &ratio(3, 2)).unwrap();
        assert_eq!(
            window_value(&out, &q).unwrap(),
            ratio(3, 2) * window_value(&e, &q).unwrap()
        );
        let expect: Vec<BigUint> = construction::small_block(8, &u(3))
            .unwrap()
            .into_iter()
            .map(BigUint::from)
            .collect();
        assert_eq!(out.digits(), expect.as_slice());
    }

    #[test]
    fn rational_oracle_matches_expansion() {
        let x = ratio(123_456, 1_000_003);
        let oracle = RationalDigits::new(x.clone(), q24());
        let e = expand_rational(&x, &q24(), 40);
        assert_eq!(oracle.prefix(&u(1), 40).unwrap(), *e.prefix());
        assert_eq!(oracle.digit_at(&u(17)).unwrap(), e.digits()[16]);
        assert_eq!(oracle.prefix(&u(5), 3).unwrap().digits(), &e.digits()[4..7]);
    }
}
