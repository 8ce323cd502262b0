//! Basic sequences and exact Q-Cantor series expansions.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{frac, Rational};

/// 1-based digit position. Positions in the explicit construction outgrow
/// every machine word, so they are arbitrary precision throughout.
pub type Position = BigUint;

/// A sequence of bases `q_1, q_2, ...` with every `q_n >= 2`.
pub trait BasicSequence: Send + Sync {
    /// The base `q_n` for `n >= 1`.
    fn base_at(&self, n: &Position) -> BigUint;

    /// `len` consecutive bases starting at `start`.
    fn bases(&self, start: &Position, len: usize) -> Vec<BigUint> {
        let mut n = start.clone();
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.base_at(&n));
            n += 1u32;
        }
        out
    }
}

impl<T: BasicSequence + ?Sized> BasicSequence for &T {
    fn base_at(&self, n: &Position) -> BigUint {
        (**self).base_at(n)
    }

    fn bases(&self, start: &Position, len: usize) -> Vec<BigUint> {
        (**self).bases(start, len)
    }
}

/// `q_n = period[(n - 1) mod period.len()]`; a constant base `b` is the
/// period `[b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Periodic {
    period: Vec<BigUint>,
}

impl Periodic {
    pub fn new<I, T>(period: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigUint>,
    {
        let period: Vec<BigUint> = period.into_iter().map(Into::into).collect();
        if period.is_empty() {
            return Err(Error::InvalidArgument("empty period".into()));
        }
        if let Some(b) = period.iter().find(|b| **b < BigUint::from(2u32)) {
            return Err(Error::OutOfRange {
                what: "base",
                value: b.to_string(),
                range: "[2, inf)".into(),
            });
        }
        Ok(Periodic { period })
    }

    pub fn constant(b: u64) -> Result<Self> {
        Periodic::new([b])
    }
}

impl BasicSequence for Periodic {
    fn base_at(&self, n: &Position) -> BigUint {
        assert!(!n.is_zero(), "positions start at 1");
        let idx = ((n - 1u32) % self.period.len())
            .to_usize()
            .expect("index below period length");
        self.period[idx].clone()
    }
}

pub(crate) fn check_position(n: &Position) -> Result<()> {
    if n.is_zero() {
        Err(Error::InvalidPosition(n.clone()))
    } else {
        Ok(())
    }
}

/// Convert a position to a machine index for operations that must scan
/// every earlier position.
pub(crate) fn scan_limit(n: &Position, limit: u64) -> Result<u64> {
    match n.to_u64() {
        Some(v) if v <= limit => Ok(v),
        _ => Err(Error::PositionTooLarge {
            position: n.clone(),
            limit,
        }),
    }
}

/// Largest position that operations scanning from position 1 accept.
pub const SCAN_LIMIT: u64 = 1 << 32;

/// Digits `E_start, ..., E_{start+len-1}` together with their bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitPrefix {
    start: Position,
    digits: Vec<BigUint>,
    bases: Vec<BigUint>,
}

impl DigitPrefix {
    /// Validates `0 <= E_n < q_n` at every held position.
    pub fn new(start: Position, digits: Vec<BigUint>, bases: Vec<BigUint>) -> Result<Self> {
        check_position(&start)?;
        if digits.len() != bases.len() {
            return Err(Error::InvalidArgument(format!(
                "{} digits but {} bases",
                digits.len(),
                bases.len()
            )));
        }
        let two = BigUint::from(2u32);
        for (k, (d, b)) in digits.iter().zip(&bases).enumerate() {
            if *b < two {
                return Err(Error::OutOfRange {
                    what: "base",
                    value: b.to_string(),
                    range: "[2, inf)".into(),
                });
            }
            if d >= b {
                return Err(Error::DigitOutOfRange {
                    position: &start + k,
                    digit: d.clone(),
                    base: b.clone(),
                });
            }
        }
        Ok(DigitPrefix {
            start,
            digits,
            bases,
        })
    }

    /// Fetch bases from `q` and validate the digits against them.
    pub fn with_sequence(
        start: Position,
        digits: Vec<BigUint>,
        q: &dyn BasicSequence,
    ) -> Result<Self> {
        check_position(&start)?;
        let bases = q.bases(&start, digits.len());
        DigitPrefix::new(start, digits, bases)
    }

    pub fn start(&self) -> &Position {
        &self.start
    }

    /// Last held position; equals `start - 1` for an empty prefix.
    pub fn end(&self) -> Position {
        &self.start + self.digits.len() - 1u32
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    pub fn bases(&self) -> &[BigUint] {
        &self.bases
    }

    pub fn digit_at(&self, n: &Position) -> Option<&BigUint> {
        self.offset_of(n).map(|k| &self.digits[k])
    }

    pub fn base_at(&self, n: &Position) -> Option<&BigUint> {
        self.offset_of(n).map(|k| &self.bases[k])
    }

    fn offset_of(&self, n: &Position) -> Option<usize> {
        if *n < self.start {
            return None;
        }
        (n - &self.start)
            .to_usize()
            .filter(|k| *k < self.digits.len())
    }

    /// Iterate `(position, digit, base)`.
    pub fn iter(&self) -> impl Iterator<Item = (Position, &BigUint, &BigUint)> + '_ {
        self.digits
            .iter()
            .zip(&self.bases)
            .enumerate()
            .map(move |(k, (d, b))| (&self.start + k, d, b))
    }

    /// Replace the digit at `n`, keeping the range invariant.
    pub fn set_digit(&mut self, n: &Position, digit: BigUint) -> Result<()> {
        let k = self
            .offset_of(n)
            .ok_or_else(|| Error::InvalidArgument(format!("position {n} not held")))?;
        if digit >= self.bases[k] {
            return Err(Error::DigitOutOfRange {
                position: n.clone(),
                digit,
                base: self.bases[k].clone(),
            });
        }
        self.digits[k] = digit;
        Ok(())
    }

    /// The value `sum E_n / (q_start ... q_n)` of the window read as a
    /// fraction of its own first base.
    pub fn local_value(&self) -> Rational {
        let mut num = BigUint::zero();
        let mut den = BigUint::one();
        for (d, b) in self.digits.iter().zip(&self.bases) {
            num = num * b + d;
            den *= b;
        }
        Rational::new(num.into(), den.into())
    }
}

/// `E_0` plus a digit prefix starting at position 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    integer_part: BigInt,
    prefix: DigitPrefix,
}

impl Expansion {
    pub fn new(integer_part: BigInt, prefix: DigitPrefix) -> Result<Self> {
        if !prefix.start().is_one() {
            return Err(Error::InvalidArgument(format!(
                "expansion prefix must start at position 1, not {}",
                prefix.start()
            )));
        }
        Ok(Expansion {
            integer_part,
            prefix,
        })
    }

    pub fn from_digits(
        integer_part: BigInt,
        digits: Vec<BigUint>,
        q: &dyn BasicSequence,
    ) -> Result<Self> {
        let prefix = DigitPrefix::with_sequence(BigUint::one(), digits, q)?;
        Expansion::new(integer_part, prefix)
    }

    pub fn integer_part(&self) -> &BigInt {
        &self.integer_part
    }

    pub fn prefix(&self) -> &DigitPrefix {
        &self.prefix
    }

    pub fn digits(&self) -> &[BigUint] {
        self.prefix.digits()
    }
}

/// `q_a q_{a+1} ... q_b`.
pub fn base_product(q: &dyn BasicSequence, a: &Position, b: &Position) -> Result<BigUint> {
    check_position(a)?;
    if b < a {
        return Err(Error::InvalidArgument(format!(
            "empty product range [{a}, {b}]"
        )));
    }
    let len = scan_limit(&(b - a + 1u32), SCAN_LIMIT)? as usize;
    Ok(q.bases(a, len).into_iter().product())
}

/// First `n` digits of `x` by greedy extraction: `E_0 = floor(x)`, then
/// `E_k = floor(q_k f)` and `f <- q_k f - E_k` on the fractional part.
pub fn expand_rational(x: &Rational, q: &dyn BasicSequence, n: usize) -> Expansion {
    let integer_part = x.floor().to_integer();
    let f = frac(x);
    let den = f
        .denom()
        .to_biguint()
        .expect("denominator is positive");
    let mut rem = f.numer().to_biguint().expect("fractional part is >= 0");
    let bases = q.bases(&BigUint::one(), n);
    let mut digits = Vec::with_capacity(n);
    for b in &bases {
        let (digit, r) = (rem * b).div_rem(&den);
        digits.push(digit);
        rem = r;
    }
    let prefix = DigitPrefix {
        start: BigUint::one(),
        digits,
        bases,
    };
    Expansion {
        integer_part,
        prefix,
    }
}

/// `E_0 + sum_{n=1}^N E_n / (q_1 ... q_n)`, exactly.
pub fn reconstruct(e: &Expansion) -> Rational {
    let local = e.prefix.local_value();
    local + Rational::from_integer(e.integer_part.clone())
}

/// `T_{Q,n}(x) = (q_1 ... q_n) x mod 1`; `tq(x, q, 0) = x mod 1`.
pub fn tq(x: &Rational, q: &dyn BasicSequence, n: usize) -> Rational {
    let den = x.denom().clone();
    let mut num = x.numer().mod_floor(&den);
    for b in q.bases(&BigUint::one(), n) {
        num = (num * BigInt::from(b)).mod_floor(&den);
    }
    Rational::new(num, den)
}

/// `Q_n^(k) = sum_{j=1}^n 1 / (q_j q_{j+1} ... q_{j+k-1})`.
pub fn qnk(q: &dyn BasicSequence, n: usize, k: usize) -> Result<Rational> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "Q_n^(k) needs n >= 1 and k >= 1 (got n={n}, k={k})"
        )));
    }
    let bases = q.bases(&BigUint::one(), n + k - 1);
    Ok(window_weight_sum(&bases, 0, n, k))
}

/// `sum_{j=from}^{from+count-1} 1 / (bases[j] ... bases[j+k-1])` over a
/// zero-based base slice that holds every needed factor.
pub(crate) fn window_weight_sum(bases: &[BigUint], from: usize, count: usize, k: usize) -> Rational {
    let terms: Vec<Rational> = (from..from + count)
        .map(|j| {
            let den: BigUint = bases[j..j + k].iter().product();
            Rational::new(BigInt::one(), den.into())
        })
        .collect();
    tree_sum(terms)
}

/// Pairwise summation keeps intermediate denominators balanced.
pub(crate) fn tree_sum(mut terms: Vec<Rational>) -> Rational {
    if terms.is_empty() {
        return Rational::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().expect("one term left")
}

/// Wire format: integers as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    #[serde(rename = "E0")]
    pub e0: String,
    pub start: String,
    pub digits: Vec<String>,
    pub bases: Vec<String>,
}

impl ExpansionRecord {
    pub fn from_prefix(e0: &BigInt, prefix: &DigitPrefix) -> Self {
        ExpansionRecord {
            e0: e0.to_string(),
            start: prefix.start().to_string(),
            digits: prefix.digits().iter().map(ToString::to_string).collect(),
            bases: prefix.bases().iter().map(ToString::to_string).collect(),
        }
    }

    pub fn from_expansion(e: &Expansion) -> Self {
        ExpansionRecord::from_prefix(e.integer_part(), e.prefix())
    }

    /// Parse and validate; returns `E_0` and the digit window.
    pub fn to_prefix(&self) -> Result<(BigInt, DigitPrefix)> {
        let bad = |s: &str| Error::InvalidArgument(format!("not a decimal integer: {s:?}"));
        let uint = |s: &String| s.parse::<BigUint>().map_err(|_| bad(s));
        let e0 = self.e0.parse::<BigInt>().map_err(|_| bad(&self.e0))?;
        let start = uint(&self.start)?;
        let digits = self.digits.iter().map(uint).collect::<Result<Vec<_>>>()?;
        let bases = self.bases.iter().map(uint).collect::<Result<Vec<_>>>()?;
        Ok((e0, DigitPrefix::new(start, digits, bases)?))
    }
}
