//! Exact block counting in a fixed base `b` and certified checks of the
//! exponential tail bounds on the number of non-normal blocks.
//!
//! Every right-hand side has the shape `C * e^{-t}` with `C` a positive
//! integer and `t` a positive rational. It is bracketed by
//! `C (1 - t/m)^m <= C e^{-t} <= C (1 + t/m)^{-m}` for `m` a power of two,
//! with the powers computed by repeated squaring on dyadic mantissas rounded
//! toward zero. A verdict is only reported once one of the two exact
//! comparisons settles it.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{DEFAULT_PRECISION_CAP, START_PRECISION};
use crate::rational::Rational;

/// Default cap on `b^n` for enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;
/// Default cap on `n * b` for the dynamic program.
pub const DEFAULT_DP_BUDGET: u64 = 1 << 16;

/// `p_b(n, k) = C(n, k) (b - 1)^{n - k}`: blocks of length `n` in base `b`
/// holding exactly `k` copies of a fixed digit.
pub fn p_count(b: u64, n: u64, k: u64) -> Result<BigUint> {
    check_base(b)?;
    if k > n {
        return Err(Error::OutOfRange {
            what: "k",
            value: k.to_string(),
            range: format!("[0, {n}]"),
        });
    }
    Ok(binomial(n, k) * BigUint::from(b - 1).pow((n - k) as u32))
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

fn check_base(b: u64) -> Result<()> {
    if b < 2 {
        return Err(Error::OutOfRange {
            what: "base b",
            value: b.to_string(),
            range: "[2, inf)".into(),
        });
    }
    Ok(())
}

fn check_eps(eps: &Rational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {}",
            crate::rational::render(eps)
        )));
    }
    Ok(())
}

/// Integer count range `[lo, hi]` equivalent to
/// `(b^{-k} - eps) n <= c <= (b^{-k} + eps) n`, clipped to `[0, n]`.
/// `None` when no count qualifies.
fn count_bounds(b: u64, n: u64, k: u64, eps: &Rational) -> Option<(u64, u64)> {
    let bk = Rational::from_integer(BigInt::from(b).pow(k as u32));
    let center = Rational::from_integer(BigInt::from(n)) / bk;
    let spread = eps * Rational::from_integer(BigInt::from(n));
    let lo = (&center - &spread).ceil().to_integer().max(BigInt::zero());
    let hi = (&center + &spread).floor().to_integer().min(BigInt::from(n));
    if lo > hi {
        return None;
    }
    Some((lo.to_u64().expect("clipped"), hi.to_u64().expect("clipped")))
}

/// Whether every length-`k` block occurs (overlapping) between
/// `(b^{-k} - eps) n` and `(b^{-k} + eps) n` times in `block`.
pub fn eps_k_normal(block: &[u64], b: u64, k: u64, eps: &Rational) -> Result<bool> {
    check_base(b)?;
    let n = block.len() as u64;
    if k == 0 || k > n {
        return Err(Error::OutOfRange {
            what: "k",
            value: k.to_string(),
            range: format!("[1, {n}]"),
        });
    }
    if let Some((pos, &d)) = block.iter().enumerate().find(|(_, &d)| d >= b) {
        return Err(Error::DigitOutOfRange {
            position: BigUint::from(pos + 1),
            digit: BigUint::from(d),
            base: BigUint::from(b),
        });
    }
    let Some((lo, hi)) = count_bounds(b, n, k, eps) else {
        return Ok(false);
    };
    let words = window_space(b, k)?;
    let mut counts = vec![0u64; words];
    let modulus = words as u64;
    let mut code = 0u64;
    for (idx, &d) in block.iter().enumerate() {
        code = (code * b + d) % modulus;
        if idx as u64 + 1 >= k {
            counts[code as usize] += 1;
        }
    }
    Ok(counts.iter().all(|&c| lo <= c && c <= hi))
}

fn window_space(b: u64, k: u64) -> Result<usize> {
    b.checked_pow(k as u32)
        .filter(|&w| w <= DEFAULT_ENUMERATION_BUDGET)
        .map(|w| w as usize)
        .ok_or_else(|| Error::BudgetExceeded {
            needed: BigUint::from(b).pow(k as u32),
            budget: DEFAULT_ENUMERATION_BUDGET,
        })
}

/// Depth-first walk over all blocks extending a prefix, tracking window
/// counts and how many words currently sit outside `[lo, hi]`.
struct Walker {
    b: u64,
    n: u64,
    k: u64,
    modulus: u64,
    lo: u64,
    hi: u64,
    counts: Vec<u64>,
    outside: usize,
}

impl Walker {
    fn in_range(&self, c: u64) -> bool {
        self.lo <= c && c <= self.hi
    }

    fn bump(&mut self, code: usize, up: bool) {
        let before = self.in_range(self.counts[code]);
        if up {
            self.counts[code] += 1;
        } else {
            self.counts[code] -= 1;
        }
        let after = self.in_range(self.counts[code]);
        match (before, after) {
            (true, false) => self.outside += 1,
            (false, true) => self.outside -= 1,
            _ => {}
        }
    }

    // Place digit `d` at zero-based depth `depth`; returns the new code.
    fn place(&mut self, code: u64, depth: u64, d: u64) -> u64 {
        let next = (code * self.b + d) % self.modulus;
        if depth + 1 >= self.k {
            self.bump(next as usize, true);
        }
        next
    }

    fn unplace(&mut self, next: u64, depth: u64) {
        if depth + 1 >= self.k {
            self.bump(next as usize, false);
        }
    }

    fn count_bad(&mut self, code: u64, depth: u64) -> u64 {
        if depth == self.n {
            return u64::from(self.outside > 0);
        }
        let mut bad = 0;
        for d in 0..self.b {
            let next = self.place(code, depth, d);
            bad += self.count_bad(next, depth + 1);
            self.unplace(next, depth);
        }
        bad
    }
}

/// `B_b(n, eps, k)`: length-`n` blocks that are not `(eps, k)`-normal, by
/// exhaustive enumeration.
pub fn count_bad_blocks(b: u64, n: u64, eps: &Rational, k: u64, budget: u64) -> Result<BigUint> {
    check_base(b)?;
    if k == 0 || k > n {
        return Err(Error::OutOfRange {
            what: "k",
            value: k.to_string(),
            range: format!("[1, {n}]"),
        });
    }
    let total = BigUint::from(b).pow(n as u32);
    if total > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: total,
            budget,
        });
    }
    let Some((lo, hi)) = count_bounds(b, n, k, eps) else {
        return Ok(total);
    };
    let words = window_space(b, k)?;
    let fresh = || Walker {
        b,
        n,
        k,
        modulus: words as u64,
        lo,
        hi,
        counts: vec![0; words],
        outside: if lo > 0 { words } else { 0 },
    };
    // Split on a short prefix so each task walks an independent subtree.
    let mut split = 0u64;
    while split < n && b.pow(split as u32) < 256 {
        split += 1;
    }
    let prefixes = b.pow(split as u32);
    let bad: u64 = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut w = fresh();
            let mut code = 0;
            let mut digits = Vec::with_capacity(split as usize);
            let mut rest = p;
            for _ in 0..split {
                digits.push(rest % b);
                rest /= b;
            }
            for (depth, &d) in digits.iter().rev().enumerate() {
                code = w.place(code, depth as u64, d);
            }
            w.count_bad(code, split)
        })
        .sum();
    Ok(BigUint::from(bad))
}

/// `B_b(n, eps, 1)` by dynamic programming over digit-count vectors.
pub fn count_bad_k1(b: u64, n: u64, eps: &Rational, budget: u64) -> Result<BigUint> {
    check_base(b)?;
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "n",
            value: "0".into(),
            range: "[1, inf)".into(),
        });
    }
    let cost = n.saturating_mul(b);
    if cost > budget {
        return Err(Error::BudgetExceeded {
            needed: BigUint::from(n) * b,
            budget,
        });
    }
    let total = BigUint::from(b).pow(n as u32);
    let Some((lo, hi)) = count_bounds(b, n, 1, eps) else {
        return Ok(total);
    };
    let n = n as usize;
    let (lo, hi) = (lo as usize, hi as usize);
    // f[m]: arrangements of m positions among the digits seen so far with
    // every count in range. Adding a digit with count c multiplies by C(m + c, c).
    let mut f = vec![BigUint::zero(); n + 1];
    f[0] = BigUint::one();
    for _ in 0..b {
        let g: Vec<BigUint> = (0..=n)
            .into_par_iter()
            .map(|t| {
                let mut acc = BigUint::zero();
                if t < lo {
                    return acc;
                }
                let mut choose = binomial(t as u64, lo as u64);
                for c in lo..=hi.min(t) {
                    let m = t - c;
                    if !f[m].is_zero() {
                        acc += &f[m] * &choose;
                    }
                    choose *= t - c;
                    choose /= c + 1;
                }
                acc
            })
            .collect();
        f = g;
    }
    Ok(total - &f[n])
}

/// `sum_{j in [a, c]} p_b(n, j)` with incremental ratio updates, split
/// across threads on index ranges.
fn p_range_sum(b: u64, n: u64, a: u64, c: u64) -> BigUint {
    if a > c || a > n {
        return BigUint::zero();
    }
    let c = c.min(n);
    const CHUNK: u64 = 4096;
    let starts: Vec<u64> = (a..=c).step_by(CHUNK as usize).collect();
    starts
        .into_par_iter()
        .map(|s| {
            let e = (s + CHUNK - 1).min(c);
            let mut term = p_count(b, n, s).expect("s <= n");
            let mut acc = term.clone();
            for j in s..e {
                // p(n, j+1) = p(n, j) (n - j) / ((j + 1) (b - 1))
                term *= n - j;
                term /= (j + 1) * (b - 1);
                acc += &term;
            }
            acc
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    True,
    False,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "TRUE",
            Verdict::False => "FALSE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub lemma: &'static str,
    pub b: u64,
    pub n: u64,
    pub k: u64,
    pub eps: Rational,
    pub lhs: BigUint,
    pub rhs_lower_bound: Rational,
    pub rhs_upper_bound: Rational,
    pub verdict: Verdict,
    /// Mantissa bits of the final bracketing step.
    pub precision_used: u32,
    pub precondition_ok: bool,
    pub precondition_notes: Vec<String>,
}

/// `M 2^e`, always a lower bound of the quantity it stands for.
#[derive(Debug, Clone)]
struct Dyadic {
    mant: BigUint,
    exp: i64,
}

impl Dyadic {
    /// Lower bound of `num / den` with `prec` fractional bits.
    fn floor_of(num: &BigUint, den: &BigUint, prec: u32) -> Self {
        Dyadic {
            mant: (num << prec) / den,
            exp: -i64::from(prec),
        }
    }

    fn square_down(&self, prec: u32) -> Self {
        let mut mant = &self.mant * &self.mant;
        let mut exp = self.exp * 2;
        let bits = mant.bits();
        if bits > u64::from(prec) {
            let drop = bits - u64::from(prec);
            mant >>= drop;
            exp += drop as i64;
        }
        Dyadic { mant, exp }
    }

    fn to_rational(&self) -> Rational {
        let m = Rational::from_integer(BigInt::from(self.mant.clone()));
        let two = Rational::from_integer(BigInt::from(2));
        if self.exp >= 0 {
            m * two.pow(self.exp as i32)
        } else {
            m / two.pow((-self.exp) as i32)
        }
    }
}

/// Lower bounds of `(1 - t/m)^m` and `(1 + t/m)^m` for `m = 2^j`.
fn power_bounds(t: &Rational, j: u32, prec: u32) -> (Dyadic, Dyadic) {
    let tn = t.numer().to_biguint().expect("t > 0");
    let td = t.denom().to_biguint().expect("positive denominator");
    let m_td = &td << j;
    let mut minus = Dyadic::floor_of(&(&m_td - &tn), &m_td, prec);
    let mut plus = Dyadic::floor_of(&(&m_td + &tn), &m_td, prec);
    for _ in 0..j {
        minus = minus.square_down(prec);
        plus = plus.square_down(prec);
    }
    (minus, plus)
}

struct Bracket {
    lower: Rational,
    upper: Rational,
    verdict: Verdict,
    precision: u32,
}

/// Settle `lhs <= c e^{-t}` by escalating the bracket's precision.
fn certify_against(lhs: &BigUint, c: &BigUint, t: &Rational, cap: u32) -> Bracket {
    // Smallest j with 2^j >= 2t keeps 1 - t/m >= 1/2.
    let mut j_min = 0u32;
    while Rational::from_integer(BigInt::one() << j_min) < t * Rational::from_integer(BigInt::from(2)) {
        j_min += 1;
    }
    let lhs_i = BigInt::from(lhs.clone());
    let c_i = BigInt::from(c.clone());
    let mut prec = START_PRECISION.min(cap.max(1));
    loop {
        let j = j_min.max(prec / 2);
        let (minus, plus) = power_bounds(t, j, prec);
        // lower = c * minus, upper = c / plus
        let lower_holds = scaled_le(&lhs_i, &c_i, &minus);
        let upper_fails = !plus.mant.is_zero() && scaled_gt_quot(&lhs_i, &c_i, &plus);
        let verdict = if lower_holds {
            Verdict::True
        } else if upper_fails {
            Verdict::False
        } else {
            Verdict::Inconclusive
        };
        if verdict != Verdict::Inconclusive || prec >= cap {
            let c_r = Rational::from_integer(c_i.clone());
            let upper = if plus.mant.is_zero() {
                c_r.clone()
            } else {
                &c_r / plus.to_rational()
            };
            return Bracket {
                lower: c_r * minus.to_rational(),
                upper,
                verdict,
                precision: prec,
            };
        }
        prec = (prec * 2).min(cap);
    }
}

/// `lhs <= c * mant * 2^exp`, exactly.
fn scaled_le(lhs: &BigInt, c: &BigInt, d: &Dyadic) -> bool {
    let rhs = c * BigInt::from(d.mant.clone());
    if d.exp >= 0 {
        *lhs <= rhs << d.exp as usize
    } else {
        lhs << (-d.exp) as usize <= rhs
    }
}

/// `lhs > c / (mant * 2^exp)`, exactly.
fn scaled_gt_quot(lhs: &BigInt, c: &BigInt, d: &Dyadic) -> bool {
    let l = lhs * BigInt::from(d.mant.clone());
    if d.exp >= 0 {
        (l << d.exp as usize) > *c
    } else {
        l > c << (-d.exp) as usize
    }
}

fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `n^{-1/3} <= eps`, i.e. `eps^3 n >= 1`.
fn cube_root_floor_ok(eps: &Rational, n: u64) -> bool {
    eps.pow(3) * int(n) >= Rational::one()
}

#[allow(clippy::too_many_arguments)]
fn finish(
    lemma: &'static str,
    b: u64,
    n: u64,
    k: u64,
    eps: &Rational,
    lhs: BigUint,
    c: BigUint,
    t: Rational,
    notes: Vec<String>,
    cap: u32,
) -> BoundCheck {
    let br = certify_against(&lhs, &c, &t, cap);
    BoundCheck {
        lemma,
        b,
        n,
        k,
        eps: eps.clone(),
        lhs,
        rhs_lower_bound: br.lower,
        rhs_upper_bound: br.upper,
        verdict: br.verdict,
        precision_used: br.precision,
        precondition_ok: notes.is_empty(),
        precondition_notes: notes,
    }
}

/// Lemma k1: blocks of length `n` whose count of a fixed digit strays more
/// than `eps n` from `n / b`, against `2^14 b^n e^{-eps^2 n / 80}`.
pub fn check_k1(b: u64, n: u64, eps: &Rational, cap: u32) -> Result<BoundCheck> {
    check_base(b)?;
    check_eps(eps)?;
    let mut notes = Vec::new();
    if BigUint::from(n) < BigUint::from(b).pow(16u32) {
        notes.push(format!("n >= b^16 fails (n = {n})"));
    }
    if !cube_root_floor_ok(eps, n) {
        notes.push("eps >= n^(-1/3) fails".into());
    }
    if *eps > Rational::new(BigInt::from(2), BigInt::from(b)) {
        notes.push("eps <= 2/b fails".into());
    }
    let center = int(n) / int(b);
    let spread = eps * int(n);
    // j > center + spread, j < center - spread
    let above: BigInt = (&center + &spread).floor().to_integer() + 1;
    let below: BigInt = (&center - &spread).ceil().to_integer() - 1;
    let mut lhs = BigUint::zero();
    if above <= BigInt::from(n) {
        lhs += p_range_sum(b, n, above.to_u64().expect("0 <= above <= n"), n);
    }
    if !below.is_negative() {
        lhs += p_range_sum(b, n, 0, below.to_u64().expect("below < n"));
    }
    let c = (BigUint::one() << 14u32) * BigUint::from(b).pow(n as u32);
    let t = eps * eps * int(n) / int(80);
    Ok(finish("k1", b, n, 1, eps, lhs, c, t, notes, cap))
}

/// Lemma bugeaud: the two tails of `p_b(bn, n + j)` beyond `|j| >= ceil(eps n)`
/// against `2^14 b^{bn} e^{-eps^2 n / (10 b)}`.
pub fn check_bugeaud(b: u64, n: u64, eps: &Rational, cap: u32) -> Result<BoundCheck> {
    check_base(b)?;
    check_eps(eps)?;
    let mut notes = Vec::new();
    if BigUint::from(n) < BigUint::from(b).pow(15u32) {
        notes.push(format!("n >= b^15 fails (n = {n})"));
    }
    if !cube_root_floor_ok(eps, n) {
        notes.push("eps >= n^(-1/3) fails".into());
    }
    if *eps > Rational::one() {
        notes.push("eps <= 1 fails".into());
    }
    let big_n = b * n;
    let off = (eps * int(n)).ceil().to_integer().to_u64().unwrap_or(u64::MAX);
    let mut lhs = BigUint::zero();
    if off <= n {
        lhs += p_range_sum(b, big_n, 0, n - off);
    }
    if let Some(from) = n.checked_add(off).filter(|&f| f <= big_n) {
        lhs += p_range_sum(b, big_n, from, big_n);
    }
    let c = (BigUint::one() << 14u32) * BigUint::from(b).pow(big_n as u32);
    let t = eps * eps * int(n) / int(10 * b);
    Ok(finish("bugeaud", b, n, 1, eps, lhs, c, t, notes, cap))
}

/// Lemma epsilonk: `B_b(n, eps, k)` by enumeration against
/// `2^15 k b^{n+k} e^{-eps^2 n / (160 k)}`.
pub fn check_epsilonk(b: u64, n: u64, eps: &Rational, k: u64, budget: u64, cap: u32) -> Result<BoundCheck> {
    check_base(b)?;
    check_eps(eps)?;
    let mut notes = Vec::new();
    let threshold = BigUint::from(k) * (BigUint::from(b).pow((16 * k) as u32) + 1u32);
    if BigUint::from(n) < threshold {
        notes.push("n >= k(b^(16k) + 1) fails".into());
    }
    let phases = n / k.max(1);
    if phases == 0 || eps.pow(3) * int(phases) < int(8) {
        notes.push("eps >= 2 floor(n/k)^(-1/3) fails".into());
    }
    if *eps > Rational::new(BigInt::from(2), BigInt::from(b).pow(k as u32)) {
        notes.push("eps <= 2/b^k fails".into());
    }
    let lhs = count_bad_blocks(b, n, eps, k, budget)?;
    let c = (BigUint::one() << 15u32) * BigUint::from(k) * BigUint::from(b).pow((n + k) as u32);
    let t = eps * eps * int(n) / int(160 * k);
    Ok(finish("epsilonk", b, n, k, eps, lhs, c, t, notes, cap))
}

/// Precision cap used when callers have no preference.
pub fn default_cap() -> u32 {
    DEFAULT_PRECISION_CAP
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn brute_bad(b: u64, n: u64, eps: &Rational, k: u64) -> u64 {
        let mut bad = 0;
        let mut block = vec![0u64; n as usize];
        for code in 0..b.pow(n as u32) {
            let mut c = code;
            for d in block.iter_mut() {
                *d = c % b;
                c /= b;
            }
            if !eps_k_normal(&block, b, k, eps).unwrap() {
                bad += 1;
            }
        }
        bad
    }

    #[test]
    fn p_count_examples() {
        assert_eq!(p_count(2, 3, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(p_count(5, 6, 0).unwrap(), BigUint::from(4u32).pow(6u32));
        assert_eq!(p_count(3, 4, 2).unwrap(), BigUint::from(24u32));
        assert!(p_count(2, 3, 4).is_err());
    }

    #[test]
    fn eps_k_normal_examples() {
        assert!(eps_k_normal(&[0, 1, 1, 0], 2, 1, &ratio(1, 4)).unwrap());
        assert!(!eps_k_normal(&[0, 0, 0, 0], 2, 1, &ratio(1, 4)).unwrap());
        assert!(eps_k_normal(&[0, 0, 0, 0], 2, 2, &ratio(1, 1)).unwrap());
        assert!(matches!(
            eps_k_normal(&[0, 2], 2, 1, &ratio(1, 4)),
            Err(Error::DigitOutOfRange { .. })
        ));
    }

    #[test]
    fn count_bad_blocks_examples() {
        // Counts of ones outside [1, 3]: the all-zero and all-one blocks.
        assert_eq!(
            count_bad_blocks(2, 4, &ratio(1, 4), 1, DEFAULT_ENUMERATION_BUDGET).unwrap(),
            BigUint::from(2u32)
        );
        assert!(count_bad_blocks(3, 6, &ratio(1, 1), 2, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .is_zero());
        // k = n: the single window occurs once; 1 lies inside [(b^-n - eps)n, (b^-n + eps)n]
        // iff eps >= 1/n - b^-n = 5/24 here.
        assert_eq!(
            count_bad_blocks(2, 3, &ratio(1, 5), 3, DEFAULT_ENUMERATION_BUDGET).unwrap(),
            BigUint::from(8u32)
        );
        assert!(count_bad_blocks(2, 3, &ratio(5, 24), 3, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .is_zero());
        assert!(matches!(
            count_bad_blocks(2, 30, &ratio(1, 4), 1, DEFAULT_ENUMERATION_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
        for (b, n, k) in [(2, 7, 1), (2, 8, 2), (3, 5, 2), (2, 9, 3)] {
            for eps in [ratio(1, 16), ratio(1, 5), ratio(1, 2)] {
                assert_eq!(
                    count_bad_blocks(b, n, &eps, k, DEFAULT_ENUMERATION_BUDGET).unwrap(),
                    BigUint::from(brute_bad(b, n, &eps, k)),
                    "b={b} n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn count_bad_k1_examples() {
        let eps = ratio(1, 8);
        assert_eq!(
            count_bad_k1(2, 14, &eps, DEFAULT_DP_BUDGET).unwrap(),
            count_bad_blocks(2, 14, &eps, 1, DEFAULT_ENUMERATION_BUDGET).unwrap()
        );
        assert!(count_bad_k1(3, 20, &ratio(1, 1), DEFAULT_DP_BUDGET).unwrap().is_zero());
        // Binary closed form.
        let n = 40u64;
        let (lo, hi) = count_bounds(2, n, 1, &eps).unwrap();
        let good: BigUint = (lo..=hi).map(|j| binomial(n, j)).sum();
        assert_eq!(
            count_bad_k1(2, n, &eps, DEFAULT_DP_BUDGET).unwrap(),
            (BigUint::one() << n) - good
        );
    }

    #[test]
    fn range_sum_matches_direct() {
        for (b, n) in [(2u64, 50u64), (3, 30), (7, 12)] {
            let direct: BigUint = (5..=n - 3).map(|j| p_count(b, n, j).unwrap()).sum();
            assert_eq!(p_range_sum(b, n, 5, n - 3), direct);
        }
    }

    #[test]
    fn exponential_bracket_contains_e_minus_t() {
        // e^{-1} = 0.36787944117...
        let (minus, plus) = power_bounds(&ratio(1, 1), 20, 128);
        let lo = minus.to_rational();
        let hi = Rational::one() / plus.to_rational();
        assert!(lo < ratio(367_879_442, 1_000_000_000));
        assert!(hi > ratio(367_879_441, 1_000_000_000));
        assert!(lo < hi);
    }

    #[test]
    fn small_k1_checks() {
        let r = check_k1(2, 64, &ratio(1, 2), default_cap()).unwrap();
        assert!(!r.precondition_ok);
        assert_eq!(r.verdict, Verdict::True);

        let eps = ratio(1, 8);
        let r = check_k1(2, 4096, &eps, default_cap()).unwrap();
        assert!(r.precondition_notes.iter().any(|s| s.contains("b^16")));
        // Just below n^{-1/3} = 1/16 for n = 4096.
        let r = check_k1(2, 4096, &ratio(1, 17), default_cap()).unwrap();
        assert!(r.precondition_notes.iter().any(|s| s.contains("n^(-1/3)")));
        assert!(check_k1(2, 16, &ratio(0, 1), default_cap()).is_err());
    }

    #[test]
    fn false_verdict_when_bound_is_violated() {
        // With C = 1 and t large, any positive lhs exceeds e^{-t}.
        let br = certify_against(&BigUint::from(1u32), &BigUint::one(), &ratio(50, 1), default_cap());
        assert_eq!(br.verdict, Verdict::False);
        let br = certify_against(&BigUint::zero(), &BigUint::one(), &ratio(50, 1), default_cap());
        assert_eq!(br.verdict, Verdict::True);
    }

    #[test]
    fn bugeaud_eps_one_keeps_outer_terms() {
        let r = check_bugeaud(2, 20, &ratio(1, 1), default_cap()).unwrap();
        assert_eq!(r.lhs, BigUint::from(2u32));
        let r = check_bugeaud(3, 10, &ratio(1, 1), default_cap()).unwrap();
        let expect = p_count(3, 30, 0).unwrap() + p_range_sum(3, 30, 20, 30);
        assert_eq!(r.lhs, expect);
    }

    #[test]
    fn epsilonk_small() {
        let r = check_epsilonk(2, 16, &ratio(1, 4), 2, DEFAULT_ENUMERATION_BUDGET, default_cap()).unwrap();
        assert!(!r.precondition_ok);
        assert_ne!(r.verdict, Verdict::Inconclusive);
        let r = check_epsilonk(2, 10, &ratio(1, 1), 2, DEFAULT_ENUMERATION_BUDGET, default_cap()).unwrap();
        assert!(r.lhs.is_zero());
        assert_eq!(r.verdict, Verdict::True);
    }
}
