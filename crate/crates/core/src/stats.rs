//! Block counts, normality ratios and discrepancy.
//!
//! Two occurrence conventions live here side by side. [`count_block`] counts
//! start positions `m <= n - k + 1`, so the whole block lies inside the first
//! `n` digits. [`segment_count`] counts start positions inside a segment and
//! lets the block run past its right edge.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::construction::{self, ConstructedQ};
use crate::error::{Error, Result};
use crate::rational::{from_uint, Rational};
use crate::series::{scan_limit, tree_sum, window_weight_sum, BasicSequence, Position, SCAN_LIMIT};
use crate::transforms::DigitOracle;

/// Default cap on the number of positions a segment scan may touch.
pub const DEFAULT_SEGMENT_BUDGET: u64 = 1 << 24;

/// A non-empty finite digit block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block(Vec<BigUint>);

impl Block {
    pub fn new(digits: Vec<BigUint>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidArgument("a block needs at least one digit".into()));
        }
        Ok(Block(digits))
    }

    pub fn from_u64s(digits: &[u64]) -> Result<Self> {
        Block::new(digits.iter().map(|&d| BigUint::from(d)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.0
    }

    fn matches_at(&self, digits: &[BigUint], m: usize) -> bool {
        digits[m..m + self.0.len()] == self.0[..]
    }
}

fn count_starts(block: &Block, digits: &[BigUint], starts: std::ops::Range<usize>) -> u64 {
    const CHUNK: usize = 1 << 14;
    let count = |r: std::ops::Range<usize>| r.filter(|&m| block.matches_at(digits, m)).count() as u64;
    if starts.len() <= CHUNK {
        return count(starts);
    }
    let (lo, hi) = (starts.start, starts.end);
    (lo..hi)
        .step_by(CHUNK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| count(a..(a + CHUNK).min(hi)))
        .sum()
}

/// `N_n(B, x)`: starts `1 <= m <= n - k + 1`.
pub fn count_block(x: &dyn DigitOracle, block: &Block, n: u64) -> Result<u64> {
    let k = block.len() as u64;
    if n < k {
        return Ok(0);
    }
    scan_limit(&BigUint::from(n), SCAN_LIMIT)?;
    let digits = x.prefix(&BigUint::one(), n as usize)?;
    Ok(count_starts(block, digits.digits(), 0..(n - k + 1) as usize))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioPoint {
    pub n: u64,
    pub count: u64,
    /// `Q_n^(k)`.
    pub qnk: Rational,
    /// `count / qnk`.
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioSeries {
    pub block: Block,
    pub points: Vec<RatioPoint>,
}

/// `N_n(B, x) / Q_n^(k)` at each checkpoint. Bases come from `q`, digits
/// from `x`.
pub fn ratio_series(
    x: &dyn DigitOracle,
    q: &dyn BasicSequence,
    block: &Block,
    checkpoints: &[u64],
) -> Result<RatioSeries> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be strictly increasing".into()));
    }
    if checkpoints.first() == Some(&0) {
        return Err(Error::InvalidArgument("checkpoints start at 1".into()));
    }
    let Some(&last) = checkpoints.last() else {
        return Ok(RatioSeries {
            block: block.clone(),
            points: vec![],
        });
    };
    let k = block.len();
    scan_limit(&BigUint::from(last + k as u64), SCAN_LIMIT)?;
    let digits = x.prefix(&BigUint::one(), last as usize)?;
    let bases = q.bases(&BigUint::one(), last as usize + k - 1);

    let mut points = Vec::with_capacity(checkpoints.len());
    let mut count = 0u64;
    let mut qnk = Rational::zero();
    let mut prev = 0usize;
    // Starts already counted: m < counted (zero-based).
    let mut counted = 0usize;
    for &n in checkpoints {
        let n = n as usize;
        qnk += window_weight_sum(&bases, prev, n - prev, k);
        prev = n;
        if n >= k {
            let upto = n - k + 1;
            count += count_starts(block, digits.digits(), counted..upto);
            counted = upto;
        }
        let ratio = &from_uint(&BigUint::from(count)) / &qnk;
        points.push(RatioPoint {
            n: n as u64,
            count,
            qnk: qnk.clone(),
            ratio,
        });
    }
    Ok(RatioSeries {
        block: block.clone(),
        points,
    })
}

fn segment_span(i: u64, j: &BigUint, extra: u64, budget: u64) -> Result<construction::SegmentAddress> {
    let seg = construction::segment_bounds(i, j)?;
    let need = seg.len() + BigUint::from(extra);
    if need > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: need,
            budget,
        });
    }
    Ok(seg)
}

/// Occurrences of `B` in `x` whose first digit sits in `[N_{i,j}, M_{i,j}]`.
pub fn segment_count(
    x: &dyn DigitOracle,
    block: &Block,
    i: u64,
    j: &BigUint,
    budget: u64,
) -> Result<u64> {
    let k = block.len();
    let seg = segment_span(i, j, k as u64 - 1, budget)?;
    let len = seg.len().to_usize().expect("within budget");
    let digits = x.prefix(&seg.first, len + k - 1)?;
    Ok(count_starts(block, digits.digits(), 0..len))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentQk {
    pub i: u64,
    pub j: BigUint,
    pub k: u64,
    /// `sum_{n = N}^{M} 1 / (q_n ... q_{n+k-1})`.
    pub exact: Rational,
    /// `l_i (n_i - k) / i^k`.
    pub leading: Rational,
    /// `|exact / leading - 1|`, absent when the leading term vanishes.
    pub leading_gap: Option<Rational>,
    /// `|exact i^k / (l_i n_i) - 1|`.
    pub asymptotic_gap: Rational,
}

pub fn segment_qk(i: u64, j: &BigUint, k: u64, budget: u64) -> Result<SegmentQk> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let seg = segment_span(i, j, k - 1, budget)?;
    let len = seg.len().to_usize().expect("within budget");
    let bases = ConstructedQ.bases(&seg.first, len + k as usize - 1);
    let exact = window_weight_sum(&bases, 0, len, k as usize);

    let lvl = construction::level(i)?;
    let ell = from_uint(&lvl.ell);
    let n = from_uint(&lvl.n);
    let ik = Rational::from_integer(BigInt::from(i).pow(k as u32));
    let kk = Rational::from_integer(BigInt::from(k));
    let leading = &ell * (&n - &kk) / &ik;
    let leading_gap = (!leading.is_zero()).then(|| (&exact / &leading - Rational::one()).abs());
    let asymptotic_gap = (&exact * &ik / (&ell * &n) - Rational::one()).abs();
    Ok(SegmentQk {
        i,
        j: j.clone(),
        k,
        exact,
        leading,
        leading_gap,
        asymptotic_gap,
    })
}

/// `E_n / q_n` at each position.
pub fn digit_ratio_seq(x: &dyn DigitOracle, positions: &[Position]) -> Result<Vec<Rational>> {
    positions
        .iter()
        .map(|n| Ok(from_uint(&x.digit_at(n)?) / from_uint(&x.base_at(n)?)))
        .collect()
}

/// Exact `D_N^*` of a finite point set in `[0, 1)`.
pub fn star_discrepancy(points: &[Rational]) -> Result<Rational> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("star discrepancy needs at least one point".into()));
    }
    let one = Rational::one();
    if let Some(p) = points.iter().find(|p| p.is_negative() || **p >= one) {
        return Err(Error::PointOutOfUnitInterval(p.clone()));
    }
    let mut sorted = points.to_vec();
    sorted.par_sort_unstable();
    let n = Rational::from_integer(BigInt::from(sorted.len()));
    let best = sorted
        .par_iter()
        .enumerate()
        .map(|(idx, x)| {
            let i = Rational::from_integer(BigInt::from(idx + 1));
            let above = &i / &n - x;
            let below = x - (i - Rational::one()) / &n;
            above.max(below)
        })
        .max()
        .expect("non-empty");
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CesaroReport {
    /// `max |A_m / B_m - 1|` over the tail (the last half of the indices).
    pub tail_ratio_gap: Rational,
    /// `max B_m / sum_{i<m} B_i` over the tail, for `m >= 2`.
    pub growth_ratio: Option<Rational>,
    /// `sum A / sum B`.
    pub aggregate: Rational,
}

pub fn cesaro_check(a: &[Rational], b: &[Rational]) -> Result<CesaroReport> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidArgument(
            "sequences must be non-empty and of equal length".into(),
        ));
    }
    if let Some(v) = b.iter().find(|v| !v.is_positive()) {
        return Err(Error::InvalidArgument(format!(
            "B must be positive, found {}",
            crate::rational::render(v)
        )));
    }
    let tail = a.len() / 2;
    let tail_ratio_gap = (tail..a.len())
        .map(|m| (&a[m] / &b[m] - Rational::one()).abs())
        .max()
        .expect("non-empty tail");
    let mut partial = Rational::zero();
    let mut growth_ratio: Option<Rational> = None;
    for (m, bm) in b.iter().enumerate() {
        if m >= tail && m >= 1 {
            let g = bm / &partial;
            if growth_ratio.as_ref().is_none_or(|cur| g > *cur) {
                growth_ratio = Some(g);
            }
        }
        partial += bm;
    }
    let aggregate = tree_sum(a.to_vec()) / tree_sum(b.to_vec());
    Ok(CesaroReport {
        tail_ratio_gap,
        growth_ratio,
        aggregate,
    })
}
