//! The explicit basic sequence `Q = [X_2]^{L_2} [X_3]^{L_3} ...` with
//! `X_i = [[i]^{n_i} [(i!)^2]^{n_i}]^{l_i}`, the digits of `eta`, and the
//! Moran-set bookkeeping around them.
//!
//! Per index `i >= 2`:
//!
//! - `n_i = i^{floor(ln i)}` (and `n_1 = 0`);
//! - `L_i` (the family `script L_i`) holds the base-`i` blocks `B` of length
//!   `n_i` whose integer value `v` satisfies `i! v < i^{n_i}` and `i! | v`, so
//!   `v = z i!` for `0 <= z < l_i = ceil(i^{n_i} / (i!)^2)`;
//! - `L_i = i! ceil(n_{i+1} l_{i+1} / (n_i l_i))` copies of `X_i` follow one
//!   another.
//!
//! In each copy of `X_i` the `z`-th run of small bases `[i]^{n_i}` carries the
//! digits of the `z`-th block of `script L_i`; the large bases `(i!)^2` carry
//! the digit `i!` in `eta`, or any member of
//! `I_i = {1, ..., floor(((i!)^2)^{1 - 1/ln i})} ∩ floor(sqrt i)! Z`
//! for a generic member of the Moran set `Theta`.
//!
//! Positions are arbitrary precision. Level data is computed once per index
//! and shared; every query locates its level by binary search over
//! cumulative lengths.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::interval::{self, certify, Interval, DEFAULT_PRECISION_CAP};
use crate::series::{check_position, BasicSequence, DigitPrefix, Position};

pub fn factorial(i: u64) -> BigUint {
    (2..=i).fold(BigUint::one(), |acc, k| acc * k)
}

/// `floor(ln i)`, certified. `ln i` is irrational for `i >= 2`, so the
/// escalation always terminates.
pub fn floor_ln(i: u64) -> u64 {
    assert!(i >= 1, "floor_ln needs i >= 1");
    if i == 1 {
        return 0;
    }
    let n = BigInt::from(i);
    let (k, _) = certify(DEFAULT_PRECISION_CAP, |p| {
        interval::ln_integer(&n, p).ok()?.certified_floor()
    })
    .expect("ln of an integer >= 2 is irrational, so its floor certifies");
    k.to_u64().expect("floor(ln i) fits u64")
}

/// `n_i = i^{floor(ln i)}` for `i >= 2`, and `n_1 = 0`.
pub fn n_of(i: u64) -> BigUint {
    match i {
        0 => panic!("indices start at 1"),
        1 => BigUint::zero(),
        _ => {
            let e = floor_ln(i);
            BigUint::from(i).pow(u32::try_from(e).expect("exponent fits u32"))
        }
    }
}

/// `l_i = |script L_i| = ceil(i^{n_i} / (i!)^2)`.
pub fn ell_of(i: u64) -> Result<BigUint> {
    if i < 2 {
        return Err(index_error(i, 2));
    }
    let n = n_of(i);
    let n = u32::try_from(&n).map_err(|_| Error::BudgetExceeded {
        needed: n.clone(),
        budget: u32::MAX as u64,
    })?;
    let f = factorial(i);
    Ok(BigUint::from(i).pow(n).div_ceil(&(&f * &f)))
}

/// `L_i = i! ceil(n_{i+1} l_{i+1} / (n_i l_i))`.
#[allow(non_snake_case)]
pub fn L_of(i: u64) -> Result<BigUint> {
    if i < 2 {
        return Err(index_error(i, 2));
    }
    let here = n_of(i) * ell_of(i)?;
    let next = n_of(i + 1) * ell_of(i + 1)?;
    Ok(factorial(i) * next.div_ceil(&here))
}

fn index_error(i: u64, min: u64) -> Error {
    Error::OutOfRange {
        what: "index i",
        value: i.to_string(),
        range: format!("[{min}, inf)"),
    }
}

/// Everything the layout needs about one index `i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub i: u64,
    /// `n_i`, the run length (`s_i = t_i`).
    pub n: BigUint,
    /// `l_i`, runs per copy of `X_i`.
    pub ell: BigUint,
    /// `L_i`, copies of `X_i`.
    pub copies: BigUint,
    pub factorial: BigUint,
    /// `beta_i = (i!)^2`.
    pub beta: BigUint,
    /// `2 n_i`.
    pub period: BigUint,
    /// `|X_i| = 2 n_i l_i`.
    pub copy_len: BigUint,
    /// `upsilon_i = L_i l_i`.
    pub runs: BigUint,
    /// `2 L_i l_i n_i`.
    pub region_len: BigUint,
    /// Positions strictly before this level.
    pub start: BigUint,
    /// Small-base positions strictly before this level.
    pub alpha_start: BigUint,
}

impl Level {
    /// Last position of the region.
    pub fn end(&self) -> BigUint {
        &self.start + &self.region_len
    }

    pub fn alpha_len(&self) -> BigUint {
        &self.runs * &self.n
    }

    /// The `d`-th digit (0 = most significant) of the `z`-th block of
    /// `script L_i`, i.e. of `z i!` written in base `i` with `n_i` digits.
    pub fn block_digit(&self, z: &BigUint, d: &BigUint) -> BigUint {
        let exp = &self.n - 1u32 - d;
        let exp = u32::try_from(&exp).expect("block length fits u32");
        let i = BigUint::from(self.i);
        (z * &self.factorial / i.pow(exp)) % &i
    }
}

struct Layout {
    levels: RwLock<Vec<Arc<Level>>>,
}

fn layout() -> &'static Layout {
    static LAYOUT: OnceLock<Layout> = OnceLock::new();
    LAYOUT.get_or_init(|| Layout {
        levels: RwLock::new(Vec::new()),
    })
}

fn build_level(i: u64, start: BigUint, alpha_start: BigUint) -> Result<Level> {
    let n = n_of(i);
    let ell = ell_of(i)?;
    let copies = L_of(i)?;
    let factorial = factorial(i);
    let beta = &factorial * &factorial;
    let period = &n * 2u32;
    let copy_len = &period * &ell;
    let runs = &copies * &ell;
    let region_len = &copies * &copy_len;
    Ok(Level {
        i,
        n,
        ell,
        copies,
        factorial,
        beta,
        period,
        copy_len,
        runs,
        region_len,
        start,
        alpha_start,
    })
}

impl Layout {
    /// Extend the table until `done` holds for the last level.
    fn extend_until(&self, done: impl Fn(&Level) -> bool) -> Result<Vec<Arc<Level>>> {
        {
            let levels = self.levels.read().expect("layout lock");
            if levels.last().is_some_and(|l| done(l)) {
                return Ok(levels.clone());
            }
        }
        let mut levels = self.levels.write().expect("layout lock");
        while !levels.last().is_some_and(|l| done(l)) {
            let (i, start, alpha_start) = match levels.last() {
                None => (2, BigUint::zero(), BigUint::zero()),
                Some(l) => (l.i + 1, l.end(), &l.alpha_start + l.alpha_len()),
            };
            levels.push(Arc::new(build_level(i, start, alpha_start)?));
        }
        Ok(levels.clone())
    }

    fn level(&self, i: u64) -> Result<Arc<Level>> {
        if i < 2 {
            return Err(index_error(i, 2));
        }
        let levels = self.extend_until(|l| l.i >= i)?;
        Ok(levels[(i - 2) as usize].clone())
    }

    fn level_containing(&self, n: &Position) -> Result<Arc<Level>> {
        check_position(n)?;
        let levels = self.extend_until(|l| l.end() >= *n)?;
        let k = levels.partition_point(|l| l.end() < *n);
        Ok(levels[k].clone())
    }

    fn level_containing_alpha(&self, m: &BigUint) -> Result<Arc<Level>> {
        let levels = self.extend_until(|l| &l.alpha_start + l.alpha_len() > *m)?;
        let k = levels.partition_point(|l| &l.alpha_start + l.alpha_len() <= *m);
        Ok(levels[k].clone())
    }
}

/// Level data for `i >= 2` from the shared table.
pub fn level(i: u64) -> Result<Arc<Level>> {
    layout().level(i)
}

/// Where a position sits in the layout. All offsets are zero-based.
#[derive(Debug, Clone)]
pub struct Location {
    pub level: Arc<Level>,
    /// Copy of `X_i` (so `j = copy + 1`).
    pub copy: BigUint,
    /// Run index `z` within the copy.
    pub run: BigUint,
    /// Offset within the `2 n_i` period; `< n_i` means a small base.
    pub phase: BigUint,
}

impl Location {
    pub fn is_large(&self) -> bool {
        self.phase >= self.level.n
    }

    pub fn base(&self) -> BigUint {
        if self.is_large() {
            self.level.beta.clone()
        } else {
            BigUint::from(self.level.i)
        }
    }
}

/// Index `i(n)` of the block region holding `n` together with the offsets.
pub fn locate(n: &Position) -> Result<Location> {
    let level = layout().level_containing(n)?;
    let off = n - &level.start - 1u32;
    let (copy, within) = off.div_rem(&level.copy_len);
    let (run, phase) = within.div_rem(&level.period);
    Ok(Location {
        level,
        copy,
        run,
        phase,
    })
}

/// The constructed basic sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConstructedQ;

impl BasicSequence for ConstructedQ {
    fn base_at(&self, n: &Position) -> BigUint {
        base_at(n).expect("base_at on a valid position")
    }
}

pub fn base_at(n: &Position) -> Result<BigUint> {
    Ok(locate(n)?.base())
}

/// Digit `E_n` of `eta`: `i!` at large bases, the `script L_i` block digit at
/// small ones.
pub fn eta_digit(n: &Position) -> Result<BigUint> {
    let loc = locate(n)?;
    Ok(eta_digit_at(&loc))
}

pub(crate) fn eta_digit_at(loc: &Location) -> BigUint {
    if loc.is_large() {
        loc.level.factorial.clone()
    } else {
        loc.level.block_digit(&loc.run, &loc.phase)
    }
}

/// `eta`'s digits on `[start, start + len)`.
pub fn eta_prefix(start: &Position, len: usize) -> Result<DigitPrefix> {
    check_position(start)?;
    let mut digits = Vec::with_capacity(len);
    let mut bases = Vec::with_capacity(len);
    let mut n = start.clone();
    for _ in 0..len {
        let loc = locate(&n)?;
        digits.push(eta_digit_at(&loc));
        bases.push(loc.base());
        n += 1u32;
    }
    DigitPrefix::new(start.clone(), digits, bases)
}

/// The `z`-th block of `script L_i` in lexicographic order: base-`i` digits
/// of `z i!`, left-padded to `n_i`.
pub fn small_block(i: u64, z: &BigUint) -> Result<Vec<u64>> {
    let level = level(i)?;
    if *z >= level.ell {
        return Err(Error::OutOfRange {
            what: "block index z",
            value: z.to_string(),
            range: format!("[0, {})", level.ell),
        });
    }
    let len = level.n.to_usize().ok_or_else(|| Error::BudgetExceeded {
        needed: level.n.clone(),
        budget: usize::MAX as u64,
    })?;
    let mut v = z * &level.factorial;
    let mut digits = vec![0u64; len];
    for slot in digits.iter_mut().rev() {
        let (q, r) = v.div_rem(&BigUint::from(i));
        *slot = r.to_u64().expect("digit below i");
        v = q;
    }
    debug_assert!(v.is_zero(), "block value exceeds i^n_i");
    Ok(digits)
}

/// Position range of the `j`-th copy of `X_i`, `1 <= j <= L_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentAddress {
    pub i: u64,
    pub j: BigUint,
    pub first: Position,
    pub last: Position,
}

impl SegmentAddress {
    pub fn len(&self) -> BigUint {
        &self.last - &self.first + 1u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn segment_bounds(i: u64, j: &BigUint) -> Result<SegmentAddress> {
    let level = level(i)?;
    if j.is_zero() || *j > level.copies {
        return Err(Error::OutOfRange {
            what: "copy j",
            value: j.to_string(),
            range: format!("[1, {}]", level.copies),
        });
    }
    let first = &level.start + (j - 1u32) * &level.copy_len + 1u32;
    let last = &first + &level.copy_len - 1u32;
    Ok(SegmentAddress {
        i,
        j: j.clone(),
        first,
        last,
    })
}

/// A triple `(i, c, d)` with `0 <= c < upsilon_i` and `0 <= d < s_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoranIndex {
    pub i: u64,
    pub c: BigUint,
    pub d: BigUint,
}

/// `Phi_alpha(i, c, d) = sum_{j<i} upsilon_j s_j + c s_i + d`, zero-based.
pub fn phi_alpha(t: &MoranIndex) -> Result<BigUint> {
    if t.i == 1 {
        // upsilon_1 s_1 = 0: no valid triples at i = 1.
        return Err(Error::InvalidArgument("no triples at i = 1".into()));
    }
    let level = level(t.i)?;
    if t.c >= level.runs || t.d >= level.n {
        return Err(Error::InvalidArgument(format!(
            "triple ({}, {}, {}) outside 0 <= c < {} and 0 <= d < {}",
            t.i, t.c, t.d, level.runs, level.n
        )));
    }
    Ok(&level.alpha_start + &t.c * &level.n + &t.d)
}

pub fn phi_alpha_inv(m: &BigUint) -> Result<MoranIndex> {
    let level = layout().level_containing_alpha(m)?;
    let (c, d) = (m - &level.alpha_start).div_rem(&level.n);
    Ok(MoranIndex { i: level.i, c, d })
}

/// `G(i, c, d) = sum_{j<i} upsilon_j (s_j + t_j) + c (s_i + t_i) + d`: the
/// zero-based position of the small base indexed by the triple.
pub fn g_of(t: &MoranIndex) -> Result<BigUint> {
    phi_alpha(t)?;
    let level = level(t.i)?;
    Ok(&level.start + &t.c * &level.period + &t.d)
}

/// Zero-based small-base index of a position, or `None` at large bases.
pub fn alpha_index(n: &Position) -> Result<Option<BigUint>> {
    let loc = locate(n)?;
    if loc.is_large() {
        return Ok(None);
    }
    let c = &loc.copy * &loc.level.ell + &loc.run;
    Ok(Some(&loc.level.alpha_start + c * &loc.level.n + &loc.phase))
}

/// `F_m`: the `m`-th digit of the concatenated small-base block stream.
pub fn f_digit(m: &BigUint) -> Result<BigUint> {
    let t = phi_alpha_inv(m)?;
    let level = level(t.i)?;
    Ok(level.block_digit(&(&t.c % &level.ell), &t.d))
}

/// `I_i = {d : 1 <= d <= K_i, m_i | d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IDescriptor {
    pub i: u64,
    /// `K_i = floor(beta_i^{1 - 1/ln i})`.
    pub bound: BigUint,
    /// `m_i = floor(sqrt i)!`.
    pub modulus: BigUint,
    /// Bits of precision at which `K_i` certified.
    pub precision_used: u32,
}

impl IDescriptor {
    pub fn contains(&self, d: &BigUint) -> bool {
        !d.is_zero() && *d <= self.bound && d.is_multiple_of(&self.modulus)
    }

    pub fn cardinality(&self) -> BigUint {
        &self.bound / &self.modulus
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality().is_zero()
    }

    pub fn min(&self) -> Option<BigUint> {
        (!self.is_empty()).then(|| self.modulus.clone())
    }

    /// The `u`-th member, `0 <= u < cardinality`.
    pub fn nth(&self, u: &BigUint) -> Option<BigUint> {
        (*u < self.cardinality()).then(|| (u + 1u32) * &self.modulus)
    }
}

/// `2 ln(i!) (1 - 1/ln i)`, i.e. `ln` of `beta_i^{1 - 1/ln i}`.
fn log_bound_exponent(i: u64, prec: u32) -> Option<Interval> {
    let ln_i = interval::ln_integer(&BigInt::from(i), prec).ok()?;
    let ln_fact = interval::ln_integer(&BigInt::from(factorial(i)), prec).ok()?;
    let one = Interval::from_i64(1, prec);
    let shrink = one.sub(&one.div(&ln_i).ok()?);
    Some(ln_fact.mul_int(&BigInt::from(2)).mul(&shrink))
}

/// Certify `K` as `floor(beta_i^{1 - 1/ln i})` at precision `prec`: take the
/// floor of an enclosure of the power, then confirm
/// `K^{ln i} <= (i!)^{2(ln i - 1)} < (K+1)^{ln i}` in log form.
fn certify_bound(i: u64, prec: u32) -> Option<BigUint> {
    let y = log_bound_exponent(i, prec)?;
    let k = y.exp().certified_floor()?;
    let k = k.to_biguint()?;
    let ln_i = interval::ln_integer(&BigInt::from(i), prec).ok()?;
    let ln_fact = interval::ln_integer(&BigInt::from(factorial(i)), prec).ok()?;
    let rhs = ln_fact
        .mul_int(&BigInt::from(2))
        .mul(&ln_i.sub(&Interval::from_i64(1, prec)));
    let zero = crate::Rational::zero();
    let rhs_minus = |v: &Interval| rhs.sub(v);
    // Lower side: K^{ln i} <= rhs power (trivial for K = 0).
    if !k.is_zero() {
        let lhs = interval::ln_integer(&BigInt::from(k.clone()), prec)
            .ok()?
            .mul(&ln_i);
        if rhs_minus(&lhs).compare_ge(&zero) != Some(true) {
            return None;
        }
    }
    let lhs_next = interval::ln_integer(&BigInt::from(&k + 1u32), prec)
        .ok()?
        .mul(&ln_i);
    if rhs_minus(&lhs_next).upper() < zero {
        Some(k)
    } else {
        None
    }
}

pub fn i_descriptor_with_cap(i: u64, cap: u32) -> Result<IDescriptor> {
    if i < 2 {
        return Err(index_error(i, 2));
    }
    let (bound, precision_used) = certify(cap, |p| certify_bound(i, p))?;
    Ok(IDescriptor {
        i,
        bound,
        modulus: factorial(i.sqrt()),
        precision_used,
    })
}

/// Memoized `I_i` at the default precision cap.
pub fn i_descriptor(i: u64) -> Result<IDescriptor> {
    static CACHE: OnceLock<RwLock<HashMap<u64, IDescriptor>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(d) = cache.read().expect("cache lock").get(&i) {
        return Ok(d.clone());
    }
    let d = i_descriptor_with_cap(i, DEFAULT_PRECISION_CAP)?;
    cache
        .write()
        .expect("cache lock")
        .entry(i)
        .or_insert_with(|| d.clone());
    Ok(d)
}

/// The allowed digit set `V(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitSet {
    /// Large-base position: any member of `I_{i(n)}`.
    Large(IDescriptor),
    /// Small-base position: exactly `F_{G(n)}`.
    Fixed(BigUint),
}

impl DigitSet {
    pub fn contains(&self, d: &BigUint) -> bool {
        match self {
            DigitSet::Large(desc) => desc.contains(d),
            DigitSet::Fixed(f) => d == f,
        }
    }
}

/// `V(n)`: the offset `n - start_{i(n)} - 1` taken mod `s + t` selects
/// `I_{i(n)}` when it is at least `s_{i(n)}`.
pub fn v_of(n: &Position) -> Result<DigitSet> {
    let loc = locate(n)?;
    if loc.is_large() {
        Ok(DigitSet::Large(i_descriptor(loc.level.i)?))
    } else {
        Ok(DigitSet::Fixed(loc.level.block_digit(&loc.run, &loc.phase)))
    }
}

/// Whether every held digit lies in its `V(n)` (and sits over the
/// constructed base).
pub fn theta_contains(prefix: &DigitPrefix) -> Result<bool> {
    for (n, d, b) in prefix.iter() {
        let loc = locate(&n)?;
        if loc.base() != *b {
            return Ok(false);
        }
        let ok = if loc.is_large() {
            i_descriptor(loc.level.i)?.contains(d)
        } else {
            *d == loc.level.block_digit(&loc.run, &loc.phase)
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn position_rng(seed: u64, n: &Position) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"qcantor-theta");
    h.update(seed.to_le_bytes());
    h.update(n.to_bytes_le());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Digit of the seeded sample of `Theta` at `n`: uniform over `I_{i(n)}` at
/// large bases, `F` at small ones. Independent of every other position.
pub fn theta_digit(seed: u64, n: &Position) -> Result<BigUint> {
    let loc = locate(n)?;
    if !loc.is_large() {
        return Ok(loc.level.block_digit(&loc.run, &loc.phase));
    }
    let desc = i_descriptor(loc.level.i)?;
    let card = desc.cardinality();
    if card.is_zero() {
        return Err(Error::EmptyDigitSet(loc.level.i));
    }
    let u = position_rng(seed, n).gen_biguint_below(&card);
    Ok(desc.nth(&u).expect("u below cardinality"))
}

/// Seeded sample of `Theta` on `[start, start + len)`.
pub fn theta_sample(seed: u64, start: &Position, len: usize) -> Result<DigitPrefix> {
    check_position(start)?;
    let mut digits = Vec::with_capacity(len);
    let mut bases = Vec::with_capacity(len);
    let mut n = start.clone();
    for _ in 0..len {
        digits.push(theta_digit(seed, &n)?);
        bases.push(base_at(&n)?);
        n += 1u32;
    }
    DigitPrefix::new(start.clone(), digits, bases)
}

/// Enclosure of `ln |I_i| / ln beta_i`.
#[derive(Debug, Clone)]
pub struct DimRatio {
    pub i: u64,
    pub cardinality: BigUint,
    pub value: Interval,
}

pub fn dim_ratio(i: u64, prec: u32) -> Result<DimRatio> {
    if i < 3 {
        return Err(index_error(i, 3));
    }
    let desc = i_descriptor(i)?;
    let card = desc.cardinality();
    if card.is_zero() {
        return Err(Error::EmptyDigitSet(i));
    }
    let num = interval::ln_integer(&BigInt::from(card.clone()), prec)?;
    let den = interval::ln_integer(&BigInt::from(factorial(i).pow(2)), prec)?;
    Ok(DimRatio {
        i,
        cardinality: card,
        value: num.div(&den)?,
    })
}

/// Per-index parameters of the construction.
#[derive(Debug, Clone)]
pub struct ConstructionParams {
    pub i: u64,
    pub n: BigUint,
    /// `eps_i = n_i^{-1/4}`; absent at `i = 1`.
    pub eps: Option<Interval>,
    pub alpha: u64,
    pub beta: BigUint,
    /// `s_i = t_i = n_i`.
    pub s: BigUint,
    pub t: BigUint,
    pub upsilon: BigUint,
    pub ell: BigUint,
    pub copies: BigUint,
}

/// Parameters for index `i`. The `i = 1` level is empty: `n_1 = 0`,
/// `upsilon_1 = L_1 = 0`, `l_1 = 1` (the empty block).
pub fn params(i: u64) -> Result<ConstructionParams> {
    if i == 0 {
        return Err(index_error(i, 1));
    }
    if i == 1 {
        return Ok(ConstructionParams {
            i,
            n: BigUint::zero(),
            eps: None,
            alpha: 1,
            beta: BigUint::one(),
            s: BigUint::zero(),
            t: BigUint::zero(),
            upsilon: BigUint::zero(),
            ell: BigUint::one(),
            copies: BigUint::zero(),
        });
    }
    let level = level(i)?;
    let prec = 128;
    let ln_n = interval::ln_integer(&BigInt::from(level.n.clone()), prec)?;
    let eps = ln_n.div_int(&BigInt::from(4)).neg().exp();
    Ok(ConstructionParams {
        i,
        n: level.n.clone(),
        eps: Some(eps),
        alpha: i,
        beta: level.beta.clone(),
        s: level.n.clone(),
        t: level.n.clone(),
        upsilon: level.runs.clone(),
        ell: level.ell.clone(),
        copies: level.copies.clone(),
    })
}
