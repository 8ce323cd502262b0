use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;

use qcantor::combinatorics::{
    count_bad_blocks, count_bad_k1, eps_k_normal, p_count, DEFAULT_DP_BUDGET,
    DEFAULT_ENUMERATION_BUDGET,
};
use qcantor::construction::{self, ConstructedQ};
use qcantor::rational::ratio;
use qcantor::series::{expand_rational, qnk, reconstruct, tq, BasicSequence, Periodic};
use qcantor::stats::{count_block, star_discrepancy, Block};
use qcantor::transforms::{tau_digit, tau_prefix, tau_rational, AffineMap, DigitOracle, RationalDigits};
use qcantor::Rational;

fn periodic() -> impl Strategy<Value = Periodic> {
    prop::collection::vec(2u64..12, 1..5).prop_map(|p| Periodic::new(p).unwrap())
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..5000).prop_flat_map(|d| (0..d).prop_map(move |n| ratio(n, d)))
}

fn u(n: u64) -> BigUint {
    BigUint::from(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn digits_stay_below_their_bases(q in periodic(), x in unit_rational(), n in 1usize..60) {
        let e = expand_rational(&x, &q, n);
        for (d, b) in e.digits().iter().zip(e.prefix().bases()) {
            prop_assert!(d < b);
        }
    }

    #[test]
    fn expansion_error_is_below_one_unit(q in periodic(), x in unit_rational(), n in 1usize..40) {
        let e = expand_rational(&x, &q, n);
        let approx = reconstruct(&e);
        let unit: BigUint = q.bases(&u(1), n).into_iter().product();
        let gap = &x - &approx;
        prop_assert!(gap >= Rational::zero());
        prop_assert!(gap * Rational::from_integer(BigInt::from(unit)) < Rational::one());
    }

    #[test]
    fn shift_identity(q in periodic(), x in unit_rational(), n in 0usize..30) {
        // x = (E_1...E_n as a fraction) + T_{Q,n}(x) / (q_1...q_n)
        let e = expand_rational(&x, &q, n);
        let unit: BigUint = q.bases(&u(1), n).into_iter().product();
        let t = tq(&x, &q, n);
        prop_assert!(t >= Rational::zero() && t < Rational::one());
        prop_assert_eq!(reconstruct(&e) + t / Rational::from_integer(BigInt::from(unit)), x);
    }

    #[test]
    fn qnk_grows_in_n_and_shrinks_in_k(q in periodic(), n in 1usize..40, k in 1usize..4) {
        let a = qnk(&q, n, k).unwrap();
        prop_assert!(qnk(&q, n + 1, k).unwrap() > a);
        prop_assert!(qnk(&q, n, k + 1).unwrap() < a);
    }

    #[test]
    fn count_block_is_additive(x in unit_rational(), block in prop::collection::vec(0u64..3, 1..3),
                               n in 1u64..80, extra in 0u64..40) {
        let q = Periodic::constant(3).unwrap();
        let oracle = RationalDigits::new(x, q);
        let b = Block::from_u64s(&block).unwrap();
        let k = block.len() as u64;
        let whole = count_block(&oracle, &b, n + extra).unwrap();
        let head = count_block(&oracle, &b, n).unwrap();
        // Starts in (n - k + 1, n + extra - k + 1], scanned directly.
        let digits = oracle.prefix(&u(1), (n + extra) as usize).unwrap();
        let first = if n >= k { n - k + 1 } else { 0 };
        let mut tail = 0;
        for m in first..(n + extra).saturating_sub(k - 1) {
            let m = m as usize;
            if digits.digits()[m..m + block.len()].iter().zip(&block).all(|(a, b)| *a == u(*b)) {
                tail += 1;
            }
        }
        prop_assert_eq!(whole, head + tail);
    }

    #[test]
    fn p_count_partitions_all_blocks(b in 2u64..9, n in 0u64..40) {
        let total: BigUint = (0..=n).map(|k| p_count(b, n, k).unwrap()).sum();
        prop_assert_eq!(total, u(b).pow(n as u32));
    }

    #[test]
    fn tau_rational_matches_tau_digit(x in unit_rational(), rn in 1i64..20, rd in 1i64..20,
                                      sn in -20i64..20, sd in 1i64..20, n in 1u64..25) {
        let q = Periodic::new([2u32, 3, 5]).unwrap();
        let m = AffineMap::new(ratio(rn, rd), ratio(sn, sd)).unwrap();
        let y = tau_rational(&m, &x);
        let oracle = RationalDigits::new(x, q.clone());
        // A terminating image has two expansions; the enclosure may then
        // legitimately stay open, so only resolved digits are compared.
        if let Ok(d) = tau_digit(&m, &oracle, n, 1 << 10) {
            let e = expand_rational(&y, &q, n as usize);
            prop_assert_eq!(&d, &e.digits()[n as usize - 1]);
        }
    }

    #[test]
    fn tau_prefix_carries_the_integer_part(x in unit_rational(), rn in -9i64..10, s in -9i64..10) {
        prop_assume!(rn != 0);
        let q = Periodic::constant(7).unwrap();
        let m = AffineMap::new(ratio(rn, 1), ratio(s, 3)).unwrap();
        let oracle = RationalDigits::new(x.clone(), q.clone());
        if let Ok((e0, p)) = tau_prefix(&m, &oracle, 12, 1 << 10) {
            let y = tau_rational(&m, &x);
            prop_assert_eq!(e0, y.floor().to_integer());
            let e = expand_rational(&y, &q, 12);
            prop_assert_eq!(p.digits(), e.digits());
        }
    }

    #[test]
    fn discrepancy_bounds(points in prop::collection::vec(unit_rational(), 1..40)) {
        let d = star_discrepancy(&points).unwrap();
        let n = Rational::from_integer(BigInt::from(points.len()));
        prop_assert!(d >= Rational::one() / (n * ratio(2, 1)));
        prop_assert!(d <= Rational::one());
    }

    #[test]
    fn eta_digits_stay_in_range(n in 1u64..100_000) {
        let d = construction::eta_digit(&u(n)).unwrap();
        prop_assert!(d < ConstructedQ.base_at(&u(n)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bad_blocks_shrink_as_eps_grows(b in 2u64..4, n in 2u64..9, k in 1u64..3,
                                      e1 in 1i64..16, e2 in 1i64..16) {
        prop_assume!(k <= n);
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let small = count_bad_blocks(b, n, &ratio(lo, 16), k, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let large = count_bad_blocks(b, n, &ratio(hi, 16), k, DEFAULT_ENUMERATION_BUDGET).unwrap();
        prop_assert!(large <= small);
    }

    #[test]
    fn dp_and_enumeration_agree(b in 2u64..5, n in 1u64..9, e in 1i64..20) {
        let eps = ratio(e, 20);
        prop_assert_eq!(
            count_bad_k1(b, n, &eps, DEFAULT_DP_BUDGET).unwrap(),
            count_bad_blocks(b, n, &eps, 1, DEFAULT_ENUMERATION_BUDGET).unwrap()
        );
    }

    #[test]
    fn union_bound_over_digits(b in 2u64..4, n in 1u64..9, e in 1i64..20) {
        // A bad block has some digit whose count strays; each digit's strays
        // number sum_{j outside} p_b(n, j).
        let eps = ratio(e, 20);
        let center = ratio(n as i64, b as i64);
        let spread = &eps * ratio(n as i64, 1);
        let strays: BigUint = (0..=n)
            .filter(|&j| {
                let j = ratio(j as i64, 1);
                j < &center - &spread || j > &center + &spread
            })
            .map(|j| p_count(b, n, j).unwrap())
            .sum();
        let bad = count_bad_k1(b, n, &eps, DEFAULT_DP_BUDGET).unwrap();
        prop_assert!(bad <= strays * b);
    }

    #[test]
    fn eps_k_normal_agrees_with_direct_counts(block in prop::collection::vec(0u64..3, 3..12),
                                              k in 1u64..3, e in 1i64..12) {
        let eps = ratio(e, 12);
        let n = block.len() as i64;
        let b = 3u64;
        let bk = 3i64.pow(k as u32);
        let ok = (0..bk).all(|w| {
            let word: Vec<u64> = (0..k).rev().map(|p| (w as u64 / b.pow(p as u32)) % b).collect();
            let c = block.windows(k as usize).filter(|win| *win == word.as_slice()).count() as i64;
            let c = ratio(c, 1);
            c >= (ratio(1, bk) - &eps) * ratio(n, 1) && c <= (ratio(1, bk) + &eps) * ratio(n, 1)
        });
        prop_assert_eq!(eps_k_normal(&block, b, k, &eps).unwrap(), ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn phi_alpha_round_trips_at_depth(i in 3u64..12, c in any::<u64>(), d in any::<u64>()) {
        let lvl = construction::level(i).unwrap();
        let t = construction::MoranIndex {
            i,
            c: u(c) % &lvl.runs,
            d: u(d) % &lvl.n,
        };
        let m = construction::phi_alpha(&t).unwrap();
        prop_assert_eq!(construction::phi_alpha_inv(&m).unwrap(), t.clone());
        let pos = construction::g_of(&t).unwrap() + 1u32;
        prop_assert_eq!(construction::alpha_index(&pos).unwrap(), Some(m));
    }

    #[test]
    fn theta_samples_lie_in_theta(seed in any::<u64>(), i in 3u64..14, off in any::<u64>()) {
        let lvl = construction::level(i).unwrap();
        let start = &lvl.start + 1u32 + u(off) % (&lvl.region_len - 64u32);
        let p = construction::theta_sample(seed, &start, 64).unwrap();
        prop_assert!(construction::theta_contains(&p).unwrap());
    }

    #[test]
    fn mult_block_scales_the_window(start in 1u64..2000, len in 1usize..5, seed in any::<u64>()) {
        use num_bigint::RandBigInt;
        use rand::SeedableRng;
        let bases = ConstructedQ.bases(&u(start), len);
        let modulus: BigUint = bases.iter().product();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let packed = rng.gen_biguint_range(&BigUint::one(), &modulus);
        let target = rng.gen_biguint_below(&modulus);
        prop_assume!(!target.is_zero());
        let r = Rational::new(BigInt::from(target), BigInt::from(packed.clone()));
        let mut digits = vec![BigUint::zero(); len];
        let mut rest = packed;
        for (slot, b) in digits.iter_mut().zip(&bases).rev() {
            *slot = &rest % b;
            rest /= b;
        }
        let e = qcantor::DigitPrefix::new(u(start), digits, bases).unwrap();
        let out = qcantor::transforms::mult_block(&e, &r).unwrap();
        let scaled = &r * qcantor::transforms::window_value(&e, &ConstructedQ).unwrap();
        prop_assert_eq!(qcantor::transforms::window_value(&out, &ConstructedQ).unwrap(), scaled);
    }

    #[test]
    fn true_verdicts_survive_more_precision(n in 64u64..600, e in 1i64..16) {
        use qcantor::combinatorics::{check_k1, Verdict};
        let eps = ratio(e, 16);
        let coarse = check_k1(2, n, &eps, 64).unwrap();
        let fine = check_k1(2, n, &eps, 128).unwrap();
        prop_assert_eq!(&coarse.lhs, &fine.lhs);
        if coarse.verdict == Verdict::True {
            prop_assert_eq!(fine.verdict, Verdict::True);
        }
        prop_assert!(coarse.rhs_lower_bound <= coarse.rhs_upper_bound);
    }
}
