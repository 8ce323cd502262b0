use std::io::Read;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use qcantor::combinatorics::{self, BoundCheck, Verdict};
use qcantor::construction::{self, ConstructedQ};
use qcantor::interval::{self, Interval};
use qcantor::rational::{render, render_decimal};
use qcantor::series::{expand_rational, BasicSequence, ExpansionRecord, SCAN_LIMIT};
use qcantor::stats::{self, Block};
use qcantor::transforms::{self, AffineMap, DigitOracle, EtaDigits, ThetaDigits};
use qcantor::{parse_rational, DigitPrefix, Error, Periodic, Rational, Result};

use crate::args::{Command, GlobalArgs, Lemma};
use crate::report::Report;

pub struct Outcome {
    pub report: Report,
    /// A certified comparison ran out of precision.
    pub exhausted: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome {
            report,
            exhausted: false,
        }
    }
}

pub fn run(command: &Command, g: &GlobalArgs) -> Result<Outcome> {
    match command {
        Command::Params { min_i, max_i } => params(*min_i, *max_i, g).map(Into::into),
        Command::QDigits { positions } => q_digits(positions, g).map(Into::into),
        Command::EtaDigits { positions } => {
            let (start, len) = window(positions, g)?;
            let p = construction::eta_prefix(&start, len)?;
            Ok(digits_report(&BigInt::zero(), &p, None).into())
        }
        Command::Expand { x, n, q } => expand(x, *n, q.as_deref()).map(Into::into),
        Command::Transform {
            r,
            s,
            source,
            positions,
        } => transform(r, s, source, positions, g).map(Into::into),
        Command::Stats {
            source,
            block,
            checkpoints,
        } => stats_cmd(source, block, checkpoints, g).map(Into::into),
        Command::Discrepancy { source, positions } => discrepancy(source, positions, g).map(Into::into),
        Command::Segment { source, i, j, block } => segment(source, *i, j, block, g).map(Into::into),
        Command::VerifyBounds {
            lemma,
            b,
            n,
            eps,
            k,
            timings,
        } => verify_bounds(*lemma, *b, *n, eps, *k, *timings, g),
        Command::ThetaSample { positions } => {
            let (start, len) = window(positions, g)?;
            let p = construction::theta_sample(g.seed, &start, len)?;
            Ok(digits_report(&BigInt::zero(), &p, None).into())
        }
        Command::ThetaCheck { input } => theta_check(input.as_deref()).map(Into::into),
        Command::DimRatio { i } => dim_ratio(i, g),
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// `"a..b"` (inclusive) or `"a"`, as decimal positions.
fn parse_positions(s: &str) -> Result<(BigUint, BigUint)> {
    let parse = |t: &str| {
        t.trim()
            .parse::<BigUint>()
            .map_err(|_| bad(format!("position {t:?} is not a decimal integer")))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let a = parse(s)?;
            (a.clone(), a)
        }
    };
    if a.is_zero() {
        return Err(Error::InvalidPosition(a));
    }
    if b < a {
        return Err(bad(format!("empty position range {s:?}")));
    }
    Ok((a, b))
}

/// Start and length of a position range, within the enumeration budget.
fn window(s: &str, g: &GlobalArgs) -> Result<(BigUint, usize)> {
    let (a, b) = parse_positions(s)?;
    let len = &b - &a + 1u32;
    if len > BigUint::from(g.enumeration_budget) {
        return Err(Error::BudgetExceeded {
            needed: len,
            budget: g.enumeration_budget,
        });
    }
    Ok((a, len.to_usize().expect("within budget")))
}

fn parse_source(s: &str, g: &GlobalArgs) -> Result<Box<dyn DigitOracle>> {
    match s.split_once(':') {
        None if s == "eta" => Ok(Box::new(EtaDigits)),
        None if s == "theta" => Ok(Box::new(ThetaDigits { seed: g.seed })),
        Some(("rational", x)) => Ok(Box::new(transforms::rational_over_construction(parse_rational(x)?))),
        Some(("theta", seed)) => {
            let seed = seed
                .parse()
                .map_err(|_| bad(format!("theta seed {seed:?} is not a 64-bit integer")))?;
            Ok(Box::new(ThetaDigits { seed }))
        }
        _ => Err(bad(format!(
            "unknown source {s:?}; expected eta, rational:<p/q> or theta:<seed>"
        ))),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| bad(format!("{what} entry {t:?} is not a non-negative integer")))
        })
        .collect()
}

fn parse_block(s: &str) -> Result<Block> {
    Block::new(parse_list::<BigUint>(s, "block")?)
}

fn digits_report(e0: &BigInt, p: &DigitPrefix, diff: Option<&[BigUint]>) -> Report {
    let record = ExpansionRecord::from_prefix(e0, p);
    let mut json = serde_json::to_value(&record).expect("plain strings");
    let mut headers = vec!["position", "digit", "base"];
    let mut rows: Vec<Vec<String>> = p
        .iter()
        .map(|(n, d, b)| vec![n.to_string(), d.to_string(), b.to_string()])
        .collect();
    if let Some(diff) = diff {
        json["diff"] = Value::from(diff.iter().map(ToString::to_string).collect::<Vec<_>>());
        headers.push("differs");
        for (row, (n, _, _)) in rows.iter_mut().zip(p.iter()) {
            row.push(diff.contains(&n).to_string());
        }
    }
    Report::Document {
        json,
        table: Box::new(Report::table(headers, rows)),
    }
}

fn params(min_i: u64, max_i: u64, g: &GlobalArgs) -> Result<Report> {
    if min_i < 2 || max_i < min_i {
        return Err(bad(format!("need 2 <= min-i <= max-i, got {min_i}..{max_i}")));
    }
    let rows = (min_i..=max_i)
        .map(|i| {
            let lvl = construction::level(i)?;
            let desc = construction::i_descriptor_with_cap(i, g.precision_cap)?;
            let card = desc.cardinality();
            let ratio = if card.is_zero() {
                String::new()
            } else if card == BigUint::from(1u32) {
                "0".to_string()
            } else {
                let r = construction::dim_ratio(i, 128)?;
                render_decimal(&midpoint(&r.value))
            };
            Ok(vec![
                i.to_string(),
                lvl.n.to_string(),
                lvl.ell.to_string(),
                lvl.copies.to_string(),
                lvl.beta.to_string(),
                desc.bound.to_string(),
                desc.modulus.to_string(),
                desc.cardinality().to_string(),
                ratio,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::table(
        vec!["i", "n_i", "ell_i", "L_i", "beta_i", "K_i", "m_i", "card_I_i", "dim_ratio"],
        rows,
    ))
}

fn midpoint(v: &Interval) -> Rational {
    (v.lower() + v.upper()) / Rational::from_integer(BigInt::from(2))
}

fn q_digits(positions: &str, g: &GlobalArgs) -> Result<Report> {
    let (start, len) = window(positions, g)?;
    construction::base_at(&start)?;
    let bases = ConstructedQ.bases(&start, len);
    let json = json!({
        "start": start.to_string(),
        "bases": bases.iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    let rows = bases
        .iter()
        .enumerate()
        .map(|(k, b)| vec![(&start + k).to_string(), b.to_string()])
        .collect();
    Ok(Report::Document {
        json,
        table: Box::new(Report::table(vec!["position", "base"], rows)),
    })
}

fn expand(x: &str, n: usize, q: Option<&str>) -> Result<Report> {
    let x = parse_rational(x)?;
    if n as u64 > SCAN_LIMIT {
        return Err(Error::PositionTooLarge {
            position: BigUint::from(n),
            limit: SCAN_LIMIT,
        });
    }
    let e = match q {
        Some(period) => expand_rational(&x, &Periodic::new(parse_list::<BigUint>(period, "q")?)?, n),
        None => expand_rational(&x, &ConstructedQ, n),
    };
    Ok(digits_report(e.integer_part(), e.prefix(), None))
}

fn transform(r: &str, s: &str, source: &str, positions: &str, g: &GlobalArgs) -> Result<Report> {
    let m = AffineMap::new(parse_rational(r)?, parse_rational(s)?)?;
    let src = parse_source(source, g)?;
    let (start, len) = window(positions, g)?;
    let first = start.to_u64().filter(|&a| a <= SCAN_LIMIT).ok_or_else(|| Error::PositionTooLarge {
        position: start.clone(),
        limit: SCAN_LIMIT,
    })?;
    let last = first + len as u64 - 1;
    let (e0, image) = transforms::tau_prefix(&m, src.as_ref(), last, g.lookahead_cap)?;
    let lo = (first - 1) as usize;
    let window = DigitPrefix::new(
        start.clone(),
        image.digits()[lo..].to_vec(),
        image.bases()[lo..].to_vec(),
    )?;
    let original = src.prefix(&start, len)?;
    let diff: Vec<BigUint> = window
        .iter()
        .zip(original.digits())
        .filter(|((_, a, _), b)| a != b)
        .map(|((n, _, _), _)| n)
        .collect();
    Ok(digits_report(&e0, &window, Some(&diff)))
}

fn stats_cmd(source: &str, block: &str, checkpoints: &str, g: &GlobalArgs) -> Result<Report> {
    let src = parse_source(source, g)?;
    let block = parse_block(block)?;
    let checkpoints: Vec<u64> = parse_list(checkpoints, "checkpoint")?;
    if let Some(&last) = checkpoints.last() {
        if last > g.enumeration_budget {
            return Err(Error::BudgetExceeded {
                needed: BigUint::from(last),
                budget: g.enumeration_budget,
            });
        }
    }
    let series = stats::ratio_series(src.as_ref(), &ConstructedQ, &block, &checkpoints)?;
    let rows = series
        .points
        .iter()
        .map(|p| {
            vec![
                p.n.to_string(),
                p.count.to_string(),
                render(&p.qnk),
                render(&p.ratio),
                render_decimal(&p.ratio),
            ]
        })
        .collect();
    Ok(Report::table(
        vec!["n", "count", "qnk", "ratio_exact", "ratio_decimal"],
        rows,
    ))
}

fn discrepancy(source: &str, positions: &str, g: &GlobalArgs) -> Result<Report> {
    let src = parse_source(source, g)?;
    let (start, len) = window(positions, g)?;
    let p = src.prefix(&start, len)?;
    let points: Vec<Rational> = p
        .iter()
        .map(|(_, d, b)| Rational::new(BigInt::from(d.clone()), BigInt::from(b.clone())))
        .collect();
    let d = stats::star_discrepancy(&points)?;
    Ok(Report::table(
        vec!["first", "last", "count", "discrepancy_exact", "discrepancy_decimal"],
        vec![vec![
            start.to_string(),
            p.end().to_string(),
            len.to_string(),
            render(&d),
            render_decimal(&d),
        ]],
    ))
}

fn segment(source: &str, i: u64, j: &str, block: &str, g: &GlobalArgs) -> Result<Report> {
    let src = parse_source(source, g)?;
    let j: BigUint = j
        .trim()
        .parse()
        .map_err(|_| bad(format!("copy j {j:?} is not a decimal integer")))?;
    let block = parse_block(block)?;
    let seg = construction::segment_bounds(i, &j)?;
    let count = stats::segment_count(src.as_ref(), &block, i, &j, g.enumeration_budget)?;
    let qk = stats::segment_qk(i, &j, block.len() as u64, g.enumeration_budget)?;
    Ok(Report::table(
        vec![
            "i",
            "j",
            "first",
            "last",
            "count",
            "qk_exact",
            "qk_decimal",
            "leading",
            "leading_gap",
            "asymptotic_gap",
        ],
        vec![vec![
            i.to_string(),
            j.to_string(),
            seg.first.to_string(),
            seg.last.to_string(),
            count.to_string(),
            render(&qk.exact),
            render_decimal(&qk.exact),
            render(&qk.leading),
            qk.leading_gap.as_ref().map(render).unwrap_or_default(),
            render(&qk.asymptotic_gap),
        ]],
    ))
}

#[allow(clippy::too_many_arguments)]
fn verify_bounds(
    lemma: Lemma,
    b: u64,
    n: u64,
    eps: &str,
    k: u64,
    timings: bool,
    g: &GlobalArgs,
) -> Result<Outcome> {
    let grid = eps
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    let cap = g.precision_cap;
    let checks = grid
        .par_iter()
        .map(|eps| {
            let t0 = Instant::now();
            let r = match lemma {
                Lemma::K1 => combinatorics::check_k1(b, n, eps, cap),
                Lemma::Bugeaud => combinatorics::check_bugeaud(b, n, eps, cap),
                Lemma::Epsilonk => combinatorics::check_epsilonk(b, n, eps, k, g.enumeration_budget, cap),
            }?;
            Ok((r, t0.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<(BoundCheck, f64)>>>()?;
    let exhausted = checks.iter().any(|(r, _)| r.verdict == Verdict::Inconclusive);
    let rows = checks
        .iter()
        .map(|(r, secs)| {
            vec![
                r.lemma.to_string(),
                r.b.to_string(),
                r.n.to_string(),
                r.k.to_string(),
                render(&r.eps),
                r.lhs.to_string(),
                render_decimal(&r.rhs_lower_bound),
                r.verdict.to_string(),
                r.precondition_ok.to_string(),
                r.precision_used.to_string(),
                if timings { format!("{secs:.3}") } else { String::new() },
            ]
        })
        .collect();
    Ok(Outcome {
        report: Report::table(
            vec![
                "lemma",
                "b",
                "n",
                "k",
                "eps",
                "lhs",
                "rhs_bound",
                "verdict",
                "precondition_ok",
                "precision_used",
                "seconds",
            ],
            rows,
        ),
        exhausted,
    })
}

fn theta_check(input: Option<&std::path::Path>) -> Result<Report> {
    let text = match input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| bad(format!("cannot read standard input: {e}")))?;
            s
        }
    };
    let record: ExpansionRecord =
        serde_json::from_str(&text).map_err(|e| bad(format!("not an Expansion JSON document: {e}")))?;
    let (_, prefix) = record.to_prefix()?;
    let member = construction::theta_contains(&prefix)?;
    let mut violation = String::new();
    if !member {
        for (n, d, b) in prefix.iter() {
            let allowed = construction::v_of(&n)?;
            if construction::base_at(&n)? != *b || !allowed.contains(d) {
                violation = n.to_string();
                break;
            }
        }
    }
    Ok(Report::table(
        vec!["member", "first_violation", "checked"],
        vec![vec![member.to_string(), violation, prefix.len().to_string()]],
    ))
}

fn dim_ratio(list: &str, g: &GlobalArgs) -> Result<Outcome> {
    let indices: Vec<u64> = parse_list(list, "index")?;
    let mut exhausted = false;
    let mut rows = Vec::new();
    for i in indices {
        let card = construction::i_descriptor_with_cap(i, g.precision_cap)?.cardinality();
        // Settle the comparison with 1 - 2/ln i, escalating precision.
        let settled = interval::certify(g.precision_cap, |prec| {
            let r = construction::dim_ratio(i, prec).ok()?;
            let ln_i = interval::ln_integer(&BigInt::from(i), prec).ok()?;
            let two = Interval::from_i64(2, prec);
            let threshold = Interval::from_i64(1, prec).sub(&two.div(&ln_i).ok()?);
            let verdict = if r.value.lower() >= threshold.upper() {
                Some(true)
            } else if r.value.upper() < threshold.lower() {
                Some(false)
            } else {
                None
            };
            verdict.map(|v| (r.value, threshold, v))
        });
        let (value, threshold, above) = match settled {
            Ok(((value, threshold, v), _)) => (value, threshold, v.to_string()),
            Err(e) if e.is_exhaustion() => {
                exhausted = true;
                let prec = g.precision_cap;
                let r = construction::dim_ratio(i, prec)?;
                let ln_i = interval::ln_integer(&BigInt::from(i), prec)?;
                let threshold = Interval::from_i64(1, prec).sub(&Interval::from_i64(2, prec).div(&ln_i)?);
                (r.value, threshold, "undecided".to_string())
            }
            Err(e) => return Err(e),
        };
        rows.push(vec![
            i.to_string(),
            card.to_string(),
            render_decimal(&value.lower()),
            render_decimal(&value.upper()),
            render_decimal(&midpoint(&threshold)),
            above,
        ]);
    }
    Ok(Outcome {
        report: Report::table(
            vec!["i", "card_I_i", "lower", "upper", "threshold", "above_threshold"],
            rows,
        ),
        exhausted,
    })
}
