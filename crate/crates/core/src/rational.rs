use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact fraction in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Parse `"p/q"` or `"p"` with decimal integers. The denominator must be
/// positive.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::MalformedRational(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let valid = |x: &str, signed: bool| {
        let digits = if signed {
            x.strip_prefix('-').or(x.strip_prefix('+')).unwrap_or(x)
        } else {
            x
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return Err(bad());
    }
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn from_uint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// `p/q` rendering used in CSV and JSON output.
pub fn render(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering with 12 significant digits, computed exactly.
pub fn render_decimal(x: &Rational) -> String {
    const SIG: i64 = 12;
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    // Find e with 10^e <= a < 10^(e+1), starting from a float estimate.
    let mut e = a
        .to_f64()
        .filter(|v| v.is_finite() && *v > 0.0)
        .map(|v| v.log10().floor() as i64)
        .unwrap_or_else(|| a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64);
    let ten = BigInt::from(10);
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(ten.pow(k as u32))
        } else {
            Rational::new(BigInt::from(1), ten.pow((-k) as u32))
        }
    };
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }
    // Round half away from zero to SIG significant digits.
    let scaled = &a * pow10(SIG - 1 - e);
    let mut m = scaled.floor().to_integer();
    if (scaled - Rational::from_integer(m.clone())) * BigInt::from(2) >= Rational::from_integer(BigInt::from(1)) {
        m += 1;
    }
    if m == ten.pow(SIG as u32) {
        m /= &ten;
        e += 1;
    }
    let digits = m.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-4..SIG).contains(&e) {
        if e >= 0 {
            let int_len = (e + 1) as usize;
            out.push_str(&digits[..int_len]);
            let rest = digits[int_len..].trim_end_matches('0');
            if !rest.is_empty() {
                out.push('.');
                out.push_str(rest);
            }
        } else {
            out.push_str("0.");
            for _ in 0..(-e - 1) {
                out.push('0');
            }
            out.push_str(digits.trim_end_matches('0'));
        }
    } else {
        out.push_str(&digits[..1]);
        let rest = digits[1..].trim_end_matches('0');
        if !rest.is_empty() {
            out.push('.');
            out.push_str(rest);
        }
        out.push_str(&format!("e{e}"));
    }
    out
}

/// `true` when `d` divides `n`.
pub fn divides(d: &BigUint, n: &BigUint) -> bool {
    !d.is_zero() && n.is_multiple_of(d)
}
