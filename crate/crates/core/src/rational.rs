use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Always `p/q`, so that exactness is visible in files and reports.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a rational: {0:?}")]
pub struct RationalParseError(pub String);

/// Accepts `p/q`, integers and plain decimals like `0.125` (read exactly).
pub fn parse_q(s: &str) -> Result<Q, RationalParseError> {
    let t = s.trim();
    let err = || RationalParseError(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err())?
    };
    let d = num_traits::pow(BigInt::from(10), frac_part.len());
    let v = Q::new(n, d);
    Ok(if neg { -v } else { v })
}

pub fn is_probability(x: &Q) -> bool {
    !x.is_negative() && *x <= Q::one()
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions with the usual semiconvergent check).
pub fn best_rational(x: f64, max_den: i64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let max_den = max_den as i128;
    for _ in 0..64 {
        let a = v.floor() as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den {
            // semiconvergent
            let t = (max_den - k0) / k1;
            let hs = t * h1 + h0;
            let ks = t * k1 + k0;
            let cand_a = hs as f64 / ks as f64;
            let cand_b = h1 as f64 / k1 as f64;
            if (cand_a - x.abs()).abs() < (cand_b - x.abs()).abs() {
                h1 = hs;
                k1 = ks;
            }
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    let r = Q::new(BigInt::from(h1), BigInt::from(k1));
    if neg {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_q("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_q("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_q("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_q("2").unwrap(), qi(2));
        assert_eq!(parse_q(".5").unwrap(), q(1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1e-3").is_err());
    }

    #[test]
    fn formats_as_fraction() {
        assert_eq!(fmt_q(&q(2, 4)), "1/2");
        assert_eq!(fmt_q(&qi(1)), "1/1");
        assert_eq!(fmt_q(&Q::zero()), "0/1");
    }

    #[test]
    fn snaps_known_values() {
        assert_eq!(best_rational(0.135, 1_000_000), q(27, 200));
        assert_eq!(best_rational(1.0 / 3.0, 1_000_000), q(1, 3));
        assert_eq!(best_rational(0.625, 1000), q(5, 8));
        assert_eq!(best_rational(0.0, 1000), Q::zero());
        assert_eq!(best_rational(-0.25, 1000), q(-1, 4));
    }
}
