//! Exact rational helpers shared by every module.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `7`, `-3/4`, `0.9999`, `1.5e-3` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

/// `p/q` or `p` when the denominator is one.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact binary value of a finite float.
pub fn from_f64_exact(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

/// Best rational approximation of `v` with denominator at most `max_den`
/// (continued-fraction convergents plus the best semiconvergent).
pub fn limit_denominator(v: &Rational, max_den: &BigInt) -> Rational {
    if v.denom() <= max_den {
        return v.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut n = v.numer().clone();
    let mut d = v.denom().clone();
    loop {
        let (a, r) = n.div_mod_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        if r.is_zero() {
            break;
        }
        n = std::mem::replace(&mut d, r);
    }
    let k = (max_den - &q0) / &q1;
    let bound1 = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let bound2 = Rational::new(p1, q1);
    if (&bound2 - v).abs() <= (&bound1 - v).abs() {
        bound2
    } else {
        bound1
    }
}

/// Rational `s` with `s >= sqrt(q)` and `s - sqrt(q) <= 2e-6`, for `q >= 0`.
pub fn sqrt_upper(q: &Rational) -> Rational {
    assert!(!q.is_negative(), "square root of a negative rational");
    let scale = BigInt::from(1_000_000u64);
    // ceil(q * 10^12), then ceil of its integer square root.
    let scaled = q * Rational::from_integer(&scale * &scale);
    let ceil = scaled.ceil().to_integer();
    let mut root = ceil.sqrt();
    if &root * &root < ceil {
        root += 1;
    }
    Rational::new(root, scale)
}

pub fn is_integer_valued(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn sign(r: &Rational) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Rational serde helpers: rationals travel as `p/q` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{text}`")))
    }

    pub mod vec_opt {
        use super::*;
        use serde::Serialize;

        pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
            v.as_ref()
                .map(|xs| xs.iter().map(fmt_rational).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
            let raw = Option::<Vec<String>>::deserialize(d)?;
            raw.map(|xs| {
                xs.iter()
                    .map(|t| parse_rational(t).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{t}`"))))
                    .collect()
            })
            .transpose()
        }
    }
}
