//! High-precision helpers on top of `astro-float`, used when `f64` cannot
//! certify a floor or ceiling.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigUint;
use num_traits::Zero;
use std::cell::RefCell;

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Exact conversion of a big integer.
pub fn from_biguint(u: &BigUint) -> BigFloat {
    if u.is_zero() {
        return BigFloat::from_word(0, 64);
    }
    let words = u.to_u64_digits();
    BigFloat::from_words(&words, Sign::Pos, (words.len() * 64) as i32)
}

pub fn from_f64(x: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(x, p)
}

pub fn from_u64(x: u64, p: usize) -> BigFloat {
    BigFloat::from_u64(x, p)
}

pub fn ln(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.ln(p, RM, cc))
}

pub fn exp(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.exp(p, RM, cc))
}

pub fn add(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.add(b, p, RM)
}

pub fn sub(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.sub(b, p, RM)
}

pub fn mul(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.mul(b, p, RM)
}

pub fn div(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.div(b, p, RM)
}

/// Natural log of a big integer at precision `p`.
pub fn ln_biguint(u: &BigUint, p: usize) -> BigFloat {
    ln(&from_biguint(u), p)
}

/// Floor of a nonnegative finite value as a big integer.
pub fn floor_to_biguint(x: &BigFloat) -> Option<BigUint> {
    if x.is_nan() || x.is_inf() || x.is_negative() {
        return None;
    }
    let f = x.floor();
    if f.is_zero() {
        return Some(BigUint::zero());
    }
    let (m, _n, _s, e, _) = f.as_raw_parts()?;
    let e = e as i64;
    let mant = BigUint::from_slice(
        &m.iter().flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32]).collect::<Vec<_>>(),
    );
    let mbits = (m.len() * 64) as i64;
    Some(if e >= mbits { mant << ((e - mbits) as u64) } else { mant >> ((mbits - e) as u64) })
}

pub fn to_f64(x: &BigFloat) -> f64 {
    let s = format!("{}", x);
    s.parse::<f64>().unwrap_or(f64::NAN)
}

/// `x * (1 + s * 2^-k)` for `s = +-1`.
fn nudge(x: &BigFloat, k: usize, up: bool, p: usize) -> BigFloat {
    let mut eps = BigFloat::from_word(1, 64);
    eps.set_exponent(1 - k as i32);
    let one = BigFloat::from_word(1, 64);
    let f = if up { one.add(&eps, p, RM) } else { one.sub(&eps, p, RM) };
    x.mul(&f, p, RM)
}

/// Integer floor of a positive quantity known to relative accuracy `2^-slack`.
/// Returns `None` when the enclosure straddles an integer.
pub fn certain_floor(x: &BigFloat, slack: usize, p: usize) -> Option<BigUint> {
    let lo = nudge(x, slack, false, p);
    let hi = nudge(x, slack, true, p);
    let a = floor_to_biguint(&lo)?;
    let b = floor_to_biguint(&hi)?;
    (a == b).then_some(a)
}

/// Smallest integer `>= (num/den)^gamma`, certified by escalating precision.
pub fn ceil_pow_rational(num: &BigUint, den: &BigUint, gamma: u64) -> Result<BigUint> {
    if gamma == 0 {
        return Ok(BigUint::from(1u32));
    }
    let ratio = crate::cf::ratio_f64(num, den);
    let bits = (gamma as f64 * ratio.log2()).max(0.0) as usize + 8;
    let mut p = bits + 128;
    for _ in 0..4 {
        let w = p + 64;
        let l = sub(&ln_biguint(num, w), &ln_biguint(den, w), w);
        let arg = mul(&l, &from_u64(gamma, 64), w);
        let v = exp(&arg, w);
        let lo = nudge(&v, p, false, w);
        let hi = nudge(&v, p, true, w);
        let fl = floor_to_biguint(&lo);
        let fh = floor_to_biguint(&hi);
        if let (Some(a), Some(b)) = (fl, fh) {
            if a == b {
                // (num/den)^gamma is never an integer for gamma >= 1 and num/den in lowest terms with den > 1
                return Ok(a + 1u32);
            }
        }
        p *= 2;
    }
    Err(Error::FloorUncertain(format!(
        "ceil of ({num}/{den})^{gamma} not certified"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_biguint() {
        let u = BigUint::from(12345678901234567890u64) * BigUint::from(987654321u64);
        let f = from_biguint(&u);
        assert_eq!(floor_to_biguint(&f).unwrap(), u);
    }

    #[test]
    fn ceil_pow_small() {
        // (3/2)^5 = 7.59375
        let c = ceil_pow_rational(&BigUint::from(3u32), &BigUint::from(2u32), 5).unwrap();
        assert_eq!(c, BigUint::from(8u32));
        // (1001/1000)^1000 = 2.7169...
        let c = ceil_pow_rational(&BigUint::from(1001u32), &BigUint::from(1000u32), 1000).unwrap();
        assert_eq!(c, BigUint::from(3u32));
    }

    #[test]
    fn ceil_pow_matches_exact() {
        let num = BigUint::from(2001u32);
        let den = BigUint::from(2000u32);
        let g = 3000u64;
        let c = ceil_pow_rational(&num, &den, g).unwrap();
        let n = num.pow(g as u32);
        let d = den.pow(g as u32);
        let exact = (&n + &d - 1u32) / &d;
        assert_eq!(c, exact);
    }

    #[test]
    fn ln_matches_f64() {
        let v = to_f64(&ln_biguint(&BigUint::from(1000u32), 128));
        assert!((v - 1000f64.ln()).abs() < 1e-14);
    }
}
