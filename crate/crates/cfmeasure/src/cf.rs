//! Exact continued-fraction arithmetic: continuants, convergents, cylinders.
//!
//! A [`FiniteCF`] holds quotients `(c0; c1, ..., ct)` where `c0` is the integer
//! part. Its continuant `K` is the denominator `q_t` of the last convergent and
//! `K'` is `q_{t-1}`, with `q_0 = 1` and `q_{-1} = 0`. The empty sequence uses
//! `K = 1`, `K' = 0`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A finite partial-quotient sequence with cached convergent matrix.
///
/// The cache is the matrix product `prod [[c_k, 1], [1, 0]] = [[p, p'], [q, q']]`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteCF {
    quotients: Vec<BigUint>,
    p: BigUint,
    pp: BigUint,
    q: BigUint,
    qp: BigUint,
}

impl fmt::Debug for FiniteCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteCF{:?}", self.quotients_string())
    }
}

impl Default for FiniteCF {
    fn default() -> Self {
        Self::new()
    }
}

impl FiniteCF {
    /// The empty sequence.
    pub fn new() -> Self {
        FiniteCF {
            quotients: Vec::new(),
            p: BigUint::one(),
            pp: BigUint::zero(),
            q: BigUint::zero(),
            qp: BigUint::one(),
        }
    }

    pub fn from_slice(qs: &[u64]) -> Result<Self> {
        let mut cf = Self::new();
        for &c in qs {
            cf.push(BigUint::from(c))?;
        }
        Ok(cf)
    }

    pub fn from_big(qs: &[BigUint]) -> Result<Self> {
        let mut cf = Self::new();
        for c in qs {
            cf.push(c.clone())?;
        }
        Ok(cf)
    }

    /// Appends a quotient in place.
    pub fn push(&mut self, c: BigUint) -> Result<()> {
        if c.is_zero() {
            return Err(Error::InvalidInput("partial quotients must be >= 1".into()));
        }
        let np = &c * &self.p + &self.pp;
        let nq = &c * &self.q + &self.qp;
        self.pp = std::mem::replace(&mut self.p, np);
        self.qp = std::mem::replace(&mut self.q, nq);
        self.quotients.push(c);
        Ok(())
    }

    pub fn push_u64(&mut self, c: u64) -> Result<()> {
        self.push(BigUint::from(c))
    }

    /// Returns `self` extended by one quotient.
    pub fn extend(&self, c: &BigUint) -> Result<Self> {
        let mut out = self.clone();
        out.push(c.clone())?;
        Ok(out)
    }

    /// Concatenation `G . H`.
    pub fn concat(&self, other: &FiniteCF) -> FiniteCF {
        let mut out = self.clone();
        for c in &other.quotients {
            out.push(c.clone()).expect("quotients already validated");
        }
        out
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn quotients(&self) -> &[BigUint] {
        &self.quotients
    }

    pub fn quotients_string(&self) -> String {
        let parts: Vec<String> = self.quotients.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }

    /// Continuant `K(G)`.
    pub fn k(&self) -> BigUint {
        if self.is_empty() {
            BigUint::one()
        } else {
            self.q.clone()
        }
    }

    /// Continuant `K'(G)`.
    pub fn k_prime(&self) -> BigUint {
        if self.is_empty() {
            BigUint::zero()
        } else {
            self.qp.clone()
        }
    }

    pub fn k_ref(&self) -> &BigUint {
        &self.q
    }

    pub fn k_prime_ref(&self) -> &BigUint {
        &self.qp
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn p_prime(&self) -> &BigUint {
        &self.pp
    }

    /// Matrix entries `(p, p', q, q')` of the Mobius map `y -> (p y + p')/(q y + q')`.
    pub fn mobius(&self) -> (&BigUint, &BigUint, &BigUint, &BigUint) {
        (&self.p, &self.pp, &self.q, &self.qp)
    }

    /// `p q' - p' q`, equal to `(-1)^(t+1)` for a nonempty sequence of length `t+1`.
    pub fn determinant(&self) -> BigInt {
        BigInt::from(&self.p * &self.qp) - BigInt::from(&self.pp * &self.q)
    }

    /// Exact value `[c0; c1, ..., ct]`.
    pub fn value(&self) -> Result<BigRational> {
        if self.is_empty() {
            return Err(Error::InvalidInput("empty continued fraction has no value".into()));
        }
        Ok(BigRational::new(BigInt::from(self.p.clone()), BigInt::from(self.q.clone())))
    }

    pub fn value_f64(&self) -> f64 {
        ratio_f64(&self.p, &self.q)
    }

    /// Image of `y` under the Mobius map of this sequence.
    pub fn apply(&self, y: &BigRational) -> BigRational {
        let p = BigInt::from(self.p.clone());
        let pp = BigInt::from(self.pp.clone());
        let q = BigInt::from(self.q.clone());
        let qp = BigInt::from(self.qp.clone());
        let num = y * BigRational::from_integer(p) + BigRational::from_integer(pp);
        let den = y * BigRational::from_integer(q) + BigRational::from_integer(qp);
        num / den
    }

    /// `cyl(G)`: reals whose expansion begins with `G`.
    pub fn cylinder(&self) -> Result<CylinderInterval> {
        if self.is_empty() {
            return Err(Error::InvalidInput("cylinder of the empty sequence".into()));
        }
        let a = BigRational::new(BigInt::from(self.p.clone()), BigInt::from(self.q.clone()));
        let b = BigRational::new(
            BigInt::from(&self.p + &self.pp),
            BigInt::from(&self.q + &self.qp),
        );
        let t = self.len() - 1;
        Ok(if t % 2 == 0 {
            CylinderInterval { lo: a, hi: b, open: OpenSide::Right }
        } else {
            CylinderInterval { lo: b, hi: a, open: OpenSide::Left }
        })
    }

    /// `ln |cyl(G)| = -ln K - ln(K + K')`.
    pub fn ln_cylinder_width(&self) -> f64 {
        -(ln_big(&self.q) + ln_big(&(&self.q + &self.qp)))
    }

    /// Endpoints of the cylinder in floating point, ordered.
    pub fn cylinder_f64(&self) -> (f64, f64) {
        let a = ratio_f64(&self.p, &self.q);
        let b = ratio_f64(&(&self.p + &self.pp), &(&self.q + &self.qp));
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Which end of a cylinder is excluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum OpenSide {
    Right,
    Left,
}

/// Exact rational cylinder interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderInterval {
    pub lo: BigRational,
    pub hi: BigRational,
    pub open: OpenSide,
}

impl CylinderInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        match self.open {
            OpenSide::Right => &self.lo <= x && x < &self.hi,
            OpenSide::Left => &self.lo < x && x <= &self.hi,
        }
    }

    /// Closure containment of another cylinder.
    pub fn contains_interval(&self, other: &CylinderInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }
}

/// Continuant polynomial of all entries: `K() = 1`, `K(a) = a`, `K(a, b) = ab + 1`.
pub fn continuant(entries: &[u64]) -> BigUint {
    let mut km2 = BigUint::zero();
    let mut km1 = BigUint::one();
    for &a in entries {
        let next = BigUint::from(a) * &km1 + &km2;
        km2 = std::mem::replace(&mut km1, next);
    }
    km1
}

/// Continuant polynomial as `u128`, returning `None` on overflow.
pub fn continuant_u128(entries: &[u32]) -> Option<u128> {
    let mut km2: u128 = 0;
    let mut km1: u128 = 1;
    for &a in entries {
        let next = (a as u128).checked_mul(km1)?.checked_add(km2)?;
        km2 = km1;
        km1 = next;
    }
    Some(km1)
}

/// Continuant from the product of `[[c, 1], [1, 0]]` matrices; the `(0, 0)` entry.
///
/// Independent of [`continuant`]; used to cross-check the recurrence.
pub fn continuant_matrix(entries: &[u64]) -> BigUint {
    let mut m = [BigUint::one(), BigUint::zero(), BigUint::zero(), BigUint::one()];
    for &a in entries {
        let a = BigUint::from(a);
        // m * [[a, 1], [1, 0]]
        let n00 = &m[0] * &a + &m[1];
        let n10 = &m[2] * &a + &m[3];
        m = [n00, m[0].clone(), n10, m[2].clone()];
    }
    m[0].clone()
}

/// Result of [`concat_continuant_bounds`].
#[derive(Clone, Debug)]
pub struct GluingCheck {
    pub lower: BigUint,
    pub upper: BigUint,
    pub actual: BigUint,
    pub holds: bool,
}

/// `K(g)K(h) <= K(g.h) <= (N+2) K(g) K(h)` for `h` whose first quotient is at most `N`.
pub fn concat_continuant_bounds(g: &FiniteCF, h: &FiniteCF, n: u64) -> Result<GluingCheck> {
    let d0 = h
        .quotients()
        .first()
        .ok_or_else(|| Error::InvalidInput("h must be nonempty".into()))?;
    if *d0 > BigUint::from(n) {
        return Err(Error::InvalidInput(format!("first quotient of h ({d0}) exceeds N = {n}")));
    }
    let lower = g.k() * h.k();
    let upper = &lower * BigUint::from(n + 2);
    let actual = g.concat(h).k();
    let holds = lower <= actual && actual <= upper;
    Ok(GluingCheck { lower, upper, actual, holds })
}

/// Continuant of all quotients of `h` (the numerator of `[d0; d1, ...]`).
pub fn interior_continuant(h: &FiniteCF) -> BigUint {
    if h.is_empty() {
        BigUint::one()
    } else {
        h.p().clone()
    }
}

/// Gluing constant `C_N = ln(N + 2)`.
pub fn gluing_constant(n: u64) -> f64 {
    ((n + 2) as f64).ln()
}

/// Canonical expansion of `num/den`; the last quotient is at least 2 when the length exceeds 1.
pub fn cf_of_rational(num: &BigUint, den: &BigUint) -> Result<FiniteCF> {
    if den.is_zero() {
        return Err(Error::InvalidInput("zero denominator".into()));
    }
    if num < den {
        return Err(Error::InvalidInput("value must be >= 1".into()));
    }
    let mut a = num.clone();
    let mut b = den.clone();
    let mut qs = Vec::new();
    while !b.is_zero() {
        let (quot, rem) = a.div_rem(&b);
        qs.push(quot);
        a = b;
        b = rem;
    }
    FiniteCF::from_big(&qs)
}

/// The non-canonical twin expansion ending in 1, if it exists.
pub fn alternate_expansion(cf: &FiniteCF) -> Option<FiniteCF> {
    let qs = cf.quotients();
    let last = qs.last()?;
    if qs.len() > 1 && *last < BigUint::from(2u32) {
        return None;
    }
    let mut out: Vec<BigUint> = qs[..qs.len() - 1].to_vec();
    out.push(last - 1u32);
    out.push(BigUint::one());
    FiniteCF::from_big(&out).ok()
}

/// Natural log of a positive big integer with relative error near `f64` epsilon.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).ln() + (shift as f64) * std::f64::consts::LN_2
}

/// `a / b` as `f64`, safe for huge operands.
pub fn ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    let ab = a.bits();
    let bb = b.bits();
    let m = ab.max(bb);
    if m <= 1000 {
        return a.to_f64().unwrap_or(f64::NAN) / b.to_f64().unwrap_or(f64::NAN);
    }
    let shift = m - 900;
    let ta = (a >> shift).to_f64().unwrap_or(0.0);
    let tb = (b >> shift).to_f64().unwrap_or(0.0);
    ta / tb
}

/// Rational to `f64` without overflow for big components.
pub fn rational_f64(x: &BigRational) -> f64 {
    let neg = x.numer() < &BigInt::zero();
    let v = ratio_f64(&x.numer().magnitude().clone(), &x.denom().magnitude().clone());
    if neg {
        -v
    } else {
        v
    }
}

/// Lexicographic order on quotient vectors.
pub fn lex_cmp(a: &FiniteCF, b: &FiniteCF) -> Ordering {
    a.quotients().cmp(b.quotients())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn extend_examples() {
        let cf = FiniteCF::from_slice(&[1, 1, 1, 1]).unwrap();
        let cf = cf.extend(&BigUint::from(1u32)).unwrap();
        assert_eq!(cf.k(), BigUint::from(5u32));
        let cf = FiniteCF::from_slice(&[1, 2]).unwrap();
        let cf = cf.extend(&BigUint::from(2u32)).unwrap().extend(&BigUint::from(1u32)).unwrap();
        assert_eq!(cf.k(), BigUint::from(7u32));
        for c0 in 1..5u64 {
            assert_eq!(FiniteCF::from_slice(&[c0, 3]).unwrap().k(), BigUint::from(3u32));
        }
        assert!(FiniteCF::new().extend(&BigUint::zero()).is_err());
    }

    #[test]
    fn empty_convention() {
        let e = FiniteCF::new();
        assert_eq!(e.k(), BigUint::one());
        assert_eq!(e.k_prime(), BigUint::zero());
    }

    #[test]
    fn cylinder_examples() {
        let c = FiniteCF::from_slice(&[1, 2]).unwrap().cylinder().unwrap();
        assert_eq!(c.lo, r(4, 3));
        assert_eq!(c.hi, r(3, 2));
        assert_eq!(c.open, OpenSide::Left);
        assert_eq!(c.width(), r(1, 6));
        let c = FiniteCF::from_slice(&[2]).unwrap().cylinder().unwrap();
        assert_eq!((c.lo.clone(), c.hi.clone()), (r(2, 1), r(3, 1)));
        assert_eq!(c.open, OpenSide::Right);
        assert_eq!(c.width(), r(1, 1));
    }

    #[test]
    fn gluing_examples() {
        let g = FiniteCF::from_slice(&[1, 2]).unwrap();
        let h = FiniteCF::from_slice(&[2, 1]).unwrap();
        let chk = concat_continuant_bounds(&g, &h, 2).unwrap();
        assert_eq!(chk.actual, BigUint::from(7u32));
        assert_eq!(chk.lower, BigUint::from(2u32));
        assert_eq!(chk.upper, BigUint::from(8u32));
        assert!(chk.holds);
        let one = FiniteCF::from_slice(&[1]).unwrap();
        let chk = concat_continuant_bounds(&one, &one, 1).unwrap();
        assert_eq!(chk.actual, BigUint::one());
        assert!(chk.holds);
        assert!(concat_continuant_bounds(&g, &FiniteCF::from_slice(&[3]).unwrap(), 2).is_err());
    }

    #[test]
    fn cf_of_rational_examples() {
        let cf = cf_of_rational(&BigUint::from(7u32), &BigUint::from(5u32)).unwrap();
        assert_eq!(cf, FiniteCF::from_slice(&[1, 2, 2]).unwrap());
        let cf = cf_of_rational(&BigUint::from(2u32), &BigUint::one()).unwrap();
        assert_eq!(cf, FiniteCF::from_slice(&[2]).unwrap());
        assert!(cf_of_rational(&BigUint::one(), &BigUint::zero()).is_err());
        let alt = alternate_expansion(&FiniteCF::from_slice(&[1, 2, 2]).unwrap()).unwrap();
        assert_eq!(alt, FiniteCF::from_slice(&[1, 2, 1, 1]).unwrap());
        assert_eq!(alt.value().unwrap(), r(7, 5));
    }

    #[test]
    fn continuant_conventions() {
        assert_eq!(continuant(&[]), BigUint::one());
        assert_eq!(continuant(&[3]), BigUint::from(3u32));
        assert_eq!(continuant(&[2, 3]), BigUint::from(7u32));
        assert_eq!(continuant_matrix(&[2, 3]), BigUint::from(7u32));
        assert_eq!(continuant_u128(&[2, 3]), Some(7));
    }

    #[test]
    fn ln_big_matches_f64() {
        let x = BigUint::from(123456789u64);
        assert!((ln_big(&x) - 123456789f64.ln()).abs() < 1e-12);
        let big = BigUint::one() << 3000u32;
        assert!((ln_big(&big) - 3000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}
