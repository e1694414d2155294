//! Approximation functions `psi`, the derived scale `rho(q) = 1/(q^2 psi(q))`,
//! and exact-order membership checks.

use astro_float::BigFloat;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cf::{ln_big, rational_f64, FiniteCF};
use crate::error::{Error, Result};
use crate::hp;

/// `(13 + sqrt 73)/8`, the upper end of the admissible exponent range.
pub fn tau_bar() -> f64 {
    (13.0 + 73f64.sqrt()) / 8.0
}

/// Shape of `psi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "camelCase")]
pub enum ProfileForm {
    /// `psi(q) = q^-tau`.
    Power { tau: f64 },
    /// `psi(q) = q^-tau (1 + ln q)^-log_exp`.
    PowerLog { tau: f64, log_exp: f64 },
    /// Table of `(q, psi(q))`, log-log linear between points and extrapolated
    /// with the end slopes.
    Custom { points: Vec<(f64, f64)> },
}

/// An approximation function together with its validity flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxProfile {
    #[serde(flatten)]
    pub form: ProfileForm,
}

/// Enclosure of `ln rho(q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnEnclosure {
    pub lo: f64,
    pub hi: f64,
}

impl LnEnclosure {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
    /// Linear-space bounds; may overflow to infinity.
    pub fn exp_bounds(&self) -> (f64, f64) {
        (self.lo.exp(), self.hi.exp())
    }
}

/// Validity report for the hypotheses on `psi`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileReport {
    pub tau_limit: f64,
    pub q2psi_le_one: bool,
    pub q2psi_trend_to_zero: bool,
    pub tau_below_bar: bool,
    pub grid_max_ln_q: f64,
}

const PAD: f64 = 1e-12;

impl ApproxProfile {
    pub fn power(tau: f64) -> Self {
        ApproxProfile { form: ProfileForm::Power { tau } }
    }

    pub fn tau_limit(&self) -> f64 {
        match &self.form {
            ProfileForm::Power { tau } | ProfileForm::PowerLog { tau, .. } => *tau,
            ProfileForm::Custom { points } => {
                let n = points.len();
                if n < 2 {
                    return f64::NAN;
                }
                let (q0, p0) = points[n - 2];
                let (q1, p1) = points[n - 1];
                -(p1.ln() - p0.ln()) / (q1.ln() - q0.ln())
            }
        }
    }

    pub fn validate_shape(&self) -> Result<()> {
        match &self.form {
            ProfileForm::Power { tau } | ProfileForm::PowerLog { tau, .. } => {
                if !tau.is_finite() {
                    return Err(Error::Config("tau must be finite".into()));
                }
            }
            ProfileForm::Custom { points } => {
                if points.len() < 2 {
                    return Err(Error::Config("custom profile needs at least two points".into()));
                }
                for w in points.windows(2) {
                    if !(w[0].0 < w[1].0) {
                        return Err(Error::Config("custom profile q values must increase".into()));
                    }
                }
                if points.iter().any(|&(q, p)| q < 1.0 || p <= 0.0) {
                    return Err(Error::Config("custom profile needs q >= 1 and psi > 0".into()));
                }
            }
        }
        Ok(())
    }

    /// `ln psi` as a function of `ln q`.
    pub fn ln_psi_of_ln_q(&self, lq: f64) -> f64 {
        match &self.form {
            ProfileForm::Power { tau } => -tau * lq,
            ProfileForm::PowerLog { tau, log_exp } => -tau * lq - log_exp * (1.0 + lq).ln(),
            ProfileForm::Custom { points } => {
                let n = points.len();
                let seg = match points.iter().position(|&(q, _)| q.ln() > lq) {
                    Some(0) => 0,
                    Some(i) => i - 1,
                    None => n - 2,
                }
                .min(n - 2);
                let (qa, pa) = points[seg];
                let (qb, pb) = points[seg + 1];
                let (xa, ya, xb, yb) = (qa.ln(), pa.ln(), qb.ln(), pb.ln());
                ya + (yb - ya) * (lq - xa) / (xb - xa)
            }
        }
    }

    /// Whether `psi(q) <= q^-2` for every `q >= 1`.
    pub fn below_dirichlet(&self) -> bool {
        match &self.form {
            ProfileForm::Power { tau } => *tau >= 2.0,
            ProfileForm::PowerLog { tau, log_exp } => *tau >= 2.0 && *log_exp >= 0.0,
            ProfileForm::Custom { points } => {
                let n = points.len();
                let slope = |a: (f64, f64), b: (f64, f64)| (b.1.ln() - a.1.ln()) / (b.0.ln() - a.0.ln());
                points.iter().all(|&(q, p)| p.ln() <= -2.0 * q.ln())
                    && slope(points[n - 2], points[n - 1]) <= -2.0
                    && self.ln_psi_of_ln_q(0.0) <= 0.0
            }
        }
    }

    /// `ln rho` as a function of `ln q`.
    pub fn ln_rho_of_ln_q(&self, lq: f64) -> f64 {
        -2.0 * lq - self.ln_psi_of_ln_q(lq)
    }

    /// Enclosure of `ln rho(q)`.
    pub fn ln_rho(&self, q: &BigUint) -> Result<LnEnclosure> {
        if q.is_zero() {
            return Err(Error::InvalidInput("rho needs q >= 1".into()));
        }
        let v = self.ln_rho_of_ln_q(ln_big(q));
        let pad = PAD * (1.0 + v.abs()) + 1e-15 * ln_big(q).abs();
        Ok(LnEnclosure { lo: v - pad, hi: v + pad })
    }

    /// Enclosure of `ln psi(q)`.
    pub fn ln_psi(&self, q: &BigUint) -> Result<LnEnclosure> {
        if q.is_zero() {
            return Err(Error::InvalidInput("psi needs q >= 1".into()));
        }
        let lq = ln_big(q);
        let v = self.ln_psi_of_ln_q(lq);
        let pad = PAD * (1.0 + v.abs()) + 1e-15 * lq.abs();
        Ok(LnEnclosure { lo: v - pad, hi: v + pad })
    }

    /// Rational bracket `[lo, hi]` around `psi(q)`.
    pub fn psi_bracket(&self, q: &BigUint) -> Result<(BigRational, BigRational)> {
        let e = self.ln_psi(q)?;
        Ok((dyadic_exp(e.lo, false), dyadic_exp(e.hi, true)))
    }

    /// Rational bracket around `rho(q)`.
    pub fn rho_bracket(&self, q: &BigUint) -> Result<(BigRational, BigRational)> {
        let e = self.ln_rho(q)?;
        Ok((dyadic_exp(e.lo, false), dyadic_exp(e.hi, true)))
    }

    /// `ln rho(q)` at precision `p` bits.
    pub fn ln_rho_hp(&self, q: &BigUint, p: usize) -> BigFloat {
        let lq = hp::ln_biguint(q, p);
        let two = hp::from_u64(2, 64);
        let m2lq = hp::mul(&lq, &two, p);
        let ln_psi = match &self.form {
            ProfileForm::Power { tau } => hp::mul(&lq, &hp::from_f64(-tau, 64), p),
            ProfileForm::PowerLog { tau, log_exp } => {
                let a = hp::mul(&lq, &hp::from_f64(-tau, 64), p);
                let one = hp::from_u64(1, 64);
                let l1 = hp::ln(&hp::add(&one, &lq, p), p);
                hp::sub(&a, &hp::mul(&l1, &hp::from_f64(*log_exp, 64), p), p)
            }
            ProfileForm::Custom { points } => {
                let lqf = hp::to_f64(&lq);
                let n = points.len();
                let seg = match points.iter().position(|&(qq, _)| qq.ln() > lqf) {
                    Some(0) => 0,
                    Some(i) => i - 1,
                    None => n - 2,
                }
                .min(n - 2);
                let (qa, pa) = points[seg];
                let (qb, pb) = points[seg + 1];
                let xa = hp::ln(&hp::from_f64(qa, p), p);
                let xb = hp::ln(&hp::from_f64(qb, p), p);
                let ya = hp::ln(&hp::from_f64(pa, p), p);
                let yb = hp::ln(&hp::from_f64(pb, p), p);
                let slope = hp::div(&hp::sub(&yb, &ya, p), &hp::sub(&xb, &xa, p), p);
                hp::add(&ya, &hp::mul(&slope, &hp::sub(&lq, &xa, p), p), p)
            }
        };
        hp::sub(&hp::sub(&BigFloat::from_word(0, 64), &m2lq, p), &ln_psi, p)
    }

    /// Checks `q^2 psi <= 1` and the trend `q^2 psi -> 0` on a geometric grid up to `e^max_ln_q`.
    pub fn report(&self, max_ln_q: f64) -> ProfileReport {
        let steps = 400usize;
        let mut le_one = true;
        let mut vals = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let lq = max_ln_q * i as f64 / steps as f64;
            let lr = self.ln_rho_of_ln_q(lq);
            if lr < -1e-12 {
                le_one = false;
            }
            vals.push(lr);
        }
        let half = steps / 2;
        let monotone_tail = vals[half..].windows(2).all(|w| w[1] >= w[0] - 1e-12);
        let trend = monotone_tail && vals[steps] > vals[half] && vals[steps] > 0.0;
        let tau = self.tau_limit();
        ProfileReport {
            tau_limit: tau,
            q2psi_le_one: le_one,
            q2psi_trend_to_zero: trend,
            tau_below_bar: tau < tau_bar(),
            grid_max_ln_q: max_ln_q,
        }
    }
}

/// Dyadic rational close to `e^x`, rounded away from the true value in the requested direction.
pub fn dyadic_exp(x: f64, up: bool) -> BigRational {
    let n = (x / std::f64::consts::LN_2).floor();
    let f = x - n * std::f64::consts::LN_2;
    let m = f.exp();
    let m = if up { m * (1.0 + 4e-16) } else { m * (1.0 - 4e-16) };
    let mr = BigRational::from_float(m).expect("finite mantissa");
    let n = n as i64;
    let two = BigInt::from(2);
    if n >= 0 {
        mr * BigRational::from_integer(two.pow(n as u32))
    } else {
        mr / BigRational::from_integer(two.pow((-n) as u32))
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn big(u: &BigUint) -> BigInt {
    BigInt::from(u.clone())
}

/// Witness for the exceptional follow-up check.
#[derive(Clone, Debug)]
pub struct Claim1Witness {
    pub holds: bool,
    pub min_gap: BigRational,
    pub max_gap: BigRational,
    pub lower_target: BigRational,
    pub upper_target: BigRational,
    pub side_check: bool,
}

/// Exceptional follow-up: every `x` in `cyl(prefix . b)` lies at distance between
/// `(1 - eta/10) psi(q_n)` and `psi(q_n)` from `p_n/q_n`.
pub fn check_claim1(
    prefix: &FiniteCF,
    b: &BigUint,
    eta: f64,
    profile: &ApproxProfile,
) -> Result<Claim1Witness> {
    if prefix.is_empty() {
        return Err(Error::Precondition("prefix must be nonempty".into()));
    }
    let qn = prefix.k();
    let qn1 = prefix.k_prime();
    let (rho_lo, rho_hi) = profile.rho_bracket(&qn)?;
    let eta_r = rat(eta);
    let hundred = BigRational::from_integer(BigInt::from(100));
    let one = BigRational::one();
    let b_r = BigRational::from_integer(big(b));
    let lo_win = (&one + &eta_r / &hundred) * &rho_hi;
    let hi_win = (&one + &eta_r / BigRational::from_integer(BigInt::from(50))) * &rho_lo;
    if !(b_r > lo_win && b_r < hi_win) {
        return Err(Error::Precondition(format!(
            "b = {b} outside ((1+eta/100) rho, (1+eta/50) rho) for q_n = {qn}"
        )));
    }
    // x = [prefix; y], |x - p_n/q_n| = 1/(q_n (y q_n + q_{n-1})) for y in [b, b+1]
    let q = big(&qn);
    let qp = big(&qn1);
    let gap_at = |y: &BigInt| BigRational::new(BigInt::one(), &q * (y * &q + &qp));
    let bb = big(b);
    let max_gap = gap_at(&bb);
    let min_gap = gap_at(&(&bb + 1));
    let (psi_lo, psi_hi) = profile.psi_bracket(&qn)?;
    let lower_target = (&one - &eta_r / BigRational::from_integer(BigInt::from(10))) * &psi_hi;
    let upper_target = psi_lo;
    let holds = min_gap >= lower_target && max_gap <= upper_target;
    // (1 + eta/100) q_n rho <= q_{n+1} <= (1 + eta/40) q_n rho
    let qnext = BigRational::from_integer(&bb * &q + &qp);
    let qr = BigRational::from_integer(q.clone());
    let side_lo = (&one + &eta_r / &hundred) * &qr * &rho_hi;
    let side_hi = (&one + &eta_r / BigRational::from_integer(BigInt::from(40))) * &qr * &rho_lo;
    let side_check = side_lo <= qnext && qnext <= side_hi;
    Ok(Claim1Witness { holds, min_gap, max_gap, lower_target, upper_target, side_check })
}

/// Witness for the typical follow-up check.
#[derive(Clone, Debug)]
pub struct Claim2Witness {
    pub holds: bool,
    pub min_gap: BigRational,
    pub threshold: BigRational,
    pub margin: BigRational,
}

/// Typical follow-up: every `x` in `cyl(prefix . a)` is farther than
/// `1/((N+2) q_n^2)` from `p_n/q_n`.
pub fn check_claim2(prefix: &FiniteCF, a: u64, n: u64) -> Result<Claim2Witness> {
    if a < 1 || a > n {
        return Err(Error::InvalidInput(format!("a = {a} outside [1, {n}]")));
    }
    if prefix.is_empty() {
        return Err(Error::Precondition("prefix must be nonempty".into()));
    }
    // 1/(q (y q + q')) against 1/((N+2) q^2) reduces to y q + q' against (N+2) q
    let q = big(prefix.k_ref());
    let qp = big(prefix.k_prime_ref());
    let den = |y: u64| BigInt::from(y) * &q + &qp;
    let cap = BigInt::from(n + 2) * &q;
    let (closed_den, open_den) = (den(a), den(a + 1));
    // the y = a+1 endpoint is the excluded end of the cylinder
    let holds = closed_den < cap && open_den <= cap;
    let open = BigRational::new_raw(BigInt::one(), &q * &open_den);
    let threshold = BigRational::new_raw(BigInt::one(), &cap * &q);
    let margin = BigRational::new_raw(&cap - &open_den, &cap * &open_den * &q);
    Ok(Claim2Witness { holds, min_gap: open, threshold, margin })
}

/// Predicate of [`check_claim2`] without the witness: `q' <= (N + 1 - a) q`, which is
/// `(a+1) q + q' <= (N+2) q` and implies the strict inequality at `y = a`.
pub fn claim2_holds(prefix: &FiniteCF, a: u64, n: u64) -> Result<bool> {
    if a < 1 || a > n {
        return Err(Error::InvalidInput(format!("a = {a} outside [1, {n}]")));
    }
    if prefix.is_empty() {
        return Err(Error::Precondition("prefix must be nonempty".into()));
    }
    Ok(prefix.k_prime_ref() <= &(prefix.k_ref() * (n + 1 - a)))
}

/// Classification of a convergent denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvergentClass {
    ExceptionalHit,
    TypicalMiss,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergentRow {
    pub n: usize,
    pub q: String,
    pub gap: f64,
    pub psi: f64,
    pub class: ConvergentClass,
}

/// Result of [`exactness_scan`].
#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub per_convergent: Vec<ConvergentRow>,
    pub verdict_upper: bool,
    pub verdict_lower: bool,
    pub convergent_verdict_upper: bool,
    pub convergent_verdict_lower: bool,
    pub q_checked: u64,
    pub q_threshold: u64,
    pub hits: Vec<u64>,
    pub lower_violations: Vec<u64>,
    pub ambiguous: Vec<u64>,
}

/// Scans every denominator `q <= q_max` and classifies `min_p |x - p/q|` against
/// `psi(q)` and `(1 - c) psi(q)`; `q_threshold` plays the role of `Q(c)`.
pub fn exactness_scan(
    x: &FiniteCF,
    profile: &ApproxProfile,
    c: f64,
    q_max: u64,
    q_threshold: u64,
) -> Result<ExactnessReport> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidInput("c must lie in (0, 1)".into()));
    }
    let qmax_b = BigUint::from(q_max);
    if x.is_empty() || x.k() <= &qmax_b * &qmax_b {
        return Err(Error::Precondition(
            "insufficient depth: last continuant must exceed q_max^2".into(),
        ));
    }
    let xr = x.value()?;
    let one_minus_c = rat(1.0 - c);

    #[derive(Clone, Copy)]
    enum Outcome {
        Hit,
        Violation,
        Ambiguous,
        Pass,
    }
    let classify = |q: u64| -> Result<(Outcome, BigRational)> {
        let qb = BigUint::from(q);
        let qi = BigInt::from(q);
        // nearest p to q x, exactly
        let num = xr.numer() * &qi;
        let den = xr.denom().clone();
        let (fl, rem) = num.div_mod_floor(&den);
        let p = if &rem * 2 >= den { fl + 1 } else { fl };
        let gap = (&xr - BigRational::new(p, qi)).abs();
        let (psi_lo, psi_hi) = profile.psi_bracket(&qb)?;
        let hit = gap <= psi_lo;
        let miss = gap > psi_hi;
        let low_ok = gap >= &one_minus_c * &psi_hi;
        let low_bad = gap < &one_minus_c * &psi_lo;
        let out = if hit {
            if low_bad {
                Outcome::Violation
            } else if low_ok {
                Outcome::Hit
            } else {
                Outcome::Ambiguous
            }
        } else if miss {
            if low_bad {
                Outcome::Violation
            } else if low_ok {
                Outcome::Pass
            } else {
                Outcome::Ambiguous
            }
        } else {
            Outcome::Ambiguous
        };
        Ok((out, gap))
    };

    // fractional part of x as a 128-bit fixed-point number; q x mod 1 is then a wrapping
    // product, exact up to q 2^-128
    let frac = {
        let f = &xr - BigRational::from_integer(xr.floor().to_integer());
        let scaled = f * BigRational::from_integer(BigInt::one() << 128u32);
        scaled.floor().to_integer().to_u128().unwrap_or(u128::MAX)
    };
    let two128 = 2f64.powi(128);
    // with psi(q) <= q^-2 a hit needs ||q x|| <= 1/q, which settles most q without psi
    let dirichlet = profile.below_dirichlet();
    let candidates: Vec<u64> = {
        use rayon::prelude::*;
        const CHUNK: u64 = 1 << 16;
        let chunks = q_max.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| {
                let lo = c * CHUNK + 1;
                let hi = ((c + 1) * CHUNK).min(q_max);
                let mut t = (lo as u128).wrapping_mul(frac).wrapping_sub(frac);
                (lo..=hi).filter(move |&q| {
                    t = t.wrapping_add(frac);
                    let d = t.min(t.wrapping_neg());
                    if dirichlet {
                        // d 2^-128 > (1 + 2^-20)/q with room for the 2^-127 q truncation error
                        let hi64 = (d >> 64) as u128;
                        if hi64 * q as u128 > (1u128 << 64) + (1u128 << 44) + 2 {
                            return false;
                        }
                    }
                    let df = d as f64 / two128;
                    let qf = q as f64;
                    let margin = qf / two128 * 2.0 + 1e-300;
                    let thr = qf * profile.ln_psi_of_ln_q(qf.ln()).exp();
                    df - margin <= thr * (1.0 + 1e-9)
                })
            })
            .collect()
    };
    let mut hits = Vec::new();
    let mut violations = Vec::new();
    let mut ambiguous = Vec::new();
    for q in candidates {
        let (out, _) = classify(q)?;
        match out {
            Outcome::Hit => hits.push(q),
            Outcome::Violation => {
                if q > q_threshold {
                    violations.push(q)
                }
            }
            Outcome::Ambiguous => ambiguous.push(q),
            Outcome::Pass => {}
        }
    }

    // convergent-only view
    let mut per_convergent = Vec::new();
    let mut conv_upper = false;
    let mut conv_lower = true;
    let mut prefix = FiniteCF::new();
    for (i, c_i) in x.quotients().iter().enumerate() {
        prefix.push(c_i.clone())?;
        let q = prefix.k();
        if q > qmax_b {
            break;
        }
        let qu = q.to_u64().expect("q <= q_max");
        let gap = (&xr - prefix.value()?).abs();
        let (psi_lo, _) = profile.psi_bracket(&q)?;
        let class = if gap <= psi_lo {
            conv_upper = true;
            ConvergentClass::ExceptionalHit
        } else {
            ConvergentClass::TypicalMiss
        };
        if qu > q_threshold && gap < &one_minus_c * &psi_lo {
            conv_lower = false;
        }
        per_convergent.push(ConvergentRow {
            n: i,
            q: q.to_string(),
            gap: rational_f64(&gap),
            psi: profile.ln_psi(&q)?.mid().exp(),
            class,
        });
    }

    Ok(ExactnessReport {
        per_convergent,
        verdict_upper: !hits.is_empty(),
        verdict_lower: violations.is_empty(),
        convergent_verdict_upper: conv_upper,
        convergent_verdict_lower: conv_lower,
        q_checked: q_max,
        q_threshold,
        hits,
        lower_violations: violations,
        ambiguous,
    })
}

/// Smallest `q_n` (as a power of two) past which `(b + 1) <= (1 + eta/40) rho(q)` holds
/// for `b` just above `(1 + eta/50) rho`; reported as a default for the `Q_1` threshold.
pub fn default_q1(profile: &ApproxProfile, eta: f64) -> Option<u64> {
    for k in 1..64u32 {
        let lq = k as f64 * std::f64::consts::LN_2;
        let rho = profile.ln_rho_of_ln_q(lq).exp();
        if rho.is_finite() && (1.0 + eta / 50.0) * rho + 2.0 <= (1.0 + eta / 40.0) * rho {
            return Some(1u64 << k);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_power_closed_form() {
        let p = ApproxProfile::power(2.5);
        let e = p.ln_rho(&BigUint::from(100u32)).unwrap();
        assert!(e.contains(10f64.ln()));
        let p2 = ApproxProfile::power(2.0);
        assert!(p2.ln_rho(&BigUint::from(12345u32)).unwrap().contains(0.0));
        assert!(p.ln_rho(&BigUint::zero()).is_err());
    }

    #[test]
    fn rho_custom_point() {
        let p = ApproxProfile {
            form: ProfileForm::Custom {
                points: vec![(1.0, 1.0), (64.0, 2f64.powi(-13)), (4096.0, 2f64.powi(-28))],
            },
        };
        let (lo, hi) = p.rho_bracket(&BigUint::from(64u32)).unwrap();
        let two = BigRational::from_integer(BigInt::from(2));
        assert!(lo <= two && two <= hi);
    }

    #[test]
    fn psi_bracket_orders() {
        let p = ApproxProfile::power(2.5);
        let (lo, hi) = p.psi_bracket(&BigUint::from(10000u32)).unwrap();
        assert!(lo < hi);
        let exact = 1e-10;
        assert!(rational_f64(&lo) <= exact && exact <= rational_f64(&hi));
    }

    #[test]
    fn claim2_examples() {
        let pre = FiniteCF::from_slice(&[1, 2]).unwrap();
        let w = check_claim2(&pre, 1, 3).unwrap();
        assert!(w.holds);
        assert!(w.margin > BigRational::zero());
        assert!(check_claim2(&pre, 4, 3).is_err());
    }

    #[test]
    fn claim1_guard() {
        let p = ApproxProfile::power(2.5);
        let pre = FiniteCF::from_slice(&[1, 2, 2, 1, 3, 2, 1, 1, 2, 3, 1, 2, 2, 2]).unwrap();
        let err = check_claim1(&pre, &BigUint::from(1u32), 1.0, &p);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn profile_flags() {
        let r = ApproxProfile::power(2.5).report(40.0);
        assert!(r.q2psi_le_one && r.q2psi_trend_to_zero && r.tau_below_bar);
        let r = ApproxProfile::power(2.9).report(40.0);
        assert!(!r.tau_below_bar);
        let r = ApproxProfile::power(2.0).report(40.0);
        assert!(!r.q2psi_trend_to_zero);
    }

    #[test]
    fn hp_rho_agrees() {
        let p = ApproxProfile::power(2.5);
        let q = BigUint::from(1_000_000u32);
        let v = hp::to_f64(&p.ln_rho_hp(&q, 256));
        assert!(p.ln_rho(&q).unwrap().contains(v));
    }

    #[test]
    fn claim2_predicate_matches_witness() {
        for qs in [vec![1u64], vec![3, 1, 4, 1, 5], vec![2, 9, 9, 1], vec![1, 1, 1, 1, 1, 1]] {
            let cf = FiniteCF::from_slice(&qs).unwrap();
            for a in 1..=6 {
                assert_eq!(claim2_holds(&cf, a, 6).unwrap(), check_claim2(&cf, a, 6).unwrap().holds);
            }
        }
    }
}
