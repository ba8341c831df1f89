//! The Lubell thresholds `α_d(n)` and the closed-form bounds around them.
//!
//! `α_1(n) = 1` and `α_d(n) = 1/2 + sqrt(2n α_{d-1}(n) + 1/4)`. A family over
//! `[n]` whose Lubell value exceeds `α_d(n)` contains a copy of `B_d`.
//!
//! Every power here has an exponent of the form `2^-m` or `1 - 2^-m`, so it
//! is evaluated with iterated square roots; no logarithms are involved.
//! Decisions come back as a [`Verdict`] and escalate working precision before
//! giving up with `Indeterminate`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::binomial::binomial;
use crate::error::{Error, Result};
use crate::real::{decide, exp_rational, ln2, BoundedReal, Enclosure, Verdict, DEFAULT_PRECISION};

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn check_dimension(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::PreconditionViolated(
            "dimension d must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

/// One pass of the recursion at `bits` working bits: enclosures of
/// `α_1(n), ..., α_dmax(n)`.
pub fn alpha_sequence(dmax: usize, n: u64, bits: u32) -> Vec<Enclosure> {
    let quarter = Enclosure::from_ratio(1, 4);
    let half = Enclosure::from_ratio(1, 2);
    let two_n = rat(2 * n);
    let mut out = Vec::with_capacity(dmax);
    let mut cur = Enclosure::from_int(1);
    for d in 1..=dmax {
        if d > 1 {
            // monotone in the previous value, so endpoints map to endpoints
            let inner = cur.scale(&two_n, bits).add(&quarter, bits);
            cur = inner.sqrt(bits).add(&half, bits);
        }
        out.push(cur.clone());
    }
    out
}

pub fn alpha_enclosure(d: usize, n: u64, bits: u32) -> Enclosure {
    alpha_sequence(d, n, bits).pop().expect("d >= 1")
}

/// `α_d(n)` to relative width `precision`.
pub fn alpha(d: usize, n: u64, precision: f64) -> Result<BoundedReal> {
    check_dimension(d)?;
    if d == 1 {
        return BoundedReal::refine(precision, |_| Enclosure::from_int(1));
    }
    BoundedReal::refine(precision, |bits| alpha_enclosure(d, n, bits))
}

/// True iff the enclosures of `C(α_{d+1}(n), 2)` and `n α_d(n)` overlap.
pub fn check_recursion_identity(d: usize, n: u64) -> Result<bool> {
    check_dimension(d)?;
    let bits = crate::real::bit_ladder(DEFAULT_PRECISION)[0];
    let seq = alpha_sequence(d + 1, n, bits);
    let next = &seq[d];
    let lhs = next
        .mul(&next.sub(&Enclosure::from_int(1), bits), bits)
        .scale(&BigRational::new(BigInt::one(), BigInt::from(2)), bits);
    let rhs = seq[d - 1].scale(&rat(n), bits);
    Ok(lhs.overlaps(&rhs))
}

fn both(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
        (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
        _ => Verdict::Indeterminate,
    }
}

/// `(2n)^(1 - 2^(1-d)) <= α_d(n) <= (4n)^(1 - 2^(1-d))` for `n >= d >= 1`.
pub fn check_sandwich_bounds(d: usize, n: u64) -> Result<Verdict> {
    check_dimension(d)?;
    if n < d as u64 {
        return Err(Error::PreconditionViolated(format!(
            "sandwich bounds are stated for n >= d, got n={n}, d={d}"
        )));
    }
    Ok(decide(DEFAULT_PRECISION, |bits| {
        let a = alpha_enclosure(d, n, bits);
        let m = d as u32 - 1;
        let lower = Enclosure::exact(rat(2 * n)).pow_one_minus_pow2(m, bits);
        let upper = Enclosure::exact(rat(4 * n)).pow_one_minus_pow2(m, bits);
        both(lower.le(&a), a.le(&upper))
    }))
}

/// `(2^d - 2 / ln 2)^2`, the size threshold of the first closed-form bound.
pub fn gr_threshold(d: usize, bits: u32) -> Enclosure {
    let two_over_ln2 = Enclosure::from_int(2).div(&ln2(bits), bits);
    let gap = Enclosure::exact(rat(1u64 << d)).sub(&two_over_ln2, bits);
    gap.mul(&gap, bits)
}

/// Whether `n + 1 >= (2^d - 2/ln 2)^2`.
pub fn gr_threshold_met(d: usize, n: u64) -> Verdict {
    let np1 = Enclosure::exact(rat(n + 1));
    decide(DEFAULT_PRECISION, |bits| gr_threshold(d, bits).le(&np1))
}

fn check_gr_dimension(d: usize) -> Result<()> {
    if d < 3 {
        Err(Error::PreconditionViolated(format!(
            "closed-form threshold bounds need d >= 3, got {d}"
        )))
    } else if d > 40 {
        Err(Error::PreconditionViolated(format!(
            "d = {d} is out of range"
        )))
    } else {
        Ok(())
    }
}

/// `α_d(n) <= 2 (n+1)^(1 - 2^(1-d))`, asserted only when
/// `n + 1 >= (2^d - 2/ln 2)^2`; below that the result is
/// [`Error::ThresholdNotMet`].
pub fn check_gr_threshold_bound(d: usize, n: u64) -> Result<Verdict> {
    check_gr_dimension(d)?;
    match gr_threshold_met(d, n) {
        Verdict::Holds => {}
        _ => {
            return Err(Error::ThresholdNotMet(format!(
                "n + 1 = {} is below (2^{d} - 2/ln 2)^2",
                n + 1
            )))
        }
    }
    Ok(decide(DEFAULT_PRECISION, |bits| {
        let a = alpha_enclosure(d, n, bits);
        let bound = Enclosure::exact(rat(n + 1))
            .pow_one_minus_pow2(d as u32 - 1, bits)
            .scale(&rat(2), bits);
        a.le(&bound)
    }))
}

/// Exact test of `n + 1 >= 2^(d 2^(d-1) / (2^(d-1) - 1))`, i.e.
/// `(n+1)^(2^(d-1) - 1) >= 2^(d 2^(d-1))`.
pub fn gr_root_threshold_met(d: usize, n: u64) -> bool {
    let q = (1u64 << (d - 1)) - 1;
    let p = d as u64 * (1u64 << (d - 1));
    let base = n + 1;
    let b = 64 - base.leading_zeros() as u64; // 2^(b-1) <= base < 2^b
    if (b - 1) * q >= p {
        return true;
    }
    if b * q <= p {
        return false;
    }
    num_traits::pow::Pow::pow(BigInt::from(base), q) >= (BigInt::one() << p)
}

/// `α_d(n) <= 2^(1 - 2^(1-d)) (sqrt(n+1) + 1)^(2 - 2^(2-d))`, asserted only
/// when `n + 1 >= 2^(d 2^(d-1) / (2^(d-1) - 1))`.
pub fn check_gr_root_bound(d: usize, n: u64) -> Result<Verdict> {
    check_gr_dimension(d)?;
    if !gr_root_threshold_met(d, n) {
        return Err(Error::ThresholdNotMet(format!(
            "n + 1 = {} is below 2^({d} 2^{} / (2^{} - 1))",
            n + 1,
            d - 1,
            d - 1
        )));
    }
    Ok(decide(DEFAULT_PRECISION, |bits| {
        let a = alpha_enclosure(d, n, bits);
        let factor = Enclosure::from_int(2).pow_one_minus_pow2(d as u32 - 1, bits);
        let y = Enclosure::exact(rat(n + 1))
            .sqrt(bits)
            .add(&Enclosure::from_int(1), bits);
        // y^(2 - 2^(2-d)) = y^2 / y^(2^-(d-2))
        let y_pow = y.mul(&y, bits).div(&y.root_pow2(d as u32 - 2, bits), bits);
        a.le(&factor.mul(&y_pow, bits))
    }))
}

/// `C(2n, k) / C(2n, n) <= exp(-(2/n) C(n-k, 2))`, decided exactly against
/// a rigorous enclosure of the exponential.
pub fn binomial_ratio_bound_check(n: u64, k: u64) -> Result<Verdict> {
    if n == 0 || k > n {
        return Err(Error::PreconditionViolated(format!(
            "need 0 <= k <= n and n >= 1, got n={n}, k={k}"
        )));
    }
    let ratio = BigRational::new(binomial(2 * n, k), binomial(2 * n, n));
    let pairs = binomial(n - k, 2);
    let exponent = -BigRational::new(BigInt::from(2) * pairs, BigInt::from(n));
    Ok(decide(DEFAULT_PRECISION, |bits| {
        Enclosure::exact(ratio.clone()).le(&exp_rational(&exponent, bits))
    }))
}

/// A large positive number held as `mantissa * 2^exponent`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaledBound {
    pub mantissa: BoundedReal,
    pub exponent: u32,
}

impl ScaledBound {
    /// Verdict for `value <= mantissa * 2^exponent`.
    pub fn admits(&self, value: &BigRational) -> Verdict {
        let scale = BigRational::from_integer(BigInt::one() << self.exponent);
        if value <= &(self.mantissa.lo() * &scale) {
            Verdict::Holds
        } else if value > &(self.mantissa.hi() * &scale) {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }

    /// The bound as a single enclosure (only sensible for moderate exponents).
    pub fn to_enclosure(&self) -> Enclosure {
        let scale = BigRational::from_integer(BigInt::one() << self.exponent);
        Enclosure::new(self.mantissa.lo() * &scale, self.mantissa.hi() * &scale)
    }

    /// `value / bound`, bracketed, for margin tables.
    pub fn ratio(&self, value: &BigRational) -> Enclosure {
        let e = self.to_enclosure();
        if value.is_zero() {
            return Enclosure::exact(BigRational::zero());
        }
        Enclosure::new(value / e.hi(), value / e.lo())
    }
}

/// `22 n^(-1/2^d) 2^n`, the cardinality ceiling for `B_d`-free families.
pub fn bnd_upper_bound(n: u64, d: usize, precision: f64) -> Result<ScaledBound> {
    check_dimension(d)?;
    if n == 0 {
        return Err(Error::PreconditionViolated("n must be at least 1".into()));
    }
    if d > 64 || n > u32::MAX as u64 {
        return Err(Error::PreconditionViolated(format!(
            "bound requested out of range: n={n}, d={d}"
        )));
    }
    let mantissa = BoundedReal::refine(precision, |bits| {
        Enclosure::from_int(22).div(&Enclosure::exact(rat(n)).root_pow2(d as u32, bits), bits)
    })?;
    Ok(ScaledBound {
        mantissa,
        exponent: n as u32,
    })
}
