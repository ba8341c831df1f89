//! Rigorous enclosures of real numbers.
//!
//! Endpoints are exact rationals whose denominators are powers of two. Every
//! operation that cannot be carried out exactly (square roots, `exp`, `ln 2`,
//! long products) rounds the lower endpoint down and the upper endpoint up to
//! a working number of significant bits, so `lo <= true value <= hi` always.
//! Comparisons against exact rationals are therefore exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default relative width target.
pub const DEFAULT_PRECISION: f64 = 1e-12;

/// Finest relative precision the automatic escalation aims for.
pub const FINEST_PRECISION: f64 = 1e-30;

/// Hard cap on working bits.
pub const MAX_WORKING_BITS: u32 = 224;

const MIN_WORKING_BITS: u32 = 64;
const BITS_STEP: u32 = 40;

/// Outcome of a rigorous comparison.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn is_determinate(self) -> bool {
        self != Verdict::Indeterminate
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

fn dyadic(m: BigInt, shift: i64) -> BigRational {
    if shift >= 0 {
        BigRational::new(m, pow2(shift as u64))
    } else {
        BigRational::from_integer(m << (-shift) as u64)
    }
}

/// `floor(x * 2^shift)` (or the ceiling).
fn scaled_integer(x: &BigRational, shift: i64, up: bool) -> BigInt {
    let (num, den) = if shift >= 0 {
        (x.numer() << shift as u64, x.denom().clone())
    } else {
        (x.numer().clone(), x.denom() << (-shift) as u64)
    };
    if up {
        num.div_ceil(&den)
    } else {
        num.div_floor(&den)
    }
}

fn magnitude(x: &BigRational) -> i64 {
    x.numer().bits() as i64 - x.denom().bits() as i64
}

/// Rounds to about `bits` significant bits, toward `-inf` or `+inf`.
pub fn round_rational(x: &BigRational, bits: u32, up: bool) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let shift = bits as i64 - magnitude(x);
    dyadic(scaled_integer(x, shift, up), shift)
}

fn sqrt_dir(x: &BigRational, bits: u32, up: bool) -> BigRational {
    if !x.is_positive() {
        return BigRational::zero();
    }
    let k = (bits as i64 - magnitude(x) / 2 + 2).max(0);
    let y = scaled_integer(x, 2 * k, up);
    let mut s = y.sqrt();
    if up && &s * &s < y {
        s += 1;
    }
    dyadic(s, k)
}

/// Closed interval `[lo, hi]` known to contain some real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi }
    }

    pub fn exact(x: BigRational) -> Self {
        Enclosure {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(x: i64) -> Self {
        Enclosure::exact(BigRational::from_integer(BigInt::from(x)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Enclosure::exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Intersection of two enclosures of the same quantity.
    pub fn intersect(&self, other: &Enclosure) -> Enclosure {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        assert!(lo <= hi, "disjoint enclosures of one quantity");
        Enclosure { lo, hi }
    }

    /// Widens the endpoints to `bits` significant bits.
    pub fn rounded(&self, bits: u32) -> Enclosure {
        Enclosure {
            lo: round_rational(&self.lo, bits, false),
            hi: round_rational(&self.hi, bits, true),
        }
    }

    pub fn add(&self, other: &Enclosure, bits: u32) -> Enclosure {
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
        .rounded(bits)
    }

    pub fn sub(&self, other: &Enclosure, bits: u32) -> Enclosure {
        Enclosure {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
        .rounded(bits)
    }

    pub fn mul(&self, other: &Enclosure, bits: u32) -> Enclosure {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        Enclosure { lo, hi }.rounded(bits)
    }

    /// # Panics
    /// If `other` contains zero.
    pub fn div(&self, other: &Enclosure, bits: u32) -> Enclosure {
        assert!(
            other.lo.is_positive() || other.hi.is_negative(),
            "division by an enclosure containing zero"
        );
        let inv = Enclosure {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        };
        self.mul(&inv, bits)
    }

    pub fn scale(&self, factor: &BigRational, bits: u32) -> Enclosure {
        self.mul(&Enclosure::exact(factor.clone()), bits)
    }

    /// # Panics
    /// If the enclosure has a negative lower endpoint.
    pub fn sqrt(&self, bits: u32) -> Enclosure {
        assert!(
            !self.lo.is_negative(),
            "square root of a negative enclosure"
        );
        Enclosure {
            lo: sqrt_dir(&self.lo, bits, false),
            hi: sqrt_dir(&self.hi, bits, true),
        }
    }

    /// `x^(2^-m)`: the square root taken `m` times.
    pub fn root_pow2(&self, m: u32, bits: u32) -> Enclosure {
        (0..m).fold(self.clone(), |acc, _| acc.sqrt(bits))
    }

    /// `x^(1 - 2^-m) = x / x^(2^-m)` for `x > 0`.
    pub fn pow_one_minus_pow2(&self, m: u32, bits: u32) -> Enclosure {
        self.div(&self.root_pow2(m, bits), bits)
    }

    /// Verdict for `self <= other` over every pair of enclosed values.
    pub fn le(&self, other: &Enclosure) -> Verdict {
        if self.hi <= other.lo {
            Verdict::Holds
        } else if self.lo > other.hi {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }

    /// Verdict for `self < other`.
    pub fn lt(&self, other: &Enclosure) -> Verdict {
        if self.hi < other.lo {
            Verdict::Holds
        } else if self.lo >= other.hi {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }

    /// Relative width `(hi - lo) / max(1, |lo|)`.
    pub fn relative_width(&self) -> BigRational {
        let scale = self.lo.abs().max(BigRational::one());
        self.width() / scale
    }
}

/// Enclosure of `exp(x)` for an exact rational `x`.
pub fn exp_rational(x: &BigRational, bits: u32) -> Enclosure {
    if x.is_negative() {
        let e = exp_rational(&-x, bits + 8);
        return Enclosure {
            lo: round_rational(&e.hi.recip(), bits, false),
            hi: round_rational(&e.lo.recip(), bits, true),
        };
    }
    // exp(x) = exp(x / 2^j)^(2^j) with x / 2^j <= 1/2
    let j = if x.is_zero() {
        0
    } else {
        x.ceil().to_integer().bits() + 1
    };
    let y = x / BigRational::from_integer(pow2(j));
    let w = bits as u64 + j + 32;
    let one = pow2(w);
    let y_lo = scaled_integer(&y, w as i64, false);
    let y_hi = scaled_integer(&y, w as i64, true);

    let mut sum_lo = one.clone();
    let mut term = one.clone();
    let mut i = 1u64;
    loop {
        term = (&term * &y_lo).div_floor(&(&one * i));
        if term.is_zero() {
            break;
        }
        sum_lo += &term;
        i += 1;
    }

    // terms shrink by at least half, so the tail after a term is at most that term
    let mut sum_hi = one.clone();
    let mut term = one.clone();
    let mut i = 1u64;
    loop {
        term = (&term * &y_hi).div_ceil(&(&one * i));
        sum_hi += &term;
        if term <= BigInt::one() {
            sum_hi += &term;
            break;
        }
        i += 1;
    }

    let guard = bits + 32 + j as u32;
    let mut enc = Enclosure {
        lo: BigRational::new(sum_lo, one.clone()),
        hi: BigRational::new(sum_hi, one),
    }
    .rounded(guard);
    for _ in 0..j {
        enc = Enclosure {
            lo: &enc.lo * &enc.lo,
            hi: &enc.hi * &enc.hi,
        }
        .rounded(guard);
    }
    enc.rounded(bits)
}

/// Enclosure of `ln 2 = Σ_{k>=1} 1 / (k 2^k)`.
pub fn ln2(bits: u32) -> Enclosure {
    let w = bits as u64 + 16;
    let terms = w + 2;
    let one = pow2(w);
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for k in 1..=terms {
        let den = pow2(k) * k;
        lo += one.div_floor(&den);
        hi += one.div_ceil(&den);
    }
    // Σ_{k>N} 1/(k 2^k) <= 1/((N+1) 2^N)
    hi += one.div_ceil(&(pow2(terms) * (terms + 1)));
    Enclosure {
        lo: BigRational::new(lo, one.clone()),
        hi: BigRational::new(hi, one),
    }
    .rounded(bits)
}

/// Working-bit schedule for a relative precision target: starts where the
/// target needs and climbs to [`MAX_WORKING_BITS`].
pub fn bit_ladder(precision: f64) -> Vec<u32> {
    let needed = if precision > 0.0 && precision.is_finite() {
        (-precision.log2()).ceil().max(0.0) as u32 + 12
    } else {
        MIN_WORKING_BITS
    };
    let mut bits = needed.clamp(MIN_WORKING_BITS, MAX_WORKING_BITS);
    let mut out = vec![bits];
    while bits < MAX_WORKING_BITS {
        bits = (bits + BITS_STEP).min(MAX_WORKING_BITS);
        out.push(bits);
    }
    out
}

/// Runs a rigorous comparison at increasing working precision until it is
/// decided or the cap is reached.
pub fn decide<F: FnMut(u32) -> Verdict>(precision: f64, mut check: F) -> Verdict {
    for bits in bit_ladder(precision) {
        let v = check(bits);
        if v.is_determinate() {
            return v;
        }
    }
    Verdict::Indeterminate
}

/// An enclosure refined to a relative width target.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedReal {
    enclosure: Enclosure,
    precision: f64,
    working_bits: u32,
}

impl BoundedReal {
    /// Evaluates `compute` on the bit ladder, intersecting successive
    /// enclosures, until `(hi - lo) / max(1, lo) <= precision`. Tighter
    /// targets only run further down the same ladder, so results for
    /// smaller `precision` are nested inside results for larger ones.
    pub fn refine<F: FnMut(u32) -> Enclosure>(precision: f64, mut compute: F) -> Result<Self> {
        if !(precision > 0.0 && precision.is_finite()) {
            return Err(Error::BadPrecision(format!("{precision}")));
        }
        let target = BigRational::from_float(precision).expect("finite precision");
        let mut current: Option<Enclosure> = None;
        for bits in bit_ladder(DEFAULT_PRECISION) {
            let next = compute(bits);
            let merged = match current {
                Some(prev) => prev.intersect(&next),
                None => next,
            };
            if merged.relative_width() <= target {
                return Ok(BoundedReal {
                    enclosure: merged,
                    precision,
                    working_bits: bits,
                });
            }
            current = Some(merged);
        }
        Err(Error::BadPrecision(format!(
            "{precision} (reached {} at {MAX_WORKING_BITS} bits)",
            current
                .map(|e| decimal(&e.relative_width(), 3, true))
                .unwrap_or_default()
        )))
    }

    pub fn exact(x: BigRational) -> Self {
        BoundedReal {
            enclosure: Enclosure::exact(x),
            precision: DEFAULT_PRECISION,
            working_bits: MIN_WORKING_BITS,
        }
    }

    pub fn enclosure(&self) -> &Enclosure {
        &self.enclosure
    }

    pub fn lo(&self) -> &BigRational {
        self.enclosure.lo()
    }

    pub fn hi(&self) -> &BigRational {
        self.enclosure.hi()
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    pub fn working_bits(&self) -> u32 {
        self.working_bits
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.enclosure.contains(x)
    }

    /// Exact position of `x` relative to the enclosure: `Less` if below
    /// `lo`, `Greater` if above `hi`, `Equal` if inside.
    pub fn locate(&self, x: &BigRational) -> Ordering {
        if x < self.lo() {
            Ordering::Less
        } else if x > self.hi() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }

    pub fn lo_decimal(&self, digits: usize) -> String {
        decimal(self.lo(), digits, false)
    }

    pub fn hi_decimal(&self, digits: usize) -> String {
        decimal(self.hi(), digits, true)
    }
}

impl Serialize for BoundedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let digits = significant_digits(self.precision);
        let mut st = serializer.serialize_struct("BoundedReal", 4)?;
        st.serialize_field("lo", &self.lo_decimal(digits))?;
        st.serialize_field("hi", &self.hi_decimal(digits))?;
        st.serialize_field("precision", &format!("{:e}", self.precision))?;
        st.serialize_field("working_bits", &self.working_bits)?;
        st.end()
    }
}

/// Decimal digits that resolve a relative precision, plus two guard digits.
pub fn significant_digits(precision: f64) -> usize {
    ((-precision.log10()).ceil().max(1.0) as usize + 2).min(40)
}

/// Decimal string with `sig` significant digits, rounded down (or up).
pub fn decimal(x: &BigRational, sig: usize, up: bool) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let negative = x.is_negative();
    let ax = x.abs();
    let round_up = up != negative;
    // 10^e <= ax < 10^(e+1)
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut e: i64 = 0;
    let mut p = BigRational::one();
    if ax >= p {
        while &p * &ten <= ax {
            p *= &ten;
            e += 1;
        }
    } else {
        while p > ax {
            p /= &ten;
            e -= 1;
        }
    }
    let frac = (sig as i64 - 1 - e).max(0) as u32;
    let scaled = &ax * BigRational::from_integer(BigInt::from(10).pow(frac));
    let m = if round_up {
        scaled.ceil().to_integer()
    } else {
        scaled.floor().to_integer()
    };
    let mut digits = m.to_str_radix(10);
    if frac > 0 {
        let frac = frac as usize;
        if digits.len() <= frac {
            digits = format!("{}{digits}", "0".repeat(frac + 1 - digits.len()));
        }
        digits.insert(digits.len() - frac, '.');
    }
    match (negative, m.sign()) {
        (true, Sign::Plus) => format!("-{digits}"),
        _ => digits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn f(x: &BigRational) -> f64 {
        use num_traits::ToPrimitive;
        x.to_f64().unwrap()
    }

    #[test]
    fn rounding_is_directed() {
        let third = r(1, 3);
        let lo = round_rational(&third, 64, false);
        let hi = round_rational(&third, 64, true);
        assert!(lo < third && third < hi);
        assert_eq!(hi.denom().trailing_zeros(), Some(hi.denom().bits() - 1));
        let neg = -third.clone();
        assert!(round_rational(&neg, 64, false) < neg);
        assert_eq!(round_rational(&r(3, 4), 64, false), r(3, 4));
    }

    #[test]
    fn sqrt_encloses() {
        for v in [2i64, 3, 17, 1_000_003] {
            let e = Enclosure::from_int(v).sqrt(80);
            assert!(e.lo() * e.lo() <= r(v, 1));
            assert!(e.hi() * e.hi() >= r(v, 1));
            assert!(f(&e.width()) < 1e-20 * (v as f64).sqrt());
        }
        let e = Enclosure::from_int(16).sqrt(64);
        assert_eq!(e, Enclosure::from_int(4));
        let e = Enclosure::from_ratio(17, 4).sqrt(64);
        assert!((f(e.lo()) - 4.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exp_encloses_known_values() {
        let e = exp_rational(&r(1, 1), 96);
        assert!(f(e.lo()) <= std::f64::consts::E && std::f64::consts::E <= f(e.hi()) + 1e-15);
        assert!(f(&e.width()) < 1e-25);
        let zero = exp_rational(&r(0, 1), 64);
        assert_eq!(zero.lo(), &r(1, 1));
        let minus4 = exp_rational(&r(-4, 1), 80);
        assert!((f(minus4.lo()) - (-4f64).exp()).abs() < 1e-17);
        let big = exp_rational(&r(-199, 1), 80);
        assert!(big.lo().is_positive());
        let rel = f(&(big.width() / big.lo()));
        assert!(rel < 1e-18, "relative width {rel}");
    }

    #[test]
    fn ln2_encloses() {
        let l = ln2(100);
        assert!(f(l.lo()) <= std::f64::consts::LN_2 + 1e-16);
        assert!(f(l.hi()) >= std::f64::consts::LN_2 - 1e-16);
        assert!(f(&l.width()) < 1e-28);
    }

    #[test]
    fn comparisons() {
        let a = Enclosure::new(r(1, 1), r(2, 1));
        let b = Enclosure::new(r(2, 1), r(3, 1));
        assert_eq!(a.le(&b), Verdict::Holds);
        assert_eq!(a.lt(&b), Verdict::Indeterminate);
        assert_eq!(b.le(&Enclosure::from_ratio(1, 2)), Verdict::Fails);
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(decimal(&r(5, 2), 6, false), "2.50000");
        assert_eq!(decimal(&r(1, 3), 4, false), "0.3333");
        assert_eq!(decimal(&r(1, 3), 4, true), "0.3334");
        assert_eq!(decimal(&r(-1, 3), 4, false), "-0.3334");
        assert_eq!(decimal(&r(176, 1), 3, true), "176");
        assert_eq!(decimal(&r(1, 1000), 2, false), "0.0010");
        assert_eq!(decimal(&r(720896, 1), 3, false), "720896");
    }

    #[test]
    fn refine_reaches_target_and_nests() {
        let sqrt2 = |bits: u32| Enclosure::from_int(2).sqrt(bits);
        let coarse = BoundedReal::refine(1e-12, sqrt2).unwrap();
        let fine = BoundedReal::refine(1e-30, sqrt2).unwrap();
        assert!(coarse.lo() <= fine.lo() && fine.hi() <= coarse.hi());
        assert!(f(&fine.enclosure().relative_width()) <= 1e-30);
        assert!(matches!(
            BoundedReal::refine(0.0, sqrt2),
            Err(Error::BadPrecision(_))
        ));
        assert!(matches!(
            BoundedReal::refine(1e-80, sqrt2),
            Err(Error::BadPrecision(_))
        ));
    }
}
