//! Colorings of `2^[n]`: monochromatic `B_d` via the Lubell pigeonhole,
//! `R(B_s, B_1) = 2s`, and randomized rainbow `B_r` search.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::{alpha, gr_threshold_met};
use crate::error::{Error, Result};
use crate::extraction::{above_threshold, extract_bd, Extraction};
use crate::lattice::{contains_bd, AlgebraWitness, SetFamily, SubsetCode};
use crate::lubell::lubell;
use crate::real::{BoundedReal, Verdict, DEFAULT_PRECISION};

/// Largest ground set a dense coloring may have.
pub const MAX_COLORING_N: usize = 20;
/// Largest number of colors.
pub const MAX_COLORS: u64 = 1 << 16;
/// Largest `s` for which the middle-layer construction is checked.
pub const CONSTRUCTION_MAX_S: usize = 6;
/// Largest block size for [`lubell_weighted_distribution`].
pub const SAMPLER_EXACT_MAX_T: usize = 16;
/// Largest `r` for [`rainbow_search`].
pub const RAINBOW_MAX_R: usize = 16;

/// Dense coloring of `2^[n]`, indexed by subset code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    n: usize,
    r: u64,
    colors: Vec<u32>,
}

impl Coloring {
    pub fn new(n: usize, r: u64, colors: Vec<u32>) -> Result<Self> {
        if n > MAX_COLORING_N {
            return Err(Error::BudgetExceeded(format!(
                "colorings are stored densely up to n = {MAX_COLORING_N}, got {n}"
            )));
        }
        if r == 0 || r > MAX_COLORS {
            return Err(Error::InvalidInput(format!(
                "number of colors must be in 1..={MAX_COLORS}, got {r}"
            )));
        }
        if colors.len() != 1usize << n {
            return Err(Error::InvalidInput(format!(
                "expected {} colors for n = {n}, got {}",
                1usize << n,
                colors.len()
            )));
        }
        if let Some(i) = colors.iter().position(|&c| u64::from(c) >= r) {
            return Err(Error::InvalidInput(format!(
                "colors[{i}] = {} is not below r = {r}",
                colors[i]
            )));
        }
        Ok(Coloring { n, r, colors })
    }

    /// Two-coloring whose bit `A` of `index` is the color of `A`.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 6, "index form only covers n <= 6");
        Coloring {
            n,
            r: 2,
            colors: (0..1u64 << n).map(|a| (index >> a & 1) as u32).collect(),
        }
    }

    pub fn from_fn<F: Fn(SubsetCode) -> u32>(n: usize, r: u64, f: F) -> Result<Self> {
        let colors = (0..1u64 << n.min(MAX_COLORING_N + 1))
            .map(|a| f(SubsetCode(a)))
            .collect();
        Coloring::new(n, r, colors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, set: SubsetCode) -> u32 {
        self.colors[set.bits() as usize]
    }

    pub fn class(&self, color: u32) -> SetFamily {
        let bits = (0..self.colors.len() as u64)
            .filter(|&a| self.colors[a as usize] == color)
            .collect();
        SetFamily::from_sorted_bits(self.n, bits)
    }
}

/// Whether the pigeonhole guarantee covers a given `(n, r, d)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    /// `r <= (n+1)^(2/2^d) / 2` and `n + 1 >= (2^d - 2/ln 2)^2`.
    Applies,
    /// `r` is small enough but the size condition fails or is undecided.
    Unverified,
    /// Too many colors for the guarantee.
    OutOfRange,
}

pub fn pigeonhole_guarantee(n: usize, r: u64, d: usize) -> Guarantee {
    if d == 0 {
        return Guarantee::Applies;
    }
    // r <= (n+1)^(1/2^(d-1)) / 2  iff  (2r)^(2^(d-1)) <= n+1
    // (2r)^(2^(d-1)) >= 2^128 > n + 1 once d >= 8
    let small_r =
        d < 8 && num_traits::pow(BigInt::from(2 * r), 1usize << (d - 1)) <= BigInt::from(n + 1);
    if !small_r {
        return Guarantee::OutOfRange;
    }
    match gr_threshold_met(d, n as u64) {
        Verdict::Holds => Guarantee::Applies,
        _ => Guarantee::Unverified,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonochromaticReport {
    pub n: usize,
    pub r: u64,
    pub d: usize,
    /// `h_n` of each color class, as `p/q`.
    pub class_lubell: Vec<String>,
    pub threshold: BoundedReal,
    pub guarantee: Guarantee,
    pub color: Option<u32>,
    pub witness: Option<AlgebraWitness>,
}

impl MonochromaticReport {
    pub fn is_found(&self) -> bool {
        self.witness.is_some()
    }
}

/// Runs [`extract_bd`] on the first color class whose Lubell value clears
/// `hi(α_d(n))`. Reports no witness when no class does.
pub fn monochromatic_extract(c: &Coloring, d: usize) -> Result<MonochromaticReport> {
    if d == 0 {
        return Err(Error::PreconditionViolated("d must be at least 1".into()));
    }
    let threshold = alpha(d, c.n as u64, DEFAULT_PRECISION)?;
    let classes: Vec<SetFamily> = (0..c.r as u32).map(|i| c.class(i)).collect();
    let class_lubell = classes
        .iter()
        .map(|f| crate::lubell::format_rational(&lubell(f)))
        .collect();
    let mut report = MonochromaticReport {
        n: c.n,
        r: c.r,
        d,
        class_lubell,
        threshold,
        guarantee: pigeonhole_guarantee(c.n, c.r, d),
        color: None,
        witness: None,
    };
    for (i, family) in classes.iter().enumerate() {
        if !above_threshold(family, d)? {
            continue;
        }
        if let Extraction::Found { witness, .. } = extract_bd(family, d)? {
            report.color = Some(i as u32);
            report.witness = Some(witness);
            break;
        }
    }
    Ok(report)
}

/// Indices `I` (0-based, increasing) into a list with `Σ_{i∈I} x_i = target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SublistCertificate {
    pub indices: Vec<usize>,
    pub target: u64,
}

impl SublistCertificate {
    pub fn verify(&self, xs: &[u64]) -> bool {
        let distinct: BTreeSet<usize> = self.indices.iter().copied().collect();
        distinct.len() == self.indices.len()
            && self.indices.iter().all(|&i| i < xs.len())
            && self.indices.iter().map(|&i| xs[i]).sum::<u64>() == self.target
    }
}

/// Sublist of positive integers summing to `k`, for lists of length `s`
/// with sum at most `2s - 1` and `0 <= k <= s`.
///
/// Sorted ascending, the largest entry `x_s` is at most `s`; targets below
/// `s` come from the first `s - 1` entries, and `k = s` adds `x_s` to a
/// sublist for `s - x_s`.
pub fn brown_sublist(xs: &[u64], k: u64) -> Result<SublistCertificate> {
    let s = xs.len() as u64;
    if xs.contains(&0) {
        return Err(Error::PreconditionViolated(
            "entries must be positive".into(),
        ));
    }
    let sum: u64 = xs.iter().sum();
    if s == 0 || sum > 2 * s - 1 {
        return Err(Error::PreconditionViolated(format!(
            "sum {sum} exceeds 2s - 1 for s = {s}"
        )));
    }
    if k > s {
        return Err(Error::PreconditionViolated(format!(
            "k = {k} exceeds s = {s}"
        )));
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by_key(|&i| (xs[i], i));
    let mut indices = Vec::new();
    let mut len = order.len();
    let target = k;
    let mut k = k;
    while k > 0 {
        let last = order[len - 1];
        if xs[last] == 1 {
            indices.extend(&order[..k as usize]);
            break;
        }
        if k == len as u64 {
            indices.push(last);
            k -= xs[last];
        }
        len -= 1;
    }
    indices.sort_unstable();
    Ok(SublistCertificate { indices, target })
}

/// `2^[2s-1]` with the size-`s` sets in color 1 and everything else in color 0.
pub fn middle_layer_coloring(s: usize) -> Result<Coloring> {
    if s == 0 {
        return Err(Error::PreconditionViolated("s must be at least 1".into()));
    }
    let n = 2 * s - 1;
    Coloring::from_fn(n, 2, |a| u32::from(a.len() == s))
}

/// Outcome of one side of [`verify_r_s_1`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckStatus {
    Verified {
        checked: u64,
    },
    /// First coloring, by index, with neither a color-0 `B_s` nor a
    /// color-1 `B_1`; for the construction, the offending monochromatic copy.
    Violated {
        coloring_index: Option<u64>,
        color: Option<u32>,
        witness: Option<AlgebraWitness>,
    },
    Skipped {
        reason: String,
    },
}

impl CheckStatus {
    pub fn is_verified(&self) -> bool {
        matches!(self, CheckStatus::Verified { .. })
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, CheckStatus::Violated { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RsOneReport {
    pub s: usize,
    /// `2s - 1`: the middle-layer coloring should avoid both patterns.
    pub construction_n: usize,
    pub construction: CheckStatus,
    /// `2s`: every two-coloring should contain one of them.
    pub upper_bound_n: usize,
    pub upper_bound: CheckStatus,
    /// Both sides verified, so `R(B_s, B_1) = 2s` holds exactly.
    pub established: bool,
}

/// Checks `R(B_s, B_1) = 2s` with color 0 as red and color 1 as blue.
///
/// The construction side runs the detector on both classes of
/// [`middle_layer_coloring`] for `s <= 6`. The upper-bound side sweeps all
/// `2^(2^(2s))` colorings of `2^[2s]` when that count is at most
/// `exhaustive_limit`.
pub fn verify_r_s_1(s: usize, exhaustive_limit: u128) -> Result<RsOneReport> {
    if s == 0 {
        return Err(Error::PreconditionViolated("s must be at least 1".into()));
    }
    let construction = if s > CONSTRUCTION_MAX_S {
        CheckStatus::Skipped {
            reason: format!("construction check limited to s <= {CONSTRUCTION_MAX_S}"),
        }
    } else {
        let c = middle_layer_coloring(s)?;
        let red = contains_bd(&c.class(0), s)?;
        let blue = contains_bd(&c.class(1), 1)?;
        match (red, blue) {
            (None, None) => CheckStatus::Verified { checked: 1 },
            (Some(w), _) => CheckStatus::Violated {
                coloring_index: None,
                color: Some(0),
                witness: Some(w),
            },
            (None, Some(w)) => CheckStatus::Violated {
                coloring_index: None,
                color: Some(1),
                witness: Some(w),
            },
        }
    };
    let n = 2 * s;
    let count_log2 = 1u32 << n.min(31);
    let upper_bound = if n > 6 || (1u128 << count_log2) > exhaustive_limit {
        CheckStatus::Skipped {
            reason: format!("2^{count_log2} colorings exceed the exhaustive limit"),
        }
    } else {
        let total = 1u64 << count_log2;
        let avoids = |index: u64| -> bool {
            let c = Coloring::from_index(n, index);
            let red = contains_bd(&c.class(0), s)
                .expect("within budget")
                .is_some();
            red || contains_bd(&c.class(1), 1)
                .expect("within budget")
                .is_some()
        };
        let first_bad = (0..total).into_par_iter().filter(|&i| !avoids(i)).min();
        match first_bad {
            None => CheckStatus::Verified { checked: total },
            Some(i) => CheckStatus::Violated {
                coloring_index: Some(i),
                color: None,
                witness: None,
            },
        }
    };
    let established = construction.is_verified() && upper_bound.is_verified();
    Ok(RsOneReport {
        s,
        construction_n: 2 * s - 1,
        construction,
        upper_bound_n: n,
        upper_bound,
        established,
    })
}

/// Source of the uniform choices made by [`lubell_weighted_sample`].
pub trait Draw {
    /// Uniform on `0..bound`.
    fn below(&mut self, bound: u64) -> u64;
    /// True with probability `num / den`.
    fn chance(&mut self, num: u64, den: u64) -> bool;
}

impl<R: Rng> Draw for R {
    fn below(&mut self, bound: u64) -> u64 {
        self.gen_range(0..bound)
    }

    fn chance(&mut self, num: u64, den: u64) -> bool {
        self.gen_range(0..den) < num
    }
}

/// Subset of `[t]` where each `k`-set has probability `1 / ((t+1) C(t,k))`:
/// `k` uniform on `0..=t`, then a uniform `k`-subset by selection sampling.
pub fn lubell_weighted_sample<D: Draw + ?Sized>(t: usize, draw: &mut D) -> SubsetCode {
    let k = draw.below(t as u64 + 1);
    let mut needed = k;
    let mut code = 0u64;
    for i in 0..t as u64 {
        if needed == 0 {
            break;
        }
        let remaining = t as u64 - i;
        if needed == remaining || draw.chance(needed, remaining) {
            code |= 1 << i;
            needed -= 1;
        }
    }
    SubsetCode(code)
}

/// Replays a fixed prefix of outcomes, then takes the first outcome,
/// recording the probability of every step.
struct Replay {
    prefix: Vec<u64>,
    taken: Vec<(u64, u64)>,
    weight: BigRational,
}

impl Replay {
    fn step(&mut self, arity: u64, prob: impl Fn(u64) -> BigRational) -> u64 {
        let pos = self.taken.len();
        let outcome = self.prefix.get(pos).copied().unwrap_or(0);
        self.taken.push((outcome, arity));
        self.weight *= prob(outcome);
        outcome
    }
}

fn ratio(p: u64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl Draw for Replay {
    fn below(&mut self, bound: u64) -> u64 {
        self.step(bound, |_| ratio(1, bound))
    }

    fn chance(&mut self, num: u64, den: u64) -> bool {
        // outcome 0 is "true"
        self.step(2, |o| {
            if o == 0 {
                ratio(num, den)
            } else {
                ratio(den - num, den)
            }
        }) == 0
    }
}

/// Exact output distribution of [`lubell_weighted_sample`], obtained by
/// walking every sequence of outcomes the sampler can consume.
pub fn lubell_weighted_distribution(t: usize) -> Result<BTreeMap<SubsetCode, BigRational>> {
    if t > SAMPLER_EXACT_MAX_T {
        return Err(Error::BudgetExceeded(format!(
            "exact sampler distribution limited to t <= {SAMPLER_EXACT_MAX_T}"
        )));
    }
    let mut dist: BTreeMap<SubsetCode, BigRational> = BTreeMap::new();
    let mut stack = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        let mut replay = Replay {
            prefix,
            taken: Vec::new(),
            weight: BigRational::one(),
        };
        let set = lubell_weighted_sample(t, &mut replay);
        for j in replay.prefix.len()..replay.taken.len() {
            for alt in 1..replay.taken[j].1 {
                let mut next: Vec<u64> = replay.taken[..j].iter().map(|&(o, _)| o).collect();
                next.push(alt);
                stack.push(next);
            }
        }
        if !replay.weight.is_zero() {
            *dist.entry(set).or_insert_with(BigRational::zero) += replay.weight;
        }
    }
    Ok(dist)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RainbowOutcome {
    pub r: usize,
    pub block_size: usize,
    pub trials_run: u64,
    /// 1-based trial that produced the witness.
    pub trial: Option<u64>,
    pub witness: Option<AlgebraWitness>,
}

/// Monte Carlo search for a rainbow `B_r` generated by `∅` and one
/// Lubell-weighted sample from each of `r` consecutive blocks of size
/// `⌊n/r⌋`. Trial `i` draws from ChaCha8 seeded with `seed` on stream `i`.
pub fn rainbow_search(c: &Coloring, r: usize, trials: u64, seed: u64) -> Result<RainbowOutcome> {
    if r == 0 || r > c.n {
        return Err(Error::BadPartition { n: c.n, r });
    }
    if r > RAINBOW_MAX_R {
        return Err(Error::PreconditionViolated(format!(
            "rainbow search supports r <= {RAINBOW_MAX_R}"
        )));
    }
    let t = c.n / r;
    let mut outcome = RainbowOutcome {
        r,
        block_size: t,
        trials_run: 0,
        trial: None,
        witness: None,
    };
    for trial in 1..=trials {
        outcome.trials_run = trial;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let atoms: Vec<SubsetCode> = (0..r)
            .map(|i| SubsetCode(lubell_weighted_sample(t, &mut rng).bits() << (i * t)))
            .collect();
        if atoms.iter().any(|a| a.is_empty()) {
            continue;
        }
        let mut seen = BTreeSet::new();
        let rainbow = (0..1u64 << r).all(|mask| {
            let union = (0..r)
                .filter(|&i| mask >> i & 1 == 1)
                .fold(SubsetCode::EMPTY, |acc, i| acc.union(atoms[i]));
            seen.insert(c.color(union))
        });
        if rainbow {
            outcome.trial = Some(trial);
            outcome.witness = Some(AlgebraWitness::new(SubsetCode::EMPTY, atoms));
            break;
        }
    }
    Ok(outcome)
}
