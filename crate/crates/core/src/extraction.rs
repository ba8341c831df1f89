//! Constructive extraction of `B_d` from families with large Lubell value.
//!
//! For `d = 1` any comparable pair will do, and one exists as soon as the
//! family is not an antichain. For `d >= 2` the scan runs over non-empty
//! `S`, smallest `|S|` first and then increasing code, and recurses into the
//! first `F_S` whose Lubell value on `[n] \ S` exceeds `α_{d-1}(n - |S|)`.
//! The witness found there is lifted back to `[n]` and `S` becomes its last
//! atom.

use std::cmp::Ordering;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::alpha;
use crate::binomial;
use crate::error::{Error, Result};
use crate::lattice::{
    full_mask, k_subsets, subfamily_fs, AlgebraWitness, DenseSet, SetFamily, SubsetCode,
    DEFAULT_LATTICE_BUDGET,
};
use crate::lubell::{format_rational, lubell, lubell_of_counts};
use crate::real::{BoundedReal, DEFAULT_PRECISION, FINEST_PRECISION};

/// Largest `n` for [`verify_theorem2_smallcase`].
pub const SMALLCASE_MAX_N: usize = 4;

/// One recursion step of an extraction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceLevel {
    /// Dimension still to be found when this level was entered.
    pub dimension: usize,
    pub k: usize,
    /// The chosen `S`, in coordinates of the original ground set.
    #[serde(serialize_with = "serialize_elements")]
    pub s: SubsetCode,
    /// `h_{n-k}(F_S)`, exact.
    #[serde(serialize_with = "serialize_rational")]
    pub lubell: BigRational,
    /// Enclosure of `α_{dimension-1}(n - k)`.
    pub threshold: BoundedReal,
    /// True when `F_S` would not have cleared `α_{dimension-1}(n)`, so the
    /// step leans on `α` being non-decreasing in `n`.
    pub relies_on_monotonicity: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExtractionTrace {
    pub levels: Vec<TraceLevel>,
    /// Final comparable pair `A ⊊ B` in original coordinates.
    #[serde(serialize_with = "serialize_pair")]
    pub pair: Option<(SubsetCode, SubsetCode)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Extraction {
    Found {
        witness: AlgebraWitness,
        trace: ExtractionTrace,
    },
    NotFound,
    /// Nothing found, and at least one threshold comparison could not be
    /// decided at the finest precision.
    Indeterminate,
}

impl Extraction {
    pub fn witness(&self) -> Option<&AlgebraWitness> {
        match self {
            Extraction::Found { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Extraction::Found { .. })
    }
}

fn serialize_elements<S: serde::Serializer>(
    s: &SubsetCode,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_seq(s.elements())
}

fn serialize_rational<S: serde::Serializer>(
    r: &BigRational,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&format_rational(r))
}

fn serialize_pair<S: serde::Serializer>(
    p: &Option<(SubsetCode, SubsetCode)>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some((a, b)) => ser.collect_seq([a.elements(), b.elements()]),
        None => ser.serialize_none(),
    }
}

/// Default-precision enclosure of `α_dim(m)` and, once needed, the finest one.
type ThresholdEntry = (BoundedReal, Option<BoundedReal>);

/// Thresholds `α_dim(m)` computed on demand and reused within one extraction.
struct Thresholds {
    cache: Vec<Vec<Option<ThresholdEntry>>>,
}

impl Thresholds {
    fn new(dmax: usize, n: usize) -> Self {
        Thresholds {
            cache: vec![vec![None; n + 1]; dmax + 1],
        }
    }

    fn coarse(&mut self, dim: usize, m: usize) -> &BoundedReal {
        &self.entry(dim, m).0
    }

    fn entry(&mut self, dim: usize, m: usize) -> &mut (BoundedReal, Option<BoundedReal>) {
        self.cache[dim][m].get_or_insert_with(|| {
            (
                alpha(dim, m as u64, DEFAULT_PRECISION).expect("default precision is attainable"),
                None,
            )
        })
    }

    /// Strictly above `α_dim(m)`: `Some(true/false)`, or `None` when the value
    /// sits inside the finest enclosure.
    fn exceeds(&mut self, value: &BigRational, dim: usize, m: usize) -> Option<bool> {
        let entry = self.entry(dim, m);
        match entry.0.locate(value) {
            Ordering::Greater => return Some(true),
            Ordering::Less => return Some(false),
            Ordering::Equal => {}
        }
        let fine = entry.1.get_or_insert_with(|| {
            alpha(dim, m as u64, FINEST_PRECISION).expect("finest precision is attainable")
        });
        match fine.locate(value) {
            Ordering::Greater => Some(true),
            Ordering::Less => Some(false),
            Ordering::Equal => None,
        }
    }

    fn best(&self, dim: usize, m: usize) -> BoundedReal {
        let (coarse, fine) = self.cache[dim][m].as_ref().expect("threshold computed");
        fine.clone().unwrap_or_else(|| coarse.clone())
    }
}

/// Finds a copy of `B_d` along the Lubell recursion. Guaranteed to succeed
/// when `lubell(F) > hi(α_d(n))`.
pub fn extract_bd(family: &SetFamily, d: usize) -> Result<Extraction> {
    extract_bd_with_budget(family, d, DEFAULT_LATTICE_BUDGET)
}

pub fn extract_bd_with_budget(family: &SetFamily, d: usize, budget: usize) -> Result<Extraction> {
    if d == 0 {
        return Err(Error::PreconditionViolated("d must be at least 1".into()));
    }
    family.check_budget(budget)?;
    let mut thresholds = Thresholds::new(d, family.n());
    let mut undecided = false;
    let found = extract_rec(family, d, &mut thresholds, &mut undecided);
    Ok(match found {
        Some((witness, trace)) => Extraction::Found { witness, trace },
        None if undecided => Extraction::Indeterminate,
        None => Extraction::NotFound,
    })
}

/// Whether `lubell(F) > hi(α_d(n))`, the condition under which
/// [`extract_bd`] must succeed.
pub fn above_threshold(family: &SetFamily, d: usize) -> Result<bool> {
    let a = alpha(d, family.n() as u64, DEFAULT_PRECISION)?;
    Ok(&lubell(family) > a.hi())
}

fn first_comparable_pair(family: &SetFamily) -> Option<(SubsetCode, SubsetCode)> {
    let members = family.members();
    members.iter().enumerate().find_map(|(i, &a)| {
        members[i + 1..]
            .iter()
            .find(|&&b| a.is_proper_subset_of(b))
            .map(|&b| (a, b))
    })
}

fn extract_rec(
    family: &SetFamily,
    d: usize,
    thresholds: &mut Thresholds,
    undecided: &mut bool,
) -> Option<(AlgebraWitness, ExtractionTrace)> {
    if d == 1 {
        let (a, b) = first_comparable_pair(family)?;
        let witness = AlgebraWitness::new(a, vec![b.difference(a)]);
        let trace = ExtractionTrace {
            levels: Vec::new(),
            pair: Some((a, b)),
        };
        return Some((witness, trace));
    }
    let n = family.n();
    let bits = family
        .members()
        .iter()
        .map(|m| m.bits())
        .collect::<Vec<_>>();
    let dense = DenseSet::from_bits(n, &bits);
    let table = binomial::global();
    let full = full_mask(n);
    for k in 1..=n {
        let m = n - k;
        let candidates: Vec<u64> = k_subsets(n, k).collect();
        // F_S level counts for every S of this size; cheap and order-independent
        let values: Vec<BigRational> = candidates
            .par_iter()
            .map(|&s| {
                let mut counts = vec![0u64; m + 1];
                for &a in &bits {
                    if a & s == 0 && dense.contains(a | s) {
                        counts[a.count_ones() as usize] += 1;
                    }
                }
                lubell_of_counts(table, m, &counts)
            })
            .collect();
        debug_assert!(candidates.iter().all(|&s| s & !full == 0));
        for (&s, value) in candidates.iter().zip(values) {
            match thresholds.exceeds(&value, d - 1, m) {
                Some(true) => {}
                Some(false) => continue,
                None => {
                    *undecided = true;
                    continue;
                }
            }
            let sub = subfamily_fs(family, SubsetCode(s)).expect("S is non-empty");
            let Some((inner, inner_trace)) = extract_rec(&sub.family, d - 1, thresholds, undecided)
            else {
                continue;
            };
            let mut witness = sub.map.lift_witness(&inner);
            witness.atoms.push(SubsetCode(s));
            let relies = &value <= thresholds.coarse(d - 1, n).hi();
            let mut levels = vec![TraceLevel {
                dimension: d,
                k,
                s: SubsetCode(s),
                lubell: value,
                threshold: thresholds.best(d - 1, m),
                relies_on_monotonicity: relies,
            }];
            levels.extend(inner_trace.levels.into_iter().map(|mut l| {
                l.s = sub.map.lift(l.s);
                l
            }));
            let pair = inner_trace
                .pair
                .map(|(a, b)| (sub.map.lift(a), sub.map.lift(b)));
            return Some((witness, ExtractionTrace { levels, pair }));
        }
    }
    None
}

/// Result of the exhaustive small-case audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmallCaseReport {
    pub n: usize,
    pub d: usize,
    pub families_checked: u64,
    pub bd_free_families: u64,
    /// Largest Lubell value over `B_d`-free families, exact.
    #[serde(serialize_with = "serialize_rational")]
    pub max_lubell: BigRational,
    /// Smallest-mask `B_d`-free family attaining the maximum, as sorted codes.
    pub max_family: Vec<SubsetCode>,
    pub threshold: BoundedReal,
    /// `B_d`-free families with Lubell value above `hi(α_d(n))`.
    pub violations: u64,
    /// `B_d`-free families with Lubell value in `(lo, hi]` of the enclosure.
    pub undecided: u64,
}

impl SmallCaseReport {
    pub fn bound_respected(&self) -> bool {
        self.violations == 0
    }
}

/// Runs through every `F ⊆ 2^[n]` and confirms that no `B_d`-free family has
/// Lubell value above `α_d(n)`.
pub fn verify_theorem2_smallcase(n: usize, d: usize) -> Result<SmallCaseReport> {
    if n > SMALLCASE_MAX_N {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive family sweep needs n <= {SMALLCASE_MAX_N}, got {n}"
        )));
    }
    let threshold = alpha(d, n as u64, DEFAULT_PRECISION)?;
    let size = 1usize << n;
    let total: u64 = 1u64 << size;

    struct Acc {
        free: u64,
        best: Option<(BigRational, u64)>,
        violations: u64,
        undecided: u64,
    }
    let merge = |a: Acc, b: Acc| {
        let best = match (a.best, b.best) {
            (Some(x), Some(y)) => {
                // larger value wins; ties go to the smaller mask
                Some(match x.0.cmp(&y.0) {
                    Ordering::Greater => x,
                    Ordering::Less => y,
                    Ordering::Equal => {
                        if x.1 <= y.1 {
                            x
                        } else {
                            y
                        }
                    }
                })
            }
            (x, None) => x,
            (None, y) => y,
        };
        Acc {
            free: a.free + b.free,
            best,
            violations: a.violations + b.violations,
            undecided: a.undecided + b.undecided,
        }
    };
    let empty = || Acc {
        free: 0,
        best: None,
        violations: 0,
        undecided: 0,
    };

    let acc = (0..total)
        .into_par_iter()
        .map(|mask| {
            let family = SetFamily::from_mask(n, mask);
            let mut acc = empty();
            if crate::lattice::contains_bd(&family, d)
                .expect("n is within budget")
                .is_none()
            {
                let h = lubell(&family);
                acc.free = 1;
                if &h > threshold.hi() {
                    acc.violations = 1;
                } else if &h > threshold.lo() {
                    acc.undecided = 1;
                }
                acc.best = Some((h, mask));
            }
            acc
        })
        .reduce(empty, merge);

    let (max_lubell, mask) = acc.best.expect("the empty family is B_d-free");
    Ok(SmallCaseReport {
        n,
        d,
        families_checked: total,
        bd_free_families: acc.free,
        max_lubell,
        max_family: SetFamily::from_mask(n, mask).members().to_vec(),
        threshold,
        violations: acc.violations,
        undecided: acc.undecided,
    })
}
