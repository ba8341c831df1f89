//! Largest `B_d`-free families by cardinality or Lubell value.
//!
//! Up to `n = 4` every family is tried. Beyond that a branch and bound
//! decides subsets in increasing code order, "take" before "skip", and only
//! tests the copies of `B_d` that pass through the set just taken.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::alpha::{alpha, bnd_upper_bound};
use crate::binomial;
use crate::error::{Error, Result};
use crate::lattice::{find_bd, full_mask, DenseSet, SetFamily};
use crate::lubell::format_rational;
use crate::real::{decimal, Verdict, DEFAULT_PRECISION};

/// Hard cap on `n`.
pub const SEARCH_MAX_N: usize = 20;
/// Largest `n` searched by trying every family.
pub const EXHAUSTIVE_MAX_N: usize = 4;
/// Default node budget for the branch and bound.
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Cardinality,
    Lubell,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Cardinality => "cardinality",
            Objective::Lubell => "lubell",
        })
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cardinality" => Ok(Objective::Cardinality),
            "lubell" => Ok(Objective::Lubell),
            other => Err(Error::InvalidInput(format!(
                "unknown objective {other:?}, expected cardinality or lubell"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub d: usize,
    pub objective: Objective,
    #[serde(serialize_with = "serialize_rational")]
    pub value: BigRational,
    /// Lexicographically smallest optimal family found, by sorted codes.
    pub witness: SetFamily,
    /// True iff the search space was exhausted.
    pub exact: bool,
    pub nodes_explored: u64,
}

fn serialize_rational<S: Serializer>(
    r: &BigRational,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&format_rational(r))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: u64,
    /// Spread the exhaustive sweep over the rayon pool.
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_SEARCH_BUDGET,
            parallel: true,
        }
    }
}

/// Per-level weights as integers over a common denominator.
struct Weights {
    per_level: Vec<u128>,
    denom: u128,
}

impl Weights {
    fn new(n: usize, objective: Objective) -> Self {
        match objective {
            Objective::Cardinality => Weights {
                per_level: vec![1; n + 1],
                denom: 1,
            },
            Objective::Lubell => {
                let binoms: Vec<u128> = (0..=n)
                    .map(|k| binomial::global().get(n, k).try_into().expect("n <= 20"))
                    .collect();
                let denom = binoms.iter().fold(1u128, |acc, &b| acc.lcm(&b));
                Weights {
                    per_level: binoms.iter().map(|&b| denom / b).collect(),
                    denom,
                }
            }
        }
    }

    fn of(&self, code: u64) -> u128 {
        self.per_level[code.count_ones() as usize]
    }

    fn value(&self, total: u128) -> BigRational {
        BigRational::new(BigInt::from(total), BigInt::from(self.denom))
    }
}

fn check_args(n: usize, d: usize) -> Result<()> {
    if n > SEARCH_MAX_N {
        return Err(Error::BudgetExceeded(format!(
            "search is capped at n = {SEARCH_MAX_N}, got {n}"
        )));
    }
    if d == 0 {
        return Err(Error::PreconditionViolated("d must be at least 1".into()));
    }
    Ok(())
}

/// Best `B_d`-free family: exhaustive for `n <= 4`, branch and bound above.
pub fn max_bd_free(n: usize, d: usize, objective: Objective, budget: u64) -> Result<SearchResult> {
    max_bd_free_with(
        n,
        d,
        objective,
        &SearchOptions {
            budget,
            ..SearchOptions::default()
        },
    )
}

pub fn max_bd_free_with(
    n: usize,
    d: usize,
    objective: Objective,
    options: &SearchOptions,
) -> Result<SearchResult> {
    if n <= EXHAUSTIVE_MAX_N {
        exhaustive(n, d, objective, options.parallel)
    } else {
        branch_and_bound(n, d, objective, options.budget)
    }
}

/// `(total, members)` ordered so that the maximum is the preferred optimum.
fn better(a: &(u128, u64), b: &(u128, u64)) -> Ordering {
    a.0.cmp(&b.0).then_with(|| lex_members(b.1, a.1))
}

/// Lexicographic order of the sorted code sequences of two families given
/// as masks over `2^[n]`.
fn lex_members(a: u64, b: u64) -> Ordering {
    let mut x = a;
    let mut y = b;
    loop {
        match (x == 0, y == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (i, j) = (x.trailing_zeros(), y.trailing_zeros());
        if i != j {
            return i.cmp(&j);
        }
        x &= x - 1;
        y &= y - 1;
    }
}

/// Tries all `2^(2^n)` families, `n <= 4`.
pub fn exhaustive(
    n: usize,
    d: usize,
    objective: Objective,
    parallel: bool,
) -> Result<SearchResult> {
    check_args(n, d)?;
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive search is limited to n <= {EXHAUSTIVE_MAX_N}"
        )));
    }
    let weights = Weights::new(n, objective);
    let total_families = 1u64 << (1u32 << n);
    let ground = full_mask(n);
    let score = |mask: u64| -> Option<(u128, u64)> {
        let bits: Vec<u64> = (0..1u64 << n).filter(|&c| mask >> c & 1 == 1).collect();
        let contains = |x: u64| mask >> x & 1 == 1;
        if find_bd(&bits, &contains, ground, d).is_some() {
            return None;
        }
        Some((bits.iter().map(|&c| weights.of(c)).sum(), mask))
    };
    let pick = |a: (u128, u64), b: (u128, u64)| {
        if better(&b, &a) == Ordering::Greater {
            b
        } else {
            a
        }
    };
    let best = if parallel {
        (0..total_families)
            .into_par_iter()
            .filter_map(score)
            .reduce(|| (0, 0), pick)
    } else {
        (0..total_families).filter_map(score).fold((0, 0), pick)
    };
    Ok(SearchResult {
        n,
        d,
        objective,
        value: weights.value(best.0),
        witness: SetFamily::from_mask(n, best.1),
        exact: true,
        nodes_explored: total_families,
    })
}

/// Branch and bound over codes `0, 1, ..., 2^n - 1`.
///
/// A branch is cut when the weight taken so far plus all remaining weight
/// cannot beat the incumbent, and the incumbent only changes on strict
/// improvement, so the first optimum met is the lexicographically smallest.
pub fn branch_and_bound(
    n: usize,
    d: usize,
    objective: Objective,
    budget: u64,
) -> Result<SearchResult> {
    check_args(n, d)?;
    let weights = Weights::new(n, objective);
    let size = 1usize << n;
    let mut suffix = vec![0u128; size + 1];
    for c in (0..size).rev() {
        suffix[c] = suffix[c + 1] + weights.of(c as u64);
    }
    let mut st = Bnb {
        d,
        weights: &weights,
        suffix: &suffix,
        budget,
        nodes: 0,
        exhausted: false,
        current: Vec::new(),
        dense: DenseSet::new(n),
        total: 0,
        found: false,
        best: Vec::new(),
        best_total: 0,
    };
    st.go(0);
    Ok(SearchResult {
        n,
        d,
        objective,
        value: weights.value(st.best_total),
        witness: SetFamily::from_sorted_bits(n, st.best),
        exact: !st.exhausted,
        nodes_explored: st.nodes,
    })
}

struct Bnb<'a> {
    d: usize,
    weights: &'a Weights,
    suffix: &'a [u128],
    budget: u64,
    nodes: u64,
    exhausted: bool,
    current: Vec<u64>,
    dense: DenseSet,
    total: u128,
    found: bool,
    best: Vec<u64>,
    best_total: u128,
}

impl Bnb<'_> {
    fn go(&mut self, pos: usize) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if self.found && self.total + self.suffix[pos] <= self.best_total {
            return;
        }
        if pos + 1 == self.suffix.len() {
            if !self.found || self.total > self.best_total {
                self.found = true;
                self.best = self.current.clone();
                self.best_total = self.total;
            }
            return;
        }
        let x = pos as u64;
        self.current.push(x);
        self.dense.insert(x);
        let dense = &self.dense;
        if !contains_through(&self.current, &|y| dense.contains(y), x, self.d) {
            let w = self.weights.of(x);
            self.total += w;
            self.go(pos + 1);
            self.total -= w;
        }
        self.current.pop();
        self.dense.remove(x);
        self.go(pos + 1);
    }
}

/// Whether `list` (which contains `x`) has a copy of `B_d` through `x`.
///
/// Split a copy by its outermost atom `S`: either `x` avoids `S` and
/// `x ∪ S` is in the family, or `S ⊆ x` and `x \ S` is; in both cases the
/// rest of the copy is a `B_{d-1}` in `F_S` through `x` or `x \ S`.
pub(crate) fn contains_through(
    list: &[u64],
    contains: &dyn Fn(u64) -> bool,
    x: u64,
    d: usize,
) -> bool {
    if d == 0 {
        return true;
    }
    if list.len() < 1usize << d {
        return false;
    }
    for &y in list {
        if y == x {
            continue;
        }
        let (s, next) = if x & y == x {
            (y & !x, x)
        } else if x & y == y {
            (x & !y, y)
        } else {
            continue;
        };
        if d == 1 {
            return true;
        }
        let sub: Vec<u64> = list
            .iter()
            .copied()
            .filter(|&a| a & s == 0 && contains(a | s))
            .collect();
        let inner = |a: u64| a & s == 0 && contains(a) && contains(a | s);
        if contains_through(&sub, &inner, next, d - 1) {
            return true;
        }
    }
    false
}

/// One line of a [`bound_audit`] margin table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditRow {
    pub quantity: String,
    pub value: String,
    pub bound_lo: String,
    pub bound_hi: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub d: usize,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == Verdict::Holds)
    }
}

/// Compares an exact result with `22 n^(-1/2^d) 2^n` (family size) and
/// `α_d(n)` (Lubell value of the witness).
pub fn bound_audit(n: usize, d: usize, result: &SearchResult) -> Result<AuditReport> {
    if !result.exact {
        return Err(Error::PreconditionViolated(
            "bound audit needs an exact search result".into(),
        ));
    }
    let digits = 12;
    let mut rows = Vec::new();
    if n >= 1 {
        let bound = bnd_upper_bound(n as u64, d, DEFAULT_PRECISION)?;
        let size = BigRational::from_integer(BigInt::from(result.witness.len()));
        let e = bound.to_enclosure();
        rows.push(AuditRow {
            quantity: "cardinality".into(),
            value: format_rational(&size),
            bound_lo: decimal(e.lo(), digits, false),
            bound_hi: decimal(e.hi(), digits, true),
            verdict: bound.admits(&size),
        });
    }
    let a = alpha(d, n as u64, DEFAULT_PRECISION)?;
    let h = crate::lubell::lubell(&result.witness);
    let verdict = if &h <= a.lo() {
        Verdict::Holds
    } else if &h > a.hi() {
        Verdict::Fails
    } else {
        Verdict::Indeterminate
    };
    rows.push(AuditRow {
        quantity: "lubell".into(),
        value: format_rational(&h),
        bound_lo: decimal(a.lo(), digits, false),
        bound_hi: decimal(a.hi(), digits, true),
        verdict,
    });
    Ok(AuditReport { n, d, rows })
}
