//! Built-in property suites behind `boolcube selftest`.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::{binomial_ratio_bound_check, check_recursion_identity, check_sandwich_bounds};
use crate::binomial::{self, BinomialTable};
use crate::cubes::{correspondence_check, IntSet};
use crate::error::{Error, Result};
use crate::extraction::verify_theorem2_smallcase;
use crate::lattice::SetFamily;
use crate::lubell::{chain_moments_oracle, chain_second_moment_with, lubell_with};
use crate::real::Verdict;

pub const SUITES: [&str; 5] = [
    "lubell",
    "alpha",
    "binomial-ratio",
    "correspondence",
    "smallcase",
];

const SEED: u64 = 0x5eed;
const MAX_REPORTED: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub checks: u64,
    /// First few failing cases.
    pub failures: Vec<String>,
}

/// Settings shared by the suites; the table can be swapped for fault
/// injection.
#[derive(Clone, Debug)]
pub struct SelftestContext {
    pub table: BinomialTable,
}

impl Default for SelftestContext {
    fn default() -> Self {
        SelftestContext {
            table: binomial::global().clone(),
        }
    }
}

struct Tally {
    checks: u64,
    failures: Vec<String>,
    failed: u64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failures: Vec::new(),
            failed: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(what());
            }
        }
    }

    fn finish(self, suite: &str) -> SuiteResult {
        SuiteResult {
            suite: suite.to_string(),
            passed: self.failed == 0,
            checks: self.checks,
            failures: self.failures,
        }
    }
}

/// Runs every suite, or only `only`.
pub fn run_selftest(only: Option<&str>, ctx: &SelftestContext) -> Result<Vec<SuiteResult>> {
    if let Some(name) = only {
        if !SUITES.contains(&name) {
            return Err(Error::InvalidInput(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITES.join(", ")
            )));
        }
    }
    SUITES
        .iter()
        .filter(|s| only.is_none_or(|o| o == **s))
        .map(|s| run_suite(s, ctx))
        .collect()
}

pub fn run_suite(name: &str, ctx: &SelftestContext) -> Result<SuiteResult> {
    match name {
        "lubell" => suite_lubell(ctx),
        "alpha" => suite_alpha(),
        "binomial-ratio" => suite_binomial_ratio(),
        "correspondence" => suite_correspondence(),
        "smallcase" => suite_smallcase(),
        other => Err(Error::InvalidInput(format!("unknown suite {other:?}"))),
    }
}

/// `h_n` and the second chain moment against full-chain enumeration.
fn suite_lubell(ctx: &SelftestContext) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut t = Tally::new();
    for _ in 0..200 {
        let n = rng.gen_range(0..=6usize);
        let mask = if n == 6 {
            rng.gen::<u64>()
        } else {
            rng.gen::<u64>() & ((1 << (1 << n)) - 1)
        };
        let f = SetFamily::from_mask(n, mask);
        let (ex, ex2) = chain_moments_oracle(&f)?;
        t.check(lubell_with(&ctx.table, &f) == ex, || {
            format!("lubell of {f:?} disagrees with chain count")
        });
        t.check(chain_second_moment_with(&ctx.table, &f) == ex2, || {
            format!("second moment of {f:?} disagrees with chain count")
        });
    }
    Ok(t.finish("lubell"))
}

/// Sandwich bounds and the defining recursion over a grid of `(d, n)`.
fn suite_alpha() -> Result<SuiteResult> {
    let mut ns: Vec<u64> = (1..=200).collect();
    ns.extend([500, 1000, 10_000, 100_000, 1_000_000]);
    let cases: Vec<(usize, u64)> = (1..=12)
        .flat_map(|d| {
            ns.iter()
                .filter(move |&&n| n >= d as u64)
                .map(move |&n| (d, n))
        })
        .collect();
    let results: Vec<(usize, u64, Verdict, bool)> = cases
        .par_iter()
        .map(|&(d, n)| {
            let v = check_sandwich_bounds(d, n).unwrap_or(Verdict::Fails);
            let r = check_recursion_identity(d, n).unwrap_or(false);
            (d, n, v, r)
        })
        .collect();
    let mut t = Tally::new();
    for (d, n, v, r) in results {
        t.check(v == Verdict::Holds, || format!("sandwich d={d} n={n}: {v}"));
        t.check(r, || format!("recursion identity d={d} n={n}"));
    }
    Ok(t.finish("alpha"))
}

/// `C(2n,k)/C(2n,n) <= exp(-(2/n) C(n-k,2))` for every `k <= n <= 60`.
fn suite_binomial_ratio() -> Result<SuiteResult> {
    let cases: Vec<(u64, u64)> = (1..=60u64)
        .flat_map(|n| (0..=n).map(move |k| (n, k)))
        .collect();
    let results: Vec<(u64, u64, Verdict)> = cases
        .par_iter()
        .map(|&(n, k)| {
            (
                n,
                k,
                binomial_ratio_bound_check(n, k).unwrap_or(Verdict::Fails),
            )
        })
        .collect();
    let mut t = Tally::new();
    for (n, k, v) in results {
        t.check(v == Verdict::Holds, || format!("n={n} k={k}: {v}"));
    }
    Ok(t.finish("binomial-ratio"))
}

/// Cube detection in `Fints` against `B_d` detection in level families,
/// for every `Fints ⊆ {0..n}`, `n <= 6`, `d ∈ {1, 2}`.
fn suite_correspondence() -> Result<SuiteResult> {
    let mut t = Tally::new();
    for n in 0..=6u64 {
        for mask in 0..1u64 << (n + 1) {
            let h = IntSet::from_mask(n, mask);
            for d in 1..=2 {
                let ok = correspondence_check(&h, n as usize, d)?;
                t.check(ok, || format!("n={n} d={d} Fints={:?}", h.elements()));
            }
        }
    }
    Ok(t.finish("correspondence"))
}

/// Every `B_d`-free family on `n <= 3` has `h_n <= α_d(n)`, with exact
/// maxima for `d = 1`.
fn suite_smallcase() -> Result<SuiteResult> {
    let mut t = Tally::new();
    for n in 1..=3 {
        for d in 1..=3 {
            let rep = verify_theorem2_smallcase(n, d)?;
            t.check(rep.bound_respected(), || {
                format!("n={n} d={d}: {} violations", rep.violations)
            });
            if d == 1 {
                let one = num_rational::BigRational::from_integer(BigInt::from(1));
                t.check(rep.max_lubell == one, || format!("n={n} d=1: max is not 1"));
            }
        }
    }
    Ok(t.finish("smallcase"))
}
