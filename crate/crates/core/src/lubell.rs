//! Exact Lubell values `h_n(F) = Σ_{A∈F} 1 / C(n, |A|)` and the full-chain
//! identities behind them.
//!
//! A full chain `∅ ⊂ {i1} ⊂ {i1,i2} ⊂ ... ⊂ [n]` is fixed by a permutation of
//! `[n]`. The chain oracles below enumerate all `n!` of them and never touch
//! a binomial coefficient, so they check the closed forms independently.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::binomial::{self, BinomialTable};
use crate::error::{Error, Result};
use crate::lattice::{
    full_mask, k_subsets, submasks_ascending, DenseSet, SetFamily, SubsetCode,
    DEFAULT_LATTICE_BUDGET,
};

/// Largest `n` for which the chain oracles enumerate all `n!` chains.
pub const CHAIN_ORACLE_MAX_N: usize = 8;

/// Largest `n` accepted by [`interval_average_check`].
pub const INTERVAL_AVERAGE_MAX_N: usize = 10;

/// Renders a rational as `p/q`, or `p` when the denominator is 1.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// Parses `p/q` or `p`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn lubell(family: &SetFamily) -> BigRational {
    lubell_with(binomial::global(), family)
}

pub fn lubell_with(table: &BinomialTable, family: &SetFamily) -> BigRational {
    lubell_of_counts(table, family.n(), &family.level_counts())
}

/// `Σ_k counts[k] / C(n, k)`.
pub(crate) fn lubell_of_counts(table: &BinomialTable, n: usize, counts: &[u64]) -> BigRational {
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .fold(BigRational::zero(), |acc, (k, &c)| {
            acc + BigRational::new(BigInt::from(c), table.entry(n, k).clone())
        })
}

/// Walks every full chain of `2^[n]`, handing the `n + 1` chain codes to `visit`.
fn for_each_full_chain(n: usize, visit: &mut dyn FnMut(&[u64])) {
    fn go(n: usize, chain: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
        let top = *chain.last().unwrap();
        if chain.len() == n + 1 {
            visit(chain);
            return;
        }
        for e in 0..n {
            if top >> e & 1 == 0 {
                chain.push(top | 1 << e);
                go(n, chain, visit);
                chain.pop();
            }
        }
    }
    let mut chain = Vec::with_capacity(n + 1);
    chain.push(0u64);
    go(n, &mut chain, visit);
}

/// Exact chain averages `(E X, E C(X, 2))` with `X = |C ∩ F|` over all full
/// chains `C`.
pub fn chain_moments_oracle(family: &SetFamily) -> Result<(BigRational, BigRational)> {
    let n = family.n();
    if n > CHAIN_ORACLE_MAX_N {
        return Err(Error::BudgetExceeded(format!(
            "chain enumeration needs n <= {CHAIN_ORACLE_MAX_N}, got {n}"
        )));
    }
    let dense = DenseSet::from_bits(n, &family.bits());
    let mut chains = 0u64;
    let mut first = 0u64;
    let mut second = 0u64;
    for_each_full_chain(n, &mut |chain| {
        let x = chain.iter().filter(|&&c| dense.contains(c)).count() as u64;
        chains += 1;
        first += x;
        second += x * x.saturating_sub(1) / 2;
    });
    let chains = BigInt::from(chains);
    Ok((
        BigRational::new(BigInt::from(first), chains.clone()),
        BigRational::new(BigInt::from(second), chains),
    ))
}

/// Average of `|C ∩ F|` over all full chains; equals `lubell(F)`.
pub fn chain_expectation_oracle(family: &SetFamily) -> Result<BigRational> {
    Ok(chain_moments_oracle(family)?.0)
}

/// `Σ 1 / C(n; |A|, |B| - |A|, n - |B|)` over comparable pairs `A ⊊ B` in
/// `F`, which is `E C(X, 2)` for a random full chain.
pub fn chain_second_moment(family: &SetFamily) -> BigRational {
    chain_second_moment_with(binomial::global(), family)
}

pub fn chain_second_moment_with(table: &BinomialTable, family: &SetFamily) -> BigRational {
    let n = family.n();
    // pair_counts[a][b]: comparable pairs with |A| = a, |B| = b
    let mut pair_counts = vec![vec![0u64; n + 1]; n + 1];
    let members = family.bits();
    let dense_ok = n <= DEFAULT_LATTICE_BUDGET;
    let scan_pairs = !dense_ok || (members.len() as f64).powi(2) <= 3f64.powi(n as i32);
    if scan_pairs {
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if a & !b == 0 {
                    pair_counts[a.count_ones() as usize][b.count_ones() as usize] += 1;
                }
            }
        }
    } else {
        let dense = DenseSet::from_bits(n, &members);
        let full = full_mask(n);
        for &a in &members {
            for t in submasks_ascending(full & !a).skip(1) {
                if dense.contains(a | t) {
                    let (la, lb) = (a.count_ones() as usize, (a | t).count_ones() as usize);
                    pair_counts[la][lb] += 1;
                }
            }
        }
    }
    let mut total = BigRational::zero();
    for (a, row) in pair_counts.iter().enumerate() {
        for (b, &count) in row.iter().enumerate() {
            if count > 0 {
                let multinomial = table.entry(n, a) * table.entry(n - a, b - a);
                total += BigRational::new(BigInt::from(count), multinomial);
            }
        }
    }
    total
}

/// Members of `F` whose size lies in `a..=b`.
pub fn band(family: &SetFamily, a: usize, b: usize) -> Result<SetFamily> {
    let n = family.n();
    if a > b || b > n {
        return Err(Error::BadRange { a, b, n });
    }
    SetFamily::new(n, family.iter().filter(|m| (a..=b).contains(&m.len())))
}

/// Checks exactly that `h_n(F(a, b))` is the average over all pairs
/// `A ⊆ B`, `|A| = a`, `|B| = b`, of `h_{b-a}` of the trace of `F` on `[A, B]`.
pub fn interval_average_check(family: &SetFamily, a: usize, b: usize) -> Result<bool> {
    interval_average_check_with(binomial::global(), family, a, b)
}

pub fn interval_average_check_with(
    table: &BinomialTable,
    family: &SetFamily,
    a: usize,
    b: usize,
) -> Result<bool> {
    let n = family.n();
    if a > b || b > n {
        return Err(Error::BadRange { a, b, n });
    }
    if n > INTERVAL_AVERAGE_MAX_N {
        return Err(Error::BudgetExceeded(format!(
            "interval averaging needs n <= {INTERVAL_AVERAGE_MAX_N}, got {n}"
        )));
    }
    let lhs = lubell_with(table, &band(family, a, b)?);

    let dense = DenseSet::from_bits(n, &family.bits());
    let rank = b - a;
    let mut pairs = 0u64;
    let mut sum = BigRational::zero();
    for bottom in k_subsets(n, a) {
        let outside: Vec<u32> = (0..n as u32).filter(|e| bottom >> e & 1 == 0).collect();
        for t in k_subsets(n - a, rank) {
            let top = bottom | spread(t, &outside);
            pairs += 1;
            // trace of F on [bottom, top], counted by level inside the interval
            let mut counts = vec![0u64; rank + 1];
            for x in submasks_ascending(top & !bottom) {
                if dense.contains(bottom | x) {
                    counts[x.count_ones() as usize] += 1;
                }
            }
            sum += lubell_of_counts(table, rank, &counts);
        }
    }
    let rhs = sum / BigRational::from_integer(BigInt::from(pairs));
    Ok(lhs == rhs)
}

/// Places bit `j` of `compact` on element `positions[j]`.
fn spread(compact: u64, positions: &[u32]) -> u64 {
    positions
        .iter()
        .enumerate()
        .filter(|(j, _)| compact >> j & 1 == 1)
        .fold(0u64, |acc, (_, &p)| acc | 1 << p)
}

/// The Lubell value of the whole lattice, `n + 1`.
pub fn full_lattice_lubell(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n as u64 + 1))
}

/// `1 / C(n, |A|)`, the probability that a random full chain passes through `A`.
pub fn chain_hit_probability(n: usize, set: SubsetCode) -> BigRational {
    BigRational::new(BigInt::one(), binomial::global().get(n, set.len()))
}
