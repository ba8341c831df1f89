//! Pascal-triangle table of exact binomial coefficients.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::lattice::MAX_GROUND;

#[derive(Clone, Debug)]
pub struct BinomialTable {
    rows: Vec<Vec<BigInt>>,
}

impl BinomialTable {
    /// Rows `0..=max_n`.
    pub fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &rows[n - 1][k - 1] + &rows[n - 1][k];
            }
            rows.push(row);
        }
        BinomialTable { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(n, k)`; zero when `k > n`.
    ///
    /// # Panics
    /// If `n` exceeds the table.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        if k > n {
            BigInt::zero()
        } else {
            self.rows[n][k].clone()
        }
    }

    pub(crate) fn entry(&self, n: usize, k: usize) -> &BigInt {
        &self.rows[n][k]
    }

    /// Replaces one entry. Only useful for fault-injection tests.
    pub fn overwrite(&mut self, n: usize, k: usize, value: BigInt) {
        self.rows[n][k] = value;
    }
}

/// Shared table covering every ground size a `SetFamily` can have. Built
/// once, read-only afterwards.
pub fn global() -> &'static BinomialTable {
    static TABLE: OnceLock<BinomialTable> = OnceLock::new();
    TABLE.get_or_init(|| BinomialTable::new(MAX_GROUND))
}

/// `C(n, k)` for arbitrary `n`, by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
