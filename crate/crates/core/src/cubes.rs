//! Affine cubes `{x0 + Σ_{i∈I} xi : I ⊆ [d]}` in sets of non-negative
//! integers, their link to level families, and exact `b'(n, d)` search.
//!
//! Steps `xi` may repeat, so a 3-term arithmetic progression is a 2-cube.
//! [`CubeMode::StrictDistinct`] forbids repeats for comparison.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{contains_bd, level_family};
use crate::real::{decide, Enclosure, Verdict, DEFAULT_PRECISION};

/// Largest `n` for the lattice side of [`correspondence_check`].
pub const CORRESPONDENCE_MAX_N: usize = 12;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeMode {
    /// Steps may repeat.
    #[default]
    Literal,
    /// Steps must be pairwise distinct.
    StrictDistinct,
}

/// A finite subset of `{0, ..., n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntSet {
    n: u64,
    elements: Vec<u64>,
}

impl IntSet {
    pub fn new<I: IntoIterator<Item = u64>>(n: u64, elements: I) -> Result<Self> {
        let elements: BTreeSet<u64> = elements.into_iter().collect();
        if let Some(&bad) = elements.iter().find(|&&e| e > n) {
            return Err(Error::InvalidInput(format!(
                "element {bad} exceeds n = {n}"
            )));
        }
        Ok(IntSet {
            n,
            elements: elements.into_iter().collect(),
        })
    }

    /// Members are the set bits of `mask`.
    pub fn from_mask(n: u64, mask: u64) -> Self {
        IntSet {
            n,
            elements: (0..=n.min(63)).filter(|&e| mask >> e & 1 == 1).collect(),
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_superset_of(&self, other: &IntSet) -> bool {
        other.elements.iter().all(|&x| self.contains(x))
    }

    /// `{a + c : a ∈ H}` over `{0, ..., n + c}`.
    pub fn shifted(&self, c: u64) -> IntSet {
        IntSet {
            n: self.n + c,
            elements: self.elements.iter().map(|&a| a + c).collect(),
        }
    }

    pub fn levels(&self) -> BTreeSet<usize> {
        self.elements.iter().map(|&e| e as usize).collect()
    }
}

/// `(x0; x1, ..., xd)` with `x0 >= 0` and every step `>= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CubeWitness {
    pub x0: u64,
    pub steps: Vec<u64>,
}

impl CubeWitness {
    pub fn new(x0: u64, steps: Vec<u64>) -> Result<Self> {
        if steps.contains(&0) {
            return Err(Error::InvalidInput("cube steps must be at least 1".into()));
        }
        Ok(CubeWitness { x0, steps })
    }

    pub fn dimension(&self) -> usize {
        self.steps.len()
    }

    pub fn has_distinct_steps(&self) -> bool {
        let set: BTreeSet<u64> = self.steps.iter().copied().collect();
        set.len() == self.steps.len()
    }
}

/// All subset sums `x0 + Σ_{i∈I} xi`; fewer than `2^d` values when sums collide.
pub fn cube_generate(w: &CubeWitness) -> IntSet {
    let mut sums = BTreeSet::from([w.x0]);
    for &step in &w.steps {
        let shifted: Vec<u64> = sums.iter().map(|&s| s + step).collect();
        sums.extend(shifted);
    }
    let n = sums.last().copied().unwrap_or(0);
    IntSet {
        n,
        elements: sums.into_iter().collect(),
    }
}

/// Looks for an affine `d`-cube in `h` with repeated steps allowed.
pub fn contains_affine_cube(h: &IntSet, d: usize) -> Option<CubeWitness> {
    contains_affine_cube_mode(h, d, CubeMode::Literal)
}

/// `H` contains a `d`-cube iff for some step `s >= 1` the set
/// `{a ∈ H : a + s ∈ H}` contains a `(d-1)`-cube. Smallest `s` first; the
/// step found at the top level is the last entry of `steps`.
pub fn contains_affine_cube_mode(h: &IntSet, d: usize, mode: CubeMode) -> Option<CubeWitness> {
    let mut used = Vec::new();
    find_cube(&h.elements, d, mode, &mut used).map(|(x0, steps)| CubeWitness { x0, steps })
}

fn find_cube(
    list: &[u64],
    d: usize,
    mode: CubeMode,
    used: &mut Vec<u64>,
) -> Option<(u64, Vec<u64>)> {
    if d == 0 {
        return list.first().map(|&x| (x, Vec::new()));
    }
    // a d-cube has at least d + 1 distinct elements
    if list.len() < d + 1 {
        return None;
    }
    let span = list[list.len() - 1] - list[0];
    for s in 1..=span {
        if mode == CubeMode::StrictDistinct && used.contains(&s) {
            continue;
        }
        let sub: Vec<u64> = list
            .iter()
            .copied()
            .filter(|&a| list.binary_search(&(a + s)).is_ok())
            .collect();
        if sub.len() < d {
            continue;
        }
        used.push(s);
        let found = find_cube(&sub, d - 1, mode, used);
        used.pop();
        if let Some((x0, mut steps)) = found {
            steps.push(s);
            return Some((x0, steps));
        }
    }
    None
}

/// Cube-free test on `Fints` against `B_d`-freeness of the level family
/// `{A ⊆ [n] : |A| ∈ Fints}`; true iff both detectors agree.
pub fn correspondence_check(fints: &IntSet, n: usize, d: usize) -> Result<bool> {
    if n > CORRESPONDENCE_MAX_N {
        return Err(Error::BudgetExceeded(format!(
            "lattice side needs n <= {CORRESPONDENCE_MAX_N}, got {n}"
        )));
    }
    if fints.elements().last().is_some_and(|&m| m > n as u64) {
        return Err(Error::InvalidInput(format!(
            "integer set reaches beyond n = {n}"
        )));
    }
    let cube = contains_affine_cube(fints, d).is_some();
    let family = level_family(&fints.levels(), n)?;
    let algebra = contains_bd(&family, d)?.is_some();
    Ok(cube == algebra)
}

/// Outcome of [`bprime_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BPrimeResult {
    pub n: u64,
    pub d: usize,
    pub size: usize,
    /// Lexicographically smallest cube-free set of maximum size found.
    pub witness: IntSet,
    /// False when the node budget ran out; `size` is then a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

/// Branch and bound for the largest cube-free subset of `{0, ..., n}`.
///
/// Integers are decided in increasing order, "take" before "skip", and a
/// branch is cut once `|current| + remaining <= best`.
pub fn bprime_search(n: u64, d: usize, budget: u64) -> Result<BPrimeResult> {
    bprime_search_mode(n, d, budget, CubeMode::Literal)
}

pub fn bprime_search_mode(n: u64, d: usize, budget: u64, mode: CubeMode) -> Result<BPrimeResult> {
    if d == 0 {
        return Err(Error::PreconditionViolated("d must be at least 1".into()));
    }
    struct State {
        n: u64,
        d: usize,
        mode: CubeMode,
        budget: u64,
        nodes: u64,
        exhausted: bool,
        current: Vec<u64>,
        best: Vec<u64>,
    }
    fn go(st: &mut State, pos: u64) {
        if st.exhausted {
            return;
        }
        st.nodes += 1;
        if st.nodes > st.budget {
            st.exhausted = true;
            return;
        }
        if pos > st.n {
            if st.current.len() > st.best.len() {
                st.best = st.current.clone();
            }
            return;
        }
        let remaining = (st.n - pos + 1) as usize;
        if st.current.len() + remaining <= st.best.len() {
            return;
        }
        st.current.push(pos);
        if find_cube(&st.current, st.d, st.mode, &mut Vec::new()).is_none() {
            go(st, pos + 1);
        }
        st.current.pop();
        go(st, pos + 1);
    }
    let mut st = State {
        n,
        d,
        mode,
        budget,
        nodes: 0,
        exhausted: false,
        current: Vec::new(),
        best: Vec::new(),
    };
    go(&mut st, 0);
    Ok(BPrimeResult {
        n,
        d,
        size: st.best.len(),
        witness: IntSet {
            n,
            elements: st.best,
        },
        exact: !st.exhausted,
        nodes: st.nodes,
    })
}

/// Checks of a computed `b'(n, d)` against the closed-form ceiling and,
/// when known, the largest Lubell value of a `B_d`-free family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BPrimeBoundReport {
    /// `value <= 2 (n+1)^(1 - 2^(1-d))`.
    pub closed_form: Verdict,
    /// `value <= max h_n(F)` over `B_d`-free `F`, when that maximum is supplied.
    pub lubell: Option<bool>,
}

pub fn bprime_bound_check(
    n: u64,
    d: usize,
    value: u64,
    max_free_lubell: Option<&BigRational>,
) -> Result<BPrimeBoundReport> {
    if d == 0 {
        return Err(Error::PreconditionViolated("d must be at least 1".into()));
    }
    let v = BigRational::from_integer(BigInt::from(value));
    let closed_form = decide(DEFAULT_PRECISION, |bits| {
        let bound = Enclosure::exact(BigRational::from_integer(BigInt::from(n + 1)))
            .pow_one_minus_pow2(d as u32 - 1, bits)
            .scale(&BigRational::from_integer(BigInt::from(2)), bits);
        Enclosure::exact(v.clone()).le(&bound)
    });
    Ok(BPrimeBoundReport {
        closed_form,
        lubell: max_free_lubell.map(|m| &v <= m),
    })
}
