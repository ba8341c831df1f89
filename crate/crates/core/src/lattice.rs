//! Subsets of `[n]` as bit codes, set families, and copies of the Boolean
//! algebra `B_d` inside them.
//!
//! Element `i` of the ground set `[n] = {1, ..., n}` is bit `i - 1` of a
//! [`SubsetCode`]. All "first" / "smallest" tie-breaks below refer to the
//! integer order of these codes.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground size a [`SetFamily`] can carry.
pub const MAX_GROUND: usize = 63;

/// Default cap on `n` for detection, extraction and anything else that
/// enumerates the whole lattice `2^[n]`.
pub const DEFAULT_LATTICE_BUDGET: usize = 20;

/// Serialized as its sorted list of elements.
#[derive(Copy, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetCode(pub u64);

impl Serialize for SubsetCode {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(self.elements())
    }
}

impl<'de> Deserialize<'de> for SubsetCode {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<usize>::deserialize(de)?;
        let mut code = 0u64;
        for e in elements {
            if e == 0 || e > MAX_GROUND {
                return Err(serde::de::Error::custom(format!(
                    "element {e} outside 1..={MAX_GROUND}"
                )));
            }
            if code >> (e - 1) & 1 == 1 {
                return Err(serde::de::Error::custom(format!("element {e} repeated")));
            }
            code |= 1 << (e - 1);
        }
        Ok(SubsetCode(code))
    }
}

impl SubsetCode {
    pub const EMPTY: SubsetCode = SubsetCode(0);

    /// Builds a code from 1-based elements.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        SubsetCode(
            elements
                .into_iter()
                .fold(0u64, |acc, e| acc | (1u64 << (e - 1))),
        )
    }

    /// 1-based elements in increasing order.
    pub fn elements(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut bits = self.0;
        while bits != 0 {
            out.push(bits.trailing_zeros() as usize + 1);
            bits &= bits - 1;
        }
        out
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: SubsetCode) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset_of(self, other: SubsetCode) -> bool {
        self != other && self.is_subset_of(other)
    }

    pub fn is_disjoint(self, other: SubsetCode) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: SubsetCode) -> SubsetCode {
        SubsetCode(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetCode) -> SubsetCode {
        SubsetCode(self.0 & other.0)
    }

    pub fn difference(self, other: SubsetCode) -> SubsetCode {
        SubsetCode(self.0 & !other.0)
    }

    /// True iff every element is at most `n`.
    pub fn fits(self, n: usize) -> bool {
        n >= 64 || self.0 >> n == 0
    }
}

impl fmt::Debug for SubsetCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Mask with the low `n` bits set.
pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the submasks of `ground` in increasing integer order, starting
/// with 0.
pub fn submasks_ascending(ground: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        let succ = cur.wrapping_sub(ground) & ground;
        next = if succ == 0 { None } else { Some(succ) };
        Some(cur)
    })
}

/// Iterates the `k`-element subsets of `[n]` in increasing integer order
/// (Gosper's hack).
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    assert!(n <= MAX_GROUND);
    let limit = 1u64 << n;
    let mut next = if k > n {
        None
    } else if k == 0 {
        Some(0u64)
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let succ = (((r ^ cur) >> 2) / c) | r;
            (succ < limit).then_some(succ)
        };
        Some(cur)
    })
}

/// A family `F ⊆ 2^[n]`, stored as a sorted list of distinct codes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: usize,
    members: Vec<SubsetCode>,
}

impl Serialize for SetFamily {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("SetFamily", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("sets", &self.members)?;
        st.end()
    }
}

impl SetFamily {
    /// Collects `members` into a family over `[n]`. Repeated codes collapse.
    pub fn new<I: IntoIterator<Item = SubsetCode>>(n: usize, members: I) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::InvalidFamily(format!(
                "ground size {n} exceeds {MAX_GROUND}"
            )));
        }
        let mut members: Vec<SubsetCode> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|m| !m.fits(n)) {
            return Err(Error::InvalidFamily(format!(
                "set {bad:?} is not a subset of [{n}]"
            )));
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily { n, members })
    }

    pub(crate) fn from_sorted_bits(n: usize, bits: Vec<u64>) -> Self {
        debug_assert!(bits.windows(2).all(|w| w[0] < w[1]));
        SetFamily {
            n,
            members: bits.into_iter().map(SubsetCode).collect(),
        }
    }

    pub fn empty(n: usize) -> Self {
        SetFamily {
            n,
            members: Vec::new(),
        }
    }

    /// All of `2^[n]`.
    pub fn power_set(n: usize) -> Self {
        assert!(n < 32, "power set of [{n}] is too large to materialize");
        SetFamily::from_sorted_bits(n, (0..1u64 << n).collect())
    }

    /// Family whose members are the set bits of `mask`, i.e. member `c` is
    /// present iff bit `c` of `mask` is set. Requires `2^n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 6);
        let bits = (0..1u64 << n).filter(|c| mask >> c & 1 == 1).collect();
        SetFamily::from_sorted_bits(n, bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[SubsetCode] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, set: SubsetCode) -> bool {
        self.members.binary_search(&set).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = SubsetCode> + '_ {
        self.members.iter().copied()
    }

    /// Number of members of each size `0..=n`.
    pub fn level_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n + 1];
        for m in &self.members {
            counts[m.len()] += 1;
        }
        counts
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.n == other.n && self.members.iter().all(|&m| other.contains(m))
    }

    pub(crate) fn bits(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.0).collect()
    }

    pub(crate) fn check_budget(&self, budget: usize) -> Result<()> {
        if self.n > budget {
            Err(Error::BudgetExceeded(format!(
                "ground size {} exceeds the lattice budget {budget}",
                self.n
            )))
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.n)?;
        f.debug_set().entries(self.members.iter()).finish()
    }
}

/// Generator `(X0; X1, ..., Xd)` of a copy of `B_d`. A witness with no atoms
/// stands for a single set (`d = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraWitness {
    pub x0: SubsetCode,
    pub atoms: Vec<SubsetCode>,
}

impl AlgebraWitness {
    pub fn new(x0: SubsetCode, atoms: Vec<SubsetCode>) -> Self {
        AlgebraWitness { x0, atoms }
    }

    pub fn dimension(&self) -> usize {
        self.atoms.len()
    }

    /// Checks pairwise disjointness and non-empty atoms.
    pub fn validate(&self) -> Result<()> {
        let mut seen = self.x0;
        for (i, &a) in self.atoms.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidWitness(format!("atom X{} is empty", i + 1)));
            }
            if !a.is_disjoint(seen) {
                return Err(Error::InvalidWitness(format!(
                    "atom X{} = {a:?} overlaps X0 or an earlier atom",
                    i + 1
                )));
            }
            seen = seen.union(a);
        }
        Ok(())
    }

    /// Union of the generator sets.
    pub fn support(&self) -> SubsetCode {
        self.atoms.iter().fold(self.x0, |acc, &a| acc.union(a))
    }

    /// The `2^d` generated sets, indexed by `I ⊆ [d]` as a bitmask.
    pub fn generated(&self) -> Result<Vec<SubsetCode>> {
        self.validate()?;
        let d = self.atoms.len();
        if d >= 32 {
            return Err(Error::InvalidWitness(format!("dimension {d} is too large")));
        }
        Ok((0..1usize << d)
            .map(|idx| {
                self.atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| idx >> i & 1 == 1)
                    .fold(self.x0, |acc, (_, &a)| acc.union(a))
            })
            .collect())
    }
}

/// The family `{X0 ∪ ⋃_{i∈I} Xi : I ⊆ [d]}` over `[n]`.
pub fn witness_generate(w: &AlgebraWitness, n: usize) -> Result<SetFamily> {
    let sets = w.generated()?;
    if !w.support().fits(n) {
        return Err(Error::InvalidWitness(format!(
            "witness uses elements outside [{n}]"
        )));
    }
    SetFamily::new(n, sets)
}

/// True iff every set generated by `w` is a member of `family`.
pub fn witness_in_family(w: &AlgebraWitness, family: &SetFamily) -> Result<bool> {
    let sets = w.generated()?;
    Ok(sets.into_iter().all(|s| family.contains(s)))
}

/// Order-preserving relabeling between a compressed ground set and the
/// original `[n]`.
///
/// `kept[j]` is the original 0-based bit that new bit `j` stands for; a
/// lifted code also receives `base` (the bottom of an interval, empty for
/// `F_S`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    kept: Vec<u8>,
    base: SubsetCode,
}

impl Relabeling {
    fn compressing(ground: u64, base: SubsetCode) -> Self {
        let kept = (0..64u8).filter(|&b| ground >> b & 1 == 1).collect();
        Relabeling { kept, base }
    }

    /// Size of the compressed ground set.
    pub fn ground_size(&self) -> usize {
        self.kept.len()
    }

    pub fn base(&self) -> SubsetCode {
        self.base
    }

    /// Original 1-based elements retained, in increasing order.
    pub fn kept_elements(&self) -> Vec<usize> {
        self.kept.iter().map(|&b| b as usize + 1).collect()
    }

    /// Maps a code of the compressed ground set back into `[n]`.
    pub fn lift(&self, code: SubsetCode) -> SubsetCode {
        let mut out = self.base.0;
        for (j, &b) in self.kept.iter().enumerate() {
            if code.0 >> j & 1 == 1 {
                out |= 1u64 << b;
            }
        }
        SubsetCode(out)
    }

    /// Compresses an original code; bits outside the kept ground are dropped.
    pub fn project(&self, code: SubsetCode) -> SubsetCode {
        let mut out = 0u64;
        for (j, &b) in self.kept.iter().enumerate() {
            if code.0 >> b & 1 == 1 {
                out |= 1u64 << j;
            }
        }
        SubsetCode(out)
    }

    /// Lifts every generator of a witness found in the compressed family.
    /// Only `x0` receives the base.
    pub fn lift_witness(&self, w: &AlgebraWitness) -> AlgebraWitness {
        let bare = Relabeling {
            kept: self.kept.clone(),
            base: SubsetCode::EMPTY,
        };
        AlgebraWitness {
            x0: self.lift(w.x0),
            atoms: w.atoms.iter().map(|&a| bare.lift(a)).collect(),
        }
    }
}

/// A family over a compressed ground set together with the map back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeled {
    pub family: SetFamily,
    pub map: Relabeling,
}

/// `F_S = {A ∈ F : A ∩ S = ∅, A ∪ S ∈ F}`, relabeled onto `[n - |S|]` by
/// compressing `[n] \ S` in increasing order.
pub fn subfamily_fs(family: &SetFamily, s: SubsetCode) -> Result<Relabeled> {
    if s.is_empty() {
        return Err(Error::EmptyS);
    }
    if !s.fits(family.n) {
        return Err(Error::InvalidInput(format!(
            "S = {s:?} is not a subset of [{}]",
            family.n
        )));
    }
    let map = Relabeling::compressing(full_mask(family.n) & !s.0, SubsetCode::EMPTY);
    let members = family
        .iter()
        .filter(|&a| a.is_disjoint(s) && family.contains(a.union(s)))
        .map(|a| map.project(a));
    Ok(Relabeled {
        family: SetFamily::new(map.ground_size(), members)?,
        map,
    })
}

/// An interval `[A, B] = {X : A ⊆ X ⊆ B}` of the lattice.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    bottom: SubsetCode,
    top: SubsetCode,
}

impl Interval {
    pub fn new(bottom: SubsetCode, top: SubsetCode) -> Result<Self> {
        if !bottom.is_subset_of(top) {
            return Err(Error::InvalidInput(format!(
                "interval bottom {bottom:?} is not contained in top {top:?}"
            )));
        }
        Ok(Interval { bottom, top })
    }

    pub fn bottom(&self) -> SubsetCode {
        self.bottom
    }

    pub fn top(&self) -> SubsetCode {
        self.top
    }

    /// `|B| - |A|`, the dimension of the interval as a Boolean algebra.
    pub fn rank(&self) -> usize {
        self.top.len() - self.bottom.len()
    }

    pub fn contains(&self, x: SubsetCode) -> bool {
        self.bottom.is_subset_of(x) && x.is_subset_of(self.top)
    }
}

/// `{X \ A : X ∈ F, A ⊆ X ⊆ B}` over the compressed ground `B \ A`.
pub fn interval_trace(family: &SetFamily, iv: &Interval) -> Result<Relabeled> {
    if !iv.top.fits(family.n) {
        return Err(Error::InvalidInput(format!(
            "interval top {:?} is not a subset of [{}]",
            iv.top, family.n
        )));
    }
    let map = Relabeling::compressing(iv.top.difference(iv.bottom).0, iv.bottom);
    let members = family
        .iter()
        .filter(|&x| iv.contains(x))
        .map(|x| map.project(x.difference(iv.bottom)));
    Ok(Relabeled {
        family: SetFamily::new(map.ground_size(), members)?,
        map,
    })
}

/// All subsets of `[n]` whose size lies in `levels`.
pub fn level_family(levels: &BTreeSet<usize>, n: usize) -> Result<SetFamily> {
    if let Some(&bad) = levels.iter().find(|&&l| l > n) {
        return Err(Error::LevelOutOfRange { level: bad, n });
    }
    if n > DEFAULT_LATTICE_BUDGET + 4 {
        return Err(Error::BudgetExceeded(format!(
            "level family over [{n}] is too large to materialize"
        )));
    }
    let mut bits: Vec<u64> = levels.iter().flat_map(|&k| k_subsets(n, k)).collect();
    bits.sort_unstable();
    Ok(SetFamily::from_sorted_bits(n, bits))
}

/// Looks for a copy of `B_d` in `family`.
///
/// `F` contains `B_d` iff some non-empty `S` has `F_S` containing `B_{d-1}`;
/// the search takes the first such `S` in increasing code order at every
/// depth, so the witness is deterministic. For `d = 0` the result is the
/// smallest member, wrapped as a witness with no atoms. Atoms are listed
/// outermost first: `atoms[0]` is the `S` chosen at the top level.
pub fn contains_bd(family: &SetFamily, d: usize) -> Result<Option<AlgebraWitness>> {
    contains_bd_with_budget(family, d, DEFAULT_LATTICE_BUDGET)
}

pub fn contains_bd_with_budget(
    family: &SetFamily,
    d: usize,
    budget: usize,
) -> Result<Option<AlgebraWitness>> {
    family.check_budget(budget)?;
    if d >= 32 {
        return Ok(None);
    }
    let bits = family.bits();
    let dense = DenseSet::from_bits(family.n, &bits);
    let found = find_bd(&bits, &|x| dense.contains(x), full_mask(family.n), d);
    Ok(found.map(|(x0, atoms)| AlgebraWitness {
        x0: SubsetCode(x0),
        atoms: atoms.into_iter().map(SubsetCode).collect(),
    }))
}

/// Recursive detector over sorted `list ⊆ 2^ground`, working in original
/// coordinates. Relabeling preserves the order of subsets of `ground`, so the
/// result is the one the relabeled recursion would lift to.
pub(crate) fn find_bd(
    list: &[u64],
    contains: &dyn Fn(u64) -> bool,
    ground: u64,
    d: usize,
) -> Option<(u64, Vec<u64>)> {
    if d == 0 {
        return list.first().map(|&x| (x, Vec::new()));
    }
    if list.len() < 1usize << d {
        return None;
    }
    for s in submasks_ascending(ground).skip(1) {
        if d == 1 {
            if let Some(&a) = list.iter().find(|&&a| a & s == 0 && contains(a | s)) {
                return Some((a, vec![s]));
            }
            continue;
        }
        let sub: Vec<u64> = list
            .iter()
            .copied()
            .filter(|&a| a & s == 0 && contains(a | s))
            .collect();
        if sub.len() < 1usize << (d - 1) {
            continue;
        }
        let inner = |x: u64| sub.binary_search(&x).is_ok();
        if let Some((x0, mut atoms)) = find_bd(&sub, &inner, ground & !s, d - 1) {
            atoms.insert(0, s);
            return Some((x0, atoms));
        }
    }
    None
}

/// Dense membership table over `2^[n]`.
#[derive(Clone, Debug)]
pub(crate) struct DenseSet {
    words: Vec<u64>,
}

impl DenseSet {
    pub(crate) fn new(n: usize) -> Self {
        let len = (1usize << n).div_ceil(64);
        DenseSet {
            words: vec![0; len],
        }
    }

    pub(crate) fn from_bits(n: usize, bits: &[u64]) -> Self {
        let mut set = DenseSet::new(n);
        for &b in bits {
            set.insert(b);
        }
        set
    }

    pub(crate) fn insert(&mut self, x: u64) {
        self.words[(x >> 6) as usize] |= 1 << (x & 63);
    }

    pub(crate) fn remove(&mut self, x: u64) {
        self.words[(x >> 6) as usize] &= !(1 << (x & 63));
    }

    pub(crate) fn contains(&self, x: u64) -> bool {
        self.words
            .get((x >> 6) as usize)
            .is_some_and(|w| w >> (x & 63) & 1 == 1)
    }
}
