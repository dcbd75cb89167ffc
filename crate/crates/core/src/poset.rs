//! Finite posets and the index shapes used throughout: power sets,
//! punctured cubes, punctured products, multidegree lattices, ideal covers
//! and order complexes.
//!
//! The order relation is stored as its full closure (bit rows), so `leq` is
//! O(1); diagram assembly spends most of its time on such queries. Element
//! ids are canonical strings, which makes posets compare structurally and
//! keeps the JSON interchange reproducible.

use std::collections::{BTreeMap, BTreeSet};

use crate::chain::ChainComplex;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::Int;

const MAX_POWER_SET: usize = 20;

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    elements: Vec<String>,
    index: BTreeMap<String, usize>,
    /// `up[i]` has bit `j` set iff `i <= j`.
    up: Vec<Vec<u64>>,
}

impl std::fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FinitePoset({} elements)", self.elements.len())
    }
}

impl FinitePoset {
    /// Builds from the full order relation; reflexive pairs may be omitted.
    /// Fails if the relation is not a partial order or ids repeat.
    pub fn new(elements: Vec<String>, relation: &[(String, String)]) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, id) in elements.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateElement(id.clone()));
            }
        }
        let n = elements.len();
        let mut up = vec![vec![0u64; words(n)]; n];
        for i in 0..n {
            up[i][i / 64] |= 1 << (i % 64);
        }
        for (a, b) in relation {
            let &i = index
                .get(a)
                .ok_or_else(|| Error::UnknownElement(a.clone()))?;
            let &j = index
                .get(b)
                .ok_or_else(|| Error::UnknownElement(b.clone()))?;
            up[i][j / 64] |= 1 << (j % 64);
        }
        let poset = FinitePoset {
            elements,
            index,
            up,
        };
        poset.validate()?;
        Ok(poset)
    }

    /// Builds from index pairs `(i, j)` meaning `i <= j`, taking the
    /// transitive closure first. Fails only on antisymmetry violations.
    pub fn closure_of(elements: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, id) in elements.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateElement(id.clone()));
            }
        }
        let n = elements.len();
        let mut up = vec![vec![0u64; words(n)]; n];
        for i in 0..n {
            up[i][i / 64] |= 1 << (i % 64);
        }
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::RelationOutOfRange(i, j));
            }
            up[i][j / 64] |= 1 << (j % 64);
        }
        // Warshall closure on bit rows
        for k in 0..n {
            for i in 0..n {
                if (up[i][k / 64] >> (k % 64)) & 1 == 1 {
                    let (row_k, row_i) = if i < k {
                        let (a, b) = up.split_at_mut(k);
                        (&b[0], &mut a[i])
                    } else if i > k {
                        let (a, b) = up.split_at_mut(i);
                        (&a[k], &mut b[0])
                    } else {
                        continue;
                    };
                    for w in 0..row_i.len() {
                        row_i[w] |= row_k[w];
                    }
                }
            }
        }
        let poset = FinitePoset {
            elements,
            index,
            up,
        };
        poset.validate()?;
        Ok(poset)
    }

    /// Builds from a comparison predicate on element ids.
    pub fn from_leq(elements: Vec<String>, leq: impl Fn(&str, &str) -> bool) -> Result<Self> {
        let n = elements.len();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && leq(&elements[i], &elements[j]) {
                    pairs.push((elements[i].clone(), elements[j].clone()));
                }
            }
        }
        Self::new(elements, &pairs)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if !self.leq(i, i) {
                return Err(Error::NotReflexive(self.elements[i].clone()));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.leq(i, j) && self.leq(j, i) {
                    return Err(Error::NotAntisymmetric(
                        self.elements[i].clone(),
                        self.elements[j].clone(),
                    ));
                }
            }
        }
        // i <= j forces up[j] subset of up[i]
        for i in 0..n {
            for j in self.up_set(i) {
                if j == i {
                    continue;
                }
                for w in 0..self.up[i].len() {
                    if self.up[j][w] & !self.up[i][w] != 0 {
                        let k = (0..n)
                            .find(|&k| self.leq(j, k) && !self.leq(i, k))
                            .expect("witness exists");
                        return Err(Error::NotTransitive(
                            self.elements[i].clone(),
                            self.elements[j].clone(),
                            self.elements[k].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn id(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownElement(id.to_string()))
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        (self.up[i][j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    pub fn up_set(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| self.leq(i, j))
    }

    pub fn down_set(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| self.leq(j, i))
    }

    /// The full relation as sorted id pairs (reflexive pairs included).
    pub fn relation_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in self.up_set(i) {
                out.push((self.elements[i].clone(), self.elements[j].clone()));
            }
        }
        out.sort();
        out
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq(j, i)))
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq(i, j)))
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| !self.lt(i, j)))
            .collect()
    }

    pub fn opposite(&self) -> FinitePoset {
        let n = self.len();
        let mut up = vec![vec![0u64; words(n)]; n];
        for (i, row) in up.iter_mut().enumerate() {
            for j in 0..n {
                if self.leq(j, i) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
        }
        FinitePoset {
            elements: self.elements.clone(),
            index: self.index.clone(),
            up,
        }
    }

    /// Induced subposet on the given (sorted, distinct) element indices.
    pub fn induced(&self, indices: &[usize]) -> FinitePoset {
        let elements: Vec<String> = indices.iter().map(|&i| self.elements[i].clone()).collect();
        let index: BTreeMap<String, usize> = elements
            .iter()
            .enumerate()
            .map(|(k, id)| (id.clone(), k))
            .collect();
        let n = indices.len();
        let mut up = vec![vec![0u64; words(n)]; n];
        for a in 0..n {
            for b in 0..n {
                if self.leq(indices[a], indices[b]) {
                    up[a][b / 64] |= 1 << (b % 64);
                }
            }
        }
        FinitePoset {
            elements,
            index,
            up,
        }
    }

    /// True iff `set` (element indices) is downward closed.
    pub fn is_ideal_indices(&self, set: &BTreeSet<usize>) -> bool {
        set.iter()
            .all(|&b| self.down_set(b).all(|a| set.contains(&a)))
    }

    /// True iff the given element ids form an ideal; unknown ids are
    /// rejected.
    pub fn is_ideal(&self, ids: &[String]) -> Result<bool> {
        let set: BTreeSet<usize> = ids
            .iter()
            .map(|id| self.index_of(id))
            .collect::<Result<_>>()?;
        Ok(self.is_ideal_indices(&set))
    }

    /// All nonempty strict chains, each ascending, in lexicographic order
    /// on element indices.
    pub fn strict_chains(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut chains = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..n).rev().map(|i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().expect("nonempty");
            chains.push(chain.clone());
            for j in (0..n).rev() {
                if j != last && self.lt(last, j) {
                    let mut next = chain.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
        }
        chains
    }

    /// Length of the longest strict chain minus one (poset height).
    pub fn height(&self) -> usize {
        self.strict_chains()
            .iter()
            .map(|c| c.len() - 1)
            .max()
            .unwrap_or(0)
    }

    pub fn product(&self, other: &FinitePoset) -> ProductPoset {
        ProductPoset::new(self.clone(), other.clone())
    }
}

/// Canonical label order: shorter strings first, then lexicographic. For
/// decimal labels without leading zeros this is numeric order.
fn canonical_sort(labels: &mut [String]) {
    labels.sort_by(|a, b| (a.len(), a.as_str()).cmp(&(b.len(), b.as_str())));
}

/// Poset of the given subset masks under *reverse* inclusion (used for the
/// contravariant presentation of punctured cubes).
pub(crate) fn reverse_inclusion_poset(labels: &[String], masks: &[u64]) -> FinitePoset {
    let elements: Vec<String> = masks.iter().map(|&m| subset_id(labels, m)).collect();
    let index: BTreeMap<String, usize> = elements
        .iter()
        .enumerate()
        .map(|(k, id)| (id.clone(), k))
        .collect();
    let count = masks.len();
    let mut up = vec![vec![0u64; words(count)]; count];
    for (a, row) in up.iter_mut().enumerate() {
        for (b, &mb) in masks.iter().enumerate() {
            if mb & !masks[a] == 0 {
                row[b / 64] |= 1 << (b % 64);
            }
        }
    }
    FinitePoset {
        elements,
        index,
        up,
    }
}

pub(crate) fn subset_id(labels: &[String], mask: u64) -> String {
    let mut picked = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        if (mask >> i) & 1 == 1 {
            picked.push(l.clone());
        }
    }
    format!("{{{}}}", picked.join(","))
}

fn validated_labels(labels: &[&str]) -> Result<Vec<String>> {
    let mut out: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    canonical_sort(&mut out);
    for w in out.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateElement(w[0].clone()));
        }
    }
    Ok(out)
}

fn subset_poset(labels: Vec<String>, include_empty: bool) -> FinitePoset {
    let n = labels.len();
    let masks: Vec<u64> = (0..(1u64 << n))
        .filter(|&m| include_empty || m != 0)
        .collect();
    let elements: Vec<String> = masks.iter().map(|&m| subset_id(&labels, m)).collect();
    let index: BTreeMap<String, usize> = elements
        .iter()
        .enumerate()
        .map(|(k, id)| (id.clone(), k))
        .collect();
    let count = masks.len();
    let mut up = vec![vec![0u64; words(count)]; count];
    for (a, &ma) in masks.iter().enumerate() {
        for (b, &mb) in masks.iter().enumerate() {
            if ma & !mb == 0 {
                up[a][b / 64] |= 1 << (b % 64);
            }
        }
    }
    FinitePoset {
        elements,
        index,
        up,
    }
}

/// Poset of all subsets of `labels`, ordered by inclusion. The order is
/// stored as its full closure, so sizes much past a dozen labels are
/// memory-bound.
pub fn power_set(labels: &[&str]) -> Result<FinitePoset> {
    if labels.len() > MAX_POWER_SET {
        return Err(Error::SizeOverflow(labels.len(), MAX_POWER_SET));
    }
    Ok(subset_poset(validated_labels(labels)?, true))
}

/// Poset of nonempty subsets of `labels`.
pub fn punctured_cube(labels: &[&str]) -> Result<FinitePoset> {
    if labels.is_empty() {
        return Err(Error::EmptyCubeIndex);
    }
    if labels.len() > MAX_POWER_SET {
        return Err(Error::SizeOverflow(labels.len(), MAX_POWER_SET));
    }
    Ok(subset_poset(validated_labels(labels)?, false))
}

/// Componentwise multi-index, entries at least -1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyMultiIndex);
        }
        if let Some(&bad) = entries.iter().find(|&&e| e < -1) {
            return Err(Error::MultiIndexEntry(bad));
        }
        Ok(MultiIndex(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn entry(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    pub fn require_nonnegative(&self) -> Result<()> {
        match self.0.iter().find(|&&e| e < 0) {
            Some(&bad) => Err(Error::NegativeEntry(bad)),
            None => Ok(()),
        }
    }

    /// Componentwise order.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Strictly below: componentwise at most, and unequal.
    pub fn lt(&self, other: &MultiIndex) -> bool {
        self.leq(other) && self != other
    }

    /// Componentwise minimum (the lattice meet).
    pub fn meet(&self, other: &MultiIndex) -> Result<MultiIndex> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        MultiIndex::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        )
    }

    /// Sum of absolute entry values.
    pub fn total(&self) -> i64 {
        self.0.iter().map(|e| e.abs()).sum()
    }

    /// Decrements the coordinates in `r` (0-based), identity elsewhere.
    /// Entries must be nonnegative so the result stays at least -1.
    pub fn decrement_on(&self, r: &BTreeSet<usize>) -> Result<MultiIndex> {
        self.require_nonnegative()?;
        if let Some(&bad) = r.iter().find(|&&i| i >= self.len()) {
            return Err(Error::Input(format!(
                "coordinate {bad} out of range for m = {}",
                self.len()
            )));
        }
        MultiIndex::new(
            self.0
                .iter()
                .enumerate()
                .map(|(i, &e)| if r.contains(&i) { e - 1 } else { e })
                .collect(),
        )
    }

    pub fn id(&self) -> String {
        format!(
            "({})",
            self.0
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Product of two posets, with the pair bookkeeping needed to restrict to
/// slices and to compare holim pipelines.
#[derive(Clone, Debug)]
pub struct ProductPoset {
    pub left: FinitePoset,
    pub right: FinitePoset,
    pub poset: FinitePoset,
}

impl ProductPoset {
    pub fn new(left: FinitePoset, right: FinitePoset) -> Self {
        let nl = left.len();
        let nr = right.len();
        let mut elements = Vec::with_capacity(nl * nr);
        for li in 0..nl {
            for ri in 0..nr {
                elements.push(format!("({},{})", left.id(li), right.id(ri)));
            }
        }
        let index: BTreeMap<String, usize> = elements
            .iter()
            .enumerate()
            .map(|(k, id)| (id.clone(), k))
            .collect();
        assert_eq!(index.len(), elements.len(), "product ids must be distinct");
        let count = nl * nr;
        let mut up = vec![vec![0u64; words(count)]; count];
        for (a, row) in up.iter_mut().enumerate() {
            let (la, ra) = (a / nr, a % nr);
            for b in 0..count {
                let (lb, rb) = (b / nr, b % nr);
                if left.leq(la, lb) && right.leq(ra, rb) {
                    row[b / 64] |= 1 << (b % 64);
                }
            }
        }
        let poset = FinitePoset {
            elements,
            index,
            up,
        };
        ProductPoset { left, right, poset }
    }

    pub fn pair_index(&self, li: usize, ri: usize) -> usize {
        li * self.right.len() + ri
    }

    pub fn pair_of(&self, idx: usize) -> (usize, usize) {
        (idx / self.right.len(), idx % self.right.len())
    }
}

/// The punctured product: tuples of nonempty subsets of `[j_i] = {0..j_i}`.
#[derive(Clone, Debug)]
pub struct PuncturedProduct {
    pub jvec: MultiIndex,
    pub poset: FinitePoset,
    tuples: Vec<Vec<u64>>,
    index: BTreeMap<Vec<u64>, usize>,
}

impl PuncturedProduct {
    pub fn new(jvec: &MultiIndex) -> Result<Self> {
        jvec.require_nonnegative()?;
        let sizes: Vec<u64> = jvec
            .entries()
            .iter()
            .map(|&j| (1u64 << (j + 1)) - 1)
            .collect();
        let mut tuples: Vec<Vec<u64>> = vec![Vec::new()];
        for &count in &sizes {
            let mut next = Vec::with_capacity(tuples.len() * count as usize);
            for t in &tuples {
                for mask in 1..=count {
                    let mut t2 = t.clone();
                    t2.push(mask);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        let labels: Vec<Vec<String>> = jvec
            .entries()
            .iter()
            .map(|&j| (0..=j).map(|v| v.to_string()).collect())
            .collect();
        let elements: Vec<String> = tuples
            .iter()
            .map(|t| {
                let parts: Vec<String> = t
                    .iter()
                    .enumerate()
                    .map(|(i, &mask)| subset_id(&labels[i], mask))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let index_map: BTreeMap<String, usize> = elements
            .iter()
            .enumerate()
            .map(|(k, id)| (id.clone(), k))
            .collect();
        let count = tuples.len();
        let mut up = vec![vec![0u64; words(count)]; count];
        for (a, ta) in tuples.iter().enumerate() {
            for (b, tb) in tuples.iter().enumerate() {
                if ta.iter().zip(tb).all(|(&x, &y)| x & !y == 0) {
                    up[a][b / 64] |= 1 << (b % 64);
                }
            }
        }
        let poset = FinitePoset {
            elements,
            index: index_map,
            up,
        };
        let index = tuples
            .iter()
            .enumerate()
            .map(|(k, t)| (t.clone(), k))
            .collect();
        Ok(PuncturedProduct {
            jvec: jvec.clone(),
            poset,
            tuples,
            index,
        })
    }

    /// Element index of a tuple of subset masks.
    pub fn element_of(&self, tuple: &[u64]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    pub fn tuple_of(&self, idx: usize) -> &[u64] {
        &self.tuples[idx]
    }

    pub fn tuples(&self) -> &[Vec<u64>] {
        &self.tuples
    }
}

/// Poset of tuples of nonempty subsets `P_0([j_1]) x ... x P_0([j_m])`.
pub fn punctured_product(jvec: &MultiIndex) -> Result<FinitePoset> {
    Ok(PuncturedProduct::new(jvec)?.poset)
}

/// The multidegree lattice below `jvec` (componentwise), optionally strict.
#[derive(Clone, Debug)]
pub struct MultidegreeDownset {
    pub jvec: MultiIndex,
    pub strict: bool,
    pub poset: FinitePoset,
    tuples: Vec<MultiIndex>,
    index: BTreeMap<MultiIndex, usize>,
}

impl MultidegreeDownset {
    pub fn new(jvec: &MultiIndex, strict: bool) -> Result<Self> {
        jvec.require_nonnegative()?;
        let tuples: Vec<MultiIndex> = boxed_tuples(jvec.entries())
            .into_iter()
            .map(|t| MultiIndex::new(t).expect("entries are nonnegative"))
            .filter(|t| !strict || t.lt(jvec))
            .collect();
        let poset = poset_of_tuples(&tuples);
        let index = tuples
            .iter()
            .enumerate()
            .map(|(k, t)| (t.clone(), k))
            .collect();
        Ok(MultidegreeDownset {
            jvec: jvec.clone(),
            strict,
            poset,
            tuples,
            index,
        })
    }

    pub fn element_of(&self, t: &MultiIndex) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn tuple_of(&self, idx: usize) -> &MultiIndex {
        &self.tuples[idx]
    }

    pub fn tuples(&self) -> &[MultiIndex] {
        &self.tuples
    }
}

/// Poset of all `k <= jvec` (componentwise); `strict` excludes `jvec`.
pub fn multidegree_downset(jvec: &MultiIndex, strict: bool) -> Result<FinitePoset> {
    Ok(MultidegreeDownset::new(jvec, strict)?.poset)
}

/// Poset of all m-tuples of nonnegative integers with entry sum at most `k`.
pub fn total_degree_downset(m: usize, k: i64) -> Result<FinitePoset> {
    if m == 0 {
        return Err(Error::EmptyMultiIndex);
    }
    if k < 0 {
        return Err(Error::NegativeEntry(k));
    }
    Ok(poset_of_tuples(&tuples_with_sum_at_most(m, k)))
}

/// All tuples `t` with `0 <= t_i <= bounds_i`, in lexicographic order.
fn boxed_tuples(bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        let mut next = Vec::with_capacity(out.len() * (b + 1) as usize);
        for t in &out {
            for v in 0..=b {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

fn poset_of_tuples(tuples: &[MultiIndex]) -> FinitePoset {
    let elements: Vec<String> = tuples.iter().map(|t| t.id()).collect();
    let index: BTreeMap<String, usize> = elements
        .iter()
        .enumerate()
        .map(|(k, id)| (id.clone(), k))
        .collect();
    let count = tuples.len();
    let mut up = vec![vec![0u64; words(count)]; count];
    for (a, ta) in tuples.iter().enumerate() {
        for (b, tb) in tuples.iter().enumerate() {
            if ta.leq(tb) {
                up[a][b / 64] |= 1 << (b % 64);
            }
        }
    }
    FinitePoset {
        elements,
        index,
        up,
    }
}

fn tuples_with_sum_at_most(m: usize, k: i64) -> Vec<MultiIndex> {
    fn rec(m: usize, k: i64, prefix: &mut Vec<i64>, out: &mut Vec<MultiIndex>) {
        if m == 0 {
            out.push(MultiIndex::new(prefix.clone()).expect("valid"));
            return;
        }
        for v in 0..=k {
            prefix.push(v);
            rec(m - 1, k - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k, &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn tuples_with_sum_exactly(m: usize, k: i64) -> Vec<MultiIndex> {
    tuples_with_sum_at_most(m, k)
        .into_iter()
        .filter(|t| t.total() == k)
        .collect()
}

/// An ideal cover of a poset: downward-closed subsets whose union is the
/// whole element set.
#[derive(Clone, Debug)]
pub struct IdealCover {
    pub poset: FinitePoset,
    ideals: Vec<BTreeSet<usize>>,
}

impl IdealCover {
    pub fn new(poset: FinitePoset, ideals: Vec<BTreeSet<usize>>) -> Result<Self> {
        for ideal in &ideals {
            if let Some(&b) = ideal.iter().find(|&&b| b >= poset.len()) {
                return Err(Error::RelationOutOfRange(b, b));
            }
            for &b in ideal {
                for a in poset.down_set(b) {
                    if !ideal.contains(&a) {
                        return Err(Error::NotAnIdeal(
                            poset.id(b).to_string(),
                            poset.id(a).to_string(),
                        ));
                    }
                }
            }
        }
        if let Some(uncovered) =
            (0..poset.len()).find(|i| !ideals.iter().any(|ideal| ideal.contains(i)))
        {
            return Err(Error::NotACover(poset.id(uncovered).to_string()));
        }
        Ok(IdealCover { poset, ideals })
    }

    pub fn from_ids(poset: FinitePoset, ideal_ids: &[Vec<String>]) -> Result<Self> {
        let ideals = ideal_ids
            .iter()
            .map(|ids| {
                ids.iter()
                    .map(|id| poset.index_of(id))
                    .collect::<Result<_>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(poset, ideals)
    }

    pub fn ideals(&self) -> &[BTreeSet<usize>] {
        &self.ideals
    }

    /// Intersection of the ideals indexed by `which`.
    pub fn intersection(&self, which: &[usize]) -> BTreeSet<usize> {
        let mut iter = which.iter();
        let first = match iter.next() {
            Some(&i) => self.ideals[i].clone(),
            None => (0..self.poset.len()).collect(),
        };
        iter.fold(first, |acc, &i| {
            acc.intersection(&self.ideals[i]).copied().collect()
        })
    }
}

/// Simplicial chain complex (over the integers) of the strict-chain nerve of
/// a poset. A poset with a maximum has the homology of a point.
pub fn order_complex(poset: &FinitePoset) -> ChainComplex<Int> {
    let chains = poset.strict_chains();
    let mut by_len: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for c in chains {
        by_len.entry(c.len() - 1).or_default().push(c);
    }
    for cs in by_len.values_mut() {
        cs.sort();
    }
    let mut index: BTreeMap<&[usize], usize> = BTreeMap::new();
    for cs in by_len.values() {
        for (i, c) in cs.iter().enumerate() {
            index.insert(c.as_slice(), i);
        }
    }
    let mut ranks = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for (&p, cs) in &by_len {
        ranks.insert(p as i64, cs.len());
        labels.insert(
            p as i64,
            cs.iter()
                .map(|c| {
                    c.iter()
                        .map(|&q| poset.id(q).to_string())
                        .collect::<Vec<_>>()
                        .join("<")
                })
                .collect(),
        );
    }
    let mut diffs = BTreeMap::new();
    for (&p, cs) in &by_len {
        if p == 0 {
            continue;
        }
        let rows = by_len[&(p - 1)].len();
        let mut m = Matrix::<Int>::zero(rows, cs.len());
        for (col, c) in cs.iter().enumerate() {
            for drop in 0..c.len() {
                let mut face: Vec<usize> = c.clone();
                face.remove(drop);
                let row = index[face.as_slice()];
                let sign = if drop % 2 == 0 { 1 } else { -1 };
                let v = m[(row, col)].clone() + Int::from(sign);
                m[(row, col)] = v;
            }
        }
        diffs.insert(p as i64, m);
    }
    ChainComplex::new(ranks, diffs, labels).expect("nerve boundary squares to zero")
}

/// Outcome of one combinatorial cover identity check.
#[derive(Clone, Debug)]
pub struct CoverCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Report for [`verify_cover_identities`].
#[derive(Clone, Debug)]
pub struct CoverIdentityReport {
    pub m: usize,
    pub bound: i64,
    pub checks: Vec<CoverCheck>,
}

impl CoverIdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Exhaustively checks, for all multidegrees bounded by `bound`:
/// (a) the strict downset below `j` is the union of the downsets below the
///     single-coordinate decrements of `j`;
/// (b) the total-degree downset at `k` is the union of the downsets below
///     the multidegrees of total degree exactly `k` (and its strict
///     variant at `k - 1`);
/// (c) every nonempty intersection in either cover is the downset of the
///     componentwise minimum, which is its final object.
pub fn verify_cover_identities(m: usize, bound: i64) -> Result<CoverIdentityReport> {
    if m == 0 {
        return Err(Error::EmptyMultiIndex);
    }
    if bound < 0 {
        return Err(Error::NegativeEntry(bound));
    }
    // universe: tuples with entries in 0..=bound, indexed in mixed radix
    let base = (bound + 1) as usize;
    let size = base.pow(m as u32);
    let tuple_at = |idx: usize| -> Vec<i64> {
        let mut t = vec![0i64; m];
        let mut rest = idx;
        for i in (0..m).rev() {
            t[i] = (rest % base) as i64;
            rest /= base;
        }
        t
    };
    let downset_bits = |j: &[i64]| -> Vec<u64> {
        let mut bits = vec![0u64; size.div_ceil(64)];
        if j.iter().any(|&e| e < 0) {
            return bits;
        }
        for idx in 0..size {
            let t = tuple_at(idx);
            if t.iter().zip(j).all(|(a, b)| a <= b) {
                bits[idx / 64] |= 1 << (idx % 64);
            }
        }
        bits
    };
    let strict_downset_bits = |j: &[i64]| -> Vec<u64> {
        let mut bits = downset_bits(j);
        if j.iter().all(|&e| e >= 0) {
            let idx: usize = j.iter().fold(0usize, |acc, &e| acc * base + e as usize);
            bits[idx / 64] &= !(1 << (idx % 64));
        }
        bits
    };
    let or = |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).map(|(x, y)| x | y).collect() };
    let and = |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).map(|(x, y)| x & y).collect() };

    let mut checks = Vec::new();
    let all_jvecs: Vec<Vec<i64>> = (0..size).map(tuple_at).collect();

    // (a) strict downsets as unions of decremented downsets
    {
        let mut pass = true;
        let mut detail = String::new();
        for j in &all_jvecs {
            let mut union = vec![0u64; size.div_ceil(64)];
            for i in 0..m {
                let mut ji = j.clone();
                ji[i] -= 1;
                union = or(&union, &downset_bits(&ji));
            }
            if union != strict_downset_bits(j) {
                pass = false;
                detail = format!("fails at jvec = {j:?}");
                break;
            }
        }
        checks.push(CoverCheck {
            name: "strict_downset_union".to_string(),
            pass,
            detail,
        });
    }

    // (c1) intersections in the decremented cover have the expected
    // final object
    {
        let mut pass = true;
        let mut detail = String::new();
        'outer_a: for j in &all_jvecs {
            for smask in 1u64..(1 << m) {
                let mut js = j.clone();
                for (i, v) in js.iter_mut().enumerate() {
                    if (smask >> i) & 1 == 1 {
                        *v -= 1;
                    }
                }
                let mut inter = vec![u64::MAX; size.div_ceil(64)];
                for i in 0..m {
                    if (smask >> i) & 1 == 1 {
                        let mut ji = j.clone();
                        ji[i] -= 1;
                        inter = and(&inter, &downset_bits(&ji));
                    }
                }
                if inter != downset_bits(&js) {
                    pass = false;
                    detail = format!("fails at jvec = {j:?}, coordinates {smask:#b}");
                    break 'outer_a;
                }
                if js.iter().all(|&e| e >= 0) {
                    // final object: js lies in the intersection and bounds it
                    let inside = inter.iter().enumerate().all(|(w, &word)| {
                        (0..64).all(|b| {
                            let idx = w * 64 + b;
                            if idx >= size || (word >> b) & 1 == 0 {
                                return true;
                            }
                            tuple_at(idx).iter().zip(&js).all(|(a, c)| a <= c)
                        })
                    });
                    if !inside {
                        pass = false;
                        detail = format!("final object fails at jvec = {j:?}, {smask:#b}");
                        break 'outer_a;
                    }
                }
            }
        }
        checks.push(CoverCheck {
            name: "decrement_intersections_final".to_string(),
            pass,
            detail,
        });
    }

    // (b) + (c2): total-degree covers, both variants, and their
    // intersections
    {
        let mut pass = true;
        let mut strict_pass = true;
        let mut inter_pass = true;
        let mut detail = String::new();
        let mut strict_detail = String::new();
        let mut inter_detail = String::new();
        for k in 0..=bound {
            let level: Vec<MultiIndex> = tuples_with_sum_exactly(m, k);
            let mut total = vec![0u64; size.div_ceil(64)];
            for idx in 0..size {
                let t = tuple_at(idx);
                if t.iter().sum::<i64>() <= k {
                    total[idx / 64] |= 1 << (idx % 64);
                }
            }
            let mut union = vec![0u64; size.div_ceil(64)];
            for j in &level {
                union = or(&union, &downset_bits(j.entries()));
            }
            if union != total && pass {
                pass = false;
                detail = format!("fails at k = {k}");
            }
            if k >= 1 {
                let mut total_below = vec![0u64; size.div_ceil(64)];
                for idx in 0..size {
                    let t = tuple_at(idx);
                    if t.iter().sum::<i64>() < k {
                        total_below[idx / 64] |= 1 << (idx % 64);
                    }
                }
                let mut strict_union = vec![0u64; size.div_ceil(64)];
                for j in &level {
                    strict_union = or(&strict_union, &strict_downset_bits(j.entries()));
                }
                if strict_union != total_below && strict_pass {
                    strict_pass = false;
                    strict_detail = format!("fails at k = {k}");
                }
            }
            // intersections over subsets of the level
            if inter_pass {
                let lvl = level.len();
                if lvl <= 16 {
                    'subsets: for smask in 1u64..(1 << lvl) {
                        let mut inter = vec![u64::MAX; size.div_ceil(64)];
                        let mut min: Option<MultiIndex> = None;
                        for (pos, j) in level.iter().enumerate() {
                            if (smask >> pos) & 1 == 1 {
                                inter = and(&inter, &downset_bits(j.entries()));
                                min = Some(match min {
                                    None => j.clone(),
                                    Some(prev) => prev.meet(j)?,
                                });
                            }
                        }
                        let min = min.expect("nonempty subset");
                        if inter != downset_bits(min.entries()) {
                            inter_pass = false;
                            inter_detail =
                                format!("fails at k = {k}, subset {smask:#b}, min {min}");
                            break 'subsets;
                        }
                    }
                }
            }
        }
        checks.push(CoverCheck {
            name: "total_degree_union".to_string(),
            pass,
            detail,
        });
        checks.push(CoverCheck {
            name: "total_degree_strict_union".to_string(),
            pass: strict_pass,
            detail: strict_detail,
        });
        checks.push(CoverCheck {
            name: "level_intersections_min".to_string(),
            pass: inter_pass,
            detail: inter_detail,
        });
    }

    Ok(CoverIdentityReport { m, bound, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_set_of_two() {
        let p = power_set(&["1", "2"]).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.minimum().is_some());
        assert!(p.maximum().is_some());
        assert_eq!(p.id(p.minimum().unwrap()), "{}");
        assert_eq!(p.id(p.maximum().unwrap()), "{1,2}");
    }

    #[test]
    fn power_set_of_empty() {
        let p = power_set(&[]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.id(0), "{}");
    }

    #[test]
    fn power_set_of_three_has_three_atoms() {
        let p = power_set(&["1", "2", "3"]).unwrap();
        assert_eq!(p.len(), 8);
        let bottom = p.minimum().unwrap();
        // atoms: elements whose down set is exactly {bottom, self}
        let atoms = (0..p.len())
            .filter(|&i| i != bottom && p.down_set(i).count() == 2)
            .count();
        assert_eq!(atoms, 3);
    }

    #[test]
    fn power_set_size_guard() {
        let labels: Vec<String> = (0..21).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        assert!(matches!(power_set(&refs), Err(Error::SizeOverflow(21, 20))));
    }

    #[test]
    fn punctured_cube_shapes() {
        assert!(punctured_cube(&[]).is_err());
        assert_eq!(punctured_cube(&["1"]).unwrap().len(), 1);
        let p = punctured_cube(&["1", "2"]).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.minimum().is_none());
        assert!(p.maximum().is_some());
        assert_eq!(punctured_cube(&["1", "2", "3"]).unwrap().len(), 7);
    }

    #[test]
    fn punctured_product_cardinalities() {
        let j = MultiIndex::new(vec![1, 0]).unwrap();
        assert_eq!(punctured_product(&j).unwrap().len(), 3);
        let j = MultiIndex::new(vec![1, 1]).unwrap();
        assert_eq!(punctured_product(&j).unwrap().len(), 9);
        // enumeration oracle for (2, 1): nonempty subsets of {0,1,2} times
        // nonempty subsets of {0,1}
        let mut count = 0;
        for s1 in 1u64..8 {
            for s2 in 1u64..4 {
                let _ = (s1, s2);
                count += 1;
            }
        }
        let j = MultiIndex::new(vec![2, 1]).unwrap();
        assert_eq!(punctured_product(&j).unwrap().len(), count);
        assert_eq!(count, 21);
    }

    #[test]
    fn punctured_product_cardinality_formula() {
        for j1 in 0..=3i64 {
            for j2 in 0..=3i64 {
                let j = MultiIndex::new(vec![j1, j2]).unwrap();
                let expect = ((1u64 << (j1 + 1)) - 1) * ((1u64 << (j2 + 1)) - 1);
                assert_eq!(punctured_product(&j).unwrap().len() as u64, expect);
            }
        }
    }

    #[test]
    fn punctured_product_rejects_negative() {
        let j = MultiIndex::new(vec![1, -1]).unwrap();
        assert!(punctured_product(&j).is_err());
    }

    #[test]
    fn multidegree_downsets() {
        let j = MultiIndex::new(vec![1, 1]).unwrap();
        assert_eq!(multidegree_downset(&j, false).unwrap().len(), 4);
        assert_eq!(multidegree_downset(&j, true).unwrap().len(), 3);
        // enumeration oracle for strict (2, 1)
        let mut expect = 0;
        for a in 0..=2 {
            for b in 0..=1 {
                if (a, b) != (2, 1) {
                    expect += 1;
                }
            }
        }
        let j = MultiIndex::new(vec![2, 1]).unwrap();
        assert_eq!(multidegree_downset(&j, true).unwrap().len(), expect);
        assert_eq!(expect, 5);
    }

    #[test]
    fn total_degree_downsets() {
        let p = total_degree_downset(2, 1).unwrap();
        assert_eq!(p.len(), 3);
        let ids: BTreeSet<&str> = p.elements().iter().map(|s| s.as_str()).collect();
        assert_eq!(ids, ["(0,0)", "(0,1)", "(1,0)"].into_iter().collect());
        assert_eq!(total_degree_downset(2, 2).unwrap().len(), 6);
        // binomial oracle: C(m + k, m)
        let binom = |n: i64, k: i64| -> i64 {
            let mut r = 1i64;
            for i in 0..k {
                r = r * (n - i) / (i + 1);
            }
            r
        };
        assert_eq!(
            total_degree_downset(3, 2).unwrap().len() as i64,
            binom(3 + 2, 3)
        );
    }

    #[test]
    fn decrement_on_matches_examples() {
        let j = MultiIndex::new(vec![2, 1]).unwrap();
        let r1: BTreeSet<usize> = [0].into_iter().collect();
        assert_eq!(
            j.decrement_on(&r1).unwrap(),
            MultiIndex::new(vec![1, 1]).unwrap()
        );
        assert_eq!(j.decrement_on(&BTreeSet::new()).unwrap(), j);
        let r12: BTreeSet<usize> = [0, 1].into_iter().collect();
        assert_eq!(
            j.decrement_on(&r12).unwrap(),
            MultiIndex::new(vec![1, 0]).unwrap()
        );
    }

    #[test]
    fn ideal_checks() {
        let j = MultiIndex::new(vec![1, 1]).unwrap();
        let p = multidegree_downset(&j, false).unwrap();
        assert!(p
            .is_ideal(&["(0,0)".to_string(), "(1,0)".to_string()])
            .unwrap());
        assert!(!p.is_ideal(&["(1,1)".to_string()]).unwrap());
        assert!(p.is_ideal(&["missing".to_string()]).is_err());

        let c = punctured_cube(&["1", "2"]).unwrap();
        assert!(c.is_ideal(&["{1}".to_string(), "{2}".to_string()]).unwrap());
    }

    #[test]
    fn structured_constructors_build_valid_orders() {
        let mut family: Vec<FinitePoset> = vec![
            power_set(&["1", "2", "3"]).unwrap(),
            punctured_cube(&["1", "2", "3"]).unwrap(),
            punctured_product(&MultiIndex::new(vec![2, 1]).unwrap()).unwrap(),
            multidegree_downset(&MultiIndex::new(vec![2, 2]).unwrap(), true).unwrap(),
            total_degree_downset(3, 2).unwrap(),
        ];
        let chain = FinitePoset::new(
            vec!["a".to_string(), "b".to_string()],
            &[("a".to_string(), "b".to_string())],
        )
        .unwrap();
        family.push(chain.product(&family[1]).poset);
        family.push(family[0].opposite());
        family.push(family[2].induced(&[0, 2, 4]));
        family.push(reverse_inclusion_poset(
            &["x".to_string(), "y".to_string()],
            &[1, 2, 3],
        ));
        for p in &family {
            p.validate().expect("reflexive, antisymmetric, transitive");
        }
    }

    #[test]
    fn cover_identities_small() {
        assert!(verify_cover_identities(2, 2).unwrap().passed());
        assert!(verify_cover_identities(1, 3).unwrap().passed());
        assert!(verify_cover_identities(3, 2).unwrap().passed());
    }

    #[test]
    fn order_complex_of_chain_is_point() {
        let p = FinitePoset::new(
            vec!["a".to_string(), "b".to_string()],
            &[("a".to_string(), "b".to_string())],
        )
        .unwrap();
        let h = order_complex(&p).homology();
        assert_eq!(h.betti(0), 1);
        assert_eq!(h.total_rank(), 1);
    }

    #[test]
    fn order_complex_of_poset_with_maximum_is_point() {
        let p = punctured_cube(&["1", "2"]).unwrap();
        let h = order_complex(&p).homology();
        assert_eq!(h.betti(0), 1);
        assert_eq!(h.total_rank(), 1);
        for j in [vec![1, 1], vec![2, 1]] {
            let p = punctured_product(&MultiIndex::new(j).unwrap()).unwrap();
            let h = order_complex(&p).homology();
            assert_eq!(h.betti(0), 1);
            assert_eq!(h.total_rank(), 1, "poset with maximum must be acyclic");
        }
    }

    #[test]
    fn order_complex_of_antichain() {
        let p = FinitePoset::new(vec!["a".to_string(), "b".to_string()], &[]).unwrap();
        let h = order_complex(&p).homology();
        assert_eq!(h.betti(0), 2);
    }

    #[test]
    fn poset_validation_rejects_bad_relations() {
        let els = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        // not transitive: a <= b, b <= c but not a <= c
        assert!(matches!(
            FinitePoset::new(
                els.clone(),
                &[
                    ("a".to_string(), "b".to_string()),
                    ("b".to_string(), "c".to_string())
                ]
            ),
            Err(Error::NotTransitive(..))
        ));
        // not antisymmetric
        assert!(matches!(
            FinitePoset::new(
                els.clone(),
                &[
                    ("a".to_string(), "b".to_string()),
                    ("b".to_string(), "a".to_string())
                ]
            ),
            Err(Error::NotAntisymmetric(..))
        ));
        // closure_of repairs transitivity
        let p = FinitePoset::closure_of(els, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.leq(0, 2));
    }

    #[test]
    fn opposite_flips_extrema() {
        let p = punctured_cube(&["1", "2"]).unwrap();
        let op = p.opposite();
        assert!(op.minimum().is_some());
        assert!(op.maximum().is_none());
        assert_eq!(p.height(), op.height());
    }

    #[test]
    fn product_poset_order() {
        let a = punctured_cube(&["1"]).unwrap();
        let b = punctured_cube(&["1", "2"]).unwrap();
        let prod = a.product(&b);
        assert_eq!(prod.poset.len(), 3);
        let top_b = b.maximum().unwrap();
        let idx = prod.pair_index(0, top_b);
        assert_eq!(prod.poset.maximum(), Some(idx));
    }

    #[test]
    fn strict_chain_count_of_punctured_square() {
        let p = punctured_cube(&["1", "2"]).unwrap();
        // chains: three singletons plus {1}<{1,2} and {2}<{1,2}
        assert_eq!(p.strict_chains().len(), 5);
        let cube = punctured_cube(&["1", "2", "3"]).unwrap();
        assert_eq!(cube.strict_chains().len(), 25);
    }

    #[test]
    fn ideal_cover_validation() {
        let p = punctured_cube(&["1", "2"]).unwrap();
        let i1: BTreeSet<usize> = [p.index_of("{1}").unwrap()].into_iter().collect();
        let i2: BTreeSet<usize> = [p.index_of("{2}").unwrap()].into_iter().collect();
        assert!(matches!(
            IdealCover::new(p.clone(), vec![i1.clone(), i2.clone()]),
            Err(Error::NotACover(_))
        ));
        // the top subset alone is not downward closed
        let top_only: BTreeSet<usize> = [p.index_of("{1,2}").unwrap()].into_iter().collect();
        let all: BTreeSet<usize> = (0..p.len()).collect();
        assert!(matches!(
            IdealCover::new(p.clone(), vec![all.clone(), top_only]),
            Err(Error::NotAnIdeal(..))
        ));
        let down1: BTreeSet<usize> = p.down_set(p.index_of("{1,2}").unwrap()).collect();
        assert!(IdealCover::new(p, vec![down1, i2]).is_ok());
    }
}
