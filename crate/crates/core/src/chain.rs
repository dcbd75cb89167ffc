//! Finitely generated chain complexes, chain maps, homotopy fibers and
//! homology.
//!
//! Complexes are graded by `i64` (totalizations produce negative degrees),
//! finitely supported, and validate `d o d = 0` on construction. Homology is
//! computed from Smith diagonals: in degree `n` the free rank is
//! `rank C_n - rank d_n - rank d_{n+1}` and the torsion coefficients are the
//! non-unit invariant factors of `d_{n+1}`.

use std::collections::BTreeMap;

use num::BigUint;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::Ring;

/// Connectivity of a chain map: least degree with nontrivial hofiber
/// homology, or infinite for a quasi-isomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Finite(i64),
    Infinite,
}

impl Connectivity {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Connectivity::Infinite)
    }
}

impl PartialOrd for Connectivity {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Connectivity {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Connectivity::*;
        match (self, other) {
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
            (Infinite, Finite(_)) => std::cmp::Ordering::Greater,
            (Finite(_), Infinite) => std::cmp::Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl std::fmt::Display for Connectivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Connectivity::Finite(k) => write!(f, "{k}"),
            Connectivity::Infinite => write!(f, "inf"),
        }
    }
}

/// Homology in a single degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Homology {
    pub rank: usize,
    /// Torsion coefficients, each > 1 and each dividing the next.
    pub torsion: Vec<BigUint>,
}

impl Homology {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

/// Homology of a complex, one [`Homology`] per degree with nontrivial group.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HomologySummary {
    groups: BTreeMap<i64, Homology>,
}

impl HomologySummary {
    pub fn new(groups: BTreeMap<i64, Homology>) -> Self {
        let groups = groups
            .into_iter()
            .filter(|(_, h)| !h.is_trivial())
            .collect();
        HomologySummary { groups }
    }

    pub fn group(&self, degree: i64) -> Homology {
        self.groups.get(&degree).cloned().unwrap_or_default()
    }

    pub fn betti(&self, degree: i64) -> usize {
        self.group(degree).rank
    }

    /// Free ranks per degree; torsion is ignored.
    pub fn betti_table(&self) -> BTreeMap<i64, usize> {
        self.groups
            .iter()
            .filter(|(_, h)| h.rank > 0)
            .map(|(&d, h)| (d, h.rank))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &Homology)> {
        self.groups.iter()
    }

    pub fn total_rank(&self) -> usize {
        self.groups.values().map(|h| h.rank).sum()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.groups.keys().copied().collect()
    }
}

impl std::fmt::Display for HomologySummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.groups.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, h) in &self.groups {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            let mut parts = Vec::new();
            if h.rank == 1 {
                parts.push("F".to_string());
            } else if h.rank > 1 {
                parts.push(format!("F^{}", h.rank));
            }
            for t in &h.torsion {
                parts.push(format!("Z/{t}"));
            }
            write!(f, "H_{d} = {}", parts.join(" + "))?;
        }
        Ok(())
    }
}

/// A finitely supported chain complex over `R`.
#[derive(Clone, PartialEq, Eq)]
pub struct ChainComplex<R: Ring> {
    ranks: BTreeMap<i64, usize>,
    /// `diffs[n]` is `d_n : C_n -> C_{n-1}`; absent means zero.
    diffs: BTreeMap<i64, Matrix<R>>,
    labels: BTreeMap<i64, Vec<String>>,
}

impl<R: Ring> std::fmt::Debug for ChainComplex<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ChainComplex[{}] ranks={:?}", R::NAME, self.ranks)
    }
}

impl<R: Ring> ChainComplex<R> {
    pub fn new(
        ranks: BTreeMap<i64, usize>,
        diffs: BTreeMap<i64, Matrix<R>>,
        labels: BTreeMap<i64, Vec<String>>,
    ) -> Result<Self> {
        let ranks: BTreeMap<i64, usize> = ranks.into_iter().filter(|&(_, r)| r > 0).collect();
        let rank_of = |n: i64| ranks.get(&n).copied().unwrap_or(0);
        let mut kept = BTreeMap::new();
        for (n, m) in diffs {
            let (want_rows, want_cols) = (rank_of(n - 1), rank_of(n));
            if m.rows() != want_rows || m.cols() != want_cols {
                return Err(Error::DiffShape {
                    degree: n,
                    got_rows: m.rows(),
                    got_cols: m.cols(),
                    want_rows,
                    want_cols,
                });
            }
            if !m.is_zero() {
                kept.insert(n, m);
            }
        }
        for (n, lab) in &labels {
            if lab.len() != rank_of(*n) {
                return Err(Error::LabelCount {
                    degree: *n,
                    got: lab.len(),
                    want: rank_of(*n),
                });
            }
        }
        let complex = ChainComplex {
            ranks,
            diffs: kept,
            labels,
        };
        complex.check_square()?;
        Ok(complex)
    }

    fn check_square(&self) -> Result<()> {
        for (&n, d_n) in &self.diffs {
            if let Some(d_next) = self.diffs.get(&(n + 1)) {
                let prod = d_n.mul(d_next)?;
                if !prod.is_zero() {
                    return Err(Error::DifferentialSquare(n + 1, n - 1));
                }
            }
        }
        Ok(())
    }

    pub fn zero() -> Self {
        ChainComplex {
            ranks: BTreeMap::new(),
            diffs: BTreeMap::new(),
            labels: BTreeMap::new(),
        }
    }

    /// Rank 1 in a single degree, zero differential.
    pub fn sphere(degree: i64) -> Self {
        Self::concentrated(1, degree)
    }

    /// Given rank concentrated in one degree, zero differential.
    pub fn concentrated(rank: usize, degree: i64) -> Self {
        let mut ranks = BTreeMap::new();
        if rank > 0 {
            ranks.insert(degree, rank);
        }
        ChainComplex {
            ranks,
            diffs: BTreeMap::new(),
            labels: BTreeMap::new(),
        }
    }

    /// Acyclic two-step complex `R -> R` (identity) in degrees `top, top-1`.
    pub fn disk(top: i64) -> Self {
        let mut ranks = BTreeMap::new();
        ranks.insert(top, 1);
        ranks.insert(top - 1, 1);
        let mut diffs = BTreeMap::new();
        diffs.insert(top, Matrix::identity(1));
        ChainComplex {
            ranks,
            diffs,
            labels: BTreeMap::new(),
        }
    }

    /// Zero-differential complex with the given ranks.
    pub fn with_zero_differential(ranks: BTreeMap<i64, usize>) -> Self {
        ChainComplex {
            ranks: ranks.into_iter().filter(|&(_, r)| r > 0).collect(),
            diffs: BTreeMap::new(),
            labels: BTreeMap::new(),
        }
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.ranks.get(&degree).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_zero_complex(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.ranks.keys().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.ranks.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.ranks.keys().next_back().copied()
    }

    /// The differential `d_n`, materialized (zero when absent).
    pub fn diff(&self, degree: i64) -> Matrix<R> {
        self.diffs
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.rank(degree - 1), self.rank(degree)))
    }

    pub fn diffs(&self) -> &BTreeMap<i64, Matrix<R>> {
        &self.diffs
    }

    pub fn labels(&self, degree: i64) -> Option<&Vec<String>> {
        self.labels.get(&degree)
    }

    pub fn all_labels(&self) -> &BTreeMap<i64, Vec<String>> {
        &self.labels
    }

    pub fn set_labels(&mut self, degree: i64, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.rank(degree) {
            return Err(Error::LabelCount {
                degree,
                got: labels.len(),
                want: self.rank(degree),
            });
        }
        self.labels.insert(degree, labels);
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .map(|(&n, &r)| {
                if n.rem_euclid(2) == 0 {
                    r as i64
                } else {
                    -(r as i64)
                }
            })
            .sum()
    }

    pub fn homology(&self) -> HomologySummary {
        // Smith data per differential, computed once.
        let mut smith: BTreeMap<i64, Vec<R>> = BTreeMap::new();
        for (&n, d) in &self.diffs {
            smith.insert(n, d.smith_diagonal());
        }
        let rank_d = |n: i64| smith.get(&n).map_or(0, |d| d.len());
        let mut groups = BTreeMap::new();
        let mut degrees: Vec<i64> = self.ranks.keys().copied().collect();
        degrees.sort_unstable();
        for n in degrees {
            let rank = self.rank(n) - rank_d(n) - rank_d(n + 1);
            let torsion: Vec<BigUint> = smith
                .get(&(n + 1))
                .map(|diag| diag.iter().filter_map(|e| e.torsion_value()).collect())
                .unwrap_or_default();
            groups.insert(n, Homology { rank, torsion });
        }
        HomologySummary::new(groups)
    }

    /// Direct sum; labels are kept only when every summand carries them.
    pub fn direct_sum(parts: &[&ChainComplex<R>]) -> Result<ChainComplex<R>> {
        let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
        for c in parts {
            for (&n, &r) in &c.ranks {
                *ranks.entry(n).or_insert(0) += r;
            }
        }
        let mut diffs = BTreeMap::new();
        let degrees: Vec<i64> = ranks.keys().copied().collect();
        for &n in &degrees {
            let rows: usize = ranks.get(&(n - 1)).copied().unwrap_or(0);
            let cols = ranks[&n];
            if rows == 0 || cols == 0 {
                continue;
            }
            let mut m = Matrix::zero(rows, cols);
            let (mut r0, mut c0) = (0, 0);
            for c in parts {
                let block = c.diff(n);
                m.set_block(r0, c0, &block);
                r0 += c.rank(n - 1);
                c0 += c.rank(n);
            }
            diffs.insert(n, m);
        }
        let mut labels = BTreeMap::new();
        for &n in &degrees {
            if parts
                .iter()
                .all(|c| c.rank(n) == 0 || c.labels(n).is_some())
            {
                let mut lab = Vec::new();
                for c in parts {
                    if let Some(l) = c.labels(n) {
                        lab.extend(l.iter().cloned());
                    }
                }
                if lab.len() == ranks[&n] {
                    labels.insert(n, lab);
                }
            }
        }
        ChainComplex::new(ranks, diffs, labels)
    }

    /// Degree shift: `shift(C, k)[n] = C[n - k]`, differential scaled by
    /// `(-1)^k`.
    pub fn shift(&self, k: i64) -> ChainComplex<R> {
        let ranks = self.ranks.iter().map(|(&n, &r)| (n + k, r)).collect();
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        let diffs = self
            .diffs
            .iter()
            .map(|(&n, m)| {
                let m = if sign == 1 { m.clone() } else { m.neg() };
                (n + k, m)
            })
            .collect();
        let labels = self
            .labels
            .iter()
            .map(|(&n, l)| (n + k, l.clone()))
            .collect();
        ChainComplex {
            ranks,
            diffs,
            labels,
        }
    }

    /// Tensor product with the Koszul sign: `d(x (x) y) = dx (x) y +
    /// (-1)^p x (x) dy` for `x` in degree `p`.
    pub fn tensor(&self, other: &ChainComplex<R>) -> Result<ChainComplex<R>> {
        let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
        for (&p, &ra) in &self.ranks {
            for (&q, &rb) in &other.ranks {
                *ranks.entry(p + q).or_insert(0) += ra * rb;
            }
        }
        // column offsets of the (p, q) blocks inside degree p + q
        let mut offsets: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for &n in ranks.keys() {
            let mut off = 0;
            for (&p, &ra) in &self.ranks {
                let q = n - p;
                let rb = other.rank(q);
                if rb == 0 {
                    continue;
                }
                offsets.insert((p, q), off);
                off += ra * rb;
            }
        }
        let rank_of = |n: i64| ranks.get(&n).copied().unwrap_or(0);
        let mut diffs = BTreeMap::new();
        let degrees: Vec<i64> = ranks.keys().copied().collect();
        for &n in &degrees {
            let rows = rank_of(n - 1);
            let cols = rank_of(n);
            if rows == 0 || cols == 0 {
                continue;
            }
            let mut m = Matrix::zero(rows, cols);
            for (&p, &ra) in &self.ranks {
                let q = n - p;
                let rb = other.rank(q);
                if rb == 0 {
                    continue;
                }
                let col0 = offsets[&(p, q)];
                // d_a (x) id
                if self.rank(p - 1) > 0 {
                    if let Some(&row0) = offsets.get(&(p - 1, q)) {
                        let da = self.diff(p);
                        for i2 in 0..da.rows() {
                            for i in 0..ra {
                                if da[(i2, i)].is_zero() {
                                    continue;
                                }
                                for j in 0..rb {
                                    m[(row0 + i2 * rb + j, col0 + i * rb + j)] =
                                        da[(i2, i)].clone();
                                }
                            }
                        }
                    }
                }
                // (-1)^p id (x) d_b
                if other.rank(q - 1) > 0 {
                    if let Some(&row0) = offsets.get(&(p, q - 1)) {
                        let db = other.diff(q);
                        let negate = p.rem_euclid(2) == 1;
                        for j2 in 0..db.rows() {
                            for j in 0..rb {
                                if db[(j2, j)].is_zero() {
                                    continue;
                                }
                                let v = if negate {
                                    -db[(j2, j)].clone()
                                } else {
                                    db[(j2, j)].clone()
                                };
                                for i in 0..ra {
                                    m[(row0 + i * other.rank(q - 1) + j2, col0 + i * rb + j)] =
                                        v.clone();
                                }
                            }
                        }
                    }
                }
            }
            diffs.insert(n, m);
        }
        ChainComplex::new(ranks, diffs, BTreeMap::new())
    }
}

/// A chain map; commutation with the differentials is validated on
/// construction.
#[derive(Clone, PartialEq, Eq)]
pub struct ChainMap<R: Ring> {
    source: ChainComplex<R>,
    target: ChainComplex<R>,
    mats: BTreeMap<i64, Matrix<R>>,
}

impl<R: Ring> std::fmt::Debug for ChainMap<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ChainMap[{}] {:?} -> {:?}",
            R::NAME,
            self.source.ranks,
            self.target.ranks
        )
    }
}

impl<R: Ring> ChainMap<R> {
    pub fn new(
        source: ChainComplex<R>,
        target: ChainComplex<R>,
        mats: BTreeMap<i64, Matrix<R>>,
    ) -> Result<Self> {
        let mut kept = BTreeMap::new();
        for (n, m) in mats {
            let (want_rows, want_cols) = (target.rank(n), source.rank(n));
            if m.rows() != want_rows || m.cols() != want_cols {
                return Err(Error::MapShape {
                    degree: n,
                    got_rows: m.rows(),
                    got_cols: m.cols(),
                    want_rows,
                    want_cols,
                });
            }
            if !m.is_zero() {
                kept.insert(n, m);
            }
        }
        let map = ChainMap {
            source,
            target,
            mats: kept,
        };
        map.check_commutes()?;
        Ok(map)
    }

    fn check_commutes(&self) -> Result<()> {
        let mut degrees: Vec<i64> = self.source.degrees().collect();
        degrees.extend(self.target.degrees());
        degrees.sort_unstable();
        degrees.dedup();
        for &n in &degrees {
            // d_target o f_n = f_{n-1} o d_source
            let lhs = self.target.diff(n).mul(&self.mat(n))?;
            let rhs = self.mat(n - 1).mul(&self.source.diff(n))?;
            if lhs != rhs {
                return Err(Error::NotChainMap(n));
            }
        }
        Ok(())
    }

    pub fn identity(c: &ChainComplex<R>) -> Self {
        let mats = c
            .ranks()
            .iter()
            .map(|(&n, &r)| (n, Matrix::identity(r)))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            mats,
        }
    }

    pub fn zero(source: &ChainComplex<R>, target: &ChainComplex<R>) -> Self {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            mats: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &ChainComplex<R> {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex<R> {
        &self.target
    }

    /// The degree-`n` matrix, materialized (zero when absent).
    pub fn mat(&self, degree: i64) -> Matrix<R> {
        self.mats
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.target.rank(degree), self.source.rank(degree)))
    }

    pub fn mats(&self) -> &BTreeMap<i64, Matrix<R>> {
        &self.mats
    }

    /// `self o other` (apply `other` first).
    pub fn compose(&self, other: &ChainMap<R>) -> Result<ChainMap<R>> {
        if other.target.ranks() != self.source.ranks() {
            return Err(Error::Input(
                "composition endpoints do not match".to_string(),
            ));
        }
        let mut degrees: Vec<i64> = other.source.degrees().collect();
        degrees.sort_unstable();
        let mut mats = BTreeMap::new();
        for n in degrees {
            let m = self.mat(n).mul(&other.mat(n))?;
            if !m.is_zero() {
                mats.insert(n, m);
            }
        }
        Ok(ChainMap {
            source: other.source.clone(),
            target: self.target.clone(),
            mats,
        })
    }

    /// Degreewise equality of matrices (sources and targets must share
    /// ranks for the comparison to be meaningful).
    pub fn same_matrices(&self, other: &ChainMap<R>) -> bool {
        self.source.ranks() == other.source.ranks()
            && self.target.ranks() == other.target.ranks()
            && self.mats == other.mats
    }
}

/// The homotopy fiber of a chain map: degree-`n` part `A_n (+) B_{n+1}`,
/// differential `d(a, b) = (d_A a, f(a) - d_B b)`.
pub fn hofiber<R: Ring>(f: &ChainMap<R>) -> ChainComplex<R> {
    let a = f.source();
    let b = f.target();
    let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
    let mut degrees: Vec<i64> = a.degrees().collect();
    degrees.extend(b.degrees().map(|n| n - 1));
    degrees.sort_unstable();
    degrees.dedup();
    for &n in &degrees {
        let r = a.rank(n) + b.rank(n + 1);
        if r > 0 {
            ranks.insert(n, r);
        }
    }
    let mut diffs = BTreeMap::new();
    for &n in &degrees {
        let rows = a.rank(n - 1) + b.rank(n);
        let cols = a.rank(n) + b.rank(n + 1);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zero(rows, cols);
        m.set_block(0, 0, &a.diff(n));
        m.set_block(a.rank(n - 1), 0, &f.mat(n));
        m.set_block(a.rank(n - 1), a.rank(n), &b.diff(n + 1).neg());
        diffs.insert(n, m);
    }
    ChainComplex::new(ranks, diffs, BTreeMap::new())
        .expect("homotopy fiber differential must square to zero")
}

/// The map between homotopy fibers induced by a strictly commuting square
/// `beta o f = f_to o alpha`: blockwise `(a, b) -> (alpha a, beta b)`.
pub fn hofiber_map<R: Ring>(
    f: &ChainMap<R>,
    f_to: &ChainMap<R>,
    alpha: &ChainMap<R>,
    beta: &ChainMap<R>,
) -> Result<ChainMap<R>> {
    let via_to = f_to.compose(alpha)?;
    let via_from = beta.compose(f)?;
    if !via_to.same_matrices(&via_from) {
        return Err(Error::Input(
            "square does not commute, no induced fiber map".to_string(),
        ));
    }
    let src = hofiber(f);
    let dst = hofiber(f_to);
    let mut mats = BTreeMap::new();
    for &n in src.ranks().keys() {
        let rows = dst.rank(n);
        let cols = src.rank(n);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zero(rows, cols);
        m.set_block(0, 0, &alpha.mat(n));
        m.set_block(f_to.source().rank(n), f.source().rank(n), &beta.mat(n + 1));
        mats.insert(n, m);
    }
    ChainMap::new(src, dst, mats)
}

/// Connectivity of a map, computed from the homology of its hofiber.
pub fn connectivity<R: Ring>(f: &ChainMap<R>) -> Connectivity {
    let h = hofiber(f).homology();
    match h.degrees().first() {
        None => Connectivity::Infinite,
        Some(&d) => Connectivity::Finite(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Int, Rat};

    fn sphere_like() -> ChainComplex<Rat> {
        // ranks 1 in degrees 0 and 2, zero differential
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 1);
        ranks.insert(2, 1);
        ChainComplex::with_zero_differential(ranks)
    }

    #[test]
    fn homology_of_sphere_model() {
        let h = sphere_like().homology();
        assert_eq!(h.betti(0), 1);
        assert_eq!(h.betti(1), 0);
        assert_eq!(h.betti(2), 1);
    }

    #[test]
    fn homology_of_interval_model() {
        // ranks 2, 1 in degrees 0, 1 and d = [1, -1]^T
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 2);
        ranks.insert(1, 1);
        let mut diffs = BTreeMap::new();
        diffs.insert(1, Matrix::<Rat>::from_i64(2, 1, &[1, -1]));
        let c = ChainComplex::new(ranks, diffs, BTreeMap::new()).unwrap();
        let h = c.homology();
        assert_eq!(h.betti(0), 1);
        assert_eq!(h.betti(1), 0);
    }

    #[test]
    fn torsion_from_multiplication_by_two() {
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 1);
        ranks.insert(1, 1);
        let mut diffs = BTreeMap::new();
        diffs.insert(1, Matrix::<Int>::from_i64(1, 1, &[2]));
        let c = ChainComplex::new(ranks, diffs, BTreeMap::new()).unwrap();
        let h = c.homology();
        let h0 = h.group(0);
        assert_eq!(h0.rank, 0);
        assert_eq!(h0.torsion, vec![BigUint::from(2u32)]);
        assert!(h.group(1).is_trivial());
    }

    #[test]
    fn invalid_differential_rejected() {
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 1);
        ranks.insert(1, 1);
        ranks.insert(2, 1);
        let mut diffs = BTreeMap::new();
        diffs.insert(1, Matrix::<Int>::from_i64(1, 1, &[1]));
        diffs.insert(2, Matrix::<Int>::from_i64(1, 1, &[1]));
        assert!(matches!(
            ChainComplex::new(ranks, diffs, BTreeMap::new()),
            Err(Error::DifferentialSquare(..))
        ));
    }

    #[test]
    fn hofiber_of_identity_is_acyclic() {
        let c = sphere_like();
        let id = ChainMap::identity(&c);
        assert!(hofiber(&id).homology().is_trivial());
        assert_eq!(connectivity(&id), Connectivity::Infinite);
    }

    #[test]
    fn hofiber_of_map_to_zero_is_source() {
        let c = sphere_like();
        let z = ChainMap::zero(&c, &ChainComplex::zero());
        let h = hofiber(&z).homology();
        assert_eq!(h, c.homology());
    }

    #[test]
    fn hofiber_of_zero_map_shifts_target() {
        // H_n(hofiber(0: C -> D)) = H_n(C) + H_{n+1}(D)
        let c = sphere_like();
        let z = ChainMap::zero(&c, &c);
        let h = hofiber(&z).homology();
        for n in -2..4 {
            let want = c.homology().betti(n) + c.homology().betti(n + 1);
            assert_eq!(h.betti(n), want, "degree {n}");
        }
        // least nonzero degree is -1, coming from H_0 of the target
        assert_eq!(connectivity(&z), Connectivity::Finite(-1));
    }

    #[test]
    fn connectivity_of_projection_in_degree_three() {
        let a: ChainComplex<Rat> = ChainComplex::concentrated(2, 3);
        let b: ChainComplex<Rat> = ChainComplex::concentrated(1, 3);
        let mut mats = BTreeMap::new();
        mats.insert(3, Matrix::from_i64(1, 2, &[1, 0]));
        let f = ChainMap::new(a, b, mats).unwrap();
        assert_eq!(connectivity(&f), Connectivity::Finite(3));
    }

    #[test]
    fn hofiber_of_surjection_is_the_kernel() {
        // zero-differential complexes and a degreewise surjection: the
        // long exact sequence collapses to H_n(hofiber) = ker(f)_n
        let mut ranks_a = BTreeMap::new();
        ranks_a.insert(0, 3);
        ranks_a.insert(2, 2);
        let a = ChainComplex::<Rat>::with_zero_differential(ranks_a);
        let mut ranks_b = BTreeMap::new();
        ranks_b.insert(0, 1);
        ranks_b.insert(2, 2);
        let b = ChainComplex::<Rat>::with_zero_differential(ranks_b);
        let mut mats = BTreeMap::new();
        mats.insert(0, Matrix::from_i64(1, 3, &[1, 1, -1]));
        mats.insert(2, Matrix::from_i64(2, 2, &[1, 2, 0, 1]));
        let f = ChainMap::new(a.clone(), b.clone(), mats).unwrap();
        let h = hofiber(&f).homology();
        for n in -1..4 {
            let kernel = a.rank(n) - f.mat(n).rank();
            assert_eq!(h.betti(n), kernel, "degree {n}");
        }
    }

    #[test]
    fn direct_sum_merges_torsion() {
        // order-2 and order-3 pieces combine into a single order-6
        // invariant factor
        let two = {
            let mut ranks = BTreeMap::new();
            ranks.insert(0, 1);
            ranks.insert(1, 1);
            let mut diffs = BTreeMap::new();
            diffs.insert(1, Matrix::<Int>::from_i64(1, 1, &[2]));
            ChainComplex::new(ranks, diffs, BTreeMap::new()).unwrap()
        };
        let three = {
            let mut ranks = BTreeMap::new();
            ranks.insert(0, 1);
            ranks.insert(1, 1);
            let mut diffs = BTreeMap::new();
            diffs.insert(1, Matrix::<Int>::from_i64(1, 1, &[3]));
            ChainComplex::new(ranks, diffs, BTreeMap::new()).unwrap()
        };
        let sum = ChainComplex::direct_sum(&[&two, &three]).unwrap();
        let h0 = sum.homology().group(0);
        assert_eq!(h0.rank, 0);
        assert_eq!(h0.torsion, vec![BigUint::from(6u32)]);
    }

    #[test]
    fn shift_zero_is_identity() {
        let c = sphere_like();
        assert_eq!(c.shift(0), c);
        assert_eq!(c.shift(3).shift(-3), c);
    }

    #[test]
    fn shift_moves_homology() {
        let c = ChainComplex::<Rat>::disk(1);
        assert!(c.homology().is_trivial());
        let s = c.shift(5);
        assert!(s.homology().is_trivial());
        assert_eq!(s.rank(6), 1);
    }

    #[test]
    fn direct_sum_adds_homology() {
        let a = sphere_like();
        let b = ChainComplex::<Rat>::sphere(1);
        let s = ChainComplex::direct_sum(&[&a, &b]).unwrap();
        let h = s.homology();
        assert_eq!(h.betti(0), 1);
        assert_eq!(h.betti(1), 1);
        assert_eq!(h.betti(2), 1);
    }

    #[test]
    fn tensor_of_circles() {
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 1);
        ranks.insert(1, 1);
        let circle = ChainComplex::<Rat>::with_zero_differential(ranks);
        let t = circle.tensor(&circle).unwrap();
        let h = t.homology();
        assert_eq!(h.betti(0), 1);
        assert_eq!(h.betti(1), 2);
        assert_eq!(h.betti(2), 1);
    }

    #[test]
    fn tensor_with_acyclic_is_acyclic() {
        let disk = ChainComplex::<Rat>::disk(2);
        let c = sphere_like();
        let t = disk.tensor(&c).unwrap();
        assert!(t.homology().is_trivial());
    }

    #[test]
    fn chain_map_validation() {
        // top cell of the sphere cannot map to the top cell of a disk:
        // the boundary of the image is nonzero
        let s = ChainComplex::<Rat>::sphere(1);
        let c = ChainComplex::<Rat>::disk(1);
        let mut mats = BTreeMap::new();
        mats.insert(1, Matrix::from_i64(1, 1, &[1]));
        assert!(matches!(
            ChainMap::new(s.clone(), c.clone(), mats),
            Err(Error::NotChainMap(_))
        ));
        // the zero map is fine
        assert!(ChainMap::new(s, c, BTreeMap::new()).is_ok());
    }

    #[test]
    fn euler_characteristic_of_hofiber() {
        let a: ChainComplex<Rat> = ChainComplex::concentrated(2, 1);
        let b: ChainComplex<Rat> = ChainComplex::concentrated(1, 0);
        let f = ChainMap::zero(&a, &b);
        let hf = hofiber(&f);
        assert_eq!(
            hf.euler_characteristic(),
            a.euler_characteristic() - b.euler_characteristic()
        );
    }
}
