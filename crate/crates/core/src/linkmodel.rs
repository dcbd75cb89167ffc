//! Chain models of partial configuration spaces and the derivative cubes
//! of the link-map functor.
//!
//! Points come in components; configurations forbid coincidences between
//! points of *different* components only. The model is a zero-differential
//! rational complex whose basis is the admissible edge monomials: sets of
//! edges between points of different components, directed to the later
//! endpoint in the fixed component-major order, with pairwise distinct
//! heads. A monomial with `r` edges sits in degree `(n - 1) r` where `n`
//! is the ambient dimension.
//!
//! Restrictions delete points: a monomial survives exactly when all its
//! endpoints do. An independent Poincare oracle,
//! `prod_v (1 + d(v) t^(n-1))` with `d(v)` counting the earlier points in
//! other components, guards the enumerated ranks.

use std::collections::BTreeMap;

use num::BigUint;
use num_traits::One;

use crate::chain::{ChainComplex, ChainMap, HomologySummary};
use crate::error::{Error, Result};
use crate::holim::{tfiber, CubeDiagram};
use crate::matrix::Matrix;
use crate::poset::MultiIndex;
use crate::ring::Rat;

const MAX_COMPONENTS: usize = 26;
const MIN_AMBIENT: usize = 3;

/// A configuration shape: how many points in each component, and the
/// ambient dimension (at least 3, the simply connected regime where the
/// zero-differential model is justified).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSpec {
    pub counts: Vec<usize>,
    pub ambient_dim: usize,
}

impl PointSpec {
    pub fn new(counts: Vec<usize>, ambient_dim: usize) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyMultiIndex);
        }
        if counts.len() > MAX_COMPONENTS {
            return Err(Error::TooManyComponents(counts.len()));
        }
        if ambient_dim < MIN_AMBIENT {
            return Err(Error::AmbientDimension(ambient_dim));
        }
        Ok(PointSpec {
            counts,
            ambient_dim,
        })
    }

    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for (comp, &count) in self.counts.iter().enumerate() {
            for idx in 0..count {
                out.push(Point { comp, idx });
            }
        }
        out
    }

    pub fn total_points(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// One marked point: component index and position within the component.
/// The derived order is the fixed global (component-major) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point {
    pub comp: usize,
    pub idx: usize,
}

impl Point {
    /// Labels look like `a1`, `a2`, `b1`: component letter, then the
    /// 1-based position.
    pub fn label(&self) -> String {
        let letter = (b'a' + self.comp as u8) as char;
        format!("{}{}", letter, self.idx + 1)
    }
}

/// One admissible edge, directed to the later endpoint.
pub type Edge = (Point, Point);

fn edge_label(e: &Edge) -> String {
    format!("g({},{})", e.0.label(), e.1.label())
}

fn monomial_label(m: &[Edge]) -> String {
    if m.is_empty() {
        "1".to_string()
    } else {
        m.iter().map(edge_label).collect::<Vec<_>>().join("*")
    }
}

/// Zero-differential rational model of a partial configuration space on an
/// explicit point set.
#[derive(Clone, Debug)]
pub struct LinkModel {
    points: Vec<Point>,
    ambient_dim: usize,
    monomials: BTreeMap<i64, Vec<Vec<Edge>>>,
    complex: ChainComplex<Rat>,
}

impl LinkModel {
    /// Model on all points of the spec.
    pub fn new(spec: &PointSpec) -> Result<Self> {
        Self::on_points(spec.points(), spec.ambient_dim)
    }

    /// Model on an arbitrary (sorted, distinct) point set.
    pub fn on_points(mut points: Vec<Point>, ambient_dim: usize) -> Result<Self> {
        if ambient_dim < MIN_AMBIENT {
            return Err(Error::AmbientDimension(ambient_dim));
        }
        points.sort();
        points.dedup();
        // enumerate admissible monomials: walk points in order, each point
        // optionally taking one incoming edge from an earlier point of
        // another component
        let mut monomials: Vec<Vec<Edge>> = vec![Vec::new()];
        for (i, &head) in points.iter().enumerate() {
            let tails: Vec<Point> = points[..i]
                .iter()
                .copied()
                .filter(|t| t.comp != head.comp)
                .collect();
            if tails.is_empty() {
                continue;
            }
            let mut next = Vec::with_capacity(monomials.len() * (tails.len() + 1));
            for m in &monomials {
                next.push(m.clone());
                for &tail in &tails {
                    let mut m2 = m.clone();
                    m2.push((tail, head));
                    next.push(m2);
                }
            }
            monomials = next;
        }
        let step = (ambient_dim - 1) as i64;
        let mut by_degree: BTreeMap<i64, Vec<Vec<Edge>>> = BTreeMap::new();
        for m in monomials {
            by_degree.entry(step * m.len() as i64).or_default().push(m);
        }
        let mut ranks = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for (&deg, ms) in &by_degree {
            ranks.insert(deg, ms.len());
            labels.insert(deg, ms.iter().map(|m| monomial_label(m)).collect());
        }
        let complex = ChainComplex::new(ranks, BTreeMap::new(), labels)?;
        Ok(LinkModel {
            points,
            ambient_dim,
            monomials: by_degree,
            complex,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn complex(&self) -> &ChainComplex<Rat> {
        &self.complex
    }

    pub fn monomials(&self) -> &BTreeMap<i64, Vec<Vec<Edge>>> {
        &self.monomials
    }

    /// Enumerated Poincare coefficients: rank per degree.
    pub fn poincare(&self) -> BTreeMap<i64, BigUint> {
        self.complex
            .ranks()
            .iter()
            .map(|(&d, &r)| (d, BigUint::from(r)))
            .collect()
    }

    /// Count, per degree, of the monomials whose endpoints exhaust the
    /// whole point set. These are the classes with full vertex support in
    /// the derivative cube.
    pub fn full_support_counts(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (&deg, ms) in &self.monomials {
            let count = ms
                .iter()
                .filter(|m| {
                    let mut support: Vec<Point> = m.iter().flat_map(|e| [e.0, e.1]).collect();
                    support.sort();
                    support.dedup();
                    support == self.points
                })
                .count();
            if count > 0 {
                out.insert(deg, count);
            }
        }
        out
    }
}

/// The restriction along a point deletion: a basis projection sending a
/// monomial to itself when all its endpoints survive, and to zero
/// otherwise. Always surjective.
pub fn restriction_map(from: &LinkModel, to: &LinkModel) -> Result<ChainMap<Rat>> {
    if from.ambient_dim != to.ambient_dim {
        return Err(Error::Input(
            "restriction needs a common ambient dimension".to_string(),
        ));
    }
    for p in &to.points {
        if !from.points.contains(p) {
            return Err(Error::UnknownPoint(p.label()));
        }
    }
    let mut mats = BTreeMap::new();
    for (&deg, ms) in &from.monomials {
        let rows = to.complex.rank(deg);
        let cols = ms.len();
        if rows == 0 || cols == 0 {
            continue;
        }
        let target_ms = &to.monomials[&deg];
        let mut m = Matrix::zero(rows, cols);
        for (col, mono) in ms.iter().enumerate() {
            let survives = mono
                .iter()
                .all(|e| to.points.contains(&e.0) && to.points.contains(&e.1));
            if !survives {
                continue;
            }
            let row = target_ms
                .iter()
                .position(|t| t == mono)
                .expect("surviving monomial stays admissible");
            m[(row, col)] = Rat::one();
        }
        mats.insert(deg, m);
    }
    ChainMap::new(from.complex.clone(), to.complex.clone(), mats)
}

/// The deletion cube of a point configuration: the vertex at a subset `R`
/// of the points carries the model on the complement of `R`, with the
/// restrictions as arrows. The initial vertex carries the full point set;
/// for the link-map functor its total fiber computes the mixed derivative
/// at multidegree `jvec`.
pub fn derivative_cube(jvec: &MultiIndex, ambient_dim: usize) -> Result<CubeDiagram<Rat>> {
    jvec.require_nonnegative()?;
    if jvec.total() < 1 {
        return Err(Error::Input(
            "derivative cubes need at least one point".to_string(),
        ));
    }
    let counts: Vec<usize> = jvec.entries().iter().map(|&j| j as usize).collect();
    let spec = PointSpec::new(counts, ambient_dim)?;
    let points = spec.points();

    // cube labels are the point labels; bit order is the canonical label
    // order required by the cube constructor
    let mut labels: Vec<String> = points.iter().map(Point::label).collect();
    labels.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    let point_at: Vec<Point> = labels
        .iter()
        .map(|l| {
            *points
                .iter()
                .find(|p| &p.label() == l)
                .expect("label belongs to a point")
        })
        .collect();

    let dim = points.len();
    let count = 1usize << dim;
    let mut models = Vec::with_capacity(count);
    for mask in 0..count as u32 {
        let kept: Vec<Point> = (0..dim)
            .filter(|&i| (mask >> i) & 1 == 0)
            .map(|i| point_at[i])
            .collect();
        models.push(LinkModel::on_points(kept, ambient_dim)?);
    }
    let mut arrows = BTreeMap::new();
    for s in 0..count as u32 {
        for u in 0..count as u32 {
            if s != u && s & !u == 0 {
                arrows.insert(
                    (s, u),
                    restriction_map(&models[s as usize], &models[u as usize])?,
                );
            }
        }
    }
    let vertices = models.into_iter().map(|m| m.complex).collect();
    CubeDiagram::new(labels, vertices, arrows)
}

/// Homology of the total fiber of the derivative cube: the chain-level
/// mixed derivative of the link-map functor at multidegree `jvec`.
pub fn layer_fiber_homology(jvec: &MultiIndex, ambient_dim: usize) -> Result<HomologySummary> {
    Ok(tfiber(&derivative_cube(jvec, ambient_dim)?).homology())
}

/// Independent rank oracle from the point-forgetting fibrations:
/// `prod_v (1 + d(v) t^(n-1))` over the fixed point order, where `d(v)`
/// counts earlier points in other components.
pub fn poincare_oracle(spec: &PointSpec) -> Result<BTreeMap<i64, BigUint>> {
    poincare_of_points(&spec.points(), spec.ambient_dim)
}

/// Oracle on an explicit point set (used per cube vertex).
pub fn poincare_of_points(points: &[Point], ambient_dim: usize) -> Result<BTreeMap<i64, BigUint>> {
    if ambient_dim < MIN_AMBIENT {
        return Err(Error::AmbientDimension(ambient_dim));
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup();
    let step = (ambient_dim - 1) as i64;
    let mut poly: BTreeMap<i64, BigUint> = BTreeMap::new();
    poly.insert(0, BigUint::one());
    for (i, p) in sorted.iter().enumerate() {
        let d = sorted[..i].iter().filter(|q| q.comp != p.comp).count();
        if d == 0 {
            continue;
        }
        // multiply by (1 + d t^step)
        let mut next = poly.clone();
        for (&deg, coeff) in &poly {
            let inc = coeff.clone() * BigUint::from(d);
            next.entry(deg + step)
                .and_modify(|c| *c += inc.clone())
                .or_insert(inc);
        }
        poly = next;
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Connectivity;
    use crate::holim::cartesian_degree;
    use num_traits::Zero;

    fn coeffs(map: &BTreeMap<i64, BigUint>) -> Vec<(i64, u64)> {
        map.iter()
            .map(|(&d, c)| (d, u64::try_from(c).expect("small")))
            .collect()
    }

    #[test]
    fn oracle_matches_known_polynomials() {
        let spec = PointSpec::new(vec![1, 1], 3).unwrap();
        assert_eq!(
            coeffs(&poincare_oracle(&spec).unwrap()),
            vec![(0, 1), (2, 1)]
        );
        let spec = PointSpec::new(vec![2, 1], 3).unwrap();
        assert_eq!(
            coeffs(&poincare_oracle(&spec).unwrap()),
            vec![(0, 1), (2, 2)]
        );
        let spec = PointSpec::new(vec![1, 1, 1], 3).unwrap();
        assert_eq!(
            coeffs(&poincare_oracle(&spec).unwrap()),
            vec![(0, 1), (2, 3), (4, 2)]
        );
        let spec = PointSpec::new(vec![1, 1], 4).unwrap();
        assert_eq!(
            coeffs(&poincare_oracle(&spec).unwrap()),
            vec![(0, 1), (3, 1)]
        );
        let spec = PointSpec::new(vec![2, 2], 3).unwrap();
        assert_eq!(
            coeffs(&poincare_oracle(&spec).unwrap()),
            vec![(0, 1), (2, 4), (4, 4)]
        );
        let spec = PointSpec::new(vec![0, 0], 3).unwrap();
        assert_eq!(coeffs(&poincare_oracle(&spec).unwrap()), vec![(0, 1)]);
    }

    #[test]
    fn model_ranks_match_oracle() {
        for counts in [
            vec![1, 1],
            vec![2, 1],
            vec![1, 1, 1],
            vec![2, 2],
            vec![3, 2],
        ] {
            for dim in [3, 4] {
                let spec = PointSpec::new(counts.clone(), dim).unwrap();
                let model = LinkModel::new(&spec).unwrap();
                assert_eq!(
                    model.poincare(),
                    poincare_oracle(&spec).unwrap(),
                    "counts {counts:?} dim {dim}"
                );
            }
        }
    }

    #[test]
    fn ambient_dimension_guard() {
        assert!(PointSpec::new(vec![1, 1], 2).is_err());
        assert!(LinkModel::on_points(vec![], 2).is_err());
    }

    #[test]
    fn restriction_is_basis_projection() {
        let spec = PointSpec::new(vec![2, 1], 3).unwrap();
        let full = LinkModel::new(&spec).unwrap();
        // identity case
        let id = restriction_map(&full, &full).unwrap();
        assert!(id.same_matrices(&ChainMap::identity(full.complex())));
        // delete a2
        let sub = LinkModel::on_points(
            vec![Point { comp: 0, idx: 0 }, Point { comp: 1, idx: 0 }],
            3,
        )
        .unwrap();
        let f = restriction_map(&full, &sub).unwrap();
        let m = f.mat(2);
        // source degree-2 monomials: g(a1,b1), g(a2,b1); only the first
        // survives
        let src_labels = full.complex().labels(2).unwrap();
        assert_eq!(
            src_labels,
            &vec!["g(a1,b1)".to_string(), "g(a2,b1)".to_string()]
        );
        assert_eq!(m.rows(), 1);
        assert_eq!(m.cols(), 2);
        assert_eq!(m[(0, 0)], Rat::one());
        assert!(m[(0, 1)].is_zero());
        // delete everything: the augmentation to the point model
        let point = LinkModel::on_points(vec![], 3).unwrap();
        let aug = restriction_map(&full, &point).unwrap();
        assert_eq!(aug.mat(0).rows(), 1);
        assert!(aug.mat(2).is_zero());
    }

    #[test]
    fn restrictions_are_surjective() {
        let spec = PointSpec::new(vec![2, 1], 3).unwrap();
        let full = LinkModel::new(&spec).unwrap();
        for drop in full.points() {
            let kept: Vec<Point> = full
                .points()
                .iter()
                .copied()
                .filter(|p| p != drop)
                .collect();
            let sub = LinkModel::on_points(kept, 3).unwrap();
            let f = restriction_map(&full, &sub).unwrap();
            for deg in sub.complex().degrees() {
                assert_eq!(f.mat(deg).rank(), sub.complex().rank(deg));
            }
        }
    }

    #[test]
    fn derivative_cube_shape_and_values() {
        let j = MultiIndex::new(vec![1, 1]).unwrap();
        let cube = derivative_cube(&j, 3).unwrap();
        assert_eq!(cube.dim(), 2);
        let initial = cube.vertex(0);
        assert_eq!(initial.rank(0), 1);
        assert_eq!(initial.rank(2), 1);
        // the (2,1) cube is the three-cube on points a1, a2, b1
        let j = MultiIndex::new(vec![2, 1]).unwrap();
        let cube = derivative_cube(&j, 3).unwrap();
        assert_eq!(cube.dim(), 3);
        assert_eq!(cube.labels(), ["a1", "a2", "b1"]);
        assert_eq!(cube.vertex(0).rank(2), 2);
    }

    #[test]
    fn first_mixed_derivative() {
        let j = MultiIndex::new(vec![1, 1]).unwrap();
        let h = layer_fiber_homology(&j, 3).unwrap();
        assert_eq!(h.betti(2), 1);
        assert_eq!(h.total_rank(), 1);
    }

    #[test]
    fn two_one_cube_is_cartesian() {
        let j = MultiIndex::new(vec![2, 1]).unwrap();
        let h = layer_fiber_homology(&j, 3).unwrap();
        assert!(h.is_trivial());
        let cube = derivative_cube(&j, 3).unwrap();
        assert_eq!(cartesian_degree(&cube), Connectivity::Infinite);
    }

    #[test]
    fn triple_point_derivative() {
        let j = MultiIndex::new(vec![1, 1, 1]).unwrap();
        let h = layer_fiber_homology(&j, 3).unwrap();
        assert_eq!(h.betti(4), 2);
        assert_eq!(h.total_rank(), 2);
        // independent combinatorial count: full-support monomials
        let spec = PointSpec::new(vec![1, 1, 1], 3).unwrap();
        let model = LinkModel::new(&spec).unwrap();
        let counts = model.full_support_counts();
        assert_eq!(counts.get(&4), Some(&2));
        assert_eq!(counts.len(), 1);
    }

    #[test]
    fn tfiber_rank_equals_full_support_count() {
        for (counts, dim) in [
            (vec![1, 1], 3),
            (vec![2, 1], 3),
            (vec![1, 1, 1], 3),
            (vec![1, 2], 4),
            (vec![2, 2], 3),
        ] {
            let jvec = MultiIndex::new(counts.iter().map(|&c| c as i64).collect()).unwrap();
            let h = layer_fiber_homology(&jvec, dim).unwrap();
            let model = LinkModel::new(&PointSpec::new(counts.clone(), dim).unwrap()).unwrap();
            let expected = model.full_support_counts();
            let got: BTreeMap<i64, usize> = h.betti_table();
            assert_eq!(got, expected, "counts {counts:?} dim {dim}");
            let step = (dim - 1) as i64;
            assert!(h.degrees().iter().all(|d| d % step == 0));
        }
    }
}
