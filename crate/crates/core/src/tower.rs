//! Finite Taylor-stage models over punctured products, layers as total
//! fibers of decrement cubes, and the connectivity calculators.
//!
//! Stages are never computed from the (infinite) categories of open sets:
//! a supplier hands over the finite diagram over the punctured product, with
//! ascending arrows (the restriction direction). A multidegree with a `-1`
//! entry has the zero complex as its stage.

use std::collections::{BTreeMap, BTreeSet};

use crate::chain::{connectivity, hofiber, ChainComplex, ChainMap, Connectivity};
use crate::error::{Error, Result};
use crate::holim::{comparison_map, holim, tfiber, BettiComparison, CubeDiagram, Diagram};
use crate::matrix::Matrix;
use crate::poset::{MultiIndex, MultidegreeDownset, PuncturedProduct};
use crate::ring::Ring;

/// A finite model for one Taylor stage: the supplier's diagram over the
/// punctured product and its homotopy limit.
#[derive(Clone, Debug)]
pub struct StageModel<R: Ring> {
    pub jvec: MultiIndex,
    /// Present unless the stage is degenerate. The shape is the punctured
    /// product presented contravariantly (its opposite poset), matching the
    /// ascending supplier arrows.
    pub diagram: Option<Diagram<R>>,
    pub stage: ChainComplex<R>,
}

impl<R: Ring> StageModel<R> {
    /// Degenerate stage: any `-1` entry collapses the model to zero.
    pub fn degenerate(jvec: MultiIndex) -> Self {
        StageModel {
            jvec,
            diagram: None,
            stage: ChainComplex::zero(),
        }
    }

    /// Builds the stage from supplier callbacks: one complex per tuple of
    /// nonempty subsets (masks over `{0..j_i}` per component), and one
    /// ascending map per strict containment of tuples.
    pub fn from_supplier<V, A>(jvec: &MultiIndex, mut value_of: V, mut arrow_of: A) -> Result<Self>
    where
        V: FnMut(&[u64]) -> Result<ChainComplex<R>>,
        A: FnMut(&[u64], &[u64]) -> Result<ChainMap<R>>,
    {
        if !jvec.is_nonnegative() {
            return Ok(Self::degenerate(jvec.clone()));
        }
        let pp = PuncturedProduct::new(jvec)?;
        let n = pp.poset.len();
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            values.push(value_of(pp.tuple_of(i))?);
        }
        let mut arrows_up = BTreeMap::new();
        for lo in 0..n {
            for hi in 0..n {
                if lo != hi && pp.poset.leq(lo, hi) {
                    arrows_up.insert((lo, hi), arrow_of(pp.tuple_of(lo), pp.tuple_of(hi))?);
                }
            }
        }
        let diagram = Diagram::from_ascending(&pp.poset, values, arrows_up)?;
        let stage = holim(&diagram);
        Ok(StageModel {
            jvec: jvec.clone(),
            diagram: Some(diagram),
            stage,
        })
    }

    /// Wraps a pre-assembled diagram (shape must be the contravariant
    /// presentation of the punctured product for `jvec`).
    pub fn from_diagram(jvec: &MultiIndex, diagram: Diagram<R>) -> Result<Self> {
        if !jvec.is_nonnegative() {
            return Ok(Self::degenerate(jvec.clone()));
        }
        let pp = PuncturedProduct::new(jvec)?;
        if diagram.shape() != &pp.poset.opposite() {
            return Err(Error::WrongShape(format!(
                "stage diagram must live over the punctured product for {jvec}"
            )));
        }
        let stage = holim(&diagram);
        Ok(StageModel {
            jvec: jvec.clone(),
            diagram: Some(diagram),
            stage,
        })
    }
}

/// A tower of stages below a fixed multidegree: a contravariant diagram
/// over the full multidegree downset, arrows from higher stages to lower.
#[derive(Clone, Debug)]
pub struct TowerDiagram<R: Ring> {
    pub jvec: MultiIndex,
    pub downset: MultidegreeDownset,
    pub diagram: Diagram<R>,
}

impl<R: Ring> TowerDiagram<R> {
    pub fn new(jvec: &MultiIndex, diagram: Diagram<R>) -> Result<Self> {
        jvec.require_nonnegative()?;
        let downset = MultidegreeDownset::new(jvec, false)?;
        if diagram.shape() != &downset.poset {
            return Err(Error::WrongShape(format!(
                "tower diagram must live over the multidegree downset of {jvec}"
            )));
        }
        Ok(TowerDiagram {
            jvec: jvec.clone(),
            downset,
            diagram,
        })
    }

    /// The stage at a multidegree of the downset; zero for degenerate
    /// multidegrees (negative entries).
    pub fn stage(&self, k: &MultiIndex) -> Result<ChainComplex<R>> {
        if !k.is_nonnegative() {
            return Ok(ChainComplex::zero());
        }
        let idx = self
            .downset
            .element_of(k)
            .ok_or_else(|| Error::UnknownElement(k.id()))?;
        Ok(self.diagram.value(idx).clone())
    }
}

/// A homogeneous layer model: the decrement cube over the coordinate
/// directions and its total fiber.
#[derive(Clone, Debug)]
pub struct LayerModel<R: Ring> {
    pub jvec: MultiIndex,
    pub cube: CubeDiagram<R>,
    pub layer: ChainComplex<R>,
}

/// Direction labels for the decrement cube, canonically sorted, together
/// with the coordinate each bit refers to.
fn direction_labels(m: usize) -> (Vec<String>, Vec<usize>) {
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| {
        let l = (i + 1).to_string();
        (l.len(), l)
    });
    let labels = order.iter().map(|&i| (i + 1).to_string()).collect();
    (labels, order)
}

/// Builds the layer of the tower at its top multidegree: the total fiber
/// of the cube whose vertex at a coordinate set `R` is the stage at the
/// multidegree decremented on `R`.
pub fn layer_model<R: Ring>(tower: &TowerDiagram<R>) -> Result<LayerModel<R>> {
    let jvec = &tower.jvec;
    let m = jvec.len();
    let (labels, direction) = direction_labels(m);
    let count = 1usize << m;
    let mut degrees: Vec<MultiIndex> = Vec::with_capacity(count);
    let mut vertices: Vec<ChainComplex<R>> = Vec::with_capacity(count);
    for mask in 0..count as u32 {
        let r: BTreeSet<usize> = (0..m)
            .filter(|&bit| (mask >> bit) & 1 == 1)
            .map(|bit| direction[bit])
            .collect();
        let jr = jvec.decrement_on(&r)?;
        vertices.push(tower.stage(&jr)?);
        degrees.push(jr);
    }
    let mut arrows = BTreeMap::new();
    for s in 0..count as u32 {
        for u in 0..count as u32 {
            if s == u || s & !u != 0 {
                continue;
            }
            let (js, ju) = (&degrees[s as usize], &degrees[u as usize]);
            let map = if !ju.is_nonnegative() {
                ChainMap::zero(&vertices[s as usize], &vertices[u as usize])
            } else {
                // tower arrow from the higher stage js down to ju
                let lo = tower.downset.element_of(ju).expect("in the downset");
                let hi = tower.downset.element_of(js).expect("in the downset");
                tower.diagram.arrow(lo, hi)
            };
            arrows.insert((s, u), map);
        }
    }
    let cube = CubeDiagram::new(labels, vertices, arrows)?;
    let layer = tfiber(&cube);
    Ok(LayerModel {
        jvec: jvec.clone(),
        cube,
        layer,
    })
}

/// Compares the two descriptions of the layer: the homotopy fiber of
/// `stage(jvec) -> holim over the strictly smaller stages`, against the
/// total fiber of the decrement cube. Betti tables per degree.
pub fn verify_layer_poset_equivalence<R: Ring>(tower: &TowerDiagram<R>) -> Result<BettiComparison> {
    let top_idx = tower
        .downset
        .element_of(&tower.jvec)
        .expect("top of the downset");
    let strict: Vec<usize> = (0..tower.downset.poset.len())
        .filter(|&i| i != top_idx)
        .collect();
    let sub = tower.diagram.restrict(&strict);
    let apex = tower.diagram.value(top_idx).clone();
    let legs: Vec<ChainMap<R>> = strict
        .iter()
        .map(|&orig| tower.diagram.arrow(orig, top_idx))
        .collect();
    let cmp_map = comparison_map(&apex, &sub, &legs)?;
    let left = hofiber(&cmp_map).homology().betti_table();
    let right = layer_model(tower)?.layer.homology().betti_table();
    Ok(BettiComparison { left, right })
}

/// The stage-convergence estimate: a map into the `k`-th stage over a
/// handle-dimension-`h` source in ambient dimension `n` is
/// `k (n - h - 2) + 1 - h` connected.
pub fn gk_connectivity(k: i64, handle: i64, n: i64) -> i64 {
    k * (n - handle - 2) + 1 - handle
}

/// The estimates stop improving in `k` exactly when the slope
/// `n - handle - 2` vanishes or turns negative.
pub fn gk_converges(handle: i64, n: i64) -> bool {
    n - handle - 2 > 0
}

/// Connectivity bounds for one variable of the multivariable tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableBounds {
    /// `j_i (n - p_i - 2) + 1 - p_i`: the in-variable stage estimate.
    pub stage: i64,
    /// `(j_i + 1)(n - p_i - 2) + 1 - p_l` for each other variable `l`: the
    /// estimates for the fibers over the remaining variables.
    pub cross: Vec<i64>,
    /// False when the slope `n - p_i - 2` vanishes: the bounds stagnate
    /// in `j_i`.
    pub converges: bool,
}

/// Per-variable connectivity estimates used in the convergence argument
/// for the multivariable tower.
pub fn multi_convergence_bounds(
    jvec: &MultiIndex,
    pvec: &[i64],
    n: i64,
) -> Result<Vec<VariableBounds>> {
    if jvec.len() != pvec.len() {
        return Err(Error::LengthMismatch(jvec.len(), pvec.len()));
    }
    jvec.require_nonnegative()?;
    let m = jvec.len();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let (j, p) = (jvec.entry(i), pvec[i]);
        let slope = n - p - 2;
        let cross = (0..m)
            .filter(|&l| l != i)
            .map(|l| (j + 1) * slope + 1 - pvec[l])
            .collect();
        out.push(VariableBounds {
            stage: j * slope + 1 - p,
            cross,
            converges: slope > 0,
        });
    }
    Ok(out)
}

/// A chain functor of controlled degree over the deletion multicube: the
/// direct sum, over pieces `(T, W)`, of the summand that survives at a
/// deletion tuple `S` exactly when `S` avoids `T` in every component. A
/// piece whose `T_i` exhausts some component `[j_i]` raises the degree
/// beyond `jvec`; all other pieces stay within degree `jvec`.
#[derive(Clone, Debug)]
pub struct PieceFunctor<R: Ring> {
    pub jvec: MultiIndex,
    pieces: Vec<(Vec<u64>, ChainComplex<R>)>,
}

impl<R: Ring> PieceFunctor<R> {
    pub fn new(jvec: &MultiIndex, pieces: Vec<(Vec<u64>, ChainComplex<R>)>) -> Result<Self> {
        jvec.require_nonnegative()?;
        for (t, _) in &pieces {
            if t.len() != jvec.len() {
                return Err(Error::LengthMismatch(t.len(), jvec.len()));
            }
            for (i, &mask) in t.iter().enumerate() {
                if mask >= 1u64 << (jvec.entry(i) + 1) {
                    return Err(Error::Input(format!(
                        "piece mask {mask:#b} out of range in component {i}"
                    )));
                }
            }
        }
        Ok(PieceFunctor {
            jvec: jvec.clone(),
            pieces,
        })
    }

    /// True when every piece leaves at least one interval free in every
    /// component, which is the degree-`jvec` condition.
    pub fn within_degree(&self) -> bool {
        self.pieces.iter().all(|(t, _)| {
            t.iter()
                .enumerate()
                .all(|(i, &mask)| mask != (1u64 << (self.jvec.entry(i) + 1)) - 1)
        })
    }

    fn survivors(&self, tuple: &[u64]) -> Vec<usize> {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, (t, _))| t.iter().zip(tuple).all(|(&ti, &si)| ti & si == 0))
            .map(|(i, _)| i)
            .collect()
    }

    fn value_at(&self, tuple: &[u64]) -> Result<ChainComplex<R>> {
        let keep = self.survivors(tuple);
        let parts: Vec<&ChainComplex<R>> = keep.iter().map(|&i| &self.pieces[i].1).collect();
        ChainComplex::direct_sum(&parts)
    }

    fn projection(&self, from: &[u64], to: &[u64]) -> Result<ChainMap<R>> {
        let src_keep = self.survivors(from);
        let dst_keep = self.survivors(to);
        let src = self.value_at(from)?;
        let dst = self.value_at(to)?;
        let mut mats = BTreeMap::new();
        let degrees: Vec<i64> = src.degrees().collect();
        for n in degrees {
            let rows = dst.rank(n);
            let cols = src.rank(n);
            if rows == 0 || cols == 0 {
                continue;
            }
            let mut m = Matrix::zero(rows, cols);
            let mut col0 = 0usize;
            for &piece in &src_keep {
                let r = self.pieces[piece].1.rank(n);
                if let Some(pos) = dst_keep.iter().position(|&q| q == piece) {
                    let row0: usize = dst_keep[..pos]
                        .iter()
                        .map(|&q| self.pieces[q].1.rank(n))
                        .sum();
                    for j in 0..r {
                        m[(row0 + j, col0 + j)] = R::one();
                    }
                }
                col0 += r;
            }
            mats.insert(n, m);
        }
        ChainMap::new(src, dst, mats)
    }

    /// The functor value at the empty deletion tuple.
    pub fn value(&self) -> Result<ChainComplex<R>> {
        let empty = vec![0u64; self.jvec.len()];
        self.value_at(&empty)
    }

    /// The stage model built from this functor's punctured diagram.
    pub fn stage(&self) -> Result<StageModel<R>> {
        StageModel::from_supplier(
            &self.jvec,
            |tuple| self.value_at(tuple),
            |from, to| self.projection(from, to),
        )
    }

    /// Connectivity of the comparison map from the functor value into its
    /// stage: infinite exactly when the functor has degree at most `jvec`
    /// (given pieces with nontrivial homology).
    pub fn comparison_connectivity(&self) -> Result<Connectivity> {
        let stage = self.stage()?;
        let diagram = stage.diagram.as_ref().expect("nonnegative multidegree");
        let apex = self.value()?;
        let pp = PuncturedProduct::new(&self.jvec)?;
        let empty = vec![0u64; self.jvec.len()];
        let legs: Vec<ChainMap<R>> = (0..pp.poset.len())
            .map(|i| self.projection(&empty, pp.tuple_of(i)))
            .collect::<Result<_>>()?;
        let cmp = comparison_map(&apex, diagram, &legs)?;
        Ok(connectivity(&cmp))
    }
}
