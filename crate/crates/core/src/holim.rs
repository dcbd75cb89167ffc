//! Homotopy limits of diagrams of chain complexes over finite posets, and
//! the cube calculus built on them.
//!
//! The homotopy limit is the total complex of the strict-chain nerve double
//! complex. For a diagram with arrows `value(q') -> value(q)` whenever
//! `q <= q'` in the shape:
//!
//! * cochain level `p` is the sum over strict chains `q_0 < ... < q_p` of
//!   `value(q_0)`;
//! * the coface is the alternating sum over single insertions, with the
//!   structure map `arrow(q_0 <= q_1)` applied on the 0th face;
//! * total degree `t` collects the level-`p` pieces in internal degree
//!   `t + p`, and the total differential is `d_value + (-1)^t delta`.
//!
//! These sign conventions are pinned; every assembled complex revalidates
//! `d o d = 0` on construction.
//!
//! A cubical diagram is covariant (arrows from smaller to larger subsets,
//! the initial vertex mapping outward). Its total fiber is the homotopy
//! fiber of the comparison map from the initial vertex into the homotopy
//! limit of the punctured cube, and the cartesian degree is the
//! connectivity of that comparison map.

use std::collections::BTreeMap;

use crate::chain::{connectivity, hofiber, ChainComplex, ChainMap, Connectivity};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poset::{reverse_inclusion_poset, subset_id, FinitePoset, IdealCover, ProductPoset};
use crate::ring::Ring;

/// Largest cube dimension accepted for totalization; nerve sizes grow like
/// ordered set partitions and become unusable well before masks overflow.
pub const MAX_CUBE_DIM: usize = 12;

fn same_underlying<R: Ring>(a: &ChainComplex<R>, b: &ChainComplex<R>) -> bool {
    a.ranks() == b.ranks() && a.diffs() == b.diffs()
}

/// A contravariant diagram of chain complexes over a finite poset: one
/// complex per element and one chain map `value(hi) -> value(lo)` for every
/// strict pair `lo < hi`. Identity self-arrows are implicit; functoriality
/// is checked exhaustively on construction.
#[derive(Clone)]
pub struct Diagram<R: Ring> {
    shape: FinitePoset,
    values: Vec<ChainComplex<R>>,
    arrows: BTreeMap<(usize, usize), ChainMap<R>>,
}

impl<R: Ring> std::fmt::Debug for Diagram<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Diagram[{}] over {} elements", R::NAME, self.shape.len())
    }
}

impl<R: Ring> Diagram<R> {
    pub fn new(
        shape: FinitePoset,
        values: Vec<ChainComplex<R>>,
        arrows: BTreeMap<(usize, usize), ChainMap<R>>,
    ) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::LengthMismatch(values.len(), shape.len()));
        }
        let n = shape.len();
        for lo in 0..n {
            for hi in 0..n {
                if lo != hi && shape.leq(lo, hi) {
                    let arrow = arrows.get(&(lo, hi)).ok_or_else(|| {
                        Error::MissingArrow(shape.id(lo).to_string(), shape.id(hi).to_string())
                    })?;
                    if !same_underlying(arrow.source(), &values[hi])
                        || !same_underlying(arrow.target(), &values[lo])
                    {
                        return Err(Error::ArrowEndpoints(
                            shape.id(lo).to_string(),
                            shape.id(hi).to_string(),
                        ));
                    }
                }
            }
        }
        for &(lo, hi) in arrows.keys() {
            if lo == hi || !shape.lt(lo, hi) {
                return Err(Error::Input(format!(
                    "arrow for unrelated pair `{}`, `{}`",
                    shape.id(lo),
                    shape.id(hi)
                )));
            }
        }
        let diagram = Diagram {
            shape,
            values,
            arrows,
        };
        diagram.check_functorial()?;
        Ok(diagram)
    }

    fn check_functorial(&self) -> Result<()> {
        let n = self.shape.len();
        for lo in 0..n {
            for mid in 0..n {
                if !(self.shape.lt(lo, mid)) {
                    continue;
                }
                for hi in 0..n {
                    if !(self.shape.lt(mid, hi)) {
                        continue;
                    }
                    let left = self.arrows[&(lo, mid)].compose(&self.arrows[&(mid, hi)])?;
                    if !left.same_matrices(&self.arrows[&(lo, hi)]) {
                        return Err(Error::NotFunctorial(
                            self.shape.id(lo).to_string(),
                            self.shape.id(mid).to_string(),
                            self.shape.id(hi).to_string(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds a diagram from ascending data over `shape`: maps
    /// `arrows_up[(lo, hi)] : value(lo) -> value(hi)` for `lo < hi`. The
    /// stored shape is the opposite poset, which presents the same data
    /// contravariantly.
    pub fn from_ascending(
        shape: &FinitePoset,
        values: Vec<ChainComplex<R>>,
        arrows_up: BTreeMap<(usize, usize), ChainMap<R>>,
    ) -> Result<Self> {
        let op = shape.opposite();
        let arrows = arrows_up
            .into_iter()
            .map(|((lo, hi), m)| ((hi, lo), m))
            .collect();
        Diagram::new(op, values, arrows)
    }

    pub fn constant(shape: FinitePoset, value: ChainComplex<R>) -> Self {
        let mut arrows = BTreeMap::new();
        for lo in 0..shape.len() {
            for hi in 0..shape.len() {
                if lo != hi && shape.leq(lo, hi) {
                    arrows.insert((lo, hi), ChainMap::identity(&value));
                }
            }
        }
        let values = vec![value; shape.len()];
        Diagram {
            shape,
            values,
            arrows,
        }
    }

    pub fn shape(&self) -> &FinitePoset {
        &self.shape
    }

    pub fn value(&self, i: usize) -> &ChainComplex<R> {
        &self.values[i]
    }

    pub fn values(&self) -> &[ChainComplex<R>] {
        &self.values
    }

    /// The arrow `value(hi) -> value(lo)`; identity when `lo == hi`.
    pub fn arrow(&self, lo: usize, hi: usize) -> ChainMap<R> {
        if lo == hi {
            ChainMap::identity(&self.values[lo])
        } else {
            self.arrows[&(lo, hi)].clone()
        }
    }

    pub fn arrows(&self) -> &BTreeMap<(usize, usize), ChainMap<R>> {
        &self.arrows
    }

    /// Induced diagram on a subset of elements (indices into the shape,
    /// strictly increasing).
    pub fn restrict(&self, indices: &[usize]) -> Diagram<R> {
        let shape = self.shape.induced(indices);
        let values = indices.iter().map(|&i| self.values[i].clone()).collect();
        let mut arrows = BTreeMap::new();
        for (a, &ia) in indices.iter().enumerate() {
            for (b, &ib) in indices.iter().enumerate() {
                if a != b && self.shape.leq(ia, ib) {
                    arrows.insert((a, b), self.arrows[&(ia, ib)].clone());
                }
            }
        }
        Diagram {
            shape,
            values,
            arrows,
        }
    }
}

/// Strict chains of the shape, grouped by length, each ascending and in
/// lexicographic order; the summand of a chain is the value at its least
/// element.
struct Nerve {
    /// `chains[p]` lists the `p`-chains (length `p + 1`).
    chains: Vec<Vec<Vec<usize>>>,
    index: BTreeMap<Vec<usize>, (usize, usize)>,
}

impl Nerve {
    fn new(shape: &FinitePoset) -> Self {
        let mut chains: Vec<Vec<Vec<usize>>> = Vec::new();
        for c in shape.strict_chains() {
            let p = c.len() - 1;
            while chains.len() <= p {
                chains.push(Vec::new());
            }
            chains[p].push(c);
        }
        for cs in chains.iter_mut() {
            cs.sort();
        }
        let mut index = BTreeMap::new();
        for (p, cs) in chains.iter().enumerate() {
            for (ci, c) in cs.iter().enumerate() {
                index.insert(c.clone(), (p, ci));
            }
        }
        Nerve { chains, index }
    }
}

/// One block of a total degree: `(p, chain index, internal degree,
/// offset, rank)`.
type Summand = (usize, usize, i64, usize, usize);

/// Layout of the totalization: for each total degree, the list of summands.
struct TotLayout {
    ranks: BTreeMap<i64, usize>,
    summands: BTreeMap<i64, Vec<Summand>>,
    offsets: BTreeMap<(i64, usize, usize), usize>,
}

impl TotLayout {
    fn new<R: Ring>(d: &Diagram<R>, nerve: &Nerve) -> Self {
        let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
        let mut summands: BTreeMap<i64, Vec<Summand>> = BTreeMap::new();
        let mut offsets = BTreeMap::new();
        // collect total degrees
        let mut degrees: Vec<i64> = Vec::new();
        for (p, cs) in nerve.chains.iter().enumerate() {
            for c in cs {
                for internal in d.values[c[0]].degrees() {
                    degrees.push(internal - p as i64);
                }
            }
        }
        degrees.sort_unstable();
        degrees.dedup();
        for &t in &degrees {
            let mut offset = 0;
            let mut list = Vec::new();
            for (p, cs) in nerve.chains.iter().enumerate() {
                let internal = t + p as i64;
                for (ci, c) in cs.iter().enumerate() {
                    let rank = d.values[c[0]].rank(internal);
                    if rank == 0 {
                        continue;
                    }
                    offsets.insert((t, p, ci), offset);
                    list.push((p, ci, internal, offset, rank));
                    offset += rank;
                }
            }
            if offset > 0 {
                ranks.insert(t, offset);
                summands.insert(t, list);
            }
        }
        TotLayout {
            ranks,
            summands,
            offsets,
        }
    }

    fn rank(&self, t: i64) -> usize {
        self.ranks.get(&t).copied().unwrap_or(0)
    }
}

/// Positions at which `e` can be inserted into the ascending chain `c`
/// while keeping it a strict chain. At most one position qualifies.
fn insertion_position(shape: &FinitePoset, c: &[usize], e: usize) -> Option<usize> {
    if c.contains(&e) {
        return None;
    }
    for pos in 0..=c.len() {
        let below_ok = pos == 0 || shape.lt(c[pos - 1], e);
        let above_ok = pos == c.len() || shape.lt(e, c[pos]);
        if below_ok && above_ok {
            return Some(pos);
        }
    }
    None
}

/// The homotopy limit of a diagram: the total complex described in the
/// module docs.
pub fn holim<R: Ring>(d: &Diagram<R>) -> ChainComplex<R> {
    let nerve = Nerve::new(d.shape());
    let layout = TotLayout::new(d, &nerve);
    holim_with(d, &nerve, &layout)
}

fn holim_with<R: Ring>(d: &Diagram<R>, nerve: &Nerve, layout: &TotLayout) -> ChainComplex<R> {
    let shape = d.shape();
    let mut diffs = BTreeMap::new();
    for (&t, list) in &layout.summands {
        let rows = layout.rank(t - 1);
        let cols = layout.rank(t);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zero(rows, cols);
        let negate = t.rem_euclid(2) == 1;
        for &(p, ci, internal, col0, rank) in list {
            let c = &nerve.chains[p][ci];
            // value differential, same chain, internal degree drops
            let dv = d.values[c[0]].diff(internal);
            if dv.rows() > 0 {
                if let Some(&row0) = layout.offsets.get(&(t - 1, p, ci)) {
                    for i in 0..dv.rows() {
                        for j in 0..dv.cols() {
                            if dv[(i, j)].is_zero() {
                                continue;
                            }
                            m[(row0 + i, col0 + j)] = dv[(i, j)].clone();
                        }
                    }
                }
            }
            // coface: insert one element into the chain
            for e in 0..shape.len() {
                let Some(pos) = insertion_position(shape, c, e) else {
                    continue;
                };
                let mut c2 = c.clone();
                c2.insert(pos, e);
                let &(p2, ci2) = nerve.index.get(&c2).expect("inserted chain exists");
                debug_assert_eq!(p2, p + 1);
                let Some(&row0) = layout.offsets.get(&(t - 1, p2, ci2)) else {
                    continue;
                };
                let flip = negate != (pos % 2 == 1);
                if pos == 0 {
                    // structure map value(c[0]) -> value(e)
                    let mat = d.arrow(e, c[0]).mat(internal);
                    for i in 0..mat.rows() {
                        for j in 0..mat.cols() {
                            if mat[(i, j)].is_zero() {
                                continue;
                            }
                            let v = if flip {
                                -mat[(i, j)].clone()
                            } else {
                                mat[(i, j)].clone()
                            };
                            let cur = m[(row0 + i, col0 + j)].clone();
                            m[(row0 + i, col0 + j)] = cur + v;
                        }
                    }
                } else {
                    // identity block, signed
                    for j in 0..rank {
                        let v = if flip { -R::one() } else { R::one() };
                        let cur = m[(row0 + j, col0 + j)].clone();
                        m[(row0 + j, col0 + j)] = cur + v;
                    }
                }
            }
        }
        diffs.insert(t, m);
    }
    ChainComplex::new(layout.ranks.clone(), diffs, BTreeMap::new())
        .expect("totalization differential must square to zero")
}

/// The chain map between homotopy limits induced by a natural
/// transformation (one leg per shape element, commuting with both
/// diagrams' arrows).
pub fn holim_map<R: Ring>(
    from: &Diagram<R>,
    to: &Diagram<R>,
    legs: &[ChainMap<R>],
) -> Result<ChainMap<R>> {
    if from.shape() != to.shape() {
        return Err(Error::WrongShape(
            "natural transformations need a common shape".to_string(),
        ));
    }
    let shape = from.shape();
    if legs.len() != shape.len() {
        return Err(Error::LengthMismatch(legs.len(), shape.len()));
    }
    for (q, leg) in legs.iter().enumerate() {
        if !same_underlying(leg.source(), from.value(q))
            || !same_underlying(leg.target(), to.value(q))
        {
            return Err(Error::ArrowEndpoints(
                shape.id(q).to_string(),
                "leg".to_string(),
            ));
        }
    }
    for lo in 0..shape.len() {
        for hi in 0..shape.len() {
            if lo != hi && shape.leq(lo, hi) {
                let via_to = to.arrow(lo, hi).compose(&legs[hi])?;
                let via_from = legs[lo].compose(&from.arrow(lo, hi))?;
                if !via_to.same_matrices(&via_from) {
                    return Err(Error::NotACone(
                        shape.id(lo).to_string(),
                        shape.id(hi).to_string(),
                    ));
                }
            }
        }
    }
    let nerve = Nerve::new(shape);
    let from_layout = TotLayout::new(from, &nerve);
    let to_layout = TotLayout::new(to, &nerve);
    let mut mats = BTreeMap::new();
    for (&t, list) in &from_layout.summands {
        let rows = to_layout.rank(t);
        let cols = from_layout.rank(t);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zero(rows, cols);
        for &(p, ci, internal, col0, _) in list {
            let c = &nerve.chains[p][ci];
            let Some(&row0) = to_layout.offsets.get(&(t, p, ci)) else {
                continue;
            };
            let block = legs[c[0]].mat(internal);
            m.set_block(row0, col0, &block);
        }
        mats.insert(t, m);
    }
    ChainMap::new(
        holim_with(from, &nerve, &from_layout),
        holim_with(to, &nerve, &to_layout),
        mats,
    )
}

/// The comparison map from an apex into the homotopy limit of a diagram,
/// given a strict cone (legs commuting with all diagram arrows).
pub fn comparison_map<R: Ring>(
    apex: &ChainComplex<R>,
    d: &Diagram<R>,
    legs: &[ChainMap<R>],
) -> Result<ChainMap<R>> {
    let shape = d.shape();
    if legs.len() != shape.len() {
        return Err(Error::LengthMismatch(legs.len(), shape.len()));
    }
    for (q, leg) in legs.iter().enumerate() {
        if !same_underlying(leg.source(), apex) || !same_underlying(leg.target(), d.value(q)) {
            return Err(Error::ArrowEndpoints(
                shape.id(q).to_string(),
                "leg".to_string(),
            ));
        }
    }
    for lo in 0..shape.len() {
        for hi in 0..shape.len() {
            if lo != hi && shape.leq(lo, hi) {
                let through = d.arrow(lo, hi).compose(&legs[hi])?;
                if !through.same_matrices(&legs[lo]) {
                    return Err(Error::NotACone(
                        shape.id(lo).to_string(),
                        shape.id(hi).to_string(),
                    ));
                }
            }
        }
    }
    let nerve = Nerve::new(shape);
    let layout = TotLayout::new(d, &nerve);
    let tot = holim_with(d, &nerve, &layout);
    let mut mats = BTreeMap::new();
    let degrees: Vec<i64> = apex.degrees().collect();
    for &t in &degrees {
        let rows = layout.rank(t);
        let cols = apex.rank(t);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zero(rows, cols);
        for (ci, c) in nerve.chains[0].iter().enumerate() {
            let Some(&row0) = layout.offsets.get(&(t, 0, ci)) else {
                continue;
            };
            m.set_block(row0, 0, &legs[c[0]].mat(t));
        }
        mats.insert(t, m);
    }
    ChainMap::new(apex.clone(), tot, mats)
}

/// The projection `holim(D) -> holim(D restricted to a subposet)`; on the
/// nerve it kills the chains leaving the subposet.
pub fn restriction_map<R: Ring>(d: &Diagram<R>, indices: &[usize]) -> Result<ChainMap<R>> {
    let sub = d.restrict(indices);
    let nerve = Nerve::new(d.shape());
    let layout = TotLayout::new(d, &nerve);
    let sub_nerve = Nerve::new(sub.shape());
    let sub_layout = TotLayout::new(&sub, &sub_nerve);
    let mut mats = BTreeMap::new();
    for (&t, list) in &sub_layout.summands {
        let rows = sub_layout.rank(t);
        let cols = layout.rank(t);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zero(rows, cols);
        for &(p, ci, _internal, row0, rank) in list {
            // translate the subchain into ambient indices
            let ambient: Vec<usize> = sub_nerve.chains[p][ci]
                .iter()
                .map(|&k| indices[k])
                .collect();
            let &(ap, aci) = nerve.index.get(&ambient).expect("subchain is a chain");
            let Some(&col0) = layout.offsets.get(&(t, ap, aci)) else {
                continue;
            };
            for j in 0..rank {
                m[(row0 + j, col0 + j)] = R::one();
            }
        }
        mats.insert(t, m);
    }
    ChainMap::new(
        holim_with(d, &nerve, &layout),
        holim_with(&sub, &sub_nerve, &sub_layout),
        mats,
    )
}

/// Iterated homotopy limit over an explicit product presentation: first
/// along the left factor slice by slice, then along the right factor.
/// Quasi-isomorphic to the one-shot homotopy limit.
pub fn holim_iterated<R: Ring>(d: &Diagram<R>, prod: &ProductPoset) -> Result<ChainComplex<R>> {
    if d.shape() != &prod.poset {
        return Err(Error::WrongShape(
            "diagram shape is not the given product".to_string(),
        ));
    }
    let nl = prod.left.len();
    let nr = prod.right.len();
    // slice diagrams over the left factor, one per right element
    let mut slices: Vec<Diagram<R>> = Vec::with_capacity(nr);
    for ri in 0..nr {
        let values: Vec<ChainComplex<R>> = (0..nl)
            .map(|li| d.value(prod.pair_index(li, ri)).clone())
            .collect();
        let mut arrows = BTreeMap::new();
        for lo in 0..nl {
            for hi in 0..nl {
                if lo != hi && prod.left.leq(lo, hi) {
                    arrows.insert(
                        (lo, hi),
                        d.arrow(prod.pair_index(lo, ri), prod.pair_index(hi, ri)),
                    );
                }
            }
        }
        slices.push(Diagram::new(prod.left.clone(), values, arrows)?);
    }
    // outer diagram over the right factor
    let outer_values: Vec<ChainComplex<R>> = slices.iter().map(holim).collect();
    let mut outer_arrows = BTreeMap::new();
    for lo in 0..nr {
        for hi in 0..nr {
            if lo != hi && prod.right.leq(lo, hi) {
                let legs: Vec<ChainMap<R>> = (0..nl)
                    .map(|li| d.arrow(prod.pair_index(li, lo), prod.pair_index(li, hi)))
                    .collect();
                outer_arrows.insert((lo, hi), holim_map(&slices[hi], &slices[lo], &legs)?);
            }
        }
    }
    let outer = Diagram::new(prod.right.clone(), outer_values, outer_arrows)?;
    Ok(holim(&outer))
}

/// A cube split along one direction: the face without it, the face with
/// it, and one connecting map per face vertex.
pub type FaceSplit<R> = (CubeDiagram<R>, CubeDiagram<R>, Vec<ChainMap<R>>);

/// A covariant cubical diagram: vertices indexed by subsets of a label set,
/// arrows from smaller to larger subsets, functorial.
#[derive(Clone)]
pub struct CubeDiagram<R: Ring> {
    labels: Vec<String>,
    vertices: Vec<ChainComplex<R>>,
    arrows: BTreeMap<(u32, u32), ChainMap<R>>,
}

impl<R: Ring> std::fmt::Debug for CubeDiagram<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CubeDiagram[{}] dim {}", R::NAME, self.dim())
    }
}

impl<R: Ring> CubeDiagram<R> {
    /// `vertices[mask]` is the value at the subset encoded by `mask` over
    /// the (canonically sorted) labels; `arrows[(s, u)]` maps
    /// `vertex(s) -> vertex(u)` for each strict pair `s` properly contained
    /// in `u`.
    pub fn new(
        labels: Vec<String>,
        vertices: Vec<ChainComplex<R>>,
        arrows: BTreeMap<(u32, u32), ChainMap<R>>,
    ) -> Result<Self> {
        let dim = labels.len();
        if dim > MAX_CUBE_DIM {
            return Err(Error::CubeTooLarge(dim, MAX_CUBE_DIM));
        }
        for w in labels.windows(2) {
            if (w[0].len(), &w[0]) >= (w[1].len(), &w[1]) {
                return Err(Error::Input(format!(
                    "cube labels must be canonically sorted and distinct, got `{}`, `{}`",
                    w[0], w[1]
                )));
            }
        }
        let count = 1usize << dim;
        if vertices.len() != count {
            return Err(Error::LengthMismatch(vertices.len(), count));
        }
        let full = (count - 1) as u32;
        for s in 0..=full {
            for u in 0..=full {
                if s != u && s & !u == 0 {
                    let arrow = arrows.get(&(s, u)).ok_or_else(|| {
                        Error::MissingArrow(
                            subset_id(&labels, s as u64),
                            subset_id(&labels, u as u64),
                        )
                    })?;
                    if !same_underlying(arrow.source(), &vertices[s as usize])
                        || !same_underlying(arrow.target(), &vertices[u as usize])
                    {
                        return Err(Error::ArrowEndpoints(
                            subset_id(&labels, s as u64),
                            subset_id(&labels, u as u64),
                        ));
                    }
                }
            }
        }
        let cube = CubeDiagram {
            labels,
            vertices,
            arrows,
        };
        cube.check_functorial()?;
        Ok(cube)
    }

    fn check_functorial(&self) -> Result<()> {
        let full = self.full_mask();
        for s in 0..=full {
            for m in 0..=full {
                if s == m || s & !m != 0 {
                    continue;
                }
                for u in 0..=full {
                    if m == u || m & !u != 0 {
                        continue;
                    }
                    let two_step = self.arrows[&(m, u)].compose(&self.arrows[&(s, m)])?;
                    if !two_step.same_matrices(&self.arrows[&(s, u)]) {
                        return Err(Error::NotFunctorial(
                            subset_id(&self.labels, s as u64),
                            subset_id(&self.labels, m as u64),
                            subset_id(&self.labels, u as u64),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn full_mask(&self) -> u32 {
        ((1usize << self.dim()) - 1) as u32
    }

    pub fn vertex(&self, mask: u32) -> &ChainComplex<R> {
        &self.vertices[mask as usize]
    }

    /// Arrow `vertex(s) -> vertex(u)`; identity when the masks coincide.
    pub fn arrow(&self, s: u32, u: u32) -> ChainMap<R> {
        if s == u {
            ChainMap::identity(&self.vertices[s as usize])
        } else {
            self.arrows[&(s, u)].clone()
        }
    }

    pub fn vertex_id(&self, mask: u32) -> String {
        subset_id(&self.labels, mask as u64)
    }

    /// The punctured diagram (nonempty subsets), presented contravariantly
    /// for the homotopy limit engine.
    pub fn punctured_diagram(&self) -> Diagram<R> {
        let masks: Vec<u32> = (1..=self.full_mask()).collect();
        let wide: Vec<u64> = masks.iter().map(|&m| m as u64).collect();
        let shape = reverse_inclusion_poset(&self.labels, &wide);
        let values: Vec<ChainComplex<R>> = masks
            .iter()
            .map(|&mk| self.vertices[mk as usize].clone())
            .collect();
        let mut arrows = BTreeMap::new();
        for (a, &ma) in masks.iter().enumerate() {
            for (b, &mb) in masks.iter().enumerate() {
                // engine pair a <= b means mask(b) included in mask(a)
                if a != b && mb & !ma == 0 {
                    arrows.insert((a, b), self.arrows[&(mb, ma)].clone());
                }
            }
        }
        Diagram {
            shape,
            values,
            arrows,
        }
    }

    /// Comparison map from the initial vertex into the homotopy limit over
    /// the punctured cube.
    pub fn comparison(&self) -> ChainMap<R> {
        let punct = self.punctured_diagram();
        let legs: Vec<ChainMap<R>> = (1..=self.full_mask()).map(|mk| self.arrow(0, mk)).collect();
        comparison_map(self.vertex(0), &punct, &legs)
            .expect("cube arrows form a strict cone over the punctured diagram")
    }

    /// Splits off the direction `t` (a position into the labels): the face
    /// cubes without and with `t`, and the connecting maps between them.
    pub fn split(&self, t: usize) -> Result<FaceSplit<R>> {
        if t >= self.dim() {
            return Err(Error::UnknownElement(format!("direction {t}")));
        }
        let sub_labels: Vec<String> = self
            .labels
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != t)
            .map(|(_, l)| l.clone())
            .collect();
        let lift = |sub: u32| -> u32 {
            // reinsert a zero bit at position t
            let low = sub & ((1 << t) - 1);
            let high = (sub >> t) << (t + 1);
            low | high
        };
        let tbit = 1u32 << t;
        let count = 1usize << (self.dim() - 1);
        let mut bottom_vertices = Vec::with_capacity(count);
        let mut top_vertices = Vec::with_capacity(count);
        let mut legs = Vec::with_capacity(count);
        for sub in 0..count as u32 {
            let s = lift(sub);
            bottom_vertices.push(self.vertices[s as usize].clone());
            top_vertices.push(self.vertices[(s | tbit) as usize].clone());
            legs.push(self.arrow(s, s | tbit));
        }
        let mut bottom_arrows = BTreeMap::new();
        let mut top_arrows = BTreeMap::new();
        for s in 0..count as u32 {
            for u in 0..count as u32 {
                if s != u && s & !u == 0 {
                    bottom_arrows.insert((s, u), self.arrow(lift(s), lift(u)));
                    top_arrows.insert((s, u), self.arrow(lift(s) | tbit, lift(u) | tbit));
                }
            }
        }
        let bottom = CubeDiagram::new(sub_labels.clone(), bottom_vertices, bottom_arrows)?;
        let top = CubeDiagram::new(sub_labels, top_vertices, top_arrows)?;
        Ok((bottom, top, legs))
    }
}

/// The total fiber: homotopy fiber of the comparison map from the initial
/// vertex into the punctured-cube homotopy limit.
pub fn tfiber<R: Ring>(cube: &CubeDiagram<R>) -> ChainComplex<R> {
    hofiber(&cube.comparison())
}

/// The cartesian degree: connectivity of the comparison map. Infinite
/// answers mean the cube is homotopy cartesian at homology level.
pub fn cartesian_degree<R: Ring>(cube: &CubeDiagram<R>) -> Connectivity {
    connectivity(&cube.comparison())
}

/// The total fiber computed as an iterated fiber in direction `t`: the
/// homotopy fiber of the induced map between the face cubes' total fibers.
/// Quasi-isomorphic to [`tfiber`] for every choice of `t`.
pub fn tfiber_iterated<R: Ring>(cube: &CubeDiagram<R>, t: usize) -> Result<ChainComplex<R>> {
    let (bottom, top, legs) = cube.split(t)?;
    if bottom.dim() == 0 {
        return Ok(hofiber(&legs[0]));
    }
    let f_bottom = bottom.comparison();
    let f_top = top.comparison();
    // induced map on punctured holims
    let beta = holim_map(
        &bottom.punctured_diagram(),
        &top.punctured_diagram(),
        &legs[1..],
    )?;
    let alpha = legs[0].clone();
    let induced = crate::chain::hofiber_map(&f_bottom, &f_top, &alpha, &beta)?;
    Ok(hofiber(&induced))
}

/// Glues two cubes along a shared face in direction `t` (position into the
/// label set): `x`'s face with `t` must equal `y`'s face without `t`. The
/// result keeps `x`'s bottom face and `y`'s top face, with composite
/// connecting maps.
pub fn juxtapose<R: Ring>(
    x: &CubeDiagram<R>,
    y: &CubeDiagram<R>,
    t: usize,
) -> Result<CubeDiagram<R>> {
    if x.labels() != y.labels() {
        return Err(Error::WrongShape(
            "cubes must share their label set".to_string(),
        ));
    }
    if t >= x.dim() {
        return Err(Error::UnknownElement(format!("direction {t}")));
    }
    let tbit = 1u32 << t;
    let full = x.full_mask();
    // shared face: x with t equals y without t
    for s in 0..=full {
        if s & tbit != 0 {
            continue;
        }
        if !same_underlying(x.vertex(s | tbit), y.vertex(s)) {
            return Err(Error::WrongShape(format!(
                "face mismatch at {}",
                x.vertex_id(s | tbit)
            )));
        }
    }
    for s in 0..=full {
        for u in 0..=full {
            if s == u || s & !u != 0 || (s & tbit) != 0 || (u & tbit) != 0 {
                continue;
            }
            if !x.arrow(s | tbit, u | tbit).same_matrices(&y.arrow(s, u)) {
                return Err(Error::WrongShape(format!(
                    "face arrows differ between {} and {}",
                    x.vertex_id(s | tbit),
                    x.vertex_id(u | tbit)
                )));
            }
        }
    }
    let mut vertices = Vec::with_capacity((full + 1) as usize);
    for s in 0..=full {
        if s & tbit == 0 {
            vertices.push(x.vertex(s).clone());
        } else {
            vertices.push(y.vertex(s).clone());
        }
    }
    let mut arrows = BTreeMap::new();
    for s in 0..=full {
        for u in 0..=full {
            if s == u || s & !u != 0 {
                continue;
            }
            let map = match ((s & tbit) != 0, (u & tbit) != 0) {
                (false, false) => x.arrow(s, u),
                (true, true) => y.arrow(s, u),
                (false, true) => {
                    // up through x into the shared face (x's vertex at u is
                    // y's vertex at u minus t), then up inside y
                    y.arrow(u & !tbit, u).compose(&x.arrow(s, u))?
                }
                (true, false) => unreachable!("s contained in u"),
            };
            arrows.insert((s, u), map);
        }
    }
    CubeDiagram::new(x.labels().to_vec(), vertices, arrows)
}

/// Betti tables of two pipelines, compared per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiComparison {
    pub left: BTreeMap<i64, usize>,
    pub right: BTreeMap<i64, usize>,
}

impl BettiComparison {
    pub fn equal(&self) -> bool {
        self.left == self.right
    }
}

/// Checks the ideal-decomposition equivalence for one diagram and cover:
/// the homotopy limit over the whole poset against the punctured-cube
/// homotopy limit of the intersection holims. Betti numbers are compared
/// per degree.
pub fn verify_ideal_decomposition<R: Ring>(
    d: &Diagram<R>,
    cover: &IdealCover,
) -> Result<BettiComparison> {
    if &cover.poset != d.shape() {
        return Err(Error::WrongShape(
            "cover is for a different poset".to_string(),
        ));
    }
    let left = holim(d).homology().betti_table();

    let r = cover.ideals().len();
    let labels: Vec<String> = (1..=r).map(|i| format!("Q{i}")).collect();
    let mut canon = labels.clone();
    canon.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    // labels Q1..Qr are already canonically sorted for r < 10; for larger r
    // the canonical order differs from the numeric one, so map positions.
    let pos_of: Vec<usize> = labels
        .iter()
        .map(|l| canon.iter().position(|c| c == l).expect("label"))
        .collect();

    let masks: Vec<u32> = (1..(1u32 << r)).collect();
    let mut sub_indices: Vec<Vec<usize>> = Vec::with_capacity(masks.len());
    for &mask in &masks {
        let mut which = Vec::new();
        for (i, &p) in pos_of.iter().enumerate() {
            if (mask >> p) & 1 == 1 {
                which.push(i);
            }
        }
        let inter = cover.intersection(&which);
        sub_indices.push(inter.into_iter().collect());
    }
    // reverse inclusion: more ideals intersected sits lower
    let wide: Vec<u64> = masks.iter().map(|&m| m as u64).collect();
    let shape = reverse_inclusion_poset(&canon, &wide);
    let values: Vec<ChainComplex<R>> = sub_indices
        .iter()
        .map(|idx| holim(&d.restrict(idx)))
        .collect();
    let mut arrows = BTreeMap::new();
    for (a, &ma) in masks.iter().enumerate() {
        for (b, &mb) in masks.iter().enumerate() {
            if a == b || mb & !ma != 0 {
                continue;
            }
            // engine arrow value(b) -> value(a): restriction from the
            // larger intersection poset (b's) to the smaller (a's)
            let big = &sub_indices[b];
            let small = &sub_indices[a];
            let positions: Vec<usize> = small
                .iter()
                .map(|x| {
                    big.binary_search(x)
                        .expect("subset of the bigger intersection")
                })
                .collect();
            let sub_d = d.restrict(big);
            arrows.insert((a, b), restriction_map(&sub_d, &positions)?);
        }
    }
    let outer = Diagram::new(shape, values, arrows)?;
    let right = holim(&outer).homology().betti_table();
    Ok(BettiComparison { left, right })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{punctured_cube, MultiIndex, PuncturedProduct};
    use crate::ring::Rat;

    fn two_chain_diagram() -> Diagram<Rat> {
        // a < b with a sphere at the top mapping onto a point at the bottom
        let shape = FinitePoset::new(
            vec!["a".to_string(), "b".to_string()],
            &[("a".to_string(), "b".to_string())],
        )
        .unwrap();
        let bottom = ChainComplex::<Rat>::sphere(0);
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 1);
        ranks.insert(2, 1);
        let top = ChainComplex::with_zero_differential(ranks);
        let mut mats = BTreeMap::new();
        mats.insert(0, Matrix::from_i64(1, 1, &[1]));
        let arrow = ChainMap::new(top.clone(), bottom.clone(), mats).unwrap();
        let mut arrows = BTreeMap::new();
        arrows.insert((0, 1), arrow);
        Diagram::new(shape, vec![bottom, top], arrows).unwrap()
    }

    #[test]
    fn holim_with_maximum_is_value_at_maximum() {
        let d = two_chain_diagram();
        let h = holim(&d).homology();
        assert_eq!(h.betti(0), 1);
        assert_eq!(h.betti(2), 1);
        assert_eq!(h.total_rank(), 2);
    }

    #[test]
    fn holim_over_antichain_is_product() {
        let shape = FinitePoset::new(vec!["a".to_string(), "b".to_string()], &[]).unwrap();
        let a = ChainComplex::<Rat>::sphere(1);
        let b = ChainComplex::<Rat>::sphere(3);
        let d = Diagram::new(shape, vec![a, b], BTreeMap::new()).unwrap();
        let h = holim(&d).homology();
        assert_eq!(h.betti(1), 1);
        assert_eq!(h.betti(3), 1);
        assert_eq!(h.total_rank(), 2);
    }

    #[test]
    fn holim_of_constant_diagram_over_contractible_shape() {
        let shape = punctured_cube(&["1", "2"]).unwrap();
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 1);
        ranks.insert(2, 1);
        let value = ChainComplex::<Rat>::with_zero_differential(ranks);
        let d = Diagram::constant(shape, value.clone());
        let h = holim(&d).homology();
        assert_eq!(h, value.homology());
    }

    #[test]
    fn euler_characteristic_bookkeeping() {
        let d = two_chain_diagram();
        let tot = holim(&d);
        // chains: (a), (b), (a < b); alternating sum over chain length
        let expect = d.value(0).euler_characteristic() + d.value(1).euler_characteristic()
            - d.value(0).euler_characteristic();
        assert_eq!(tot.euler_characteristic(), expect);
    }

    fn identity_square() -> CubeDiagram<Rat> {
        let v = ChainComplex::<Rat>::sphere(1);
        let labels = vec!["1".to_string(), "2".to_string()];
        let vertices = vec![v.clone(), v.clone(), v.clone(), v.clone()];
        let mut arrows = BTreeMap::new();
        for s in 0u32..4 {
            for u in 0u32..4 {
                if s != u && s & !u == 0 {
                    arrows.insert((s, u), ChainMap::identity(&v));
                }
            }
        }
        CubeDiagram::new(labels, vertices, arrows).unwrap()
    }

    #[test]
    fn cube_of_identities_is_homotopy_cartesian() {
        let cube = identity_square();
        assert!(tfiber(&cube).homology().is_trivial());
        assert_eq!(cartesian_degree(&cube), Connectivity::Infinite);
    }

    #[test]
    fn one_cube_tfiber_is_the_hofiber() {
        let a = ChainComplex::<Rat>::sphere(2);
        let b = ChainComplex::<Rat>::sphere(0);
        let f = ChainMap::zero(&a, &b);
        let mut arrows = BTreeMap::new();
        arrows.insert((0u32, 1u32), f.clone());
        let cube = CubeDiagram::new(vec!["1".to_string()], vec![a, b], arrows).unwrap();
        let t = tfiber(&cube);
        let h = hofiber(&f);
        assert_eq!(t.ranks(), h.ranks());
        assert_eq!(t.homology(), h.homology());
        let it = tfiber_iterated(&cube, 0).unwrap();
        assert_eq!(it.homology(), h.homology());
    }

    #[test]
    fn square_with_zero_maps_detected() {
        // all arrows zero, a sphere at a punctured vertex: the comparison
        // map vanishes and the square cannot be cartesian
        let s3 = ChainComplex::<Rat>::sphere(3);
        let z = ChainComplex::<Rat>::zero();
        let labels = vec!["1".to_string(), "2".to_string()];
        // vertices: {} -> s3, {1} -> 0, {2} -> s3, {1,2} -> 0
        let vertices = vec![s3.clone(), z.clone(), s3.clone(), z.clone()];
        let mut arrows = BTreeMap::new();
        arrows.insert((0u32, 1u32), ChainMap::zero(&s3, &z));
        arrows.insert((0u32, 2u32), ChainMap::zero(&s3, &s3));
        arrows.insert((0u32, 3u32), ChainMap::zero(&s3, &z));
        arrows.insert((1u32, 3u32), ChainMap::zero(&z, &z));
        arrows.insert((2u32, 3u32), ChainMap::zero(&s3, &z));
        let cube = CubeDiagram::new(labels, vertices, arrows).unwrap();
        let direct = tfiber(&cube).homology();
        // source sphere survives in degree 3, the punctured holim shifts
        // down to degree 2
        assert_eq!(direct.betti(3), 1);
        assert_eq!(direct.betti(2), 1);
        let it0 = tfiber_iterated(&cube, 0).unwrap().homology();
        let it1 = tfiber_iterated(&cube, 1).unwrap().homology();
        assert_eq!(direct.betti_table(), it0.betti_table());
        assert_eq!(direct.betti_table(), it1.betti_table());
        assert_eq!(cartesian_degree(&cube), Connectivity::Finite(2));
        assert_eq!(direct.degrees().first(), Some(&2));
    }

    #[test]
    fn iterated_holim_matches_for_final_object_products() {
        // chain x chain, diagram with a final object: holim is the top value
        let chain2 = FinitePoset::new(
            vec!["x".to_string(), "y".to_string()],
            &[("x".to_string(), "y".to_string())],
        )
        .unwrap();
        let prod = chain2.product(&chain2);
        let top = ChainComplex::<Rat>::sphere(2);
        let d = Diagram::constant(prod.poset.clone(), top.clone());
        let one_shot = holim(&d).homology();
        let iterated = holim_iterated(&d, &prod).unwrap().homology();
        assert_eq!(one_shot, iterated);
        assert_eq!(one_shot, top.homology());
    }

    #[test]
    fn iterated_holim_on_punctured_product() {
        let j = MultiIndex::new(vec![1, 1]).unwrap();
        let pp = PuncturedProduct::new(&j).unwrap();
        let left = punctured_cube(&["0", "1"]).unwrap();
        let prod = left.product(&left);
        // same poset up to iso; use the product directly with a constant
        // diagram and compare pipelines
        assert_eq!(pp.poset.len(), prod.poset.len());
        let value = ChainComplex::<Rat>::sphere(1);
        let d = Diagram::constant(prod.poset.clone(), value.clone());
        let one_shot = holim(&d).homology();
        let iterated = holim_iterated(&d, &prod).unwrap().homology();
        assert_eq!(one_shot.betti_table(), iterated.betti_table());
        assert_eq!(one_shot, value.homology());
    }

    #[test]
    fn trivial_ideal_cover_decomposition() {
        let d = two_chain_diagram();
        let all: std::collections::BTreeSet<usize> = (0..2).collect();
        let cover = IdealCover::new(d.shape().clone(), vec![all]).unwrap();
        let cmp = verify_ideal_decomposition(&d, &cover).unwrap();
        assert!(cmp.equal(), "left {:?} right {:?}", cmp.left, cmp.right);
    }

    #[test]
    fn juxtapose_identity_cubes() {
        let cube = identity_square();
        let z = juxtapose(&cube, &cube, 1).unwrap();
        assert_eq!(cartesian_degree(&z), Connectivity::Infinite);
    }
}
