//! Seeded random generators for the verification suites.
//!
//! Everything is driven by a ChaCha stream cipher, so a seed pins the whole
//! run. Diagrams are generated functorial by construction: values are sums
//! of "pieces" visible on an up-set or a down-set of the shape (visibility
//! regions are order-convex, so shared-piece identity maps compose), then
//! the whole diagram is conjugated by random unimodular basis changes per
//! element and degree.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{ChainComplex, ChainMap};
use crate::error::Result;
use crate::holim::{CubeDiagram, Diagram};
use crate::matrix::Matrix;
use crate::poset::{FinitePoset, IdealCover, ProductPoset};
use crate::ring::Ring;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size knobs for random diagrams. Defaults keep the totalizations small
/// enough for exact arithmetic suites.
#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Number of pieces scattered over the shape.
    pub pieces: usize,
    /// Top internal degree for sphere and disk pieces.
    pub max_degree: i64,
    /// Elementary operations per basis change (0 disables conjugation).
    pub conjugation_ops: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            pieces: 3,
            max_degree: 3,
            conjugation_ops: 2,
        }
    }
}

/// A random invertible matrix together with its exact inverse, built from
/// elementary row operations with small coefficients.
pub fn unimodular_pair<R: Ring>(
    n: usize,
    ops: usize,
    rng: &mut ChaCha8Rng,
) -> (Matrix<R>, Matrix<R>) {
    let mut u = Matrix::<R>::identity(n);
    let mut v = Matrix::<R>::identity(n);
    if n < 2 {
        return (u, v);
    }
    for _ in 0..ops {
        match rng.gen_range(0..3u8) {
            0 => {
                // u: row j += c * row i; v: col i -= c * col j
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n);
                if i == j {
                    j = (j + 1) % n;
                }
                let c = R::from_i64(rng.gen_range(-2i64..=2));
                u.add_row_multiple(j, i, &c);
                v.add_col_multiple(i, j, &(-c));
            }
            1 => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n);
                if i == j {
                    j = (j + 1) % n;
                }
                u.swap_rows(i, j);
                v.swap_cols(i, j);
            }
            _ => {
                let i = rng.gen_range(0..n);
                let minus = -R::one();
                u.scale_row(i, &minus);
                v.scale_col(i, &minus);
            }
        }
    }
    (u, v)
}

/// A small random complex: a direct sum of spheres and disks in bounded
/// degrees, conjugated by a random basis change.
pub fn random_complex<R: Ring>(
    max_degree: i64,
    pieces: usize,
    rng: &mut ChaCha8Rng,
) -> ChainComplex<R> {
    let mut parts = Vec::new();
    for _ in 0..pieces {
        let deg = rng.gen_range(0..=max_degree);
        if rng.gen_bool(0.5) {
            parts.push(ChainComplex::<R>::sphere(deg));
        } else {
            parts.push(ChainComplex::<R>::disk(deg.max(1)));
        }
    }
    let refs: Vec<&ChainComplex<R>> = parts.iter().collect();
    let plain = ChainComplex::direct_sum(&refs).expect("summands share the ring");
    let conj = Conjugator::random(std::slice::from_ref(&plain), 3, rng);
    conj.complex(0, &plain)
}

/// Where a piece lives on the shape.
#[derive(Clone, Copy, Debug)]
enum Region {
    /// Visible at `q` iff `anchor <= q`.
    UpSet(usize),
    /// Visible at `q` iff `q <= anchor`.
    DownSet(usize),
}

/// A functorial system of values over a poset: sums of pieces with
/// order-convex visibility and shared-identity structure maps.
struct PieceSystem<R: Ring> {
    shape: FinitePoset,
    pieces: Vec<(Region, ChainComplex<R>)>,
}

impl<R: Ring> PieceSystem<R> {
    fn random(shape: &FinitePoset, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Self {
        let mut pieces = Vec::new();
        if !shape.is_empty() {
            for _ in 0..cfg.pieces {
                let anchor = rng.gen_range(0..shape.len());
                let region = if rng.gen_bool(0.5) {
                    Region::UpSet(anchor)
                } else {
                    Region::DownSet(anchor)
                };
                let deg = rng.gen_range(0..=cfg.max_degree);
                let complex = if rng.gen_bool(0.6) {
                    ChainComplex::<R>::sphere(deg)
                } else {
                    ChainComplex::<R>::disk(deg.max(1))
                };
                pieces.push((region, complex));
            }
        }
        PieceSystem {
            shape: shape.clone(),
            pieces,
        }
    }

    fn visible(&self, piece: usize, q: usize) -> bool {
        match self.pieces[piece].0 {
            Region::UpSet(a) => self.shape.leq(a, q),
            Region::DownSet(a) => self.shape.leq(q, a),
        }
    }

    fn value(&self, q: usize) -> ChainComplex<R> {
        let parts: Vec<&ChainComplex<R>> = self
            .pieces
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.visible(i, q))
            .map(|(_, (_, c))| c)
            .collect();
        ChainComplex::direct_sum(&parts).expect("summands share the ring")
    }

    /// Identity on the pieces visible at both ends, zero elsewhere.
    fn map(&self, from_q: usize, to_q: usize) -> ChainMap<R> {
        let src = self.value(from_q);
        let dst = self.value(to_q);
        let src_keep: Vec<usize> = (0..self.pieces.len())
            .filter(|&i| self.visible(i, from_q))
            .collect();
        let dst_keep: Vec<usize> = (0..self.pieces.len())
            .filter(|&i| self.visible(i, to_q))
            .collect();
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
        ChainMap::new(src, dst, mats).expect("piece maps commute with the differentials")
    }
}

/// Mutually inverse basis-change matrices, one pair per degree.
type BasisChange<R> = BTreeMap<i64, (Matrix<R>, Matrix<R>)>;

/// Per-element basis changes, used to conjugate whole diagrams.
struct Conjugator<R: Ring> {
    changes: Vec<BasisChange<R>>,
}

impl<R: Ring> Conjugator<R> {
    fn random(values: &[ChainComplex<R>], ops: usize, rng: &mut ChaCha8Rng) -> Self {
        let changes = values
            .iter()
            .map(|c| {
                c.ranks()
                    .iter()
                    .map(|(&n, &r)| (n, unimodular_pair::<R>(r, ops, rng)))
                    .collect()
            })
            .collect();
        Conjugator { changes }
    }

    fn fwd(&self, q: usize, n: i64, r: usize) -> Matrix<R> {
        self.changes[q]
            .get(&n)
            .map(|(u, _)| u.clone())
            .unwrap_or_else(|| Matrix::identity(r))
    }

    fn bwd(&self, q: usize, n: i64, r: usize) -> Matrix<R> {
        self.changes[q]
            .get(&n)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| Matrix::identity(r))
    }

    fn complex(&self, q: usize, c: &ChainComplex<R>) -> ChainComplex<R> {
        let mut diffs = BTreeMap::new();
        for (&n, d) in c.diffs() {
            let u = self.fwd(q, n - 1, c.rank(n - 1));
            let v = self.bwd(q, n, c.rank(n));
            diffs.insert(n, u.mul(d).and_then(|m| m.mul(&v)).expect("shapes agree"));
        }
        ChainComplex::new(c.ranks().clone(), diffs, BTreeMap::new())
            .expect("conjugation preserves the complex")
    }

    /// Conjugated map `u_to o f o u_from^{-1}`.
    fn map(
        &self,
        from_q: usize,
        to_q: usize,
        f: &ChainMap<R>,
        new_src: &ChainComplex<R>,
        new_dst: &ChainComplex<R>,
    ) -> ChainMap<R> {
        let mut mats = BTreeMap::new();
        let degrees: Vec<i64> = f.source().degrees().chain(f.target().degrees()).collect();
        for &n in degrees.iter() {
            let u = self.fwd(to_q, n, f.target().rank(n));
            let v = self.bwd(from_q, n, f.source().rank(n));
            let m = u
                .mul(&f.mat(n))
                .and_then(|m| m.mul(&v))
                .expect("shapes agree");
            if !m.is_zero() {
                mats.insert(n, m);
            }
        }
        ChainMap::new(new_src.clone(), new_dst.clone(), mats)
            .expect("conjugation preserves chain maps")
    }
}

/// The same complex in a random new basis (exact conjugation of the
/// differentials); homology is unchanged.
pub fn conjugated_copy<R: Ring>(
    c: &ChainComplex<R>,
    ops: usize,
    rng: &mut ChaCha8Rng,
) -> ChainComplex<R> {
    let conj = Conjugator::random(std::slice::from_ref(c), ops, rng);
    conj.complex(0, c)
}

/// A random functorial diagram over the given shape (contravariant, ready
/// for the homotopy limit engine).
pub fn random_diagram<R: Ring>(
    shape: &FinitePoset,
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> Diagram<R> {
    let system = PieceSystem::<R>::random(shape, cfg, rng);
    let plain_values: Vec<ChainComplex<R>> = (0..shape.len()).map(|q| system.value(q)).collect();
    let conj = Conjugator::random(&plain_values, cfg.conjugation_ops, rng);
    let values: Vec<ChainComplex<R>> = plain_values
        .iter()
        .enumerate()
        .map(|(q, c)| conj.complex(q, c))
        .collect();
    let mut arrows = BTreeMap::new();
    for lo in 0..shape.len() {
        for hi in 0..shape.len() {
            if lo != hi && shape.leq(lo, hi) {
                let plain = system.map(hi, lo);
                arrows.insert((lo, hi), conj.map(hi, lo, &plain, &values[hi], &values[lo]));
            }
        }
    }
    Diagram::new(shape.clone(), values, arrows).expect("piece diagrams are functorial")
}

/// A random chain map (an arrow of a random diagram over the 2-chain).
pub fn random_chain_map<R: Ring>(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> ChainMap<R> {
    let shape = FinitePoset::new(
        vec!["s".to_string(), "t".to_string()],
        &[("s".to_string(), "t".to_string())],
    )
    .expect("two-chain");
    let d = random_diagram::<R>(&shape, cfg, rng);
    d.arrow(0, 1)
}

/// A random map with known quasi-isomorphism status: shared pieces map
/// identically, exclusive pieces are acyclic disks for a quasi-iso and a
/// sphere witness otherwise.
pub fn random_map_with_known_status<R: Ring>(
    quasi_iso: bool,
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> ChainMap<R> {
    let shared: Vec<ChainComplex<R>> = (0..cfg.pieces.max(1))
        .map(|_| {
            let deg = rng.gen_range(0..=cfg.max_degree);
            ChainComplex::<R>::sphere(deg)
        })
        .collect();
    let mut src_parts: Vec<ChainComplex<R>> = shared.clone();
    let mut dst_parts: Vec<ChainComplex<R>> = shared.clone();
    let extras = rng.gen_range(1..=2);
    for _ in 0..extras {
        let deg = rng.gen_range(1..=cfg.max_degree.max(1));
        let piece = if quasi_iso {
            ChainComplex::<R>::disk(deg)
        } else {
            ChainComplex::<R>::sphere(deg)
        };
        if rng.gen_bool(0.5) {
            src_parts.push(piece);
        } else {
            dst_parts.push(piece);
        }
    }
    let src = ChainComplex::direct_sum(&src_parts.iter().collect::<Vec<_>>()).expect("sum");
    let dst = ChainComplex::direct_sum(&dst_parts.iter().collect::<Vec<_>>()).expect("sum");
    // the map: identity on the shared prefix
    let mut mats = BTreeMap::new();
    let shared_sum = ChainComplex::direct_sum(&shared.iter().collect::<Vec<_>>()).expect("sum");
    let degrees: Vec<i64> = src.degrees().chain(dst.degrees()).collect();
    for &n in degrees.iter() {
        let rows = dst.rank(n);
        let cols = src.rank(n);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zero(rows, cols);
        for j in 0..shared_sum.rank(n) {
            m[(j, j)] = R::one();
        }
        mats.insert(n, m);
    }
    let plain = ChainMap::new(src.clone(), dst.clone(), mats).expect("prefix map commutes");
    // conjugate both ends
    let conj = Conjugator::random(&[src.clone(), dst.clone()], cfg.conjugation_ops, rng);
    let new_src = conj.complex(0, &src);
    let new_dst = conj.complex(1, &dst);
    conj.map(0, 1, &plain, &new_src, &new_dst)
}

/// A random cubical diagram of the given dimension (labels `1..=dim`).
pub fn random_cube<R: Ring>(dim: usize, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> CubeDiagram<R> {
    let (x, _, _) = random_cube_chain::<R>(dim, 1, cfg, rng);
    x
}

/// A compatible pair of cubes sharing a face in the last direction,
/// together with their composite. Generated as three levels of one
/// functorial system over `subsets x {0 < 1 < 2}`, so the pair glues and
/// the composite is the genuine two-step cube.
pub fn random_cube_triple<R: Ring>(
    dim: usize,
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> (CubeDiagram<R>, CubeDiagram<R>, CubeDiagram<R>) {
    let (x, y, z) = random_cube_chain::<R>(dim, 2, cfg, rng);
    (
        x,
        y.expect("two levels requested"),
        z.expect("two levels requested"),
    )
}

/// Shared machinery: a functorial system over `P(base) x {0..levels}`,
/// sliced into cubes `(level 0 -> level 1)`, `(level 1 -> level 2)`,
/// `(level 0 -> level 2)`.
#[allow(clippy::type_complexity)]
fn random_cube_chain<R: Ring>(
    dim: usize,
    levels: usize,
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> (
    CubeDiagram<R>,
    Option<CubeDiagram<R>>,
    Option<CubeDiagram<R>>,
) {
    assert!(dim >= 1, "cubes need at least one direction");
    assert!(levels == 1 || levels == 2);
    let base = dim - 1;
    // poset: pairs (submask over `base` labels, level), componentwise order
    let sub_count = 1usize << base;
    let node = |mask: usize, level: usize| mask * (levels + 1) + level;
    let total = sub_count * (levels + 1);
    let elements: Vec<String> = (0..total).map(|i| format!("n{}", i)).collect();
    let mut pairs = Vec::new();
    for ma in 0..sub_count {
        for la in 0..=levels {
            for mb in 0..sub_count {
                for lb in 0..=levels {
                    if ma & !mb == 0 && la <= lb && (ma, la) != (mb, lb) {
                        pairs.push((node(ma, la), node(mb, lb)));
                    }
                }
            }
        }
    }
    let poset = FinitePoset::closure_of(elements, &pairs).expect("componentwise order");
    let system = PieceSystem::<R>::random(&poset, cfg, rng);
    let plain_values: Vec<ChainComplex<R>> = (0..poset.len()).map(|q| system.value(q)).collect();
    let conj = Conjugator::random(&plain_values, cfg.conjugation_ops, rng);
    let values: Vec<ChainComplex<R>> = plain_values
        .iter()
        .enumerate()
        .map(|(q, c)| conj.complex(q, c))
        .collect();
    let arrow = |from: usize, to: usize| -> ChainMap<R> {
        let plain = system.map(from, to);
        conj.map(from, to, &plain, &values[from], &values[to])
    };
    let labels: Vec<String> = (1..=dim).map(|i| i.to_string()).collect();
    let tbit = 1u32 << (dim - 1);
    let build = |lo_level: usize, hi_level: usize| -> CubeDiagram<R> {
        let vertex_node = |mask: u32| -> usize {
            let sub = (mask & !tbit) as usize;
            let level = if mask & tbit != 0 { hi_level } else { lo_level };
            node(sub, level)
        };
        let count = 1usize << dim;
        let vertices: Vec<ChainComplex<R>> = (0..count as u32)
            .map(|mk| values[vertex_node(mk)].clone())
            .collect();
        let mut arrows = BTreeMap::new();
        for s in 0..count as u32 {
            for u in 0..count as u32 {
                if s != u && s & !u == 0 {
                    arrows.insert((s, u), arrow(vertex_node(s), vertex_node(u)));
                }
            }
        }
        CubeDiagram::new(labels.clone(), vertices, arrows).expect("sliced system stays functorial")
    };
    let x = build(0, 1);
    if levels == 1 {
        (x, None, None)
    } else {
        (x, Some(build(1, 2)), Some(build(0, 2)))
    }
}

/// A random poset on at most `max_elements` elements: ascending pairs kept
/// with the given probability, transitively closed.
pub fn random_poset(max_elements: usize, density: f64, rng: &mut ChaCha8Rng) -> FinitePoset {
    let n = rng.gen_range(2..=max_elements.max(2));
    let elements: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    FinitePoset::closure_of(elements, &pairs).expect("ascending pairs close to a poset")
}

/// A two-ideal cover: the down-closure of a random subset, completed by
/// the down-closure of its complement.
pub fn random_two_ideal_cover(poset: &FinitePoset, rng: &mut ChaCha8Rng) -> Result<IdealCover> {
    let n = poset.len();
    let mut first: BTreeSet<usize> = BTreeSet::new();
    for i in 0..n {
        if rng.gen_bool(0.5) {
            first.extend(poset.down_set(i));
        }
    }
    let mut second: BTreeSet<usize> = BTreeSet::new();
    for i in 0..n {
        if !first.contains(&i) {
            second.extend(poset.down_set(i));
        }
    }
    IdealCover::new(poset.clone(), vec![first, second])
}

/// A random product presentation with small factors, plus a random diagram
/// over it.
pub fn random_product_diagram<R: Ring>(
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> (ProductPoset, Diagram<R>) {
    let left = random_poset(3, 0.6, rng);
    let right = random_poset(3, 0.6, rng);
    let prod = left.product(&right);
    let d = random_diagram::<R>(&prod.poset, cfg, rng);
    (prod, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{connectivity, Connectivity};
    use crate::holim::{cartesian_degree, holim, juxtapose, tfiber};
    use crate::ring::{Int, Rat};

    #[test]
    fn unimodular_pairs_invert() {
        let mut rng = rng(7);
        for n in 1..5 {
            let (u, v) = unimodular_pair::<Int>(n, 6, &mut rng);
            assert_eq!(u.mul(&v).unwrap(), Matrix::identity(n));
            let (u, v) = unimodular_pair::<Rat>(n, 6, &mut rng);
            assert_eq!(u.mul(&v).unwrap(), Matrix::identity(n));
        }
    }

    #[test]
    fn random_complexes_are_valid_and_seeded() {
        let c1: ChainComplex<Rat> = random_complex(3, 3, &mut rng(11));
        let c2: ChainComplex<Rat> = random_complex(3, 3, &mut rng(11));
        assert_eq!(c1.ranks(), c2.ranks());
        assert_eq!(c1.diffs(), c2.diffs());
        let c3: ChainComplex<Rat> = random_complex(3, 3, &mut rng(12));
        let _ = c3.homology();
    }

    #[test]
    fn random_diagrams_hold_up() {
        let mut r = rng(23);
        for _ in 0..5 {
            let shape = random_poset(5, 0.5, &mut r);
            let d: Diagram<Rat> = random_diagram(&shape, &GenConfig::default(), &mut r);
            let tot = holim(&d);
            let _ = tot.homology();
        }
    }

    #[test]
    fn quasi_iso_status_is_honest() {
        let mut r = rng(31);
        let cfg = GenConfig::default();
        for _ in 0..10 {
            let f: ChainMap<Rat> = random_map_with_known_status(true, &cfg, &mut r);
            assert_eq!(connectivity(&f), Connectivity::Infinite);
            let g: ChainMap<Rat> = random_map_with_known_status(false, &cfg, &mut r);
            assert!(matches!(connectivity(&g), Connectivity::Finite(_)));
        }
    }

    #[test]
    fn cube_triples_glue() {
        let mut r = rng(41);
        let cfg = GenConfig {
            pieces: 2,
            max_degree: 2,
            conjugation_ops: 2,
        };
        let (x, y, z) = random_cube_triple::<Rat>(2, &cfg, &mut r);
        let glued = juxtapose(&x, &y, 1).unwrap();
        // the generated composite and the glued cube agree
        for s in 0..=z.full_mask() {
            assert_eq!(glued.vertex(s).ranks(), z.vertex(s).ranks());
            for u in 0..=z.full_mask() {
                if s != u && s & !u == 0 {
                    assert!(glued.arrow(s, u).same_matrices(&z.arrow(s, u)));
                }
            }
        }
        let _ = (tfiber(&x), cartesian_degree(&z));
    }

    #[test]
    fn two_ideal_covers_are_valid() {
        let mut r = rng(53);
        for _ in 0..10 {
            let p = random_poset(6, 0.4, &mut r);
            let cover = random_two_ideal_cover(&p, &mut r).unwrap();
            assert_eq!(cover.ideals().len(), 2);
        }
    }

    #[test]
    fn conjugation_preserves_homology() {
        let mut r = rng(61);
        for _ in 0..20 {
            let plain: ChainComplex<Int> = {
                let parts = [ChainComplex::<Int>::sphere(1), ChainComplex::<Int>::disk(2)];
                ChainComplex::direct_sum(&parts.iter().collect::<Vec<_>>()).unwrap()
            };
            let conj = Conjugator::random(std::slice::from_ref(&plain), 5, &mut r);
            let twisted = conj.complex(0, &plain);
            assert_eq!(plain.homology(), twisted.homology());
            assert!(!twisted.is_zero_complex());
            assert!(twisted.diffs().values().all(|m| !m.is_zero()));
        }
    }
}
