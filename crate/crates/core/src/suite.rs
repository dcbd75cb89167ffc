//! Seeded verification suites.
//!
//! Each suite runs a batch of exhaustive or seeded random checks of one of
//! the structural identities and reports the first counterexample, if any.
//! The same seed reproduces the same batch exactly.

use std::collections::BTreeSet;

use crate::chain::{connectivity, hofiber, ChainComplex, ChainMap, Connectivity};
use crate::error::Result;
use crate::holim::{
    cartesian_degree, holim, holim_iterated, juxtapose, tfiber, tfiber_iterated,
    verify_ideal_decomposition, CubeDiagram, Diagram,
};
use crate::linkmodel::{poincare_oracle, LinkModel, PointSpec};
use crate::polycalc::{verify_iterated_truncation, verify_twotowers_identity, MultiPolynomial};
use crate::poset::{MultiIndex, MultidegreeDownset};
use crate::random::{
    conjugated_copy, random_chain_map, random_cube, random_cube_triple, random_diagram,
    random_map_with_known_status, random_poset, random_product_diagram, random_two_ideal_cover,
    rng, GenConfig,
};
use crate::ring::{Int, Rat, Ring};
use crate::tower::{verify_layer_poset_equivalence, PieceFunctor, TowerDiagram};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Outcome of one suite: the number of cases run and the failures, each
/// described well enough to replay.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Euler bookkeeping of the homotopy fiber:
/// `chi(hofiber(f)) = chi(source) - chi(target)` for every map.
pub fn hofiber_euler_suite(trials: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("hofiber-euler");
    let mut r = rng(seed);
    let cfg = GenConfig::default();
    for i in 0..trials {
        let f: ChainMap<Rat> = random_chain_map(&cfg, &mut r);
        let expect = f.source().euler_characteristic() - f.target().euler_characteristic();
        let got = hofiber(&f).euler_characteristic();
        report.check(got == expect, || {
            format!("trial {i}: chi(hofiber) = {got}, expected {expect}")
        });
    }
    report
}

/// Homology is invariant under exact basis change over the integers,
/// torsion included.
pub fn basis_change_suite(trials: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("basis-change");
    let mut r = rng(seed);
    for i in 0..trials {
        let parts = [
            ChainComplex::<Int>::sphere(r.gen_range(0..3)),
            ChainComplex::<Int>::disk(r.gen_range(1..4)),
            torsion_piece(r.gen_range(2..5), r.gen_range(1..3)),
        ];
        let c = ChainComplex::direct_sum(&parts.iter().collect::<Vec<_>>()).expect("sum");
        let twisted = conjugated_copy(&c, 5, &mut r);
        report.check(c.homology() == twisted.homology(), || {
            format!("trial {i}: homology changed under basis change")
        });
    }
    report
}

fn torsion_piece(factor: i64, degree: i64) -> ChainComplex<Int> {
    let mut ranks = BTreeMap::new();
    ranks.insert(degree, 1);
    ranks.insert(degree - 1, 1);
    let mut diffs = BTreeMap::new();
    diffs.insert(degree, crate::matrix::Matrix::from_i64(1, 1, &[factor]));
    ChainComplex::new(ranks, diffs, BTreeMap::new()).expect("valid two-term complex")
}

/// Connectivity is infinite exactly for quasi-isomorphisms; checked on
/// maps with construction-known status.
pub fn quasi_iso_suite(trials: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("quasi-iso");
    let mut r = rng(seed);
    let cfg = GenConfig::default();
    for i in 0..trials {
        let f: ChainMap<Rat> = random_map_with_known_status(true, &cfg, &mut r);
        report.check(connectivity(&f).is_infinite(), || {
            format!("trial {i}: quasi-iso scored finite connectivity")
        });
        let g: ChainMap<Rat> = random_map_with_known_status(false, &cfg, &mut r);
        report.check(!connectivity(&g).is_infinite(), || {
            format!("trial {i}: homology-changing map scored infinite connectivity")
        });
    }
    report
}

/// The direct total fiber against the iterated one, for every choice of
/// iteration direction.
pub fn tfiber_pipelines_suite(trials: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("tfiber-iterated");
    let mut r = rng(seed);
    let cfg = GenConfig {
        pieces: 3,
        max_degree: 3,
        conjugation_ops: 2,
    };
    for i in 0..trials {
        let dim = 1 + i % 3;
        let cube: CubeDiagram<Rat> = random_cube(dim, &cfg, &mut r);
        let direct = tfiber(&cube).homology().betti_table();
        for t in 0..dim {
            let iterated = tfiber_iterated(&cube, t)
                .expect("direction in range")
                .homology()
                .betti_table();
            report.check(direct == iterated, || {
                format!("trial {i}: dim {dim}, direction {t}: {direct:?} vs {iterated:?}")
            });
        }
    }
    report
}

/// One-shot homotopy limits against iterated ones over product shapes.
pub fn holim_product_suite(trials: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("holim-product");
    let mut r = rng(seed);
    let cfg = GenConfig {
        pieces: 2,
        max_degree: 2,
        conjugation_ops: 2,
    };
    for i in 0..trials {
        let (prod, d) = random_product_diagram::<Rat>(&cfg, &mut r);
        let one_shot = holim(&d).homology().betti_table();
        let iterated = holim_iterated(&d, &prod)
            .expect("shape is the product")
            .homology()
            .betti_table();
        report.check(one_shot == iterated, || {
            format!(
                "trial {i}: product {}x{}: {one_shot:?} vs {iterated:?}",
                prod.left.len(),
                prod.right.len()
            )
        });
    }
    report
}

/// Euler bookkeeping of the totalization: the Euler characteristic of the
/// homotopy limit is the alternating chain-length sum of the values'
/// characteristics at chain minima.
pub fn holim_euler_suite(trials: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("holim-euler");
    let mut r = rng(seed);
    let cfg = GenConfig::default();
    for i in 0..trials {
        let shape = random_poset(6, 0.45, &mut r);
        let d: Diagram<Rat> = random_diagram(&shape, &cfg, &mut r);
        let expect: i64 = shape
            .strict_chains()
            .iter()
            .map(|c| {
                let chi = d.value(c[0]).euler_characteristic();
                if (c.len() - 1) % 2 == 0 {
                    chi
                } else {
                    -chi
                }
            })
            .sum();
        let got = holim(&d).euler_characteristic();
        report.check(got == expect, || {
            format!("trial {i}: chi(holim) = {got}, expected {expect}")
        });
    }
    report
}

/// The ideal-cover decomposition: the fixed strict-downset example first,
/// then seeded random poset/cover/diagram triples.
pub fn ideal_decomposition_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("ideal-decomp");
    let mut r = rng(seed);
    let cfg = GenConfig {
        pieces: 3,
        max_degree: 3,
        conjugation_ops: 2,
    };

    // fixed case: the strict downset below (1,1) covered by the downsets
    // of (0,1) and (1,0)
    {
        let j = MultiIndex::new(vec![1, 1])?;
        let strict = MultidegreeDownset::new(&j, true)?;
        let d: Diagram<Rat> = random_diagram(&strict.poset, &cfg, &mut r);
        let ideal_of = |top: &str| -> Result<BTreeSet<usize>> {
            let idx = strict.poset.index_of(top)?;
            Ok(strict.poset.down_set(idx).collect())
        };
        let cover = crate::poset::IdealCover::new(
            strict.poset.clone(),
            vec![ideal_of("(0,1)")?, ideal_of("(1,0)")?],
        )?;
        let cmp = verify_ideal_decomposition(&d, &cover)?;
        report.check(cmp.equal(), || {
            format!(
                "fixed strict-downset case: {:?} vs {:?}",
                cmp.left, cmp.right
            )
        });
    }

    for i in 0..trials.saturating_sub(1) {
        let poset = random_poset(8, 0.35, &mut r);
        let cover = random_two_ideal_cover(&poset, &mut r)?;
        let d: Diagram<Rat> = random_diagram(&poset, &cfg, &mut r);
        let cmp = verify_ideal_decomposition(&d, &cover)?;
        report.check(cmp.equal(), || {
            format!(
                "trial {i}: poset of {} elements: {:?} vs {:?}",
                poset.len(),
                cmp.left,
                cmp.right
            )
        });
    }
    Ok(report)
}

/// Juxtaposition: gluing two cubes along a face never drops below the
/// smaller cartesian degree, the glued cube agrees with the two-step
/// composite, and gluing a cube of identities preserves everything.
pub fn juxtaposition_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("juxtaposition");
    let mut r = rng(seed);
    let cfg = GenConfig {
        pieces: 2,
        max_degree: 2,
        conjugation_ops: 2,
    };

    // identical cubes with identity verticals glue to themselves
    {
        let base: CubeDiagram<Rat> = random_cube(1, &cfg, &mut r);
        let doubled = doubled_cube(&base)?;
        let glued = juxtapose(&doubled, &doubled, doubled.dim() - 1)?;
        let d_deg = cartesian_degree(&doubled);
        let g_deg = cartesian_degree(&glued);
        report.check(
            d_deg == Connectivity::Infinite && g_deg == Connectivity::Infinite,
            || format!("doubled cube: degree {d_deg} glued to {g_deg}"),
        );
    }

    for i in 0..trials {
        let dim = 2 + i % 2;
        let (x, y, z) = random_cube_triple::<Rat>(dim, &cfg, &mut r);
        let t = dim - 1;
        let glued = juxtapose(&x, &y, t)?;
        // the glued cube is the generated composite
        let mut consistent = true;
        for s in 0..=z.full_mask() {
            for u in 0..=z.full_mask() {
                if s != u && s & !u == 0 && !glued.arrow(s, u).same_matrices(&z.arrow(s, u)) {
                    consistent = false;
                }
            }
        }
        report.check(consistent, || {
            format!("trial {i}: glued cube differs from the two-step composite")
        });
        let dx = cartesian_degree(&x);
        let dy = cartesian_degree(&y);
        let dz = cartesian_degree(&glued);
        let bound = dx.min(dy);
        report.check(dz >= bound, || {
            format!("trial {i}: glued degree {dz} below min({dx}, {dy})")
        });
        if dx.is_infinite() && dy.is_infinite() {
            report.check(dz.is_infinite(), || {
                format!("trial {i}: two cartesian cubes glued to degree {dz}")
            });
        }
    }
    Ok(report)
}

/// `(V -> V)` with identity verticals over an arbitrary base cube; always
/// homotopy cartesian.
fn doubled_cube<R: Ring>(base: &CubeDiagram<R>) -> Result<CubeDiagram<R>> {
    let dim = base.dim() + 1;
    let mut labels = base.labels().to_vec();
    let next = (base.dim() + 1).to_string();
    labels.push(next);
    let tbit = 1u32 << (dim - 1);
    let count = 1usize << dim;
    let sub = |mask: u32| mask & !tbit;
    let vertices: Vec<ChainComplex<R>> = (0..count as u32)
        .map(|mk| base.vertex(sub(mk)).clone())
        .collect();
    let mut arrows = BTreeMap::new();
    for s in 0..count as u32 {
        for u in 0..count as u32 {
            if s != u && s & !u == 0 {
                arrows.insert((s, u), base.arrow(sub(s), sub(u)));
            }
        }
    }
    CubeDiagram::new(labels, vertices, arrows)
}

/// The two layer descriptions (strict-downset hofiber against the
/// decrement-cube total fiber) on random towers.
pub fn layer_poset_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("layer-poset");
    let mut r = rng(seed);
    let cfg = GenConfig {
        pieces: 2,
        max_degree: 3,
        conjugation_ops: 2,
    };
    let shapes = [
        vec![1, 1],
        vec![2, 1],
        vec![1, 2],
        vec![2, 2],
        vec![2],
        vec![0, 1],
    ];
    for i in 0..trials {
        let jvec = MultiIndex::new(shapes[i % shapes.len()].clone())?;
        let downset = MultidegreeDownset::new(&jvec, false)?;
        let d: Diagram<Rat> = random_diagram(&downset.poset, &cfg, &mut r);
        let tower = TowerDiagram::new(&jvec, d)?;
        let cmp = verify_layer_poset_equivalence(&tower)?;
        report.check(cmp.equal(), || {
            format!("trial {i}: jvec {jvec}: {:?} vs {:?}", cmp.left, cmp.right)
        });
    }
    Ok(report)
}

/// Degree detection for piece functors: proper pieces make the comparison
/// into the stage a quasi-isomorphism; a piece exhausting a component
/// breaks it.
pub fn stage_detection_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("stage-detection");
    let mut r = rng(seed);
    let shapes = [vec![1, 1], vec![2, 1], vec![1], vec![2]];
    for i in 0..trials {
        let jvec = MultiIndex::new(shapes[i % shapes.len()].clone())?;
        let m = jvec.len();
        let piece_count = 1 + r.gen_range(0..2);
        let mut pieces = Vec::new();
        for _ in 0..piece_count {
            let tuple: Vec<u64> = (0..m)
                .map(|c| {
                    let width = jvec.entry(c) + 1;
                    // proper subset of the component intervals
                    let full = (1u64 << width) - 1;
                    let mut mask = r.gen_range(0..full);
                    if mask == full {
                        mask = 0;
                    }
                    mask
                })
                .collect();
            let deg = r.gen_range(0..3);
            pieces.push((tuple, ChainComplex::<Rat>::sphere(deg)));
        }
        let good = PieceFunctor::new(&jvec, pieces.clone())?;
        report.check(good.within_degree(), || {
            format!("trial {i}: generated piece not proper")
        });
        report.check(
            good.comparison_connectivity()? == Connectivity::Infinite,
            || format!("trial {i}: degree-bounded functor not detected as polynomial"),
        );
        // spoil one piece: occupy a full component
        let mut bad_pieces = pieces;
        let c = r.gen_range(0..m);
        let full = (1u64 << (jvec.entry(c) + 1)) - 1;
        bad_pieces[0].0[c] = full;
        let bad = PieceFunctor::new(&jvec, bad_pieces)?;
        report.check(!bad.within_degree(), || {
            format!("trial {i}: spoiled piece still proper")
        });
        report.check(
            matches!(bad.comparison_connectivity()?, Connectivity::Finite(_)),
            || format!("trial {i}: degree overflow not detected"),
        );
    }
    Ok(report)
}

/// Enumerated model ranks against the fibration oracle, exhaustively over
/// all component splittings up to the given total size.
pub fn link_rank_suite(
    max_total: usize,
    max_components: usize,
    dims: &[usize],
) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("link-ranks");
    for m in 1..=max_components {
        let mut counts = vec![0usize; m];
        loop {
            let total: usize = counts.iter().sum();
            if total <= max_total {
                for &dim in dims {
                    let spec = PointSpec::new(counts.clone(), dim)?;
                    let model = LinkModel::new(&spec)?;
                    let oracle = poincare_oracle(&spec)?;
                    report.check(model.poincare() == oracle, || {
                        format!("counts {counts:?} dim {dim}: ranks disagree with the oracle")
                    });
                }
            }
            // odometer over counts bounded by max_total per entry
            let mut pos = 0;
            loop {
                if pos == m {
                    break;
                }
                if counts[pos] < max_total {
                    counts[pos] += 1;
                    for c in counts.iter_mut().take(pos) {
                        *c = 0;
                    }
                    break;
                }
                pos += 1;
            }
            if pos == m {
                break;
            }
        }
    }
    Ok(report)
}

/// The polynomial identities: homogeneous extraction against the direct
/// monomial filter, iterated truncation, and the total-degree comparison.
pub fn polynomial_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("poly");
    let mut r = rng(seed);
    for i in 0..trials {
        let m = 1 + i % 3;
        let p = random_polynomial(m, &mut r)?;
        let jvec = random_multidegree(m, 4, &mut r)?;
        let h = p.homogeneous_part(&jvec)?;
        report.check(h == p.monomial_at(&jvec), || {
            format!("trial {i}: homogeneous part differs from the monomial filter at {jvec}")
        });
        let kvec = random_multidegree(m, 4, &mut r)?;
        report.check(verify_iterated_truncation(&p, &jvec, &kvec)?, || {
            format!("trial {i}: iterated truncation at {jvec}, {kvec} failed")
        });
        let k = r.gen_range(0..=4i64);
        let small_m = 1 + i % 3;
        let q = if small_m == m {
            p.clone()
        } else {
            random_polynomial(small_m, &mut r)?
        };
        report.check(verify_twotowers_identity(&q, k)?, || {
            format!("trial {i}: total-degree comparison at k = {k} failed")
        });
    }
    Ok(report)
}

fn random_polynomial(m: usize, r: &mut ChaCha8Rng) -> Result<MultiPolynomial> {
    let terms = r.gen_range(1..=6);
    let mut map: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
    for _ in 0..terms {
        let expo: Vec<i64> = (0..m).map(|_| r.gen_range(0..=4i64)).collect();
        let numer = r.gen_range(-9i64..=9);
        let denom = r.gen_range(1i64..=3);
        let c = Rat::parse(&format!("{numer}/{denom}"))?;
        let entry = map.entry(expo).or_insert_with(num_traits::Zero::zero);
        *entry += c;
    }
    MultiPolynomial::new(m, map)
}

fn random_multidegree(m: usize, max: i64, r: &mut ChaCha8Rng) -> Result<MultiIndex> {
    MultiIndex::new((0..m).map(|_| r.gen_range(0..=max)).collect())
}
