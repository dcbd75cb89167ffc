//! Command-line interface: homotopy limits, total fibers, derivative
//! cubes, stages, layers, connectivity calculators, polynomial calculus
//! and the seeded verification suites.
//!
//! Every run emits one JSON report (stdout, or `--out`). Exit codes:
//! 0 success, 1 verification failure (first counterexample serialized),
//! 2 malformed input (with a location when the parser provides one).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cubelim::error::Error as CoreError;
use cubelim::json::{connectivity_json, CubeJson, DiagramJson, HomologyJson};
use cubelim::linkmodel::{derivative_cube, poincare_of_points, Point};
use cubelim::polycalc::{verify_iterated_truncation, verify_twotowers_identity, MultiPolynomial};
use cubelim::poset::{verify_cover_identities, MultiIndex};
use cubelim::ring::{Int, Rat, Ring};
use cubelim::suite::{self, SuiteReport};
use cubelim::tower::{
    gk_connectivity, gk_converges, layer_model, multi_convergence_bounds, StageModel, TowerDiagram,
};
use cubelim::{cartesian_degree, holim, tfiber, CubeDiagram, Diagram};

#[derive(Parser)]
#[command(name = "cubelim", version, about = "Exact chain-level cube calculus")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also print a one-line human summary to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homotopy limit of a diagram of chain complexes over a finite poset.
    Holim {
        /// Diagram JSON file.
        #[arg(long)]
        input: PathBuf,
    },
    /// Total fiber and cartesian degree of a cubical diagram.
    Tfiber {
        /// Cube JSON file.
        #[arg(long)]
        input: PathBuf,
    },
    /// Deletion cube of partial-configuration models and its total fiber.
    Derivative {
        /// Points per component, e.g. `2,1`.
        #[arg(long)]
        points: String,
        /// Ambient dimension (at least 3).
        #[arg(long)]
        dim: usize,
    },
    /// Taylor stage: homotopy limit of a supplied diagram over the
    /// punctured product.
    Stage {
        /// Multidegree, e.g. `2,1`.
        #[arg(long)]
        j: String,
        /// Diagram JSON over the punctured product (contravariant
        /// presentation).
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Homogeneous layer from a tower of stages.
    Layer {
        /// Multidegree, e.g. `2,1`.
        #[arg(long)]
        j: String,
        /// Directory containing `stages.json` (or a direct JSON file):
        /// a diagram over the multidegree downset.
        #[arg(long)]
        stages: PathBuf,
        /// Also compare against the strict-downset homotopy fiber.
        #[arg(long)]
        check: bool,
    },
    /// Connectivity calculators.
    Conn {
        #[command(subcommand)]
        which: ConnCommand,
    },
    /// Exact polynomial calculus.
    Poly {
        #[command(subcommand)]
        which: PolyCommand,
    },
    /// Seeded verification suites.
    Verify {
        #[command(subcommand)]
        which: VerifyCommand,
    },
}

#[derive(Subcommand)]
enum ConnCommand {
    /// Stage-convergence estimate `k(n - handle - 2) + 1 - handle`.
    Gk {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        handle: i64,
        #[arg(long)]
        n: i64,
    },
    /// Per-variable estimates for the multivariable tower.
    Multi {
        /// Multidegree, e.g. `1,1`.
        #[arg(long)]
        j: String,
        /// Source dimensions per variable, e.g. `1,1`.
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: i64,
    },
}

#[derive(Args)]
struct PolyInput {
    /// Polynomial over variables `x1..xm`, e.g. `7*x1*x2+3*x1+5*x2+2`.
    #[arg(long)]
    poly: String,
}

#[derive(Subcommand)]
enum PolyCommand {
    /// Homogeneous part at a multidegree, by inclusion-exclusion.
    Homog {
        #[command(flatten)]
        input: PolyInput,
        /// Multidegree, e.g. `1,1`.
        #[arg(long)]
        degree: String,
    },
    /// Componentwise truncation.
    Truncate {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long)]
        degree: String,
    },
    /// Checks that iterated truncations meet at the componentwise minimum.
    Iterated {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long)]
        j: String,
        #[arg(long)]
        k: String,
    },
    /// Checks the total-degree comparison identity at `k`.
    Twotowers {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long)]
        k: i64,
        /// Number of variables (defaults to the highest variable used).
        #[arg(long)]
        vars: Option<usize>,
    },
}

#[derive(Args)]
struct SeededArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Ideal-cover decomposition of homotopy limits on seeded triples.
    IdealDecomp(SeededArgs),
    /// Exhaustive multidegree cover identities.
    CoverIdentities {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        bound: i64,
    },
    /// Total fiber against its iterated form on seeded cubes.
    TfiberIterated(SeededArgs),
    /// Homotopy limit against the iterated one over products.
    HolimProduct(SeededArgs),
    /// Cartesian degrees under face gluing.
    Juxtaposition(SeededArgs),
    /// The two layer descriptions on seeded towers.
    LayerPoset(SeededArgs),
    /// Degree detection for piece functors.
    StageDetection(SeededArgs),
    /// Model ranks against the fibration oracle (exhaustive).
    LinkRanks {
        #[arg(long, default_value_t = 5)]
        max_points: usize,
        #[arg(long, default_value_t = 3)]
        max_components: usize,
        /// Ambient dimensions, e.g. `3,4`.
        #[arg(long, default_value = "3,4")]
        dims: String,
    },
    /// Polynomial identities on seeded random polynomials.
    Poly(SeededArgs),
    /// Euler bookkeeping of homotopy fibers.
    HofiberEuler(SeededArgs),
    /// Euler bookkeeping of totalizations.
    HolimEuler(SeededArgs),
    /// Homology invariance under integral basis change.
    BasisChange(SeededArgs),
    /// Connectivity against known quasi-isomorphism status.
    QuasiIso(SeededArgs),
    /// Every suite, with its default trial count.
    All {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

enum CliError {
    /// Exit 2: malformed input, with an optional location.
    Input(String, Option<(usize, usize)>),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Input(e.to_string(), None)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display()), None))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(
            format!("{}: {e}", path.display()),
            Some((e.line(), e.column())),
        )
    })
}

fn parse_int_list(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Input(format!("bad integer `{p}` in list `{s}`"), None))
        })
        .collect()
}

fn parse_multi_index(s: &str) -> Result<MultiIndex, CliError> {
    Ok(MultiIndex::new(parse_int_list(s)?)?)
}

fn infer_vars(poly: &str) -> usize {
    // highest x<k> mentioned; defaults to 1
    let bytes = poly.as_bytes();
    let mut best = 1usize;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'x' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 {
                if let Ok(k) = poly[i + 1..j].parse::<usize>() {
                    best = best.max(k);
                }
            }
            i = j;
        } else {
            i += 1;
        }
    }
    best
}

fn suite_result(report: &SuiteReport) -> Value {
    json!({
        "suite": report.name,
        "cases": report.cases,
        "failures": report.failures,
    })
}

struct Report {
    body: Value,
    failed: bool,
}

impl Report {
    fn ok(command: &str, computation: &str, params: Value, result: Value) -> Report {
        Report {
            body: json!({
                "command": command,
                "computation": computation,
                "params": params,
                "result": result,
                "status": "ok",
            }),
            failed: false,
        }
    }

    fn verified(
        command: &str,
        computation: &str,
        params: Value,
        result: Value,
        pass: bool,
    ) -> Report {
        Report {
            body: json!({
                "command": command,
                "computation": computation,
                "params": params,
                "result": result,
                "status": if pass { "pass" } else { "fail" },
            }),
            failed: !pass,
        }
    }
}

fn with_ring<T>(
    coeff: Option<&str>,
    run_z: impl FnOnce() -> Result<T, CliError>,
    run_q: impl FnOnce() -> Result<T, CliError>,
) -> Result<T, CliError> {
    match coeff {
        Some("Z") => run_z(),
        Some("Q") => run_q(),
        Some(other) => Err(CliError::Input(
            format!("unknown coefficient ring `{other}`"),
            None,
        )),
        None => Err(CliError::Input(
            "empty diagram: no coefficient ring".to_string(),
            None,
        )),
    }
}

fn run_holim(input: &Path) -> Result<Report, CliError> {
    let dj: DiagramJson = read_json(input)?;
    fn go<R: Ring>(dj: &DiagramJson) -> Result<Value, CliError> {
        let d: Diagram<R> = dj.to_diagram()?;
        let tot = holim(&d);
        Ok(json!({
            "coeff": R::NAME,
            "shape_elements": d.shape().len(),
            "total_ranks": tot.ranks().iter().map(|(d, r)| (d.to_string(), *r)).collect::<std::collections::BTreeMap<_, _>>(),
            "euler_characteristic": tot.euler_characteristic(),
            "homology": HomologyJson::from_summary(&tot.homology()),
        }))
    }
    let result = with_ring(dj.coeff(), || go::<Int>(&dj), || go::<Rat>(&dj))?;
    Ok(Report::ok(
        "holim",
        "homotopy limit over a finite poset via the strict-chain totalization",
        json!({"input": input.display().to_string()}),
        result,
    ))
}

fn run_tfiber(input: &Path) -> Result<Report, CliError> {
    let cj: CubeJson = read_json(input)?;
    fn go<R: Ring>(cj: &CubeJson) -> Result<Value, CliError> {
        let cube: CubeDiagram<R> = cj.to_cube()?;
        let fiber = tfiber(&cube);
        let degree = cartesian_degree(&cube);
        Ok(json!({
            "coeff": R::NAME,
            "dim": cube.dim(),
            "tfiber_homology": HomologyJson::from_summary(&fiber.homology()),
            "cartesian_degree": connectivity_json(&degree),
        }))
    }
    let result = with_ring(cj.coeff(), || go::<Int>(&cj), || go::<Rat>(&cj))?;
    Ok(Report::ok(
        "tfiber",
        "total fiber of a cubical diagram and connectivity of its comparison map",
        json!({"input": input.display().to_string()}),
        result,
    ))
}

fn run_derivative(points: &str, dim: usize) -> Result<Report, CliError> {
    let jvec = parse_multi_index(points)?;
    let cube = derivative_cube(&jvec, dim)?;
    let fiber = tfiber(&cube);
    let degree = cartesian_degree(&cube);
    let mut vertices = serde_json::Map::new();
    for mask in 0..=cube.full_mask() {
        let kept: Vec<Point> = cube
            .labels()
            .iter()
            .enumerate()
            .filter(|&(i, _)| (mask >> i) & 1 == 0)
            .map(|(_, l)| {
                let comp = (l.as_bytes()[0] - b'a') as usize;
                let idx: usize = l[1..].parse::<usize>().expect("point label") - 1;
                Point { comp, idx }
            })
            .collect();
        let poincare = poincare_of_points(&kept, dim)?;
        vertices.insert(
            cube.vertex_id(mask),
            json!(poincare
                .iter()
                .map(|(d, c)| (d.to_string(), c.to_string()))
                .collect::<std::collections::BTreeMap<_, _>>()),
        );
    }
    let result = json!({
        "spec": {"points": jvec.entries(), "dim": dim},
        "vertex_poincare": vertices,
        "tfiber_homology": HomologyJson::from_summary(&fiber.homology()),
        "cartesian_degree": connectivity_json(&degree),
    });
    Ok(Report::ok(
        "derivative",
        "deletion cube of partial-configuration models; total fiber and cartesian degree",
        json!({"points": points, "dim": dim}),
        result,
    ))
}

fn run_stage(j: &str, diagram: &Path) -> Result<Report, CliError> {
    let jvec = parse_multi_index(j)?;
    let dj: DiagramJson = read_json(diagram)?;
    fn go<R: Ring>(jvec: &MultiIndex, dj: &DiagramJson) -> Result<Value, CliError> {
        let d: Diagram<R> = dj.to_diagram()?;
        let stage = StageModel::from_diagram(jvec, d)?;
        Ok(json!({
            "coeff": R::NAME,
            "jvec": jvec.entries(),
            "stage_homology": HomologyJson::from_summary(&stage.stage.homology()),
            "stage_ranks": stage.stage.ranks().iter().map(|(d, r)| (d.to_string(), *r)).collect::<std::collections::BTreeMap<_, _>>(),
        }))
    }
    let result = with_ring(
        dj.coeff(),
        || go::<Int>(&jvec, &dj),
        || go::<Rat>(&jvec, &dj),
    )?;
    Ok(Report::ok(
        "stage",
        "Taylor stage: homotopy limit of the supplied diagram over the punctured product",
        json!({"j": j, "diagram": diagram.display().to_string()}),
        result,
    ))
}

fn stages_file(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join("stages.json")
    } else {
        path.to_path_buf()
    }
}

fn run_layer(j: &str, stages: &Path, check: bool) -> Result<Report, CliError> {
    let jvec = parse_multi_index(j)?;
    let file = stages_file(stages);
    let dj: DiagramJson = read_json(&file)?;
    fn go<R: Ring>(
        jvec: &MultiIndex,
        dj: &DiagramJson,
        check: bool,
    ) -> Result<(Value, bool), CliError> {
        let d: Diagram<R> = dj.to_diagram()?;
        let tower = TowerDiagram::new(jvec, d)?;
        let layer = layer_model(&tower)?;
        let mut body = json!({
            "coeff": R::NAME,
            "jvec": jvec.entries(),
            "layer_homology": HomologyJson::from_summary(&layer.layer.homology()),
        });
        let mut pass = true;
        if check {
            let cmp = cubelim::tower::verify_layer_poset_equivalence(&tower)?;
            pass = cmp.equal();
            body["strict_downset_comparison"] = json!({
                "hofiber_betti": cmp.left.iter().map(|(d, r)| (d.to_string(), *r)).collect::<std::collections::BTreeMap<_, _>>(),
                "cube_betti": cmp.right.iter().map(|(d, r)| (d.to_string(), *r)).collect::<std::collections::BTreeMap<_, _>>(),
                "equal": pass,
            });
        }
        Ok((body, pass))
    }
    let (result, pass) = with_ring(
        dj.coeff(),
        || go::<Int>(&jvec, &dj, check),
        || go::<Rat>(&jvec, &dj, check),
    )?;
    let params = json!({"j": j, "stages": stages.display().to_string(), "check": check});
    let computation = "homogeneous layer: total fiber of the stage decrement cube";
    if check {
        Ok(Report::verified("layer", computation, params, result, pass))
    } else {
        Ok(Report::ok("layer", computation, params, result))
    }
}

fn run_conn(which: &ConnCommand) -> Result<Report, CliError> {
    match which {
        ConnCommand::Gk { k, handle, n } => {
            let value = gk_connectivity(*k, *handle, *n);
            let converges = gk_converges(*handle, *n);
            Ok(Report::ok(
                "conn gk",
                "stage-convergence estimate k(n - handle - 2) + 1 - handle",
                json!({"k": k, "handle": handle, "n": n}),
                json!({"connectivity": value, "converges": converges}),
            ))
        }
        ConnCommand::Multi { j, p, n } => {
            let jvec = parse_multi_index(j)?;
            let pvec = parse_int_list(p)?;
            let bounds = multi_convergence_bounds(&jvec, &pvec, *n)?;
            let per_variable: Vec<Value> = bounds
                .iter()
                .map(|b| {
                    json!({
                        "stage": b.stage,
                        "cross": b.cross,
                        "converges": b.converges,
                    })
                })
                .collect();
            let stagnates = bounds.iter().any(|b| !b.converges);
            Ok(Report::ok(
                "conn multi",
                "per-variable connectivity estimates for the multivariable tower",
                json!({"j": j, "p": p, "n": n}),
                json!({"per_variable": per_variable, "stagnates": stagnates}),
            ))
        }
    }
}

fn run_poly(which: &PolyCommand) -> Result<Report, CliError> {
    match which {
        PolyCommand::Homog { input, degree } => {
            let jvec = parse_multi_index(degree)?;
            let p = MultiPolynomial::parse(jvec.len(), &input.poly)?;
            let h = p.homogeneous_part(&jvec)?;
            Ok(Report::ok(
                "poly homog",
                "homogeneous part at a multidegree via inclusion-exclusion over decrements",
                json!({"poly": input.poly, "degree": degree}),
                json!({"result": h.render()}),
            ))
        }
        PolyCommand::Truncate { input, degree } => {
            let jvec = parse_multi_index(degree)?;
            let p = MultiPolynomial::parse(jvec.len(), &input.poly)?;
            let t = p.truncate(&jvec)?;
            Ok(Report::ok(
                "poly truncate",
                "componentwise multidegree truncation",
                json!({"poly": input.poly, "degree": degree}),
                json!({"result": t.render()}),
            ))
        }
        PolyCommand::Iterated { input, j, k } => {
            let jvec = parse_multi_index(j)?;
            let kvec = parse_multi_index(k)?;
            if jvec.len() != kvec.len() {
                return Err(CliError::Input(
                    "`--j` and `--k` lengths differ".to_string(),
                    None,
                ));
            }
            let p = MultiPolynomial::parse(jvec.len(), &input.poly)?;
            let pass = verify_iterated_truncation(&p, &jvec, &kvec)?;
            Ok(Report::verified(
                "poly iterated",
                "iterated truncations meet at the componentwise minimum",
                json!({"poly": input.poly, "j": j, "k": k}),
                json!({"equal": pass}),
                pass,
            ))
        }
        PolyCommand::Twotowers { input, k, vars } => {
            let m = vars.unwrap_or_else(|| infer_vars(&input.poly));
            let p = MultiPolynomial::parse(m, &input.poly)?;
            let pass = verify_twotowers_identity(&p, *k)?;
            Ok(Report::verified(
                "poly twotowers",
                "total-degree truncation against inclusion-exclusion over the level cover",
                json!({"poly": input.poly, "k": k, "vars": m}),
                json!({"equal": pass}),
                pass,
            ))
        }
    }
}

fn seeded(args: &SeededArgs, default_trials: usize) -> (u64, usize) {
    (args.seed, args.trials.unwrap_or(default_trials))
}

fn run_verify(which: &VerifyCommand) -> Result<Report, CliError> {
    let (name, computation, report): (&str, &str, SuiteReport) = match which {
        VerifyCommand::IdealDecomp(args) => {
            let (seed, trials) = seeded(args, 20);
            (
                "verify ideal-decomp",
                "homotopy limit against the punctured cube of ideal-intersection limits",
                suite::ideal_decomposition_suite(trials, seed)?,
            )
        }
        VerifyCommand::CoverIdentities { m, bound } => {
            let r = verify_cover_identities(*m, *bound)?;
            let pass = r.passed();
            let checks: Vec<Value> = r
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
                .collect();
            return Ok(Report::verified(
                "verify cover-identities",
                "exhaustive multidegree ideal-cover identities",
                json!({"m": m, "bound": bound}),
                json!({"checks": checks}),
                pass,
            ));
        }
        VerifyCommand::TfiberIterated(args) => {
            let (seed, trials) = seeded(args, 50);
            (
                "verify tfiber-iterated",
                "direct total fiber against iterated fibers in every direction",
                suite::tfiber_pipelines_suite(trials, seed),
            )
        }
        VerifyCommand::HolimProduct(args) => {
            let (seed, trials) = seeded(args, 30);
            (
                "verify holim-product",
                "one-shot homotopy limit against the iterated one over products",
                suite::holim_product_suite(trials, seed),
            )
        }
        VerifyCommand::Juxtaposition(args) => {
            let (seed, trials) = seeded(args, 30);
            (
                "verify juxtaposition",
                "cartesian degrees under face gluing",
                suite::juxtaposition_suite(trials, seed)?,
            )
        }
        VerifyCommand::LayerPoset(args) => {
            let (seed, trials) = seeded(args, 12);
            (
                "verify layer-poset",
                "strict-downset hofiber against the decrement-cube total fiber",
                suite::layer_poset_suite(trials, seed)?,
            )
        }
        VerifyCommand::StageDetection(args) => {
            let (seed, trials) = seeded(args, 10);
            (
                "verify stage-detection",
                "degree detection through the stage comparison map",
                suite::stage_detection_suite(trials, seed)?,
            )
        }
        VerifyCommand::LinkRanks {
            max_points,
            max_components,
            dims,
        } => {
            let dims: Vec<usize> = parse_int_list(dims)?
                .into_iter()
                .map(|d| d as usize)
                .collect();
            (
                "verify link-ranks",
                "enumerated model ranks against the fibration oracle",
                suite::link_rank_suite(*max_points, *max_components, &dims)?,
            )
        }
        VerifyCommand::Poly(args) => {
            let (seed, trials) = seeded(args, 100);
            (
                "verify poly",
                "polynomial truncation and homogeneous-part identities",
                suite::polynomial_suite(trials, seed)?,
            )
        }
        VerifyCommand::HofiberEuler(args) => {
            let (seed, trials) = seeded(args, 100);
            (
                "verify hofiber-euler",
                "Euler bookkeeping of homotopy fibers",
                suite::hofiber_euler_suite(trials, seed),
            )
        }
        VerifyCommand::HolimEuler(args) => {
            let (seed, trials) = seeded(args, 50);
            (
                "verify holim-euler",
                "Euler bookkeeping of totalizations",
                suite::holim_euler_suite(trials, seed),
            )
        }
        VerifyCommand::BasisChange(args) => {
            let (seed, trials) = seeded(args, 20);
            (
                "verify basis-change",
                "homology invariance under integral basis change",
                suite::basis_change_suite(trials, seed),
            )
        }
        VerifyCommand::QuasiIso(args) => {
            let (seed, trials) = seeded(args, 50);
            (
                "verify quasi-iso",
                "infinite connectivity against known quasi-isomorphism status",
                suite::quasi_iso_suite(trials, seed),
            )
        }
        VerifyCommand::All { seed } => {
            let reports = vec![
                suite::hofiber_euler_suite(100, *seed),
                suite::basis_change_suite(20, *seed),
                suite::quasi_iso_suite(50, *seed),
                suite::tfiber_pipelines_suite(50, *seed),
                suite::holim_product_suite(30, *seed),
                suite::holim_euler_suite(50, *seed),
                suite::ideal_decomposition_suite(20, *seed)?,
                suite::juxtaposition_suite(30, *seed)?,
                suite::layer_poset_suite(12, *seed)?,
                suite::stage_detection_suite(10, *seed)?,
                suite::link_rank_suite(5, 3, &[3, 4])?,
                suite::polynomial_suite(100, *seed)?,
            ];
            let cover = verify_cover_identities(3, 4)?;
            let pass = reports.iter().all(|r| r.passed()) && cover.passed();
            let mut results: Vec<Value> = reports.iter().map(suite_result).collect();
            results.push(json!({
                "suite": "cover-identities",
                "cases": cover.checks.len(),
                "failures": cover
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| format!("{}: {}", c.name, c.detail))
                    .collect::<Vec<_>>(),
            }));
            return Ok(Report::verified(
                "verify all",
                "every verification suite at its default size",
                json!({"seed": seed}),
                json!({"suites": results}),
                pass,
            ));
        }
    };
    let pass = report.passed();
    let (seed_v, trials_v) = match which {
        VerifyCommand::IdealDecomp(a)
        | VerifyCommand::TfiberIterated(a)
        | VerifyCommand::HolimProduct(a)
        | VerifyCommand::Juxtaposition(a)
        | VerifyCommand::LayerPoset(a)
        | VerifyCommand::StageDetection(a)
        | VerifyCommand::Poly(a)
        | VerifyCommand::HofiberEuler(a)
        | VerifyCommand::HolimEuler(a)
        | VerifyCommand::BasisChange(a)
        | VerifyCommand::QuasiIso(a) => (Some(a.seed), a.trials),
        _ => (None, None),
    };
    Ok(Report::verified(
        name,
        computation,
        json!({"seed": seed_v, "trials": trials_v}),
        suite_result(&report),
        pass,
    ))
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Holim { input } => run_holim(input),
        Command::Tfiber { input } => run_tfiber(input),
        Command::Derivative { points, dim } => run_derivative(points, *dim),
        Command::Stage { j, diagram } => run_stage(j, diagram),
        Command::Layer { j, stages, check } => run_layer(j, stages, *check),
        Command::Conn { which } => run_conn(which),
        Command::Poly { which } => run_poly(which),
        Command::Verify { which } => run_verify(which),
    }
}

fn emit(cli: &Cli, body: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(body).expect("serializable report");
    match &cli.out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.verbose {
                eprintln!(
                    "{}: {}",
                    report.body["command"].as_str().unwrap_or("?"),
                    report.body["status"].as_str().unwrap_or("?")
                );
            }
            if emit(&cli, &report.body).is_err() {
                return ExitCode::from(2);
            }
            if report.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Input(msg, location)) => {
            let body = json!({
                "status": "error",
                "error": msg,
                "location": location.map(|(l, c)| json!({"line": l, "column": c})),
            });
            let _ = emit(&cli, &body);
            ExitCode::from(2)
        }
    }
}
