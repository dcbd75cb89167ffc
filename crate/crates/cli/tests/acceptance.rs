//! Acceptance suite: every release criterion in one place, one pass/fail
//! line each. All checks are exact; each carries its wall-clock budget.
//!
//! Run with `cargo test -p cubelim-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::process::Command;
use std::time::{Duration, Instant};

use num::BigUint;
use serde_json::Value;

use cubelim::chain::Connectivity;
use cubelim::holim::cartesian_degree;
use cubelim::linkmodel::{derivative_cube, layer_fiber_homology};
use cubelim::polycalc::MultiPolynomial;
use cubelim::poset::{verify_cover_identities, MultiIndex};
use cubelim::suite;
use cubelim::tower::{gk_connectivity, gk_converges};

struct Gate {
    lines: Vec<(String, bool)>,
}

impl Gate {
    fn new() -> Self {
        Gate { lines: Vec::new() }
    }

    fn record(&mut self, name: &str, budget: Duration, check: impl FnOnce() -> Result<(), String>) {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let mut pass = outcome.is_ok();
        let mut note = match outcome {
            Ok(()) => format!("{:.3?}", elapsed),
            Err(msg) => msg,
        };
        if pass && elapsed > budget {
            pass = false;
            note = format!("over budget: {:.3?} > {:.3?}", elapsed, budget);
        }
        println!(
            "criterion {:<28} {}  [{}]",
            name,
            if pass { "PASS" } else { "FAIL" },
            note
        );
        self.lines.push((name.to_string(), pass));
    }

    fn finish(self) {
        let failures: Vec<&str> = self
            .lines
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n.as_str())
            .collect();
        assert!(failures.is_empty(), "failed criteria: {failures:?}");
    }
}

fn mi(entries: &[i64]) -> MultiIndex {
    MultiIndex::new(entries.to_vec()).expect("valid multidegree")
}

fn run_cli(args: &[&str]) -> Result<Value, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_cubelim"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    if !output.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    serde_json::from_slice(&output.stdout).map_err(|e| format!("bad report JSON: {e}"))
}

#[test]
fn acceptance() {
    let mut gate = Gate::new();

    // 1. The (2,1) deletion cube in dimension 3 is homotopy cartesian:
    //    all-zero total-fiber homology, infinite cartesian degree. Checked
    //    through the CLI surface and the library.
    gate.record("1-derivative-2,1-cartesian", Duration::from_secs(1), || {
        let report = run_cli(&["derivative", "--points", "2,1", "--dim", "3"])?;
        let result = &report["result"];
        if result["cartesian_degree"] != Value::String("inf".to_string()) {
            return Err(format!("cartesian_degree = {}", result["cartesian_degree"]));
        }
        let homology = result["tfiber_homology"]
            .as_object()
            .ok_or("missing tfiber_homology")?;
        if !homology.is_empty() {
            return Err(format!("nonzero homology: {homology:?}"));
        }
        let cube = derivative_cube(&mi(&[2, 1]), 3).map_err(|e| e.to_string())?;
        if cartesian_degree(&cube) != Connectivity::Infinite {
            return Err("library disagrees with the CLI".to_string());
        }
        Ok(())
    });

    // 2. First mixed derivative: multidegree (1,1) in dimension 3 has
    //    homology of rank one in degree 2 and nothing else.
    gate.record("2-first-mixed-derivative", Duration::from_secs(1), || {
        let h = layer_fiber_homology(&mi(&[1, 1]), 3).map_err(|e| e.to_string())?;
        if h.betti(2) == 1 && h.total_rank() == 1 && h.group(2).torsion.is_empty() {
            Ok(())
        } else {
            Err(format!("homology {h}"))
        }
    });

    // 3. Triple-point derivative: multidegree (1,1,1) in dimension 3 has
    //    rank two in degree 4 and nothing else (two full-support
    //    monomials).
    gate.record("3-triple-point-derivative", Duration::from_secs(1), || {
        let h = layer_fiber_homology(&mi(&[1, 1, 1]), 3).map_err(|e| e.to_string())?;
        if h.betti(4) == 2 && h.total_rank() == 2 {
            Ok(())
        } else {
            Err(format!("homology {h}"))
        }
    });

    // 4. Link-model ranks equal the fibration-oracle coefficients for all
    //    configurations with at most 5 points over at most 3 components,
    //    ambient dimensions 3 and 4.
    gate.record("4-link-rank-oracle", Duration::from_secs(5), || {
        let report = suite::link_rank_suite(5, 3, &[3, 4]).map_err(|e| e.to_string())?;
        if report.passed() {
            Ok(())
        } else {
            Err(report.failures[0].clone())
        }
    });

    // 5. Total fiber equals the iterated fiber for every direction on 50
    //    seeded cubes of dimension at most 3.
    gate.record("5-tfiber-vs-iterated", Duration::from_secs(30), || {
        let report = suite::tfiber_pipelines_suite(50, 42);
        if report.passed() {
            Ok(())
        } else {
            Err(report.failures[0].clone())
        }
    });

    // 6. One-shot homotopy limits equal iterated ones on 30 seeded
    //    product-shaped diagrams.
    gate.record("6-holim-vs-iterated", Duration::from_secs(30), || {
        let report = suite::holim_product_suite(30, 42);
        if report.passed() {
            Ok(())
        } else {
            Err(report.failures[0].clone())
        }
    });

    // 7. The ideal-cover decomposition holds on 20 seeded
    //    poset/cover/diagram triples.
    gate.record("7-ideal-decomposition", Duration::from_secs(60), || {
        let report = suite::ideal_decomposition_suite(20, 42).map_err(|e| e.to_string())?;
        if report.passed() {
            Ok(())
        } else {
            Err(report.failures[0].clone())
        }
    });

    // 8. The multidegree cover identities hold exhaustively for m <= 3,
    //    bound <= 4.
    gate.record("8-cover-identities", Duration::from_secs(5), || {
        for m in 1..=3 {
            let report = verify_cover_identities(m, 4).map_err(|e| e.to_string())?;
            if !report.passed() {
                let bad: Vec<String> = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| format!("{}: {}", c.name, c.detail))
                    .collect();
                return Err(format!("m = {m}: {bad:?}"));
            }
        }
        Ok(())
    });

    // 9. Polynomial analogy: the homogeneous part equals the monomial
    //    filter on 100 seeded polynomials, and the truncation identities
    //    hold on their suites; the worked bidegree example goes through
    //    the CLI.
    gate.record("9-polynomial-analogy", Duration::from_secs(5), || {
        let report = suite::polynomial_suite(100, 42).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(report.failures[0].clone());
        }
        let cli = run_cli(&[
            "poly",
            "homog",
            "--poly",
            "7*x1*x2+3*x1+5*x2+2",
            "--degree",
            "1,1",
        ])?;
        if cli["result"]["result"] != Value::String("7*x1*x2".to_string()) {
            return Err(format!("CLI homogeneous part: {}", cli["result"]["result"]));
        }
        let p = MultiPolynomial::parse(2, "7*x1*x2+3*x1+5*x2+2").map_err(|e| e.to_string())?;
        let lhs = p.truncate_total(1);
        let want = MultiPolynomial::parse(2, "3*x1+5*x2+2").map_err(|e| e.to_string())?;
        if lhs != want {
            return Err("total-degree truncation mismatch".to_string());
        }
        Ok(())
    });

    // 10. The connectivity formula on a fixed table of 20 triples,
    //     including the zero-slope stagnation flag.
    gate.record("10-connectivity-table", Duration::from_secs(1), || {
        // (k, handle, n, expected value, expected convergence flag)
        let table: [(i64, i64, i64, i64, bool); 20] = [
            (1, 1, 3, 0, false),
            (2, 1, 3, 0, false),
            (3, 1, 3, 0, false),
            (1, 1, 4, 1, true),
            (2, 1, 4, 2, true),
            (3, 1, 4, 3, true),
            (5, 1, 4, 5, true),
            (1, 1, 5, 2, true),
            (2, 1, 5, 4, true),
            (4, 1, 5, 8, true),
            (1, 2, 5, 0, true),
            (2, 2, 5, 1, true),
            (3, 2, 6, 5, true),
            (2, 2, 6, 3, true),
            (1, 0, 3, 2, true),
            (2, 0, 3, 3, true),
            (4, 0, 3, 5, true),
            (2, 2, 4, -1, false),
            (3, 3, 5, -2, false),
            (2, 3, 7, 2, true),
        ];
        for &(k, h, n, want, conv) in &table {
            let got = gk_connectivity(k, h, n);
            if got != want {
                return Err(format!("({k},{h},{n}): got {got}, want {want}"));
            }
            if gk_converges(h, n) != conv {
                return Err(format!("({k},{h},{n}): convergence flag wrong"));
            }
        }
        // CLI surface spot check, including the zero-slope flag
        let cli = run_cli(&["conn", "gk", "--k", "2", "--handle", "1", "--n", "3"])?;
        if cli["result"]["connectivity"] != 0 || cli["result"]["converges"] != false {
            return Err(format!("CLI gk report: {}", cli["result"]));
        }
        Ok(())
    });

    // context for criterion 3: the independent full-support count
    let spec = cubelim::linkmodel::PointSpec::new(vec![1, 1, 1], 3).expect("valid");
    let model = cubelim::linkmodel::LinkModel::new(&spec).expect("valid");
    assert_eq!(
        model.full_support_counts().get(&4),
        Some(&2),
        "independent monomial count behind criterion 3"
    );
    let one = BigUint::from(1u32);
    assert!(model.poincare().values().all(|c| c >= &one));

    gate.finish();
}
