//! Acceptance criteria 1–9: one PASS/FAIL line each; exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use spine_core::bundles::run_reconstruction;
use spine_core::cliques::{check_clique_classification, check_exchange_criterion, BK_THRESHOLD};
use spine_core::excluded::{build_homology_map, verify_counterexample};
use spine_core::foundations::{check_fact_intersections, check_gaussian_counts, check_tripod_span};
use spine_core::gf::enumerate_subspaces;
use spine_core::pencils::{check_pencil_definability, check_ternary_concurrency};
use spine_core::relations::{compute_pi, compute_rho};
use spine_core::report::Check;
use spine_core::spine::validate_params;
use spine_core::suite::{verify_all, SuiteOptions};
use spine_core::{SpineParams, SpineSpace};

const SEED: u64 = 20240601;

fn cfg1() -> SpineParams {
    SpineParams::new(2, 6, 2, 1, 3)
}

fn cfg3() -> SpineParams {
    SpineParams::new(2, 6, 3, 0, 1)
}

fn summary(checks: &[&Check], keys: &[&str]) -> String {
    checks
        .iter()
        .map(|c| {
            let s: Vec<String> = keys
                .iter()
                .filter_map(|k| c.stats.get(*k).map(|v| format!("{k}={v}")))
                .collect();
            format!(
                "{} {} [{}]",
                c.name,
                if c.passed { "ok" } else { "red" },
                s.join(" ")
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn all(checks: &[&Check], keys: &[&str]) -> Outcome {
    Outcome {
        passed: checks.iter().all(|c| c.passed),
        detail: summary(checks, keys),
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, Outcome, f64)> = Vec::new();
    let mut run = |n: u32, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        println!(
            "criterion {n}: {} ({:.1}s) {}",
            if o.passed { "PASS" } else { "FAIL" },
            secs,
            o.detail
        );
        results.push((n, o, secs));
    };

    let s1 = SpineSpace::build(&cfg1()).expect("config 1");
    let (pi1, rho1) = (compute_pi(&s1), compute_rho(&s1));

    run(1, &mut || {
        let a = check_clique_classification(&s1, &pi1, BK_THRESHOLD);
        let b = check_clique_classification(&s1, &rho1, BK_THRESHOLD);
        all(
            &[&a, &b],
            &[
                "bron_kerbosch_cliques",
                "geometric_not_found",
                "found_not_geometric",
                "unclassified",
            ],
        )
    });

    run(2, &mut || {
        let c = check_exchange_criterion(&s1, &rho1, BK_THRESHOLD);
        all(
            &[&c],
            &[
                "maximal_cliques",
                "misclassified",
                "misclassified.affine-semiflat",
            ],
        )
    });

    let s3 = SpineSpace::build(&cfg3()).expect("config 3");
    let (pi3, rho3) = (compute_pi(&s3), compute_rho(&s3));
    let gate3 = validate_params(&cfg3()).pencil_gate;

    run(3, &mut || {
        if !gate3 {
            return Outcome {
                passed: false,
                detail: "plane gate fails on (2,6,3,0,1)".into(),
            };
        }
        let a = check_ternary_concurrency(&s3, &pi3, SEED);
        let b = check_ternary_concurrency(&s3, &rho3, SEED);
        all(
            &[&a, &b],
            &[
                "triples_checked",
                "sampled",
                "abstract_not_geometric",
                "geometric_not_abstract",
            ],
        )
    });

    run(4, &mut || {
        let a = check_pencil_definability(&s3, &pi3, SEED);
        let b = check_pencil_definability(&s3, &rho3, SEED);
        all(
            &[&a, &b],
            &[
                "geometric_proper_pencils",
                "recovered_pencils",
                "geometric_not_recovered",
                "recovered_not_geometric",
            ],
        )
    });

    let (_, rec_pi) = run_reconstruction(&s1, &pi1, SEED);
    let (_, rec_rho) = run_reconstruction(&s1, &rho1, SEED);

    run(5, &mut || {
        let field = spine_core::FieldSpec::new(2, 6).unwrap();
        let w = cfg1().w_subspace().unwrap();
        let oracle = enumerate_subspaces(field, 2)
            .unwrap()
            .iter()
            .filter(|u| u.meet(&w).dim() == 1)
            .count();
        let a = &rec_pi[1];
        let b = &rec_rho[1];
        let mut o = all(
            &[a, b],
            &[
                "reconstructed_points",
                "injective",
                "surjective",
                "lines_in_no_bundle",
                "collinearity_errors",
            ],
        );
        o.passed &= oracle == 196 && s1.points.len() == oracle;
        o.detail = format!("oracle_points={oracle}; {}", o.detail);
        o
    });

    run(6, &mut || {
        all(
            &[&rec_pi[0], &rec_rho[0]],
            &[
                "family_b",
                "pairs_agreeing",
                "pairs_disagreeing",
                "equivalence",
            ],
        )
    });

    run(7, &mut || {
        let s = SpineSpace::build(&SpineParams::new(3, 5, 2, 1, 2)).expect("neighbourhood config");
        let map = match build_homology_map(&s, 2) {
            Ok(m) => m,
            Err(e) => {
                return Outcome {
                    passed: false,
                    detail: e.to_string(),
                }
            }
        };
        let c = verify_counterexample(&s, &map, &[&compute_pi(&s), &compute_rho(&s)]);
        let mut o = all(&[&c], &["pi_violations", "rho_violations", "moved_lines"]);
        if let Some(w) = c.stats.get("witness") {
            o.detail = format!(
                "{} U={} U'={} L={}",
                o.detail, w["U"], w["U_prime"], w["L"]["id"]
            );
        }
        o
    });

    run(8, &mut || {
        let checks = [
            check_fact_intersections(&s1),
            check_tripod_span(&s1),
            check_fact_intersections(&s3),
            check_tripod_span(&s3),
            check_gaussian_counts(&[2, 3], 6),
        ];
        let refs: Vec<&Check> = checks.iter().collect();
        all(&refs, &["pairs_checked", "tripods_checked", "cases"])
    });

    run(9, &mut || {
        let opts = SuiteOptions {
            seed: SEED,
            ..Default::default()
        };
        let text =
            || serde_json::to_string_pretty(&verify_all(&cfg1(), &opts).expect("suite").0).unwrap();
        let (a, b) = (text(), text());
        Outcome {
            passed: a == b,
            detail: format!("report bytes {} vs {}", a.len(), b.len()),
        }
    });

    let failed: Vec<u32> = results
        .iter()
        .filter(|r| !r.1.passed)
        .map(|r| r.0)
        .collect();
    println!(
        "acceptance: {}/{} criteria pass{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; red: {failed:?}")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
