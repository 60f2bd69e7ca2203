//! The full verification run for one parameter set.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::bundles::run_reconstruction;
use crate::cliques::{check_clique_classification, check_exchange_criterion, BK_THRESHOLD};
use crate::error::{Error, Result};
use crate::excluded::{
    build_homology_map, classify_case, verify_counterexample, CaseTag, ExcludedCase, StarStatus,
};
use crate::foundations::{check_fact_intersections, check_gaussian_counts, check_tripod_span};
use crate::pencils::{check_pencil_definability, check_ternary_concurrency};
use crate::relations::{compute_pi, compute_rho, DeltaKind, LineRelationGraph};
use crate::report::Check;
use crate::spine::{validate_params, GateReport, SpineParams, SpineSpace};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOptions {
    /// Seed of the stripping permutation.
    pub seed: u64,
    /// Bron–Kerbosch runs only up to this many lines.
    pub bk_threshold: usize,
    /// Scalar of the homology in the neighbourhood case.
    pub lambda: u8,
    /// Include the field-independent subspace count check.
    pub gaussian: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 1,
            bk_threshold: BK_THRESHOLD,
            lambda: 2,
            gaussian: true,
        }
    }
}

/// Deterministic part of a run; wall-clock data lives in [`Timing`].
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub params: SpineParams,
    pub options: SuiteOptions,
    pub gates: GateReport,
    pub case: ExcludedCase,
    pub counts: BTreeMap<String, usize>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

struct Clock(Vec<Timing>);

impl Clock {
    fn run<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.push(Timing {
            stage: stage.to_string(),
            seconds: t.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Every check that applies to `params`.
pub fn verify_all(params: &SpineParams, opts: &SuiteOptions) -> Result<(SuiteReport, Vec<Timing>)> {
    verify_all_with(params, opts, |s| Ok((compute_pi(s), compute_rho(s))))
}

/// As [`verify_all`], with the two relation graphs supplied by `graphs`
/// (e.g. from a cache).
pub fn verify_all_with<G>(
    params: &SpineParams,
    opts: &SuiteOptions,
    graphs: G,
) -> Result<(SuiteReport, Vec<Timing>)>
where
    G: FnOnce(&SpineSpace) -> Result<(LineRelationGraph, LineRelationGraph)>,
{
    let gates = validate_params(params);
    if !gates.basic {
        return Err(Error::Config(gates.violations.join("; ")));
    }
    let case = classify_case(params);
    let mut clock = Clock(Vec::new());
    let mut checks = Vec::new();
    let mut notes = Vec::new();

    if opts.gaussian {
        checks.push(clock.run("gaussian", || check_gaussian_counts(&[2, 3], 6)));
    }
    let space = clock.run("build", || SpineSpace::build(params))?;
    if space.points.is_empty() || space.lines.is_empty() {
        notes.push("degenerate space: no points or no lines".into());
    }
    checks.push(clock.run("fact-intersections", || check_fact_intersections(&space)));
    checks.push(clock.run("tripod-span", || check_tripod_span(&space)));

    let (pi, rho) = clock.run("relations", || graphs(&space))?;
    if pi.count() != space.lines.len()
        || rho.count() != space.lines.len()
        || pi.kind != DeltaKind::Pi
        || rho.kind != DeltaKind::Rho
    {
        return Err(Error::Input(
            "supplied relation graphs do not match the space".into(),
        ));
    }
    let mut rel = Check::new(
        "pencil-relation-inside-coplanarity",
        "lines in one pencil are coplanar",
    )
    .stat("pi_edges", pi.edge_count())
    .stat("rho_edges", rho.edge_count());
    rel.require(
        rho.is_subrelation_of(&pi),
        || serde_json::json!({ "reason": "rho not contained in pi" }),
    );
    checks.push(rel);

    for g in [&pi, &rho] {
        checks.push(clock.run(&format!("cliques-{}", g.kind.name()), || {
            check_clique_classification(&space, g, opts.bk_threshold)
        }));
    }
    checks.push(clock.run("exchange", || {
        check_exchange_criterion(&space, &rho, opts.bk_threshold)
    }));

    if gates.pencil_gate {
        for g in [&pi, &rho] {
            checks.push(clock.run(&format!("ternary-{}", g.kind.name()), || {
                check_ternary_concurrency(&space, g, opts.seed)
            }));
            checks.push(clock.run(&format!("pencils-{}", g.kind.name()), || {
                check_pencil_definability(&space, g, opts.seed)
            }));
        }
    } else {
        notes.push(format!(
            "pencil checks skipped: {}",
            gate_text(&gates, "pencil gate")
        ));
    }

    match (case.tag, case.star_holds) {
        (_, StarStatus::Reconstructible) => {
            for g in [&pi, &rho] {
                let (_, cs) = clock.run(&format!("reconstruct-{}", g.kind.name()), || {
                    run_reconstruction(&space, g, opts.seed)
                });
                checks.extend(cs);
            }
        }
        (CaseTag::Neighbourhood, _) => match build_homology_map(&space, opts.lambda) {
            Ok(map) => checks.push(clock.run("counterexample", || {
                verify_counterexample(&space, &map, &[&pi, &rho])
            })),
            Err(e) => notes.push(format!("counterexample not built: {e}")),
        },
        _ => notes.push(format!(
            "reconstruction not attempted: {}; expected status {}",
            gate_text(&gates, "bundle gate"),
            serde_json::to_value(case.star_holds)?
                .as_str()
                .unwrap_or("?")
        )),
    }

    let passed = checks.iter().all(|c| c.passed);
    let report = SuiteReport {
        params: params.clone(),
        options: opts.clone(),
        gates,
        case,
        counts: space.counts(),
        checks,
        notes,
        passed,
    };
    Ok((report, clock.0))
}

fn gate_text(g: &GateReport, which: &str) -> String {
    let v: Vec<&str> = g
        .violations
        .iter()
        .filter(|s| s.starts_with(which))
        .map(String::as_str)
        .collect();
    if v.is_empty() {
        format!("{which} fails")
    } else {
        v.join("; ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_is_deterministic() {
        let p = SpineParams::new(2, 5, 2, 1, 2);
        let opts = SuiteOptions {
            gaussian: false,
            ..Default::default()
        };
        let (a, _) = verify_all(&p, &opts).unwrap();
        let (b, _) = verify_all(&p, &opts).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.case.tag, CaseTag::Neighbourhood);
        assert!(a.notes.iter().any(|n| n.contains("GF(2)")));
    }

    #[test]
    fn invalid_parameters_are_config_errors() {
        assert!(matches!(
            verify_all(&SpineParams::new(2, 5, 2, 3, 2), &SuiteOptions::default()),
            Err(Error::Config(_))
        ));
    }
}
