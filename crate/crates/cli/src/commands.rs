use std::collections::HashMap;

use anyhow::{bail, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use spine_core::bundles::run_reconstruction;
use spine_core::cliques::{
    check_clique_classification, check_exchange_criterion, family_k, geometric_families, Classifier,
};
use spine_core::excluded::{build_homology_map, classify_case, verify_counterexample, CaseTag};
use spine_core::pencils::{
    check_pencil_definability, check_ternary_concurrency, clique_dimensions, recover_pencils,
};
use spine_core::relations::{strip, DeltaKind, LineRelationGraph};
use spine_core::report::Check;
use spine_core::spine::validate_params;
use spine_core::suite::{verify_all_with, SuiteOptions};
use spine_core::SpineSpace;

use crate::cache::GraphCache;
use crate::config::{write_json, RunConfig};

/// Parameters rejected before any verification ran.
#[derive(Debug)]
pub struct GateError(pub String);

impl std::fmt::Display for GateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GateError {}

pub struct Outcome {
    pub passed: bool,
}

fn build(cfg: &RunConfig) -> Result<SpineSpace> {
    let gates = validate_params(&cfg.params);
    if !gates.basic {
        return Err(GateError(gates.violations.join("; ")).into());
    }
    Ok(SpineSpace::build(&cfg.params)?)
}

fn cache(cfg: &RunConfig) -> GraphCache {
    GraphCache::new(cfg.use_cache.then(|| cfg.cache_dir()))
}

fn print_checks(checks: &[Check]) -> bool {
    for c in checks {
        println!("{}", c.line());
    }
    checks.iter().all(|c| c.passed)
}

fn finish(cfg: &RunConfig, name: &str, report: Value, checks: &[Check]) -> Result<Outcome> {
    let path = cfg.path(name);
    write_json(&path, &report)?;
    let passed = print_checks(checks);
    println!("report: {}", path.display());
    Ok(Outcome { passed })
}

pub fn cmd_build(cfg: &RunConfig) -> Result<Outcome> {
    let space = build(cfg)?;
    let gates = validate_params(&cfg.params);
    let path = cfg.path("space.json");
    write_json(&path, &space.to_json())?;
    for (k, v) in space.counts() {
        println!("{k}: {v}");
    }
    for v in &gates.violations {
        println!("note: {v}");
    }
    println!("space: {}", path.display());
    Ok(Outcome { passed: true })
}

pub fn cmd_relations(cfg: &RunConfig) -> Result<Outcome> {
    let space = build(cfg)?;
    let mut cache = cache(cfg);
    for kind in cfg.delta.kinds() {
        let g = cache.graph(&space, kind)?;
        let path = cfg.path(&format!("relation-{}.json", kind.name()));
        write_json(&path, &g.to_json())?;
        println!(
            "{}: {} lines, {} related pairs -> {}",
            kind.name(),
            g.count(),
            g.edge_count(),
            path.display()
        );
    }
    if cache.hits > 0 {
        println!("cache hits: {}", cache.hits);
    }
    Ok(Outcome { passed: true })
}

pub fn cmd_cliques(cfg: &RunConfig) -> Result<Outcome> {
    let space = build(cfg)?;
    let mut cache = cache(cfg);
    let fam = geometric_families(&space);
    let mut checks = Vec::new();
    let mut families = serde_json::Map::new();
    for kind in cfg.delta.kinds() {
        let g = cache.graph(&space, kind)?;
        checks.push(check_clique_classification(&space, &g, cfg.bk_threshold));
        if kind == DeltaKind::Rho {
            checks.push(check_exchange_criterion(&space, &g, cfg.bk_threshold));
        }
        let classifier = Classifier::new(&fam, kind);
        let spanned: Vec<_> = family_k(&g)
            .cliques
            .iter()
            .map(|k| classifier.classify(k))
            .collect();
        families.insert(kind.name().into(), serde_json::to_value(spanned)?);
    }
    let report = json!({ "params": cfg.params, "checks": checks, "spanned_cliques": families });
    finish(cfg, "cliques.json", report, &checks)
}

fn to_original(inv: &[usize], set: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = set.iter().map(|&l| inv[l]).collect();
    v.sort_unstable();
    v
}

pub fn cmd_pencils(cfg: &RunConfig) -> Result<Outcome> {
    let space = build(cfg)?;
    let gates = validate_params(&cfg.params);
    let mut cache = cache(cfg);
    let mut checks = Vec::new();
    let mut out = serde_json::Map::new();
    for kind in cfg.delta.kinds() {
        let g = cache.graph(&space, kind)?;
        let stripped = strip(&g, cfg.seed);
        let inv = stripped.inverse();
        let rec = recover_pencils(&stripped.graph);
        let map_all = |sets: &[Vec<usize>]| {
            let mut v: Vec<Vec<usize>> = sets.iter().map(|s| to_original(&inv, s)).collect();
            v.sort();
            v
        };
        let mut dims: Vec<(Vec<usize>, usize)> = clique_dimensions(&rec)
            .into_iter()
            .map(|(k, d)| (to_original(&inv, &k), d))
            .collect();
        dims.sort();
        out.insert(
            kind.name().into(),
            json!({
                "pencils": map_all(&rec.pencils),
                "parallel_pencils": map_all(&rec.parallel),
                "family_b": dims.iter().filter(|x| x.1 >= 3).map(|(k, d)| json!({ "lines": k, "dimension": d })).collect::<Vec<_>>(),
                "clique_dimensions": dims.iter().map(|x| x.1).fold(std::collections::BTreeMap::<usize, usize>::new(), |mut m, d| { *m.entry(d).or_default() += 1; m }),
            }),
        );
        if gates.pencil_gate {
            checks.push(check_ternary_concurrency(&space, &g, cfg.seed));
            checks.push(check_pencil_definability(&space, &g, cfg.seed));
        }
    }
    if !gates.pencil_gate {
        println!(
            "note: pencil checks not run; {}",
            gates.violations.join("; ")
        );
    }
    let report = json!({ "params": cfg.params, "seed": cfg.seed, "gates": gates, "checks": checks, "recovered": out });
    finish(cfg, "pencils.json", report, &checks)
}

fn bundle_digest(lines: &[usize]) -> String {
    let text = lines
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",");
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

fn bijection_table(
    space: &SpineSpace,
    g: &LineRelationGraph,
    seed: u64,
    points: &[Vec<usize>],
) -> Vec<Value> {
    let inv = strip(g, seed).inverse();
    let by_bundle: HashMap<Vec<usize>, usize> = space
        .point_lines
        .iter()
        .enumerate()
        .map(|(p, ls)| {
            let mut ls = ls.clone();
            ls.sort_unstable();
            (ls, p)
        })
        .collect();
    points
        .iter()
        .map(|b| {
            let orig = to_original(&inv, b);
            json!({
                "bundle_digest": bundle_digest(&orig),
                "lines": orig.len(),
                "point": by_bundle.get(&orig).copied(),
            })
        })
        .collect()
}

pub fn cmd_reconstruct(cfg: &RunConfig) -> Result<Outcome> {
    let gates = validate_params(&cfg.params);
    if !gates.bundle_gate {
        bail!(GateError(format!(
            "reconstruction needs the bundle gate: {}",
            gates.violations.join("; ")
        )));
    }
    let space = build(cfg)?;
    let mut cache = cache(cfg);
    let mut checks = Vec::new();
    let mut out = serde_json::Map::new();
    for kind in cfg.delta.kinds() {
        let g = cache.graph(&space, kind)?;
        let (rec, cs) = run_reconstruction(&space, &g, cfg.seed);
        out.insert(
            kind.name().into(),
            json!({
                "family_b": rec.family_b.len(),
                "reconstructed_points": rec.space.points.len(),
                "spine_points": space.points.len(),
                "bijection": bijection_table(&space, &g, cfg.seed, &rec.space.points),
                "checks": cs,
            }),
        );
        checks.extend(cs);
    }
    let report =
        json!({ "params": cfg.params, "seed": cfg.seed, "gates": gates, "reconstruction": out });
    finish(cfg, "reconstruction.json", report, &checks)
}

pub fn cmd_counterexample(cfg: &RunConfig) -> Result<Outcome> {
    let case = classify_case(&cfg.params);
    if case.tag != CaseTag::Neighbourhood {
        bail!(GateError(format!(
            "the homology counterexample needs w = k and m = k-1 (got {})",
            cfg.params.label()
        )));
    }
    let space = build(cfg)?;
    let map = match build_homology_map(&space, cfg.lambda) {
        Ok(m) => m,
        Err(e) => bail!(GateError(e.to_string())),
    };
    let mut cache = cache(cfg);
    let pi = cache.graph(&space, DeltaKind::Pi)?;
    let rho = cache.graph(&space, DeltaKind::Rho)?;
    let check = verify_counterexample(&space, &map, &[&pi, &rho]);
    let report = json!({
        "params": cfg.params,
        "case": case,
        "homology": {
            "star_vertex": map.vertex.digits(),
            "centre": map.centre.digits(),
            "axis": map.axis.digits(),
            "lambda": map.lambda,
            "moved_lines": map.image.iter().enumerate().filter(|(a, b)| a != *b).count(),
        },
        "check": check,
    });
    let checks = [check];
    finish(cfg, "counterexample.json", report, &checks)
}

pub fn cmd_verify_all(cfg: &RunConfig) -> Result<Outcome> {
    let opts = SuiteOptions {
        seed: cfg.seed,
        bk_threshold: cfg.bk_threshold,
        lambda: cfg.lambda,
        gaussian: true,
    };
    let mut cache = cache(cfg);
    let res = verify_all_with(&cfg.params, &opts, |s| {
        let get = |c: &mut GraphCache, k| {
            c.graph(s, k)
                .map_err(|e| spine_core::Error::Input(e.to_string()))
        };
        Ok((
            get(&mut cache, DeltaKind::Pi)?,
            get(&mut cache, DeltaKind::Rho)?,
        ))
    });
    let (report, timings) = match res {
        Ok(x) => x,
        Err(spine_core::Error::Config(msg)) => bail!(GateError(msg)),
        Err(e) => return Err(e.into()),
    };
    write_json(&cfg.path("verify-all.timings.json"), &timings)?;
    for n in &report.notes {
        println!("note: {n}");
    }
    let checks = report.checks.clone();
    finish(
        cfg,
        "verify-all.json",
        serde_json::to_value(&report)?,
        &checks,
    )
}
