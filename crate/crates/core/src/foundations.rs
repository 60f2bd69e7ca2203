//! Exhaustive checks of the basic incidence facts about stars and tops.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::json;

use crate::report::Check;
use crate::spine::{PlaneKey, SpineSpace};

fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Two stars (two tops) share at most a point; a projective star and a
/// projective top share at most a point; any other star/top pair is either
/// disjoint or shares exactly a line.
pub fn check_fact_intersections(space: &SpineSpace) -> Check {
    let maximal: Vec<_> = space.strong.iter().filter(|s| s.maximal).collect();
    let mut line_sets: HashMap<Vec<usize>, usize> = HashMap::new();
    for l in &space.lines {
        let mut p = l.points.clone();
        p.sort_unstable();
        line_sets.insert(p, l.id);
    }
    let violations: Vec<serde_json::Value> = (0..maximal.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = maximal[i];
            let line_sets = &line_sets;
            maximal[i + 1..].iter().filter_map(move |y| {
                let common = sorted_intersection(&x.points, &y.points);
                let same_type = x.kind.is_star() == y.kind.is_star();
                let ok = if same_type || (x.is_projective() && y.is_projective()) {
                    common.len() <= 1
                } else {
                    common.is_empty() || line_sets.contains_key(&common)
                };
                (!ok).then(|| {
                    json!({
                        "x": {"kind": x.kind, "generator": x.generator.digits()},
                        "y": {"kind": y.kind, "generator": y.generator.digits()},
                        "common_points": common,
                    })
                })
            })
        })
        .collect();
    let pairs = maximal.len() * maximal.len().saturating_sub(1) / 2;
    let mut c = Check::new(
        "strong-subspace-intersections",
        "stars/tops meet in at most a point, or (mixed, not both projective) in nothing or a line",
    )
    .stat("maximal_strong_subspaces", maximal.len())
    .stat("pairs_checked", pairs)
    .stat("violations", violations.len());
    if let Some(w) = violations.into_iter().next() {
        c.fail(w);
    }
    c
}

/// Three pairwise coplanar lines through a common (possibly improper) point,
/// not all on one plane, lie in one star or one top.
pub fn check_tripod_span(space: &SpineSpace) -> Check {
    // bundles of lines through each proper point and each improper point
    let mut groups: Vec<Vec<usize>> = space.point_lines.clone();
    let mut by_improper: HashMap<&crate::Subspace, Vec<usize>> = HashMap::new();
    for l in &space.lines {
        if let Some(z) = &l.improper_point {
            by_improper.entry(z).or_default().push(l.id);
        }
    }
    let mut imp: Vec<_> = by_improper.into_iter().collect();
    imp.sort_by(|a, b| a.0.cmp(b.0));
    let n_proper = groups.len();
    groups.extend(imp.into_iter().map(|(_, v)| v));

    let results: Vec<(usize, Option<serde_json::Value>)> = groups
        .par_iter()
        .map(|g| {
            let n = g.len();
            let mut key: Vec<Option<PlaneKey>> = vec![None; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let kk = space.coplanar_meet(g[i], g[j]).map(|(k, _)| k);
                    key[i * n + j] = kk.clone();
                    key[j * n + i] = kk;
                }
            }
            let mut count = 0;
            for i in 0..n {
                for j in i + 1..n {
                    let Some(kij) = &key[i * n + j] else { continue };
                    for t in j + 1..n {
                        let (Some(kit), Some(_)) = (&key[i * n + t], &key[j * n + t]) else {
                            continue;
                        };
                        if kij == kit {
                            continue;
                        }
                        count += 1;
                        let (a, b, c) = (g[i], g[j], g[t]);
                        let la = &space.lines;
                        let same_star = la[a].h == la[b].h && la[a].h == la[c].h;
                        let same_top = la[a].b == la[b].b && la[a].b == la[c].b;
                        let in_star = same_star && space.star_of_line(a).is_some();
                        let in_top = same_top && space.top_of_line(a).is_some();
                        if !(in_star || in_top) {
                            return (count, Some(json!({ "lines": [a, b, c] })));
                        }
                    }
                }
            }
            (count, None)
        })
        .collect();
    let triples: usize = results.iter().map(|r| r.0).sum();
    let mut c = Check::new(
        "tripods-span-a-star-or-top",
        "pairwise coplanar concurrent (or parallel) lines not on one plane lie in a star or a top",
    )
    .stat("vertex_groups_proper", n_proper)
    .stat("vertex_groups_improper", groups.len() - n_proper)
    .stat("tripods_checked", triples);
    if let Some(w) = results.into_iter().find_map(|r| r.1) {
        c.fail(w);
    }
    c
}

/// Subspace enumeration counts equal the Gaussian binomials for every
/// `q` in `qs`, every `3 <= n <= max_n` and every `k`.
pub fn check_gaussian_counts(qs: &[u8], max_n: usize) -> Check {
    let mut c = Check::new(
        "subspace-counts-are-gaussian-binomials",
        "enumeration yields [n choose k]_q subspaces",
    );
    let mut cases = 0;
    let mut total = 0u128;
    for &q in qs {
        for n in 3..=max_n {
            let Ok(f) = crate::gf::FieldSpec::new(q, n) else {
                c.fail(json!({ "q": q, "n": n, "reason": "invalid field" }));
                continue;
            };
            for k in 0..=n {
                let got = crate::gf::enumerate_subspaces(f, k)
                    .map(|v| v.len() as u128)
                    .unwrap_or(0);
                let want = crate::gf::gaussian_binomial(q as u64, n, k);
                cases += 1;
                total += got;
                c.require(got == want, || json!({ "q": q, "n": n, "k": k, "enumerated": got as u64, "formula": want as u64 }));
            }
        }
    }
    c.set_stat("cases", cases);
    c.set_stat("subspaces_enumerated", total as u64);
    c
}
