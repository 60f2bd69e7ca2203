//! Parameter sets outside the bundle gate, and the neighbourhood-of-a-point
//! case where a homology of one star induces a line-relation automorphism
//! that is not a collineation.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::gf::{enumerate_between, Subspace};
use crate::relations::LineRelationGraph;
use crate::report::Check;
use crate::spine::{validate_params, SpineParams, SpineSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    Grassmann,
    SinglePoint,
    Star,
    Top,
    Neighbourhood,
    None,
}

/// Whether points are definable from the line relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StarStatus {
    Holds,
    FailsByWitness,
    /// Bundle gate holds; the reconstruction pipeline applies.
    Reconstructible,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExcludedCase {
    pub tag: CaseTag,
    pub star_holds: StarStatus,
}

pub fn classify_case(p: &SpineParams) -> ExcludedCase {
    let SpineParams { n, k, m, w, .. } = *p;
    let (tag, star_holds) = if w == n {
        (CaseTag::Grassmann, StarStatus::Holds)
    } else if w == k && m == k {
        (CaseTag::SinglePoint, StarStatus::Holds)
    } else if m + 1 == k && w == m {
        (CaseTag::Star, StarStatus::Holds)
    } else if w == k + 1 && m == k {
        (CaseTag::Top, StarStatus::Holds)
    } else if w == k && m + 1 == k {
        (CaseTag::Neighbourhood, StarStatus::FailsByWitness)
    } else if validate_params(p).bundle_gate {
        (CaseTag::None, StarStatus::Reconstructible)
    } else {
        (CaseTag::None, StarStatus::Unknown)
    };
    ExcludedCase { tag, star_holds }
}

/// The line permutation induced by a homology of one star.
#[derive(Clone, Debug, Serialize)]
pub struct LineMap {
    pub image: Vec<usize>,
    /// Strong-subspace id of the star `X`.
    pub star: usize,
    pub vertex: Subspace,
    pub centre: Subspace,
    pub axis: Subspace,
    pub lambda: u8,
    /// Row-vector matrix of the homology on `V`.
    #[serde(skip)]
    pub matrix: Vec<Vec<u8>>,
}

impl LineMap {
    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.image.len()];
        self.image
            .iter()
            .all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true))
    }

    pub fn apply(&self, u: &Subspace) -> Subspace {
        u.map_rows(&self.matrix)
    }
}

fn dot(space: &SpineSpace, a: &[u8], b: &[u8]) -> u8 {
    let f = space.field;
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Homology with centre `W` and scalar `lambda` on the star `[H)` for the
/// first `(k-1)`-subspace `H` of `W`.
pub fn build_homology_map(space: &SpineSpace, lambda: u8) -> Result<LineMap> {
    let p = &space.params;
    if classify_case(p).tag != CaseTag::Neighbourhood {
        return Err(Error::Unsupported(format!(
            "homology map needs w = k and m = k-1, got {}",
            p.label()
        )));
    }
    let f = space.field;
    if f.q == 2 {
        return Err(Error::Unsupported(
            "over GF(2) every homology is the identity".into(),
        ));
    }
    if lambda <= 1 || lambda >= f.q {
        return Err(Error::Input(format!(
            "lambda must lie in 2..{}, got {lambda}",
            f.q
        )));
    }
    let w = &space.w_subspace;
    let h = enumerate_between(&f.zero(), w, p.k - 1)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Contract("W has no hyperplane".into()))?;
    let star = space
        .strong_by_generator(&h)
        .filter(|&s| space.strong[s].kind.is_star())
        .ok_or_else(|| Error::Contract(format!("no star with vertex {}", h.digits())))?;
    let w0 = w
        .basis()
        .iter()
        .find(|r| !h.contains_vector(r))
        .cloned()
        .ok_or_else(|| Error::Contract("W equals H".into()))?;
    let a = h
        .perp()
        .basis()
        .iter()
        .find(|r| dot(space, r, &w0) != 0)
        .cloned()
        .ok_or_else(|| Error::Contract("no functional separates W from H".into()))?;
    let s = f.inv(dot(space, &a, &w0));
    let a: Vec<u8> = a.iter().map(|&x| f.mul(x, s)).collect();
    // v ↦ v + (lambda-1)(v·a) w0
    let c = f.sub(lambda, 1);
    let matrix: Vec<Vec<u8>> = (0..f.n)
        .map(|i| {
            (0..f.n)
                .map(|j| f.add(u8::from(i == j), f.mul(c, f.mul(a[i], w0[j]))))
                .collect()
        })
        .collect();
    let axis = crate::gf::rref(f, std::slice::from_ref(&a))?.perp();

    let by_hb: HashMap<(&Subspace, &Subspace), usize> =
        space.lines.iter().map(|l| ((&l.h, &l.b), l.id)).collect();
    let mut image = Vec::with_capacity(space.lines.len());
    for l in &space.lines {
        if l.h != h {
            image.push(l.id);
            continue;
        }
        let b = l.b.map_rows(&matrix);
        let id = by_hb
            .get(&(&h, &b))
            .copied()
            .ok_or_else(|| Error::Contract(format!("image of line {} is not a line", l.id)))?;
        image.push(id);
    }
    Ok(LineMap {
        image,
        star,
        vertex: h,
        centre: w.clone(),
        axis,
        lambda,
        matrix,
    })
}

/// Pairs checked, violations, first violating pair.
fn preserves(graph: &LineRelationGraph, map: &LineMap) -> (usize, usize, Option<(usize, usize)>) {
    let (mut checked, mut violations, mut first) = (0usize, 0usize, None);
    for a in 0..graph.count() {
        for b in a + 1..graph.count() {
            checked += 1;
            if graph.adjacent(a, b) != graph.adjacent(map.image[a], map.image[b]) {
                violations += 1;
                first.get_or_insert((a, b));
            }
        }
    }
    (checked, violations, first)
}

/// The line map is a relation automorphism for every supplied graph, yet it
/// carries the bundle at some point to a line set that is no bundle.
pub fn verify_counterexample(
    space: &SpineSpace,
    map: &LineMap,
    graphs: &[&LineRelationGraph],
) -> Check {
    let mut c = Check::new(
        "neighbourhood-homology-breaks-bundles",
        "a star homology with centre W preserves the line relations but not the bundles",
    );
    c.require(
        map.is_bijection(),
        || json!({"reason": "line map is not a bijection"}),
    );

    for g in graphs {
        let (checked, violations, bad) = preserves(g, map);
        c.set_stat(&format!("{}_pairs_checked", g.kind.name()), checked);
        c.set_stat(&format!("{}_violations", g.kind.name()), violations);
        if let Some((a, b)) = bad {
            c.fail(json!({"relation": g.kind.name(), "lines": [a, b]}));
        }
    }

    let w = &map.centre;
    let moved: Vec<usize> = (0..map.image.len())
        .filter(|&l| map.image[l] != l)
        .collect();
    let moved_outside = moved
        .iter()
        .filter(|&&l| space.lines[l].h != map.vertex || space.lines[l].b.includes(w))
        .count();
    let axis_fixed = space
        .lines
        .iter()
        .filter(|l| l.h == map.vertex && !l.b.includes(w) && map.axis.includes(&l.b))
        .count();
    c.set_stat("moved_lines", moved.len());
    c.set_stat("moved_outside_star_or_through_centre", moved_outside);
    c.set_stat("fixed_lines_in_axis", axis_fixed);
    if moved_outside > 0 {
        c.fail(json!({"reason": "a line outside X or through W is moved"}));
    }

    let bundles: BTreeSet<Vec<usize>> = space.point_lines.iter().cloned().collect();
    let mut found = None;
    'tops: for y in space
        .strong
        .iter()
        .filter(|s| !s.kind.is_star() && s.maximal)
    {
        if !y.generator.includes(w) || !y.generator.includes(&map.vertex) {
            continue;
        }
        let Some(l) = space
            .lines_with_h(&map.vertex)
            .iter()
            .copied()
            .find(|&l| space.lines[l].b == y.generator)
        else {
            continue;
        };
        for &u in &space.lines[l].points {
            let up = map.apply(&space.points[u]);
            if up == space.points[u] {
                continue;
            }
            let Some(u2) = space.point_id(&up) else {
                continue;
            };
            let x = &space.strong[map.star];
            let sb_x = space.semibundle(x, &space.points[u]);
            let sb_y = space.semibundle(y, &space.points[u]);
            let img = |set: &[usize]| {
                let mut v: Vec<usize> = set.iter().map(|&i| map.image[i]).collect();
                v.sort_unstable();
                v
            };
            let y_fixed = img(&sb_y) == sb_y;
            let x_moved = img(&sb_x) == space.semibundle(x, &up);
            let bundle_img = img(&space.point_lines[u]);
            let is_bundle = bundles.contains(&bundle_img);
            if y_fixed && x_moved && !is_bundle {
                found = Some(json!({
                    "U": space.points[u].digits(),
                    "U_prime": space.points[u2].digits(),
                    "L": {"id": l, "h": space.lines[l].h.digits(), "b": space.lines[l].b.digits()},
                    "X": x.generator.digits(),
                    "Y": y.generator.digits(),
                    "bundle_size": space.point_lines[u].len(),
                }));
                break 'tops;
            }
        }
    }
    match found {
        Some(wit) => c.set_stat("witness", wit),
        None => c.fail(json!({"reason": "no point whose bundle image is not a bundle"})),
    }
    c
}
