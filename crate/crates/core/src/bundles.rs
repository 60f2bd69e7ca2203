//! Points recovered as bundles of lines: the relations `Υ` and `Υ∅` on the
//! high-dimensional cliques, their classes, and the comparison of the
//! reconstructed point-line structure with the source space.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::pencils::{family_b, recover_pencils};
use crate::relations::{iter_bits, strip, LineRelationGraph};
use crate::report::Check;
use crate::spine::SpineSpace;

/// Lines of `k1` with some related line in `k2`.
fn touching(graph: &LineRelationGraph, k1: &[usize], k2: &[usize]) -> usize {
    let mut reach = vec![0u64; graph.words()];
    for &m in k2 {
        for (r, w) in reach.iter_mut().zip(graph.row(m)) {
            *r |= w;
        }
    }
    k1.iter()
        .filter(|&&l| crate::relations::bit(&reach, l))
        .count()
}

/// Two distinct lines of `k1` are each related to some line of `k2`.
pub fn upsilon(graph: &LineRelationGraph, k1: &[usize], k2: &[usize]) -> bool {
    touching(graph, k1, k2) >= 2
}

fn disjoint_or_equal(k1: &[usize], k2: &[usize]) -> bool {
    k1 == k2 || !k1.iter().any(|l| k2.binary_search(l).is_ok())
}

/// `Υ` both ways, and the cliques are disjoint or equal.
pub fn upsilon_empty(graph: &LineRelationGraph, k1: &[usize], k2: &[usize]) -> bool {
    disjoint_or_equal(k1, k2) && upsilon(graph, k1, k2) && upsilon(graph, k2, k1)
}

/// `Υ∅` on a family of cliques as a bitset matrix.
#[derive(Clone, Debug)]
pub struct UpsilonRelation {
    pub size: usize,
    rows: Vec<Vec<u64>>,
}

impl UpsilonRelation {
    pub fn new(graph: &LineRelationGraph, family: &[Vec<usize>]) -> Self {
        let n = family.len();
        let words = n.div_ceil(64).max(1);
        // one-way Υ first, then symmetrise with the disjointness condition
        let one_way: Vec<Vec<bool>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| upsilon(graph, &family[i], &family[j]))
                    .collect()
            })
            .collect();
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0u64; words];
                for j in 0..n {
                    if one_way[i][j] && one_way[j][i] && disjoint_or_equal(&family[i], &family[j]) {
                        r[j >> 6] |= 1 << (j & 63);
                    }
                }
                r
            })
            .collect();
        UpsilonRelation { size: n, rows }
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        crate::relations::bit(&self.rows[i], j)
    }

    pub fn class(&self, i: usize) -> Vec<usize> {
        iter_bits(&self.rows[i]).collect()
    }

    /// First `(a, b, c)` with `a~b`, `b~c` but not `a~c`, over all triples;
    /// also the first non-reflexive or non-symmetric member.
    pub fn equivalence_violation(&self) -> Option<serde_json::Value> {
        for a in 0..self.size {
            if !self.related(a, a) {
                return Some(json!({ "not_reflexive": a }));
            }
            for b in iter_bits(&self.rows[a]) {
                if !self.related(b, a) {
                    return Some(json!({ "not_symmetric": [a, b] }));
                }
                if let Some(c) = iter_bits(&self.rows[b]).find(|&c| !self.related(a, c)) {
                    return Some(json!({ "not_transitive": [a, b, c] }));
                }
            }
        }
        None
    }
}

/// `⟦K, Υ∅⟧`: union of the cliques `Υ∅`-related to `family[i]`.
pub fn bundle_of(rel: &UpsilonRelation, family: &[Vec<usize>], i: usize) -> Vec<usize> {
    let mut lines: Vec<usize> = rel
        .class(i)
        .into_iter()
        .flat_map(|j| family[j].iter().copied())
        .collect();
    lines.sort_unstable();
    lines.dedup();
    lines
}

/// Points are distinct bundles; a line is incident with a point when it
/// belongs to its bundle.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ReconstructedSpace {
    /// Sorted bundles, sorted.
    pub points: Vec<Vec<usize>>,
    /// For each line id, the reconstructed points on it.
    pub line_points: Vec<Vec<usize>>,
}

impl ReconstructedSpace {
    pub fn point_of_bundle(&self, bundle: &[usize]) -> Option<usize> {
        self.points
            .binary_search_by(|p| p.as_slice().cmp(bundle))
            .ok()
    }

    /// Points `ps` are collinear when their bundles share a line.
    pub fn collinear(&self, ps: &[usize]) -> bool {
        let Some((&first, rest)) = ps.split_first() else {
            return true;
        };
        self.points[first].iter().any(|l| {
            rest.iter()
                .all(|&p| self.points[p].binary_search(l).is_ok())
        })
    }
}

pub fn reconstruct(
    line_count: usize,
    rel: &UpsilonRelation,
    family: &[Vec<usize>],
) -> ReconstructedSpace {
    let mut points: Vec<Vec<usize>> = (0..family.len())
        .map(|i| bundle_of(rel, family, i))
        .collect();
    points.sort();
    points.dedup();
    let mut line_points = vec![Vec::new(); line_count];
    for (p, b) in points.iter().enumerate() {
        for &l in b {
            line_points[l].push(p);
        }
    }
    ReconstructedSpace {
        points,
        line_points,
    }
}

/// Full pipeline from a bare relation: cliques, pencils, `ℬ`, `Υ∅` classes.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub family_b: Vec<(Vec<usize>, usize)>,
    pub relation: UpsilonRelation,
    pub space: ReconstructedSpace,
    pub equivalence_violation: Option<serde_json::Value>,
}

pub fn reconstruct_from_graph(graph: &LineRelationGraph) -> Reconstruction {
    let rec = recover_pencils(graph);
    let fb = family_b(&rec);
    let family: Vec<Vec<usize>> = fb.iter().map(|x| x.0.clone()).collect();
    let relation = UpsilonRelation::new(graph, &family);
    let equivalence_violation = relation.equivalence_violation();
    let space = reconstruct(graph.count(), &relation, &family);
    Reconstruction {
        family_b: fb,
        relation,
        space,
        equivalence_violation,
    }
}

/// The proper semibundles of maximal strong subspaces, keyed by line set,
/// with their (star side, vertex point id).
fn geometric_semibundles(space: &SpineSpace) -> HashMap<Vec<usize>, (bool, usize)> {
    let mut out = HashMap::new();
    for x in space.strong.iter().filter(|x| x.maximal) {
        for &p in &x.points {
            let lines = space.semibundle(x, &space.points[p]);
            if !lines.is_empty() {
                out.insert(lines, (x.kind.is_star(), p));
            }
        }
    }
    out
}

/// `Υ∅` on `ℬ` is an equivalence, and relates exactly the semibundles of
/// the same type with the same vertex.
pub fn check_upsilon_structure(
    space: &SpineSpace,
    stripped: &LineRelationGraph,
    inverse: &[usize],
    rec: &Reconstruction,
) -> Check {
    let geo = geometric_semibundles(space);
    let family: Vec<Vec<usize>> = rec.family_b.iter().map(|x| x.0.clone()).collect();
    let mut c = Check::new(
        &format!("empty-upsilon-glues-same-vertex-{}", stripped.kind.name()),
        "on the high-dimensional cliques the empty-intersection relation holds iff same type and same vertex, and is an equivalence",
    )
    .stat("family_b", family.len());
    let tags: Vec<Option<(bool, usize)>> = family
        .iter()
        .map(|k| {
            let mut orig: Vec<usize> = k.iter().map(|&l| inverse[l]).collect();
            orig.sort_unstable();
            geo.get(&orig).copied()
        })
        .collect();
    let unidentified = tags.iter().filter(|t| t.is_none()).count();
    c.set_stat("not_a_proper_semibundle", unidentified);
    if let Some(i) = tags.iter().position(|t| t.is_none()) {
        c.fail(json!({ "clique_not_proper_semibundle": family[i] }));
    }
    let mut agree = 0usize;
    let mut disagree = 0usize;
    for i in 0..family.len() {
        for j in 0..family.len() {
            let (Some(a), Some(b)) = (tags[i], tags[j]) else {
                continue;
            };
            if rec.relation.related(i, j) == (a == b) {
                agree += 1;
            } else {
                disagree += 1;
                c.fail(json!({ "pair": [i, j], "related": rec.relation.related(i, j), "type_vertex": [a, b] }));
            }
        }
    }
    c.set_stat("pairs_agreeing", agree);
    c.set_stat("pairs_disagreeing", disagree);
    c.set_stat("triples_for_transitivity", family.len().pow(3));
    c.set_stat("equivalence", rec.equivalence_violation.is_none());
    if let Some(w) = &rec.equivalence_violation {
        c.fail(w.clone());
    }
    c
}

/// The reconstructed structure is isomorphic to the source space through
/// `U ↦ bundle of a semibundle at U`.
pub fn verify_equivalence(
    space: &SpineSpace,
    rec: &Reconstruction,
    permutation: &[usize],
    kind: &str,
) -> Check {
    let mut c = Check::new(
        &format!("bundles-reconstruct-points-{kind}"),
        "bundles from the bare line relation are in bijection with the points, preserving incidence and collinearity",
    )
    .stat("spine_points", space.points.len())
    .stat("reconstructed_points", rec.space.points.len());
    let geo = geometric_semibundles(space);
    let family: Vec<Vec<usize>> = rec.family_b.iter().map(|x| x.0.clone()).collect();
    let fam_index: HashMap<&Vec<usize>, usize> =
        family.iter().enumerate().map(|(i, k)| (k, i)).collect();
    // U ↦ point of ⟦ℒ_U(X), Υ∅⟧ for any maximal X whose semibundle at U is in ℬ
    let mut image: Vec<Option<usize>> = vec![None; space.points.len()];
    let mut by_vertex: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
    for (lines, &(_, p)) in &geo {
        by_vertex.entry(p).or_default().push(lines);
    }
    for (p, sbs) in by_vertex {
        for lines in sbs {
            let mut mapped: Vec<usize> = lines.iter().map(|&l| permutation[l]).collect();
            mapped.sort_unstable();
            if let Some(&i) = fam_index.get(&mapped) {
                let b = bundle_of(&rec.relation, &family, i);
                let pt = rec.space.point_of_bundle(&b);
                if image[p].is_some() && image[p] != pt {
                    c.fail(json!({ "point": p, "conflicting_bundles": [image[p], pt] }));
                }
                image[p] = pt;
            }
        }
    }
    let unmapped: Vec<usize> = (0..image.len()).filter(|&p| image[p].is_none()).collect();
    c.set_stat("points_without_bundle", unmapped.len());
    if let Some(&p) = unmapped.first() {
        c.fail(json!({ "point_without_bundle": space.points[p].digits() }));
    }
    let mut hit = vec![0usize; rec.space.points.len()];
    for r in image.iter().flatten() {
        hit[*r] += 1;
    }
    let injective = hit.iter().all(|&h| h <= 1);
    let surjective = hit.iter().all(|&h| h >= 1);
    c.set_stat("injective", injective);
    c.set_stat("surjective", surjective);
    if !injective || !surjective {
        c.fail(json!({ "bundle_hits": hit.iter().enumerate().find(|(_, &h)| h != 1).map(|(i, h)| (i, *h)) }));
    }
    // incidence both ways
    let mut incidence_errors = 0usize;
    let mut lines_without_points = 0usize;
    for (l, line) in space.lines.iter().enumerate() {
        let sl = permutation[l];
        let mut expected: Vec<usize> = line.points.iter().filter_map(|&p| image[p]).collect();
        expected.sort_unstable();
        let got = &rec.space.line_points[sl];
        if got.is_empty() {
            lines_without_points += 1;
        }
        if &expected != got {
            incidence_errors += 1;
            c.fail(json!({
                "line": l,
                "class": line.class,
                "geometric_points": line.points,
                "bundles_expected": expected,
                "bundles_containing": got,
            }));
        }
    }
    c.set_stat("lines_with_wrong_incidence", incidence_errors);
    c.set_stat("lines_in_no_bundle", lines_without_points);
    // collinearity of point pairs both ways
    let mut collinear_errors = 0usize;
    let mut collinear_pairs = 0usize;
    let adj: Vec<Vec<bool>> = {
        let n = space.points.len();
        let mut m = vec![vec![false; n]; n];
        for line in &space.lines {
            for &a in &line.points {
                for &b in &line.points {
                    m[a][b] = true;
                }
            }
        }
        m
    };
    for a in 0..space.points.len() {
        for b in a + 1..space.points.len() {
            let (Some(x), Some(y)) = (image[a], image[b]) else {
                continue;
            };
            collinear_pairs += adj[a][b] as usize;
            if adj[a][b] != rec.space.collinear(&[x, y]) {
                collinear_errors += 1;
            }
        }
    }
    c.set_stat("collinear_pairs", collinear_pairs);
    c.set_stat("collinearity_errors", collinear_errors);
    if collinear_errors > 0 {
        c.fail(json!({ "collinearity_errors": collinear_errors }));
    }
    c
}

/// Strip the relation with `seed`, reconstruct, and check both the `Υ∅`
/// structure and the isomorphism.
pub fn run_reconstruction(
    space: &SpineSpace,
    graph: &LineRelationGraph,
    seed: u64,
) -> (Reconstruction, Vec<Check>) {
    let stripped = strip(graph, seed);
    let rec = reconstruct_from_graph(&stripped.graph);
    let inverse = stripped.inverse();
    let ups = check_upsilon_structure(space, &stripped.graph, &inverse, &rec);
    let eq = verify_equivalence(space, &rec, &stripped.permutation, graph.kind.name());
    (rec, vec![ups, eq])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{DeltaKind, LineRelationGraph};

    fn path_graph() -> LineRelationGraph {
        // lines 0..6; cliques {0,1,2} and {3,4,5} joined by 0-3 and 1-4
        let mut g = LineRelationGraph::empty(DeltaKind::Pi, 6);
        for (a, b) in [
            (0, 1),
            (1, 2),
            (0, 2),
            (3, 4),
            (4, 5),
            (3, 5),
            (0, 3),
            (1, 4),
        ] {
            g.add_edge(a, b);
        }
        g
    }

    #[test]
    fn upsilon_literal_evaluation() {
        let g = path_graph();
        let k1 = vec![0, 1, 2];
        let k2 = vec![3, 4, 5];
        assert!(upsilon(&g, &k1, &k2));
        assert!(upsilon(&g, &k1, &k1));
        assert!(upsilon_empty(&g, &k1, &k2));
        assert!(upsilon_empty(&g, &k1, &k1));
        let mut g2 = LineRelationGraph::empty(DeltaKind::Pi, 6);
        g2.add_edge(0, 3);
        assert!(!upsilon(&g2, &k1, &k2));
        // overlapping but unequal cliques never glue
        assert!(!upsilon_empty(&g, &[0, 1], &[1, 2]));
    }

    #[test]
    fn classes_and_reconstruction() {
        let g = path_graph();
        let fam = vec![vec![0, 1, 2], vec![3, 4, 5]];
        let rel = UpsilonRelation::new(&g, &fam);
        assert!(rel.equivalence_violation().is_none());
        assert_eq!(bundle_of(&rel, &fam, 0), vec![0, 1, 2, 3, 4, 5]);
        let r = reconstruct(6, &rel, &fam);
        assert_eq!(r.points.len(), 1);
        assert!(r.line_points.iter().all(|p| p == &[0]));
        assert!(r.collinear(&[0]));
    }

    #[test]
    fn non_transitive_relation_is_reported() {
        // a~b, b~c through disjoint cliques, a and c overlap
        let mut g = LineRelationGraph::empty(DeltaKind::Pi, 7);
        for (a, b) in [
            (0, 3),
            (1, 4),
            (3, 5),
            (4, 6),
            (0, 1),
            (3, 4),
            (5, 6),
            (1, 2),
        ] {
            g.add_edge(a, b);
        }
        let fam = vec![vec![0, 1], vec![3, 4], vec![1, 5, 6]];
        let rel = UpsilonRelation::new(&g, &fam);
        assert!(rel.related(0, 1) && rel.related(1, 2) && !rel.related(0, 2));
        assert!(rel
            .equivalence_violation()
            .unwrap()
            .get("not_transitive")
            .is_some());
    }
}
