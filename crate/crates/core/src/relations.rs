//! The binary line relations: coplanarity (`pi`) and lying in one pencil of
//! lines with a proper vertex (`rho`), as bare graphs on line ids.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::spine::SpineSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeltaKind {
    #[serde(rename = "pi")]
    Pi,
    #[serde(rename = "rho")]
    Rho,
}

impl DeltaKind {
    pub fn name(self) -> &'static str {
        match self {
            DeltaKind::Pi => "pi",
            DeltaKind::Rho => "rho",
        }
    }
}

/// A fixed-width bitset over line ids.
pub type Row = [u64];

#[inline]
pub fn bit(row: &Row, i: usize) -> bool {
    row[i >> 6] >> (i & 63) & 1 == 1
}

pub fn iter_bits(row: &Row) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let t = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(w * 64 + t)
        })
    })
}

/// Symmetric, irreflexive relation on `0..count` stored as one bitset per
/// line. Nothing about the geometry survives in this type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineRelationGraph {
    pub kind: DeltaKind,
    count: usize,
    words: usize,
    bits: Vec<u64>,
}

impl LineRelationGraph {
    pub fn empty(kind: DeltaKind, count: usize) -> Self {
        let words = count.div_ceil(64).max(1);
        LineRelationGraph {
            kind,
            count,
            words,
            bits: vec![0; words * count],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b, "relation is irreflexive");
        self.bits[a * self.words + (b >> 6)] |= 1 << (b & 63);
        self.bits[b * self.words + (a >> 6)] |= 1 << (a & 63);
    }

    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        bit(self.row(a), b)
    }

    #[inline]
    pub fn row(&self, a: usize) -> &Row {
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(a))
    }

    pub fn degree(&self, a: usize) -> usize {
        self.row(a).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.count).map(|a| self.degree(a)).sum::<usize>() / 2
    }

    /// `true` iff every edge of `self` is an edge of `other`.
    pub fn is_subrelation_of(&self, other: &LineRelationGraph) -> bool {
        self.count == other.count && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Lines adjacent to every line of `set` (members of `set` excluded).
    pub fn common_neighbors(&self, set: &[usize]) -> Vec<u64> {
        let mut acc = vec![!0u64; self.words];
        for &l in set {
            for (a, r) in acc.iter_mut().zip(self.row(l)) {
                *a &= r;
            }
        }
        let tail = self.count % 64;
        if tail != 0 {
            acc[self.words - 1] &= (1u64 << tail) - 1;
        } else if self.count == 0 {
            acc[0] = 0;
        }
        acc
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }

    /// Relabel lines: line `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> LineRelationGraph {
        let mut g = LineRelationGraph::empty(self.kind, self.count);
        for a in 0..self.count {
            for b in self.neighbors(a).filter(|&b| b > a) {
                g.add_edge(perm[a], perm[b]);
            }
        }
        g
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<String> = (0..self.count)
            .map(|a| {
                let mut runs = Vec::new();
                let mut cur = false;
                let mut len = 0usize;
                for b in 0..self.count {
                    if self.adjacent(a, b) == cur {
                        len += 1;
                    } else {
                        runs.push(len.to_string());
                        cur = !cur;
                        len = 1;
                    }
                }
                runs.push(len.to_string());
                runs.join(",")
            })
            .collect();
        json!({ "delta_kind": self.kind, "count": self.count, "adjacency": rows })
    }

    /// Import from the run-length JSON form; validates symmetry and
    /// irreflexivity.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let kind: DeltaKind = serde_json::from_value(v["delta_kind"].clone())?;
        let count = v["count"]
            .as_u64()
            .ok_or_else(|| Error::Input("missing count".into()))? as usize;
        let rows = v["adjacency"]
            .as_array()
            .ok_or_else(|| Error::Input("missing adjacency".into()))?;
        if rows.len() != count {
            return Err(Error::Input(format!(
                "{} rows for {count} lines",
                rows.len()
            )));
        }
        let mut g = LineRelationGraph::empty(kind, count);
        for (a, r) in rows.iter().enumerate() {
            let s = r
                .as_str()
                .ok_or_else(|| Error::Input("row is not a string".into()))?;
            let mut pos = 0usize;
            let mut cur = false;
            for run in s.split(',') {
                let len: usize = run
                    .parse()
                    .map_err(|_| Error::Input(format!("bad run length {run:?}")))?;
                if cur {
                    for b in pos..pos + len {
                        if b >= count {
                            return Err(Error::Input("row overflows count".into()));
                        }
                        g.bits[a * g.words + (b >> 6)] |= 1 << (b & 63);
                    }
                }
                pos += len;
                cur = !cur;
            }
            if pos != count {
                return Err(Error::Input(format!(
                    "row {a} has length {pos}, expected {count}"
                )));
            }
        }
        for a in 0..count {
            if g.adjacent(a, a) {
                return Err(Error::Input(format!("line {a} is related to itself")));
            }
            if g.neighbors(a).any(|b| !g.adjacent(b, a)) {
                return Err(Error::Input(format!("row {a} is not symmetric")));
            }
        }
        Ok(g)
    }
}

fn compute(space: &SpineSpace, kind: DeltaKind) -> LineRelationGraph {
    let mut g = LineRelationGraph::empty(kind, space.lines.len());
    // coplanar pairs share either H or B, so only look inside those groups
    for group in space.star_groups().into_iter().chain(space.top_groups()) {
        for (i, &a) in group.iter().enumerate() {
            for &b in &group[i + 1..] {
                if let Some((_, u)) = space.coplanar_meet(a, b) {
                    if kind == DeltaKind::Pi || space.is_proper(&u) {
                        g.add_edge(a, b);
                    }
                }
            }
        }
    }
    g
}

/// Coplanarity of lines.
pub fn compute_pi(space: &SpineSpace) -> LineRelationGraph {
    compute(space, DeltaKind::Pi)
}

/// Lying in one pencil of lines with a proper vertex.
pub fn compute_rho(space: &SpineSpace) -> LineRelationGraph {
    compute(space, DeltaKind::Rho)
}

/// A relabelled copy of the graph with a seeded random permutation; the
/// permutation maps original line ids to stripped ids.
#[derive(Clone, Debug)]
pub struct Stripped {
    pub graph: LineRelationGraph,
    pub permutation: Vec<usize>,
}

impl Stripped {
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.permutation.len()];
        for (i, &p) in self.permutation.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }
}

pub fn strip(graph: &LineRelationGraph, seed: u64) -> Stripped {
    let mut perm: Vec<usize> = (0..graph.count()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perm.shuffle(&mut rng);
    Stripped {
        graph: graph.permuted(&perm),
        permutation: perm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spine::SpineParams;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn cfg1() -> SpineSpace {
        SpineSpace::build(&SpineParams::new(2, 6, 2, 1, 3)).unwrap()
    }

    /// All coplanar pairs via explicit enumeration of planes.
    type Pairs = HashSet<(usize, usize)>;

    fn plane_oracle(space: &SpineSpace) -> (Pairs, Pairs) {
        let mut pi = HashSet::new();
        let mut rho = HashSet::new();
        for e in space.planes() {
            for (i, &a) in e.lines.iter().enumerate() {
                for &b in &e.lines[i + 1..] {
                    pi.insert((a.min(b), a.max(b)));
                }
            }
            // pencils p(U, E) with proper vertex U
            let k = space.params.k;
            for u in crate::gf::enumerate_between(&e.key.lower, &e.key.upper, k).unwrap() {
                if !space.is_proper(&u) {
                    continue;
                }
                let through: Vec<usize> = e
                    .lines
                    .iter()
                    .copied()
                    .filter(|&l| u.includes(&space.lines[l].h) && space.lines[l].b.includes(&u))
                    .collect();
                for (i, &a) in through.iter().enumerate() {
                    for &b in &through[i + 1..] {
                        rho.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
        (pi, rho)
    }

    fn edges(g: &LineRelationGraph) -> HashSet<(usize, usize)> {
        (0..g.count())
            .flat_map(|a| g.neighbors(a).filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }

    #[test]
    fn relations_match_plane_enumeration() {
        for p in [
            SpineParams::new(2, 6, 2, 1, 3),
            SpineParams::new(3, 5, 2, 1, 2),
        ] {
            let s = SpineSpace::build(&p).unwrap();
            let (pi_o, rho_o) = plane_oracle(&s);
            let pi = compute_pi(&s);
            let rho = compute_rho(&s);
            assert_eq!(edges(&pi), pi_o, "{}", p.label());
            assert_eq!(edges(&rho), rho_o, "{}", p.label());
            assert!(rho.is_subrelation_of(&pi));
        }
    }

    #[test]
    fn pencil_of_lines_is_coplanar_and_skew_lines_are_not() {
        let s = cfg1();
        let pi = compute_pi(&s);
        let rho = compute_rho(&s);
        for a in 0..s.lines.len() {
            for b in pi.neighbors(a) {
                // coplanar lines share H or B
                assert!(s.lines[a].h == s.lines[b].h || s.lines[a].b == s.lines[b].b);
            }
        }
        // lines in one star with closures meeting only in H are skew
        let star = s.star_groups().into_iter().find(|g| g.len() > 3).unwrap();
        let (a, b) = star
            .iter()
            .flat_map(|&a| star.iter().map(move |&b| (a, b)))
            .find(|&(a, b)| a != b && s.lines[a].b.meet(&s.lines[b].b).dim() == 1)
            .unwrap();
        assert!(!pi.adjacent(a, b));
        // parallel affine lines: coplanar, not in a common pencil
        let (a, b) = (0..s.lines.len())
            .flat_map(|a| pi.neighbors(a).map(move |b| (a, b)))
            .find(|&(a, b)| s.parallel(a, b))
            .unwrap();
        assert!(pi.adjacent(a, b) && !rho.adjacent(a, b));
    }

    #[test]
    fn semibundles_are_pi_cliques() {
        let s = cfg1();
        let pi = compute_pi(&s);
        for x in s.strong.iter().filter(|x| x.maximal) {
            for u in s.strong_closure_points(x) {
                let sb = s.semibundle(x, &u);
                assert!(pi.is_clique(&sb));
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = SpineSpace::build(&SpineParams::new(3, 5, 2, 1, 2)).unwrap();
        let g = compute_rho(&s);
        let back = LineRelationGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let bad = json!({"delta_kind": "pi", "count": 2, "adjacency": ["1,1", "2"]});
        assert!(LineRelationGraph::from_json(&bad).is_err());
        let refl = json!({"delta_kind": "pi", "count": 2, "adjacency": ["0,1,1", "1,1"]});
        assert!(LineRelationGraph::from_json(&refl).is_err());
    }

    #[test]
    fn strip_is_deterministic_isomorphism() {
        let s = cfg1();
        let pi = compute_pi(&s);
        let a = strip(&pi, 7);
        let b = strip(&pi, 7);
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.permutation, b.permutation);
        assert_eq!(a.graph.edge_count(), pi.edge_count());
        let inv = a.inverse();
        assert_eq!(a.graph.permuted(&inv), pi);
        assert_ne!(strip(&pi, 8).permutation, a.permutation);
    }

    proptest! {
        #[test]
        fn random_graphs_survive_json(edges in proptest::collection::vec((0usize..70, 0usize..70), 0..200)) {
            let mut g = LineRelationGraph::empty(DeltaKind::Pi, 70);
            for (a, b) in edges {
                if a != b {
                    g.add_edge(a, b);
                }
            }
            prop_assert_eq!(LineRelationGraph::from_json(&g.to_json()).unwrap(), g);
        }
    }
}
