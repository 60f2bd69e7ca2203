//! The ambient Grassmann space: `k`-subspaces as points, `k`-pencils as lines.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gf::{enumerate_between, enumerate_subspaces, FieldSpec, Subspace};

/// The pencil `p(H, B)` of all `k`-subspaces between `H` and `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannPencil {
    pub h: Subspace,
    pub b: Subspace,
    /// Point ids, `q + 1` of them.
    pub points: Vec<usize>,
}

/// `[H)_k`: all points containing `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannStar {
    pub h: Subspace,
    pub points: Vec<usize>,
}

/// `(B]_k`: all points inside `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannTop {
    pub b: Subspace,
    pub points: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct GrassmannSpace {
    pub field: FieldSpec,
    pub k: usize,
    pub points: Vec<Subspace>,
    pub pencils: Vec<GrassmannPencil>,
    index: HashMap<Subspace, usize>,
}

impl GrassmannSpace {
    pub fn build(field: FieldSpec, k: usize) -> Result<Self> {
        if !(1 < k && k + 1 < field.n) {
            return Err(Error::Config(format!(
                "Grassmann index must satisfy 1 < k < n-1, got k = {k}, n = {}",
                field.n
            )));
        }
        let points = enumerate_subspaces(field, k)?;
        let index: HashMap<Subspace, usize> = points
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let whole = field.whole();
        let mut pencils = Vec::new();
        for h in enumerate_subspaces(field, k - 1)? {
            for b in enumerate_between(&h, &whole, k + 1)? {
                let pts = enumerate_between(&h, &b, k)?
                    .iter()
                    .map(|u| index[u])
                    .collect();
                pencils.push(GrassmannPencil {
                    h: h.clone(),
                    b,
                    points: pts,
                });
            }
        }
        Ok(GrassmannSpace {
            field,
            k,
            points,
            pencils,
            index,
        })
    }

    pub fn point_id(&self, u: &Subspace) -> Option<usize> {
        self.index.get(u).copied()
    }

    pub fn star(&self, h: &Subspace) -> GrassmannStar {
        let pts = enumerate_between(h, &self.field.whole(), self.k)
            .expect("h has dimension k-1")
            .iter()
            .map(|u| self.index[u])
            .collect();
        GrassmannStar {
            h: h.clone(),
            points: pts,
        }
    }

    pub fn top(&self, b: &Subspace) -> GrassmannTop {
        let pts = enumerate_between(&self.field.zero(), b, self.k)
            .expect("b has dimension k+1")
            .iter()
            .map(|u| self.index[u])
            .collect();
        GrassmannTop {
            b: b.clone(),
            points: pts,
        }
    }

    pub fn star_of(&self, p: &GrassmannPencil) -> GrassmannStar {
        self.star(&p.h)
    }

    pub fn top_of(&self, p: &GrassmannPencil) -> GrassmannTop {
        self.top(&p.b)
    }

    /// The pencil through two distinct collinear points, if any.
    pub fn pencil_through(&self, a: usize, b: usize) -> Option<GrassmannPencil> {
        let (u, v) = (&self.points[a], &self.points[b]);
        let h = u.meet(v);
        let bb = u.join(v);
        if a == b || h.dim() + 1 != self.k || bb.dim() != self.k + 1 {
            return None;
        }
        let pts = enumerate_between(&h, &bb, self.k)
            .ok()?
            .iter()
            .map(|w| self.index[w])
            .collect();
        Some(GrassmannPencil {
            h,
            b: bb,
            points: pts,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn g24() -> GrassmannSpace {
        GrassmannSpace::build(FieldSpec::new(2, 4).unwrap(), 2).unwrap()
    }

    #[test]
    fn rejects_projective_degenerations() {
        let f = FieldSpec::new(2, 4).unwrap();
        assert!(GrassmannSpace::build(f, 1).is_err());
        assert!(GrassmannSpace::build(f, 3).is_err());
    }

    #[test]
    fn klein_quadric_counts() {
        let g = g24();
        assert_eq!(g.points.len(), 35);
        assert!(g.pencils.iter().all(|p| p.points.len() == 3));
        // oracle: count incident (h, b) pairs directly
        let f = g.field;
        let hs = enumerate_subspaces(f, 1).unwrap();
        let bs = enumerate_subspaces(f, 3).unwrap();
        let incident = hs
            .iter()
            .flat_map(|h| bs.iter().filter(move |b| b.includes(h)))
            .count();
        assert_eq!(g.pencils.len(), incident);
        assert_eq!(incident, 15 * 7);
    }

    #[test]
    fn stars_and_tops_contain_their_pencils() {
        let g = g24();
        for p in g.pencils.iter().take(40) {
            let s = g.star_of(p);
            let t = g.top_of(p);
            assert_eq!(s.h, p.h);
            assert_eq!(t.b, p.b);
            for x in &p.points {
                assert!(s.points.contains(x) && t.points.contains(x));
            }
        }
        let p0 = &g.pencils[0];
        let same_h = g
            .pencils
            .iter()
            .find(|p| p.h == p0.h && p.b != p0.b)
            .unwrap();
        assert_eq!(g.star_of(p0), g.star_of(same_h));
    }

    #[test]
    fn each_pencil_in_one_star_and_one_top() {
        let g = GrassmannSpace::build(FieldSpec::new(2, 5).unwrap(), 2).unwrap();
        let f = g.field;
        let stars: Vec<_> = enumerate_subspaces(f, 1)
            .unwrap()
            .iter()
            .map(|h| g.star(h))
            .collect();
        let tops: Vec<_> = enumerate_subspaces(f, 3)
            .unwrap()
            .iter()
            .map(|b| g.top(b))
            .collect();
        for p in g.pencils.iter().step_by(7) {
            let pts: HashSet<_> = p.points.iter().collect();
            let ns = stars
                .iter()
                .filter(|s| pts.iter().all(|x| s.points.contains(x)))
                .count();
            let nt = tops
                .iter()
                .filter(|t| pts.iter().all(|x| t.points.contains(x)))
                .count();
            assert_eq!((ns, nt), (1, 1));
        }
    }

    #[test]
    fn partial_linear_space() {
        let g = g24();
        let mut seen = HashSet::new();
        for p in &g.pencils {
            for (i, &a) in p.points.iter().enumerate() {
                for &b in &p.points[i + 1..] {
                    assert!(seen.insert((a, b)), "two pencils share the pair ({a}, {b})");
                    assert_eq!(g.pencil_through(a, b).unwrap(), *p);
                }
            }
        }
    }
}
