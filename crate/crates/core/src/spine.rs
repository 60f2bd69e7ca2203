//! Spine spaces: the fragment of a Grassmann space on the `k`-subspaces that
//! meet a fixed subspace `W` in dimension exactly `m`.
//!
//! Points are the proper `k`-subspaces. Lines are the pencils `p(H, B)` with
//! at least two proper points, restricted to those points. The removed
//! points (the horizon) never become points of the space; an affine line
//! only remembers its single improper point as closure data.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{enumerate_between, enumerate_subspaces, FieldSpec, Subspace};

/// Parameters `(q, n, k, m, w)`; `W` is the span of the last `w` standard
/// basis vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpineParams {
    pub q: u8,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub w: usize,
}

impl SpineParams {
    pub fn new(q: u8, n: usize, k: usize, m: usize, w: usize) -> Self {
        SpineParams { q, n, k, m, w }
    }

    pub fn field(&self) -> Result<FieldSpec> {
        FieldSpec::new(self.q, self.n)
    }

    pub fn w_subspace(&self) -> Result<Subspace> {
        let f = self.field()?;
        if self.w > self.n {
            return Err(Error::Config(format!(
                "dim W = {} exceeds n = {}",
                self.w, self.n
            )));
        }
        Ok(f.coordinate_span(self.n - self.w..self.n))
    }

    pub fn label(&self) -> String {
        format!(
            "q={},n={},k={},m={},w={}",
            self.q, self.n, self.k, self.m, self.w
        )
    }
}

/// Admissible values of `m` for given `(n, k, w)`.
pub fn admissible_m(n: usize, k: usize, w: usize) -> std::ops::RangeInclusive<usize> {
    let codim = n.saturating_sub(w);
    k.saturating_sub(codim)..=k.min(w)
}

/// Which of the three parameter gates hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateReport {
    pub basic: bool,
    /// Every plane extends to a star or top of dimension at least 3:
    /// `3 <= n-k` and `3 <= k-m`.
    pub pencil_gate: bool,
    /// Stars or tops are at least 4-dimensional and not punctured:
    /// `(4 <= n-k and w != m+1) or (4 <= k-m and k != m+1)`.
    pub bundle_gate: bool,
    pub violations: Vec<String>,
}

pub fn validate_params(p: &SpineParams) -> GateReport {
    let mut violations = Vec::new();
    if FieldSpec::new(p.q, p.n).is_err() {
        violations.push(format!(
            "q = {} must be prime and n = {} at least 3",
            p.q, p.n
        ));
    }
    if !(1 < p.k && p.k + 1 < p.n) {
        violations.push(format!("1 < k < n-1 fails for k = {}, n = {}", p.k, p.n));
    }
    if p.w > p.n {
        violations.push(format!("dim W = {} exceeds n = {}", p.w, p.n));
    }
    if !admissible_m(p.n, p.k, p.w).contains(&p.m) {
        violations.push(format!(
            "k - codim(W) <= m <= min(k, dim W) fails: m = {}, admissible {:?}",
            p.m,
            admissible_m(p.n, p.k, p.w)
        ));
    }
    let basic = violations.is_empty();
    let nk = p.n as i64 - p.k as i64;
    let km = p.k as i64 - p.m as i64;
    let pencil_gate = basic && nk >= 3 && km >= 3;
    if basic && !pencil_gate {
        if nk < 3 {
            violations.push(format!("pencil gate: 3 <= n-k fails (n-k = {nk})"));
        }
        if km < 3 {
            violations.push(format!("pencil gate: 3 <= k-m fails (k-m = {km})"));
        }
    }
    let star_side = nk >= 4 && p.w != p.m + 1;
    let top_side = km >= 4 && p.k != p.m + 1;
    let bundle_gate = basic && (star_side || top_side);
    if basic && !bundle_gate {
        violations.push(format!(
            "bundle gate: (4 <= n-k and dim W != m+1) or (4 <= k-m and k != m+1) fails \
             (n-k = {nk}, dim W = {}, k-m = {km}, m+1 = {})",
            p.w,
            p.m + 1
        ));
    }
    GateReport {
        basic,
        pencil_gate,
        bundle_gate,
        violations,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LineClass {
    /// Exactly one improper point on the closure.
    #[serde(rename = "affine")]
    Affine,
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "omega")]
    Omega,
}

/// Class of the line with closure `p(h, b)`, or `None` if the pencil is not
/// a line of the spine space.
pub fn classify_line(h: &Subspace, b: &Subspace, p: &SpineParams) -> Result<Option<LineClass>> {
    let w = p.w_subspace()?;
    if h.dim() + 1 != p.k || b.dim() != p.k + 1 {
        return Err(Error::Input(format!(
            "expected dims ({}, {}), got ({}, {})",
            p.k - 1,
            p.k + 1,
            h.dim(),
            b.dim()
        )));
    }
    if !b.contains(h)? {
        return Err(Error::Input("h is not contained in b".into()));
    }
    let hw = h.meet(&w).dim();
    let bw = b.meet(&w).dim();
    let m = p.m;
    Ok(match (hw, bw) {
        (x, y) if x == m && y == m + 1 => Some(LineClass::Affine),
        (x, y) if x == m && y == m => Some(LineClass::Alpha),
        (x, y) if m >= 1 && x == m - 1 && y == m + 1 => Some(LineClass::Omega),
        _ => None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpineLine {
    pub id: usize,
    pub points: Vec<usize>,
    pub h: Subspace,
    pub b: Subspace,
    pub class: LineClass,
    pub improper_point: Option<Subspace>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrongKind {
    #[serde(rename = "omega-star")]
    OmegaStar,
    #[serde(rename = "alpha-star")]
    AlphaStar,
    #[serde(rename = "alpha-top")]
    AlphaTop,
    #[serde(rename = "omega-top")]
    OmegaTop,
}

impl StrongKind {
    pub fn is_star(self) -> bool {
        matches!(self, StrongKind::OmegaStar | StrongKind::AlphaStar)
    }
}

/// A star or top of the spine space; a slit space `P \ D`.
#[derive(Clone, Debug, Serialize)]
pub struct StrongSubspace {
    pub id: usize,
    pub kind: StrongKind,
    /// `H` for stars, `B` for tops.
    pub generator: Subspace,
    pub points: Vec<usize>,
    pub p_dim: i64,
    pub d_dim: i64,
    /// Not contained in another star or top of the space.
    pub maximal: bool,
}

impl StrongSubspace {
    pub fn is_projective(&self) -> bool {
        self.d_dim < 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlaneKind {
    Projective,
    Punctured,
    Affine,
}

/// An ambient plane `[lower, upper]_k` with at least two proper lines on it.
/// Star-side planes have `dim lower = k-1`, top-side ones `dim upper = k+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PlaneKey {
    pub lower: Subspace,
    pub upper: Subspace,
}

#[derive(Clone, Debug, Serialize)]
pub struct Plane {
    pub key: PlaneKey,
    pub star_side: bool,
    pub kind: PlaneKind,
    pub lines: Vec<usize>,
    pub improper_points: Vec<Subspace>,
}

#[derive(Clone, Debug)]
pub struct SpineSpace {
    pub params: SpineParams,
    pub field: FieldSpec,
    pub w_subspace: Subspace,
    pub points: Vec<Subspace>,
    pub lines: Vec<SpineLine>,
    pub strong: Vec<StrongSubspace>,
    /// Lines through each point.
    pub point_lines: Vec<Vec<usize>>,
    pub notes: Vec<String>,
    point_index: HashMap<Subspace, usize>,
    lines_by_h: HashMap<Subspace, Vec<usize>>,
    lines_by_b: HashMap<Subspace, Vec<usize>>,
    strong_by_generator: HashMap<Subspace, usize>,
}

impl SpineSpace {
    pub fn build(params: &SpineParams) -> Result<Self> {
        let gate = validate_params(params);
        if !gate.basic {
            return Err(Error::Config(gate.violations.join("; ")));
        }
        let field = params.field()?;
        let w = params.w_subspace()?;
        let (k, m) = (params.k, params.m);
        let is_proper = |u: &Subspace| u.meet(&w).dim() == m;
        let points: Vec<Subspace> = enumerate_subspaces(field, k)?
            .into_iter()
            .filter(|u| is_proper(u))
            .collect();
        let point_index: HashMap<Subspace, usize> = points
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, u)| (u, i))
            .collect();
        let mut notes = Vec::new();
        if points.is_empty() {
            notes.push("degenerate configuration: no proper points".to_string());
        }

        let whole = field.whole();
        let mut lines = Vec::new();
        for h in enumerate_subspaces(field, k - 1)? {
            for b in enumerate_between(&h, &whole, k + 1)? {
                let closure = enumerate_between(&h, &b, k)?;
                let (proper, improper): (Vec<&Subspace>, Vec<&Subspace>) =
                    closure.iter().partition(|u| point_index.contains_key(*u));
                if proper.len() < 2 {
                    continue;
                }
                let class = classify_line(&h, &b, params)?.ok_or_else(|| {
                    Error::Contract(format!("pencil {h:?},{b:?} has proper points but no class"))
                })?;
                let improper_point = if improper.len() == 1 {
                    Some(improper[0].clone())
                } else {
                    None
                };
                lines.push(SpineLine {
                    id: lines.len(),
                    points: proper.iter().map(|u| point_index[*u]).collect(),
                    h: h.clone(),
                    b,
                    class,
                    improper_point,
                });
            }
        }

        let mut point_lines = vec![Vec::new(); points.len()];
        let mut lines_by_h: HashMap<Subspace, Vec<usize>> = HashMap::new();
        let mut lines_by_b: HashMap<Subspace, Vec<usize>> = HashMap::new();
        for l in &lines {
            for &p in &l.points {
                point_lines[p].push(l.id);
            }
            lines_by_h.entry(l.h.clone()).or_default().push(l.id);
            lines_by_b.entry(l.b.clone()).or_default().push(l.id);
        }

        let mut space = SpineSpace {
            params: params.clone(),
            field,
            w_subspace: w,
            points,
            lines,
            strong: Vec::new(),
            point_lines,
            notes,
            point_index,
            lines_by_h,
            lines_by_b,
            strong_by_generator: HashMap::new(),
        };
        space.strong = space.enumerate_strong()?;
        space.strong_by_generator = space
            .strong
            .iter()
            .map(|s| (s.generator.clone(), s.id))
            .collect();
        space.mark_maximal();
        for kind in [
            StrongKind::OmegaStar,
            StrongKind::AlphaStar,
            StrongKind::AlphaTop,
            StrongKind::OmegaTop,
        ] {
            if !space.strong.iter().any(|s| s.kind == kind) {
                space
                    .notes
                    .push(format!("class {kind:?} is void for these parameters"));
            }
        }
        Ok(space)
    }

    pub fn point_id(&self, u: &Subspace) -> Option<usize> {
        self.point_index.get(u).copied()
    }

    pub fn is_proper(&self, u: &Subspace) -> bool {
        self.point_index.contains_key(u)
    }

    /// All ambient points of the closure of a line.
    pub fn closure_points(&self, line: usize) -> Vec<Subspace> {
        let l = &self.lines[line];
        enumerate_between(&l.h, &l.b, self.params.k).expect("line closure is a pencil")
    }

    pub fn lines_with_h(&self, h: &Subspace) -> &[usize] {
        self.lines_by_h.get(h).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn lines_with_b(&self, b: &Subspace) -> &[usize] {
        self.lines_by_b.get(b).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Lines sharing a star generator, grouped; deterministic order.
    pub fn star_groups(&self) -> Vec<&Vec<usize>> {
        let mut v: Vec<_> = self.lines_by_h.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v.into_iter().map(|(_, l)| l).collect()
    }

    pub fn top_groups(&self) -> Vec<&Vec<usize>> {
        let mut v: Vec<_> = self.lines_by_b.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v.into_iter().map(|(_, l)| l).collect()
    }

    /// The star (by `H`) and top (by `B`) containing a line.
    pub fn star_of_line(&self, line: usize) -> Option<usize> {
        self.strong_by_generator.get(&self.lines[line].h).copied()
    }

    pub fn top_of_line(&self, line: usize) -> Option<usize> {
        self.strong_by_generator.get(&self.lines[line].b).copied()
    }

    pub fn strong_by_generator(&self, g: &Subspace) -> Option<usize> {
        self.strong_by_generator.get(g).copied()
    }

    /// If the closures of two distinct lines lie on a common plane, the
    /// plane and the (possibly improper) common point of the closures.
    pub fn coplanar_meet(&self, a: usize, b: usize) -> Option<(PlaneKey, Subspace)> {
        if a == b {
            return None;
        }
        let k = self.params.k;
        let (la, lb) = (&self.lines[a], &self.lines[b]);
        if la.h == lb.h {
            let meet = la.b.meet(&lb.b);
            if meet.dim() == k {
                return Some((
                    PlaneKey {
                        lower: la.h.clone(),
                        upper: la.b.join(&lb.b),
                    },
                    meet,
                ));
            }
        } else if la.b == lb.b {
            let join = la.h.join(&lb.h);
            if join.dim() == k {
                return Some((
                    PlaneKey {
                        lower: la.h.meet(&lb.h),
                        upper: la.b.clone(),
                    },
                    join,
                ));
            }
        }
        None
    }

    /// Coplanarity of two lines.
    pub fn coplanar(&self, a: usize, b: usize) -> bool {
        self.coplanar_meet(a, b).is_some()
    }

    /// Lines in one pencil with a proper vertex.
    pub fn copencil(&self, a: usize, b: usize) -> bool {
        self.coplanar_meet(a, b)
            .is_some_and(|(_, u)| self.is_proper(&u))
    }

    /// Two distinct affine lines on a common plane whose closures meet on
    /// the horizon.
    pub fn parallel(&self, a: usize, b: usize) -> bool {
        self.lines[a].class == LineClass::Affine
            && self.lines[b].class == LineClass::Affine
            && self
                .coplanar_meet(a, b)
                .is_some_and(|(_, u)| !self.is_proper(&u))
    }

    /// Materialize the plane `[lower, upper]_k`.
    pub fn plane(&self, key: &PlaneKey) -> Plane {
        let k = self.params.k;
        let star_side = key.lower.dim() + 1 == k;
        let candidates = if star_side {
            self.lines_with_h(&key.lower)
        } else {
            self.lines_with_b(&key.upper)
        };
        let lines: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&l| {
                let line = &self.lines[l];
                key.upper.includes(&line.b) && line.h.includes(&key.lower)
            })
            .collect();
        let improper_points: Vec<Subspace> = enumerate_between(&key.lower, &key.upper, k)
            .expect("plane bounds are nested")
            .into_iter()
            .filter(|u| !self.is_proper(u))
            .collect();
        let kind = match improper_points.len() {
            0 => PlaneKind::Projective,
            1 => PlaneKind::Punctured,
            _ => PlaneKind::Affine,
        };
        Plane {
            key: key.clone(),
            star_side,
            kind,
            lines,
            improper_points,
        }
    }

    /// Every plane of the space, found by enumerating the ambient planes
    /// `[H, Y]_k` and `[Z, B]_k` that carry at least two proper lines.
    pub fn planes(&self) -> Vec<Plane> {
        let k = self.params.k;
        let whole = self.field.whole();
        let mut out = Vec::new();
        let mut hs: Vec<&Subspace> = self.lines_by_h.keys().collect();
        hs.sort();
        for h in hs {
            if self.lines_by_h[h].len() < 2 {
                continue;
            }
            for y in enumerate_between(h, &whole, k + 2).expect("k+2 <= n") {
                let key = PlaneKey {
                    lower: h.clone(),
                    upper: y,
                };
                let n = self.lines_by_h[h]
                    .iter()
                    .filter(|&&l| key.upper.includes(&self.lines[l].b))
                    .count();
                if n >= 2 {
                    out.push(self.plane(&key));
                }
            }
        }
        let mut bs: Vec<&Subspace> = self.lines_by_b.keys().collect();
        bs.sort();
        for b in bs {
            if self.lines_by_b[b].len() < 2 {
                continue;
            }
            for z in enumerate_between(&self.field.zero(), b, k - 2).expect("k >= 2") {
                let key = PlaneKey {
                    lower: z,
                    upper: b.clone(),
                };
                let n = self.lines_by_b[b]
                    .iter()
                    .filter(|&&l| self.lines[l].h.includes(&key.lower))
                    .count();
                if n >= 2 {
                    out.push(self.plane(&key));
                }
            }
        }
        out
    }

    fn enumerate_strong(&self) -> Result<Vec<StrongSubspace>> {
        let p = &self.params;
        let (n, k, m, w) = (p.n as i64, p.k as i64, p.m as i64, p.w as i64);
        let whole = self.field.whole();
        let wsub = &self.w_subspace;
        let ids = |us: Vec<Subspace>| -> Vec<usize> {
            let mut v: Vec<usize> = us.iter().filter_map(|u| self.point_id(u)).collect();
            v.sort_unstable();
            v
        };
        let mut out = Vec::new();
        let mut push = |kind, generator: Subspace, points: Vec<usize>, p_dim, d_dim| {
            if points.len() >= 2 {
                out.push(StrongSubspace {
                    id: out.len(),
                    kind,
                    generator,
                    points,
                    p_dim,
                    d_dim,
                    maximal: true,
                });
            }
        };
        let hs = enumerate_subspaces(self.field, p.k - 1)?;
        for h in &hs {
            let hw = h.meet(wsub).dim() as i64;
            if hw == m - 1 {
                let pts = ids(enumerate_between(h, &h.join(wsub), p.k)?);
                push(StrongKind::OmegaStar, h.clone(), pts, w - m, -1);
            } else if hw == m {
                let pts = ids(enumerate_between(h, &whole, p.k)?);
                push(StrongKind::AlphaStar, h.clone(), pts, n - k, w - m - 1);
            }
        }
        for b in enumerate_subspaces(self.field, p.k + 1)? {
            let bw = b.meet(wsub);
            if bw.dim() as i64 == m {
                let pts = ids(enumerate_between(&bw, &b, p.k)?);
                push(StrongKind::AlphaTop, b.clone(), pts, k - m, -1);
            } else if bw.dim() as i64 == m + 1 {
                let pts = ids(enumerate_between(&self.field.zero(), &b, p.k)?);
                push(StrongKind::OmegaTop, b.clone(), pts, k, k - m - 1);
            }
        }
        Ok(out)
    }

    fn mark_maximal(&mut self) {
        let flags: Vec<bool> = self
            .strong
            .iter()
            .map(|x| {
                let inside = |y: usize| {
                    let y = &self.strong[y];
                    y.id != x.id && x.points.iter().all(|p| y.points.binary_search(p).is_ok())
                };
                !self.lines_of_strong(x).iter().any(|&l| {
                    self.star_of_line(l).is_some_and(inside)
                        || self.top_of_line(l).is_some_and(inside)
                })
            })
            .collect();
        for (s, f) in self.strong.iter_mut().zip(flags) {
            s.maximal = f;
        }
    }

    /// Lines contained in a strong subspace (closure generator matches).
    pub fn lines_of_strong(&self, s: &StrongSubspace) -> &[usize] {
        if s.kind.is_star() {
            self.lines_with_h(&s.generator)
        } else {
            self.lines_with_b(&s.generator)
        }
    }

    /// Ambient points of the closure of a strong subspace.
    pub fn strong_closure_points(&self, s: &StrongSubspace) -> Vec<Subspace> {
        let k = self.params.k;
        if s.kind.is_star() {
            enumerate_between(&s.generator, &self.field.whole(), k).expect("star")
        } else {
            enumerate_between(&self.field.zero(), &s.generator, k).expect("top")
        }
    }

    /// Semibundle `L_U(X)`: lines of `X` whose closure passes through `u`.
    pub fn semibundle(&self, s: &StrongSubspace, u: &Subspace) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .lines_of_strong(s)
            .iter()
            .copied()
            .filter(|&l| {
                let line = &self.lines[l];
                u.includes(&line.h) && line.b.includes(u)
            })
            .collect();
        v.sort_unstable();
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        json!({
            "params": self.params,
            "points": self.points.iter().map(Subspace::digits).collect::<Vec<_>>(),
            "lines": self.lines.iter().map(|l| json!({
                "points": l.points,
                "class": l.class,
                "h": l.h.digits(),
                "b": l.b.digits(),
                "improper_point": l.improper_point.as_ref().map(Subspace::digits),
            })).collect::<Vec<_>>(),
            "strong": self.strong.iter().map(|s| json!({
                "kind": s.kind,
                "generator": s.generator.digits(),
                "points": s.points,
                "p_dim": s.p_dim,
                "d_dim": s.d_dim,
            })).collect::<Vec<_>>(),
        })
    }

    /// Summary counts used in reports.
    pub fn counts(&self) -> BTreeMap<String, usize> {
        let mut c = BTreeMap::new();
        c.insert("points".to_string(), self.points.len());
        c.insert("lines".to_string(), self.lines.len());
        for class in [LineClass::Affine, LineClass::Alpha, LineClass::Omega] {
            c.insert(
                format!(
                    "lines.{}",
                    serde_json::to_value(class).unwrap().as_str().unwrap()
                ),
                self.lines.iter().filter(|l| l.class == class).count(),
            );
        }
        for s in &self.strong {
            *c.entry(format!(
                "strong.{}",
                serde_json::to_value(s.kind).unwrap().as_str().unwrap()
            ))
            .or_default() += 1;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn cfg1() -> SpineSpace {
        SpineSpace::build(&SpineParams::new(2, 6, 2, 1, 3)).unwrap()
    }

    fn proj_points(q: i64, d: i64) -> i64 {
        if d < 0 {
            0
        } else {
            (q.pow(d as u32 + 1) - 1) / (q - 1)
        }
    }

    #[test]
    fn gates() {
        let g = validate_params(&SpineParams::new(2, 6, 2, 1, 3));
        assert!(g.basic && g.bundle_gate && !g.pencil_gate);
        let g = validate_params(&SpineParams::new(3, 5, 2, 1, 2));
        assert!(g.basic && !g.bundle_gate);
        let g = validate_params(&SpineParams::new(2, 6, 3, 0, 1));
        assert!(g.basic && g.pencil_gate);
        assert_eq!(admissible_m(6, 3, 2), 0..=2);
        let bad = validate_params(&SpineParams::new(2, 6, 3, 3, 2));
        assert!(!bad.basic);
        assert!(!validate_params(&SpineParams::new(2, 4, 3, 1, 2)).basic);
        assert!(SpineSpace::build(&SpineParams::new(2, 6, 3, 3, 2)).is_err());
    }

    #[test]
    fn point_count_matches_exhaustive_filter() {
        let s = cfg1();
        let w = s.w_subspace.clone();
        let all = enumerate_subspaces(s.field, 2).unwrap();
        assert_eq!(all.len(), 651);
        let by_dim = |d: usize| all.iter().filter(|u| u.meet(&w).dim() == d).count();
        assert_eq!(by_dim(1), 196);
        assert_eq!(by_dim(0), 448);
        assert_eq!(by_dim(2), 7);
        assert_eq!(s.points.len(), 196);
    }

    #[test]
    fn line_classes_agree_with_improper_counts() {
        let s = cfg1();
        for l in &s.lines {
            let closure = s.closure_points(l.id);
            let improper: Vec<_> = closure.iter().filter(|u| !s.is_proper(u)).collect();
            assert_eq!(l.points.len() + improper.len(), 3);
            match l.class {
                LineClass::Affine => {
                    assert_eq!(improper.len(), 1);
                    let g = l.h.join(&l.b.meet(&s.w_subspace));
                    assert_eq!(l.improper_point.as_ref(), Some(&g));
                    assert_eq!(improper[0], &g);
                    assert_eq!(l.points.len(), 2);
                }
                _ => {
                    assert!(improper.is_empty());
                    assert_eq!(l.points.len(), 3);
                }
            }
        }
        let wrong = classify_line(&s.field.zero(), &s.field.whole(), &s.params);
        assert!(wrong.is_err());
    }

    #[test]
    fn whole_w_gives_the_grassmann_space() {
        let s = SpineSpace::build(&SpineParams::new(2, 5, 2, 2, 5)).unwrap();
        assert_eq!(s.points.len(), 155);
        assert!(s
            .lines
            .iter()
            .all(|l| l.class != LineClass::Affine && l.points.len() == 3));
    }

    #[test]
    fn strong_subspace_dimensions_follow_the_slit_model() {
        for p in [
            SpineParams::new(2, 6, 2, 1, 3),
            SpineParams::new(3, 5, 2, 1, 2),
            SpineParams::new(2, 5, 2, 0, 3),
        ] {
            let s = SpineSpace::build(&p).unwrap();
            for x in &s.strong {
                let expect = proj_points(p.q as i64, x.p_dim) - proj_points(p.q as i64, x.d_dim);
                assert_eq!(
                    x.points.len() as i64,
                    expect,
                    "{:?} in {}",
                    x.kind,
                    p.label()
                );
            }
        }
        let s = cfg1();
        let omega = s
            .strong
            .iter()
            .find(|x| x.kind == StrongKind::OmegaStar)
            .unwrap();
        assert_eq!((omega.p_dim, omega.d_dim), (2, -1));
        let alpha = s
            .strong
            .iter()
            .find(|x| x.kind == StrongKind::AlphaStar)
            .unwrap();
        assert_eq!((alpha.p_dim, alpha.d_dim), (4, 1));
    }

    #[test]
    fn strong_subspaces_are_strong_and_lines_have_one_star_one_top() {
        let s = cfg1();
        let mut collinear = HashSet::new();
        for l in &s.lines {
            for &a in &l.points {
                for &b in &l.points {
                    collinear.insert((a, b));
                }
            }
        }
        for x in &s.strong {
            for &a in &x.points {
                for &b in &x.points {
                    assert!(collinear.contains(&(a, b)));
                }
            }
        }
        for l in &s.lines {
            let stars = s
                .strong
                .iter()
                .filter(|x| x.kind.is_star() && l.points.iter().all(|p| x.points.contains(p)))
                .filter(|x| x.generator == l.h)
                .count();
            let tops = s
                .strong
                .iter()
                .filter(|x| !x.kind.is_star() && x.generator == l.b)
                .count();
            assert!(stars <= 1 && tops <= 1);
        }
    }

    #[test]
    fn planes_split_into_three_kinds() {
        let s = cfg1();
        let planes = s.planes();
        assert!(!planes.is_empty());
        for e in &planes {
            let proper: HashSet<usize> = e
                .lines
                .iter()
                .flat_map(|&l| s.lines[l].points.iter().copied())
                .collect();
            match e.kind {
                PlaneKind::Projective => assert_eq!(proper.len(), 7),
                PlaneKind::Punctured => assert_eq!(proper.len(), 6),
                PlaneKind::Affine => {
                    assert_eq!(e.improper_points.len(), 3);
                    assert_eq!(proper.len(), 4);
                }
            }
            for (i, &a) in e.lines.iter().enumerate() {
                for &b in &e.lines[i + 1..] {
                    assert_eq!(s.coplanar_meet(a, b).unwrap().0, e.key);
                }
            }
        }
        let kinds: HashSet<_> = planes.iter().map(|e| e.kind).collect();
        assert_eq!(kinds.len(), 3);
    }

    #[test]
    fn deterministic_build() {
        let a = cfg1().to_json();
        let b = cfg1().to_json();
        assert_eq!(a, b);
        assert_eq!(a["points"][0].as_str().unwrap().len(), 13);
    }
}
