//! Edgepaths: the per-tangle curve systems traced in the diagram.
//!
//! An edgepath for a tangle slope `t` starts on the horizontal line `L(t)`
//! and moves monotonically right to left (non-increasing `u`), either
//! staying constant on `L(t)`, ending at a vertex, or ending in the
//! interior of a nonhorizontal edge. Vertical edges (between integer
//! vertices, at `u = 1`) may be traversed fully or partially; on them the
//! free coordinate is `y` rather than `u`.
//!
//! A *skeleton* is the combinatorial part only: the start plus a sequence
//! of full steps. Enumeration is organized so that every allowable path
//! whose final height is at least `u_floor` is a truncation of exactly one
//! skeleton; the constant path on `L(t)` is implicit (every tangle has it)
//! and is represented by the solver directly.

use crate::diagram::{self, DiagramPoint, Locus, Step, Vertex};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Bounds for skeleton enumeration.
///
/// `u_floor` prunes steps that neither reach back above the floor nor start
/// strictly above it. `max_edges` caps skeleton length; runs of vertical
/// edges make the full set infinite, so some cap is always required. Eight
/// edges is far beyond what bounded-slope work needs (candidate tori use at
/// most four).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchParams {
    pub u_floor: Rational,
    pub max_edges: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams { u_floor: Rational::ONE, max_edges: 8 }
    }
}

/// A start vertex and a chain of fully traversed steps (possibly empty).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Skeleton {
    pub start: Rational,
    pub steps: Vec<Step>,
}

impl Skeleton {
    pub fn start_vertex(&self) -> Vertex {
        Vertex::Finite(self.start)
    }
}

fn vertex_key(v: Vertex) -> (u8, Rational) {
    match v {
        Vertex::Finite(f) => (0, f),
        Vertex::Infinity => (1, Rational::ZERO),
        Vertex::Ideal(f) => (2, f),
    }
}

/// Candidate next vertices from `from`, honoring minimality against the
/// previous step and the `u_floor` gate.
fn successors(from: Vertex, prev: Option<Step>, u_floor: Rational) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = match from {
        Vertex::Finite(f) if !f.is_integer() => {
            let (a, b) = diagram::farey_parents(f).expect("non-integer vertex has parents");
            vec![Vertex::Finite(a), Vertex::Finite(b)]
        }
        // From an integer vertex: the two vertical edges and the edge to <∞>.
        Vertex::Finite(p) => vec![
            Vertex::Finite(p - Rational::ONE),
            Vertex::Finite(p + Rational::ONE),
            Vertex::Infinity,
        ],
        Vertex::Infinity | Vertex::Ideal(_) => vec![],
    };
    out.retain(|&to| {
        // A step is useful only if it ends at or above the floor, or starts
        // strictly above it (so its upper part survives truncation).
        let gate = to.u().expect("step target has finite u") >= u_floor
            || from.u().expect("step source has finite u") > u_floor;
        // Minimality: never retrace, never take two sides of a triangle.
        let minimal =
            prev.map_or(true, |p| to != p.from && !diagram::are_adjacent(p.from, to));
        gate && minimal
    });
    out.sort_by_key(|&v| vertex_key(v));
    out
}

/// All skeletons for tangle slope `t` within `params`, including the empty
/// one. Deterministic: sorted lexicographically by the step targets.
///
/// Errors if `t` is an integer (integral tangles do not occur in the knots
/// this library handles).
pub fn enumerate_skeletons(t: Rational, params: &SearchParams) -> Result<Vec<Skeleton>> {
    if t.is_integer() {
        return Err(Error::Unsupported(format!("tangle slope {t} is integral")));
    }
    let mut out = Vec::new();
    let mut steps = Vec::new();
    dfs(t, Vertex::Finite(t), &mut steps, params, &mut out);
    out.sort_by(|a, b| {
        let key = |s: &Skeleton| s.steps.iter().map(|st| vertex_key(st.to)).collect::<Vec<_>>();
        key(a).cmp(&key(b))
    });
    Ok(out)
}

fn dfs(
    start: Rational,
    at: Vertex,
    steps: &mut Vec<Step>,
    params: &SearchParams,
    out: &mut Vec<Skeleton>,
) {
    out.push(Skeleton { start, steps: steps.clone() });
    if steps.len() >= params.max_edges {
        return;
    }
    for to in successors(at, steps.last().copied(), params.u_floor) {
        steps.push(Step::new(at, to));
        dfs(start, to, steps, params, out);
        steps.pop();
    }
}

/// One edgepath, recorded by how it ends.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Edgepath {
    /// Constant on `L(tangle)` at height `u >= den(tangle)`.
    Constant { tangle: Rational, u: Rational },
    /// Fully traversed steps ending at a vertex; `steps` may be empty (the
    /// path that never leaves `<tangle>`).
    VertexEnded { tangle: Rational, steps: Vec<Step> },
    /// Fully traversed `steps`, then the fraction `beta ∈ (0,1)` of `last`.
    /// On a vertical `last` the stop is at `y = y_from + beta·(y_to−y_from)`
    /// (and `u = 1`); otherwise at `u = u_from − beta·(u_from−u_to)`.
    Partial { tangle: Rational, steps: Vec<Step>, last: Step, beta: Rational },
}

impl Edgepath {
    pub fn tangle(&self) -> Rational {
        match self {
            Edgepath::Constant { tangle, .. }
            | Edgepath::VertexEnded { tangle, .. }
            | Edgepath::Partial { tangle, .. } => *tangle,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Edgepath::Constant { .. })
    }

    /// The vertex the path ends at (vertex-ended paths only).
    pub fn final_vertex(&self) -> Option<Vertex> {
        match self {
            Edgepath::VertexEnded { tangle, steps } => {
                Some(steps.last().map_or(Vertex::Finite(*tangle), |s| s.to))
            }
            _ => None,
        }
    }

    pub fn final_u(&self) -> Rational {
        match self {
            Edgepath::Constant { u, .. } => *u,
            Edgepath::VertexEnded { .. } => {
                self.final_vertex().unwrap().u().expect("path vertices have finite u")
            }
            Edgepath::Partial { last, beta, .. } => {
                if last.is_vertical() {
                    Rational::ONE
                } else {
                    let uf = last.from.u().unwrap();
                    let ut = last.to.u().unwrap();
                    uf - *beta * (uf - ut)
                }
            }
        }
    }

    pub fn final_y(&self) -> Rational {
        match self {
            Edgepath::Constant { tangle, .. } => *tangle,
            Edgepath::VertexEnded { .. } => match self.final_vertex().unwrap() {
                Vertex::Finite(f) => f,
                Vertex::Infinity => Rational::ZERO,
                Vertex::Ideal(_) => unreachable!("paths never end at ideal vertices"),
            },
            Edgepath::Partial { last, beta, .. } => {
                if last.is_vertical() {
                    last.y_from() + *beta * (last.y_to() - last.y_from())
                } else {
                    diagram::edge_y(last.from, last.to, self.final_u())
                        .expect("partial edge is nonhorizontal and nonvertical")
                }
            }
        }
    }

    pub fn final_point(&self) -> DiagramPoint {
        let locus = match self {
            Edgepath::Constant { tangle, .. } => Locus::Horizontal(*tangle),
            Edgepath::VertexEnded { .. } => Locus::Vertex(self.final_vertex().unwrap()),
            Edgepath::Partial { last, .. } => Locus::EdgeInterior(*last),
        };
        DiagramPoint { u: self.final_u(), y: self.final_y(), locus }
    }

    /// |γ|: number of fully traversed edges plus the final fraction.
    pub fn length(&self) -> Rational {
        match self {
            Edgepath::Constant { .. } => Rational::ZERO,
            Edgepath::VertexEnded { steps, .. } => Rational::from_int(steps.len() as i128),
            Edgepath::Partial { steps, beta, .. } => {
                Rational::from_int(steps.len() as i128) + *beta
            }
        }
    }

    /// Least number of sheets a single tangle supports: the least `m` with
    /// `m·|γ|` integral (non-constant) or `m·u/q` integral (constant).
    pub fn m_value(&self) -> i128 {
        match self {
            Edgepath::Constant { tangle, u } => {
                (*u / Rational::from_int(tangle.denom())).denom()
            }
            _ => self.length().denom(),
        }
    }

    /// Twist bookkeeping: total (downward, upward) edge weight, full edges
    /// counting 1 and the partial edge counting `beta`, by the direction a
    /// point moves traveling right to left.
    pub fn twist_halves(&self) -> (Rational, Rational) {
        let mut down = Rational::ZERO;
        let mut up = Rational::ZERO;
        let mut add = |s: &Step, w: Rational| {
            if s.goes_down() {
                down += w;
            } else {
                up += w;
            }
        };
        match self {
            Edgepath::Constant { .. } => {}
            Edgepath::VertexEnded { steps, .. } => {
                for s in steps {
                    add(s, Rational::ONE);
                }
            }
            Edgepath::Partial { steps, last, beta, .. } => {
                for s in steps {
                    add(s, Rational::ONE);
                }
                add(last, *beta);
            }
        }
        (down, up)
    }

    /// The final traversed segment: the partial edge when present, else the
    /// last full step (`None` for constant and empty paths).
    pub fn final_segment(&self) -> Option<Step> {
        match self {
            Edgepath::Constant { .. } => None,
            Edgepath::VertexEnded { steps, .. } => steps.last().copied(),
            Edgepath::Partial { last, .. } => Some(*last),
        }
    }

    /// `y` at `x = 1` of the Cartesian line through the final traversed
    /// segment, extended rightward to the border. Errors for constant/empty
    /// paths and vertical final segments, where the construction is
    /// undefined.
    pub fn extended_y_at_x1(&self) -> Result<Rational> {
        let seg = self.final_segment().ok_or_else(|| {
            Error::Unsupported("r-value of a path with no traversed segment".into())
        })?;
        let (x0, y0) = seg.from.xy();
        let (x1, y1) = seg.to.xy();
        if x0 == x1 {
            return Err(Error::Unsupported(format!(
                "r-value of a vertical final segment {seg}"
            )));
        }
        Ok(y0 + (y1 - y0) * (Rational::ONE - x0) / (x1 - x0))
    }

    /// The r-invariant: denominator of `extended_y_at_x1`.
    pub fn r_value(&self) -> Result<i128> {
        Ok(self.extended_y_at_x1()?.denom())
    }

    /// Cartesian slope of the final traversed segment (sign feeds the
    /// incompressibility tests).
    pub fn final_segment_slope(&self) -> Result<Rational> {
        let seg = self.final_segment().ok_or_else(|| {
            Error::Unsupported("segment slope of a path with no traversed segment".into())
        })?;
        let (x0, y0) = seg.from.xy();
        let (x1, y1) = seg.to.xy();
        if x0 == x1 {
            return Err(Error::Unsupported(format!(
                "segment slope of a vertical segment {seg}"
            )));
        }
        Ok((y1 - y0) / (x1 - x0))
    }

    /// All allowability conditions checkable on a single path: starts at
    /// `<tangle>`, steps chain along edges, minimal (no retrace, no two
    /// sides of a triangle), weakly monotone in `u`, `beta` strictly inside
    /// `(0,1)`, constants at or right of the vertex.
    pub fn validate(&self) -> bool {
        let t = self.tangle();
        if t.is_integer() {
            return false;
        }
        match self {
            Edgepath::Constant { tangle, u } => {
                *u >= Rational::from_int(tangle.denom())
            }
            Edgepath::VertexEnded { tangle, steps } => chain_ok(*tangle, steps, None),
            Edgepath::Partial { tangle, steps, last, beta } => {
                *beta > Rational::ZERO
                    && *beta < Rational::ONE
                    && chain_ok(*tangle, steps, Some(*last))
            }
        }
    }

    /// ASCII form: `"1/3 > 1/2 > @5/2"` for a partial stop at `u = 5/2`,
    /// `"const(1/3 @ 3)"` for constants; vertical stops report `y` instead.
    pub fn render(&self) -> String {
        match self {
            Edgepath::Constant { tangle, u } => format!("const({tangle} @ {u})"),
            Edgepath::VertexEnded { tangle, steps } => {
                let mut s = format!("{tangle}");
                for st in steps {
                    s.push_str(&format!(" > {}", st.to));
                }
                s
            }
            Edgepath::Partial { tangle, steps, last, .. } => {
                let mut s = format!("{tangle}");
                for st in steps {
                    s.push_str(&format!(" > {}", st.to));
                }
                s.push_str(&format!(" > {}", last.to));
                if last.is_vertical() {
                    s.push_str(&format!(" > @y={}", self.final_y()));
                } else {
                    s.push_str(&format!(" > @{}", self.final_u()));
                }
                s
            }
        }
    }
}

fn chain_ok(tangle: Rational, steps: &[Step], last: Option<Step>) -> bool {
    let mut at = Vertex::Finite(tangle);
    let mut prev: Option<Step> = None;
    for s in steps.iter().copied().chain(last) {
        if s.from != at || !diagram::are_adjacent(s.from, s.to) {
            return false;
        }
        if let Some(p) = prev {
            if s.to == p.from || diagram::are_adjacent(p.from, s.to) {
                return false;
            }
        }
        match (s.from.u(), s.to.u()) {
            (Some(uf), Some(ut)) if ut <= uf => {}
            _ => return false,
        }
        prev = Some(s);
        at = s.to;
    }
    true
}

/// Cut a skeleton at height `u`, taking everything at `u` and rightward.
///
/// Cuts landing exactly on a vertex produce the vertex-ended prefix (in
/// particular `u = u(<start>)` gives the empty path). Cuts inside an edge
/// produce a partial path. `u = 1` stops at the first integer vertex
/// reached: vertical continuations are parameterized by `y`, not `u`, and
/// are built directly by the solver rather than by this cut.
pub fn truncate_at_u(skel: &Skeleton, u: Rational) -> Result<Edgepath> {
    let out_of_range = || {
        Error::Unsupported(format!(
            "cut height {u} outside the swept range of skeleton starting at {}",
            skel.start
        ))
    };
    let start_u = skel.start_vertex().u().unwrap();
    if u > start_u {
        return Err(out_of_range());
    }
    if u == start_u {
        return Ok(Edgepath::VertexEnded { tangle: skel.start, steps: Vec::new() });
    }
    for (i, step) in skel.steps.iter().enumerate() {
        if step.is_vertical() {
            break;
        }
        let uf = step.from.u().unwrap();
        let ut = step.to.u().unwrap();
        if u > ut {
            // Strictly inside this edge (u < uf is guaranteed by the walk).
            return Ok(Edgepath::Partial {
                tangle: skel.start,
                steps: skel.steps[..i].to_vec(),
                last: *step,
                beta: (uf - u) / (uf - ut),
            });
        }
        if u == ut {
            return Ok(Edgepath::VertexEnded {
                tangle: skel.start,
                steps: skel.steps[..=i].to_vec(),
            });
        }
    }
    Err(out_of_range())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn v(n: i128, d: i128) -> Vertex {
        Vertex::Finite(rat(n, d))
    }

    fn skel(start: Rational, tos: &[Vertex]) -> Skeleton {
        let mut steps = Vec::new();
        let mut at = Vertex::Finite(start);
        for &to in tos {
            steps.push(Step::new(at, to));
            at = to;
        }
        Skeleton { start, steps }
    }

    #[test]
    fn skeletons_for_one_third() {
        let params = SearchParams { u_floor: Rational::ONE, max_edges: 2 };
        let got = enumerate_skeletons(rat(1, 3), &params).unwrap();
        let want = vec![
            skel(rat(1, 3), &[]),
            skel(rat(1, 3), &[v(0, 1)]),
            skel(rat(1, 3), &[v(0, 1), v(-1, 1)]),
            skel(rat(1, 3), &[v(0, 1), v(1, 1)]),
            skel(rat(1, 3), &[v(1, 2)]),
            skel(rat(1, 3), &[v(1, 2), v(1, 1)]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn floor_prunes_everything_below() {
        // From <1/2> (u = 2) with floor 2, no step stays at or above the
        // floor, so only the empty skeleton (and the implicit constant)
        // remain.
        let params = SearchParams { u_floor: rat(2, 1), max_edges: 8 };
        let got = enumerate_skeletons(rat(1, 2), &params).unwrap();
        assert_eq!(got, vec![skel(rat(1, 2), &[])]);
    }

    #[test]
    fn integral_tangle_rejected() {
        assert!(enumerate_skeletons(rat(3, 1), &SearchParams::default()).is_err());
    }

    #[test]
    fn minimality_blocks_triangles_and_retraces() {
        // <1/3> > <1/2> > <0> takes two sides of the triangle {0, 1/2, 1/3}.
        let bad = Edgepath::VertexEnded {
            tangle: rat(1, 3),
            steps: vec![Step::new(v(1, 3), v(1, 2)), Step::new(v(1, 2), v(0, 1))],
        };
        assert!(!bad.validate());
        let good = Edgepath::VertexEnded {
            tangle: rat(1, 3),
            steps: vec![Step::new(v(1, 3), v(1, 2)), Step::new(v(1, 2), v(1, 1))],
        };
        assert!(good.validate());
        // Retracing <0> > <1> > <0> is rejected even though u is constant.
        let retrace = Edgepath::VertexEnded {
            tangle: rat(1, 3),
            steps: vec![
                Step::new(v(1, 3), v(0, 1)),
                Step::new(v(0, 1), v(1, 1)),
                Step::new(v(1, 1), v(0, 1)),
            ],
        };
        assert!(!retrace.validate());
    }

    #[test]
    fn truncation_of_a_single_edge() {
        let s = skel(rat(1, 3), &[v(0, 1)]);
        // At the start vertex: the empty path.
        assert_eq!(
            truncate_at_u(&s, rat(3, 1)).unwrap(),
            Edgepath::VertexEnded { tangle: rat(1, 3), steps: vec![] }
        );
        // Interior: beta = (3-2)/(3-1) = 1/2, y = 1/4.
        let p = truncate_at_u(&s, rat(2, 1)).unwrap();
        assert_eq!(p.length(), rat(1, 2));
        assert_eq!(p.final_y(), rat(1, 4));
        assert_eq!(p.final_u(), rat(2, 1));
        assert!(p.validate());
        // At the far vertex: the whole edge.
        let full = truncate_at_u(&s, Rational::ONE).unwrap();
        assert_eq!(full.length(), Rational::ONE);
        assert_eq!(full.final_y(), Rational::ZERO);
        // Outside the swept range on both sides.
        assert!(truncate_at_u(&s, rat(4, 1)).is_err());
        assert!(truncate_at_u(&s, rat(1, 2)).is_err());
    }

    #[test]
    fn lengths_and_sheet_counts() {
        // <1/7> cut at u = 5/2: beta = (7 - 5/2)/6 = 3/4, so m = 4.
        let p = truncate_at_u(&skel(rat(1, 7), &[v(0, 1)]), rat(5, 2)).unwrap();
        assert_eq!(p.length(), rat(3, 4));
        assert_eq!(p.m_value(), 4);
        // Constant on L(-1/2) at u = 5/2: least m with m·(5/2)/2 ∈ Z is 4.
        let c = Edgepath::Constant { tangle: rat(-1, 2), u: rat(5, 2) };
        assert_eq!(c.m_value(), 4);
        assert_eq!(c.length(), Rational::ZERO);
        // Constant at an integer height over q = 2 still needs m = 2.
        let c2 = Edgepath::Constant { tangle: rat(-1, 2), u: rat(3, 1) };
        assert_eq!(c2.m_value(), 2);
    }

    #[test]
    fn r_values_and_segment_slopes() {
        // <1/q> > <0> extends to y = 1/(q-1) at x = 1.
        for q in 2..=12 {
            let p = Edgepath::VertexEnded {
                tangle: rat(1, q),
                steps: vec![Step::new(v(1, q), v(0, 1))],
            };
            assert_eq!(p.extended_y_at_x1().unwrap(), rat(1, q - 1));
            assert_eq!(p.r_value().unwrap(), q - 1);
            assert!(p.final_segment_slope().unwrap().is_positive());
        }
        // <1/3> > <1/2> has slope -1 and r = 1.
        let p = Edgepath::Partial {
            tangle: rat(1, 3),
            steps: vec![],
            last: Step::new(v(1, 3), v(1, 2)),
            beta: rat(1, 2),
        };
        assert_eq!(p.final_segment_slope().unwrap(), rat(-1, 1));
        assert_eq!(p.r_value().unwrap(), 1);
        // <-1/3> > <-1/2> has slope +1 (mirrored sense).
        let m = Edgepath::Partial {
            tangle: rat(-1, 3),
            steps: vec![],
            last: Step::new(v(-1, 3), v(-1, 2)),
            beta: rat(1, 2),
        };
        assert_eq!(m.final_segment_slope().unwrap(), rat(1, 1));
        assert_eq!(m.r_value().unwrap(), 1);
        // Constants have no r-value.
        let c = Edgepath::Constant { tangle: rat(1, 3), u: rat(3, 1) };
        assert!(c.r_value().is_err());
    }

    #[test]
    fn twist_halves_weight_partials() {
        // <1/3> > <1/2> moving up with beta = 1/2.
        let p = Edgepath::Partial {
            tangle: rat(1, 3),
            steps: vec![],
            last: Step::new(v(1, 3), v(1, 2)),
            beta: rat(1, 2),
        };
        assert_eq!(p.twist_halves(), (Rational::ZERO, rat(1, 2)));
        // <1/7> > <0> moving down with beta = 3/4.
        let q = truncate_at_u(&skel(rat(1, 7), &[v(0, 1)]), rat(5, 2)).unwrap();
        assert_eq!(q.twist_halves(), (rat(3, 4), Rational::ZERO));
    }

    #[test]
    fn rendering() {
        let p = truncate_at_u(&skel(rat(1, 3), &[v(1, 2)]), rat(5, 2)).unwrap();
        assert_eq!(p.render(), "1/3 > 1/2 > @5/2");
        let c = Edgepath::Constant { tangle: rat(1, 3), u: rat(3, 1) };
        assert_eq!(c.render(), "const(1/3 @ 3)");
        let ve = Edgepath::VertexEnded {
            tangle: rat(1, 3),
            steps: vec![Step::new(v(1, 3), v(0, 1))],
        };
        assert_eq!(ve.render(), "1/3 > 0");
        let vert = Edgepath::Partial {
            tangle: rat(1, 3),
            steps: vec![Step::new(v(1, 3), v(0, 1))],
            last: Step::new(v(0, 1), v(1, 1)),
            beta: rat(1, 2),
        };
        assert_eq!(vert.render(), "1/3 > 0 > 1 > @y=1/2");
    }

    #[test]
    fn every_enumerated_skeleton_truncates_validly() {
        let params = SearchParams { u_floor: Rational::ONE, max_edges: 4 };
        for t in [rat(1, 3), rat(-2, 5), rat(3, 7), rat(-1, 2)] {
            for s in enumerate_skeletons(t, &params).unwrap() {
                // Cut at each vertex height and at one interior height per
                // nonvertical edge.
                let mut heights = vec![Rational::from_int(t.denom())];
                for st in &s.steps {
                    if st.is_vertical() {
                        break;
                    }
                    let uf = st.from.u().unwrap();
                    let ut = st.to.u().unwrap();
                    heights.push((uf + ut) / rat(2, 1));
                    heights.push(ut);
                }
                for u in heights {
                    let p = truncate_at_u(&s, u).unwrap();
                    assert!(p.validate(), "invalid truncation of {s:?} at {u}");
                    assert_eq!(p.final_u(), u);
                }
            }
        }
    }
}
