//! The Hatcher–Oertel diagram: vertices, Farey adjacency, and the linear
//! structure of edges.
//!
//! Coordinates. A vertex `<p/q>` sits at `(x, y) = ((q-1)/q, p/q)`. We work
//! in the horizontal coordinate `u = 1/(1-x)`, so `u(<p/q>) = q` and `<∞>`
//! at `(-1, 0)` has `u = 1/2`. Each fraction also has an *ideal* vertex
//! `<p/q>_0` on the line `x = 1` (`u = +∞`), joined to `<p/q>` by the
//! horizontal segment `L(p/q)`.
//!
//! The workhorse fact: along every nonhorizontal edge the product `u·y` is a
//! linear function of `u` (it equals `p` at `u = q` for each endpoint
//! `<p/q>`, and `0` at `u = 1/2` for `<∞>`). All interpolation, the system
//! solver, and the twist bookkeeping ride on that linearity.

use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Vertex {
    /// `<p/q>` with `q >= 1` (integers included).
    Finite(Rational),
    /// `<p/q>_0`, the ideal endpoint of the horizontal line `L(p/q)`.
    Ideal(Rational),
    /// `<∞>` at `(-1, 0)`.
    Infinity,
}

impl Vertex {
    pub fn finite(f: Rational) -> Vertex {
        Vertex::Finite(f)
    }

    pub fn fraction(self) -> Option<Rational> {
        match self {
            Vertex::Finite(f) | Vertex::Ideal(f) => Some(f),
            Vertex::Infinity => None,
        }
    }

    /// Horizontal coordinate; `None` for ideal vertices (`u = +∞`).
    pub fn u(self) -> Option<Rational> {
        match self {
            Vertex::Finite(f) => Some(Rational::from_int(f.denom())),
            Vertex::Infinity => Some(rat(1, 2)),
            Vertex::Ideal(_) => None,
        }
    }

    /// The value of `u·y` at this vertex; `None` for ideal vertices.
    pub fn uy(self) -> Option<Rational> {
        match self {
            Vertex::Finite(f) => Some(Rational::from_int(f.numer())),
            Vertex::Infinity => Some(Rational::ZERO),
            Vertex::Ideal(_) => None,
        }
    }

    /// Cartesian coordinates (ideal vertices sit on `x = 1`).
    pub fn xy(self) -> (Rational, Rational) {
        match self {
            Vertex::Finite(f) => {
                let q = Rational::from_int(f.denom());
                ((q - Rational::ONE) / q, f)
            }
            Vertex::Ideal(f) => (Rational::ONE, f),
            Vertex::Infinity => (Rational::from_int(-1), Rational::ZERO),
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Vertex::Finite(f) if f.is_integer())
    }
}

impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Vertex::Finite(r) => write!(f, "{r}"),
            Vertex::Ideal(r) => write!(f, "{r}o"),
            Vertex::Infinity => write!(f, "inf"),
        }
    }
}

/// `(p, q)` in lowest terms, with `<∞>` as `(1, 0)` so the determinant test
/// below covers it uniformly. Ideal vertices have no such representation.
fn pq(v: Vertex) -> Option<(i128, i128)> {
    match v {
        Vertex::Finite(f) => Some((f.numer(), f.denom())),
        Vertex::Infinity => Some((1, 0)),
        Vertex::Ideal(_) => None,
    }
}

/// A directed traversal of one nonhorizontal edge, in path order
/// (right to left: `u(to) <= u(from)`, with equality exactly on vertical
/// edges between integer vertices).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Step {
    pub from: Vertex,
    pub to: Vertex,
}

impl Step {
    pub fn new(from: Vertex, to: Vertex) -> Step {
        Step { from, to }
    }

    pub fn is_vertical(self) -> bool {
        is_vertical(self.from, self.to)
    }

    /// `y` of a step endpoint (`<∞>` sits at `y = 0`).
    fn endpoint_y(v: Vertex) -> Rational {
        v.fraction().unwrap_or(Rational::ZERO)
    }

    pub fn y_from(self) -> Rational {
        Self::endpoint_y(self.from)
    }

    pub fn y_to(self) -> Rational {
        Self::endpoint_y(self.to)
    }

    /// Whether a point moves downward when traversing the step (right to
    /// left). Endpoint `y`-values of distinct adjacent vertices never tie.
    pub fn goes_down(self) -> bool {
        self.y_to() < self.y_from()
    }

    /// Parity class of the step for the orientability 2-coloring: the band
    /// of a traversed edge flips iff the endpoint denominators agree mod 2
    /// (vertical edges always flip; `<∞>` counts with denominator 0).
    pub fn flips(self) -> bool {
        let den = |v: Vertex| pq(v).map(|(_, q)| q).unwrap_or(0);
        (den(self.from) - den(self.to)) % 2 == 0
    }
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.from, self.to)
    }
}

/// Where a rational point of the diagram sits, with enough context to
/// evaluate Euler numbers and partial-edge lengths.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Locus {
    Vertex(Vertex),
    /// Interior of a nonhorizontal edge, oriented as traversed by a path.
    EdgeInterior(Step),
    /// On the horizontal line `L(p/q)` (strictly right of the vertex).
    Horizontal(Rational),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct DiagramPoint {
    pub u: Rational,
    pub y: Rational,
    pub locus: Locus,
}

/// Farey adjacency on fractions: `p/q ~ r/s` iff `|ps - rq| = 1`.
pub fn is_farey_pair(a: Rational, b: Rational) -> bool {
    let det = a.numer() * b.denom() - b.numer() * a.denom();
    det.abs() == 1
}

/// Whether the diagram has a (nonhorizontal) edge between two vertices.
/// `<∞>` is adjacent to exactly the integer vertices; ideal vertices have no
/// nonhorizontal edges at all. Integer–integer edges `<p>-<p±1>` are the
/// vertical edges at `u = 1`.
pub fn are_adjacent(a: Vertex, b: Vertex) -> bool {
    match (pq(a), pq(b)) {
        (Some((p, q)), Some((r, s))) => (p * s - r * q).abs() == 1,
        _ => false,
    }
}

pub fn is_vertical(a: Vertex, b: Vertex) -> bool {
    matches!((a.u(), b.u()), (Some(ua), Some(ub)) if ua == ub)
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// The two Farey parents of `p/q` (`q >= 2`): the unique adjacent fractions
/// `a/b`, `c/d` with `b, d < q`; they satisfy `a + c = p`, `b + d = q`.
/// Returned with the smaller-denominator parent second when denominators
/// differ is NOT guaranteed; callers sort as needed.
pub fn farey_parents(f: Rational) -> Result<(Rational, Rational)> {
    let (p, q) = (f.numer(), f.denom());
    if q < 2 {
        return Err(Error::Unsupported(format!("farey_parents of integer {f}")));
    }
    let (_, inv, _) = egcd(p, q);
    let y = inv.rem_euclid(q); // p·y ≡ 1 (mod q), 0 < y < q
    let x = (p * y - 1) / q;
    Ok((Rational::new(x, y), Rational::new(p - x, q - y)))
}

/// Coefficients `(s, c)` of the linear function `u·y = s·u + c` along the
/// nonhorizontal edge `a b`. Errors on vertical edges (`y` is not a function
/// of `u` there) and on anything touching an ideal vertex.
pub fn edge_uy_coeffs(a: Vertex, b: Vertex) -> Result<(Rational, Rational)> {
    let bad = |what: &str| Error::Unsupported(format!("uy line of {what} edge {a}-{b}"));
    let (ua, wa) = match (a.u(), a.uy()) {
        (Some(u), Some(w)) => (u, w),
        _ => return Err(bad("horizontal")),
    };
    let (ub, wb) = match (b.u(), b.uy()) {
        (Some(u), Some(w)) => (u, w),
        _ => return Err(bad("horizontal")),
    };
    if ua == ub {
        return Err(bad("vertical"));
    }
    let s = (wb - wa) / (ub - ua);
    Ok((s, wa - s * ua))
}

/// `y` at horizontal position `u` on the nonhorizontal edge `a b`.
pub fn edge_y(a: Vertex, b: Vertex, u: Rational) -> Result<Rational> {
    let (s, c) = edge_uy_coeffs(a, b)?;
    Ok((s * u + c) / u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: i128, d: i128) -> Vertex {
        Vertex::Finite(rat(n, d))
    }

    #[test]
    fn vertex_coordinates() {
        assert_eq!(v(1, 2).xy(), (rat(1, 2), rat(1, 2)));
        assert_eq!(v(-1, 3).xy(), (rat(2, 3), rat(-1, 3)));
        assert_eq!(v(5, 1).xy(), (Rational::ZERO, rat(5, 1)));
        assert_eq!(Vertex::Infinity.xy(), (rat(-1, 1), Rational::ZERO));
        // u = 1/(1-x) agrees with the stored u at every vertex kind.
        for vtx in [v(1, 2), v(-3, 7), v(2, 1), Vertex::Infinity] {
            let (x, _) = vtx.xy();
            assert_eq!(vtx.u().unwrap(), Rational::ONE / (Rational::ONE - x));
        }
    }

    #[test]
    fn adjacency() {
        assert!(are_adjacent(v(0, 1), v(1, 1)));
        assert!(are_adjacent(v(1, 3), v(1, 2)));
        assert!(!are_adjacent(v(1, 3), v(2, 3)));
        assert!(are_adjacent(v(1, 3), v(0, 1)));
        assert!(are_adjacent(v(2, 5), v(1, 2)));
        assert!(!are_adjacent(v(2, 5), v(1, 4)));
        assert!(are_adjacent(Vertex::Infinity, v(5, 1)));
        assert!(are_adjacent(Vertex::Infinity, v(-2, 1)));
        assert!(!are_adjacent(Vertex::Infinity, v(1, 2)));
        assert!(!are_adjacent(Vertex::Ideal(rat(1, 2)), v(1, 2)));
        // Vertical edges are the integer-integer ones.
        assert!(is_vertical(v(3, 1), v(4, 1)));
        assert!(!is_vertical(v(1, 2), v(1, 3)));
    }

    #[test]
    fn parents() {
        let sorted = |f| {
            let (a, b) = farey_parents(f).unwrap();
            if a.denom() <= b.denom() { (a, b) } else { (b, a) }
        };
        assert_eq!(sorted(rat(1, 2)), (rat(0, 1), rat(1, 1)));
        assert_eq!(sorted(rat(2, 5)), (rat(1, 2), rat(1, 3)));
        assert_eq!(sorted(rat(-1, 2)), (rat(-1, 1), rat(0, 1)));
        assert_eq!(sorted(rat(3, 7)), (rat(1, 2), rat(2, 5)));
        assert_eq!(sorted(rat(-6, 7)), (rat(-1, 1), rat(-5, 6)));
        assert!(farey_parents(rat(4, 1)).is_err());
        // Parents are adjacent to the child and sum to it componentwise.
        for f in [rat(3, 8), rat(-7, 12), rat(9, 11), rat(1, 100)] {
            let (a, b) = farey_parents(f).unwrap();
            assert!(is_farey_pair(a, f) && is_farey_pair(b, f) && is_farey_pair(a, b));
            assert_eq!(a.numer() + b.numer(), f.numer());
            assert_eq!(a.denom() + b.denom(), f.denom());
            assert!(a.denom() < f.denom() && b.denom() < f.denom());
        }
    }

    #[test]
    fn uy_interpolation() {
        // Both endpoints have numerator 1, so u·y ≡ 1 and y = 1/u.
        assert_eq!(edge_y(v(1, 2), v(1, 3), rat(5, 2)).unwrap(), rat(2, 5));
        // <∞>-<1>: u·y = 2u - 1.
        assert_eq!(edge_y(Vertex::Infinity, v(1, 1), rat(3, 4)).unwrap(), rat(2, 3));
        assert_eq!(edge_y(Vertex::Infinity, v(1, 1), rat(1, 2)).unwrap(), Rational::ZERO);
        // Endpoint values are reproduced exactly.
        let (a, b) = (v(2, 5), v(1, 3));
        assert_eq!(edge_y(a, b, rat(5, 1)).unwrap(), rat(2, 5));
        assert_eq!(edge_y(a, b, rat(3, 1)).unwrap(), rat(1, 3));
        assert!(edge_y(v(3, 1), v(4, 1), Rational::ONE).is_err());
    }
}
