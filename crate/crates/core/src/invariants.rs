//! Surface invariants of candidate systems: Euler numbers, Euler
//! characteristics, orientability, and the torus criterion.
//!
//! The Euler number assigned to a diagram point is `(4-u)/3` off the
//! horizontal lines and `1/3 + u(1/q - 1/3)` on `L(p/q)` (the two agree at
//! the vertex `u = q`). A path's Euler number is the point value at its end
//! minus its length. The capped-off candidate surface is a torus exactly
//! when the system's total Euler number equals `(b-1)/b`, `b` the boundary
//! slope's denominator; that test and the Euler-characteristic bookkeeping
//! behind it live here, cross-checked against each other on every call.

use crate::diagram::{DiagramPoint, Locus};
use crate::edgepath::Edgepath;
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};
use crate::solver::{CandidateSystem, ProfilePart, SolutionProfile};

/// Euler number of a single diagram point.
pub fn euler_number_point(p: &DiagramPoint) -> Rational {
    match p.locus {
        Locus::Horizontal(t) => {
            let q = Rational::from_int(t.denom());
            rat(1, 3) + p.u * (q.recip() - rat(1, 3))
        }
        Locus::Vertex(_) | Locus::EdgeInterior(_) => (rat(4, 1) - p.u) / rat(3, 1),
    }
}

/// Euler number of a path: point value at its end minus its length.
pub fn euler_number_path(path: &Edgepath) -> Rational {
    euler_number_point(&path.final_point()) - path.length()
}

/// Total Euler number of a system.
pub fn ebar(sys: &CandidateSystem) -> Rational {
    sys.paths.iter().map(euler_number_path).fold(Rational::ZERO, |a, b| a + b)
}

/// Total Euler number straight from a solver [`SolutionProfile`], before any
/// path exists: constants end on their horizontal (`1/3 + u(1/q - 1/3)`),
/// traversing paths end off the horizontals (`(4-u)/3` minus the length).
/// Agrees with [`ebar`] on the built system; the solver tests pin that.
pub fn ebar_from_profile(p: &SolutionProfile) -> Rational {
    p.parts.iter().fold(Rational::ZERO, |acc, part| {
        acc + match part {
            ProfilePart::Constant { denom } => {
                rat(1, 3) + p.u * (rat(1, *denom) - rat(1, 3))
            }
            ProfilePart::Path { length } => (rat(4, 1) - p.u) / rat(3, 1) - *length,
        }
    })
}

/// Sign of the Euler number of the shortest path ending at `p`: the
/// constant path for vertex and horizontal loci, the single partial edge
/// for edge interiors. This is the quantity whose positivity region the
/// short-path case analysis describes.
pub fn positivity_region(p: &DiagramPoint) -> std::cmp::Ordering {
    let beta = match p.locus {
        Locus::Vertex(_) | Locus::Horizontal(_) => Rational::ZERO,
        Locus::EdgeInterior(step) => {
            if step.is_vertical() {
                (p.y - step.y_from()).abs()
            } else {
                let uf = step.from.u().expect("edge endpoints have finite u");
                let ut = step.to.u().expect("edge endpoints have finite u");
                (uf - p.u) / (uf - ut)
            }
        }
    };
    (euler_number_point(p) - beta).cmp(&Rational::ZERO)
}

fn as_integer(x: Rational, what: &str) -> Result<i128> {
    if x.is_integer() {
        Ok(x.numer())
    } else {
        Err(Error::Invariant(format!("{what} = {x} is not an integer")))
    }
}

/// Euler characteristic contribution of one tangle carried by `m` sheets:
/// `m(2 - |γ|)` for non-constant paths, `m(1 + u/q)` for constants. Errors
/// when `m` is incompatible with the path (fractional piece counts).
pub fn chi_tangle(path: &Edgepath, m: i128) -> Result<i128> {
    let m_r = Rational::from_int(m);
    let bad = || {
        Error::Unsupported(format!(
            "sheet count {m} incompatible with path {}",
            path.render()
        ))
    };
    match path {
        Edgepath::Constant { tangle, u } => {
            let ratio = *u / Rational::from_int(tangle.denom());
            if !(m_r * ratio).is_integer() {
                return Err(bad());
            }
            Ok((m_r * (Rational::ONE + ratio)).numer())
        }
        _ => {
            let len = path.length();
            if !(m_r * len).is_integer() {
                return Err(bad());
            }
            Ok((m_r * (rat(2, 1) - len)).numer())
        }
    }
}

/// Extra horizontal disks a constant path contributes beyond the `2m`
/// saddle-free count: `m·u/q - m`. Zero for non-constant paths.
pub fn extra_disks(path: &Edgepath, m: i128) -> Result<i128> {
    match path {
        Edgepath::Constant { tangle, u } => {
            let ratio = *u / Rational::from_int(tangle.denom());
            as_integer(
                Rational::from_int(m) * ratio - Rational::from_int(m),
                "extra disk count",
            )
        }
        _ => Ok(0),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientability {
    Yes,
    No,
    /// The 2-coloring argument only applies to systems made of fully
    /// traversed edges; anything with a constant or partial path is left
    /// undetermined and reported with both sheet counts.
    Undetermined,
}

/// Orientability of the underlying (uncapped, unpinched) surface by the
/// band 2-coloring: a full-edge system is orientable iff all its steps
/// share one flip parity.
pub fn orientability(sys: &CandidateSystem) -> Orientability {
    let mut flips: Vec<bool> = Vec::new();
    for p in &sys.paths {
        match p {
            Edgepath::VertexEnded { steps, .. } => {
                flips.extend(steps.iter().map(|s| s.flips()));
            }
            _ => return Orientability::Undetermined,
        }
    }
    match flips.split_first() {
        None => Orientability::Undetermined,
        Some((first, rest)) => {
            if rest.iter().all(|f| f == first) {
                Orientability::Yes
            } else {
                Orientability::No
            }
        }
    }
}

/// The torus criterion on the capped-off surface.
pub fn torus_test(ebar: Rational, b_slope: i128) -> bool {
    ebar == rat(b_slope - 1, b_slope)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SurfaceReport {
    /// Per-tangle minimal sheet counts.
    pub m_values: [i128; 3],
    /// Their least common multiple.
    pub n: i128,
    pub orientable: Orientability,
    /// Sheets carried: `n` when orientable (or undetermined with `b | n`),
    /// `2n` otherwise.
    pub sheets: i128,
    /// `2n` when orientability is undetermined, else equal to `sheets`.
    pub sheets_upper: i128,
    pub chi_tangles: [i128; 3],
    pub extra_disk_counts: [i128; 3],
    /// χ of the candidate surface (before capping).
    pub chi_surface: i128,
    /// `sheets·(ū - 1)`, the count of boundary arcs absorbed per tangle.
    pub b_param: Rational,
    pub ebar: Rational,
    /// The boundary slope δ the report was built against.
    pub slope: Rational,
    pub boundary_count: i128,
    /// χ of the capped-off surface.
    pub chi_capped: i128,
    pub torus: bool,
}

/// Assemble every surface invariant of a system at boundary slope `delta`,
/// cross-checking the two derivations of the capped Euler characteristic
/// and all integrality/divisibility constraints. Any mismatch is an
/// internal-invariant error, never a silent answer.
pub fn surface_report(sys: &CandidateSystem, delta: Rational) -> Result<SurfaceReport> {
    let m_values = [
        sys.paths[0].m_value(),
        sys.paths[1].m_value(),
        sys.paths[2].m_value(),
    ];
    let n = m_values.iter().copied().fold(1, lcm);
    let orientable = orientability(sys);
    let b_slope = delta.denom();
    let sheets = match orientable {
        Orientability::Yes => n,
        Orientability::No => 2 * n,
        Orientability::Undetermined => {
            if n % b_slope == 0 {
                n
            } else {
                2 * n
            }
        }
    };
    let sheets_upper = if orientable == Orientability::Undetermined { 2 * n } else { sheets };
    if sheets % b_slope != 0 || 2 * n % b_slope != 0 {
        return Err(Error::Invariant(format!(
            "slope denominator {b_slope} does not divide the sheet count {sheets}"
        )));
    }
    let chi_tangles = [
        chi_tangle(&sys.paths[0], sheets)?,
        chi_tangle(&sys.paths[1], sheets)?,
        chi_tangle(&sys.paths[2], sheets)?,
    ];
    let extra_disk_counts = [
        extra_disks(&sys.paths[0], sheets)?,
        extra_disks(&sys.paths[1], sheets)?,
        extra_disks(&sys.paths[2], sheets)?,
    ];
    let m_r = Rational::from_int(sheets);
    let b_param = m_r * (sys.u_bar - Rational::ONE);
    if sys.u_bar >= Rational::ONE {
        let b_int = as_integer(b_param, "vertical-arc parameter")?;
        if b_int < 0 {
            return Err(Error::Invariant(format!(
                "negative vertical-arc parameter {b_int}"
            )));
        }
    }
    let chi_surface = as_integer(
        Rational::from_int(chi_tangles.iter().sum::<i128>())
            - rat(4, 1) * m_r
            - b_param,
        "surface Euler characteristic",
    )?;
    let e = ebar(sys);
    let boundary_count = sheets / b_slope;
    let chi_capped = chi_surface + boundary_count;
    // Independent derivation of the capped characteristic; exact identity.
    let via_euler_numbers = m_r * (e - rat(b_slope - 1, b_slope));
    if Rational::from_int(chi_capped) != via_euler_numbers {
        return Err(Error::Invariant(format!(
            "capped Euler characteristic mismatch: {chi_capped} vs {via_euler_numbers}"
        )));
    }
    Ok(SurfaceReport {
        m_values,
        n,
        orientable,
        sheets,
        sheets_upper,
        chi_tangles,
        extra_disk_counts,
        chi_surface,
        b_param,
        ebar: e,
        slope: delta,
        boundary_count,
        chi_capped,
        torus: torus_test(e, b_slope),
    })
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: i128, b: i128) -> i128 {
    a / gcd(a, b) * b
}

/// `ē = (4 - ū) - Σ|γ_i|` whenever no path ends on a horizontal line; used
/// as a test-time identity.
pub fn ebar_by_lengths(sys: &CandidateSystem) -> Option<Rational> {
    if sys
        .paths
        .iter()
        .any(|p| matches!(p.final_point().locus, Locus::Horizontal(_)))
    {
        return None;
    }
    let total: Rational = sys.paths.iter().map(|p| p.length()).fold(Rational::ZERO, |a, b| a + b);
    Some(rat(4, 1) - sys.u_bar - total)
}
