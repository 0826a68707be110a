//! Solving the gluing constraint: which edgepath triples form candidate
//! systems.
//!
//! A candidate system is one edgepath per tangle, all stopped at a common
//! height `ū` with `y1 + y2 + y3 = 0` there. Per tangle, the allowable
//! stopping positions are tiled exactly by *descriptors*:
//!
//! - the constant path on `L(t)`: `u ∈ [q, ∞)`, `u·y = t·u`;
//! - per skeleton with nonvertical final step: `u ∈ [u(to), u(from))`
//!   (closed where the edge completes into a vertex, open at the start,
//!   whose point belongs to the shorter skeleton), with `u·y` linear;
//! - per skeleton with vertical final step: `u = 1`, `y` strictly between
//!   the endpoints and inclusive at the far one.
//!
//! On a cell (intersection of three `u`-ranges) the constraint reads
//! `A·u + B = 0` exactly, so a cell yields one system, nothing, or — when
//! `A = B = 0` — a whole interval of systems. Cells at `u = 1` containing
//! vertical stops instead solve an affine constraint in the free `y`s.
//! Every system arises from exactly one descriptor triple, so the output
//! is duplicate-free by construction.

use crate::diagram;
use crate::edgepath::{enumerate_skeletons, truncate_at_u, Edgepath, SearchParams, Skeleton};
use crate::error::{Error, Result};
use crate::knot::KnotParams;
use crate::rational::{rat, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolutionFamily {
    /// Every `u` in `[lo, hi)` solves the cell; the carried paths sit at the
    /// interval midpoint.
    UInterval { lo: Rational, hi: Rational },
    /// Vertical stops at `u = 1` with `dims` degrees of freedom in `y`; the
    /// carried paths are one exact representative.
    YFamily { dims: usize },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CandidateSystem {
    pub paths: [Edgepath; 3],
    pub u_bar: Rational,
    pub ys: [Rational; 3],
    pub family: Option<SolutionFamily>,
}

impl CandidateSystem {
    pub fn render(&self) -> String {
        format!(
            "{} ; {} ; {}",
            self.paths[0].render(),
            self.paths[1].render(),
            self.paths[2].render()
        )
    }

    /// Rebuild the same `u`-interval family member at another height.
    /// Vertical stops are `y`-parameterized, not `u`-parameterized, and are
    /// rejected.
    pub fn at_u(&self, u: Rational) -> Result<CandidateSystem> {
        let rebuild = |p: &Edgepath| -> Result<Edgepath> {
            match p {
                Edgepath::Constant { tangle, .. } => {
                    Ok(Edgepath::Constant { tangle: *tangle, u })
                }
                Edgepath::VertexEnded { tangle, steps } => truncate_at_u(
                    &Skeleton { start: *tangle, steps: steps.clone() },
                    u,
                ),
                Edgepath::Partial { tangle, steps, last, .. } => {
                    if last.is_vertical() {
                        return Err(Error::Unsupported(
                            "vertical stops are not u-parameterized".into(),
                        ));
                    }
                    let mut all = steps.clone();
                    all.push(*last);
                    truncate_at_u(&Skeleton { start: *tangle, steps: all }, u)
                }
            }
        };
        let paths = [
            rebuild(&self.paths[0])?,
            rebuild(&self.paths[1])?,
            rebuild(&self.paths[2])?,
        ];
        let ys = [paths[0].final_y(), paths[1].final_y(), paths[2].final_y()];
        if ys[0] + ys[1] + ys[2] != Rational::ZERO {
            return Err(Error::Invariant(format!(
                "re-evaluated family member at u = {u} violates the gluing constraint"
            )));
        }
        Ok(CandidateSystem { paths, u_bar: u, ys, family: self.family })
    }
}

/// Cheap shape data of one solved cell, available before any path is
/// constructed: enough to evaluate length-based invariants exactly.
#[derive(Clone, Copy, Debug)]
pub struct SolutionProfile {
    pub u: Rational,
    /// `Some((lo, hi))` when the whole `u`-interval solves the cell (the
    /// profile itself is taken at the midpoint representative).
    pub interval: Option<(Rational, Rational)>,
    /// Number of paths stopped on a vertical edge (`u = 1` cells).
    pub free_verticals: usize,
    pub parts: [ProfilePart; 3],
}

#[derive(Clone, Copy, Debug)]
pub enum ProfilePart {
    /// A constant path on `L(t)` with `denom = q`.
    Constant { denom: i128 },
    /// A traversing path of the given exact length.
    Path { length: Rational },
}

/// One stopping-position descriptor for a single tangle.
#[derive(Clone, Debug)]
enum Desc {
    Constant { t: Rational },
    Edge { skel: Skeleton, lo: Rational, hi: Rational, s: Rational, c: Rational },
    Vertical { skel: Skeleton },
}

impl Desc {
    /// Path length when stopped at height `u` (edge descriptors only).
    fn length_at(&self, u: Rational) -> Rational {
        match self {
            Desc::Edge { skel, lo, hi, .. } => {
                // Full steps before the last one, plus the traversed share
                // of the last; `u = lo` is the completed edge.
                Rational::from_int(skel.steps.len() as i128 - 1) + (*hi - u) / (*hi - *lo)
            }
            _ => unreachable!("length_at is for edge descriptors"),
        }
    }
}

fn descriptors(t: Rational, params: &SearchParams) -> Result<Vec<Desc>> {
    let mut out = vec![Desc::Constant { t }];
    for skel in enumerate_skeletons(t, params)? {
        // The empty skeleton's single point (u = q) is the constant path's
        // left endpoint; the Constant descriptor covers it.
        let Some(&last) = skel.steps.last() else { continue };
        if last.is_vertical() {
            out.push(Desc::Vertical { skel });
        } else {
            let (s, c) = diagram::edge_uy_coeffs(last.from, last.to)?;
            let lo = last.to.u().expect("path vertices have finite u");
            let hi = last.from.u().expect("path vertices have finite u");
            out.push(Desc::Edge { skel, lo, hi, s, c });
        }
    }
    Ok(out)
}

/// An interval of rationals with individually open/closed ends.
#[derive(Clone, Copy, Debug)]
struct Iv {
    lo: Rational,
    lo_open: bool,
    hi: Rational,
    hi_open: bool,
}

impl Iv {
    fn closed(lo: Rational, hi: Rational) -> Iv {
        Iv { lo, lo_open: false, hi, hi_open: false }
    }

    fn intersect(self, o: Iv) -> Iv {
        let (lo, lo_open) = match self.lo.cmp(&o.lo) {
            std::cmp::Ordering::Greater => (self.lo, self.lo_open),
            std::cmp::Ordering::Less => (o.lo, o.lo_open),
            std::cmp::Ordering::Equal => (self.lo, self.lo_open || o.lo_open),
        };
        let (hi, hi_open) = match self.hi.cmp(&o.hi) {
            std::cmp::Ordering::Less => (self.hi, self.hi_open),
            std::cmp::Ordering::Greater => (o.hi, o.hi_open),
            std::cmp::Ordering::Equal => (self.hi, self.hi_open || o.hi_open),
        };
        Iv { lo, lo_open, hi, hi_open }
    }

    /// Some exact point of the interval, preferring closed endpoints.
    fn pick(self) -> Option<Rational> {
        if self.lo > self.hi {
            return None;
        }
        if self.lo == self.hi {
            return (!self.lo_open && !self.hi_open).then_some(self.lo);
        }
        if !self.hi_open {
            Some(self.hi)
        } else if !self.lo_open {
            Some(self.lo)
        } else {
            Some((self.lo + self.hi) / rat(2, 1))
        }
    }
}

/// Range of `Σ dir_j·β_j` over `p` upward and `n` downward free verticals
/// with each `β ∈ (0, 1]`.
fn vertical_rest_range(p: usize, n: usize) -> Iv {
    let (p_r, n_r) = (Rational::from_int(p as i128), Rational::from_int(n as i128));
    match (p, n) {
        (0, 0) => Iv::closed(Rational::ZERO, Rational::ZERO),
        (_, 0) => Iv { lo: Rational::ZERO, lo_open: true, hi: p_r, hi_open: false },
        (0, _) => Iv { lo: -n_r, lo_open: false, hi: Rational::ZERO, hi_open: true },
        _ => Iv { lo: -n_r, lo_open: true, hi: p_r, hi_open: true },
    }
}

pub fn solve_systems(k: &KnotParams, params: &SearchParams) -> Result<Vec<CandidateSystem>> {
    solve_systems_screened(k, params, &|_| true)
}

/// Like [`solve_systems`], but consults `screen` with each solved cell's
/// [`SolutionProfile`] before constructing the paths. A screen that rejects
/// most cells (the toroidal search keeps ~one in a thousand) skips the
/// allocation-heavy path assembly for the rest.
pub fn solve_systems_screened(
    k: &KnotParams,
    params: &SearchParams,
    screen: &dyn Fn(&SolutionProfile) -> bool,
) -> Result<Vec<CandidateSystem>> {
    let d0 = descriptors(k.t[0], params)?;
    let d1 = descriptors(k.t[1], params)?;
    let d2 = descriptors(k.t[2], params)?;
    let mut out = Vec::new();
    for a in &d0 {
        for b in &d1 {
            for c in &d2 {
                solve_cell([a, b, c], params, screen, &mut out)?;
            }
        }
    }
    out.sort_by_cached_key(|x| (x.u_bar, x.render()));
    Ok(out)
}

fn solve_cell(
    ds: [&Desc; 3],
    params: &SearchParams,
    screen: &dyn Fn(&SolutionProfile) -> bool,
    out: &mut Vec<CandidateSystem>,
) -> Result<()> {
    if ds.iter().any(|d| matches!(d, Desc::Vertical { .. })) {
        return solve_vertical_cell(ds, params, screen, out);
    }
    let mut lo = params.u_floor;
    let mut hi: Option<Rational> = None;
    let mut a = Rational::ZERO;
    let mut b = Rational::ZERO;
    for d in ds {
        match d {
            Desc::Constant { t } => {
                lo = lo.max(Rational::from_int(t.denom()));
                a += *t;
            }
            Desc::Edge { lo: dlo, hi: dhi, s, c, .. } => {
                lo = lo.max(*dlo);
                hi = Some(hi.map_or(*dhi, |h| h.min(*dhi)));
                a += *s;
                b += *c;
            }
            Desc::Vertical { .. } => unreachable!(),
        }
    }
    if let Some(h) = hi {
        if h <= lo {
            return Ok(());
        }
    }
    let profile_at = |u: Rational, interval: Option<(Rational, Rational)>| SolutionProfile {
        u,
        interval,
        free_verticals: 0,
        parts: ds.map(|d| match d {
            Desc::Constant { t } => ProfilePart::Constant { denom: t.denom() },
            _ => ProfilePart::Path { length: d.length_at(u) },
        }),
    };
    if a == Rational::ZERO && b == Rational::ZERO {
        // The whole cell solves the constraint. Unbounded cells would need
        // Σt_i = 0, which no knot satisfies.
        let h = hi.ok_or_else(|| {
            Error::Invariant("unbounded solution family (slope sum is zero)".into())
        })?;
        let mid = (lo + h) / rat(2, 1);
        if screen(&profile_at(mid, Some((lo, h)))) {
            let family = Some(SolutionFamily::UInterval { lo, hi: h });
            out.push(build_system(ds, mid, family)?);
        }
    } else if a != Rational::ZERO {
        let u = -b / a;
        if u >= lo && hi.map_or(true, |h| u < h) && screen(&profile_at(u, None)) {
            out.push(build_system(ds, u, None)?);
        }
    }
    Ok(())
}

fn build_system(
    ds: [&Desc; 3],
    u: Rational,
    family: Option<SolutionFamily>,
) -> Result<CandidateSystem> {
    let path = |d: &Desc| -> Result<Edgepath> {
        match d {
            Desc::Constant { t } => Ok(Edgepath::Constant { tangle: *t, u }),
            Desc::Edge { skel, .. } => truncate_at_u(skel, u),
            Desc::Vertical { .. } => unreachable!(),
        }
    };
    let paths = [path(ds[0])?, path(ds[1])?, path(ds[2])?];
    finish_system(paths, u, family)
}

fn finish_system(
    paths: [Edgepath; 3],
    u_bar: Rational,
    family: Option<SolutionFamily>,
) -> Result<CandidateSystem> {
    let ys = [paths[0].final_y(), paths[1].final_y(), paths[2].final_y()];
    for p in &paths {
        if !p.validate() || p.final_u() != u_bar {
            return Err(Error::Invariant(format!(
                "solver produced an invalid path {}",
                p.render()
            )));
        }
    }
    if ys[0] + ys[1] + ys[2] != Rational::ZERO {
        return Err(Error::Invariant(format!(
            "solver violated the gluing constraint at u = {u_bar}"
        )));
    }
    Ok(CandidateSystem { paths, u_bar, ys, family })
}

fn solve_vertical_cell(
    ds: [&Desc; 3],
    params: &SearchParams,
    screen: &dyn Fn(&SolutionProfile) -> bool,
    out: &mut Vec<CandidateSystem>,
) -> Result<()> {
    if params.u_floor > Rational::ONE {
        return Ok(());
    }
    let mut fixed: Vec<(usize, &Desc)> = Vec::new();
    let mut free: Vec<(usize, &Skeleton)> = Vec::new();
    for (i, d) in ds.iter().enumerate() {
        match d {
            // Constants live at u >= q >= 2, never at u = 1.
            Desc::Constant { .. } => return Ok(()),
            Desc::Edge { lo, hi, .. } => {
                if !(*lo <= Rational::ONE && Rational::ONE < *hi) {
                    return Ok(());
                }
                fixed.push((i, d));
            }
            Desc::Vertical { skel } => free.push((i, skel)),
        }
    }
    // y of a fixed path at u = 1 is s + c, no need to build it yet.
    let fixed_sum = fixed.iter().fold(Rational::ZERO, |acc, (_, d)| match d {
        Desc::Edge { s, c, .. } => acc + *s + *c,
        _ => unreachable!(),
    });
    // Σ_j dir_j·β_j = d, each β_j ∈ (0, 1].
    let dirs: Vec<i128> = free
        .iter()
        .map(|(_, s)| {
            let last = s.steps.last().unwrap();
            (last.y_to() - last.y_from()).signum()
        })
        .collect();
    let base_sum = free.iter().fold(Rational::ZERO, |acc, (_, s)| {
        acc + s.steps.last().unwrap().y_from()
    });
    let mut d = -fixed_sum - base_sum;
    let mut betas = Vec::with_capacity(free.len());
    for j in 0..free.len() {
        let p_rest = dirs[j + 1..].iter().filter(|&&x| x > 0).count();
        let n_rest = dirs[j + 1..].len() - p_rest;
        let rest = vertical_rest_range(p_rest, n_rest);
        // Solve d - dir·β ∈ rest for β, then keep β ∈ (0, 1].
        let raw = if dirs[j] > 0 {
            Iv { lo: d - rest.hi, lo_open: rest.hi_open, hi: d - rest.lo, hi_open: rest.lo_open }
        } else {
            Iv { lo: rest.lo - d, lo_open: rest.lo_open, hi: rest.hi - d, hi_open: rest.hi_open }
        };
        let unit = Iv { lo: Rational::ZERO, lo_open: true, hi: Rational::ONE, hi_open: false };
        match raw.intersect(unit).pick() {
            Some(beta) => {
                d -= Rational::from_int(dirs[j]) * beta;
                betas.push(beta);
            }
            None => return Ok(()), // infeasible cell
        }
    }
    if d != Rational::ZERO {
        return Err(Error::Invariant("vertical solve left a residual".into()));
    }
    let mut parts = [ProfilePart::Constant { denom: 0 }; 3];
    for (i, d) in &fixed {
        parts[*i] = ProfilePart::Path { length: d.length_at(Rational::ONE) };
    }
    for (j, (i, skel)) in free.iter().enumerate() {
        let length = Rational::from_int(skel.steps.len() as i128 - 1) + betas[j];
        parts[*i] = ProfilePart::Path { length };
    }
    let profile = SolutionProfile {
        u: Rational::ONE,
        interval: None,
        free_verticals: free.len(),
        parts,
    };
    if !screen(&profile) {
        return Ok(());
    }
    // Assemble in tangle order.
    let mut slots: [Option<Edgepath>; 3] = [None, None, None];
    for (i, d) in fixed {
        let Desc::Edge { skel, .. } = d else { unreachable!() };
        slots[i] = Some(truncate_at_u(skel, Rational::ONE)?);
    }
    for (j, (i, skel)) in free.iter().enumerate() {
        let last = *skel.steps.last().unwrap();
        let beta = betas[j];
        let p = if beta == Rational::ONE {
            Edgepath::VertexEnded { tangle: skel.start, steps: skel.steps.clone() }
        } else {
            Edgepath::Partial {
                tangle: skel.start,
                steps: skel.steps[..skel.steps.len() - 1].to_vec(),
                last,
                beta,
            }
        };
        slots[*i] = Some(p);
    }
    let paths = slots.map(|s| s.expect("every slot filled"));
    let family = (free.len() >= 2).then_some(SolutionFamily::YFamily { dims: free.len() - 1 });
    out.push(finish_system(paths, Rational::ONE, family)?);
    Ok(())
}
