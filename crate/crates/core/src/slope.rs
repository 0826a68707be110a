//! Twists and boundary slopes.
//!
//! The twist of a system is `τ = 2(e₋ - e₊)`, counting edges on which a
//! point moves down resp. up when traveling right to left (partial edges
//! count fractionally). Boundary slopes are reported relative to the
//! Seifert surface: `δ = τ - τ′`, where `τ′` is the twist of the system
//! carrying the Seifert surface.
//!
//! `τ′` is computed by one of two calibrated routes, split by the parity
//! classes of the reduced tangles:
//!
//! - *Formula branch* (some tangle has an even denominator, or the count of
//!   odd/odd tangles is even): shift the odd/odd tangles by ±1 into
//!   even-numerator form, compensating inside an even-denominator tangle so
//!   the shifts sum to zero, then add up the staircase twists of the even
//!   continued-fraction expansions. Both shift assignments are evaluated
//!   and must agree.
//!
//! - *Search branch* (an odd number of odd/odd tangles and no even
//!   denominator): enumerate the height-1 systems built from fully
//!   traversed edges of uniform band parity (the orientable ones) and take
//!   their common twist. All matches must agree.
//!
//! Any failure of existence or consensus is a loud calibration error.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::edgepath::{enumerate_skeletons, Edgepath, SearchParams};
use crate::error::{Error, Result};
use crate::knot::{parity_census, parity_class, KnotParams, ParityClass};
use crate::rational::{rat, Rational};
use crate::solver::CandidateSystem;

/// `τ = 2(e₋ - e₊)` of a system.
pub fn twist(sys: &CandidateSystem) -> Rational {
    let (down, up) = twist_halves(sys);
    rat(2, 1) * (down - up)
}

/// Total (downward, upward) edge weights of a system.
pub fn twist_halves(sys: &CandidateSystem) -> (Rational, Rational) {
    let mut down = Rational::ZERO;
    let mut up = Rational::ZERO;
    for p in &sys.paths {
        let (d, u) = p.twist_halves();
        down += d;
        up += u;
    }
    (down, up)
}

/// Even continued fraction `t = a0 + 1/(a1 + 1/(... + 1/ak))` with every
/// `a_i` even, by nearest-even rounding. `None` exactly when numerator and
/// denominator are both odd (no such expansion exists); otherwise the
/// expansion is unique.
pub fn even_cf(t: Rational) -> Option<Vec<i128>> {
    let mut terms = Vec::new();
    let mut x = t;
    loop {
        let a = if x.is_integer() {
            let n = x.numer();
            if n.rem_euclid(2) == 1 {
                return None;
            }
            n
        } else {
            // Nearest even integer; never a tie since x/2 is half-integral
            // only for odd integer x.
            2 * ((x / rat(2, 1) + rat(1, 2)).floor())
        };
        terms.push(a);
        let r = x - Rational::from_int(a);
        if r == Rational::ZERO {
            return Some(terms);
        }
        x = r.recip();
    }
}

/// The staircase of an evenizable slope: values of the even-CF truncations,
/// index 0 the even integer, last index `t` itself. Consecutive values are
/// Farey-adjacent, so this is a fully traversed edgepath from `<t>` down to
/// an integer vertex.
pub fn staircase(t: Rational) -> Option<Vec<Rational>> {
    let terms = even_cf(t)?;
    let mut vals = Vec::with_capacity(terms.len());
    for k in 0..terms.len() {
        vals.push(cf_value(&terms[..=k]));
    }
    Some(vals)
}

fn cf_value(terms: &[i128]) -> Rational {
    let mut v = Rational::from_int(*terms.last().unwrap());
    for &a in terms[..terms.len() - 1].iter().rev() {
        v = Rational::from_int(a) + v.recip();
    }
    v
}

/// Twist `2(e₋ - e₊)` of the staircase path of `t` (full edges only).
pub fn stair_twist(t: Rational) -> Result<Rational> {
    let vals = staircase(t).ok_or_else(|| {
        Error::Calibration(format!("{t} has no even continued fraction"))
    })?;
    let mut diff = 0i128; // e₋ - e₊
    // Path order: vals[k] -> vals[k-1] -> ... -> vals[0].
    for i in (1..vals.len()).rev() {
        if vals[i - 1] < vals[i] {
            diff += 1;
        } else {
            diff -= 1;
        }
    }
    Ok(rat(2 * diff, 1))
}

fn cache() -> &'static RwLock<HashMap<[Rational; 3], Rational>> {
    static CACHE: OnceLock<RwLock<HashMap<[Rational; 3], Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Twist `τ′` of the system carrying the Seifert surface of `k`.
pub fn seifert_twist(k: &KnotParams) -> Result<Rational> {
    if let Some(v) = cache().read().expect("cache lock").get(&k.t) {
        return Ok(*v);
    }
    let v = seifert_twist_uncached(k)?;
    cache().write().expect("cache lock").insert(k.t, v);
    Ok(v)
}

fn seifert_twist_uncached(k: &KnotParams) -> Result<Rational> {
    let (d, _h, v) = parity_census(k);
    if d % 2 == 1 && v == 0 {
        search_branch(k)
    } else {
        formula_branch(k)
    }
}

fn formula_branch(k: &KnotParams) -> Result<Rational> {
    let classes = k.t.map(parity_class);
    let odd_odd: Vec<usize> =
        (0..3).filter(|&i| classes[i] == ParityClass::OddOdd).collect();
    let odd_even: Vec<usize> =
        (0..3).filter(|&i| classes[i] == ParityClass::OddEven).collect();
    // Shift assignments k_i with Σk_i = 0 making every tangle evenizable:
    // each odd/odd tangle takes ±1 (flipping it to even numerator), balanced
    // inside an even-denominator tangle (which absorbs any shift) or against
    // the other odd/odd tangle.
    let mut options: Vec<[i128; 3]> = Vec::new();
    match odd_odd.len() {
        0 => options.push([0; 3]),
        1 => {
            let i = odd_odd[0];
            for &j in &odd_even {
                for s in [1i128, -1] {
                    let mut ks = [0i128; 3];
                    ks[i] = s;
                    ks[j] = -s;
                    options.push(ks);
                }
            }
        }
        2 => {
            let (i, j) = (odd_odd[0], odd_odd[1]);
            for s in [1i128, -1] {
                let mut ks = [0i128; 3];
                ks[i] = s;
                ks[j] = -s;
                options.push(ks);
            }
        }
        _ => unreachable!("three odd/odd tangles take the search branch"),
    }
    if options.is_empty() {
        return Err(Error::Calibration(format!(
            "no balanced shift assignment for {k}"
        )));
    }
    let mut result: Option<Rational> = None;
    for ks in options {
        let mut total = Rational::ZERO;
        for i in 0..3 {
            total += stair_twist(k.t[i] + Rational::from_int(ks[i]))?;
        }
        match result {
            None => result = Some(total),
            Some(r) if r == total => {}
            Some(r) => {
                return Err(Error::Calibration(format!(
                    "shift assignments disagree for {k}: {r} vs {total}"
                )))
            }
        }
    }
    Ok(result.unwrap())
}

/// Fully traversed paths from `<t>` to an integer vertex whose steps all
/// have the given flip parity, as `(final y, e₋ - e₊)` pairs.
fn uniform_parity_paths(t: Rational, parity: bool) -> Result<Vec<(Rational, i128)>> {
    let params = SearchParams { u_floor: Rational::ONE, max_edges: 12 };
    let mut out = Vec::new();
    for skel in enumerate_skeletons(t, &params)? {
        let Some(last) = skel.steps.last() else { continue };
        if !last.to.is_integer() {
            continue;
        }
        if !skel.steps.iter().all(|s| s.flips() == parity) {
            continue;
        }
        let path = Edgepath::VertexEnded { tangle: t, steps: skel.steps.clone() };
        let (down, up) = path.twist_halves();
        out.push((path.final_y(), (down - up).numer()));
    }
    Ok(out)
}

fn search_branch(k: &KnotParams) -> Result<Rational> {
    let mut result: Option<Rational> = None;
    for parity in [true, false] {
        let lists = [
            uniform_parity_paths(k.t[0], parity)?,
            uniform_parity_paths(k.t[1], parity)?,
            uniform_parity_paths(k.t[2], parity)?,
        ];
        for &(y0, d0) in &lists[0] {
            for &(y1, d1) in &lists[1] {
                for &(y2, d2) in &lists[2] {
                    if y0 + y1 + y2 != Rational::ZERO {
                        continue;
                    }
                    let tau = rat(2 * (d0 + d1 + d2), 1);
                    match result {
                        None => result = Some(tau),
                        Some(r) if r == tau => {}
                        Some(r) => {
                            return Err(Error::Calibration(format!(
                                "orientable height-1 systems disagree for {k}: {r} vs {tau}"
                            )))
                        }
                    }
                }
            }
        }
    }
    result.ok_or_else(|| {
        Error::Calibration(format!("no orientable height-1 system found for {k}"))
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SlopeResult {
    pub twist: Rational,
    pub seifert_twist: Rational,
    /// Boundary slope `δ = τ - τ′`.
    pub delta: Rational,
    pub e_minus: Rational,
    pub e_plus: Rational,
}

pub fn boundary_slope(sys: &CandidateSystem, k: &KnotParams) -> Result<SlopeResult> {
    let (e_minus, e_plus) = twist_halves(sys);
    let tau = rat(2, 1) * (e_minus - e_plus);
    let seifert = seifert_twist(k)?;
    Ok(SlopeResult { twist: tau, seifert_twist: seifert, delta: tau - seifert, e_minus, e_plus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_systems;

    fn knot(s: &str) -> KnotParams {
        s.parse().unwrap()
    }

    #[test]
    fn even_continued_fractions() {
        assert_eq!(even_cf(rat(-1, 2)), Some(vec![0, -2]));
        assert_eq!(even_cf(rat(2, 13)), Some(vec![0, 6, 2]));
        assert_eq!(even_cf(rat(4, 1)), Some(vec![4]));
        // Odd/odd slopes have none.
        assert_eq!(even_cf(rat(1, 3)), None);
        assert_eq!(even_cf(rat(3, 5)), None);
        assert_eq!(even_cf(rat(5, 1)), None);
        // Truncations are Farey-adjacent with strictly decreasing
        // denominators: a valid staircase.
        for t in [rat(8, 7), rat(-16, 19), rat(4, 13), rat(2, 11), rat(-6, 7)] {
            let vals = staircase(t).unwrap();
            assert_eq!(*vals.last().unwrap(), t);
            assert!(vals[0].is_integer());
            for w in vals.windows(2) {
                assert!(crate::diagram::is_farey_pair(w[0], w[1]));
                assert!(w[0].denom() < w[1].denom());
            }
        }
    }

    #[test]
    fn staircase_twists() {
        let cases = [
            ((-1, 2), -2),
            ((1, 2), 2),
            ((-3, 2), 2),
            ((4, 3), -4),
            ((-2, 3), -4),
            ((2, 3), 4),
            ((8, 7), -12),
            ((-6, 7), -12),
            ((2, 5), 0),
            ((2, 13), 0),
            ((2, 7), 4),
            ((4, 13), 8),
            ((2, 11), 4),
            ((1, 4), 2),
            ((-3, 4), -6),
            ((5, 4), -6),
            ((6, 5), -8),
            ((-4, 5), -8),
            ((10, 9), -16),
            ((-5, 4), 6),
            ((-6, 5), 8),
            ((-16, 19), -12),
        ];
        for ((p, q), want) in cases {
            assert_eq!(stair_twist(rat(p, q)).unwrap(), rat(want, 1), "stair({p}/{q})");
        }
        assert!(stair_twist(rat(1, 3)).is_err());
    }

    #[test]
    fn seifert_twists_of_reference_knots() {
        let cases = [
            ("K(-1/2,1/3,1/7)", -18),  // formula, two odd/odd shifts
            ("K(-1/2,1/3,2/13)", -2),  // formula, one odd/odd vs the half
            ("K(-1/2,2/5,1/7)", -10),
            ("K(-2/3,1/3,1/4)", -14),
            ("K(-1/2,2/5,1/9)", -14),
            ("K(1/4,1/3,1/5)", -10),
            ("K(1/4,1/3,-1/5)", 6),
            ("K(-1/3,1/3,1/7)", 2),    // search branch, all odd/odd
            ("K(1/3,1/5,1/7)", 6),
            // Search branch, odd/odd + two even numerators. Only all-flip
            // systems close up (nonflip ones trip the shortcut rule), e.g.
            // [-2/5 > -1/3 > 0] with [-1/3 > 0] and [2/3 > 1 > y=0].
            ("K(-1/3,-2/5,2/3)", -6),
        ];
        for (name, want) in cases {
            assert_eq!(
                seifert_twist(&knot(name)).unwrap(),
                rat(want, 1),
                "seifert twist of {name}"
            );
        }
    }

    #[test]
    fn pretzel_slopes_come_out_as_twice_the_odd_sums() {
        // Height-1 three-edge system of K(1/4,1/3,1/5): δ = 2(q2+q3) = 16.
        let k = knot("K(1/4,1/3,1/5)");
        let systems = solve_systems(&k, &SearchParams::default()).unwrap();
        let sys = systems
            .iter()
            .find(|s| {
                s.u_bar == Rational::ONE
                    && s.family.is_none()
                    && s.paths.iter().all(|p| p.length() == Rational::ONE)
                    && s.ys == [Rational::ZERO; 3]
            })
            .unwrap();
        let r = boundary_slope(sys, &k).unwrap();
        assert_eq!(r.twist, rat(6, 1));
        assert_eq!(r.delta, rat(16, 1));
        // Sign variant: δ = 2(3 + (-5)) = -4.
        let k2 = knot("K(1/4,1/3,-1/5)");
        let systems2 = solve_systems(&k2, &SearchParams::default()).unwrap();
        let sys2 = systems2
            .iter()
            .find(|s| {
                s.u_bar == Rational::ONE
                    && s.family.is_none()
                    && s.paths.iter().all(|p| p.length() == Rational::ONE)
                    && s.ys == [Rational::ZERO; 3]
            })
            .unwrap();
        assert_eq!(boundary_slope(sys2, &k2).unwrap().delta, rat(-4, 1));
        // All-odd pretzel: the vertex system carries the Seifert surface
        // itself, so δ = 0.
        let k3 = knot("K(1/3,1/5,1/7)");
        let systems3 = solve_systems(&k3, &SearchParams::default()).unwrap();
        let sys3 = systems3
            .iter()
            .find(|s| {
                s.u_bar == Rational::ONE
                    && s.family.is_none()
                    && s.ys == [Rational::ZERO; 3]
            })
            .unwrap();
        assert_eq!(boundary_slope(sys3, &k3).unwrap().delta, Rational::ZERO);
    }

    #[test]
    fn the_non_integral_slope() {
        // K(-1/2,1/3,1/7) at ū = 5/2: τ = 1/2, δ = 37/2.
        let k = knot("K(-1/2,1/3,1/7)");
        let systems = solve_systems(&k, &SearchParams::default()).unwrap();
        let sys = systems
            .iter()
            .find(|s| s.u_bar == rat(5, 2) && s.family.is_none())
            .unwrap();
        let r = boundary_slope(sys, &k).unwrap();
        assert_eq!(r.twist, rat(1, 2));
        assert_eq!(r.seifert_twist, rat(-18, 1));
        assert_eq!(r.delta, rat(37, 2));
    }
}
