//! Montesinos knot parameters `K(t1, t2, t3)` and their symmetries.
//!
//! Equivalences acting on parameter triples: permuting the tangles,
//! negating all slopes at once (the mirror image), and integer shifts
//! `t_i += k_i` with `k_1 + k_2 + k_3 = 0`. The complete invariant of the
//! unmirrored orbit is the multiset of fractional parts together with the
//! total slope sum, which is what [`canonicalize`] reduces to.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct KnotParams {
    pub t: [Rational; 3],
}

impl KnotParams {
    /// Errors on integral tangle slopes (those never occur in length-3
    /// Montesinos knots; an integral entry means a shorter presentation).
    pub fn new(t: [Rational; 3]) -> Result<KnotParams> {
        for ti in t {
            if ti.is_integer() {
                return Err(Error::Parse(format!("integral tangle slope {ti}")));
            }
        }
        Ok(KnotParams { t })
    }

    /// `Err(NotAKnot)` when the parameters describe a multi-component link.
    pub fn validate_knot(&self) -> Result<()> {
        let components = component_count(self);
        if components == 1 {
            Ok(())
        } else {
            Err(Error::NotAKnot { components })
        }
    }

    pub fn mirror(&self) -> KnotParams {
        KnotParams { t: self.t.map(|ti| -ti) }
    }

    pub fn slope_sum(&self) -> Rational {
        self.t[0] + self.t[1] + self.t[2]
    }
}

impl std::fmt::Display for KnotParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "K({},{},{})", self.t[0], self.t[1], self.t[2])
    }
}

impl std::str::FromStr for KnotParams {
    type Err = Error;

    /// Accepts `K(-1/2,1/3,1/7)` or a bare `-1/2 1/3 1/7` (commas or
    /// whitespace).
    fn from_str(s: &str) -> Result<KnotParams> {
        let s = s.trim();
        let inner = match s.strip_prefix("K(").or_else(|| s.strip_prefix("k(")) {
            Some(rest) => rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {s:?}")))?,
            None => s,
        };
        let parts: Vec<&str> = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected three tangle slopes, found {} in {s:?}",
                parts.len()
            )));
        }
        KnotParams::new([parts[0].parse()?, parts[1].parse()?, parts[2].parse()?])
    }
}

/// Parity class of a reduced slope `p/q` (numerator, denominator); `p` and
/// `q` are never both even.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ParityClass {
    /// `p` odd, `q` odd.
    OddOdd,
    /// `p` even, `q` odd.
    EvenOdd,
    /// `p` odd, `q` even.
    OddEven,
}

pub fn parity_class(t: Rational) -> ParityClass {
    match (t.numer().rem_euclid(2), t.denom().rem_euclid(2)) {
        (1, 1) => ParityClass::OddOdd,
        (0, 1) => ParityClass::EvenOdd,
        (1, 0) => ParityClass::OddEven,
        _ => unreachable!("reduced fractions have no common factor of 2"),
    }
}

/// Counts of (OddOdd, EvenOdd, OddEven) tangles.
pub fn parity_census(k: &KnotParams) -> (usize, usize, usize) {
    let mut c = (0, 0, 0);
    for ti in k.t {
        match parity_class(ti) {
            ParityClass::OddOdd => c.0 += 1,
            ParityClass::EvenOdd => c.1 += 1,
            ParityClass::OddEven => c.2 += 1,
        }
    }
    c
}

/// Number of link components, by composing the strand permutations.
///
/// Each tangle has four corners NW, NE, SW, SE. A `p/q` tangle joins them
/// diagonally when `p` and `q` are both odd, horizontally when `p` is even,
/// and vertically when `q` is even. The plat closure joins NE/SE of each
/// tangle to NW/SW of the next, cyclically. Components are the orbits.
pub fn component_count(k: &KnotParams) -> usize {
    // Corner encoding: tangle i owns 4i + (NW = 0, NE = 1, SW = 2, SE = 3).
    let tangle_mate = |c: usize| -> usize {
        let (i, local) = (c / 4, c % 4);
        let mate = match parity_class(k.t[i]) {
            ParityClass::OddOdd => [3, 2, 1, 0][local],
            ParityClass::EvenOdd => [1, 0, 3, 2][local],
            ParityClass::OddEven => [2, 3, 0, 1][local],
        };
        4 * i + mate
    };
    let closure_mate = |c: usize| -> usize {
        let (i, local) = (c / 4, c % 4);
        match local {
            1 => 4 * ((i + 1) % 3),     // NE_i - NW_{i+1}
            3 => 4 * ((i + 1) % 3) + 2, // SE_i - SW_{i+1}
            0 => 4 * ((i + 2) % 3) + 1, // NW_i - NE_{i-1}
            _ => 4 * ((i + 2) % 3) + 3, // SW_i - SE_{i-1}
        }
    };
    let mut seen = [false; 12];
    let mut cycles = 0;
    for s in 0..12 {
        if seen[s] {
            continue;
        }
        cycles += 1;
        let mut c = s;
        loop {
            seen[c] = true;
            let m = tangle_mate(c);
            seen[m] = true;
            c = closure_mate(m);
            if c == s {
                break;
            }
        }
    }
    cycles
}

/// Component count from the parity-class multiset alone. Kept as an
/// independent cross-check against [`component_count`]; the two must agree
/// on every triple.
pub fn component_count_by_parity(k: &KnotParams) -> usize {
    match parity_census(k) {
        (3, 0, 0) => 1,
        (2, 1, 0) => 2,
        (2, 0, 1) => 1,
        (1, 2, 0) => 1,
        (1, 1, 1) => 1,
        (1, 0, 2) => 2,
        (0, 3, 0) => 2,
        (0, 2, 1) => 1,
        (0, 1, 2) => 2,
        (0, 0, 3) => 3,
        _ => unreachable!("counts sum to 3"),
    }
}

/// The mirror-free part of the orbit: permutations × integer shifts summing
/// to zero, with each shift entry in `[-window, window]`. These moves leave
/// the knot itself fixed (not just its mirror class).
pub fn shift_permutation_orbit(k: &KnotParams, window: i128) -> BTreeSet<KnotParams> {
    let mut out = BTreeSet::new();
    let perms: [[usize; 3]; 6] =
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for p in perms {
        let t = [k.t[p[0]], k.t[p[1]], k.t[p[2]]];
        for k1 in -window..=window {
            for k2 in -window..=window {
                let k3 = -k1 - k2;
                if k3.abs() > window {
                    continue;
                }
                out.insert(KnotParams {
                    t: [
                        t[0] + Rational::from_int(k1),
                        t[1] + Rational::from_int(k2),
                        t[2] + Rational::from_int(k3),
                    ],
                });
            }
        }
    }
    out
}

/// The equivalence orbit of `k`: permutations × optional global negation ×
/// integer shifts summing to zero, with each shift entry in
/// `[-window, window]`.
pub fn equivalence_orbit(k: &KnotParams, window: i128) -> BTreeSet<KnotParams> {
    let mut out = shift_permutation_orbit(k, window);
    out.extend(shift_permutation_orbit(&k.mirror(), window));
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Canonical {
    pub rep: KnotParams,
    /// True when the representative is the mirror of the input's class.
    pub mirrored: bool,
}

/// Reduced tuple: fractional parts sorted ascending, plus the integer excess.
fn class_tuple(k: &KnotParams) -> ([Rational; 3], Rational) {
    let mut f = k.t.map(|ti| ti.frac());
    f.sort();
    let e = k.slope_sum() - (f[0] + f[1] + f[2]);
    (f, e)
}

/// Canonical representative of the equivalence class of `k`:
/// `K(f1, f2, f3 + e)` with `0 < f1 <= f2 <= f3 < 1`, choosing whichever of
/// `k` and its mirror gives the lexicographically smaller `(f, e)`.
/// Idempotent; two parameter triples give equal representatives exactly
/// when they are related by the moves (with mirroring tracked separately).
pub fn canonicalize(k: &KnotParams) -> Canonical {
    let plus = class_tuple(k);
    let minus = class_tuple(&k.mirror());
    let (tuple, mirrored) = if minus < plus { (minus, true) } else { (plus, false) };
    let (f, e) = tuple;
    Canonical { rep: KnotParams { t: [f[0], f[1], f[2] + e] }, mirrored }
}
