//! The toroidal classification layer.
//!
//! Detects candidate systems whose capped-off surface is a torus (the
//! Euler-number criterion `ē = (b-1)/b`), assembles them into per-slope
//! findings, matches findings against the embedded slope table, verifies
//! the table by re-deriving every row, and runs the denominator-bounded
//! census behind the corollary queries.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::edgepath::SearchParams;
use crate::error::{Error, Result};
use crate::invariants::{ebar, ebar_from_profile, surface_report, torus_test, SurfaceReport};
use crate::knot::{canonicalize, component_count, shift_permutation_orbit, KnotParams};
use crate::rational::{rat, Rational};
use crate::slope::{seifert_twist, twist};
use crate::solver::{
    solve_systems, solve_systems_screened, CandidateSystem, SolutionFamily, SolutionProfile,
};

/// Enumeration bounds for the toroidal search. Genus-one systems satisfy
/// `Σ|γ_i| = (4 - ū) - ē ≤ 3` away from horizontal endpoints, so a path
/// budget of 4 edges is already conservative.
pub fn toroidal_search_params() -> SearchParams {
    SearchParams { u_floor: Rational::ONE, max_edges: 4 }
}

// ---------------------------------------------------------------------------
// Exclusions

/// Knots the classification refuses to speak about (the configured
/// non-hyperbolic list), matched up to all equivalence moves and mirroring.
#[derive(Clone, Debug)]
pub struct Exclusions {
    reps: BTreeSet<KnotParams>,
}

impl Exclusions {
    pub fn empty() -> Exclusions {
        Exclusions { reps: BTreeSet::new() }
    }

    /// One knot per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Exclusions> {
        let mut reps = BTreeSet::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let k: KnotParams = line.parse()?;
            reps.insert(canonicalize(&k).rep);
        }
        Ok(Exclusions { reps })
    }

    /// The built-in list shipped with the crate.
    pub fn builtin() -> &'static Exclusions {
        static BUILTIN: OnceLock<Exclusions> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            Exclusions::parse(include_str!("../data/exclusions.txt"))
                .expect("embedded exclusion list parses")
        })
    }

    pub fn contains(&self, k: &KnotParams) -> bool {
        self.reps.contains(&canonicalize(k).rep)
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

// ---------------------------------------------------------------------------
// The embedded table

/// A linear fraction `(a + bn) / (c + dn)` over the family parameter `n`.
/// Plain rationals and integers are the `b = d = 0` case.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LinFrac {
    num: (i128, i128),
    den: (i128, i128),
}

impl LinFrac {
    /// Value at `n`; `None` when the denominator vanishes there.
    pub fn at(&self, n: i128) -> Option<Rational> {
        let den = self.den.0 + self.den.1 * n;
        if den == 0 {
            return None;
        }
        Some(rat(self.num.0 + self.num.1 * n, den))
    }

    fn is_constant(&self) -> bool {
        self.num.1 == 0 && self.den.1 == 0
    }

    fn constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(rat(self.num.0, self.den.0))
        } else {
            None
        }
    }

    /// Solve `self.at(n) == f` for integer `n`, trying both sign
    /// normalizations of `f = p/q`.
    fn invert(&self, f: Rational) -> Option<i128> {
        let (p, q) = (f.numer(), f.denom());
        for (sp, sq) in [(p, q), (-p, -q)] {
            let n = if self.num.1 != 0 {
                let d = sp - self.num.0;
                if d % self.num.1 != 0 {
                    continue;
                }
                d / self.num.1
            } else if self.den.1 != 0 {
                let d = sq - self.den.0;
                if d % self.den.1 != 0 {
                    continue;
                }
                d / self.den.1
            } else {
                continue;
            };
            if self.num.0 + self.num.1 * n == sp && self.den.0 + self.den.1 * n == sq {
                return Some(n);
            }
        }
        None
    }
}

/// Parse `a+bn` into `(a, b)`.
fn parse_linear(s: &str) -> Result<(i128, i128)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty linear term".into()));
    }
    let (mut a, mut b) = (0i128, 0i128);
    let mut term = String::new();
    let flush = |term: &mut String, a: &mut i128, b: &mut i128| -> Result<()> {
        if term.is_empty() {
            return Ok(());
        }
        let (coeff_str, is_n) = match term.strip_suffix('n') {
            Some(c) => (c, true),
            None => (term.as_str(), false),
        };
        let coeff: i128 = match coeff_str {
            "" | "+" => 1,
            "-" => -1,
            c => c
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?,
        };
        if is_n {
            *b += coeff;
        } else {
            *a += coeff;
        }
        term.clear();
        Ok(())
    };
    for (i, c) in s.chars().enumerate() {
        if (c == '+' || c == '-') && i > 0 {
            flush(&mut term, &mut a, &mut b)?;
        }
        term.push(c);
    }
    flush(&mut term, &mut a, &mut b)?;
    Ok((a, b))
}

/// Parse a linear fraction: `n/(6n+1)`, `-12`, `37/2`, `5-2n`, ...
fn parse_linfrac(s: &str) -> Result<LinFrac> {
    let s = s.trim();
    // Split at the top-level '/', if any.
    let mut depth = 0usize;
    let mut split = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '/' if depth == 0 => {
                split = Some(i);
                break;
            }
            _ => {}
        }
    }
    let strip = |part: &str| -> String {
        let p = part.trim();
        match p.strip_prefix('(').and_then(|q| q.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => p.to_string(),
        }
    };
    let (num, den) = match split {
        Some(i) => (parse_linear(&strip(&s[..i]))?, parse_linear(&strip(&s[i + 1..]))?),
        None => (parse_linear(&strip(s))?, (1, 0)),
    };
    if den == (0, 0) {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(LinFrac { num, den })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RowKind {
    /// All tangles `1/q`, `q` odd, `|q| > 1; δ = 0.
    OddPretzel,
    /// Tangle 1 is `1/q1` with `q1` even, the others odd; δ = 2(q2+q3).
    EvenPretzel,
    /// One-parameter family in `n`.
    Family,
    /// A single explicit knot.
    Single,
}

#[derive(Clone, Debug)]
pub struct TableRow {
    pub case: u32,
    pub kind: RowKind,
    tangles: Option<[LinFrac; 3]>,
    /// Index of the `n`-dependent tangle for family rows.
    slot: Option<usize>,
    excluded_n: Vec<i128>,
    delta_odd: Option<LinFrac>,
    delta_even: Option<LinFrac>,
    pub u_bar: Rational,
}

impl TableRow {
    /// The slope for parameter `n`, or `None` when `n` is inadmissible for
    /// this row (wrong parity, excluded value, degenerate tangle).
    pub fn delta_at(&self, n: i128) -> Option<Rational> {
        if self.excluded_n.contains(&n) {
            return None;
        }
        let lf = if n.rem_euclid(2) == 1 { self.delta_odd } else { self.delta_even }?;
        lf.at(n)
    }

    pub fn tangles_at(&self, n: i128) -> Option<[Rational; 3]> {
        let lfs = self.tangles?;
        let t = [lfs[0].at(n)?, lfs[1].at(n)?, lfs[2].at(n)?];
        if t.iter().any(|ti| ti.is_integer()) {
            return None;
        }
        Some(t)
    }
}

fn parse_table(text: &str) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        if cols.len() != 7 {
            return Err(Error::Parse(format!(
                "table row needs 7 columns, found {}: {line:?}",
                cols.len()
            )));
        }
        let case: u32 = cols[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad case id {:?}", cols[0])))?;
        let kind = match cols[1] {
            "odd-pretzel" => RowKind::OddPretzel,
            "even-pretzel" => RowKind::EvenPretzel,
            "family" => RowKind::Family,
            "single" => RowKind::Single,
            other => return Err(Error::Parse(format!("unknown row kind {other:?}"))),
        };
        let schematic = matches!(kind, RowKind::OddPretzel | RowKind::EvenPretzel);
        let tangles = if schematic {
            None
        } else {
            let parts: Vec<&str> = cols[2].split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("need 3 tangles in {:?}", cols[2])));
            }
            Some([
                parse_linfrac(parts[0])?,
                parse_linfrac(parts[1])?,
                parse_linfrac(parts[2])?,
            ])
        };
        let slot = match (kind, tangles) {
            (RowKind::Family, Some(lfs)) => {
                let slots: Vec<usize> =
                    (0..3).filter(|&i| !lfs[i].is_constant()).collect();
                if slots.len() != 1 {
                    return Err(Error::Parse(format!(
                        "family row {case} needs exactly one n-dependent tangle"
                    )));
                }
                Some(slots[0])
            }
            _ => None,
        };
        let excluded_n = if schematic || cols[3] == "-" {
            Vec::new()
        } else {
            let rest = cols[3].strip_prefix("n !=").or_else(|| cols[3].strip_prefix("n!=")).ok_or_else(
                || Error::Parse(format!("bad constraint {:?}", cols[3])),
            )?;
            rest.split_whitespace()
                .map(|v| {
                    v.parse()
                        .map_err(|_| Error::Parse(format!("bad excluded value {v:?}")))
                })
                .collect::<Result<Vec<i128>>>()?
        };
        let parse_delta = |s: &str| -> Result<Option<LinFrac>> {
            if s == "-" || schematic {
                Ok(None)
            } else {
                parse_linfrac(s).map(Some)
            }
        };
        let delta_odd = parse_delta(cols[4])?;
        let delta_even = parse_delta(cols[5])?;
        if kind == RowKind::Single && (delta_odd != delta_even || delta_odd.is_none()) {
            return Err(Error::Parse(format!(
                "single row {case} needs equal delta columns"
            )));
        }
        rows.push(TableRow {
            case,
            kind,
            tangles,
            slot,
            excluded_n,
            delta_odd,
            delta_even,
            u_bar: cols[6]
                .parse()
                .map_err(|_| Error::Parse(format!("bad ubar {:?}", cols[6])))?,
        });
    }
    Ok(rows)
}

/// The embedded table of toroidal slopes, one row per knot family.
pub fn classification_table() -> &'static [TableRow] {
    static TABLE: OnceLock<Vec<TableRow>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let rows =
            parse_table(include_str!("../data/toroidal_table.txt")).expect("embedded table parses");
        assert_eq!(rows.len(), 13, "embedded table has thirteen rows");
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.case as usize, i + 1, "table rows are numbered in order");
        }
        rows
    })
}

/// Does the literal (ordered) triple `member` instantiate `row`? Returns the
/// row's slope and ū on match.
fn row_match(member: &KnotParams, row: &TableRow) -> Option<(Rational, Rational)> {
    let unit = |t: Rational| t.numer().abs() == 1;
    match row.kind {
        RowKind::OddPretzel => {
            if member.t.iter().all(|&t| unit(t) && t.denom() % 2 == 1) {
                Some((Rational::ZERO, row.u_bar))
            } else {
                None
            }
        }
        RowKind::EvenPretzel => {
            let [t1, t2, t3] = member.t;
            if unit(t1)
                && t1.denom() % 2 == 0
                && unit(t2)
                && t2.denom() % 2 == 1
                && unit(t3)
                && t3.denom() % 2 == 1
            {
                let q2 = t2.recip().numer();
                let q3 = t3.recip().numer();
                Some((rat(2 * (q2 + q3), 1), row.u_bar))
            } else {
                None
            }
        }
        RowKind::Family => {
            let lfs = row.tangles?;
            let slot = row.slot?;
            for i in 0..3 {
                if i == slot {
                    continue;
                }
                if member.t[i] != lfs[i].constant()? {
                    return None;
                }
            }
            let n = lfs[slot].invert(member.t[slot])?;
            Some((row.delta_at(n)?, row.u_bar))
        }
        RowKind::Single => {
            let lfs = row.tangles?;
            for i in 0..3 {
                if member.t[i] != lfs[i].constant()? {
                    return None;
                }
            }
            Some((row.delta_odd?.constant()?, row.u_bar))
        }
    }
}

/// Match a finding `(δ, realized ū values)` of `k` against the table: the
/// smallest case number whose pattern some orbit member (or mirror-orbit
/// member, with negated slope) instantiates with that slope and a realized
/// ū. `None` flags a novel finding.
pub fn annotate_case(k: &KnotParams, delta: Rational, all_u_bars: &[Rational]) -> Option<u32> {
    let plain = shift_permutation_orbit(k, 8);
    let mirrored = shift_permutation_orbit(&k.mirror(), 8);
    for row in classification_table() {
        for (negate, orbit) in [(false, &plain), (true, &mirrored)] {
            for member in orbit {
                if let Some((d, u)) = row_match(member, row) {
                    let d = if negate { -d } else { d };
                    if d == delta && all_u_bars.contains(&u) {
                        return Some(row.case);
                    }
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Incompressibility filter

/// Verdict of the r-value cascade. The cascade is a set of sufficient
/// conditions for incompressibility; it never certifies compressibility
/// (the variant exists for API completeness).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Incompressible,
    Compressible,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Incompressible => "incompressible",
            Verdict::Compressible => "compressible",
            Verdict::Unknown => "unknown",
        })
    }
}

/// The r-value cascade:
///
/// 1. a constant path certifies incompressibility outright;
/// 2. an r-cycle other than `{1,1,r}` and `{1,2,r}` certifies it;
/// 3. `{1,1,r}`: two unit paths whose final segments have equal slopes
///    certify it; if instead some unit path's slope sign opposes both
///    other paths, incompressible unless `r ∈ {2,4}`;
/// 4. `{1,2,r}`: all three slope signs equal certify it; a unit path
///    opposing both others is again decisive unless `r ∈ {2,4}`;
/// 5. anything else is unknown.
pub fn incompressibility_filter(sys: &CandidateSystem) -> Result<Verdict> {
    if sys.paths.iter().any(|p| p.is_constant()) {
        return Ok(Verdict::Incompressible);
    }
    let mut rs = [0i128; 3];
    let mut slopes = [Rational::ZERO; 3];
    for i in 0..3 {
        rs[i] = sys.paths[i].r_value()?;
        slopes[i] = sys.paths[i].final_segment_slope()?;
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by_key(|&i| rs[i]);
    let sorted = idx.map(|i| rs[i]);
    if !(sorted[0] == 1 && sorted[1] <= 2) {
        return Ok(Verdict::Incompressible);
    }
    let r3 = sorted[2];
    let units: Vec<usize> = (0..3).filter(|&i| rs[i] == 1).collect();
    if units.len() >= 2 {
        for (a, &i) in units.iter().enumerate() {
            for &j in &units[a + 1..] {
                if slopes[i] == slopes[j] {
                    return Ok(Verdict::Incompressible);
                }
            }
        }
    } else {
        let signs = slopes.map(|s| s.signum());
        if signs[0] == signs[1] && signs[1] == signs[2] {
            return Ok(Verdict::Incompressible);
        }
    }
    let opposing_unit = units.iter().any(|&i| {
        (0..3)
            .filter(|&j| j != i)
            .all(|j| slopes[i].signum() != slopes[j].signum())
    });
    if opposing_unit && !(r3 == 2 || r3 == 4) {
        return Ok(Verdict::Incompressible);
    }
    Ok(Verdict::Unknown)
}

// ---------------------------------------------------------------------------
// Torus findings

#[derive(Clone, Debug)]
pub struct ToroidalFinding {
    /// Boundary slope relative to the Seifert surface.
    pub delta: Rational,
    /// Smallest endpoint height realizing the slope.
    pub u_bar: Rational,
    /// Every height realizing it, ascending.
    pub all_u_bars: Vec<Rational>,
    /// The carrying system at the smallest height.
    pub system: CandidateSystem,
    pub report: SurfaceReport,
    pub verdict: Verdict,
    /// Matching table row, `None` for a novel finding.
    pub table_case: Option<u32>,
}

/// All torus findings of `k`, merged by slope.
///
/// Interval solution families are handled exactly: the twist is constant on
/// a family (checked), so the torus criterion `ē(u) = (b-1)/b` is an affine
/// equation in `u` solved over the interval; a family toroidal throughout is
/// reported at its left endpoint. Vertical (`y`-parameterized) families are
/// never toroidal — their three paths have total length strictly above 3,
/// forcing `ē < 0` for every member — and that is asserted, not assumed.
pub fn find_toroidal(
    k: &KnotParams,
    params: &SearchParams,
    excl: &Exclusions,
) -> Result<Vec<ToroidalFinding>> {
    k.validate_knot()?;
    if excl.contains(k) {
        return Err(Error::Excluded(k.to_string()));
    }
    // Pre-build screen: the target (b-1)/b lies in [0, 1), so cells whose
    // total Euler number falls outside that window can never pass the torus
    // test. Interval families pass outright (ē varies over the interval).
    let screen = |p: &SolutionProfile| {
        if p.interval.is_some() {
            return true;
        }
        let e = ebar_from_profile(p);
        Rational::ZERO <= e && e < Rational::ONE
    };
    let mut hits: Vec<(Rational, CandidateSystem)> = Vec::new();
    for sys in solve_systems_screened(k, params, &screen)? {
        match sys.family {
            None => {
                if torus_test(ebar(&sys), twist(&sys).denom()) {
                    hits.push((sys.u_bar, sys));
                }
            }
            Some(SolutionFamily::YFamily { .. }) => {
                if torus_test(ebar(&sys), twist(&sys).denom()) {
                    return Err(Error::Invariant(format!(
                        "vertical solution family passes the torus test: {}",
                        sys.render()
                    )));
                }
            }
            Some(SolutionFamily::UInterval { lo, hi }) => {
                let at_lo = sys.at_u(lo)?;
                let tau = twist(&at_lo);
                if tau != twist(&sys) {
                    return Err(Error::Invariant(format!(
                        "twist varies across the u-interval family {}",
                        sys.render()
                    )));
                }
                let target = rat(tau.denom() - 1, tau.denom());
                let (e_lo, e_mid) = (ebar(&at_lo), ebar(&sys));
                // ē is affine in u on the cell.
                let slope = (e_mid - e_lo) / (sys.u_bar - lo);
                if slope == Rational::ZERO {
                    if e_lo == target {
                        hits.push((lo, at_lo));
                    }
                } else {
                    let u_star = lo + (target - e_lo) / slope;
                    if lo <= u_star && u_star < hi {
                        let at_star = sys.at_u(u_star)?;
                        if ebar(&at_star) != target || twist(&at_star) != tau {
                            return Err(Error::Invariant(format!(
                                "family member at u = {u_star} fails re-evaluation: {}",
                                sys.render()
                            )));
                        }
                        hits.push((u_star, at_star));
                    }
                }
            }
        }
    }
    if hits.is_empty() {
        return Ok(Vec::new());
    }
    let tau_seifert = seifert_twist(k)?;
    let mut by_delta: BTreeMap<Rational, Vec<(Rational, CandidateSystem)>> = BTreeMap::new();
    for (u, sys) in hits {
        let delta = twist(&sys) - tau_seifert;
        by_delta.entry(delta).or_default().push((u, sys));
    }
    let mut out = Vec::new();
    for (delta, mut group) in by_delta {
        group.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.render().cmp(&b.1.render())));
        let mut all_u_bars: Vec<Rational> = group.iter().map(|(u, _)| *u).collect();
        all_u_bars.dedup();
        let mut verdict = Verdict::Unknown;
        for (_, sys) in &group {
            if incompressibility_filter(sys)? == Verdict::Incompressible {
                verdict = Verdict::Incompressible;
                break;
            }
        }
        let (u_bar, system) = group.swap_remove(0);
        let report = surface_report(&system, delta)?;
        let table_case = annotate_case(k, delta, &all_u_bars);
        out.push(ToroidalFinding {
            delta,
            u_bar,
            all_u_bars,
            system,
            report,
            verdict,
            table_case,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Per-system slope listing (the raw algorithm output)

#[derive(Clone, Debug)]
pub struct SystemRow {
    pub system: CandidateSystem,
    pub lengths: [Rational; 3],
    pub ebar: Rational,
    pub tau: Rational,
    pub delta: Rational,
    pub report: SurfaceReport,
}

/// Every candidate system of `k` with its slope and surface invariants,
/// in the solver's canonical order.
pub fn slope_table(k: &KnotParams, params: &SearchParams) -> Result<Vec<SystemRow>> {
    k.validate_knot()?;
    let tau_seifert = seifert_twist(k)?;
    let mut out = Vec::new();
    for system in solve_systems(k, params)? {
        let tau = twist(&system);
        let delta = tau - tau_seifert;
        let report = surface_report(&system, delta)?;
        out.push(SystemRow {
            lengths: [
                system.paths[0].length(),
                system.paths[1].length(),
                system.paths[2].length(),
            ],
            ebar: ebar(&system),
            tau,
            delta,
            report,
            system,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Table verification

#[derive(Clone, Debug)]
pub struct InstanceCheck {
    pub case: u32,
    pub knot: KnotParams,
    /// Family parameter, for family rows.
    pub n: Option<i128>,
    pub expected_delta: Rational,
    pub expected_u_bar: Rational,
    /// Excluded knots are reported but not counted as mismatches.
    pub skipped: bool,
    /// The expected `(δ, ū)` was realized by a finding.
    pub found: bool,
    /// Findings matching no table row, as `(δ, ū)`.
    pub novel: Vec<(Rational, Rational)>,
}

impl InstanceCheck {
    pub fn passed(&self) -> bool {
        self.skipped || (self.found && self.novel.is_empty())
    }
}

fn check_instance(
    row: &TableRow,
    knot: KnotParams,
    n: Option<i128>,
    expected_delta: Rational,
    excl: &Exclusions,
) -> Result<InstanceCheck> {
    let mut check = InstanceCheck {
        case: row.case,
        knot,
        n,
        expected_delta,
        expected_u_bar: row.u_bar,
        skipped: false,
        found: false,
        novel: Vec::new(),
    };
    if excl.contains(&knot) {
        check.skipped = true;
        return Ok(check);
    }
    let findings = find_toroidal(&knot, &toroidal_search_params(), excl)?;
    check.found = findings
        .iter()
        .any(|f| f.delta == expected_delta && f.all_u_bars.contains(&row.u_bar));
    check.novel = findings
        .iter()
        .filter(|f| f.table_case.is_none())
        .map(|f| (f.delta, f.u_bar))
        .collect();
    Ok(check)
}

/// Signed values `±q` for odd magnitudes up to `max_n` (at least `{3}`).
fn signed_odd_grid(max_n: i128) -> Vec<i128> {
    let mut mags: Vec<i128> = [3, 5, 7].into_iter().filter(|&q| q <= max_n).collect();
    if mags.is_empty() {
        mags.push(3);
    }
    let mut out: Vec<i128> = mags.iter().map(|&q| -q).rev().chain(mags.iter().copied()).collect();
    out.sort();
    out
}

fn signed_even_grid(max_n: i128) -> Vec<i128> {
    let mut mags: Vec<i128> = [2, 4, 6, 8].into_iter().filter(|&q| q <= max_n).collect();
    if mags.is_empty() {
        mags.push(2);
    }
    let mut out: Vec<i128> = mags.iter().map(|&q| -q).rev().chain(mags.iter().copied()).collect();
    out.sort();
    out
}

/// Re-derive every table row: instantiate its knots (families over
/// `n ∈ [-max_n, max_n]`, pretzel rows over a denominator grid), run the
/// toroidal search, and record whether the row's `(δ, ū)` is realized with
/// no novel findings.
pub fn verify_table(max_n: i128, excl: &Exclusions) -> Result<Vec<InstanceCheck>> {
    let mut jobs: Vec<(&TableRow, KnotParams, Option<i128>, Rational)> = Vec::new();
    for row in classification_table() {
        match row.kind {
            RowKind::OddPretzel => {
                let qs = signed_odd_grid(max_n);
                for (i, &q1) in qs.iter().enumerate() {
                    for (j, &q2) in qs.iter().enumerate().skip(i) {
                        for &q3 in &qs[j..] {
                            let k = KnotParams::new([rat(1, q1), rat(1, q2), rat(1, q3)])?;
                            jobs.push((row, k, None, Rational::ZERO));
                        }
                    }
                }
            }
            RowKind::EvenPretzel => {
                let evens = signed_even_grid(max_n);
                let odds = signed_odd_grid(max_n);
                for &q1 in &evens {
                    for (j, &q2) in odds.iter().enumerate() {
                        for &q3 in &odds[j..] {
                            let k = KnotParams::new([rat(1, q1), rat(1, q2), rat(1, q3)])?;
                            jobs.push((row, k, None, rat(2 * (q2 + q3), 1)));
                        }
                    }
                }
            }
            RowKind::Family => {
                for n in -max_n..=max_n {
                    let Some(delta) = row.delta_at(n) else { continue };
                    let Some(t) = row.tangles_at(n) else { continue };
                    jobs.push((row, KnotParams::new(t)?, Some(n), delta));
                }
            }
            RowKind::Single => {
                let t = row.tangles_at(0).ok_or_else(|| {
                    Error::Invariant(format!("single row {} has no tangles", row.case))
                })?;
                let delta = row
                    .delta_at(0)
                    .or_else(|| row.delta_at(1))
                    .ok_or_else(|| Error::Invariant(format!("single row {} has no delta", row.case)))?;
                jobs.push((row, KnotParams::new(t)?, None, delta));
            }
        }
    }
    let mut checks: Vec<(usize, InstanceCheck)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (row, k, n, d))| check_instance(row, *k, *n, *d, excl).map(|c| (i, c)))
        .collect::<Result<_>>()?;
    checks.sort_by_key(|(i, _)| *i);
    Ok(checks.into_iter().map(|(_, c)| c).collect())
}

// ---------------------------------------------------------------------------
// Census

#[derive(Clone, Debug)]
pub struct CensusEntry {
    /// Canonical class representative.
    pub knot: KnotParams,
    /// Slope-merged findings, ascending by slope.
    pub findings: Vec<ToroidalFinding>,
}

#[derive(Clone, Debug)]
pub struct Census {
    pub max_den: i128,
    /// Knots searched (canonical, single-component, not excluded).
    pub scanned: usize,
    /// Canonical knots skipped by the exclusion list.
    pub excluded: usize,
    /// Knots with at least one finding.
    pub entries: Vec<CensusEntry>,
}

/// Canonical single-component representatives with tangle denominators
/// `≤ max_den`, paired with the count of excluded knots.
///
/// The slope-sum window `|Σt_i| ≤ 3` is exact for the toroidal search:
/// a genus-one system bounds `Σ|γ_i| ≤ 3`, and each |t_i - y_i| is at most
/// the length of the path, so no knot outside the window carries findings.
pub fn enumerate_census_knots(max_den: i128, excl: &Exclusions) -> (Vec<KnotParams>, usize) {
    let mut fracs: Vec<Rational> = Vec::new();
    for q in 2..=max_den {
        for p in 1..q {
            if gcd(p, q) == 1 {
                fracs.push(rat(p, q));
            }
        }
    }
    fracs.sort();
    let mut knots = Vec::new();
    let mut excluded = 0usize;
    for (i, &f1) in fracs.iter().enumerate() {
        for (j, &f2) in fracs.iter().enumerate().skip(i) {
            for &f3 in &fracs[j..] {
                for e in -6..=3i128 {
                    let t3 = f3 + Rational::from_int(e);
                    let k = KnotParams { t: [f1, f2, t3] };
                    if k.slope_sum().abs() > rat(3, 1) {
                        continue;
                    }
                    if canonicalize(&k).rep != k {
                        continue;
                    }
                    if component_count(&k) != 1 {
                        continue;
                    }
                    if excl.contains(&k) {
                        excluded += 1;
                        continue;
                    }
                    knots.push(k);
                }
            }
        }
    }
    (knots, excluded)
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Toroidal census over all canonical knots with denominators `≤ max_den`.
pub fn census(max_den: i128, excl: &Exclusions) -> Result<Census> {
    if max_den < 3 {
        return Err(Error::Unsupported(format!(
            "census needs max_den ≥ 3, got {max_den}"
        )));
    }
    let (knots, excluded) = enumerate_census_knots(max_den, excl);
    let scanned = knots.len();
    let mut entries: Vec<CensusEntry> = knots
        .par_iter()
        .map(|k| find_toroidal(k, &toroidal_search_params(), excl).map(|f| (k, f)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, f)| !f.is_empty())
        .map(|(k, findings)| CensusEntry { knot: *k, findings })
        .collect();
    entries.sort_by_key(|e| e.knot);
    Ok(Census { max_den, scanned, excluded, entries })
}

impl Census {
    /// Findings with a non-integral slope, as `(knot, δ)`.
    pub fn non_integral(&self) -> Vec<(KnotParams, Rational)> {
        self.entries
            .iter()
            .flat_map(|e| {
                e.findings
                    .iter()
                    .filter(|f| f.delta.denom() > 1)
                    .map(move |f| (e.knot, f.delta))
            })
            .collect()
    }

    /// Entries with exactly `count` distinct toroidal slopes.
    pub fn with_slope_count(&self, count: usize) -> Vec<&CensusEntry> {
        self.entries.iter().filter(|e| e.findings.len() == count).collect()
    }

    /// Histogram: boundary components of the capped torus → finding count.
    pub fn boundary_histogram(&self) -> BTreeMap<i128, usize> {
        let mut h = BTreeMap::new();
        for e in &self.entries {
            for f in &e.findings {
                *h.entry(f.report.boundary_count).or_insert(0) += 1;
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knot(s: &str) -> KnotParams {
        s.parse().unwrap()
    }

    #[test]
    fn linear_fraction_grammar() {
        let lf = parse_linfrac("n/(6n+1)").unwrap();
        assert_eq!(lf.at(2), Some(rat(2, 13)));
        assert_eq!(lf.at(-2), Some(rat(2, 11)));
        assert_eq!(lf.invert(rat(2, 11)), Some(-2));
        assert_eq!(lf.invert(rat(1, 7)), Some(1));
        assert_eq!(lf.invert(rat(1, 8)), None);
        let neg = parse_linfrac("-n/(3n+1)").unwrap();
        assert_eq!(neg.at(-2), Some(rat(-2, 5)));
        assert_eq!(neg.invert(rat(-2, 5)), Some(-2));
        assert_eq!(parse_linfrac("5-2n").unwrap().at(4), Some(rat(-3, 1)));
        assert_eq!(parse_linfrac("37/2").unwrap().constant(), Some(rat(37, 2)));
        assert_eq!(parse_linfrac("-12").unwrap().constant(), Some(rat(-12, 1)));
    }

    #[test]
    fn embedded_table_loads() {
        let table = classification_table();
        assert_eq!(table.len(), 13);
        let row3 = &table[2];
        assert_eq!(row3.tangles_at(2).unwrap(), [rat(-1, 2), rat(1, 3), rat(2, 13)]);
        assert_eq!(row3.delta_at(2), Some(Rational::ZERO));
        assert_eq!(row3.delta_at(1), Some(rat(16, 1)));
        assert_eq!(row3.delta_at(0), None); // excluded
        assert_eq!(row3.u_bar, rat(6, 1));
        let row7 = &table[6];
        assert_eq!(row7.delta_at(3), Some(rat(6, 1)));
        assert_eq!(row7.delta_at(2), None); // wrong parity
        let row11 = &table[10];
        assert_eq!(row11.delta_at(0), Some(rat(37, 2)));
        assert_eq!(row11.u_bar, rat(5, 2));
    }

    #[test]
    fn exclusion_matching_is_orbit_wide() {
        let excl = Exclusions::builtin();
        assert_eq!(excl.len(), 2);
        assert!(excl.contains(&knot("K(-1/2,1/3,1/3)")));
        // Mirror and shifted/permuted variants of the same knot.
        assert!(excl.contains(&knot("K(1/2,-1/3,-1/3)")));
        assert!(excl.contains(&knot("K(1/3,-1/2,1/3)")));
        assert!(excl.contains(&knot("K(1/2,2/3,-4/3)")));
        assert!(excl.contains(&knot("K(-1/2,1/3,1/5)")));
        assert!(!excl.contains(&knot("K(-1/2,1/3,1/7)")));
        assert!(!excl.contains(&knot("K(1/2,1/3,1/3)")));
    }

    #[test]
    fn the_three_slope_knot() {
        let findings =
            find_toroidal(&knot("K(-1/2,1/3,1/7)"), &toroidal_search_params(), Exclusions::builtin())
                .unwrap();
        let view: Vec<(Rational, Rational, Option<u32>)> =
            findings.iter().map(|f| (f.delta, f.u_bar, f.table_case)).collect();
        assert_eq!(
            view,
            vec![
                (rat(16, 1), rat(6, 1), Some(3)),
                (rat(37, 2), rat(5, 2), Some(11)),
                (rat(20, 1), Rational::ONE, Some(2)),
            ]
        );
        // The 37/2 finding carries the worked invariants.
        let f = &findings[1];
        assert_eq!(f.report.m_values, [4, 2, 4]);
        assert_eq!(f.report.boundary_count, 2);
        assert_eq!(f.verdict, Verdict::Incompressible);
    }

    #[test]
    fn single_row_knots_and_annotations() {
        let excl = Exclusions::builtin();
        let cases = [
            ("K(-1/2,2/5,1/9)", vec![(rat(15, 1), rat(5, 1), Some(9))]),
            ("K(-1/2,2/5,1/7)", vec![(rat(12, 1), rat(4, 1), Some(10))]),
            (
                "K(-2/3,1/3,1/4)",
                vec![(rat(12, 1), rat(3, 1), Some(4)), (rat(13, 1), rat(5, 2), Some(12))],
            ),
            (
                "K(-1/3,1/3,1/7)",
                vec![(Rational::ZERO, Rational::ONE, Some(1)), (rat(1, 1), rat(5, 2), Some(13))],
            ),
        ];
        for (name, want) in cases {
            let findings = find_toroidal(&knot(name), &toroidal_search_params(), excl).unwrap();
            let view: Vec<(Rational, Rational, Option<u32>)> =
                findings.iter().map(|f| (f.delta, f.u_bar, f.table_case)).collect();
            assert_eq!(view, want, "{name}");
        }
    }

    #[test]
    fn excluded_knots_are_refused() {
        let err = find_toroidal(
            &knot("K(-1/2,1/3,1/3)"),
            &toroidal_search_params(),
            Exclusions::builtin(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Excluded(_)));
        // With an empty exclusion list the same knot is searched normally.
        let findings =
            find_toroidal(&knot("K(-1/2,1/3,1/3)"), &toroidal_search_params(), &Exclusions::empty())
                .unwrap();
        assert!(!findings.is_empty());
    }

    #[test]
    fn filter_verdicts_on_reference_systems() {
        let excl = Exclusions::builtin();
        // Case 12: r-cycle {1,1,3}, the two unit paths have equal slope -1.
        let f =
            find_toroidal(&knot("K(-2/3,1/3,1/4)"), &toroidal_search_params(), excl).unwrap();
        let case12 = f.iter().find(|x| x.delta == rat(13, 1)).unwrap();
        assert_eq!(case12.verdict, Verdict::Incompressible);
        // Case 13: r-cycle {1,2,6}, all slopes positive.
        let f =
            find_toroidal(&knot("K(-1/3,1/3,1/7)"), &toroidal_search_params(), excl).unwrap();
        let case13 = f.iter().find(|x| x.delta == rat(1, 1)).unwrap();
        assert_eq!(case13.verdict, Verdict::Incompressible);
        // Pretzel r-cycle {2,4,6}: not a {1,1,r} or {1,2,r} cycle.
        let f = find_toroidal(&knot("K(1/3,1/5,1/7)"), &toroidal_search_params(), excl).unwrap();
        assert_eq!(f[0].verdict, Verdict::Incompressible);
    }

    #[test]
    fn verify_small_window_passes() {
        let checks = verify_table(3, Exclusions::builtin()).unwrap();
        assert!(checks.iter().all(|c| c.passed()), "failures: {:?}",
            checks.iter().filter(|c| !c.passed()).collect::<Vec<_>>());
        // Every case produced at least one non-skipped instance.
        for case in 1..=13u32 {
            assert!(
                checks.iter().any(|c| c.case == case && !c.skipped),
                "case {case} has no instances"
            );
        }
    }

    #[test]
    fn census_smoke_den3() {
        let c = census(3, Exclusions::builtin()).unwrap();
        assert!(c.scanned > 0);
        assert!(c.non_integral().is_empty());
        // K(1/3,1/3,-1/3) is the canonical form of the two-slope knot
        // K(-1/3,1/3,1/3) (cases 1 and 7).
        let e = c
            .entries
            .iter()
            .find(|e| e.knot == knot("K(1/3,1/3,-1/3)"))
            .expect("two-slope knot present");
        let deltas: Vec<Rational> = e.findings.iter().map(|f| f.delta).collect();
        assert_eq!(deltas, vec![Rational::ZERO, rat(2, 1)]);
        // No novel findings anywhere at this denominator bound.
        for e in &c.entries {
            for f in &e.findings {
                assert!(f.table_case.is_some(), "novel finding on {}: {}", e.knot, f.delta);
            }
        }
    }
}
