//! `montesinos` — boundary slopes and toroidal surfaces of length-3
//! Montesinos knots from the command line.
//!
//! Exit codes: 0 success, 1 verification mismatch or internal failure,
//! 2 parse error, 3 input is not a knot, 4 knot is on the exclusion list.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use montesinos::classifier::{
    census, find_toroidal, slope_table, toroidal_search_params, verify_table, Census,
    Exclusions, InstanceCheck, SystemRow, ToroidalFinding,
};
use montesinos::edgepath::{enumerate_skeletons, SearchParams};
use montesinos::invariants::Orientability;
use montesinos::knot::{canonicalize, KnotParams};
use montesinos::solver::SolutionFamily;
use montesinos::{Error, Rational};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "montesinos",
    version,
    about = "Boundary slopes and toroidal candidate surfaces of length-3 Montesinos knots"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Replace the built-in non-hyperbolic exclusion list with FILE
    /// (one knot per line, `#` comments).
    #[arg(long, global = true, value_name = "FILE")]
    exclusions: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every candidate system of a knot with its invariants and slope.
    Slopes {
        /// Knot notation: `K(-1/2,1/3,1/7)` or three slopes `1/3 1/5 1/7`.
        #[arg(required = true)]
        knot: Vec<String>,
        /// Compute on the mirror image instead.
        #[arg(long)]
        mirror: bool,
        /// Only consider systems stopping at `u ≥` this bound.
        #[arg(long, value_name = "P/Q")]
        u_floor: Option<String>,
    },
    /// List the toroidal findings of a knot (genus-one candidate surfaces).
    Toroidal {
        #[arg(required = true)]
        knot: Vec<String>,
        /// Compute on the mirror image instead.
        #[arg(long)]
        mirror: bool,
    },
    /// Re-derive the embedded classification table and report mismatches.
    Verify {
        /// Family parameter window: instantiate rows over n in [-N, N].
        #[arg(long, value_name = "N", default_value_t = 3)]
        max_n: i128,
    },
    /// Sweep all canonical knots with tangle denominators up to a bound.
    Census {
        #[arg(long, value_name = "D", default_value_t = 7)]
        max_den: i128,
        /// Restrict the report to one corollary query.
        #[arg(long, value_enum)]
        query: Option<Query>,
    },
    /// Dump the edgepath skeleton enumeration for one tangle slope.
    Paths {
        /// Tangle slope, e.g. `2/7`.
        tangle: String,
        /// Only keep skeletons useful above this height.
        #[arg(long, value_name = "P/Q")]
        u_floor: Option<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Query {
    /// Findings whose slope is not an integer.
    Nonintegral,
    /// Knots with two or more toroidal slopes.
    Multi,
    /// Histogram of boundary-component counts.
    Boundary,
}

fn main() -> ExitCode {
    // Die quietly when the output pipe closes early (`montesinos ... | head`)
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse(_) => 2,
                Error::NotAKnot { .. } => 3,
                Error::Excluded(_) => 4,
                _ => 1,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let owned;
    let excl: &Exclusions = match &cli.exclusions {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            owned = Exclusions::parse(&text)?;
            &owned
        }
        None => Exclusions::builtin(),
    };
    match &cli.cmd {
        Cmd::Slopes { knot, mirror, u_floor } => {
            let knot = parse_knot(knot, *mirror)?;
            let params = SearchParams {
                u_floor: parse_ufloor(u_floor.as_deref())?,
                ..SearchParams::default()
            };
            let rows = slope_table(&knot, &params)?;
            emit_slopes(cli.format, &knot, *mirror, &params, &rows);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Toroidal { knot, mirror } => {
            let knot = parse_knot(knot, *mirror)?;
            let findings = find_toroidal(&knot, &toroidal_search_params(), excl)?;
            emit_toroidal(cli.format, &knot, *mirror, &findings);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { max_n } => {
            if *max_n < 1 {
                return Err(Error::Parse("--max-n must be at least 1".into()));
            }
            let checks = verify_table(*max_n, excl)?;
            let ok = emit_verify(cli.format, *max_n, &checks);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Census { max_den, query } => {
            let report = census(*max_den, excl)?;
            emit_census(cli.format, &report, *query);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Paths { tangle, u_floor } => {
            let t: Rational = tangle
                .parse()
                .map_err(|_| Error::Parse(format!("invalid tangle slope {tangle:?}")))?;
            let params = SearchParams {
                u_floor: parse_ufloor(u_floor.as_deref())?,
                ..SearchParams::default()
            };
            let skels = enumerate_skeletons(t, &params)?;
            emit_paths(cli.format, t, &params, &skels);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_knot(args: &[String], mirror: bool) -> Result<KnotParams, Error> {
    let joined = args.join(" ");
    let k: KnotParams = joined.parse()?;
    k.validate_knot()?;
    Ok(if mirror { k.mirror() } else { k })
}

fn parse_ufloor(s: Option<&str>) -> Result<Rational, Error> {
    match s {
        None => Ok(Rational::ONE),
        Some(s) => {
            let u: Rational = s
                .parse()
                .map_err(|_| Error::Parse(format!("invalid u-floor {s:?}")))?;
            if u < Rational::ONE {
                return Err(Error::Parse("u-floor must be at least 1".into()));
            }
            Ok(u)
        }
    }
}

// ---------------------------------------------------------------------------
// Serialization payloads (field order fixed = deterministic JSON)

#[derive(Serialize)]
struct KnotInfo {
    knot: String,
    mirror_input: bool,
    canonical: String,
    canonical_is_mirrored: bool,
}

fn knot_info(k: &KnotParams, mirror: bool) -> KnotInfo {
    let c = canonicalize(k);
    KnotInfo {
        knot: k.to_string(),
        mirror_input: mirror,
        canonical: c.rep.to_string(),
        canonical_is_mirrored: c.mirrored,
    }
}

#[derive(Serialize)]
struct SystemPayload {
    u_bar: String,
    paths: String,
    lengths: [String; 3],
    ebar: String,
    tau: String,
    delta: String,
    chi_surface: i128,
    chi_capped: i128,
    m_values: [i128; 3],
    sheets: i128,
    sheets_upper: i128,
    boundary_count: i128,
    orientable: String,
    torus: bool,
    family: Option<String>,
}

fn orientability_str(o: Orientability) -> String {
    match o {
        Orientability::Yes => "yes",
        Orientability::No => "no",
        Orientability::Undetermined => "undetermined",
    }
    .to_string()
}

fn family_str(f: Option<SolutionFamily>) -> Option<String> {
    f.map(|fam| match fam {
        SolutionFamily::UInterval { lo, hi } => format!("u-interval [{lo}, {hi})"),
        SolutionFamily::YFamily { dims } => format!("y-family dims {dims}"),
    })
}

fn system_payload(r: &SystemRow) -> SystemPayload {
    SystemPayload {
        u_bar: r.system.u_bar.to_string(),
        paths: r.system.render(),
        lengths: [
            r.lengths[0].to_string(),
            r.lengths[1].to_string(),
            r.lengths[2].to_string(),
        ],
        ebar: r.ebar.to_string(),
        tau: r.tau.to_string(),
        delta: r.delta.to_string(),
        chi_surface: r.report.chi_surface,
        chi_capped: r.report.chi_capped,
        m_values: r.report.m_values,
        sheets: r.report.sheets,
        sheets_upper: r.report.sheets_upper,
        boundary_count: r.report.boundary_count,
        orientable: orientability_str(r.report.orientable),
        torus: r.report.torus,
        family: family_str(r.system.family),
    }
}

#[derive(Serialize)]
struct SlopesPayload {
    schema_version: String,
    #[serde(flatten)]
    knot: KnotInfo,
    u_floor: String,
    systems: Vec<SystemPayload>,
}

#[derive(Serialize)]
struct FindingPayload {
    delta: String,
    u_bar: String,
    all_u_bars: Vec<String>,
    table_case: Option<u32>,
    verdict: String,
    system: String,
    m_values: [i128; 3],
    sheets: i128,
    boundary_count: i128,
    orientable: String,
}

fn finding_payload(f: &ToroidalFinding) -> FindingPayload {
    FindingPayload {
        delta: f.delta.to_string(),
        u_bar: f.u_bar.to_string(),
        all_u_bars: f.all_u_bars.iter().map(|u| u.to_string()).collect(),
        table_case: f.table_case,
        verdict: f.verdict.to_string(),
        system: f.system.render(),
        m_values: f.report.m_values,
        sheets: f.report.sheets,
        boundary_count: f.report.boundary_count,
        orientable: orientability_str(f.report.orientable),
    }
}

#[derive(Serialize)]
struct ToroidalPayload {
    schema_version: String,
    #[serde(flatten)]
    knot: KnotInfo,
    findings: Vec<FindingPayload>,
}

#[derive(Serialize)]
struct CheckPayload {
    case: u32,
    knot: String,
    n: Option<i128>,
    expected_delta: String,
    expected_u_bar: String,
    skipped: bool,
    found: bool,
    novel: Vec<[String; 2]>,
    pass: bool,
}

fn check_payload(c: &InstanceCheck) -> CheckPayload {
    CheckPayload {
        case: c.case,
        knot: c.knot.to_string(),
        n: c.n,
        expected_delta: c.expected_delta.to_string(),
        expected_u_bar: c.expected_u_bar.to_string(),
        skipped: c.skipped,
        found: c.found,
        novel: c.novel.iter().map(|(d, u)| [d.to_string(), u.to_string()]).collect(),
        pass: c.passed(),
    }
}

#[derive(Serialize)]
struct VerifyPayload {
    schema_version: String,
    max_n: i128,
    instances: usize,
    mismatches: usize,
    checks: Vec<CheckPayload>,
}

#[derive(Serialize)]
struct CensusEntryPayload {
    knot: String,
    findings: Vec<FindingPayload>,
}

#[derive(Serialize)]
struct CensusPayload {
    schema_version: String,
    max_den: i128,
    scanned: usize,
    excluded: usize,
    query: Option<String>,
    entries: Option<Vec<CensusEntryPayload>>,
    nonintegral: Option<Vec<[String; 2]>>,
    boundary_histogram: Option<Vec<[i128; 2]>>,
}

#[derive(Serialize)]
struct PathsPayload {
    schema_version: String,
    tangle: String,
    u_floor: String,
    max_edges: usize,
    count: usize,
    skeletons: Vec<String>,
}

// ---------------------------------------------------------------------------
// Emitters

fn print_json<T: Serialize>(payload: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(payload).expect("payload serializes")
    );
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

fn emit_slopes(
    format: Format,
    k: &KnotParams,
    mirror: bool,
    params: &SearchParams,
    rows: &[SystemRow],
) {
    let payload = SlopesPayload {
        schema_version: SCHEMA_VERSION.into(),
        knot: knot_info(k, mirror),
        u_floor: params.u_floor.to_string(),
        systems: rows.iter().map(system_payload).collect(),
    };
    match format {
        Format::Json => print_json(&payload),
        Format::Csv => {
            println!(
                "u_bar,len1,len2,len3,ebar,tau,delta,chi_surface,chi_capped,sheets,sheets_upper,boundary_count,orientable,torus,family,paths"
            );
            for s in &payload.systems {
                println!(
                    "{}",
                    csv_line(&[
                        s.u_bar.clone(),
                        s.lengths[0].clone(),
                        s.lengths[1].clone(),
                        s.lengths[2].clone(),
                        s.ebar.clone(),
                        s.tau.clone(),
                        s.delta.clone(),
                        s.chi_surface.to_string(),
                        s.chi_capped.to_string(),
                        s.sheets.to_string(),
                        s.sheets_upper.to_string(),
                        s.boundary_count.to_string(),
                        s.orientable.clone(),
                        s.torus.to_string(),
                        s.family.clone().unwrap_or_default(),
                        s.paths.clone(),
                    ])
                );
            }
        }
        Format::Text => {
            println!("{}", describe_knot(&payload.knot));
            println!("{} candidate system(s):", payload.systems.len());
            for s in &payload.systems {
                let family = s
                    .family
                    .as_deref()
                    .map(|f| format!("  [{f}]"))
                    .unwrap_or_default();
                println!(
                    "  u = {:>6}  lengths ({}, {}, {})  ebar = {:>6}  tau = {:>5}  delta = {:>6}  chi = {:>3}  sheets = {}  bdry = {}{}{}",
                    s.u_bar,
                    s.lengths[0],
                    s.lengths[1],
                    s.lengths[2],
                    s.ebar,
                    s.tau,
                    s.delta,
                    s.chi_surface,
                    if s.sheets == s.sheets_upper {
                        s.sheets.to_string()
                    } else {
                        format!("{}|{}", s.sheets, s.sheets_upper)
                    },
                    s.boundary_count,
                    if s.torus { "  TORUS" } else { "" },
                    family,
                );
                println!("      {}", s.paths);
            }
        }
    }
}

fn describe_knot(info: &KnotInfo) -> String {
    let mut s = format!("knot {}", info.knot);
    if info.mirror_input {
        s.push_str(" (mirror of the input)");
    }
    let _ = write!(
        s,
        "; canonical representative {}{}",
        info.canonical,
        if info.canonical_is_mirrored { " (mirrored)" } else { "" }
    );
    s
}

fn emit_toroidal(format: Format, k: &KnotParams, mirror: bool, findings: &[ToroidalFinding]) {
    let payload = ToroidalPayload {
        schema_version: SCHEMA_VERSION.into(),
        knot: knot_info(k, mirror),
        findings: findings.iter().map(finding_payload).collect(),
    };
    match format {
        Format::Json => print_json(&payload),
        Format::Csv => {
            println!(
                "delta,u_bar,all_u_bars,table_case,verdict,sheets,boundary_count,orientable,system"
            );
            for f in &payload.findings {
                println!(
                    "{}",
                    csv_line(&[
                        f.delta.clone(),
                        f.u_bar.clone(),
                        f.all_u_bars.join(" "),
                        f.table_case.map(|c| c.to_string()).unwrap_or_default(),
                        f.verdict.clone(),
                        f.sheets.to_string(),
                        f.boundary_count.to_string(),
                        f.orientable.clone(),
                        f.system.clone(),
                    ])
                );
            }
        }
        Format::Text => {
            println!("{}", describe_knot(&payload.knot));
            if payload.findings.is_empty() {
                println!("no toroidal candidate surfaces");
                return;
            }
            println!("{} toroidal finding(s):", payload.findings.len());
            for f in &payload.findings {
                let case = f
                    .table_case
                    .map(|c| format!("table case {c}"))
                    .unwrap_or_else(|| "NOVEL".into());
                println!(
                    "  delta = {:>6} at u = {:>5}  ({}; {}; all u: {})",
                    f.delta,
                    f.u_bar,
                    case,
                    f.verdict,
                    f.all_u_bars.join(", "),
                );
                println!("      {}", f.system);
            }
        }
    }
}

fn emit_verify(format: Format, max_n: i128, checks: &[InstanceCheck]) -> bool {
    let payload = VerifyPayload {
        schema_version: SCHEMA_VERSION.into(),
        max_n,
        instances: checks.len(),
        mismatches: checks.iter().filter(|c| !c.passed()).count(),
        checks: checks.iter().map(check_payload).collect(),
    };
    match format {
        Format::Json => print_json(&payload),
        Format::Csv => {
            println!("case,knot,n,expected_delta,expected_u_bar,skipped,found,novel,pass");
            for c in &payload.checks {
                println!(
                    "{}",
                    csv_line(&[
                        c.case.to_string(),
                        c.knot.clone(),
                        c.n.map(|n| n.to_string()).unwrap_or_default(),
                        c.expected_delta.clone(),
                        c.expected_u_bar.clone(),
                        c.skipped.to_string(),
                        c.found.to_string(),
                        c.novel
                            .iter()
                            .map(|p| format!("{}@{}", p[0], p[1]))
                            .collect::<Vec<_>>()
                            .join(" "),
                        c.pass.to_string(),
                    ])
                );
            }
        }
        Format::Text => {
            for c in &payload.checks {
                let n = c.n.map(|n| format!(" n = {n:>3}")).unwrap_or_default();
                let status = if c.skipped {
                    "skip (excluded)".into()
                } else if c.pass {
                    "ok".into()
                } else {
                    let novel: Vec<String> =
                        c.novel.iter().map(|p| format!("{}@{}", p[0], p[1])).collect();
                    format!(
                        "MISMATCH{}{}",
                        if c.found { "" } else { " (expected slope not found)" },
                        if novel.is_empty() {
                            String::new()
                        } else {
                            format!(" (novel: {})", novel.join(", "))
                        }
                    )
                };
                println!(
                    "case {:>2}{}  {:<22} expect delta = {:>6} at u = {:>4}: {}",
                    c.case, n, c.knot, c.expected_delta, c.expected_u_bar, status
                );
            }
            println!(
                "{} instance(s), {} mismatch(es)",
                payload.instances, payload.mismatches
            );
        }
    }
    payload.mismatches == 0
}

fn emit_census(format: Format, report: &Census, query: Option<Query>) {
    let query_name = query.map(|q| {
        match q {
            Query::Nonintegral => "nonintegral",
            Query::Multi => "multi",
            Query::Boundary => "boundary",
        }
        .to_string()
    });
    let entries = |keep: &dyn Fn(&montesinos::classifier::CensusEntry) -> bool| {
        Some(
            report
                .entries
                .iter()
                .filter(|e| keep(e))
                .map(|e| CensusEntryPayload {
                    knot: e.knot.to_string(),
                    findings: e.findings.iter().map(finding_payload).collect(),
                })
                .collect::<Vec<_>>(),
        )
    };
    let payload = CensusPayload {
        schema_version: SCHEMA_VERSION.into(),
        max_den: report.max_den,
        scanned: report.scanned,
        excluded: report.excluded,
        query: query_name,
        entries: match query {
            None => entries(&|_| true),
            Some(Query::Multi) => entries(&|e| e.findings.len() >= 2),
            _ => None,
        },
        nonintegral: matches!(query, Some(Query::Nonintegral)).then(|| {
            report
                .non_integral()
                .iter()
                .map(|(k, d)| [k.to_string(), d.to_string()])
                .collect()
        }),
        boundary_histogram: matches!(query, Some(Query::Boundary)).then(|| {
            report
                .boundary_histogram()
                .into_iter()
                .map(|(b, c)| [b, c as i128])
                .collect()
        }),
    };
    match format {
        Format::Json => print_json(&payload),
        Format::Csv => {
            if let Some(hist) = &payload.boundary_histogram {
                println!("boundary_count,findings");
                for row in hist {
                    println!("{},{}", row[0], row[1]);
                }
            } else if let Some(pairs) = &payload.nonintegral {
                println!("knot,delta");
                for p in pairs {
                    println!("{}", csv_line(&[p[0].clone(), p[1].clone()]));
                }
            } else if let Some(entries) = &payload.entries {
                println!("knot,delta,u_bar,table_case,verdict");
                for e in entries {
                    for f in &e.findings {
                        println!(
                            "{}",
                            csv_line(&[
                                e.knot.clone(),
                                f.delta.clone(),
                                f.u_bar.clone(),
                                f.table_case.map(|c| c.to_string()).unwrap_or_default(),
                                f.verdict.clone(),
                            ])
                        );
                    }
                }
            }
        }
        Format::Text => {
            println!(
                "census over denominators <= {}: {} knot(s) scanned, {} excluded",
                payload.max_den, payload.scanned, payload.excluded
            );
            if let Some(hist) = &payload.boundary_histogram {
                println!("boundary components -> findings:");
                for row in hist {
                    println!("  {} -> {}", row[0], row[1]);
                }
            } else if let Some(pairs) = &payload.nonintegral {
                println!("{} non-integral toroidal pair(s):", pairs.len());
                for p in pairs {
                    println!("  {}  delta = {}", p[0], p[1]);
                }
            } else if let Some(entries) = &payload.entries {
                println!("{} knot(s) with findings:", entries.len());
                for e in entries {
                    let slopes: Vec<String> = e
                        .findings
                        .iter()
                        .map(|f| {
                            format!(
                                "{} (u = {}, {})",
                                f.delta,
                                f.u_bar,
                                f.table_case
                                    .map(|c| format!("case {c}"))
                                    .unwrap_or_else(|| "NOVEL".into())
                            )
                        })
                        .collect();
                    println!("  {:<22} {}", e.knot, slopes.join("; "));
                }
            }
        }
    }
}

fn emit_paths(format: Format, t: Rational, params: &SearchParams, skels: &[montesinos::edgepath::Skeleton]) {
    let render = |s: &montesinos::edgepath::Skeleton| {
        if s.steps.is_empty() {
            format!("{} (empty)", s.start)
        } else {
            let mut out = s.start.to_string();
            for st in &s.steps {
                let _ = write!(out, " > {}", st.to);
            }
            out
        }
    };
    let payload = PathsPayload {
        schema_version: SCHEMA_VERSION.into(),
        tangle: t.to_string(),
        u_floor: params.u_floor.to_string(),
        max_edges: params.max_edges,
        count: skels.len(),
        skeletons: skels.iter().map(|s| render(s)).collect(),
    };
    match format {
        Format::Json => print_json(&payload),
        Format::Csv => {
            println!("skeleton");
            for s in &payload.skeletons {
                println!("{}", csv_field(s));
            }
        }
        Format::Text => {
            println!(
                "tangle {}: {} skeleton(s) (u_floor = {}, max_edges = {})",
                payload.tangle, payload.count, payload.u_floor, payload.max_edges
            );
            for s in &payload.skeletons {
                println!("  {s}");
            }
        }
    }
}
