//! Command bodies. Each returns the text for stdout, or a [`CliError`]
//! carrying the exit code.

use std::collections::HashSet;
use std::fmt::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use aqpack::construct::{classify, construct, CaseTag, ConstructError, Options, TreeFamily};
use aqpack::paths::{disjoint_paths, PathOutcome};
use aqpack::topology::{parse_vertex_list, AugmentedCube, Vertex};
use aqpack::verify::{connectivity, hager_upper_bound, oracle_tau, verify_family, VerificationReport};

use crate::cert::CertificateDoc;
use crate::dot::{family_to_dot, paths_to_dot};

/// Largest dimension accepted by `construct`, `paths` and `sweep`.
pub const MAX_WORK_DIM: u32 = 16;

#[derive(Debug, Error)]
pub enum CliError {
    /// Exit 2.
    #[error("{0}")]
    Usage(String),
    /// Exit 1, with a payload still worth printing on stdout.
    #[error("{message}")]
    Failure { message: String, stdout: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure { .. } => 1,
        }
    }

    fn failure(message: impl Into<String>, stdout: impl Into<String>) -> Self {
        CliError::Failure { message: message.into(), stdout: stdout.into() }
    }
}

pub type CliResult = Result<String, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn cube_in(n: u32, lo: u32, hi: u32) -> Result<AugmentedCube, CliError> {
    if !(lo..=hi).contains(&n) {
        return Err(CliError::Usage(format!("n must be in {lo}..={hi} (got {n})")));
    }
    AugmentedCube::new(n).map_err(usage)
}

/// Parses a comma-separated vertex list whose labels all have length `n`.
pub fn parse_terminals(n: u32, text: &str, count: Option<usize>) -> Result<Vec<Vertex>, CliError> {
    let vs = parse_vertex_list(text).map_err(usage)?;
    if let Some(bad) = vs.iter().find(|v| v.dim() != n) {
        return Err(CliError::Usage(format!("vertex {bad} does not have length {n}")));
    }
    if let Some(c) = count {
        if vs.len() != c {
            return Err(CliError::Usage(format!("expected {c} vertices, got {}", vs.len())));
        }
    }
    let mut seen = HashSet::new();
    if let Some(dup) = vs.iter().find(|v| !seen.insert(**v)) {
        return Err(CliError::Usage(format!("duplicate vertex {dup}")));
    }
    Ok(vs)
}

#[derive(Debug, Serialize)]
pub struct InfoDoc {
    pub n: u32,
    pub vertices: u64,
    pub edges: u64,
    pub degree: u32,
    pub connectivity: usize,
    pub connectivity_exact: bool,
    pub connectivity_method: String,
    pub hager_bound_k3: u32,
}

pub fn info(n: u32, format: Format) -> CliResult {
    let cube = cube_in(n, 1, 10)?;
    let conn = connectivity(&cube);
    let doc = InfoDoc {
        n,
        vertices: cube.vertex_count(),
        edges: cube.edge_count(),
        degree: cube.degree(),
        connectivity: conn.value,
        connectivity_exact: conn.exact,
        connectivity_method: conn.method.into(),
        hager_bound_k3: hager_upper_bound(&cube, 3),
    };
    Ok(match format {
        Format::Json => json(&doc),
        Format::Text | Format::Dot => format!(
            "AQ_{n}: {} vertices, {} edges, {}-regular\nconnectivity: {} ({}, {})\nupper bound on pendant 3-tree-connectivity: {}\n",
            doc.vertices,
            doc.edges,
            doc.degree,
            doc.connectivity,
            if doc.connectivity_exact { "exact" } else { "lower bound" },
            doc.connectivity_method,
            doc.hager_bound_k3
        ),
    })
}

pub struct ConstructArgs<'a> {
    pub n: u32,
    pub s: &'a str,
    pub format: Format,
    pub fidelity: bool,
    pub no_fallback: bool,
}

fn construct_error(e: ConstructError) -> CliError {
    match e {
        ConstructError::InvalidTerminals { .. } | ConstructError::DimensionTooSmall(_) => usage(e),
        other => CliError::failure(other.to_string(), ""),
    }
}

fn text_summary(family: &TreeFamily) -> String {
    let mut out = String::new();
    let s: Vec<String> = family.terminals.iter().map(Vertex::to_string).collect();
    writeln!(out, "AQ_{}  S = {{{}}}", family.dim, s.join(", ")).unwrap();
    writeln!(
        out,
        "case: {}{}",
        family.case().map_or("-", CaseTag::name),
        if family.fallback_used { " (fallback search)" } else { "" }
    )
    .unwrap();
    writeln!(out, "trees: {}", family.trees.len()).unwrap();
    for (i, t) in family.trees.iter().enumerate() {
        let edges: Vec<String> = t
            .edges
            .iter()
            .map(|e| {
                let (a, b) = e.endpoints();
                format!("{a}-{b}")
            })
            .collect();
        writeln!(out, "  T{}: {}", i + 1, edges.join(" ")).unwrap();
    }
    out
}

pub fn construct_cmd(args: &ConstructArgs) -> CliResult {
    let cube = cube_in(args.n, 3, MAX_WORK_DIM)?;
    let s = parse_terminals(args.n, args.s, Some(3))?;
    let opts = Options { fidelity: args.fidelity, fallback: !args.no_fallback, ..Options::default() };
    let family = construct(&cube, &s, &opts).map_err(construct_error)?;
    let report = verify_family(&cube, &family);
    if !report.accepted {
        return Err(CliError::failure("internal verification rejected the family", json(&report)));
    }
    Ok(match args.format {
        Format::Json => {
            let mut text = CertificateDoc::from_family(&family).to_json();
            text.push('\n');
            text
        }
        Format::Dot => family_to_dot(&family),
        Format::Text => text_summary(&family),
    })
}

/// Verifies a certificate; the JSON report goes to stdout either way.
pub fn verify_cmd(text: &str) -> CliResult {
    let doc = CertificateDoc::parse(text).map_err(usage)?;
    let (cube, family) = doc.to_family().map_err(usage)?;
    let report: VerificationReport = verify_family(&cube, &family);
    let out = json(&report);
    if report.accepted {
        Ok(out)
    } else {
        Err(CliError::failure("certificate rejected", out))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseCount {
    pub tag: String,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub s: Vec<String>,
    pub tag: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub n: u32,
    pub mode: String,
    pub triples: usize,
    pub expected: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub verified: usize,
    pub fallback: usize,
    pub fallback_fraction: f64,
    pub unlisted_dispatch: usize,
    pub cases: Vec<CaseCount>,
    pub failures: Vec<SweepFailure>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.verified == self.triples && self.min_size == self.expected
    }

    pub fn count(&self, tag: CaseTag) -> usize {
        self.cases.iter().find(|c| c.tag == tag.name()).map_or(0, |c| c.count)
    }
}

pub enum Selection {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

pub struct SweepArgs {
    pub n: u32,
    pub selection: Selection,
    pub jobs: Option<usize>,
    pub force: bool,
    pub no_fallback: bool,
    pub fidelity: bool,
}

fn all_triples(size: u64) -> Vec<[u64; 3]> {
    (0..size)
        .flat_map(|a| (a + 1..size).flat_map(move |b| (b + 1..size).map(move |c| [a, b, c])))
        .collect()
}

fn sampled_triples(size: u64, samples: usize, seed: u64) -> Vec<[u64; 3]> {
    let available = size * (size - 1) * (size - 2) / 6;
    let want = (samples as u64).min(available) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(want);
    while out.len() < want {
        let idx = rand::seq::index::sample(&mut rng, size as usize, 3);
        let mut t = [idx.index(0) as u64, idx.index(1) as u64, idx.index(2) as u64];
        t.sort_unstable();
        if seen.insert(t) {
            out.push(t);
        }
    }
    out
}

enum Outcome {
    Built { size: usize, verified: bool, tag: Option<CaseTag>, fallback: bool, unlisted: bool },
    Failed(SweepFailure),
}

/// Constructs and verifies a family for every selected triple.
pub fn sweep(args: &SweepArgs) -> Result<SweepSummary, CliError> {
    let cube = cube_in(args.n, 3, MAX_WORK_DIM)?;
    let size = cube.vertex_count();
    let (triples, mode) = match args.selection {
        Selection::Exhaustive => {
            if args.n > 5 && !args.force {
                return Err(CliError::Usage(format!("exhaustive sweep at n = {} needs --force", args.n)));
            }
            (all_triples(size), "exhaustive".to_string())
        }
        Selection::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(CliError::Usage("--samples must be positive".into()));
            }
            (sampled_triples(size, samples, seed), format!("sampled(seed={seed})"))
        }
    };
    let opts = Options { fidelity: args.fidelity, fallback: !args.no_fallback, ..Options::default() };
    let work = |t: &[u64; 3]| -> Outcome {
        let s = t.map(|b| cube.vertex(b).expect("inside the cube"));
        let label = || s.iter().map(Vertex::to_string).collect::<Vec<_>>();
        let class = classify(&cube, &s).ok();
        match construct(&cube, &s, &opts) {
            Ok(family) => Outcome::Built {
                size: family.trees.len(),
                verified: verify_family(&cube, &family).accepted,
                tag: family.case(),
                fallback: family.fallback_used,
                unlisted: class.is_some_and(|c| c.unlisted.is_some()),
            },
            Err(e) => Outcome::Failed(SweepFailure {
                s: label(),
                tag: class.map(|c| c.tag.name().to_string()),
                reason: e.to_string(),
            }),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {:?} workers: {e}", args.jobs)))?;
    // Indexed collect keeps input order regardless of scheduling.
    let outcomes: Vec<Outcome> = pool.install(|| triples.par_iter().map(work).collect());

    let mut summary = SweepSummary {
        n: args.n,
        mode,
        triples: triples.len(),
        expected: (2 * args.n - 3) as usize,
        min_size: usize::MAX,
        max_size: 0,
        verified: 0,
        fallback: 0,
        fallback_fraction: 0.0,
        unlisted_dispatch: 0,
        cases: CaseTag::ALL.iter().map(|t| CaseCount { tag: t.name().into(), count: 0 }).collect(),
        failures: Vec::new(),
    };
    for outcome in outcomes {
        match outcome {
            Outcome::Built { size, verified, tag, fallback, unlisted } => {
                summary.min_size = summary.min_size.min(size);
                summary.max_size = summary.max_size.max(size);
                summary.verified += usize::from(verified);
                summary.fallback += usize::from(fallback);
                summary.unlisted_dispatch += usize::from(unlisted);
                if let Some(tag) = tag {
                    let slot = CaseTag::ALL.iter().position(|&t| t == tag).expect("listed tag");
                    summary.cases[slot].count += 1;
                }
            }
            Outcome::Failed(f) => {
                summary.min_size = 0;
                summary.failures.push(f);
            }
        }
    }
    if summary.min_size == usize::MAX {
        summary.min_size = 0;
    }
    summary.fallback_fraction = summary.fallback as f64 / summary.triples.max(1) as f64;
    Ok(summary)
}

pub fn sweep_text(summary: &SweepSummary) -> String {
    let mut out = String::new();
    writeln!(out, "AQ_{} sweep ({}): {} triples", summary.n, summary.mode, summary.triples).unwrap();
    writeln!(out, "family size: min {} max {} (expected {})", summary.min_size, summary.max_size, summary.expected)
        .unwrap();
    writeln!(out, "verified: {}/{}", summary.verified, summary.triples).unwrap();
    writeln!(
        out,
        "fallback: {} ({:.4})  unlisted dispatch: {}",
        summary.fallback, summary.fallback_fraction, summary.unlisted_dispatch
    )
    .unwrap();
    writeln!(out, "cases:").unwrap();
    for c in summary.cases.iter().filter(|c| c.count > 0) {
        writeln!(out, "  {:<15} {}", c.tag, c.count).unwrap();
    }
    for f in &summary.failures {
        writeln!(out, "FAILED {{{}}} [{}]: {}", f.s.join(","), f.tag.as_deref().unwrap_or("-"), f.reason).unwrap();
    }
    out
}

pub fn sweep_cmd(args: &SweepArgs, format: Format) -> CliResult {
    let summary = sweep(args)?;
    let out = match format {
        Format::Json => json(&summary),
        Format::Text | Format::Dot => sweep_text(&summary),
    };
    if summary.passed() {
        Ok(out)
    } else {
        Err(CliError::failure(format!("{} of {} triples failed", summary.triples - summary.verified, summary.triples), out))
    }
}

#[derive(Debug, Serialize)]
pub struct OracleDoc {
    pub n: u32,
    pub s: Vec<String>,
    pub exact: bool,
    pub value: Option<usize>,
    pub lower: usize,
    pub upper: usize,
    pub nodes: u64,
    pub witness: Vec<Vec<[String; 2]>>,
}

pub fn oracle_cmd(n: u32, s: &str, budget: u64, force: bool, format: Format) -> CliResult {
    let cube = cube_in(n, 1, 6)?;
    if n > 4 && !force {
        return Err(CliError::Usage(format!("AQ_{n} has more than 16 vertices; pass --force")));
    }
    let s = parse_terminals(n, s, None)?;
    let result = oracle_tau(&cube, &s, budget).map_err(usage)?;
    let doc = OracleDoc {
        n,
        s: s.iter().map(Vertex::to_string).collect(),
        exact: result.exact,
        value: result.exact.then_some(result.lower),
        lower: result.lower,
        upper: result.upper,
        nodes: result.nodes,
        witness: result
            .witness
            .iter()
            .map(|t| {
                t.iter()
                    .map(|e| {
                        let (a, b) = e.endpoints();
                        [a.to_string(), b.to_string()]
                    })
                    .collect()
            })
            .collect(),
    };
    Ok(match format {
        Format::Json => json(&doc),
        Format::Text | Format::Dot => match doc.value {
            Some(v) => format!("tau = {v} (exact, {} nodes)\n", doc.nodes),
            None => format!("{} <= tau <= {} (budget exhausted after {} nodes)\n", doc.lower, doc.upper, doc.nodes),
        },
    })
}

#[derive(Debug, Serialize)]
pub struct CutDoc {
    pub source: String,
    pub sink: String,
    pub size: usize,
    pub vertices: Vec<String>,
    pub direct_edge: bool,
}

pub fn paths_cmd(n: u32, u: &str, v: &str, k: usize, format: Format) -> CliResult {
    let cube = cube_in(n, 1, MAX_WORK_DIM)?;
    let ends = parse_terminals(n, &format!("{u},{v}"), Some(2))?;
    if k == 0 {
        return Err(CliError::Usage("-k must be positive".into()));
    }
    match disjoint_paths(&cube, ends[0], ends[1], k).map_err(usage)? {
        PathOutcome::Paths(ps) => Ok(match format {
            Format::Dot => paths_to_dot(&ps),
            Format::Json | Format::Text => json(&ps),
        }),
        PathOutcome::Cut(cut) => {
            let doc = CutDoc {
                source: cut.source.to_string(),
                sink: cut.sink.to_string(),
                size: cut.size(),
                vertices: cut.vertices.iter().map(Vertex::to_string).collect(),
                direct_edge: cut.direct_edge,
            };
            Err(CliError::failure(format!("only {} disjoint paths exist", cut.size()), json(&doc)))
        }
    }
}
