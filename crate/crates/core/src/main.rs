//! Command-line front end. Exit codes: 0 verified / true, 10 failed,
//! 20 verified only at the filtered level, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use koszul_cy::barcobar::Cobar;
use koszul_cy::cy_verify::{parse_kind, proper_cy_algebra, smooth_cy_on_bar, CYReport, FrobeniusDatum, Truncation, Verdict, Witness};
use koszul_cy::cyclic::betti_compare;
use koszul_cy::dgstruct::DGCoalgebra;
use koszul_cy::input::{builtin_coalgebra, builtin_frobenius, parse_document, ComplexDoc, Document};
use koszul_cy::lie::{ce_coalgebra, check_lie_cy, is_unimodular, LieAlgebra};
use koszul_cy::linalg::ScalarKind;
use koszul_cy::selftest::structural_suite;
use koszul_cy::spaces::{
    check_pd, check_space_cy, enumerate_cosets, fundamental_cycle, pi1_presentation, reduce_by_tree, sign_characters,
    FundamentalCycle, LocalSystem, ReducedModel, SimplicialComplex, COSET_LIMIT,
};
use koszul_cy::{Error, Result};

#[derive(Parser)]
#[command(name = "koszul-cy", version, about = "Koszul duality and Calabi-Yau certificates in exact arithmetic")]
struct Cli {
    #[command(flatten)]
    cfg: Config,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Config {
    /// q, z or fp:<p>
    #[arg(long, default_value = "q", global = true)]
    scalar: String,
    /// Weight cap L.
    #[arg(short = 'L', default_value_t = 4, global = true)]
    level: u32,
    /// Degree window lo:hi.
    #[arg(long, default_value = "0:3", global = true)]
    window: String,
    /// Powers of u in the negative cyclic lift.
    #[arg(short = 'N', default_value_t = 3, global = true)]
    u_powers: usize,
    #[arg(long, global = true)]
    builtin: Option<String>,
    /// JSON input document.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Add wall-clock timings (makes reports non-reproducible byte for byte).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lie algebras through their Chevalley–Eilenberg coalgebras.
    Lie {
        #[command(subcommand)]
        op: LieOp,
    },
    /// Simplicial complexes.
    Space {
        #[command(subcommand)]
        op: SpaceOp,
    },
    /// Conilpotent dg coalgebras.
    Coalg {
        #[command(subcommand)]
        op: CoalgOp,
    },
    /// Finite-dimensional algebras with a trace.
    Alg {
        #[command(subcommand)]
        op: AlgOp,
    },
    /// Structural identities on built-ins and randomized structures.
    Selftest {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-check the witness matrices stored in a report.
    Replay { file: PathBuf },
}

#[derive(Subcommand)]
enum LieOp {
    Unimodular,
    CheckCy,
    Betti,
}

#[derive(Args)]
struct SpaceArgs {
    /// Dimension n (defaults to the dimension of the complex).
    #[arg(short = 'n')]
    n: Option<usize>,
    /// local_system documents.
    #[arg(long)]
    system: Vec<PathBuf>,
    /// Add the ±1 rank-one systems of H¹(K; F2).
    #[arg(long)]
    sign_systems: bool,
}

#[derive(Subcommand)]
enum SpaceOp {
    CheckPd(SpaceArgs),
    CheckCy(SpaceArgs),
    Pi1,
}

#[derive(Subcommand)]
enum CoalgOp {
    Cobar,
    BettiCompare,
}

#[derive(Subcommand)]
enum AlgOp {
    CheckProperCy {
        #[arg(short = 'n')]
        n: Option<i64>,
    },
    SmoothCyOnBar {
        #[arg(short = 'n')]
        n: Option<i64>,
    },
}

/// How a finished command maps to an exit code.
enum Status {
    Verdict(Verdict),
    Bool(bool),
    /// Passed, but only for the cases actually checked.
    Scoped(bool),
}

impl Status {
    fn code(&self) -> u8 {
        match self {
            Status::Verdict(Verdict::Verified) | Status::Bool(true) => 0,
            Status::Verdict(Verdict::VerifiedFiltered) | Status::Scoped(true) => 20,
            _ => 10,
        }
    }
}

struct Run {
    kind: ScalarKind,
    t: Truncation,
    cfg: Config,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// CY fields at top level, the rest under `details`.
fn with_cy(cy: &CYReport, details: Value) -> Map<String, Value> {
    let Value::Object(mut m) = to_value(cy) else { unreachable!() };
    m.insert("details".into(), details);
    m
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

impl Run {
    fn document(&self) -> Result<Option<Document>> {
        match &self.cfg.input {
            Some(p) => parse_document(&read(p)?, self.kind).map(Some),
            None => Ok(None),
        }
    }

    fn source(&self) -> Value {
        match (&self.cfg.builtin, &self.cfg.input) {
            (Some(b), _) => json!({ "builtin": b }),
            (None, Some(p)) => json!({ "input": p.display().to_string() }),
            _ => Value::Null,
        }
    }

    fn wrong(&self, d: &Document, want: &str) -> Error {
        Error::Input(format!("expected a {want} document, got {}", d.kind_name()))
    }

    fn need_source(&self) -> Result<()> {
        if self.cfg.builtin.is_none() && self.cfg.input.is_none() {
            return Err(Error::Input("give --builtin <name> or --input <file>".into()));
        }
        Ok(())
    }

    fn lie(&self) -> Result<LieAlgebra> {
        self.need_source()?;
        if let Some(b) = &self.cfg.builtin {
            return LieAlgebra::builtin(b, self.kind).ok_or_else(|| Error::Input(format!("unknown Lie builtin {b:?}")));
        }
        match self.document()?.expect("input") {
            Document::Lie(g) => Ok(g),
            d => Err(self.wrong(&d, "lie_algebra")),
        }
    }

    fn complex(&self) -> Result<ComplexDoc> {
        self.need_source()?;
        if let Some(b) = &self.cfg.builtin {
            let complex = SimplicialComplex::builtin(b).ok_or_else(|| Error::Input(format!("unknown space builtin {b:?}")))?;
            return Ok(ComplexDoc { complex, base_vertex: 0, cycle: None });
        }
        match self.document()?.expect("input") {
            Document::Complex(c) => Ok(c),
            d => Err(self.wrong(&d, "simplicial_complex")),
        }
    }

    fn coalgebra(&self) -> Result<DGCoalgebra> {
        self.need_source()?;
        if let Some(b) = &self.cfg.builtin {
            return builtin_coalgebra(b, self.kind)?.ok_or_else(|| Error::Input(format!("unknown coalgebra builtin {b:?}")));
        }
        match self.document()?.expect("input") {
            Document::Coalgebra(c) => Ok(c),
            Document::Lie(g) => Ok(ce_coalgebra(&g)?.coalgebra().clone()),
            d => Err(self.wrong(&d, "dg_coalgebra")),
        }
    }

    fn frobenius(&self, n: Option<i64>) -> Result<(FrobeniusDatum, i64)> {
        self.need_source()?;
        if let Some(b) = &self.cfg.builtin {
            let (f, m) = builtin_frobenius(b, self.kind).ok_or_else(|| Error::Input(format!("unknown algebra builtin {b:?}")))?;
            return Ok((f, n.unwrap_or(m)));
        }
        match self.document()?.expect("input") {
            Document::Frobenius(f, m) => Ok((f, n.or(m).unwrap_or(0))),
            d => Err(self.wrong(&d, "frobenius")),
        }
    }

    fn space_setup(&self, a: &SpaceArgs) -> Result<(ReducedModel, FundamentalCycle, Vec<LocalSystem>)> {
        let doc = self.complex()?;
        let m = reduce_by_tree(&doc.complex, doc.base_vertex)?;
        let n = a.n.unwrap_or(doc.complex.dim().max(0) as usize);
        let alpha = match doc.cycle {
            Some(c) => FundamentalCycle::new(&doc.complex, n, self.kind, c)?,
            None => fundamental_cycle(&doc.complex, n, self.kind)?,
        };
        let mut systems = Vec::new();
        for p in &a.system {
            match parse_document(&read(p)?, self.kind)? {
                Document::LocalSystem(d) => systems.push(d.build(&m, self.kind)?),
                d => return Err(self.wrong(&d, "local_system")),
            }
        }
        if a.sign_systems {
            systems.extend(sign_characters(&m, self.kind)?);
        }
        Ok((m, alpha, systems))
    }

    fn execute(&self, cmd: &Cmd) -> Result<(Map<String, Value>, Status)> {
        let k = self.kind;
        let t = &self.t;
        Ok(match cmd {
            Cmd::Lie { op: LieOp::Unimodular } => {
                let g = self.lie()?;
                let u = is_unimodular(&g);
                let traces: Vec<String> = (0..g.dim()).map(|i| g.ad_trace(i).to_string()).collect();
                let m = json!({ "unimodular": u, "ad_traces": traces, "dim": g.dim() });
                (m.as_object().cloned().expect("object"), Status::Bool(u))
            }
            Cmd::Lie { op: LieOp::CheckCy } => {
                let g = self.lie()?;
                let r = check_lie_cy(&g, t, &k.one())?;
                let details = json!({ "unimodular": r.unimodular, "pd_chain_map": r.pd_chain_map,
                    "pd_quasi_iso": r.pd_quasi_iso, "pd_class_is_cycle": r.pd_class_is_cycle });
                (with_cy(&r.cy, details), Status::Verdict(r.cy.verdict))
            }
            Cmd::Lie { op: LieOp::Betti } => {
                let g = self.lie()?;
                let ce = ce_coalgebra(&g)?;
                let n = g.dim() as i64;
                let h = ce.coalgebra().chain_complex()?.homology(0, n)?;
                let h0 = Cobar::new(ce.coalgebra())?.complex(t.level)?.homology(0, 0)?;
                let pbw: u64 = (0..=t.level as u64).map(|j| binomial(n as u64 + j - 1, j)).sum();
                let m = json!({ "betti": h.ranks(0, n), "cobar_h0": h0.rank(0), "pbw_count": pbw, "level": t.level });
                (m.as_object().cloned().expect("object"), Status::Bool(h0.rank(0) as u64 == pbw))
            }
            Cmd::Space { op: SpaceOp::CheckPd(a) } => {
                let (m, alpha, systems) = self.space_setup(a)?;
                let r = check_pd(&m, &alpha, &systems, COSET_LIMIT)?;
                let status = if r.definitive { Status::Bool(true) } else if r.passed { Status::Scoped(true) } else { Status::Bool(false) };
                let Value::Object(mut o) = to_value(&r) else { unreachable!() };
                o.insert("cycle".into(), to_value(&alpha.record()));
                (o, status)
            }
            Cmd::Space { op: SpaceOp::CheckCy(a) } => {
                let (m, alpha, systems) = self.space_setup(a)?;
                let r = check_space_cy(&m, &alpha, &systems, t, COSET_LIMIT)?;
                let details = json!({ "vertices": r.vertices, "tree_edges": r.tree_edges, "cells": r.cells,
                    "homology_preserved": r.homology_preserved, "correction_terms": r.correction_terms,
                    "pd": to_value(&r.pd), "cycle": to_value(&alpha.record()) });
                (with_cy(&r.cy, details), Status::Verdict(r.cy.verdict))
            }
            Cmd::Space { op: SpaceOp::Pi1 } => {
                let doc = self.complex()?;
                let m = reduce_by_tree(&doc.complex, doc.base_vertex)?;
                let p = pi1_presentation(&m);
                let order = enumerate_cosets(&p, COSET_LIMIT).map(|t| t.order);
                let h = doc.complex.chain_complex(ScalarKind::Integer)?.homology_all()?;
                let o = json!({ "presentation": to_value(&p), "order": order, "integral_homology": to_value(&h),
                    "certificate": to_value(m.certificate()) });
                (o.as_object().cloned().expect("object"), Status::Bool(true))
            }
            Cmd::Coalg { op: CoalgOp::Cobar } => {
                let c = self.coalgebra()?;
                let h = Cobar::new(&c)?.complex(t.level)?.homology(t.window.0, t.window.1)?;
                let o = json!({ "level": t.level, "homology": to_value(&h) });
                (o.as_object().cloned().expect("object"), Status::Bool(true))
            }
            Cmd::Coalg { op: CoalgOp::BettiCompare } => {
                let c = self.coalgebra()?;
                let r = betti_compare(&c, t.level, t.window)?;
                let Value::Object(mut o) = to_value(&r) else { unreachable!() };
                o.insert("passes".into(), Value::Bool(r.passes()));
                (o, Status::Bool(r.passes()))
            }
            Cmd::Alg { op: AlgOp::CheckProperCy { n } } => {
                let (f, n) = self.frobenius(*n)?;
                let r = proper_cy_algebra(&f, n)?;
                (with_cy(&r, Value::Null), Status::Verdict(r.verdict))
            }
            Cmd::Alg { op: AlgOp::SmoothCyOnBar { n } } => {
                let (f, n) = self.frobenius(*n)?;
                let r = smooth_cy_on_bar(&f, n, t)?;
                (with_cy(&r, Value::Null), Status::Verdict(r.verdict))
            }
            Cmd::Selftest { count, seed } => {
                let out = structural_suite(*seed, *count);
                let ok = out.iter().all(|o| o.passed);
                let o = json!({ "passed": ok, "cases": out.len(), "failures": to_value(&out.iter().filter(|o| !o.passed).collect::<Vec<_>>()) });
                (o.as_object().cloned().expect("object"), Status::Bool(ok))
            }
            Cmd::Replay { file } => {
                let v: Value = serde_json::from_str(&read(file)?).map_err(|e| Error::Input(format!("report: {e}")))?;
                let w: Witness = serde_json::from_value(v.get("witness").cloned().unwrap_or(Value::Null))
                    .map_err(|e| Error::Input(format!("report witness: {e}")))?;
                let ok = w.replay()?;
                let o = json!({ "replayed": w.matrices.len(), "identities_hold": ok, "complete": w.complete });
                (o.as_object().cloned().expect("object"), Status::Bool(ok))
            }
        })
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Lie { op: LieOp::Unimodular } => "lie unimodular",
        Cmd::Lie { op: LieOp::CheckCy } => "lie check-cy",
        Cmd::Lie { op: LieOp::Betti } => "lie betti",
        Cmd::Space { op: SpaceOp::CheckPd(_) } => "space check-pd",
        Cmd::Space { op: SpaceOp::CheckCy(_) } => "space check-cy",
        Cmd::Space { op: SpaceOp::Pi1 } => "space pi1",
        Cmd::Coalg { op: CoalgOp::Cobar } => "coalg cobar",
        Cmd::Coalg { op: CoalgOp::BettiCompare } => "coalg betti-compare",
        Cmd::Alg { op: AlgOp::CheckProperCy { .. } } => "alg check-proper-cy",
        Cmd::Alg { op: AlgOp::SmoothCyOnBar { .. } } => "alg smooth-cy-on-bar",
        Cmd::Selftest { .. } => "selftest",
        Cmd::Replay { .. } => "replay",
    }
}

fn config(cfg: Config) -> std::result::Result<Run, String> {
    let kind = parse_kind(&cfg.scalar).map_err(|e| e.to_string())?;
    let (lo, hi) = cfg
        .window
        .split_once(':')
        .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
        .ok_or_else(|| format!("--window must be lo:hi, got {:?}", cfg.window))?;
    if lo > hi {
        return Err(format!("--window needs lo <= hi, got {lo}:{hi}"));
    }
    if cfg.level < 1 || cfg.u_powers < 1 {
        return Err("-L and -N must be at least 1".into());
    }
    let t = Truncation { level: cfg.level, window: (lo, hi), u_powers: cfg.u_powers };
    Ok(Run { kind, t, cfg })
}

/// Mathematical negatives that arrive as errors.
fn is_negative(e: &Error) -> bool {
    matches!(e, Error::DegenerateTrace { .. } | Error::NotOrientable | Error::NotACycle)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match config(cli.cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let name = command_name(&cli.cmd);
    let (mut body, code) = match run.execute(&cli.cmd) {
        Ok((body, status)) => (body, status.code()),
        Err(e) if is_negative(&e) => {
            let mut m = Map::new();
            m.insert("verdict".into(), Value::String(Verdict::Failed.as_str().into()));
            m.insert("error".into(), Value::String(e.to_string()));
            (m, 10)
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    body.insert("command".into(), Value::String(name.into()));
    body.insert("scalar".into(), Value::String(run.kind.to_string()));
    body.insert("source".into(), run.source());
    body.entry("truncation").or_insert_with(|| to_value(&run.t));
    if run.cfg.timings {
        body.insert("timings".into(), json!({ "total_ms": start.elapsed().as_millis() as u64 }));
    }
    let text = serde_json::to_string_pretty(&Value::Object(body)).expect("json") + "\n";
    match &run.cfg.report {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
            println!("{name}: exit {code}, report written to {}", p.display());
        }
        None => {
            use std::io::Write;
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
        }
    }
    ExitCode::from(code)
}
