//! The `groupoid-calc` command line: subcommands over a document, JSON reports
//! and verdict exit codes (0 yes or success, 1 no, 2 unknown, 3 invalid input).

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bibundle::{
    compose_bibundles, find_section, gamma, gamma_inv, is_biprincipal, is_right_principal, Bibundle, BibundleError,
};
use crate::builtins;
use crate::fractions::{
    bf_axiom_suite, builtin_roster, check_homotopy_witness, is_essential_1homotopy_equivalence, weak_homotopy_pullback,
    FractionsError, TruncationConfig,
};
use crate::graph::{Cell, EdgePath, Graph};
use crate::groupoid::{is_essential_equivalence, weak_pullback, GraphGroupoid, GroupoidError};
use crate::homotopy::{
    abelianized_isotropy, fundamental_groupoid, gpath_concat, gpath_inverse, gpath_to_word, validate_gpath, GPath,
    HomotopyError,
};
use crate::io::{self, IoError, Library};
use crate::nerve::{compare_pi1, pi1_from_nerve, NerveError};
use crate::par;
use crate::span::{compose_spans, morita_certificate_check, search_span_iso, GeneralizedMap, SpanError};
use crate::tribool::TriBool;

pub const SEED_VAR: &str = "GROUPOID_CALC_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Bibundle(#[from] BibundleError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Fractions(#[from] FractionsError),
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error("cannot read `{path}`: {reason}")]
    File { path: String, reason: String },
    #[error("{0}")]
    Usage(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GpathOp {
    Validate,
    Concat,
    Inverse,
    Word,
}

#[derive(Debug, Parser)]
#[command(name = "groupoid-calc", version, about = "Groupoids internal to finite graphs")]
pub struct Cli {
    /// Document to load (the built-in corpus when absent).
    #[arg(long, global = true)]
    pub doc: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Named config from the document (otherwise `default`, if present).
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Word budget; also bounds normal-form path length.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Truncation of object paths in `G⋆`.
    #[arg(long, global = true)]
    pub max_len: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resolve every definition.
    Validate,
    EssentialEq {
        functor: String,
    },
    WeakPullback {
        psi: String,
        phi: String,
    },
    /// `second ∘ first`.
    SpanCompose {
        first: String,
        second: String,
    },
    SpanIso {
        first: String,
        second: String,
    },
    MoritaCheck {
        span: String,
    },
    Gamma {
        bibundle: String,
    },
    GammaInv {
        span: String,
    },
    BibundleCompose {
        first: String,
        second: String,
    },
    HasSection {
        bibundle: String,
    },
    Pi1 {
        groupoid: String,
        #[arg(long)]
        basepoint: Option<String>,
        #[arg(long)]
        abelianize: bool,
    },
    /// G-paths written `g0 ; a.~b ; g1`.
    Gpath {
        groupoid: String,
        #[arg(value_enum)]
        op: GpathOp,
        path: String,
        other: Option<String>,
    },
    HomotopyCheck {
        witness: String,
    },
    WCheck {
        functor: String,
    },
    Whp {
        eps: String,
        phi: String,
    },
    NervePi1 {
        groupoid: String,
        #[arg(long)]
        basepoint: Option<String>,
    },
    ComparePi1 {
        groupoid: String,
        #[arg(long)]
        basepoint: Option<String>,
    },
    /// Axiom checks over the built-in roster.
    BfSuite,
    OrbifoldReport {
        groupoid: String,
    },
    /// Print the built-in corpus document.
    Examples,
}

/// A report and the exit code it implies.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

impl Outcome {
    fn success(report: Value) -> Outcome {
        Outcome { report, code: 0 }
    }

    fn verdict(v: TriBool, mut report: Value) -> Outcome {
        report["verdict"] = json!(v);
        Outcome { report, code: v.exit_code() }
    }

    pub fn invalid(e: &CliError) -> Outcome {
        Outcome { report: json!({ "error": e.to_string() }), code: 3 }
    }
}

pub fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_VAR} must be an unsigned integer, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

fn groupoid_summary(g: &GraphGroupoid) -> Value {
    json!({
        "name": g.name,
        "objects": g.object_count(),
        "arrows": g.arrow_count(),
        "object_edges": g.g0.edge_count(),
        "arrow_edges": g.g1.edge_count(),
    })
}

fn span_summary(s: &GeneralizedMap) -> Value {
    json!({
        "name": s.name,
        "domain": s.domain().name,
        "codomain": s.codomain().name,
        "apex": groupoid_summary(&s.apex),
        "class": format!("{:?}", s.class),
    })
}

fn bibundle_summary(b: &Bibundle) -> Value {
    json!({
        "name": b.name,
        "left": b.k.name,
        "right": b.g.name,
        "carrier_vertices": b.carrier.vertex_count(),
        "carrier_edges": b.carrier.edge_count(),
        "right_principal": is_right_principal(b),
        "biprincipal": is_biprincipal(b),
    })
}

fn sorted_names(g: &Graph) -> Vec<String> {
    let mut v = g.vertex_names().to_vec();
    v.sort();
    v
}

fn basepoint(g: &GraphGroupoid, b: &Option<String>) -> Result<usize, CliError> {
    match b {
        Some(name) => Ok(g.object(name)?),
        None if g.object_count() > 0 => Ok(0),
        None => Err(CliError::Usage(format!("`{}` has no objects", g.name))),
    }
}

pub fn parse_gpath(g: &GraphGroupoid, text: &str) -> Result<GPath, CliError> {
    let parts: Vec<&str> = text.split(';').map(str::trim).collect();
    let mut p = GPath { arrows: Vec::new(), paths: Vec::new() };
    for (i, part) in parts.iter().enumerate() {
        if i % 2 == 0 {
            p.arrows.push(g.arrow(part)?);
            continue;
        }
        let start = g.t.vertex_image(*p.arrows.last().expect("arrow before path"));
        let mut steps = Vec::new();
        for tok in part.split('.').filter(|t| !t.is_empty()) {
            match g.g0.parse_cell(tok).map_err(GroupoidError::from)? {
                Cell::E(e, f) => steps.push((e, f)),
                Cell::V(_) => return Err(CliError::Usage(format!("`{tok}` is a vertex, not an edge"))),
            }
        }
        p.paths.push(EdgePath { start, steps });
    }
    if p.arrows.len() != p.paths.len() + 1 {
        return Err(CliError::Usage(format!("G-path `{text}` must start and end with an arrow")));
    }
    Ok(p)
}

pub fn print_gpath(g: &GraphGroupoid, p: &GPath) -> String {
    let mut parts = vec![g.arrow_name(p.arrows[0]).to_string()];
    for (alpha, &a) in p.paths.iter().zip(&p.arrows[1..]) {
        let steps: Vec<String> = alpha.steps.iter().map(|&(e, f)| g.g0.cell_name(Cell::E(e, f))).collect();
        parts.push(steps.join("."));
        parts.push(g.arrow_name(a).to_string());
    }
    parts.join(" ; ")
}

fn load(cli: &Cli) -> Result<(io::Document, Library), CliError> {
    let doc = match &cli.doc {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::File { path: path.display().to_string(), reason: e.to_string() })?;
            io::parse(&text)?
        }
        None => io::builtin_examples(),
    };
    let lib = io::resolve(&doc)?;
    Ok((doc, lib))
}

fn config(cli: &Cli, lib: &Library) -> Result<TruncationConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(name) => lib.config("--config", name)?,
        None => lib.configs.get("default").copied().unwrap_or_default(),
    };
    if let Some(d) = cli.depth {
        cfg.word.depth = d;
        cfg.max_len = d;
    }
    if let Some(l) = cli.max_len {
        cfg.max_len = l;
    }
    Ok(cfg)
}

/// Runs one parsed invocation.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Command::Examples = cli.command {
        return Ok(Outcome::success(serde_json::to_value(io::builtin_examples()).expect("document serializes")));
    }
    par::set_search_seed(seed_from_env()?);
    let (doc, lib) = load(cli)?;
    let cfg = config(cli, &lib)?;
    let at = "command line";
    let out = match &cli.command {
        Command::Examples => unreachable!("handled above"),
        Command::Validate => {
            let mut names = serde_json::Map::new();
            for (kind, name) in doc.names() {
                names.entry(kind).or_insert_with(|| json!([])).as_array_mut().expect("array").push(json!(name));
            }
            Outcome::success(json!({ "valid": true, "definitions": names }))
        }
        Command::EssentialEq { functor } => {
            let f = lib.functor(at, functor)?;
            let c = is_essential_equivalence(&f);
            Outcome::verdict(
                TriBool::from_bool(c.holds()),
                json!({
                    "functor": f.name,
                    "essentially_surjective": c.essentially_surjective,
                    "fully_faithful": c.fully_faithful,
                    "witness": c.witness,
                }),
            )
        }
        Command::WeakPullback { psi, phi } => {
            let wp = weak_pullback(&lib.functor(at, psi)?, &lib.functor(at, phi)?)?;
            Outcome::success(json!({
                "pullback": groupoid_summary(&wp.groupoid),
                "objects": sorted_names(&wp.groupoid.g0),
            }))
        }
        Command::SpanCompose { first, second } => {
            let s = compose_spans(&lib.span(at, first)?, &lib.span(at, second)?)?;
            Outcome::success(json!({ "span": span_summary(&s) }))
        }
        Command::SpanIso { first, second } => {
            let w = search_span_iso(&lib.span(at, first)?, &lib.span(at, second)?)?;
            let report =
                json!({ "first": first, "second": second, "witness_apex": w.as_ref().map(|w| w.l.name.clone()) });
            Outcome::verdict(TriBool::from_bool(w.is_some()), report)
        }
        Command::MoritaCheck { span } => {
            let s = lib.span(at, span)?;
            Outcome::verdict(TriBool::from_bool(morita_certificate_check(&s)), json!({ "span": span_summary(&s) }))
        }
        Command::Gamma { bibundle } => {
            let s = gamma(&lib.bibundle(at, bibundle)?)?;
            Outcome::success(json!({ "span": span_summary(&s) }))
        }
        Command::GammaInv { span } => {
            let b = gamma_inv(&lib.span(at, span)?)?;
            Outcome::success(json!({ "bibundle": bibundle_summary(&b) }))
        }
        Command::BibundleCompose { first, second } => {
            let b = compose_bibundles(&lib.bibundle(at, first)?, &lib.bibundle(at, second)?)?;
            Outcome::success(json!({ "bibundle": bibundle_summary(&b) }))
        }
        Command::HasSection { bibundle } => {
            let b = lib.bibundle(at, bibundle)?;
            let sec = find_section(&b).map(|s| {
                let mut pairs: Vec<(String, String)> = (0..b.k.object_count())
                    .map(|x| (b.k.object_name(x).to_string(), b.carrier.vertex_name(s.vertex_image(x)).to_string()))
                    .collect();
                pairs.sort();
                pairs
            });
            Outcome::verdict(
                TriBool::from_bool(sec.is_some()),
                json!({ "bibundle": bibundle_summary(&b), "section": sec }),
            )
        }
        Command::Pi1 { groupoid, basepoint: bp, abelianize } => {
            let g = lib.groupoid(at, groupoid)?;
            let x = basepoint(&g, bp)?;
            let pg = fundamental_groupoid(g.clone());
            let mut report = json!({
                "groupoid": g.name,
                "basepoint": g.object_name(x),
                "generators": pg.generator_count(),
                "relations": pg.relations.len(),
            });
            if *abelianize {
                let a = abelianized_isotropy(&g, x)?;
                report["abelianization"] = json!(a.to_string());
                report["invariant_factors"] = json!(a.invariant_factors());
            }
            Outcome::success(report)
        }
        Command::Gpath { groupoid, op, path, other } => {
            let g = lib.groupoid(at, groupoid)?;
            let p = parse_gpath(&g, path)?;
            let report = match op {
                GpathOp::Validate => {
                    let r = validate_gpath(&g, &p);
                    let report = json!({ "path": path, "error": r.as_ref().err().map(|e| e.to_string()) });
                    return Ok(Outcome::verdict(TriBool::from_bool(r.is_ok()), report));
                }
                GpathOp::Concat => {
                    let q = parse_gpath(
                        &g,
                        other.as_deref().ok_or_else(|| CliError::Usage("concat needs two paths".into()))?,
                    )?;
                    json!({ "result": print_gpath(&g, &gpath_concat(&g, &p, &q)?) })
                }
                GpathOp::Inverse => json!({ "result": print_gpath(&g, &gpath_inverse(&g, &p)?) }),
                GpathOp::Word => json!({ "result": gpath_to_word(&g, &p)?.display(&g) }),
            };
            Outcome::success(report)
        }
        Command::HomotopyCheck { witness } => {
            let w = lib.witness(at, witness)?;
            let v = check_homotopy_witness(&w, &cfg.word)?;
            Outcome::verdict(
                v,
                json!({ "witness": witness, "from": w.from.name, "to": w.to.name, "depth": cfg.word.depth }),
            )
        }
        Command::WCheck { functor } => {
            let c = is_essential_1homotopy_equivalence(&lib.functor(at, functor)?, &cfg)?;
            let mut report = serde_json::to_value(&c).expect("certificate serializes");
            report["depth"] = json!(cfg.word.depth);
            Outcome::verdict(c.verdict, report)
        }
        Command::Whp { eps, phi } => {
            let hp = weak_homotopy_pullback(&lib.functor(at, eps)?, &lib.functor(at, phi)?, &cfg)?;
            let square = check_homotopy_witness(&hp.square, &cfg.word)?;
            let p3 = is_essential_1homotopy_equivalence(&hp.p3, &cfg)?.verdict;
            Outcome::verdict(
                square.and(p3),
                json!({
                    "pullback": groupoid_summary(&hp.groupoid),
                    "objects": sorted_names(&hp.groupoid.g0),
                    "square_commutes": square,
                    "p3_in_w": p3,
                    "max_len": cfg.max_len,
                }),
            )
        }
        Command::NervePi1 { groupoid, basepoint: bp } => {
            let g = lib.groupoid(at, groupoid)?;
            let x = basepoint(&g, bp)?;
            let (n, p) = pi1_from_nerve(&g, x)?;
            n.check_simplicial_identities()?;
            let relators: Vec<String> = p
                .relators
                .iter()
                .map(|r| {
                    let letters: Vec<String> = r
                        .iter()
                        .map(|&(k, f)| if f { p.generators[k].clone() } else { format!("{}^-1", p.generators[k]) })
                        .collect();
                    letters.join(" ")
                })
                .collect();
            Outcome::success(json!({
                "groupoid": g.name,
                "basepoint": g.object_name(x),
                "level_counts": [n.objects, n.level1.len(), n.level2.len()],
                "generators": p.generators,
                "relators": relators,
                "abelianization": p.abelian.to_string(),
                "invariant_factors": p.abelian.invariant_factors(),
            }))
        }
        Command::ComparePi1 { groupoid, basepoint: bp } => {
            let g = lib.groupoid(at, groupoid)?;
            let x = basepoint(&g, bp)?;
            let c = compare_pi1(&g, x, &cfg.word)?;
            Outcome::verdict(
                c.verdict,
                json!({
                    "groupoid": g.name,
                    "basepoint": g.object_name(x),
                    "nerve": c.nerve.to_string(),
                    "homotopy": c.homotopy.to_string(),
                    "checked": [c.checked.0, c.checked.1],
                }),
            )
        }
        Command::BfSuite => {
            let r = bf_axiom_suite(&builtin_roster(&builtins::corpus())?, &cfg)?;
            let v = TriBool::all([r.bf1, r.bf2, r.bf3, r.bf4, r.bf5]);
            Outcome::verdict(v, serde_json::to_value(&r).expect("report serializes"))
        }
        Command::OrbifoldReport { groupoid } => orbifold_report(&lib.groupoid(at, groupoid)?)?,
    };
    Ok(out)
}

/// Orbit space, quotient map and isotropy orders of a groupoid.
fn orbifold_report(g: &Arc<GraphGroupoid>) -> Result<Outcome, CliError> {
    let o = g.orbits();
    let mut quotient: Vec<(String, String)> =
        g.g0.cells().map(|c| (g.g0.cell_name(c), o.space.cell_name(o.quotient.apply(c)))).collect();
    quotient.sort();
    let consistent = (0..g.object_count()).all(|x| o.quotient.vertex_image(x) == o.block_of[x]);
    let mut isotropy: Vec<(String, usize)> = (0..g.object_count())
        .map(|x| Ok((g.object_name(x).to_string(), g.isotropy_group(x)?.order())))
        .collect::<Result<_, GroupoidError>>()?;
    isotropy.sort();
    let edges: Vec<(String, String, String)> = o
        .space
        .edges()
        .iter()
        .map(|e| (e.name.clone(), o.space.vertex_name(e.tail).to_string(), o.space.vertex_name(e.head).to_string()))
        .collect();
    Ok(Outcome::success(json!({
        "groupoid": g.name,
        "orbit_space": { "vertices": o.space.vertex_names(), "edges": edges },
        "quotient": quotient,
        "quotient_matches_orbits": consistent,
        "folded_edges": o.folded_edges,
        "isotropy_orders": isotropy,
    })))
}

/// Parses argv, runs, and writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = run(&cli).unwrap_or_else(|e| Outcome::invalid(&e));
    let text = io::to_json(&outcome.report);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write `{}`: {e}", path.display());
                return 3;
            }
        }
        None => print!("{text}"),
    }
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        let cli = Cli::try_parse_from(std::iter::once("groupoid-calc").chain(args.iter().copied())).unwrap();
        run(&cli).unwrap_or_else(|e| Outcome::invalid(&e))
    }

    #[test]
    fn headline_commands() {
        let o = go(&["pi1", "PT2", "--basepoint", "star", "--abelianize"]);
        assert_eq!((o.code, o.report["invariant_factors"].clone()), (0, json!([2])));
        assert_eq!(go(&["w-check", "c", "--depth", "8"]).code, 0);
        let o = go(&["has-section", "inv-double-cover"]);
        assert_eq!((o.code, o.report["verdict"].clone()), (1, json!("no")));
        assert_eq!(go(&["essential-eq", "nope"]).code, 3);
    }

    #[test]
    fn gpath_round_trip() {
        let lib = io::resolve(&io::builtin_examples()).unwrap();
        let g = &lib.groupoids["REFL"];
        let p = parse_gpath(g, "(1,-1) ; a ; (tau,0) ; a ; (1,1)");
        assert!(p.is_err() || validate_gpath(g, p.as_ref().unwrap()).is_err());
        let p = parse_gpath(g, "(1,-1) ; a ; (tau,0) ; ~a ; (1,-1)").unwrap();
        assert!(validate_gpath(g, &p).is_ok());
        assert_eq!(print_gpath(g, &p), "(1,-1) ; a ; (tau,0) ; ~a ; (1,-1)");
    }
}
