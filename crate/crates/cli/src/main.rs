//! `gentleflow`: command-line front end for the gentleflow library.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use gentleflow::complexes::{
    band_stable_cliques, k_compatible, max_clique_size, maximal_bundles, maximal_cliques, reduced, trails_json,
};
use gentleflow::dag_bridge::{
    dag_decompose, dag_flow_from_json, from_quiver, normalize, parse_framed, to_fringed_quiver, validate_framed,
};
use gentleflow::flows::{blank_spaces, decompose_bundle, decompose_vortex, indicator, splitting_strength};
use gentleflow::io::{parse_quiver, QuiverFile};
use gentleflow::polyhedra::{
    barely_crooked_sets, clique_determinant, g_facet, phi_flow, turbulence_dimension, turbulence_presentation,
};
use gentleflow::rational::fmt_q;
use gentleflow::trails::{
    enumerate_bands, enumerate_routes, format_trail, g_vector, is_elementary, parse_trail, self_compatible,
};
use gentleflow::{fixtures, Error, Flow, FringedQuiver, Q, Trail};

#[derive(Parser)]
#[command(name = "gentleflow", version, about = "Flows, trails and polyhedra of fringed gentle quivers")]
struct Cli {
    /// Indented JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Compact JSON (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy, Default)]
struct Bounds {
    /// Longest route considered (default |E| + 2|V_int|).
    #[arg(long = "max-arrows")]
    max_arrows: Option<usize>,
    /// Longest band considered (default 2|V_int| + 2).
    #[arg(long = "band-arrows")]
    band_arrows: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CellKind {
    Clique,
    Bundle,
    Vortex,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a quiver or framed-graph file.
    Validate { file: String },
    /// Complete a gentle quiver to its fringed quiver.
    Fringe {
        file: String,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Find a pairing function.
    Pairing { file: String },
    /// Enumerate routes.
    Routes {
        file: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Enumerate bands.
    Bands {
        file: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// g-vector of a trail.
    Gvector {
        file: String,
        #[arg(long)]
        trail: String,
    },
    /// Decompose a flow into a bundle combination.
    Decompose {
        file: String,
        #[arg(long)]
        flow: String,
        /// Split into the route part and the vortex.
        #[arg(long)]
        vortex: bool,
    },
    /// Blank spaces of a flow, and the splitting strength of a band.
    Blanks {
        file: String,
        #[arg(long)]
        flow: String,
        #[arg(long)]
        band: Option<String>,
    },
    /// Maximal cliques.
    Cliques {
        file: String,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        reduced: bool,
    },
    /// Maximal bundles.
    Bundles {
        file: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Band-stable cliques.
    BandStable {
        file: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Vertices of the turbulence polyhedron and their g-vectors.
    Vertices { file: String },
    /// Recession rays of the turbulence polyhedron and their g-vectors.
    Rays { file: String },
    /// Facet half-spaces of the g-polyhedron.
    Facets { file: String },
    /// Cells of the clique, bundle or vortex dissection.
    Cells {
        file: String,
        #[arg(long, value_enum, default_value = "clique")]
        kind: CellKind,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Convert between framed graphs and paired fringed quivers.
    ConvertDag { file: String },
    /// Decompose a flow on a framed graph.
    DagDecompose {
        file: String,
        #[arg(long)]
        flow: String,
    },
    /// List bundled examples, or print one with its reports.
    Examples { name: Option<String> },
}

enum Fail {
    Domain(Error),
    Io(String),
    /// The report is printed, then the command fails.
    Invalid(Value, String, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Domain(e)
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::Duplicate(_) => "duplicate",
        Error::Dangling { .. } => "dangling",
        Error::UnknownArrow(_) => "unknown-arrow",
        Error::UnknownVertex(_) => "unknown-vertex",
        Error::NotComposable(..) => "not-composable",
        Error::NotGentle(_) => "not-gentle",
        Error::NotFringed(_) => "not-fringed",
        Error::NotAString(_) => "not-a-string",
        Error::InvalidFlow(_) => "invalid-flow",
        Error::Boundary(_) => "boundary",
        Error::NotComparable => "not-comparable",
        Error::IncompatibleBand => "incompatible-band",
        Error::BadArrowSet(_) => "bad-arrow-set",
        Error::NotPaired => "not-paired",
        Error::BadFraming(_) => "bad-framing",
        Error::Decomposition(_) => "decomposition",
    }
}

/// A file path, or the name of a bundled example.
struct Input {
    text: String,
}

fn read_input(arg: &str) -> Res<Input> {
    let p = Path::new(arg);
    if p.exists() {
        let text = std::fs::read_to_string(p).map_err(|e| Fail::Io(format!("{arg}: {e}")))?;
        return Ok(Input { text });
    }
    match fixtures::get(arg) {
        Some(f) => Ok(Input { text: f.file.to_string() }),
        None => Err(Fail::Io(format!("{arg}: no such file or bundled example"))),
    }
}

/// Inline JSON or a path to a JSON file.
fn read_flow_text(arg: &str) -> Res<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Fail::Io(format!("{arg}: {e}")))
}

fn is_framed(text: &str) -> bool {
    text.lines().any(|l| l.split_whitespace().next() == Some("edge"))
}

fn load_quiver(text: &str) -> Res<FringedQuiver> {
    if is_framed(text) {
        let (g, _) = normalize(&parse_framed(text)?)?;
        return Ok(to_fringed_quiver(&g)?.0);
    }
    Ok(parse_quiver(text)?.into_fringed()?)
}

fn sha256(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn route_bound(q: &FringedQuiver, b: &Bounds) -> usize {
    b.max_arrows.unwrap_or(q.n_arrows() + 2 * q.n_internal())
}
fn band_bound(q: &FringedQuiver, b: &Bounds) -> usize {
    b.band_arrows.unwrap_or(2 * q.n_internal() + 2)
}
fn bounds_json(q: &FringedQuiver, b: &Bounds) -> Value {
    json!({ "route_bound": route_bound(q, b), "band_bound": band_bound(q, b) })
}

fn qs(v: &[Q]) -> Value {
    v.iter().map(fmt_q).collect()
}

fn trail_info(q: &FringedQuiver, t: &Trail) -> Value {
    json!({
        "trail": format_trail(q, t),
        "straight": t.is_straight(),
        "self_compatible": self_compatible(q, t),
        "elementary": is_elementary(q, t),
        "g_vector": g_vector(q, t),
    })
}

fn quiver_summary(q: &FringedQuiver) -> Value {
    json!({
        "vertices": q.n_vertices(),
        "internal_vertices": q.n_internal(),
        "arrows": q.n_arrows(),
        "internal_arrows": q.n_internal_arrows(),
        "straight_routes": q.n_straight(),
        "representation_finite": q.is_representation_finite(),
        "paired": q.find_pairing().is_some(),
        "dimension": turbulence_dimension(q),
    })
}

fn labels_json(q: &FringedQuiver, labels: &[u8]) -> Value {
    let mut m = Map::new();
    for (a, l) in labels.iter().enumerate() {
        m.insert(q.arrow_id(a).to_string(), json!(l));
    }
    Value::Object(m)
}

fn presentation_items(q: &FringedQuiver, xs: &[(Trail, Vec<Q>)]) -> Value {
    xs.iter()
        .map(|(t, v)| {
            let g = phi_flow(q, &indicator(q, t));
            json!({ "trail": format_trail(q, t), "vector": qs(v), "g_vector": qs(&g) })
        })
        .collect()
}

fn validate(text: &str) -> Res<Value> {
    if is_framed(text) {
        let g = parse_framed(text)?;
        let r = validate_framed(&g);
        let valid = r.violations.is_empty();
        let report = json!({ "kind": "framed-graph", "valid": valid, "report": r });
        return if valid { Ok(report) } else { Err(Fail::Invalid(report, "framed graph has violations".into(), String::new())) };
    }
    match parse_quiver(text)? {
        QuiverFile::Fringed(q) => Ok(json!({ "kind": "fringed", "valid": true, "violations": [], "summary": quiver_summary(&q) })),
        QuiverFile::Base(g) => {
            let vs = g.validate_gentle()?;
            if !vs.is_empty() {
                let report = json!({ "kind": "base", "valid": false, "violations": vs });
                return Err(Fail::Invalid(report, "quiver is not gentle".into(), String::new()));
            }
            let q = g.fringe()?;
            Ok(json!({ "kind": "base", "valid": true, "violations": [], "summary": quiver_summary(&q) }))
        }
    }
}

fn cells(q: &FringedQuiver, kind: CellKind, b: &Bounds) -> Value {
    let (rb, bb) = (route_bound(q, b), band_bound(q, b));
    let ind = |t: &Trail| qs(indicator(q, t).values());
    match kind {
        CellKind::Clique => maximal_cliques(q, rb)
            .iter()
            .map(|k| {
                let det = clique_determinant(q, k).ok().map(|d| fmt_q(&d));
                json!({
                    "trails": trails_json(q, k),
                    "vertices": k.iter().map(ind).collect::<Vec<_>>(),
                    "g_vertices": reduced(k).iter().map(|t| g_vector(q, t)).collect::<Vec<_>>(),
                    "determinant": det,
                })
            })
            .collect(),
        CellKind::Bundle => maximal_bundles(q, rb, bb)
            .iter()
            .map(|k| {
                let (bands, routes): (Vec<&Trail>, Vec<&Trail>) = k.iter().partition(|t| t.band);
                json!({
                    "trails": trails_json(q, k),
                    "vertices": routes.into_iter().map(ind).collect::<Vec<_>>(),
                    "rays": bands.into_iter().map(ind).collect::<Vec<_>>(),
                })
            })
            .collect(),
        CellKind::Vortex => {
            let bands: Vec<Trail> = enumerate_bands(q, bb).into_iter().filter(|t| self_compatible(q, t)).collect();
            band_stable_cliques(q, rb, bb)
                .iter()
                .map(|k| {
                    let kb: Vec<Trail> = bands.iter().filter(|t| k_compatible(q, k, t)).cloned().collect();
                    json!({
                        "trails": trails_json(q, k),
                        "maximal": k.len() == max_clique_size(q),
                        "vertices": k.iter().map(ind).collect::<Vec<_>>(),
                        "bands": trails_json(q, &kb),
                        "rays": kb.iter().map(ind).collect::<Vec<_>>(),
                    })
                })
                .collect()
        }
    }
}

fn example(name: &str) -> Res<Value> {
    let fx = fixtures::get(name).ok_or_else(|| Fail::Io(format!("no bundled example `{name}`")))?;
    let mut flows = Map::new();
    let mut decomps = Map::new();
    let reports = if fx.is_dag {
        let g = parse_framed(fx.file)?;
        for (n, text) in fx.flows {
            flows.insert(n.to_string(), serde_json::from_str(text).map_err(|e| Fail::Io(e.to_string()))?);
            decomps.insert(n.to_string(), dag_decompose(&g, &dag_flow_from_json(&g, text)?)?.to_json(&g));
        }
        json!({ "validate": validate_framed(&g), "dag_decompose": decomps })
    } else {
        let q = load_quiver(fx.file)?;
        let pres = turbulence_presentation(&q);
        for (n, text) in fx.flows {
            flows.insert(n.to_string(), serde_json::from_str(text).map_err(|e| Fail::Io(e.to_string()))?);
            decomps.insert(n.to_string(), decompose_bundle(&q, &Flow::from_json(&q, text)?)?.to_json(&q));
        }
        json!({
            "validate": quiver_summary(&q),
            "vertices": presentation_items(&q, &pres.vertices),
            "rays": presentation_items(&q, &pres.rays),
            "decompose": decomps,
        })
    };
    Ok(json!({ "name": fx.name, "file": fx.file, "flows": flows, "reports": reports }))
}

/// Runs a command and returns `(input hash, bounds, payload)`.
fn run(cmd: &Cmd) -> Res<(String, Value, Value)> {
    let none = json!({});
    Ok(match cmd {
        Cmd::Validate { file } => {
            let inp = read_input(file)?;
            let h = sha256(&[&inp.text]);
            let r = validate(&inp.text).map_err(|f| match f {
                Fail::Invalid(v, m, _) => Fail::Invalid(v, m, h.clone()),
                other => other,
            })?;
            (h, none, r)
        }
        Cmd::Fringe { file, out } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let text = q.to_text();
            let payload = match out {
                Some(p) => {
                    std::fs::write(p, &text).map_err(|e| Fail::Io(format!("{}: {e}", p.display())))?;
                    json!({ "written": p.display().to_string(), "summary": quiver_summary(&q) })
                }
                None => json!({ "text": text, "summary": quiver_summary(&q) }),
            };
            (sha256(&[&inp.text]), none, payload)
        }
        Cmd::Pairing { file } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let p = q.find_pairing();
            let payload = json!({ "paired": p.is_some(), "labels": p.map(|p| labels_json(&q, &p.labels)) });
            (sha256(&[&inp.text]), none, payload)
        }
        Cmd::Routes { file, bounds } | Cmd::Bands { file, bounds } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let ts = if matches!(cmd, Cmd::Routes { .. }) {
                enumerate_routes(&q, route_bound(&q, bounds))
            } else {
                enumerate_bands(&q, band_bound(&q, bounds))
            };
            let items: Vec<Value> = ts.iter().map(|t| trail_info(&q, t)).collect();
            (sha256(&[&inp.text]), bounds_json(&q, bounds), json!({ "count": items.len(), "trails": items }))
        }
        Cmd::Gvector { file, trail } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let t = parse_trail(&q, trail)?;
            (sha256(&[&inp.text]), none, trail_info(&q, &t))
        }
        Cmd::Decompose { file, flow, vortex } => {
            let inp = read_input(file)?;
            let ft = read_flow_text(flow)?;
            let q = load_quiver(&inp.text)?;
            let f = Flow::from_json(&q, &ft)?;
            let mut payload = if *vortex {
                decompose_vortex(&q, &f)?.to_json(&q)
            } else {
                decompose_bundle(&q, &f)?.to_json(&q)
            };
            payload["strength"] = json!(fmt_q(&f.strength(&q)));
            (sha256(&[&inp.text, &ft]), none, payload)
        }
        Cmd::Blanks { file, flow, band } => {
            let inp = read_input(file)?;
            let ft = read_flow_text(flow)?;
            let q = load_quiver(&inp.text)?;
            let f = Flow::from_json(&q, &ft)?;
            let side = |m: &Option<gentleflow::MarkedTrail>| m.as_ref().map(|m| format_trail(&q, &m.unmarked()));
            let blanks: Vec<Value> = blank_spaces(&q, &f)?
                .iter()
                .map(|b| {
                    json!({
                        "arrow": q.arrow_id(b.arrow),
                        "lo": fmt_q(&b.lo),
                        "hi": fmt_q(&b.hi),
                        "length": fmt_q(&b.len()),
                        "below": side(&b.below),
                        "above": side(&b.above),
                    })
                })
                .collect();
            let mut payload = json!({ "count": blanks.len(), "blanks": blanks });
            if let Some(b) = band {
                let t = parse_trail(&q, b)?;
                payload["band"] = json!(format_trail(&q, &t));
                payload["splitting_strength"] = json!(fmt_q(&splitting_strength(&q, &f, &t)?));
            }
            (sha256(&[&inp.text, &ft]), none, payload)
        }
        Cmd::Cliques { file, bounds, reduced: red } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let mut cs = maximal_cliques(&q, route_bound(&q, bounds));
            if *red {
                cs = cs.iter().map(|k| reduced(k)).collect();
            }
            let list: Vec<Value> = cs.iter().map(|k| trails_json(&q, k)).collect();
            let payload = json!({ "count": list.len(), "clique_size": max_clique_size(&q), "cliques": list });
            (sha256(&[&inp.text]), bounds_json(&q, bounds), payload)
        }
        Cmd::Bundles { file, bounds } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let bs = maximal_bundles(&q, route_bound(&q, bounds), band_bound(&q, bounds));
            let list: Vec<Value> = bs.iter().map(|k| trails_json(&q, k)).collect();
            (sha256(&[&inp.text]), bounds_json(&q, bounds), json!({ "count": list.len(), "bundles": list }))
        }
        Cmd::BandStable { file, bounds } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let full = max_clique_size(&q);
            let list: Vec<Value> = band_stable_cliques(&q, route_bound(&q, bounds), band_bound(&q, bounds))
                .iter()
                .map(|k| json!({ "trails": trails_json(&q, k), "maximal": k.len() == full }))
                .collect();
            (sha256(&[&inp.text]), bounds_json(&q, bounds), json!({ "count": list.len(), "cliques": list }))
        }
        Cmd::Vertices { file } | Cmd::Rays { file } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let p = turbulence_presentation(&q);
            let payload = if matches!(cmd, Cmd::Vertices { .. }) {
                json!({ "dimension": p.dimension, "count": p.vertices.len(), "vertices": presentation_items(&q, &p.vertices) })
            } else {
                json!({ "dimension": p.dimension, "count": p.rays.len(), "rays": presentation_items(&q, &p.rays) })
            };
            (sha256(&[&inp.text]), none, payload)
        }
        Cmd::Facets { file } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let mut list = Vec::new();
            for w in barely_crooked_sets(&q) {
                let h = g_facet(&q, &w)?;
                let ids: Vec<&str> = w.iter().map(|&a| q.arrow_id(a)).collect();
                list.push(json!({ "arrows": ids, "halfspace": h.to_json(&q), "text": h.render(&q) }));
            }
            (sha256(&[&inp.text]), none, json!({ "count": list.len(), "facets": list }))
        }
        Cmd::Cells { file, kind, bounds } => {
            let inp = read_input(file)?;
            let q = load_quiver(&inp.text)?;
            let cs = cells(&q, *kind, bounds);
            let n = cs.as_array().map_or(0, |a| a.len());
            (sha256(&[&inp.text]), bounds_json(&q, bounds), json!({ "count": n, "cells": cs }))
        }
        Cmd::ConvertDag { file } => {
            let inp = read_input(file)?;
            let payload = if is_framed(&inp.text) {
                let (g, renamed) = normalize(&parse_framed(&inp.text)?)?;
                let (q, psi) = to_fringed_quiver(&g)?;
                json!({
                    "quiver": q.to_text(),
                    "pairing": labels_json(&q, &psi.labels),
                    "renamed": renamed,
                    "acyclic": g.is_acyclic(),
                    "representation_finite": q.is_representation_finite(),
                })
            } else {
                let q = load_quiver(&inp.text)?;
                let g = from_quiver(&q)?;
                json!({ "graph": g.to_text(), "acyclic": g.is_acyclic() })
            };
            (sha256(&[&inp.text]), none, payload)
        }
        Cmd::DagDecompose { file, flow } => {
            let inp = read_input(file)?;
            let ft = read_flow_text(flow)?;
            let g = parse_framed(&inp.text)?;
            let f = dag_flow_from_json(&g, &ft)?;
            (sha256(&[&inp.text, &ft]), none, dag_decompose(&g, &f)?.to_json(&g))
        }
        Cmd::Examples { name } => match name {
            None => {
                let list: Vec<Value> = fixtures::ALL
                    .iter()
                    .map(|f| json!({ "name": f.name, "kind": if f.is_dag { "framed-graph" } else { "quiver" } }))
                    .collect();
                (sha256(&[]), none, json!({ "examples": list }))
            }
            Some(n) => {
                let fx = fixtures::get(n).ok_or_else(|| Fail::Io(format!("no bundled example `{n}`")))?;
                (sha256(&[fx.file]), none, example(n)?)
            }
        },
    })
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Validate { .. } => "validate",
        Cmd::Fringe { .. } => "fringe",
        Cmd::Pairing { .. } => "pairing",
        Cmd::Routes { .. } => "routes",
        Cmd::Bands { .. } => "bands",
        Cmd::Gvector { .. } => "gvector",
        Cmd::Decompose { .. } => "decompose",
        Cmd::Blanks { .. } => "blanks",
        Cmd::Cliques { .. } => "cliques",
        Cmd::Bundles { .. } => "bundles",
        Cmd::BandStable { .. } => "band-stable",
        Cmd::Vertices { .. } => "vertices",
        Cmd::Rays { .. } => "rays",
        Cmd::Facets { .. } => "facets",
        Cmd::Cells { .. } => "cells",
        Cmd::ConvertDag { .. } => "convert-dag",
        Cmd::DagDecompose { .. } => "dag-decompose",
        Cmd::Examples { .. } => "examples",
    }
}

fn report(cmd: &Cmd, hash: &str, bounds: Value, result: Value) -> Value {
    json!({
        "meta": {
            "tool": "gentleflow",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command_name(cmd),
            "input_sha256": hash,
            "bounds": bounds,
        },
        "result": result,
    })
}

fn emit(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).unwrap()
    } else {
        v.to_string()
    }
}

/// Ignores a closed stdout, e.g. when piped into `head`.
fn print_out(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}");
}

#[cfg(feature = "parallel")]
fn configure_threads() {
    if let Some(n) = std::env::var("GENTLEFLOW_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let fail = |kind: &str, msg: String| {
        eprintln!("{}", json!({ "error": { "kind": kind, "message": msg } }));
        ExitCode::from(1)
    };
    match run(&cli.cmd) {
        Ok((hash, bounds, result)) => {
            print_out(&emit(&report(&cli.cmd, &hash, bounds, result), cli.pretty));
            ExitCode::SUCCESS
        }
        Err(Fail::Domain(e)) => fail(error_kind(&e), e.to_string()),
        Err(Fail::Io(msg)) => fail("io", msg),
        Err(Fail::Invalid(result, msg, hash)) => {
            print_out(&emit(&report(&cli.cmd, &hash, json!({}), result), cli.pretty));
            fail("invalid", msg)
        }
    }
}
