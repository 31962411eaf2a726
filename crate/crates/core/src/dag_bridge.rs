//! Framed directed graphs, their correspondence with paired fringed quivers,
//! and the flow algorithm on framed DAGs.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flows::{decompose_bundle, Flow};
use crate::io::strip_comment;
use crate::par;
use crate::quiver::{Arrow, FringedQuiver, Pairing, Violation};
use crate::rational::{fmt_q, parse_q, Q};
use crate::trails::Trail;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Source,
    Sink,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub label: u8,
}

/// A directed graph with a `{1,2}` labelling of its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramedGraph {
    vertices: Vec<(String, Kind)>,
    edges: Vec<Edge>,
    vindex: HashMap<String, usize>,
    tail: Vec<usize>,
    head: Vec<usize>,
    ins: Vec<Vec<usize>>,
    outs: Vec<Vec<usize>>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadFraming(msg.into())
}

impl FramedGraph {
    /// Edges are reindexed in id order.
    pub fn new(vertices: Vec<(String, Kind)>, mut edges: Vec<Edge>) -> Result<Self> {
        let mut vindex = HashMap::new();
        for (i, (v, _)) in vertices.iter().enumerate() {
            if vindex.insert(v.clone(), i).is_some() {
                return Err(Error::Duplicate(v.clone()));
            }
        }
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        let mut seen = HashSet::new();
        let (mut tail, mut head) = (Vec::new(), Vec::new());
        let mut ins = vec![Vec::new(); vertices.len()];
        let mut outs = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            if !seen.insert(e.id.clone()) || vindex.contains_key(&e.id) {
                return Err(Error::Duplicate(e.id.clone()));
            }
            if e.label != 1 && e.label != 2 {
                return Err(bad(format!("edge {} has label {}", e.id, e.label)));
            }
            let ix = |v: &String| {
                vindex.get(v).copied().ok_or_else(|| Error::Dangling { arrow: e.id.clone(), vertex: v.clone() })
            };
            let (t, h) = (ix(&e.tail)?, ix(&e.head)?);
            tail.push(t);
            head.push(h);
            outs[t].push(i);
            ins[h].push(i);
        }
        for (v, (name, kind)) in vertices.iter().enumerate() {
            match kind {
                Kind::Source if !ins[v].is_empty() => return Err(bad(format!("source {name} has an incoming edge"))),
                Kind::Sink if !outs[v].is_empty() => return Err(bad(format!("sink {name} has an outgoing edge"))),
                _ => {}
            }
        }
        Ok(FramedGraph { vertices, edges, vindex, tail, head, ins, outs })
    }

    pub fn vertices(&self) -> &[(String, Kind)] {
        &self.vertices
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edges.iter().position(|e| e.id == id).ok_or_else(|| Error::UnknownArrow(id.into()))
    }
    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vindex.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.into()))
    }
    pub fn kind(&self, v: usize) -> Kind {
        self.vertices[v].1
    }
    pub fn label(&self, e: usize) -> u8 {
        self.edges[e].label
    }
    pub fn tail(&self, e: usize) -> usize {
        self.tail[e]
    }
    pub fn head(&self, e: usize) -> usize {
        self.head[e]
    }
    pub fn ins(&self, v: usize) -> &[usize] {
        &self.ins[v]
    }
    pub fn outs(&self, v: usize) -> &[usize] {
        &self.outs[v]
    }
    pub fn n_internal(&self) -> usize {
        self.vertices.iter().filter(|v| v.1 == Kind::Internal).count()
    }

    fn monolabel_cycle(&self, label: u8) -> bool {
        // Kahn's algorithm on the edges carrying `label`
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        for e in 0..self.n_edges() {
            if self.label(e) == label {
                indeg[self.head[e]] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut done = 0;
        while let Some(v) = stack.pop() {
            done += 1;
            for &e in &self.outs[v] {
                if self.label(e) == label {
                    indeg[self.head[e]] -= 1;
                    if indeg[self.head[e]] == 0 {
                        stack.push(self.head[e]);
                    }
                }
            }
        }
        done < n
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.ins[v].len()).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut done = 0;
        while let Some(v) = stack.pop() {
            done += 1;
            for &e in &self.outs[v] {
                indeg[self.head[e]] -= 1;
                if indeg[self.head[e]] == 0 {
                    stack.push(self.head[e]);
                }
            }
        }
        done == n
    }

    /// Serialize in the framed-graph file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (v, k) in &self.vertices {
            match k {
                Kind::Source => s += &format!("vertex {v} source\n"),
                Kind::Sink => s += &format!("vertex {v} sink\n"),
                Kind::Internal => s += &format!("vertex {v}\n"),
            }
        }
        for e in &self.edges {
            s += &format!("edge {}: {} -> {} label {}\n", e.id, e.tail, e.head, e.label);
        }
        s
    }

    pub fn format_path(&self, p: &[usize]) -> String {
        p.iter().map(|&e| self.edges[e].id.as_str()).collect::<Vec<_>>().join(" ")
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// `vertex <id> [source|sink]` and `edge <id>: <u> -> <v> label <1|2>` lines.
pub fn parse_framed(text: &str) -> Result<FramedGraph> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "vertex" => {
                let kind = match toks.get(2) {
                    None => Kind::Internal,
                    Some(&"source") => Kind::Source,
                    Some(&"sink") => Kind::Sink,
                    Some(k) => return Err(perr(ln, format!("unknown vertex kind `{k}`"))),
                };
                if toks.len() < 2 || toks.len() > 3 {
                    return Err(perr(ln, "expected `vertex <id> [source|sink]`"));
                }
                vertices.push((toks[1].to_string(), kind));
            }
            "edge" => {
                // edge <id>: <u> -> <v> label <1|2>
                let shape = "expected `edge <id>: <u> -> <v> label <1|2>`";
                if toks.len() != 7 || !toks[1].ends_with(':') || toks[3] != "->" || toks[5] != "label" {
                    return Err(perr(ln, shape));
                }
                let id = toks[1].trim_end_matches(':');
                let label = match toks[6] {
                    "1" => 1,
                    "2" => 2,
                    l => return Err(perr(ln, format!("label must be 1 or 2, got `{l}`"))),
                };
                if id.is_empty() {
                    return Err(perr(ln, shape));
                }
                edges.push(Edge { id: id.into(), tail: toks[2].into(), head: toks[4].into(), label });
            }
            kw => return Err(perr(ln, format!("unknown directive `{kw}`"))),
        }
    }
    FramedGraph::new(vertices, edges)
}

/// Structural flags plus every violated condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FramedReport {
    pub violations: Vec<Violation>,
    pub amply_framed: bool,
    pub convenient: bool,
    pub gently_framed: bool,
    pub acyclic: bool,
}

fn violation(axiom: &str, at: &str) -> Violation {
    Violation { axiom: axiom.into(), at: at.into() }
}

pub fn validate_framed(g: &FramedGraph) -> FramedReport {
    let mut vs = Vec::new();
    let mut ample = true;
    for (v, (name, kind)) in g.vertices.iter().enumerate() {
        if *kind != Kind::Internal {
            continue;
        }
        if g.ins[v].len() != 2 || g.outs[v].len() != 2 {
            vs.push(violation("full", name));
            ample = false;
            continue;
        }
        let distinct = |es: &[usize]| g.label(es[0]) != g.label(es[1]);
        if !distinct(&g.ins[v]) {
            vs.push(violation("labels-in", name));
            ample = false;
        }
        if !distinct(&g.outs[v]) {
            vs.push(violation("labels-out", name));
            ample = false;
        }
    }
    for l in [1, 2] {
        if g.monolabel_cycle(l) {
            vs.push(violation("bilabelled-cycles", &format!("label {l}")));
            ample = false;
        }
    }
    let mut convenient = true;
    for (v, (name, kind)) in g.vertices.iter().enumerate() {
        if *kind != Kind::Internal && g.ins[v].len() + g.outs[v].len() != 1 {
            vs.push(violation("convenient", name));
            convenient = false;
        }
    }
    let mut direct = false;
    for (e, edge) in g.edges.iter().enumerate() {
        if g.kind(g.tail[e]) == Kind::Source && g.kind(g.head[e]) == Kind::Sink {
            vs.push(violation("gently-framed", &edge.id));
            direct = true;
        }
    }
    FramedReport { violations: vs, amply_framed: ample, convenient, gently_framed: ample && !direct, acyclic: g.is_acyclic() }
}

/// Splits every source or sink meeting several edges into one vertex per edge.
/// Returns the new graph and, for each split vertex, its original name.
pub fn normalize(g: &FramedGraph) -> Result<(FramedGraph, Vec<(String, String)>)> {
    let mut vertices = Vec::new();
    let mut renamed = Vec::new();
    let mut edges = g.edges.clone();
    for (v, (name, kind)) in g.vertices.iter().enumerate() {
        let inc: Vec<usize> = g.ins[v].iter().chain(&g.outs[v]).copied().collect();
        if *kind == Kind::Internal || inc.len() <= 1 {
            vertices.push((name.clone(), *kind));
            continue;
        }
        for e in inc {
            let new = format!("{name}#{}", g.edges[e].id);
            if *kind == Kind::Source {
                edges[e].tail = new.clone();
            } else {
                edges[e].head = new.clone();
            }
            vertices.push((new.clone(), *kind));
            renamed.push((new, name.clone()));
        }
    }
    Ok((FramedGraph::new(vertices, edges)?, renamed))
}

fn require_gentle(g: &FramedGraph) -> Result<()> {
    let r = validate_framed(g);
    if let Some(v) = r.violations.first() {
        return Err(bad(format!("{} at {}", v.axiom, v.at)));
    }
    Ok(())
}

/// 1-edges become arrows in the same direction, 2-edges are reversed, and
/// relations are the composable pairs with different labels.
pub fn to_fringed_quiver(g: &FramedGraph) -> Result<(FringedQuiver, Pairing)> {
    require_gentle(g)?;
    let vertices: Vec<(String, bool)> = g.vertices.iter().map(|(v, k)| (v.clone(), *k != Kind::Internal)).collect();
    let arrows: Vec<Arrow> = g
        .edges
        .iter()
        .map(|e| if e.label == 1 { Arrow::new(&e.id, &e.tail, &e.head) } else { Arrow::new(&e.id, &e.head, &e.tail) })
        .collect();
    let mut relations = Vec::new();
    for (v, (_, kind)) in g.vertices.iter().enumerate() {
        if *kind != Kind::Internal {
            continue;
        }
        // arrows into v: 1-edges entering and 2-edges leaving
        let into: Vec<usize> = g.ins[v].iter().chain(&g.outs[v]).copied().filter(|&e| (g.head[e] == v) == (g.label(e) == 1)).collect();
        let out: Vec<usize> = g.ins[v].iter().chain(&g.outs[v]).copied().filter(|e| !into.contains(e)).collect();
        for &a in &into {
            for &b in &out {
                if g.label(a) != g.label(b) {
                    relations.push((g.edges[a].id.clone(), g.edges[b].id.clone()));
                }
            }
        }
    }
    let q = FringedQuiver::new(vertices, arrows, relations)?;
    let labels = (0..q.n_arrows()).map(|a| g.label(g.edge_index(q.arrow_id(a)).unwrap())).collect();
    Ok((q, Pairing { labels }))
}

/// The directed flow-graph of a paired fringed quiver.
pub fn from_paired(q: &FringedQuiver, psi: &Pairing) -> Result<FramedGraph> {
    if psi.labels.len() != q.n_arrows() || !psi.is_valid(q) {
        return Err(Error::NotPaired);
    }
    let edges: Vec<Edge> = (0..q.n_arrows())
        .map(|a| {
            let ar = &q.arrows()[a];
            let label = psi.label(a);
            let (t, h) = if label == 1 { (&ar.tail, &ar.head) } else { (&ar.head, &ar.tail) };
            Edge { id: ar.id.clone(), tail: t.clone(), head: h.clone(), label }
        })
        .collect();
    let vertices = (0..q.n_vertices())
        .map(|v| {
            let name = q.vertex_id(v).to_string();
            if !q.is_fringe(v) {
                return (name, Kind::Internal);
            }
            let leaves = edges.iter().any(|e| e.tail == name);
            (name, if leaves { Kind::Source } else { Kind::Sink })
        })
        .collect();
    FramedGraph::new(vertices, edges)
}

/// [`from_paired`] with the canonical pairing.
pub fn from_quiver(q: &FringedQuiver) -> Result<FramedGraph> {
    let psi = q.find_pairing().ok_or(Error::NotPaired)?;
    from_paired(q, &psi)
}

/// Nonnegative and conserving at internal vertices.
pub fn check_dag_flow(g: &FramedGraph, f: &[Q]) -> Result<()> {
    if f.len() != g.n_edges() {
        return Err(Error::InvalidFlow(format!("expected {} values", g.n_edges())));
    }
    if let Some(e) = f.iter().position(|x| x.is_negative()) {
        return Err(Error::InvalidFlow(format!("negative value on {}", g.edges[e].id)));
    }
    for (v, (name, kind)) in g.vertices.iter().enumerate() {
        if *kind != Kind::Internal {
            continue;
        }
        let sum = |es: &[usize]| es.iter().map(|&e| f[e].clone()).sum::<Q>();
        if sum(&g.ins[v]) != sum(&g.outs[v]) {
            return Err(Error::InvalidFlow(format!("not conserved at {name}")));
        }
    }
    Ok(())
}

pub fn dag_flow_from_json(g: &FramedGraph, text: &str) -> Result<Vec<Q>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::InvalidFlow(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| Error::InvalidFlow("expected a JSON object".into()))?;
    let mut f = vec![Q::zero(); g.n_edges()];
    for (k, x) in obj {
        let e = g.edge_index(k)?;
        f[e] = match x {
            Value::String(s) => parse_q(s)?,
            Value::Number(n) => parse_q(&n.to_string())?,
            _ => return Err(Error::InvalidFlow(format!("bad value for `{k}`"))),
        };
    }
    check_dag_flow(g, &f)?;
    Ok(f)
}

/// One step of the forward map at `h(e)`: the next edge and the constraint
/// on the current coordinate `c` that selects it.
struct Step {
    next: usize,
    value: Q,
    threshold: Q,
    below: bool,
}

fn dag_step(g: &FramedGraph, f: &[Q], e: usize, c: &Q) -> Result<Step> {
    let v = g.head[e];
    let pick = |es: &[usize], l: u8| es.iter().copied().find(|&x| g.label(x) == l);
    let (b1, b2) = match (pick(&g.outs[v], 1), pick(&g.outs[v], 2)) {
        (Some(b1), Some(b2)) => (b1, b2),
        _ => return Err(bad(format!("vertex {} is not framed", g.vertices[v].0))),
    };
    let shift = if g.label(e) == 1 {
        Q::zero()
    } else {
        let a1 = pick(&g.ins[v], 1).ok_or_else(|| bad(format!("vertex {} is not framed", g.vertices[v].0)))?;
        f[a1].clone()
    };
    let x = c + &shift;
    let below = if g.label(e) == 1 { x <= f[b1] } else { x < f[b1] };
    let threshold = &f[b1] - &shift;
    Ok(if below {
        Step { next: b1, value: x, threshold, below }
    } else {
        Step { next: b2, value: x - &f[b1], threshold, below }
    })
}

/// Follows `(e, c)` to a sink. Returns the route and the interval of start
/// values on the source edge that produce the same route.
fn dag_walk(g: &FramedGraph, f: &[Q], s: usize, c: &Q) -> Result<(Vec<usize>, Q, Q)> {
    let mut route = vec![s];
    let (mut lo, mut hi) = (Q::zero(), f[s].clone());
    let (mut e, mut x, mut k) = (s, c.clone(), Q::zero());
    while g.kind(g.head[e]) != Kind::Sink {
        if route.len() > g.n_edges() {
            return Err(Error::Decomposition(format!("walk from {} does not reach a sink", g.edges[s].id)));
        }
        let st = dag_step(g, f, e, &x)?;
        // x = c + k, so the branch test is c <= threshold - k
        let t = &st.threshold - &k;
        if st.below {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
        k = &st.value - c;
        x = st.value;
        e = st.next;
        route.push(e);
    }
    Ok((route, lo, hi))
}

fn sweep_source(g: &FramedGraph, f: &[Q], s: usize) -> Result<Vec<(Vec<usize>, Q)>> {
    let mut out = Vec::new();
    if f[s].is_zero() {
        return Ok(out);
    }
    let two = Q::from_integer(2.into());
    let mut todo = vec![(Q::zero(), f[s].clone())];
    while let Some((lo, hi)) = todo.pop() {
        let mid = (&lo + &hi) / &two;
        let (route, a, b) = dag_walk(g, f, s, &mid)?;
        let (a, b) = (a.max(lo.clone()), b.min(hi.clone()));
        if a >= b {
            todo.push((lo, mid.clone()));
            todo.push((mid, hi));
            continue;
        }
        if a > lo {
            todo.push((lo, a.clone()));
        }
        if b < hi {
            todo.push((b.clone(), hi));
        }
        out.push((route, b - a));
    }
    Ok(out)
}

/// Routes and bands as edge sequences with their coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DagCombination {
    pub routes: BTreeMap<Vec<usize>, Q>,
    pub bands: BTreeMap<Vec<usize>, Q>,
}

impl DagCombination {
    pub fn flow(&self, g: &FramedGraph) -> Vec<Q> {
        let mut f = vec![Q::zero(); g.n_edges()];
        for (p, c) in self.routes.iter().chain(&self.bands) {
            for &e in p {
                f[e] += c;
            }
        }
        f
    }

    pub fn to_json(&self, g: &FramedGraph) -> Value {
        let list = |m: &BTreeMap<Vec<usize>, Q>| -> Value {
            m.iter().map(|(p, c)| json!({ "trail": g.format_path(p), "coeff": fmt_q(c) })).collect()
        };
        json!({ "routes": list(&self.routes), "bands": list(&self.bands) })
    }
}

/// Decomposes a conserving flow on a framed DAG by sweeping every source edge
/// with the forward map. Graphs with oriented cycles go through the fringed
/// quiver instead, which also recovers the band part.
pub fn dag_decompose(g: &FramedGraph, f: &[Q]) -> Result<DagCombination> {
    check_dag_flow(g, f)?;
    if !g.is_acyclic() {
        return bridge_decompose(g, f);
    }
    let starts: Vec<usize> = (0..g.n_edges()).filter(|&e| g.kind(g.tail[e]) == Kind::Source).collect();
    let per = par::map(&starts, |&s| sweep_source(g, f, s));
    let mut routes: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
    for r in per {
        for (p, c) in r? {
            *routes.entry(p).or_insert_with(Q::zero) += c;
        }
    }
    let d = DagCombination { routes, bands: BTreeMap::new() };
    if d.flow(g) != f {
        return Err(Error::Decomposition("coefficients do not reproduce the flow".into()));
    }
    Ok(d)
}

/// The edge sequence of a trail of `to_fringed_quiver(g)`, read along the edge directions.
pub fn trail_to_path(g: &FramedGraph, q: &FringedQuiver, t: &Trail) -> Result<Vec<usize>> {
    let fwd: Vec<bool> = t.word.iter().map(|x| x.inv == (g.label(x.arrow) == 2)).collect();
    let mut p: Vec<usize> = t.word.iter().map(|x| g.edge_index(q.arrow_id(x.arrow))).collect::<Result<_>>()?;
    if fwd.iter().all(|&b| !b) {
        p.reverse();
    } else if !fwd.iter().all(|&b| b) {
        return Err(Error::Decomposition("trail is not a directed path".into()));
    }
    if t.band {
        let n = p.len();
        p = (0..n).map(|r| p[r..].iter().chain(&p[..r]).copied().collect::<Vec<_>>()).min().unwrap();
    }
    Ok(p)
}

fn bridge_decompose(g: &FramedGraph, f: &[Q]) -> Result<DagCombination> {
    let (q, _) = to_fringed_quiver(g)?;
    let values = (0..q.n_arrows()).map(|a| Ok(f[g.edge_index(q.arrow_id(a))?].clone())).collect::<Result<Vec<Q>>>()?;
    let b = decompose_bundle(&q, &Flow::new(&q, values)?)?;
    let mut d = DagCombination::default();
    for (t, c) in b.routes() {
        d.routes.insert(trail_to_path(g, &q, t)?, c.clone());
    }
    for (t, c) in b.bands() {
        d.bands.insert(trail_to_path(g, &q, t)?, c.clone());
    }
    Ok(d)
}
