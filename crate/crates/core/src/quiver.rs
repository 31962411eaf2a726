//! Gentle bound quivers, fringed quivers and pairings.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Arrow {
    pub id: String,
    pub tail: String,
    pub head: String,
}

impl Arrow {
    pub fn new(id: &str, tail: &str, head: &str) -> Self {
        Arrow { id: id.into(), tail: tail.into(), head: head.into() }
    }
}

/// A bound quiver with length-two monomial relations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GentleQuiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub at: String,
}

fn violation(axiom: &str, at: &str) -> Violation {
    Violation { axiom: axiom.into(), at: at.into() }
}

impl GentleQuiver {
    fn arrow_map(&self) -> Result<HashMap<&str, &Arrow>> {
        let mut vs = HashSet::new();
        for v in &self.vertices {
            if !vs.insert(v.as_str()) {
                return Err(Error::Duplicate(v.clone()));
            }
        }
        let mut map = HashMap::new();
        for a in &self.arrows {
            if vs.contains(a.id.as_str()) || map.insert(a.id.as_str(), a).is_some() {
                return Err(Error::Duplicate(a.id.clone()));
            }
            for v in [&a.tail, &a.head] {
                if !vs.contains(v.as_str()) {
                    return Err(Error::Dangling { arrow: a.id.clone(), vertex: v.clone() });
                }
            }
        }
        let mut seen = HashSet::new();
        for (a, b) in &self.relations {
            let x = map.get(a.as_str()).ok_or_else(|| Error::UnknownArrow(a.clone()))?;
            let y = map.get(b.as_str()).ok_or_else(|| Error::UnknownArrow(b.clone()))?;
            if x.head != y.tail {
                return Err(Error::NotComposable(a.clone(), b.clone()));
            }
            if !seen.insert((a, b)) {
                return Err(Error::Duplicate(format!("{a} {b}")));
            }
        }
        Ok(map)
    }

    /// Every violated gentle axiom. Structural problems are returned as `Err`.
    pub fn validate_gentle(&self) -> Result<Vec<Violation>> {
        self.arrow_map()?;
        let rel: HashSet<(&str, &str)> =
            self.relations.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let mut out = Vec::new();
        for v in &self.vertices {
            let indeg = self.arrows.iter().filter(|a| &a.head == v).count();
            let outdeg = self.arrows.iter().filter(|a| &a.tail == v).count();
            if indeg > 2 {
                out.push(violation("in-degree exceeds 2", v));
            }
            if outdeg > 2 {
                out.push(violation("out-degree exceeds 2", v));
            }
        }
        for a in &self.arrows {
            let after: Vec<&Arrow> = self.arrows.iter().filter(|b| b.tail == a.head).collect();
            let before: Vec<&Arrow> = self.arrows.iter().filter(|c| c.head == a.tail).collect();
            let str_after = after.iter().filter(|b| !rel.contains(&(a.id.as_str(), b.id.as_str()))).count();
            let rel_after = after.len() - str_after;
            let str_before = before.iter().filter(|c| !rel.contains(&(c.id.as_str(), a.id.as_str()))).count();
            let rel_before = before.len() - str_before;
            if str_after > 1 {
                out.push(violation("two string successors", &a.id));
            }
            if str_before > 1 {
                out.push(violation("two string predecessors", &a.id));
            }
            if rel_after > 1 {
                out.push(violation("two relation successors", &a.id));
            }
            if rel_before > 1 {
                out.push(violation("two relation predecessors", &a.id));
            }
        }
        // relation-free oriented cycles: cycles in the arrow graph a -> b, h(a)=t(b), ab not a relation
        let ids: Vec<&str> = self.arrows.iter().map(|a| a.id.as_str()).collect();
        let idx: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let succ: Vec<Vec<usize>> = self
            .arrows
            .iter()
            .map(|a| {
                self.arrows
                    .iter()
                    .filter(|b| b.tail == a.head && !rel.contains(&(a.id.as_str(), b.id.as_str())))
                    .map(|b| idx[b.id.as_str()])
                    .collect()
            })
            .collect();
        if let Some(i) = find_cycle(&succ) {
            out.push(violation("oriented relation-free cycle", &self.arrows[i].id));
        }
        Ok(out)
    }

    /// Completes every vertex to in- and out-degree two with fresh fringe arrows.
    pub fn fringe(&self) -> Result<FringedQuiver> {
        let viol = self.validate_gentle()?;
        if !viol.is_empty() {
            let msg: Vec<String> = viol.iter().map(|v| format!("{} at {}", v.axiom, v.at)).collect();
            return Err(Error::NotGentle(msg.join("; ")));
        }
        let rel: HashSet<(String, String)> = self.relations.iter().cloned().collect();
        let mut vertices: Vec<(String, bool)> = self.vertices.iter().map(|v| (v.clone(), false)).collect();
        let mut arrows = self.arrows.clone();
        let mut relations: Vec<(String, String)> = Vec::new();
        for v in &self.vertices {
            let mut ins: Vec<String> = self.arrows.iter().filter(|a| &a.head == v).map(|a| a.id.clone()).collect();
            let mut outs: Vec<String> = self.arrows.iter().filter(|a| &a.tail == v).map(|a| a.id.clone()).collect();
            ins.sort();
            outs.sort();
            let n_in = ins.len();
            for k in 1..=(2 - n_in) {
                let fv = format!("{v}!in{k}");
                let id = format!("{v}#i{k}");
                vertices.push((fv.clone(), true));
                arrows.push(Arrow::new(&id, &fv, v));
                ins.push(id);
            }
            let n_out = outs.len();
            for k in 1..=(2 - n_out) {
                let fv = format!("{v}!out{k}");
                let id = format!("{v}#o{k}");
                vertices.push((fv.clone(), true));
                arrows.push(Arrow::new(&id, v, &fv));
                outs.push(id);
            }
            let m1 = [(ins[0].clone(), outs[0].clone()), (ins[1].clone(), outs[1].clone())];
            let m2 = [(ins[0].clone(), outs[1].clone()), (ins[1].clone(), outs[0].clone())];
            let ok = |m: &[(String, String); 2]| {
                let inside = |pair: &(String, String)| m.contains(pair);
                let pairs_here = self
                    .arrows
                    .iter()
                    .filter(|a| &a.head == v)
                    .flat_map(|a| self.arrows.iter().filter(|b| &b.tail == v).map(move |b| (a.id.clone(), b.id.clone())));
                pairs_here.into_iter().all(|p| inside(&p) == rel.contains(&p))
            };
            let chosen = if ok(&m1) {
                m1
            } else if ok(&m2) {
                m2
            } else {
                return Err(Error::NotGentle(format!("cannot complete relations at {v}")));
            };
            relations.extend(chosen);
        }
        FringedQuiver::new(vertices, arrows, relations)
    }
}

/// Some node on a directed cycle, if any.
pub(crate) fn find_cycle(succ: &[Vec<usize>]) -> Option<usize> {
    let n = succ.len();
    let mut state = vec![0u8; n];
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        state[s] = 1;
        while let Some(&mut (u, ref mut k)) = stack.last_mut() {
            if *k < succ[u].len() {
                let w = succ[u][*k];
                *k += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return Some(w),
                    _ => {}
                }
            } else {
                state[u] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// A signed arrow. Orders by arrow index, then `+` before `-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Sa {
    pub arrow: usize,
    pub inv: bool,
}

impl Sa {
    pub fn pos(arrow: usize) -> Self {
        Sa { arrow, inv: false }
    }
    pub fn neg(arrow: usize) -> Self {
        Sa { arrow, inv: true }
    }
    pub fn inverse(self) -> Self {
        Sa { arrow: self.arrow, inv: !self.inv }
    }
    pub fn sign(self) -> i32 {
        if self.inv {
            -1
        } else {
            1
        }
    }
    pub fn index(self) -> usize {
        2 * self.arrow + self.inv as usize
    }
}

/// A gentle quiver whose internal vertices all have in- and out-degree two.
#[derive(Debug, Clone)]
pub struct FringedQuiver {
    vertices: Vec<String>,
    fringe: Vec<bool>,
    arrows: Vec<Arrow>,
    tail: Vec<usize>,
    head: Vec<usize>,
    relations: BTreeSet<(usize, usize)>,
    vindex: HashMap<String, usize>,
    aindex: HashMap<String, usize>,
    internal: Vec<usize>,
    int_pos: Vec<Option<usize>>,
    ins: Vec<Vec<usize>>,
    outs: Vec<Vec<usize>>,
    next: Vec<Vec<Sa>>,
}

impl PartialEq for FringedQuiver {
    fn eq(&self, o: &Self) -> bool {
        self.vertices == o.vertices && self.fringe == o.fringe && self.arrows == o.arrows && self.relations == o.relations
    }
}

impl FringedQuiver {
    /// `vertices` carries a fringe flag per vertex. Arrows are reindexed in id order.
    pub fn new(vertices: Vec<(String, bool)>, mut arrows: Vec<Arrow>, relations: Vec<(String, String)>) -> Result<Self> {
        let base = GentleQuiver {
            vertices: vertices.iter().map(|v| v.0.clone()).collect(),
            arrows: arrows.clone(),
            relations: relations.clone(),
        };
        base.arrow_map()?;
        arrows.sort_by(|a, b| a.id.cmp(&b.id));
        let vindex: HashMap<String, usize> = vertices.iter().enumerate().map(|(i, v)| (v.0.clone(), i)).collect();
        let aindex: HashMap<String, usize> = arrows.iter().enumerate().map(|(i, a)| (a.id.clone(), i)).collect();
        let tail: Vec<usize> = arrows.iter().map(|a| vindex[&a.tail]).collect();
        let head: Vec<usize> = arrows.iter().map(|a| vindex[&a.head]).collect();
        let fringe: Vec<bool> = vertices.iter().map(|v| v.1).collect();
        let nv = vertices.len();
        let mut ins = vec![Vec::new(); nv];
        let mut outs = vec![Vec::new(); nv];
        for i in 0..arrows.len() {
            ins[head[i]].push(i);
            outs[tail[i]].push(i);
        }
        let mut internal = Vec::new();
        let mut int_pos = vec![None; nv];
        for v in 0..nv {
            let name = &vertices[v].0;
            if fringe[v] {
                if ins[v].len() + outs[v].len() != 1 {
                    return Err(Error::NotFringed(format!("fringe vertex {name} must meet exactly one arrow")));
                }
            } else {
                if ins[v].len() != 2 || outs[v].len() != 2 {
                    return Err(Error::NotFringed(format!("internal vertex {name} needs in- and out-degree 2")));
                }
                int_pos[v] = Some(internal.len());
                internal.push(v);
            }
        }
        let mut rel = BTreeSet::new();
        for (a, b) in &relations {
            let (x, y) = (aindex[a], aindex[b]);
            if fringe[head[x]] {
                return Err(Error::NotComposable(a.clone(), b.clone()));
            }
            rel.insert((x, y));
        }
        for &v in &internal {
            for &a in &ins[v] {
                let k = outs[v].iter().filter(|&&b| rel.contains(&(a, b))).count();
                if k != 1 {
                    return Err(Error::NotFringed(format!("arrow {} needs exactly one relation at {}", arrows[a].id, vertices[v].0)));
                }
            }
            for &b in &outs[v] {
                let k = ins[v].iter().filter(|&&a| rel.contains(&(a, b))).count();
                if k != 1 {
                    return Err(Error::NotFringed(format!("arrow {} needs exactly one relation at {}", arrows[b].id, vertices[v].0)));
                }
            }
        }
        let mut q = FringedQuiver {
            vertices: vertices.into_iter().map(|v| v.0).collect(),
            fringe,
            arrows,
            tail,
            head,
            relations: rel,
            vindex,
            aindex,
            internal,
            int_pos,
            ins,
            outs,
            next: Vec::new(),
        };
        let n = q.arrows.len();
        let mut next = vec![Vec::new(); 2 * n];
        for x in q.signed_arrows() {
            for y in q.signed_arrows() {
                if q.follows(x, y) {
                    next[x.index()].push(y);
                }
            }
        }
        q.next = next;
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|a| q.outs[q.head[a]].iter().copied().filter(|&b| !q.fringe[q.head[a]] && !q.relations.contains(&(a, b))).collect())
            .collect();
        if let Some(a) = find_cycle(&succ) {
            return Err(Error::NotGentle(format!("oriented relation-free cycle through {}", q.arrows[a].id)));
        }
        Ok(q)
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }
    pub fn arrow_id(&self, a: usize) -> &str {
        &self.arrows[a].id
    }
    pub fn arrow_index(&self, id: &str) -> Result<usize> {
        self.aindex.get(id).copied().ok_or_else(|| Error::UnknownArrow(id.into()))
    }
    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }
    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vindex.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.into()))
    }
    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }
    pub fn is_fringe(&self, v: usize) -> bool {
        self.fringe[v]
    }
    pub fn tail(&self, a: usize) -> usize {
        self.tail[a]
    }
    pub fn head(&self, a: usize) -> usize {
        self.head[a]
    }
    /// Internal vertices in declaration order; g-vectors are indexed this way.
    pub fn internal(&self) -> &[usize] {
        &self.internal
    }
    pub fn n_internal(&self) -> usize {
        self.internal.len()
    }
    pub fn internal_pos(&self, v: usize) -> Option<usize> {
        self.int_pos[v]
    }
    pub fn ins(&self, v: usize) -> &[usize] {
        &self.ins[v]
    }
    pub fn outs(&self, v: usize) -> &[usize] {
        &self.outs[v]
    }
    pub fn is_relation(&self, a: usize, b: usize) -> bool {
        self.relations.contains(&(a, b))
    }
    pub fn relations(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.relations.iter().copied()
    }
    pub fn is_internal_arrow(&self, a: usize) -> bool {
        !self.fringe[self.tail[a]] && !self.fringe[self.head[a]]
    }
    pub fn n_internal_arrows(&self) -> usize {
        (0..self.n_arrows()).filter(|&a| self.is_internal_arrow(a)).count()
    }
    pub fn is_fringe_arrow(&self, a: usize) -> bool {
        !self.is_internal_arrow(a)
    }
    /// Number of straight routes, `2|V_int| - |E_int|`.
    pub fn n_straight(&self) -> usize {
        2 * self.n_internal() - self.n_internal_arrows()
    }

    pub fn signed_arrows(&self) -> impl Iterator<Item = Sa> {
        (0..self.arrows.len()).flat_map(|a| [Sa::pos(a), Sa::neg(a)])
    }
    pub fn src(&self, x: Sa) -> usize {
        if x.inv {
            self.head[x.arrow]
        } else {
            self.tail[x.arrow]
        }
    }
    pub fn dst(&self, x: Sa) -> usize {
        if x.inv {
            self.tail[x.arrow]
        } else {
            self.head[x.arrow]
        }
    }

    /// Whether `x y` is a string of length two.
    pub fn follows(&self, x: Sa, y: Sa) -> bool {
        let v = self.dst(x);
        if v != self.src(y) || self.fringe[v] {
            return false;
        }
        match (x.inv, y.inv) {
            (false, false) => !self.is_relation(x.arrow, y.arrow),
            (true, true) => !self.is_relation(y.arrow, x.arrow),
            _ => x.arrow != y.arrow,
        }
    }

    /// The signed arrows that may follow `x` in a string.
    pub fn continuations(&self, x: Sa) -> &[Sa] {
        &self.next[x.index()]
    }

    /// Signed arrows leaving a fringe vertex: every route starts with one of these.
    pub fn start_tokens(&self) -> Vec<Sa> {
        self.signed_arrows().filter(|&x| self.fringe[self.src(x)]).collect()
    }

    /// The unique arrow `b` with `ab` a string, when `h(a)` is internal.
    pub fn string_after(&self, a: usize) -> Option<usize> {
        let v = self.head[a];
        if self.fringe[v] {
            return None;
        }
        self.outs[v].iter().copied().find(|&b| !self.is_relation(a, b))
    }
    /// The unique arrow `b` with `ab` a relation.
    pub fn relation_after(&self, a: usize) -> Option<usize> {
        let v = self.head[a];
        if self.fringe[v] {
            return None;
        }
        self.outs[v].iter().copied().find(|&b| self.is_relation(a, b))
    }
    pub fn string_before(&self, b: usize) -> Option<usize> {
        let v = self.tail[b];
        if self.fringe[v] {
            return None;
        }
        self.ins[v].iter().copied().find(|&a| !self.is_relation(a, b))
    }
    pub fn relation_before(&self, b: usize) -> Option<usize> {
        let v = self.tail[b];
        if self.fringe[v] {
            return None;
        }
        self.ins[v].iter().copied().find(|&a| self.is_relation(a, b))
    }

    /// True iff no band exists, i.e. the transition graph is acyclic.
    pub fn is_representation_finite(&self) -> bool {
        let succ: Vec<Vec<usize>> = (0..2 * self.n_arrows())
            .map(|i| self.next[i].iter().map(|y| y.index()).collect())
            .collect();
        find_cycle(&succ).is_none()
    }

    /// Canonical pairing, or `None` when the quiver is not paired.
    pub fn find_pairing(&self) -> Option<Pairing> {
        let n = self.n_arrows();
        // (neighbour, same label?)
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
        for &v in &self.internal {
            for &a in &self.ins[v] {
                for &b in &self.outs[v] {
                    let same = !self.is_relation(a, b);
                    adj[a].push((b, same));
                    adj[b].push((a, same));
                }
            }
        }
        let mut label = vec![0u8; n];
        for s in 0..n {
            if label[s] != 0 {
                continue;
            }
            label[s] = 1;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(w, same) in &adj[u] {
                    let want = if same { label[u] } else { 3 - label[u] };
                    if label[w] == 0 {
                        label[w] = want;
                        queue.push_back(w);
                    } else if label[w] != want {
                        return None;
                    }
                }
            }
        }
        Some(Pairing { labels: label })
    }

    /// The straight routes, one per fringe arrow entering the quiver.
    pub fn straight_routes(&self) -> Vec<Vec<Sa>> {
        let mut out = Vec::new();
        for a in 0..self.n_arrows() {
            if !self.fringe[self.tail[a]] {
                continue;
            }
            let mut w = vec![Sa::pos(a)];
            let mut cur = a;
            while let Some(b) = self.string_after(cur) {
                w.push(Sa::pos(b));
                cur = b;
            }
            out.push(w);
        }
        out
    }

    /// Serialize in the line-oriented quiver format with the `fringed` marker.
    pub fn to_text(&self) -> String {
        let mut s = String::from("fringed\n");
        for (v, name) in self.vertices.iter().enumerate() {
            if self.fringe[v] {
                s += &format!("fringe-vertex {name}\n");
            } else {
                s += &format!("vertex {name}\n");
            }
        }
        for a in &self.arrows {
            s += &format!("arrow {}: {} -> {}\n", a.id, a.tail, a.head);
        }
        for &(a, b) in &self.relations {
            s += &format!("relation {} {}\n", self.arrows[a].id, self.arrows[b].id);
        }
        s
    }
}

/// A labelling `ψ: E -> {1,2}` with `ab` a relation iff `ψ(a) != ψ(b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub labels: Vec<u8>,
}

impl Pairing {
    pub fn label(&self, a: usize) -> u8 {
        self.labels[a]
    }
    pub fn swapped(&self) -> Pairing {
        Pairing { labels: self.labels.iter().map(|l| 3 - l).collect() }
    }
    pub fn is_valid(&self, q: &FringedQuiver) -> bool {
        q.internal().iter().all(|&v| {
            q.ins(v).iter().all(|&a| q.outs(v).iter().all(|&b| q.is_relation(a, b) == (self.labels[a] != self.labels[b])))
        })
    }
}
