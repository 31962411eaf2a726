//! Turbulence polyhedra, the map to g-vector space, closed and crooked arrow
//! sets, face and facet half-spaces, and clique cells.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flows::{indicator, Flow};
use crate::quiver::{FringedQuiver, Sa};
use crate::rational::{fmt_q, half, Q};
use crate::trails::{elementary_bands, elementary_routes, format_trail, g_vector, Trail};

/// Vertices plus recession-ray generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub vertices: Vec<(Trail, Vec<Q>)>,
    pub rays: Vec<(Trail, Vec<Q>)>,
    pub ambient: usize,
    pub dimension: usize,
}

impl Presentation {
    pub fn to_json(&self, q: &FringedQuiver) -> Value {
        let list = |xs: &[(Trail, Vec<Q>)]| -> Value {
            xs.iter()
                .map(|(t, v)| json!({ "trail": format_trail(q, t), "vector": v.iter().map(fmt_q).collect::<Vec<_>>() }))
                .collect()
        };
        json!({
            "ambient": self.ambient,
            "dimension": self.dimension,
            "vertices": list(&self.vertices),
            "rays": list(&self.rays),
        })
    }
}

/// `|E| - |V_int| - 1`.
pub fn turbulence_dimension(q: &FringedQuiver) -> usize {
    q.n_arrows() - q.n_internal() - 1
}

fn to_q(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_integer(x.into())).collect()
}

/// Indicators of elementary routes and bands.
pub fn turbulence_presentation(q: &FringedQuiver) -> Presentation {
    let ind = |t: Trail| {
        let v = indicator(q, &t).values().to_vec();
        (t, v)
    };
    Presentation {
        vertices: elementary_routes(q).into_iter().map(ind).collect(),
        rays: elementary_bands(q).into_iter().map(ind).collect(),
        ambient: q.n_arrows(),
        dimension: turbulence_dimension(q),
    }
}

/// Linear map `e_a -> (e_t(a) - e_h(a)) / 2` onto internal vertices.
pub fn phi(q: &FringedQuiver, v: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); q.n_internal()];
    for (a, x) in v.iter().enumerate() {
        if let Some(t) = q.internal_pos(q.tail(a)) {
            out[t] += x * half();
        }
        if let Some(h) = q.internal_pos(q.head(a)) {
            out[h] -= x * half();
        }
    }
    out
}

pub fn phi_flow(q: &FringedQuiver, f: &Flow) -> Vec<Q> {
    phi(q, f.values())
}

/// g-vectors of elementary bending routes and elementary bands.
pub fn g_polyhedron_presentation(q: &FringedQuiver) -> Presentation {
    let g = |t: Trail| {
        let v = to_q(&g_vector(q, &t));
        (t, v)
    };
    Presentation {
        vertices: elementary_routes(q).into_iter().filter(|t| t.is_bending()).map(g).collect(),
        rays: elementary_bands(q).into_iter().map(g).collect(),
        ambient: q.n_internal(),
        dimension: q.n_internal(),
    }
}

fn restricted_graph(q: &FringedQuiver, w: &[bool]) -> Vec<Vec<usize>> {
    (0..2 * q.n_arrows())
        .map(|i| {
            let x = Sa { arrow: i / 2, inv: i % 2 == 1 };
            if w[x.arrow] {
                return Vec::new();
            }
            q.continuations(x).iter().filter(|y| !w[y.arrow]).map(|y| y.index()).collect()
        })
        .collect()
}

fn reach(succ: &[Vec<usize>], from: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack: Vec<usize> = from.into_iter().collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in &succ[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// For each arrow outside `w`: does it lie on a `w`-avoiding trail? Also whether a
/// `w`-avoiding route exists.
fn coverage(q: &FringedQuiver, w: &[bool]) -> (Vec<bool>, bool) {
    let succ = restricted_graph(q, w);
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for (u, vs) in succ.iter().enumerate() {
        for &v in vs {
            pred[v].push(u);
        }
    }
    let tok = |x: Sa| x.index();
    let starts: Vec<usize> = q.start_tokens().into_iter().filter(|x| !w[x.arrow]).map(tok).collect();
    let ends: Vec<usize> =
        q.signed_arrows().filter(|x| !w[x.arrow] && q.is_fringe(q.dst(*x))).map(tok).collect();
    let fw = reach(&succ, starts);
    let bw = reach(&pred, ends);
    let has_route = (0..n).any(|i| fw[i] && bw[i]);
    // tokens on a cycle: strongly connected to themselves
    let on_cycle: Vec<bool> = (0..n).map(|i| succ[i].iter().any(|&j| reach(&succ, [j])[i])).collect();
    let covered = (0..q.n_arrows())
        .map(|a| {
            let i = Sa::pos(a).index();
            !w[a] && ((fw[i] && bw[i]) || on_cycle[i])
        })
        .collect();
    (covered, has_route)
}

fn mask(q: &FringedQuiver, w: &[usize]) -> Vec<bool> {
    let mut m = vec![false; q.n_arrows()];
    for &a in w {
        m[a] = true;
    }
    m
}

/// Some unit flow vanishes exactly on `w`.
pub fn is_closed(q: &FringedQuiver, w: &[usize]) -> bool {
    let m = mask(q, w);
    if m.iter().all(|&x| x) {
        return false;
    }
    let (cov, route) = coverage(q, &m);
    route && (0..q.n_arrows()).all(|a| m[a] || cov[a])
}

/// Smallest closed superset of `w`; all arrows when no unit flow vanishes on `w`.
pub fn closure(q: &FringedQuiver, w: &[usize]) -> Vec<usize> {
    let mut m = mask(q, w);
    loop {
        let (cov, route) = coverage(q, &m);
        if !route {
            return (0..q.n_arrows()).collect();
        }
        let forced: Vec<usize> = (0..q.n_arrows()).filter(|&a| !m[a] && !cov[a]).collect();
        if forced.is_empty() {
            return (0..q.n_arrows()).filter(|&a| m[a]).collect();
        }
        for a in forced {
            m[a] = true;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crookedness {
    NotCrooked,
    Crooked,
    BarelyCrooked,
}

impl fmt::Display for Crookedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Crookedness::NotCrooked => "not-crooked",
            Crookedness::Crooked => "crooked",
            Crookedness::BarelyCrooked => "barely-crooked",
        })
    }
}

pub fn crookedness(q: &FringedQuiver, w: &[usize]) -> Result<Crookedness> {
    if !is_closed(q, w) {
        return Err(Error::BadArrowSet("closed"));
    }
    let m = mask(q, w);
    let counts: Vec<usize> =
        q.straight_routes().iter().map(|s| s.iter().filter(|x| m[x.arrow]).count()).collect();
    Ok(if counts.contains(&0) {
        Crookedness::NotCrooked
    } else if counts.iter().all(|&c| c == 1) {
        Crookedness::BarelyCrooked
    } else {
        Crookedness::Crooked
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    S,
    T,
}

/// `coeffs . x  rel  rhs` over the internal vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    pub coeffs: Vec<Q>,
    pub rel: Rel,
    pub rhs: Q,
    pub form: Form,
}

impl HalfSpace {
    pub fn eval(&self, x: &[Q]) -> Q {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }
    pub fn satisfied(&self, x: &[Q]) -> bool {
        let v = self.eval(x);
        match self.rel {
            Rel::Le => v <= self.rhs,
            Rel::Ge => v >= self.rhs,
        }
    }
    /// Whether the direction `r` stays inside.
    pub fn recedes(&self, r: &[Q]) -> bool {
        let v = self.eval(r);
        match self.rel {
            Rel::Le => !v.is_positive(),
            Rel::Ge => !v.is_negative(),
        }
    }
    pub fn negated(&self) -> HalfSpace {
        HalfSpace {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            rel: if self.rel == Rel::Le { Rel::Ge } else { Rel::Le },
            rhs: -&self.rhs,
            form: if self.form == Form::S { Form::T } else { Form::S },
        }
    }

    pub fn render(&self, q: &FringedQuiver) -> String {
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = q.vertex_id(q.internal()[k]);
            let mag = c.abs();
            let m = if mag.is_one() { String::new() } else { fmt_q(&mag) };
            let sign = match (s.is_empty(), c.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            s.push_str(&format!("{sign}{m}x({name})"));
        }
        if s.is_empty() {
            s.push('0');
        }
        let r = if self.rel == Rel::Le { "<=" } else { ">=" };
        format!("{s} {r} {}", fmt_q(&self.rhs))
    }

    pub fn to_json(&self, q: &FringedQuiver) -> Value {
        json!({
            "form": if self.form == Form::S { "S" } else { "T" },
            "coeffs": self.coeffs.iter().map(fmt_q).collect::<Vec<_>>(),
            "rel": if self.rel == Rel::Le { "<=" } else { ">=" },
            "rhs": fmt_q(&self.rhs),
            "text": self.render(q),
        })
    }
}

/// `S_v` for every internal vertex.
pub fn s_coefficients(q: &FringedQuiver, w: &[usize]) -> Vec<Q> {
    let m = mask(q, w);
    let straights = q.straight_routes();
    let mut pos = vec![(0usize, 0usize); q.n_arrows()];
    for (r, s) in straights.iter().enumerate() {
        for (i, x) in s.iter().enumerate() {
            pos[x.arrow] = (r, i);
        }
    }
    q.internal()
        .iter()
        .map(|&v| {
            q.outs(v)
                .iter()
                .map(|&g| {
                    let (r, i) = pos[g];
                    let s = &straights[r];
                    let total = s.iter().filter(|x| m[x.arrow]).count();
                    let after = s[i..].iter().filter(|x| m[x.arrow]).count();
                    if total == 0 {
                        -half()
                    } else {
                        Q::new(after.into(), total.into()) - half()
                    }
                })
                .sum()
        })
        .collect()
}

/// The face of the g-polyhedron indexed by a crooked set, as `Σ S_v x(v) >= -1`.
pub fn g_face(q: &FringedQuiver, w: &[usize]) -> Result<HalfSpace> {
    if crookedness(q, w)? == Crookedness::NotCrooked {
        return Err(Error::BadArrowSet("crooked"));
    }
    Ok(HalfSpace { coeffs: s_coefficients(q, w), rel: Rel::Ge, rhs: -Q::one(), form: Form::S })
}

/// `T_v` from the straight-route suffixes at the two out-arrows of `v`:
/// `1` when neither suffix meets `w`, `-1` when both do, `0` otherwise.
pub fn t_coefficients(q: &FringedQuiver, w: &[usize]) -> Vec<Q> {
    let m = mask(q, w);
    let suffix_hits = |g: usize| {
        let mut cur = Some(g);
        while let Some(a) = cur {
            if m[a] {
                return true;
            }
            cur = q.string_after(a);
        }
        false
    };
    q.internal()
        .iter()
        .map(|&v| {
            let hits = q.outs(v).iter().filter(|&&g| suffix_hits(g)).count();
            Q::from_integer((1 - hits as i64).into())
        })
        .collect()
}

/// Facet half-space `Σ T_v x(v) <= 1` of a barely crooked set.
pub fn g_facet(q: &FringedQuiver, w: &[usize]) -> Result<HalfSpace> {
    if crookedness(q, w)? != Crookedness::BarelyCrooked {
        return Err(Error::BadArrowSet("barely crooked"));
    }
    Ok(HalfSpace { coeffs: t_coefficients(q, w), rel: Rel::Le, rhs: Q::one(), form: Form::T })
}

/// All barely crooked arrow sets: one arrow from each straight route, then closed.
pub fn barely_crooked_sets(q: &FringedQuiver) -> Vec<Vec<usize>> {
    let straights = q.straight_routes();
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for s in &straights {
        let mut next = Vec::new();
        for w in &out {
            for x in s {
                let mut w2 = w.clone();
                w2.push(x.arrow);
                next.push(w2);
            }
        }
        out = next;
    }
    let mut out: Vec<Vec<usize>> = out
        .into_iter()
        .map(|mut w| {
            w.sort();
            w
        })
        .filter(|w| is_closed(q, w))
        .collect();
    out.sort();
    out
}

/// Indicator vectors spanning the clique simplex.
pub fn clique_cell(q: &FringedQuiver, k: &[Trail]) -> Vec<Vec<Q>> {
    k.iter().map(|t| indicator(q, t).values().to_vec()).collect()
}

pub fn determinant(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else { return Q::zero() };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            let (top, bottom) = m.split_at_mut(r);
            for (x, y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                *x -= &f * y;
            }
        }
    }
    det
}

/// `|det|` of the g-vectors of the bending routes of a maximal clique.
pub fn clique_determinant(q: &FringedQuiver, k: &[Trail]) -> Result<Q> {
    let rows: Vec<Vec<Q>> = k.iter().filter(|t| t.is_bending()).map(|t| to_q(&g_vector(q, t))).collect();
    if rows.len() != q.n_internal() {
        return Err(Error::Decomposition(format!(
            "expected {} bending routes, got {}",
            q.n_internal(),
            rows.len()
        )));
    }
    Ok(determinant(rows).abs())
}

pub fn unimodularity_check(q: &FringedQuiver, k: &[Trail]) -> bool {
    clique_determinant(q, k).is_ok_and(|d| d.is_one())
}
