//! Flows, the Forward/Back arrow-flow maps and the flow algorithm.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::par;
use crate::quiver::{FringedQuiver, Sa};
use crate::rational::{fmt_q, parse_q, Q};
use crate::trails::{self, compatible, countercurrent_compare, format_trail, MarkedTrail, Trail};

/// Nonnegative rational weights on the arrows, conserved at every internal vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flow {
    values: Vec<Q>,
}

impl Flow {
    /// Checks nonnegativity and conservation: for relations `a1 a2` and `b1 b2`
    /// at `v`, `F(a1) + F(a2) = F(b1) + F(b2)`.
    pub fn new(q: &FringedQuiver, values: Vec<Q>) -> Result<Flow> {
        if values.len() != q.n_arrows() {
            return Err(Error::InvalidFlow(format!("expected {} values, got {}", q.n_arrows(), values.len())));
        }
        for (a, x) in values.iter().enumerate() {
            if x.is_negative() {
                return Err(Error::InvalidFlow(format!("negative value on `{}`", q.arrow_id(a))));
            }
        }
        let f = Flow { values };
        if let Some(v) = f.violation(q) {
            return Err(Error::InvalidFlow(format!("conservation fails at `{}`", q.vertex_id(v))));
        }
        Ok(f)
    }

    /// A vector that may violate conservation; only for arithmetic on flows.
    pub fn from_values(values: Vec<Q>) -> Flow {
        Flow { values }
    }

    pub fn zero(q: &FringedQuiver) -> Flow {
        Flow { values: vec![Q::zero(); q.n_arrows()] }
    }

    /// First internal vertex where conservation fails.
    pub fn violation(&self, q: &FringedQuiver) -> Option<usize> {
        q.internal().iter().copied().find(|&v| {
            let pair = |a: usize| {
                let b = q.relation_after(a).expect("internal vertex");
                &self.values[a] + &self.values[b]
            };
            let ins = q.ins(v);
            pair(ins[0]) != pair(ins[1])
        })
    }

    pub fn from_json(q: &FringedQuiver, text: &str) -> Result<Flow> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::InvalidFlow(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| Error::InvalidFlow("expected a JSON object".into()))?;
        let mut values = vec![Q::zero(); q.n_arrows()];
        for (k, x) in obj {
            let a = q.arrow_index(k)?;
            values[a] = match x {
                Value::String(s) => parse_q(s)?,
                Value::Number(n) => parse_q(&n.to_string())?,
                _ => return Err(Error::InvalidFlow(format!("bad value for `{k}`"))),
            };
        }
        Flow::new(q, values)
    }

    /// Nonzero entries as `{"arrow": "p/q"}`.
    pub fn to_json(&self, q: &FringedQuiver) -> Value {
        let mut m = Map::new();
        for (a, x) in self.values.iter().enumerate() {
            if !x.is_zero() {
                m.insert(q.arrow_id(a).to_string(), Value::String(fmt_q(x)));
            }
        }
        Value::Object(m)
    }

    pub fn get(&self, a: usize) -> &Q {
        &self.values[a]
    }
    pub fn values(&self) -> &[Q] {
        &self.values
    }
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Half the total weight on fringe arrows.
    pub fn strength(&self, q: &FringedQuiver) -> Q {
        let s: Q = (0..q.n_arrows()).filter(|&a| q.is_fringe_arrow(a)).map(|a| &self.values[a]).sum();
        s / Q::from_integer(2.into())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Flow, c: &Q) -> Flow {
        Flow { values: self.values.iter().zip(&other.values).map(|(x, y)| x + c * y).collect() }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|x| !x.is_negative())
    }
}

/// Number of times each arrow is used by `p`.
pub fn indicator(q: &FringedQuiver, p: &Trail) -> Flow {
    let counts = p.arrow_counts(q.n_arrows());
    Flow { values: counts.into_iter().map(|c| Q::from_integer(c.into())).collect() }
}

/// A point of flow travelling along a signed arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrowFlow {
    pub x: Sa,
    pub c: Q,
}

impl ArrowFlow {
    pub fn new(x: Sa, c: Q) -> Self {
        ArrowFlow { x, c }
    }

    /// The same point seen along the opposite orientation.
    pub fn reversed(&self, f: &Flow) -> ArrowFlow {
        ArrowFlow { x: self.x.inverse(), c: f.get(self.x.arrow) - &self.c }
    }
}

/// Which case of the Forward map fired, with the data needed to pull back constraints.
#[derive(Clone, Debug)]
struct Step {
    next: ArrowFlow,
    // value `<=`/`<` (upper) or `>`/`>=` (lower) bound on the incoming C.
    bound: Q,
    upper: bool,
    strict: bool,
}

fn other(xs: &[usize], a: usize) -> usize {
    if xs[0] == a {
        xs[1]
    } else {
        xs[0]
    }
}

fn forward_step(q: &FringedQuiver, f: &Flow, af: &ArrowFlow) -> Result<Step> {
    let a = af.x.arrow;
    let v = q.dst(af.x);
    if q.is_fringe(v) {
        return Err(Error::Boundary(q.vertex_id(v).to_string()));
    }
    let c = &af.c;
    if !af.x.inv {
        let a1 = q.string_after(a).expect("internal head");
        let b = other(q.ins(v), a);
        let fa1 = f.get(a1);
        Ok(if c <= fa1 {
            Step { next: ArrowFlow::new(Sa::pos(a1), c.clone()), bound: fa1.clone(), upper: true, strict: false }
        } else {
            Step { next: ArrowFlow::new(Sa::neg(b), c - fa1), bound: fa1.clone(), upper: false, strict: true }
        })
    } else {
        let a1 = other(q.outs(v), a);
        let b = q.string_before(a).expect("internal tail");
        let b1 = q.relation_before(a).expect("internal tail");
        let (fa1, fb1) = (f.get(a1), f.get(b1));
        let s = c + fb1;
        let bound = fa1 - fb1;
        Ok(if &s < fa1 {
            Step { next: ArrowFlow::new(Sa::pos(a1), s), bound, upper: true, strict: true }
        } else {
            Step { next: ArrowFlow::new(Sa::neg(b), s - fa1), bound, upper: false, strict: false }
        })
    }
}

/// The Forward map at the head of `af`.
pub fn forward(q: &FringedQuiver, f: &Flow, af: &ArrowFlow) -> Result<ArrowFlow> {
    forward_step(q, f, af).map(|s| s.next)
}

/// The Back map at the tail of `af`.
pub fn backward(q: &FringedQuiver, f: &Flow, af: &ArrowFlow) -> Result<ArrowFlow> {
    let a = af.x.arrow;
    let v = q.src(af.x);
    if q.is_fringe(v) {
        return Err(Error::Boundary(q.vertex_id(v).to_string()));
    }
    let c = &af.c;
    if !af.x.inv {
        let a1 = q.string_before(a).expect("internal tail");
        let b = other(q.outs(v), a);
        let fa1 = f.get(a1);
        Ok(if c <= fa1 { ArrowFlow::new(Sa::pos(a1), c.clone()) } else { ArrowFlow::new(Sa::neg(b), c - fa1) })
    } else {
        let a1 = other(q.ins(v), a);
        let b = q.string_after(a).expect("internal head");
        let b1 = q.relation_after(a).expect("internal head");
        let (fa1, fb1) = (f.get(a1), f.get(b1));
        let s = c + fb1;
        Ok(if &s < fa1 { ArrowFlow::new(Sa::pos(a1), s) } else { ArrowFlow::new(Sa::neg(b), s - fa1) })
    }
}

/// An interval of `[0, F(a)]` with exact endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: Q, hi: Q) -> Self {
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }
    pub fn len(&self) -> Q {
        if self.hi > self.lo {
            &self.hi - &self.lo
        } else {
            Q::zero()
        }
    }
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }
    pub fn contains(&self, x: &Q) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }

    fn cap_above(&mut self, b: Q, strict: bool) {
        if b < self.hi || (b == self.hi && strict) {
            self.hi = b;
            self.hi_closed = !strict;
        }
    }
    fn cap_below(&mut self, b: Q, strict: bool) {
        if b > self.lo || (b == self.lo && strict) {
            self.lo = b;
            self.lo_closed = !strict;
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi && !self.is_empty() {
            return write!(f, "{{{}}}", fmt_q(&self.lo));
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", fmt_q(&self.lo), fmt_q(&self.hi))
    }
}

/// Result of tracing an arrow-flow.
#[derive(Clone, Debug)]
pub struct Traced {
    pub trail: MarkedTrail,
    pub interval: Interval,
}

impl Traced {
    pub fn coefficient(&self) -> Q {
        self.interval.len()
    }
}

/// Walks forward from `start` until a fringe vertex or a repeated arrow-flow.
/// Returns the steps taken and whether the walk closed up.
fn walk(q: &FringedQuiver, f: &Flow, start: &ArrowFlow) -> Result<(Vec<ArrowFlow>, Vec<Step>, bool)> {
    let mut seen: HashMap<ArrowFlow, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    let mut steps = Vec::new();
    seen.insert(start.clone(), 0);
    loop {
        let cur = states.last().unwrap();
        if q.is_fringe(q.dst(cur.x)) {
            return Ok((states, steps, false));
        }
        let s = forward_step(q, f, cur)?;
        match seen.get(&s.next) {
            Some(0) => {
                steps.push(s);
                return Ok((states, steps, true));
            }
            Some(_) => return Err(Error::Decomposition(REVISIT.into())),
            None => {
                seen.insert(s.next.clone(), states.len());
                states.push(s.next.clone());
                steps.push(s);
            }
        }
    }
}

const REVISIT: &str = "walk revisits an arrow-flow away from its start";
const HALF_CLOSED: &str = "backward walk closed while forward walk did not";

/// The marked trail through an arrow-flow together with its interval.
pub fn trace_interval(q: &FringedQuiver, f: &Flow, af: &ArrowFlow) -> Result<Traced> {
    let fa = f.get(af.x.arrow).clone();
    if af.c.is_negative() || af.c > fa {
        return Err(Error::InvalidFlow(format!("value {} outside [0, {}]", fmt_q(&af.c), fmt_q(&fa))));
    }
    let mut iv = Interval::closed(Q::zero(), fa.clone());
    // Along the forward walk C_j = D + k_j; along the reversed walk C_j = -D + k_j.
    let mut pull = |states: &[ArrowFlow], steps: &[Step], sign_pos: bool, origin: &Q| {
        for (st, s) in states.iter().zip(steps) {
            let k = &st.c - origin;
            let k = if sign_pos { k } else { &st.c + origin };
            if sign_pos {
                let b = &s.bound - &k;
                if s.upper {
                    iv.cap_above(b, s.strict)
                } else {
                    iv.cap_below(b, s.strict)
                }
            } else {
                let b = &k - &s.bound;
                if s.upper {
                    iv.cap_below(b, s.strict)
                } else {
                    iv.cap_above(b, s.strict)
                }
            }
        }
    };
    let (fw, fsteps, closed) = walk(q, f, af)?;
    pull(&fw, &fsteps, true, &af.c);
    if closed {
        let word: Vec<Sa> = fw.iter().map(|s| s.x).collect();
        let m = trails::primitive_period(&word);
        let trail = MarkedTrail { band: true, word: word[..m].to_vec(), mark: 0 };
        return Ok(Traced { trail, interval: iv });
    }
    let rev = af.reversed(f);
    let (bw, bsteps, bclosed) = walk(q, f, &rev)?;
    if bclosed {
        return Err(Error::Decomposition(HALF_CLOSED.into()));
    }
    pull(&bw, &bsteps, false, &af.c);
    let mut word: Vec<Sa> = bw[1..].iter().rev().map(|s| s.x.inverse()).collect();
    let mark = word.len();
    word.extend(fw.iter().map(|s| s.x));
    Ok(Traced { trail: MarkedTrail { band: false, word, mark }, interval: iv })
}

/// The marked trail through an arrow-flow.
pub fn trace(q: &FringedQuiver, f: &Flow, af: &ArrowFlow) -> Result<MarkedTrail> {
    trace_interval(q, f, af).map(|t| t.trail)
}

/// A trail with positive coefficient, indexed by canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BundleCombination {
    pub terms: BTreeMap<Trail, Q>,
}

impl BundleCombination {
    pub fn routes(&self) -> impl Iterator<Item = (&Trail, &Q)> {
        self.terms.iter().filter(|(t, _)| !t.band)
    }
    pub fn bands(&self) -> impl Iterator<Item = (&Trail, &Q)> {
        self.terms.iter().filter(|(t, _)| t.band)
    }
    pub fn get(&self, t: &Trail) -> Option<&Q> {
        self.terms.get(t)
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ a_p I(p)`.
    pub fn flow(&self, q: &FringedQuiver) -> Flow {
        let mut v = vec![Q::zero(); q.n_arrows()];
        for (t, c) in &self.terms {
            for x in &t.word {
                v[x.arrow] += c;
            }
        }
        Flow { values: v }
    }

    pub fn to_json(&self, q: &FringedQuiver) -> Value {
        let list = |it: &mut dyn Iterator<Item = (&Trail, &Q)>| -> Value {
            Value::Array(
                it.map(|(t, c)| serde_json::json!({ "trail": format_trail(q, t), "coeff": fmt_q(c) })).collect(),
            )
        };
        serde_json::json!({ "routes": list(&mut self.routes()), "bands": list(&mut self.bands()) })
    }
}

/// An interval at `a^+` realizing a marked trail with positive coefficient.
#[derive(Clone, Debug)]
pub struct Piece {
    pub arrow: usize,
    pub trail: MarkedTrail,
    pub interval: Interval,
}

/// Sweeps `[0, F(a)]` with midpoint probes.
fn sweep_arrow(q: &FringedQuiver, f: &Flow, a: usize) -> Result<Vec<Piece>> {
    let fa = f.get(a).clone();
    let mut out = Vec::new();
    if fa.is_zero() {
        return Ok(out);
    }
    let two = Q::from_integer(2.into());
    let mut todo = vec![(Q::zero(), fa)];
    while let Some((lo, hi)) = todo.pop() {
        let mid = (&lo + &hi) / &two;
        // walks that only fail at boundary points are split like empty intervals
        let t = match trace_interval(q, f, &ArrowFlow::new(Sa::pos(a), mid.clone())) {
            Err(Error::Decomposition(m)) if m == REVISIT || m == HALF_CLOSED => None,
            r => Some(r?),
        };
        let Some(t) = t.filter(|t| !t.interval.len().is_zero()) else {
            todo.push((lo, mid.clone()));
            todo.push((mid, hi));
            continue;
        };
        let iv = t.interval.clone();
        if iv.lo > lo {
            todo.push((lo, iv.lo.clone()));
        }
        if iv.hi < hi {
            todo.push((iv.hi.clone(), hi));
        }
        out.push(Piece { arrow: a, trail: t.trail, interval: iv });
    }
    out.sort_by(|x, y| x.interval.lo.cmp(&y.interval.lo));
    Ok(out)
}

fn sweep(q: &FringedQuiver, f: &Flow, parallel: bool) -> Result<Vec<Piece>> {
    let arrows: Vec<usize> = (0..q.n_arrows()).collect();
    let per =
        if parallel { par::map(&arrows, |&a| sweep_arrow(q, f, a)) } else { par::map_seq(&arrows, |&a| sweep_arrow(q, f, a)) };
    let mut all = Vec::new();
    for r in per {
        all.extend(r?);
    }
    Ok(all)
}

fn combine(q: &FringedQuiver, f: &Flow, pieces: &[Piece]) -> Result<BundleCombination> {
    let mut terms: BTreeMap<Trail, Q> = BTreeMap::new();
    for p in pieces {
        let t = p.trail.unmarked();
        let c = p.interval.len();
        if let Some(old) = terms.get(&t) {
            if *old != c {
                return Err(Error::Decomposition(format!(
                    "coefficients {} and {} for {}",
                    fmt_q(old),
                    fmt_q(&c),
                    format_trail(q, &t)
                )));
            }
        } else {
            terms.insert(t, c);
        }
    }
    let b = BundleCombination { terms };
    if b.flow(q) != *f {
        return Err(Error::Decomposition("coefficients do not reproduce the flow".into()));
    }
    Ok(b)
}

/// The unique positive bundle combination equal to `f`.
pub fn decompose_bundle(q: &FringedQuiver, f: &Flow) -> Result<BundleCombination> {
    combine(q, f, &sweep(q, f, true)?)
}

/// Same as [`decompose_bundle`] but never uses worker threads.
pub fn decompose_bundle_seq(q: &FringedQuiver, f: &Flow) -> Result<BundleCombination> {
    combine(q, f, &sweep(q, f, false)?)
}

/// Every proper interval found by the sweep, sorted per arrow.
pub fn pieces(q: &FringedQuiver, f: &Flow) -> Result<Vec<Piece>> {
    sweep(q, f, true)
}

/// Canonical clique combination plus the band part carrying no fringe flow.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VortexDecomposition {
    pub routes: BTreeMap<Trail, Q>,
    pub vortex: BTreeMap<Trail, Q>,
}

impl VortexDecomposition {
    pub fn to_json(&self, q: &FringedQuiver) -> Value {
        let list = |m: &BTreeMap<Trail, Q>| -> Value {
            Value::Array(
                m.iter().map(|(t, c)| serde_json::json!({ "trail": format_trail(q, t), "coeff": fmt_q(c) })).collect(),
            )
        };
        serde_json::json!({ "routes": list(&self.routes), "vortex": list(&self.vortex) })
    }
}

pub fn decompose_vortex(q: &FringedQuiver, f: &Flow) -> Result<VortexDecomposition> {
    let b = decompose_bundle(q, f)?;
    let (routes, vortex) = b.terms.into_iter().partition(|(t, _)| !t.band);
    Ok(VortexDecomposition { routes, vortex })
}

/// A gap between consecutive route intervals at `arrow^+`.
#[derive(Clone, Debug)]
pub struct BlankSpace {
    pub arrow: usize,
    pub lo: Q,
    pub hi: Q,
    /// `None` stands for the sentinel `0` below or `F(arrow)` above.
    pub below: Option<MarkedTrail>,
    pub above: Option<MarkedTrail>,
}

impl BlankSpace {
    pub fn len(&self) -> Q {
        if self.hi > self.lo {
            &self.hi - &self.lo
        } else {
            Q::zero()
        }
    }
    pub fn is_proper(&self) -> bool {
        self.hi > self.lo
    }
}

fn blanks_from(q: &FringedQuiver, f: &Flow, pieces: &[Piece]) -> Vec<BlankSpace> {
    let mut out = Vec::new();
    for a in 0..q.n_arrows() {
        let mut lo = Q::zero();
        let mut below = None;
        for p in pieces.iter().filter(|p| p.arrow == a && !p.trail.band) {
            out.push(BlankSpace { arrow: a, lo, hi: p.interval.lo.clone(), below, above: Some(p.trail.clone()) });
            lo = p.interval.hi.clone();
            below = Some(p.trail.clone());
        }
        out.push(BlankSpace { arrow: a, lo, hi: f.get(a).clone(), below, above: None });
    }
    out
}

/// Blank spaces of `f` at every arrow, lowest first.
pub fn blank_spaces(q: &FringedQuiver, f: &Flow) -> Result<Vec<BlankSpace>> {
    let ps = pieces(q, f)?;
    Ok(blanks_from(q, f, &ps))
}

/// Largest multiple of `I(band)` that can be removed without touching the routes of `f`.
pub fn splitting_strength(q: &FringedQuiver, f: &Flow, band: &Trail) -> Result<Q> {
    let ps = pieces(q, f)?;
    let routes: Vec<Trail> = {
        let mut v: Vec<Trail> = ps.iter().filter(|p| !p.trail.band).map(|p| p.trail.unmarked()).collect();
        v.sort();
        v.dedup();
        v
    };
    if routes.iter().any(|r| !compatible(q, r, band)) {
        return Err(Error::IncompatibleBand);
    }
    let blanks = blanks_from(q, f, &ps);
    let mut best: Option<Q> = None;
    for a in 0..q.n_arrows() {
        let at: Vec<&Piece> = ps.iter().filter(|p| p.arrow == a && !p.trail.band).collect();
        let spaces: Vec<&BlankSpace> = blanks.iter().filter(|b| b.arrow == a).collect();
        let mut counts = vec![0usize; spaces.len()];
        for m in MarkedTrail::markings(band, a) {
            let mut j = 0;
            for p in &at {
                match countercurrent_compare(&p.trail, &m).map_err(|_| Error::IncompatibleBand)? {
                    std::cmp::Ordering::Less => j += 1,
                    _ => break,
                }
            }
            counts[j] += 1;
        }
        for (s, n) in spaces.iter().zip(counts) {
            if n > 0 {
                let v = s.len() / Q::from_integer(n.into());
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
    }
    Ok(best.unwrap_or_else(Q::zero))
}
