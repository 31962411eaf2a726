//! Strings, routes and bands: canonical forms, enumeration, kissing,
//! substring classification, elementary trails, g-vectors and the
//! countercurrent order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::quiver::{FringedQuiver, Sa};

/// A route (maximal string between fringe vertices) or a band (primitive cyclic string).
/// Always stored in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Trail {
    pub band: bool,
    pub word: Vec<Sa>,
}

pub fn invert(w: &[Sa]) -> Vec<Sa> {
    w.iter().rev().map(|x| x.inverse()).collect()
}

pub fn canonical_route(w: &[Sa]) -> Vec<Sa> {
    let r = invert(w);
    if r.as_slice() < w {
        r
    } else {
        w.to_vec()
    }
}

pub fn canonical_band(w: &[Sa]) -> Vec<Sa> {
    let m = w.len();
    let r = invert(w);
    let mut best: Option<Vec<Sa>> = None;
    for src in [w, r.as_slice()] {
        for k in 0..m {
            let rot: Vec<Sa> = src[k..].iter().chain(&src[..k]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// Smallest period `d` dividing `|w|` with `w` a power of its prefix of length `d`.
pub fn primitive_period(w: &[Sa]) -> usize {
    let m = w.len();
    (1..=m).find(|&d| m.is_multiple_of(d) && (0..m).all(|i| w[i] == w[i % d])).unwrap_or(m)
}

pub fn is_string(q: &FringedQuiver, w: &[Sa]) -> bool {
    w.windows(2).all(|p| q.follows(p[0], p[1]))
}

pub fn is_route(q: &FringedQuiver, w: &[Sa]) -> bool {
    !w.is_empty() && is_string(q, w) && q.is_fringe(q.src(w[0])) && q.is_fringe(q.dst(w[w.len() - 1]))
}

pub fn is_band(q: &FringedQuiver, w: &[Sa]) -> bool {
    !w.is_empty() && is_string(q, w) && q.follows(w[w.len() - 1], w[0]) && primitive_period(w) == w.len()
}

impl Trail {
    pub fn route(q: &FringedQuiver, w: &[Sa]) -> Result<Trail> {
        if !is_route(q, w) {
            return Err(Error::NotAString(format_word(q, w)));
        }
        Ok(Trail { band: false, word: canonical_route(w) })
    }

    pub fn band(q: &FringedQuiver, w: &[Sa]) -> Result<Trail> {
        if !is_band(q, w) {
            return Err(Error::NotAString(format_word(q, w)));
        }
        Ok(Trail { band: true, word: canonical_band(w) })
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_straight(&self) -> bool {
        !self.band && self.word.iter().all(|x| x.inv == self.word[0].inv)
    }

    pub fn is_bending(&self) -> bool {
        !self.band && !self.is_straight()
    }

    /// Occurrence count of each arrow.
    pub fn arrow_counts(&self, n_arrows: usize) -> Vec<u32> {
        let mut c = vec![0; n_arrows];
        for x in &self.word {
            c[x.arrow] += 1;
        }
        c
    }

    pub fn uses(&self, a: usize) -> bool {
        self.word.iter().any(|x| x.arrow == a)
    }
}

pub fn parse_word(q: &FringedQuiver, s: &str) -> Result<Vec<Sa>> {
    s.split_whitespace()
        .map(|tok| {
            let (id, inv) = match tok.strip_suffix("^-1") {
                Some(id) => (id, true),
                None => (tok, false),
            };
            Ok(Sa { arrow: q.arrow_index(id)?, inv })
        })
        .collect()
}

pub fn format_word(q: &FringedQuiver, w: &[Sa]) -> String {
    w.iter()
        .map(|x| if x.inv { format!("{}^-1", q.arrow_id(x.arrow)) } else { q.arrow_id(x.arrow).to_string() })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses `e1 e2 f2^-1 f1^-1` as a route, `band: e2 f2^-1` as a band.
pub fn parse_trail(q: &FringedQuiver, s: &str) -> Result<Trail> {
    match s.trim().strip_prefix("band:") {
        Some(rest) => Trail::band(q, &parse_word(q, rest)?),
        None => Trail::route(q, &parse_word(q, s)?),
    }
}

pub fn format_trail(q: &FringedQuiver, t: &Trail) -> String {
    if t.band {
        format!("band: {}", format_word(q, &t.word))
    } else {
        format_word(q, &t.word)
    }
}

/// All routes with at most `max_arrows` arrows.
pub fn enumerate_routes(q: &FringedQuiver, max_arrows: usize) -> Vec<Trail> {
    let starts = q.start_tokens();
    let found = par::map(&starts, |&s| {
        let mut out = Vec::new();
        let mut w = vec![s];
        dfs_routes(q, &mut w, max_arrows, &mut out);
        out
    });
    let set: BTreeSet<Trail> = found.into_iter().flatten().collect();
    set.into_iter().collect()
}

fn dfs_routes(q: &FringedQuiver, w: &mut Vec<Sa>, max: usize, out: &mut Vec<Trail>) {
    let last = *w.last().unwrap();
    if q.is_fringe(q.dst(last)) {
        out.push(Trail { band: false, word: canonical_route(w) });
        return;
    }
    if w.len() >= max {
        return;
    }
    for &y in q.continuations(last) {
        w.push(y);
        dfs_routes(q, w, max, out);
        w.pop();
    }
}

/// All bands with at most `max_arrows` arrows, up to rotation and inversion.
pub fn enumerate_bands(q: &FringedQuiver, max_arrows: usize) -> Vec<Trail> {
    let starts: Vec<Sa> = q.signed_arrows().filter(|&x| !q.is_fringe(q.src(x)) && !q.is_fringe(q.dst(x))).collect();
    let found = par::map(&starts, |&s| {
        let mut out = Vec::new();
        let mut w = vec![s];
        dfs_bands(q, &mut w, max_arrows, &mut out);
        out
    });
    let set: BTreeSet<Trail> = found.into_iter().flatten().collect();
    set.into_iter().collect()
}

fn dfs_bands(q: &FringedQuiver, w: &mut Vec<Sa>, max: usize, out: &mut Vec<Trail>) {
    let first = w[0];
    let last = *w.last().unwrap();
    if q.follows(last, first) && primitive_period(w) == w.len() {
        out.push(Trail { band: true, word: canonical_band(w) });
    }
    if w.len() >= max {
        return;
    }
    for &y in q.continuations(last) {
        if y < first {
            continue;
        }
        w.push(y);
        dfs_bands(q, w, max, out);
        w.pop();
    }
}

/// Read access to a trail word, cyclic for bands.
#[derive(Clone, Copy)]
struct View<'a> {
    w: &'a [Sa],
    band: bool,
}

impl<'a> View<'a> {
    fn tok(&self, i: isize) -> Option<Sa> {
        let m = self.w.len() as isize;
        if self.band {
            Some(self.w[i.rem_euclid(m) as usize])
        } else if (0..m).contains(&i) {
            Some(self.w[i as usize])
        } else {
            None
        }
    }
    /// Vertex positions: `0..=m` for routes, `0..m` for bands.
    fn positions(&self) -> std::ops::Range<isize> {
        let m = self.w.len() as isize;
        if self.band {
            0..m
        } else {
            0..m + 1
        }
    }
    fn vertex(&self, q: &FringedQuiver, i: isize) -> usize {
        match self.tok(i) {
            Some(x) => q.src(x),
            None => q.dst(self.tok(i - 1).unwrap()),
        }
    }
}

/// Top: entered backwards and left forwards.
fn is_top(before: Sa, after: Sa) -> bool {
    before.inv && !after.inv
}

fn is_bottom(before: Sa, after: Sa) -> bool {
    !before.inv && after.inv
}

/// A common substring that is on top of one trail and at the bottom of the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// The substring, oriented as in the first trail; empty for a lazy string.
    pub sigma: Vec<Sa>,
    /// The vertex where `sigma` starts.
    pub start: usize,
    /// Whether `sigma` is a top substring of the first trail.
    pub top_in_first: bool,
}

fn kiss_views(q: &FringedQuiver, p: View, r: View, same: bool) -> Option<Witness> {
    let rinv = invert(r.w);
    let cap = (p.w.len() + r.w.len()) as isize;
    for (flip, rv) in [(false, r), (true, View { w: &rinv, band: r.band })] {
        for i in p.positions() {
            let v = p.vertex(q, i);
            for j in rv.positions() {
                if rv.vertex(q, j) != v {
                    continue;
                }
                if same && !flip {
                    let m = p.w.len() as isize;
                    if i == j || (p.band && (i - j).rem_euclid(m) == 0) {
                        continue;
                    }
                }
                let mut fwd = 0isize;
                while fwd <= cap {
                    match (p.tok(i + fwd), rv.tok(j + fwd)) {
                        (Some(a), Some(b)) if a == b => fwd += 1,
                        _ => break,
                    }
                }
                let mut back = 0isize;
                while fwd + back <= cap {
                    match (p.tok(i - 1 - back), rv.tok(j - 1 - back)) {
                        (Some(a), Some(b)) if a == b => back += 1,
                        _ => break,
                    }
                }
                if fwd + back > cap {
                    continue;
                }
                let (Some(pa), Some(ra), Some(pb), Some(rb)) =
                    (p.tok(i + fwd), rv.tok(j + fwd), p.tok(i - 1 - back), rv.tok(j - 1 - back))
                else {
                    continue;
                };
                let top_p = is_top(pb, pa);
                let bot_p = is_bottom(pb, pa);
                let top_r = is_top(rb, ra);
                let bot_r = is_bottom(rb, ra);
                if (top_p && bot_r) || (bot_p && top_r) {
                    let sigma: Vec<Sa> = (i - back..i + fwd).map(|k| p.tok(k).unwrap()).collect();
                    return Some(Witness { sigma, start: p.vertex(q, i - back), top_in_first: top_p });
                }
            }
        }
    }
    None
}

/// An incompatibility witness between `p` and `r`, or `None` when compatible.
/// When `p == r` this is the self-compatibility check.
pub fn kiss(q: &FringedQuiver, p: &Trail, r: &Trail) -> Option<Witness> {
    let pv = View { w: &p.word, band: p.band };
    let rv = View { w: &r.word, band: r.band };
    kiss_views(q, pv, rv, p == r)
}

pub fn compatible(q: &FringedQuiver, p: &Trail, r: &Trail) -> bool {
    kiss(q, p, r).is_none()
}

pub fn self_compatible(q: &FringedQuiver, p: &Trail) -> bool {
    kiss(q, p, p).is_none()
}

/// A substring used in the boosted / criss-crossed classification.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sub {
    Word(Vec<Sa>),
    Lazy(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SubstringReport {
    pub boosted: Vec<Sub>,
    pub crisscrossed: Vec<Sub>,
}

fn occurrences(p: &Trail) -> BTreeMap<Vec<Sa>, usize> {
    let m = p.word.len();
    let v = View { w: &p.word, band: p.band };
    let mut count = BTreeMap::new();
    let max_len = if p.band { m.saturating_sub(1) } else { m };
    for len in 1..=max_len {
        let starts = if p.band { m } else { m + 1 - len };
        for i in 0..starts {
            let w: Vec<Sa> = (0..len).map(|k| v.tok((i + k) as isize).unwrap()).collect();
            *count.entry(w).or_insert(0) += 1;
        }
    }
    count
}

/// `(#S, #T)` per internal vertex for the lazy strings of `p`.
fn lazy_counts(q: &FringedQuiver, p: &Trail) -> BTreeMap<usize, (usize, usize)> {
    let v = View { w: &p.word, band: p.band };
    let mut out: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for i in v.positions() {
        let (Some(b), Some(a)) = (v.tok(i - 1), v.tok(i)) else { continue };
        let x = q.dst(b);
        if q.is_fringe(x) {
            continue;
        }
        let a1 = q.ins(x)[0];
        let b1 = q.ins(x)[1];
        let a2 = q.relation_after(a1).unwrap();
        let b2 = q.relation_after(b1).unwrap();
        let s = [
            (Sa::pos(a1), Sa::pos(b2)),
            (Sa::pos(a1), Sa::neg(b1)),
            (Sa::neg(a2), Sa::pos(b2)),
            (Sa::neg(a2), Sa::neg(b1)),
        ];
        let e = out.entry(x).or_insert((0, 0));
        if s.contains(&(b, a)) {
            e.0 += 1;
        }
        if s.iter().any(|&(u, w)| (w.inverse(), u.inverse()) == (b, a)) {
            e.1 += 1;
        }
    }
    out
}

fn contains(hay: &[Sa], needle: &[Sa]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

fn passes(q: &FringedQuiver, w: &[Sa], v: usize) -> bool {
    w.iter().any(|&x| q.src(x) == v || q.dst(x) == v)
}

/// Maximal boosted and maximal criss-crossed substrings of a trail.
pub fn substring_report(q: &FringedQuiver, p: &Trail) -> SubstringReport {
    let occ = occurrences(p);
    let lazy = lazy_counts(q, p);
    let boosted_words: Vec<Vec<Sa>> = occ.iter().filter(|(_, &c)| c >= 2).map(|(w, _)| w.clone()).collect();
    let cc_words: Vec<Vec<Sa>> = occ.keys().filter(|w| occ.contains_key(&invert(w))).cloned().collect();
    let boosted_lazy: Vec<usize> = lazy.iter().filter(|(_, &(s, t))| s > 1 || t > 1).map(|(&v, _)| v).collect();
    let cc_lazy: Vec<usize> = lazy.iter().filter(|(_, &(s, t))| s >= 1 && t >= 1).map(|(&v, _)| v).collect();

    let mut boosted = Vec::new();
    for w in &boosted_words {
        if !boosted_words.iter().any(|u| u.len() > w.len() && contains(u, w)) {
            boosted.push(Sub::Word(w.clone()));
        }
    }
    for &v in &boosted_lazy {
        if !boosted_words.iter().any(|u| passes(q, u, v)) {
            boosted.push(Sub::Lazy(v));
        }
    }
    let mut crisscrossed = Vec::new();
    for w in &cc_words {
        if invert(w) < *w {
            continue;
        }
        let bigger = cc_words.iter().any(|u| u.len() > w.len() && (contains(u, w) || contains(u, &invert(w))));
        if !bigger {
            crisscrossed.push(Sub::Word(w.clone()));
        }
    }
    for &v in &cc_lazy {
        if !cc_words.iter().any(|u| passes(q, u, v)) {
            crisscrossed.push(Sub::Lazy(v));
        }
    }
    SubstringReport { boosted, crisscrossed }
}

pub fn is_elementary(q: &FringedQuiver, p: &Trail) -> bool {
    if !self_compatible(q, p) {
        return false;
    }
    let rep = substring_report(q, p);
    if !rep.boosted.is_empty() {
        return false;
    }
    if p.band {
        return rep.crisscrossed.len() <= 1;
    }
    match rep.crisscrossed.as_slice() {
        [] => true,
        [Sub::Word(w)] => q.is_fringe(q.src(w[0])) || q.is_fringe(q.dst(w[w.len() - 1])),
        _ => false,
    }
}

/// Arrow bound for elementary trails, `2|V_int| + 2`.
pub fn elementary_bound(q: &FringedQuiver) -> usize {
    2 * q.n_internal() + 2
}

pub fn elementary_routes(q: &FringedQuiver) -> Vec<Trail> {
    let all = enumerate_routes(q, elementary_bound(q));
    let keep = par::map(&all, |t| is_elementary(q, t));
    all.into_iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t).collect()
}

pub fn elementary_bands(q: &FringedQuiver) -> Vec<Trail> {
    let all = enumerate_bands(q, elementary_bound(q));
    let keep = par::map(&all, |t| is_elementary(q, t));
    all.into_iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t).collect()
}

/// `g(p)_v` = #top lazy substrings at `v` minus #bottom ones, indexed by internal position.
pub fn g_vector(q: &FringedQuiver, p: &Trail) -> Vec<i64> {
    let mut g = vec![0i64; q.n_internal()];
    let v = View { w: &p.word, band: p.band };
    for i in v.positions() {
        let (Some(b), Some(a)) = (v.tok(i - 1), v.tok(i)) else { continue };
        let Some(k) = q.internal_pos(q.dst(b)) else { continue };
        if is_top(b, a) {
            g[k] += 1;
        } else if is_bottom(b, a) {
            g[k] -= 1;
        }
    }
    g
}

/// A trail with one marked signed-arrow occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MarkedTrail {
    pub band: bool,
    pub word: Vec<Sa>,
    pub mark: usize,
}

impl MarkedTrail {
    pub fn marked(&self) -> Sa {
        self.word[self.mark]
    }

    pub fn inverse(&self) -> MarkedTrail {
        MarkedTrail { band: self.band, word: invert(&self.word), mark: self.word.len() - 1 - self.mark }
    }

    /// The equivalent marking whose marked token is `x`, if the arrows agree.
    pub fn oriented(&self, x: Sa) -> Option<MarkedTrail> {
        let m = self.marked();
        if m == x {
            Some(self.clone())
        } else if m == x.inverse() {
            Some(self.inverse())
        } else {
            None
        }
    }

    pub fn unmarked(&self) -> Trail {
        if self.band {
            Trail { band: true, word: canonical_band(&self.word) }
        } else {
            Trail { band: false, word: canonical_route(&self.word) }
        }
    }

    /// Every marking of `t` at an occurrence of arrow `a`, oriented at `a^+`.
    pub fn markings(t: &Trail, a: usize) -> Vec<MarkedTrail> {
        t.word
            .iter()
            .enumerate()
            .filter(|(_, x)| x.arrow == a)
            .map(|(i, _)| MarkedTrail { band: t.band, word: t.word.clone(), mark: i }.oriented(Sa::pos(a)).unwrap())
            .collect()
    }

    fn view(&self) -> View<'_> {
        View { w: &self.word, band: self.band }
    }
}

/// The countercurrent order: post-order and pre-order must agree.
pub fn countercurrent_compare(a: &MarkedTrail, b: &MarkedTrail) -> Result<Ordering> {
    let b = b.oriented(a.marked()).ok_or(Error::NotComparable)?;
    let (av, bv) = (a.view(), b.view());
    let cap = (a.word.len() + b.word.len() + 2) as isize;
    let (ia, ib) = (a.mark as isize, b.mark as isize);
    let step = |dir: isize| -> Ordering {
        for k in 1..=cap {
            match (av.tok(ia + dir * k), bv.tok(ib + dir * k)) {
                (Some(x), Some(y)) if x == y => continue,
                (Some(x), Some(_)) => return if x.inv { Ordering::Greater } else { Ordering::Less },
                _ => return Ordering::Equal,
            }
        }
        Ordering::Equal
    };
    let post = step(1);
    let pre = step(-1);
    match (post, pre) {
        (Ordering::Equal, o) | (o, Ordering::Equal) => Ok(o),
        (x, y) if x == y => Ok(x),
        _ => Err(Error::NotComparable),
    }
}
