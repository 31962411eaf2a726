//! Random gentle quivers, random flows and the property checkers shared by
//! the proptest suite and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gentleflow::complexes::{avoided_arrows, k_compatible, max_clique_size, maximal_cliques, reduced};
use gentleflow::flows::{backward, decompose_bundle, decompose_bundle_seq, forward, indicator, splitting_strength};
use gentleflow::polyhedra::{crookedness, phi_flow, Crookedness};
use gentleflow::trails::{compatible, enumerate_bands, enumerate_routes, format_trail, g_vector, self_compatible};
use gentleflow::{fixtures, Arrow, ArrowFlow, Flow, FringedQuiver, Trail, Q};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CASES: u32 = 500;

pub fn rat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn fixture_quivers() -> Vec<(&'static str, FringedQuiver)> {
    vec![
        ("kronecker", fixtures::kronecker()),
        ("shard", fixtures::shard()),
        ("double-kronecker", fixtures::double_kronecker()),
        ("triple-kronecker", fixtures::triple_kronecker()),
        ("single-vertex", fixtures::single_vertex()),
        ("singleton", fixtures::singleton()),
        ("forbac", fixtures::forbac()),
    ]
}

/// A fringed gentle quiver with 1 to 4 internal vertices: internal stubs are
/// matched at random, the rest go to fresh fringe vertices, and each vertex
/// gets one of its two relation matchings. Invalid draws are rejected.
pub fn random_quiver(rng: &mut ChaCha8Rng) -> FringedQuiver {
    loop {
        let n = rng.gen_range(1..=4);
        let mut outs: Vec<usize> = (0..n).flat_map(|v| [v, v]).collect();
        let mut ins = outs.clone();
        outs.shuffle(rng);
        ins.shuffle(rng);
        let k = rng.gen_range(0..=2 * n);
        let mut vertices: Vec<(String, bool)> = (0..n).map(|v| (format!("v{v}"), false)).collect();
        let mut arrows = Vec::new();
        let mut in_at: Vec<Vec<String>> = vec![Vec::new(); n];
        let mut out_at: Vec<Vec<String>> = vec![Vec::new(); n];
        for i in 0..2 * n {
            let id = format!("a{:02}", arrows.len());
            let (t, h) = if i < k {
                (format!("v{}", outs[i]), format!("v{}", ins[i]))
            } else {
                let s = format!("s{i}");
                vertices.push((s.clone(), true));
                (s, format!("v{}", ins[i]))
            };
            if i < k {
                out_at[outs[i]].push(id.clone());
            }
            in_at[ins[i]].push(id.clone());
            arrows.push(Arrow::new(&id, &t, &h));
        }
        for &v in &outs[k..] {
            let id = format!("a{:02}", arrows.len());
            let t = format!("t{}", arrows.len());
            vertices.push((t.clone(), true));
            out_at[v].push(id.clone());
            arrows.push(Arrow::new(&id, &format!("v{v}"), &t));
        }
        let mut relations = Vec::new();
        for v in 0..n {
            let (a, b) = (&in_at[v], &out_at[v]);
            if rng.gen_bool(0.5) {
                relations.push((a[0].clone(), b[0].clone()));
                relations.push((a[1].clone(), b[1].clone()));
            } else {
                relations.push((a[0].clone(), b[1].clone()));
                relations.push((a[1].clone(), b[0].clone()));
            }
        }
        if let Ok(q) = FringedQuiver::new(vertices, arrows, relations) {
            return q;
        }
    }
}

/// Every fourth seed picks a bundled fixture, the rest a random quiver.
pub fn quiver_for(seed: u64) -> (String, FringedQuiver, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if seed.is_multiple_of(4) {
        let mut fx = fixture_quivers();
        let i = rng.gen_range(0..fx.len());
        let (name, q) = fx.swap_remove(i);
        (name.to_string(), q, rng)
    } else {
        let q = random_quiver(&mut rng);
        (format!("random#{seed}"), q, rng)
    }
}

/// Self-compatible routes and bands within small bounds.
pub fn universe(q: &FringedQuiver) -> Vec<Trail> {
    let rb = if q.is_representation_finite() { 2 * q.n_arrows() } else { 8 };
    let mut ts = enumerate_routes(q, rb);
    ts.extend(enumerate_bands(q, 6));
    ts.retain(|t| self_compatible(q, t));
    ts
}

pub fn random_coeff(rng: &mut ChaCha8Rng, integral: bool) -> Q {
    if integral {
        int(rng.gen_range(1..=4))
    } else {
        rat(rng.gen_range(1..=7), rng.gen_range(1..=5))
    }
}

/// A greedy bundle over a shuffled universe.
pub fn random_bundle(q: &FringedQuiver, u: &[Trail], rng: &mut ChaCha8Rng) -> Vec<Trail> {
    let mut order: Vec<&Trail> = u.iter().collect();
    order.shuffle(rng);
    let mut k: Vec<Trail> = Vec::new();
    for t in order {
        if k.iter().all(|s| compatible(q, s, t)) {
            k.push(t.clone());
        }
    }
    k
}

/// A nonnegative combination of up to four arbitrary trails of the universe.
pub fn random_flow(q: &FringedQuiver, u: &[Trail], rng: &mut ChaCha8Rng, integral: bool) -> Flow {
    let mut f = Flow::zero(q);
    if u.is_empty() {
        return f;
    }
    for _ in 0..rng.gen_range(1..=4) {
        let t = &u[rng.gen_range(0..u.len())];
        f = f.add_scaled(&indicator(q, t), &random_coeff(rng, integral));
    }
    f
}

fn names(q: &FringedQuiver, ts: &[&Trail]) -> Vec<String> {
    ts.iter().map(|t| format_trail(q, t)).collect()
}

/// (a) a bundle combination decomposes back to itself, in parallel and sequentially.
pub fn prop_roundtrip(seed: u64) -> Result<(), String> {
    let (name, q, mut rng) = quiver_for(seed);
    let u = universe(&q);
    let k = random_bundle(&q, &u, &mut rng);
    let mut want: BTreeMap<Trail, Q> = BTreeMap::new();
    let mut f = Flow::zero(&q);
    for t in &k {
        if rng.gen_bool(0.3) {
            continue;
        }
        let c = random_coeff(&mut rng, false);
        f = f.add_scaled(&indicator(&q, t), &c);
        want.insert(t.clone(), c);
    }
    let got = decompose_bundle(&q, &f).map_err(|e| format!("{name}: {e}"))?;
    if got.terms != want {
        return Err(format!("{name}: decomposed {:?} instead of {:?}", got.terms.len(), want.len()));
    }
    let seq = decompose_bundle_seq(&q, &f).map_err(|e| format!("{name}: {e}"))?;
    if seq != got {
        return Err(format!("{name}: parallel and sequential disagree"));
    }
    Ok(())
}

/// (b) integer flows give integer coefficients.
pub fn prop_integral(seed: u64) -> Result<(), String> {
    let (name, q, mut rng) = quiver_for(seed);
    let u = universe(&q);
    let f = random_flow(&q, &u, &mut rng, true);
    let b = decompose_bundle(&q, &f).map_err(|e| format!("{name}: {e}"))?;
    match b.terms.iter().find(|(_, c)| !c.is_integer()) {
        Some((t, c)) => Err(format!("{name}: {} has coefficient {c}", format_trail(&q, t))),
        None => Ok(()),
    }
}

/// (c) output trails are self-compatible and pairwise compatible, and reproduce the flow.
pub fn prop_compatible(seed: u64) -> Result<(), String> {
    let (name, q, mut rng) = quiver_for(seed);
    let u = universe(&q);
    let f = random_flow(&q, &u, &mut rng, false);
    let b = decompose_bundle(&q, &f).map_err(|e| format!("{name}: {e}"))?;
    let ts: Vec<&Trail> = b.terms.keys().collect();
    for (i, p) in ts.iter().enumerate() {
        if !self_compatible(&q, p) {
            return Err(format!("{name}: {} not self-compatible", format_trail(&q, p)));
        }
        for r in &ts[i + 1..] {
            if !compatible(&q, p, r) {
                return Err(format!("{name}: {:?} kiss", names(&q, &[p, r])));
            }
        }
    }
    if b.flow(&q) != f {
        return Err(format!("{name}: combination does not reproduce the flow"));
    }
    Ok(())
}

/// (d) Back undoes For away from the top endpoint, and For on the reversed
/// arrow-flow agrees with Back.
pub fn prop_back_for(seed: u64) -> Result<(), String> {
    let (name, q, mut rng) = quiver_for(seed);
    let u = universe(&q);
    let f = random_flow(&q, &u, &mut rng, false);
    let xs: Vec<_> = q.signed_arrows().filter(|&x| !q.is_fringe(q.dst(x))).collect();
    for _ in 0..8 {
        let x = xs[rng.gen_range(0..xs.len())];
        let d = rng.gen_range(1..=12);
        let k = rng.gen_range(0..=d);
        let c = f.get(x.arrow) * rat(k, d);
        let top = if x.inv { k == 0 } else { k == d };
        let af = ArrowFlow::new(x, c);
        let y = forward(&q, &f, &af).map_err(|e| format!("{name}: {e}"))?;
        let back = backward(&q, &f, &y).map_err(|e| format!("{name}: {e}"))?;
        if back != af && !top {
            return Err(format!("{name}: Back(For({af:?})) = {back:?}"));
        }
        let rb = backward(&q, &f, &af.reversed(&f)).map_err(|e| format!("{name}: {e}"))?;
        if y.reversed(&f) != rb {
            return Err(format!("{name}: reversal mismatch at {af:?}"));
        }
    }
    Ok(())
}

/// (e) phi of an indicator vector is the g-vector.
pub fn prop_phi_g(seed: u64) -> Result<(), String> {
    let (name, q, mut rng) = quiver_for(seed);
    let u = universe(&q);
    for _ in 0..4 {
        let p = &u[rng.gen_range(0..u.len())];
        let g: Vec<Q> = g_vector(&q, p).into_iter().map(int).collect();
        if phi_flow(&q, &indicator(&q, p)) != g {
            return Err(format!("{name}: phi != g for {}", format_trail(&q, p)));
        }
    }
    Ok(())
}

/// A representation-infinite quiver: a fixture with bands or a random draw.
pub fn banded_quiver_for(seed: u64) -> (String, FringedQuiver, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if seed.is_multiple_of(4) {
        let mut fx: Vec<_> = fixture_quivers().into_iter().filter(|(_, q)| !q.is_representation_finite()).collect();
        let i = rng.gen_range(0..fx.len());
        let (name, q) = fx.swap_remove(i);
        return (name.to_string(), q, rng);
    }
    loop {
        let q = random_quiver(&mut rng);
        if !q.is_representation_finite() && enumerate_bands(&q, 6).iter().any(|b| self_compatible(&q, b)) {
            return (format!("random#{seed}"), q, rng);
        }
    }
}

/// (f) adding b times a compatible band, b >= -M, keeps the route part.
pub fn prop_band_translation(seed: u64) -> Result<(), String> {
    let (name, q, mut rng) = banded_quiver_for(seed);
    let u = universe(&q);
    let bands: Vec<&Trail> = u.iter().filter(|t| t.band).collect();
    let b = bands[rng.gen_range(0..bands.len())].clone();
    let rest: Vec<Trail> = u.iter().filter(|t| **t != b && compatible(&q, t, &b)).cloned().collect();
    let mut k = random_bundle(&q, &rest, &mut rng);
    k.push(b.clone());
    let mut f = Flow::zero(&q);
    for t in &k {
        if t.band || rng.gen_bool(0.7) {
            f = f.add_scaled(&indicator(&q, t), &random_coeff(&mut rng, false));
        }
    }
    let base = decompose_bundle(&q, &f).map_err(|e| format!("{name}: {e}"))?;
    let routes: Vec<Trail> = base.routes().map(|(t, _)| t.clone()).collect();
    if !k_compatible(&q, &routes, &b) {
        return Err(format!("{name}: band {} kisses a route of the decomposition", format_trail(&q, &b)));
    }
    let m = splitting_strength(&q, &f, &b).map_err(|e| format!("{name}: {e}"))?;
    let t = rat(rng.gen_range(0..=12), 12);
    let shift = -&m + t * (&m + int(3));
    let g = f.add_scaled(&indicator(&q, &b), &shift);
    if !g.is_nonnegative() {
        return Err(format!("{name}: shifted flow negative (M = {m}, b = {shift})"));
    }
    let after = decompose_bundle(&q, &g).map_err(|e| format!("{name}: {e}"))?;
    let r0: Vec<(&Trail, &Q)> = base.routes().collect();
    let r1: Vec<(&Trail, &Q)> = after.routes().collect();
    if r0 != r1 {
        return Err(format!("{name}: routes changed under {} * {}", shift, format_trail(&q, &b)));
    }
    Ok(())
}

/// (g) clique and bundle cardinality bounds.
pub fn prop_cardinality(seed: u64) -> Result<(), String> {
    let (name, q, mut rng) = quiver_for(seed);
    let u = universe(&q);
    let full = max_clique_size(&q);
    let k = random_bundle(&q, &u, &mut rng);
    let has_band = k.iter().any(|t| t.band);
    if k.len() > full || (has_band && k.len() >= full) {
        return Err(format!("{name}: bundle of size {} (bound {full}, band {has_band})", k.len()));
    }
    let routes: Vec<Trail> = k.iter().filter(|t| !t.band).cloned().collect();
    if reduced(&routes).len() > q.n_internal() {
        return Err(format!("{name}: reduced clique larger than |V_int|"));
    }
    if q.is_representation_finite() {
        for c in maximal_cliques(&q, 2 * q.n_arrows()) {
            if c.len() != full {
                return Err(format!("{name}: maximal clique of size {} != {full}", c.len()));
            }
        }
    }
    Ok(())
}

/// (h) a full-size clique avoids a barely crooked arrow set once straights are dropped.
pub fn prop_barely_crooked(seed: u64) -> Result<(), String> {
    let (name, q, mut rng) = quiver_for(seed);
    let bound = if q.is_representation_finite() { 2 * q.n_arrows() } else { 8 };
    let full = max_clique_size(&q);
    let cs: Vec<Vec<Trail>> = maximal_cliques(&q, bound).into_iter().filter(|c| c.len() == full).collect();
    if cs.is_empty() {
        return Ok(());
    }
    let c = &cs[rng.gen_range(0..cs.len())];
    let w = avoided_arrows(&q, &reduced(c));
    match crookedness(&q, &w) {
        Ok(Crookedness::BarelyCrooked) => Ok(()),
        other => Err(format!("{name}: avoided set {w:?} is {other:?}")),
    }
}

pub type Property = fn(u64) -> Result<(), String>;

pub const PROPERTIES: &[(&str, Property)] = &[
    ("(a) round trip", prop_roundtrip),
    ("(b) integrality", prop_integral),
    ("(c) compatibility", prop_compatible),
    ("(d) Back after For", prop_back_for),
    ("(e) phi = g", prop_phi_g),
    ("(f) band translation", prop_band_translation),
    ("(g) cardinality", prop_cardinality),
    ("(h) barely crooked", prop_barely_crooked),
];
