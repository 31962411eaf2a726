//! Acceptance run: one PASS/FAIL line per criterion. Every comparison is exact.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use gentleflow::complexes::{band_stable_cliques, max_clique_size, maximal_bundles, maximal_cliques, reduced};
use gentleflow::dag_bridge::{
    dag_decompose, dag_flow_from_json, from_paired, parse_framed, to_fringed_quiver, trail_to_path, FramedGraph,
};
use gentleflow::flows::{decompose_bundle, indicator, trace_interval};
use gentleflow::polyhedra::{g_face, g_facet, g_polyhedron_presentation, turbulence_presentation, unimodularity_check};
use gentleflow::rational::fmt_q;
use gentleflow::trails::{
    elementary_routes, enumerate_bands, enumerate_routes, format_word, parse_trail, self_compatible,
};
use gentleflow::{fixtures, ArrowFlow, Flow, FringedQuiver, Pairing, Sa, Trail, Q};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Failures that are reported but do not fail the test run. Each one is a
/// mismatch between the expected value and the source example it transcribes.
const KNOWN_DIVERGENCES: &[&str] = &["shard route counts"];

struct Checks {
    fails: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks { fails: Vec::new(), notes: Vec::new() }
    }
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.fails.push(what.into());
        }
    }
    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn trail(q: &FringedQuiver, s: &str) -> Trail {
    parse_trail(q, s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn trails(q: &FringedQuiver, ss: &[&str]) -> BTreeSet<Trail> {
    ss.iter().map(|s| trail(q, s)).collect()
}

fn ids(q: &FringedQuiver, names: &[&str]) -> Vec<usize> {
    let mut v: Vec<usize> = names.iter().map(|n| q.arrow_index(n).unwrap()).collect();
    v.sort();
    v
}

fn qs(xs: &[i64]) -> Vec<Q> {
    xs.iter().map(|&x| int(x)).collect()
}

fn c1_kronecker_presentation() -> Checks {
    let mut c = Checks::new();
    let q = fixtures::kronecker();
    let p = turbulence_presentation(&q);
    let verts: BTreeSet<Trail> = p.vertices.iter().map(|(t, _)| t.clone()).collect();
    c.check(verts == trails(&q, &["e1 f1^-1", "e3^-1 f3", "e1 e2 e3", "f1 f2 f3"]), "turbulence vertices");
    c.check(p.vertices.iter().all(|(t, v)| indicator(&q, t).values() == v.as_slice()), "vertices are indicators");
    let rays: Vec<Trail> = p.rays.iter().map(|(t, _)| t.clone()).collect();
    c.check(rays == vec![trail(&q, "band: e2 f2^-1")], "single recession ray");
    c.check(p.dimension == 3, format!("dimension {}", p.dimension));
    let g = g_polyhedron_presentation(&q);
    let gv: BTreeSet<Vec<Q>> = g.vertices.iter().map(|(_, v)| v.clone()).collect();
    c.check(gv == [qs(&[-1, 0]), qs(&[0, 1])].into_iter().collect(), "g-polyhedron vertices");
    let gr: Vec<Vec<Q>> = g.rays.iter().map(|(_, r)| r.clone()).collect();
    c.check(gr == vec![qs(&[1, -1])], "g-polyhedron ray");
    c.note("4 vertices, 1 ray, dim 3, g-vertices (-1,0),(0,1), g-ray (1,-1)");
    c
}

/// Maximal elements under inclusion.
fn maximal_sets(sets: Vec<BTreeSet<Trail>>) -> BTreeSet<BTreeSet<Trail>> {
    let mut out = BTreeSet::new();
    for s in &sets {
        if !sets.iter().any(|t| t != s && s.is_subset(t)) {
            out.insert(s.clone());
        }
    }
    out
}

fn c2_kronecker_dissections() -> Checks {
    let mut c = Checks::new();
    let q = fixtures::kronecker();
    let x = |j: usize| trail(&q, &format!("e1 {}f1^-1", "e2 f2^-1 ".repeat(j)));
    let y = |j: usize| trail(&q, &format!("e3^-1 {}f3", "e2^-1 f2 ".repeat(j)));
    let straights = trails(&q, &["e1 e2 e3", "f1 f2 f3"]);
    let band = trail(&q, "band: e2 f2^-1");
    let with = |extra: Vec<Trail>| -> BTreeSet<Trail> { straights.iter().cloned().chain(extra).collect() };
    for m in 0..=5usize {
        let l = 4 + 2 * m;
        let mut fam = vec![with(vec![band.clone()]), with(vec![x(0), y(0)])];
        for j in 0..=m + 2 {
            fam.push(with(vec![x(j), x(j + 1)]));
            fam.push(with(vec![y(j), y(j + 1)]));
        }
        let fits = |t: &Trail| if t.band { t.len() <= 4 } else { t.len() <= l };
        let expect = maximal_sets(fam.into_iter().map(|s| s.into_iter().filter(fits).collect()).collect());
        let got: BTreeSet<BTreeSet<Trail>> =
            maximal_bundles(&q, l, 4).into_iter().map(|k| k.into_iter().collect()).collect();
        c.check(got == expect, format!("maximal bundles at route bound {l}: {} vs {}", got.len(), expect.len()));
        let banded: Vec<&BTreeSet<Trail>> = got.iter().filter(|k| k.iter().any(|t| t.band)).collect();
        c.check(banded.len() == 1 && *banded[0] == with(vec![band.clone()]), format!("band bundle at bound {l}"));
    }
    for l in [8, 10, 12] {
        let small: Vec<BTreeSet<Trail>> = band_stable_cliques(&q, l, 4)
            .into_iter()
            .filter(|k| k.len() < max_clique_size(&q))
            .map(|k| k.into_iter().collect())
            .collect();
        c.check(small == vec![straights.clone()], format!("non-maximal band-stable cliques at bound {l}"));
    }
    c.note("route bounds 4..14, band bound 4; band-stable at 8, 10, 12");
    c
}

fn c3_shard() -> Checks {
    let mut c = Checks::new();
    let q = fixtures::shard();
    let routes = enumerate_routes(&q, 2 * q.n_arrows());
    let sc: BTreeSet<Trail> = routes.iter().filter(|t| self_compatible(&q, t)).cloned().collect();
    let el = elementary_routes(&q);
    let counts = (routes.len(), sc.len(), el.len());
    c.note(format!("routes/self-compatible/elementary = {}/{}/{} (expected 8/7/6)", counts.0, counts.1, counts.2));
    c.check(counts == (8, 7, 6), format!("shard route counts {}/{}/{} != 8/7/6", counts.0, counts.1, counts.2));
    let listed = [
        "e4^-1 e2 e3 e4",
        "e1 e2 e3 e1^-1",
        "e1 e3^-1 f2",
        "e4^-1 e3^-1 f2",
        "e1 e2 f1^-1",
        "e4^-1 e2 f1^-1",
        "f1 f2",
        "e1 e2 e3 e4",
    ];
    c.check(sc == trails(&q, &listed), "self-compatible routes equal the eight listed in the example");
    let bad = trail(&q, "e1 e3^-1 e2^-1 e4");
    c.check(routes.contains(&bad) && !sc.contains(&bad), "e1 e3^-1 e2^-1 e4 is the only non-self-compatible route");
    c.check(indicator(&q, &bad) == indicator(&q, &trail(&q, "e1 e2 e3 e4")), "shared indicator");
    c.check(!el.contains(&trail(&q, "e1 e2 e3 e4")), "e1 e2 e3 e4 not elementary");
    let cs = maximal_cliques(&q, 2 * q.n_arrows());
    c.check(cs.len() == 6, format!("{} maximal cliques", cs.len()));
    c.check(cs.iter().all(|k| k.len() == 4 && max_clique_size(&q) == 4), "clique size 3*2-2 = 4");
    c.check(cs.iter().all(|k| unimodularity_check(&q, k)), "unimodular");
    let h = g_facet(&q, &ids(&q, &["f2", "e1"])).map(|h| h.render(&q));
    c.check(h.as_deref() == Ok("x(v2) <= 1"), format!("facet {{f2,e1}}: {h:?}"));
    let f = g_face(&q, &ids(&q, &["f2", "e1", "e3"])).map(|h| h.negated().render(&q));
    c.check(f.as_deref() == Ok("-1/2x(v1) + 1/2x(v2) <= 1"), format!("face {{f2,e1,e3}}: {f:?}"));
    c
}

fn c4_flow_goldens() -> Checks {
    let mut c = Checks::new();
    let k = fixtures::kronecker();
    let f = Flow::from_json(&k, fixtures::EX52_FLOW).unwrap();
    let b = decompose_bundle(&k, &f).unwrap();
    let want: BTreeMap<Trail, Q> = [
        (trail(&k, "f1 f2 e2^-1 f2 e2^-1 e1^-1"), rat(1, 2)),
        (trail(&k, "f1 f2 e2^-1 f2 e2^-1 f2 e2^-1 e1^-1"), rat(1, 2)),
    ]
    .into_iter()
    .collect();
    c.check(b.terms == want, "ex52 decomposition {p: 1/2, q: 1/2}");

    let s = fixtures::singleton();
    let f = Flow::from_json(&s, fixtures::SINGLETON_FLOW).unwrap();
    let alpha = s.arrow_index("alpha").unwrap();
    let tr = trace_interval(&s, &f, &ArrowFlow::new(Sa::pos(alpha), int(1))).unwrap();
    c.check(tr.interval.to_string() == "{1}" && tr.coefficient() == int(0), "singleton interval {1}, a = 0");

    let g = fixtures::shard();
    let f = Flow::from_json(&g, fixtures::GOTTABEMARKED_FLOW).unwrap();
    let e1 = g.arrow_index("e1").unwrap();
    let lo = trace_interval(&g, &f, &ArrowFlow::new(Sa::pos(e1), rat(1, 2))).unwrap();
    let hi = trace_interval(&g, &f, &ArrowFlow::new(Sa::pos(e1), rat(3, 2))).unwrap();
    c.check(lo.interval.to_string() == "(0, 1]", format!("lower marking interval {}", lo.interval));
    c.check(hi.interval.to_string() == "(1, 2]", format!("upper marking interval {}", hi.interval));
    c.check(lo.trail.unmarked() == hi.trail.unmarked() && lo.trail != hi.trail, "two markings of one route");
    c.check(format_word(&g, &lo.trail.word) == "e1 e2 e3 e1^-1", "marked route");

    let d = parse_framed(fixtures::CUBE_DAG).unwrap();
    let f = dag_flow_from_json(&d, fixtures::CUBE_FLOW).unwrap();
    let got: BTreeMap<String, String> = dag_decompose(&d, &f)
        .unwrap()
        .routes
        .iter()
        .map(|(p, x)| (d.format_path(p), fmt_q(x)))
        .collect();
    let want: BTreeMap<String, String> =
        [("e1 f1", "1"), ("e2 f1", "2"), ("e2 f2", "1")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    c.check(got == want, format!("cube DAG {got:?}"));
    c.note("ex52, singleton, gottabemarked, cube DAG");
    c
}

/// `F_(a,b,c,d)` on the double Kronecker quiver.
fn dk_flow(q: &FringedQuiver, v: [i64; 4]) -> Vec<Q> {
    let mut out = vec![int(0); q.n_arrows()];
    for (i, x) in v.iter().enumerate() {
        for l in ["e", "f"] {
            out[q.arrow_index(&format!("{l}{}", i + 1)).unwrap()] = int(*x);
        }
    }
    out
}

fn coprime(b: i64, c: i64) -> bool {
    b.gcd(&c) == 1
}

type Combo = BTreeSet<(bool, Vec<Q>, Q)>;

/// Bundle combination of `F_(1,b,c,0)` as (band?, indicator, coefficient).
fn left_table(q: &FringedQuiver, b: i64, c: i64) -> Combo {
    let l = |b: i64, c: i64| (false, dk_flow(q, if (b, c) == (0, 1) { [1, 0, 0, 0] } else { [1, b, c + 1, 0] }), int(1));
    let band = |b: i64, c: i64, m: i64| (true, dk_flow(q, [0, b, c, 0]), int(m));
    let mut out = Combo::new();
    if b == 0 && c == 0 {
        out.insert(l(0, 1));
    } else if b == 0 {
        out.insert(l(0, 1));
        out.insert(band(0, 1, c));
    } else if c == 0 {
        out.insert(l(b, -1));
    } else if coprime(b, c - 1) {
        out.insert(l(b, c - 1));
    } else {
        let m = b.gcd(&(c - 1));
        out.insert(l(b / m, (c - 1) / m));
        out.insert(band(b / m, (c - 1) / m, m - 1));
    }
    out
}

/// Bundle combination of `F_(0,b,c,1)`.
fn right_table(q: &FringedQuiver, b: i64, c: i64) -> Combo {
    let r = |b: i64, c: i64| (false, dk_flow(q, if (b, c) == (1, 0) { [0, 0, 0, 1] } else { [0, b + 1, c, 1] }), int(1));
    let band = |b: i64, c: i64, m: i64| (true, dk_flow(q, [0, b, c, 0]), int(m));
    let mut out = Combo::new();
    if b == 0 && c == 0 {
        out.insert(r(1, 0));
    } else if c == 0 {
        out.insert(r(1, 0));
        out.insert(band(1, 0, b));
    } else if b == 0 {
        out.insert(r(-1, c));
    } else if coprime(b - 1, c) {
        out.insert(r(b - 1, c));
    } else {
        let m = (b - 1).gcd(&c);
        out.insert(r((b - 1) / m, c / m));
        out.insert(band((b - 1) / m, c / m, m - 1));
    }
    out
}

fn combo_of(q: &FringedQuiver, f: &[Q]) -> Combo {
    let b = decompose_bundle(q, &Flow::new(q, f.to_vec()).unwrap()).unwrap();
    b.terms.iter().map(|(t, x)| (t.band, indicator(q, t).values().to_vec(), x.clone())).collect()
}

fn c5_double_kronecker() -> Checks {
    let mut c = Checks::new();
    let q = fixtures::double_kronecker();
    let ind = |t: &Trail| indicator(&q, t).values().to_vec();

    let bands: Vec<Trail> = enumerate_bands(&q, 16).into_iter().filter(|t| self_compatible(&q, t)).collect();
    let got: BTreeSet<Vec<Q>> = bands.iter().map(ind).collect();
    let mut want = BTreeSet::new();
    for s in 1..=8 {
        for b in 0..=s {
            if coprime(b, s - b) {
                want.insert(dk_flow(&q, [0, b, s - b, 0]));
            }
        }
    }
    c.check(got == want && bands.len() == want.len(), format!("{} self-compatible bands vs {} coprime pairs", bands.len(), want.len()));
    c.check(
        bands.contains(&trail(&q, "band: e2 f2^-1")) && bands.contains(&trail(&q, "band: e3 f3^-1")),
        "B_(1,0) and B_(0,1)",
    );

    let mut bad = Vec::new();
    for b in 0..=6 {
        for cc in 0..=6 {
            if combo_of(&q, &dk_flow(&q, [1, b, cc, 0])) != left_table(&q, b, cc) {
                bad.push(format!("left({b},{cc})"));
            }
            if combo_of(&q, &dk_flow(&q, [0, b, cc, 1])) != right_table(&q, b, cc) {
                bad.push(format!("right({b},{cc})"));
            }
        }
    }
    c.check(bad.is_empty(), format!("table mismatches {bad:?}"));

    let (rb, bb) = (16, 12);
    let lr = |b: i64, c: i64| -> [(bool, Vec<Q>); 2] {
        let l = if (b, c) == (0, 1) { [1, 0, 0, 0] } else { [1, b, c + 1, 0] };
        let r = if (b, c) == (1, 0) { [0, 0, 0, 1] } else { [0, b + 1, c, 1] };
        [(false, dk_flow(&q, l)), (false, dk_flow(&q, r))]
    };
    let mut pairs = Vec::new();
    for s in 1..=(bb as i64) / 2 {
        for b in 0..=s {
            if coprime(b, s - b) {
                pairs.push((b, s - b));
            }
        }
    }
    let key = |k: &[Trail]| -> BTreeSet<(bool, Vec<Q>)> { reduced(k).iter().map(|t| (t.band, ind(t))).collect() };
    let got: BTreeSet<BTreeSet<(bool, Vec<Q>)>> =
        maximal_bundles(&q, rb, bb).iter().filter(|k| k.iter().any(|t| t.band)).map(|k| key(k)).collect();
    let mut want = BTreeSet::new();
    for &(b, cc) in &pairs {
        for x in lr(b, cc) {
            want.insert([x, (true, dk_flow(&q, [0, b, cc, 0]))].into_iter().collect::<BTreeSet<_>>());
        }
    }
    c.check(got == want, format!("band bundles: {} vs {}", got.len(), want.len()));

    let full = max_clique_size(&q);
    let got: BTreeSet<BTreeSet<(bool, Vec<Q>)>> =
        band_stable_cliques(&q, rb, bb).iter().filter(|k| k.len() < full).map(|k| key(k)).collect();
    let mut want: BTreeSet<BTreeSet<(bool, Vec<Q>)>> = [BTreeSet::new()].into_iter().collect();
    for &(b, cc) in &pairs {
        for x in lr(b, cc) {
            want.insert([x].into_iter().collect());
        }
    }
    c.check(got == want, format!("non-maximal band-stable cliques: {} vs {}", got.len(), want.len()));
    c.note(format!("bands b+c <= 8; tables 0 <= b,c <= 6; bundles at route {rb} / band {bb}"));
    c
}

fn c6_properties() -> Checks {
    let mut c = Checks::new();
    let mut parts = Vec::new();
    for (i, (name, prop)) in PROPERTIES.iter().enumerate() {
        let mut fails = 0;
        for s in 0..CASES as u64 {
            if let Err(e) = prop(1_000_003 * (i as u64 + 1) + s) {
                if fails == 0 {
                    c.check(false, format!("{name}: {e}"));
                }
                fails += 1;
            }
        }
        parts.push(format!("{name} {}/{CASES}", CASES - fails));
    }
    c.note(parts.join(", "));
    c
}

fn bridge_cases() -> Vec<(String, FramedGraph, FringedQuiver, Pairing)> {
    let mut out = Vec::new();
    for (name, q) in fixture_quivers() {
        if let Some(psi) = q.find_pairing() {
            out.push((name.to_string(), from_paired(&q, &psi).unwrap(), q, psi));
        }
    }
    for (name, text) in [("cube-dag", fixtures::CUBE_DAG), ("difdagc-dag", fixtures::DIFDAGC_DAG)] {
        let g = parse_framed(text).unwrap();
        let (q, psi) = to_fringed_quiver(&g).unwrap();
        out.push((name.to_string(), g, q, psi));
    }
    out
}

fn c7_bridge() -> Checks {
    let mut c = Checks::new();
    let mut names = Vec::new();
    for (name, g, q, psi) in bridge_cases() {
        names.push(name.clone());
        let (q2, psi2) = to_fringed_quiver(&g).unwrap();
        c.check(q2 == q, format!("{name}: quiver round trip"));
        c.check(from_paired(&q2, &psi2).as_ref() == Ok(&g), format!("{name}: graph round trip"));
        c.check(from_paired(&q, &psi).as_ref() == Ok(&g), format!("{name}: from_paired"));
        c.check(g.is_acyclic() == q.is_representation_finite(), format!("{name}: acyclic iff representation-finite"));
        let u = universe(&q);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut bad = 0;
        for _ in 0..100 {
            let integral = rng.gen_bool(0.2);
            let f = random_flow(&q, &u, &mut rng, integral);
            let vals: Vec<Q> = g.edges().iter().map(|e| f.get(q.arrow_index(&e.id).unwrap()).clone()).collect();
            let d = dag_decompose(&g, &vals).unwrap();
            let b = decompose_bundle(&q, &f).unwrap();
            let mut routes = BTreeMap::new();
            let mut bands = BTreeMap::new();
            for (t, x) in &b.terms {
                let p = trail_to_path(&g, &q, t).unwrap();
                if t.band { bands.insert(p, x.clone()) } else { routes.insert(p, x.clone()) };
            }
            if d.routes != routes || d.bands != bands {
                bad += 1;
            }
        }
        c.check(bad == 0, format!("{name}: {bad}/100 flows disagree"));
    }
    c.note(format!("{} x 100 flows", names.join(", ")));
    c
}

/// Points of `F_1` whose coordinates are multiples of 1/6, by brute force over
/// the conservation system. Coordinates are stored as numerators over 6.
fn turbulence_points(q: &FringedQuiver, cap: i64) -> BTreeSet<Vec<i64>> {
    let n = q.n_arrows();
    // each internal vertex: the two relation pairs must carry the same total
    let pairs: Vec<[usize; 4]> = q
        .internal()
        .iter()
        .map(|&v| {
            let ins = q.ins(v);
            let after = |a: usize| q.outs(v).iter().copied().find(|&b| q.is_relation(a, b)).unwrap();
            [ins[0], after(ins[0]), ins[1], after(ins[1])]
        })
        .collect();
    let fringe: Vec<usize> = (0..n).filter(|&a| q.is_fringe_arrow(a)).collect();
    let mut out = BTreeSet::new();
    let mut x: Vec<Option<i64>> = vec![None; n];
    fn solve(
        x: &mut Vec<Option<i64>>,
        pairs: &[[usize; 4]],
        fringe: &[usize],
        cap: i64,
        out: &mut BTreeSet<Vec<i64>>,
    ) {
        // propagate forced values
        let mut set = Vec::new();
        loop {
            let mut changed = false;
            for p in pairs {
                let unknown: Vec<usize> = (0..4).filter(|&i| x[p[i]].is_none()).collect();
                if unknown.len() == 1 {
                    let i = unknown[0];
                    let v = |j: usize| x[p[j]].unwrap_or(0);
                    let val = if i < 2 { v(2) + v(3) - v(1 - i) } else { v(0) + v(1) - v(5 - i) };
                    if !(0..=cap).contains(&val) {
                        for a in set {
                            x[a] = None;
                        }
                        return;
                    }
                    x[p[i]] = Some(val);
                    set.push(p[i]);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let ok = pairs.iter().all(|p| match (x[p[0]], x[p[1]], x[p[2]], x[p[3]]) {
            (Some(a), Some(b), Some(c), Some(d)) => a + b == c + d,
            _ => true,
        });
        let fs: i64 = fringe.iter().filter_map(|&a| x[a]).sum();
        if ok && fs <= 12 {
            match x.iter().position(Option::is_none) {
                None => {
                    if fs == 12 {
                        out.insert(x.iter().map(|v| v.unwrap()).collect());
                    }
                }
                Some(a) => {
                    for val in 0..=cap {
                        x[a] = Some(val);
                        solve(x, pairs, fringe, cap, out);
                    }
                    x[a] = None;
                }
            }
        }
        for a in set {
            x[a] = None;
        }
    }
    solve(&mut x, &pairs, &fringe, cap, &mut out);
    out
}

/// Compositions of `total` into `k` nonnegative parts.
fn compositions(total: i64, k: usize) -> Vec<Vec<i64>> {
    if k == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn c8_lattice_oracle() -> Checks {
    let mut c = Checks::new();
    let thirds = |p: &Vec<i64>| p.iter().all(|x| x % 2 == 0 || x % 3 == 0);
    let mut sizes = Vec::new();
    let mut cases: Vec<(String, FringedQuiver)> = vec![
        ("shard".into(), fixtures::shard()),
        ("single-vertex".into(), fixtures::single_vertex()),
        ("singleton".into(), fixtures::singleton()),
        ("forbac".into(), fixtures::forbac()),
    ];
    for (name, text) in [("cube-dag", fixtures::CUBE_DAG), ("difdagc-dag", fixtures::DIFDAGC_DAG)] {
        cases.push((name.into(), to_fringed_quiver(&parse_framed(text).unwrap()).unwrap().0));
    }
    for (name, q) in cases {
        c.check(q.is_representation_finite(), format!("{name} is representation-finite"));
        // a route of a representation-finite quiver meets each arrow at most twice
        let brute: BTreeSet<Vec<i64>> = turbulence_points(&q, 12).into_iter().filter(thirds).collect();
        let mut simplices = BTreeSet::new();
        for k in maximal_cliques(&q, 2 * q.n_arrows()) {
            let rows: Vec<Vec<i64>> = k.iter().map(|t| t.arrow_counts(q.n_arrows()).iter().map(|&x| x as i64).collect()).collect();
            for lam in compositions(6, rows.len()) {
                let p: Vec<i64> =
                    (0..q.n_arrows()).map(|a| rows.iter().zip(&lam).map(|(r, l)| r[a] * l).sum()).collect();
                if thirds(&p) {
                    simplices.insert(p);
                }
            }
        }
        c.check(brute == simplices, format!("{name}: {} turbulence points vs {} in clique simplices", brute.len(), simplices.len()));
        sizes.push(format!("{name} {}", brute.len()));
    }
    c.note(format!("points at denominator <= 3: {}", sizes.join(", ")));
    c
}

type Criterion = fn() -> Checks;

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("C1 Kronecker presentation", c1_kronecker_presentation),
        ("C2 Kronecker dissections", c2_kronecker_dissections),
        ("C3 shard quiver", c3_shard),
        ("C4 flow algorithm goldens", c4_flow_goldens),
        ("C5 double Kronecker", c5_double_kronecker),
        ("C6 property suite", c6_properties),
        ("C7 bridge equivalence", c7_bridge),
        ("C8 lattice-point oracle", c8_lattice_oracle),
    ];
    let mut unexpected = Vec::new();
    for (title, run) in criteria {
        let r = run();
        let status = if r.fails.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} {title} [exact] {}", r.notes.join("; "));
        for f in &r.fails {
            let known = KNOWN_DIVERGENCES.iter().any(|k| f.starts_with(k));
            println!("     {} {f}", if known { "known:" } else { "error:" });
            if !known {
                unexpected.push(format!("{title}: {f}"));
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:#?}");
        std::process::exit(1);
    }
}
