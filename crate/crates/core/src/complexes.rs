//! Cliques, bundles and band-stable cliques over a bounded trail universe.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde_json::Value;

use crate::par;
use crate::quiver::FringedQuiver;
use crate::trails::{
    compatible, countercurrent_compare, enumerate_bands, enumerate_routes, format_trail, self_compatible, MarkedTrail,
    Trail,
};

/// Compatibility graph on a list of self-compatible trails.
#[derive(Clone, Debug)]
pub struct CompatGraph {
    pub trails: Vec<Trail>,
    pub adj: Vec<Vec<bool>>,
}

impl CompatGraph {
    pub fn new(q: &FringedQuiver, mut trails: Vec<Trail>) -> Self {
        trails.retain(|t| self_compatible(q, t));
        trails.sort();
        trails.dedup();
        let idx: Vec<usize> = (0..trails.len()).collect();
        let adj = par::map(&idx, |&i| (0..trails.len()).map(|j| i != j && compatible(q, &trails[i], &trails[j])).collect());
        CompatGraph { trails, adj }
    }

    pub fn len(&self) -> usize {
        self.trails.len()
    }
    pub fn is_empty(&self) -> bool {
        self.trails.is_empty()
    }

    /// Maximal cliques by Bron-Kerbosch with pivoting, as sorted index lists.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let all: Vec<usize> = (0..self.len()).collect();
        self.bk(&mut Vec::new(), all, Vec::new(), &mut out);
        out.sort();
        out
    }

    fn bk(&self, r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() {
            if x.is_empty() {
                let mut c = r.clone();
                c.sort();
                out.push(c);
            }
            return;
        }
        let pivot = *p
            .iter()
            .chain(&x)
            .max_by_key(|&&u| (p.iter().filter(|&&v| self.adj[u][v]).count(), std::cmp::Reverse(u)))
            .unwrap();
        let cands: Vec<usize> = p.iter().copied().filter(|&v| !self.adj[pivot][v]).collect();
        let (mut p, mut x) = (p, x);
        for v in cands {
            let np = p.iter().copied().filter(|&u| self.adj[v][u]).collect();
            let nx = x.iter().copied().filter(|&u| self.adj[v][u]).collect();
            r.push(v);
            self.bk(r, np, nx, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }

    pub fn pick(&self, ix: &[usize]) -> Vec<Trail> {
        ix.iter().map(|&i| self.trails[i].clone()).collect()
    }
}

/// `3|V_int| - |E_int|`, the size of every maximal clique.
pub fn max_clique_size(q: &FringedQuiver) -> usize {
    3 * q.n_internal() - q.n_internal_arrows()
}

/// Maximal cliques among self-compatible routes with at most `route_bound` arrows.
pub fn maximal_cliques(q: &FringedQuiver, route_bound: usize) -> Vec<Vec<Trail>> {
    let g = CompatGraph::new(q, enumerate_routes(q, route_bound));
    g.maximal_cliques().iter().map(|c| g.pick(c)).collect()
}

/// Maximal bundles among self-compatible routes and bands within the bounds.
pub fn maximal_bundles(q: &FringedQuiver, route_bound: usize, band_bound: usize) -> Vec<Vec<Trail>> {
    let mut ts = enumerate_routes(q, route_bound);
    ts.extend(enumerate_bands(q, band_bound));
    let g = CompatGraph::new(q, ts);
    g.maximal_cliques().iter().map(|c| g.pick(c)).collect()
}

/// Drops straight routes.
pub fn reduced(k: &[Trail]) -> Vec<Trail> {
    k.iter().filter(|t| !t.is_straight()).cloned().collect()
}

/// Arrows where some marking of `p` is the countercurrent maximum among the bundle's markings.
pub fn distinguished_arrows(q: &FringedQuiver, bundle: &[Trail], p: &Trail) -> Vec<usize> {
    let mut out = Vec::new();
    for a in 0..q.n_arrows() {
        if !p.uses(a) {
            continue;
        }
        let mut best: Option<(MarkedTrail, &Trail)> = None;
        for t in bundle {
            for m in MarkedTrail::markings(t, a) {
                let better = match &best {
                    None => true,
                    Some((b, _)) => countercurrent_compare(b, &m).map(|o| o == Ordering::Less).unwrap_or(false),
                };
                if better {
                    best = Some((m, t));
                }
            }
        }
        if best.is_some_and(|(_, t)| t == p) {
            out.push(a);
        }
    }
    out
}

/// Arrows used by no trail of `k`.
pub fn avoided_arrows(q: &FringedQuiver, k: &[Trail]) -> Vec<usize> {
    (0..q.n_arrows()).filter(|&a| k.iter().all(|t| !t.uses(a))).collect()
}

/// Whether band `b` is compatible with every route of `k`.
pub fn k_compatible(q: &FringedQuiver, k: &[Trail], b: &Trail) -> bool {
    k.iter().all(|r| compatible(q, r, b))
}

/// Band-stable cliques within the bounds.
///
/// A clique of full size is maximal and hence stable. A smaller clique `K` is stable
/// when it has a `K`-compatible band and every route `q` compatible with `K` kisses
/// some `K`-compatible band. Candidates are subsets of maximal cliques that keep
/// every straight route.
pub fn band_stable_cliques(q: &FringedQuiver, route_bound: usize, band_bound: usize) -> Vec<Vec<Trail>> {
    let g = CompatGraph::new(q, enumerate_routes(q, route_bound));
    let bands: Vec<Trail> = enumerate_bands(q, band_bound).into_iter().filter(|b| self_compatible(q, b)).collect();
    let full = max_clique_size(q);
    let straight: Vec<usize> = (0..g.len()).filter(|&i| g.trails[i].is_straight()).collect();
    let mut cands: BTreeSet<Vec<usize>> = BTreeSet::new();
    let maxes = g.maximal_cliques();
    for c in &maxes {
        let bend: Vec<usize> = c.iter().copied().filter(|&i| !g.trails[i].is_straight()).collect();
        if bend.len() > 16 {
            continue;
        }
        for mask in 0u32..(1 << bend.len()) {
            let mut k = straight.clone();
            k.extend((0..bend.len()).filter(|j| mask >> j & 1 == 1).map(|j| bend[j]));
            k.sort();
            cands.insert(k);
        }
    }
    let cands: Vec<Vec<usize>> = cands.into_iter().collect();
    let keep = par::map(&cands, |k| {
        if k.len() == full {
            return true;
        }
        let ks = g.pick(k);
        let kb: Vec<&Trail> = bands.iter().filter(|b| k_compatible(q, &ks, b)).collect();
        if kb.is_empty() {
            return false;
        }
        (0..g.len())
            .filter(|i| !k.contains(i) && k.iter().all(|&j| g.adj[*i][j]))
            .all(|i| kb.iter().any(|b| !compatible(q, &g.trails[i], b)))
    });
    cands.iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| g.pick(c)).collect()
}

pub fn trails_json(q: &FringedQuiver, k: &[Trail]) -> Value {
    Value::Array(k.iter().map(|t| Value::String(format_trail(q, t))).collect())
}
