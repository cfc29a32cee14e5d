#![allow(dead_code)]

use std::collections::HashSet;

use crackgen_core::voronoi::{Arc, CellComplex, Facet};
use crackgen_core::{BinaryVolume, DVec3, LabelVolume};
use rand::seq::SliceRandom;
use rand::Rng;

/// Facet-less complex on `n` vertices, arcs stored from lower id to higher.
pub fn graph(n: usize, edges: &[(usize, usize, f64)]) -> CellComplex {
    CellComplex {
        vertices: (0..n).map(|i| DVec3::new(i as f64, 0.0, 0.0)).collect(),
        arcs: edges
            .iter()
            .map(|&(a, b, weight)| Arc { tail: a.min(b), head: a.max(b), weight })
            .collect(),
        facets: Vec::<Facet>::new(),
        cells: Vec::new(),
    }
}

/// Connected simple graph: random spanning tree plus extra edges, integer weights in 1..=20.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize) -> CellComplex {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for i in 1..n {
        let j = order[rng.random_range(0..i)];
        let (a, b) = (order[i].min(j), order[i].max(j));
        seen.insert((a, b));
        edges.push((a, b, f64::from(rng.random_range(1..=20u32))));
    }
    let extra = rng.random_range(0..=2 * n);
    for _ in 0..extra {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b && seen.insert((a.min(b), a.max(b))) {
            edges.push((a.min(b), a.max(b), f64::from(rng.random_range(1..=20u32))));
        }
    }
    graph(n, &edges)
}

/// Bellman-Ford distance from `s` to `t` over undirected arcs.
pub fn bellman_ford(k: &CellComplex, s: usize, t: usize) -> Option<f64> {
    let mut d = vec![f64::INFINITY; k.vertices.len()];
    d[s] = 0.0;
    for _ in 0..k.vertices.len() {
        let mut changed = false;
        for a in &k.arcs {
            for (u, v) in [(a.tail, a.head), (a.head, a.tail)] {
                if d[u] + a.weight < d[v] {
                    d[v] = d[u] + a.weight;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    d[t].is_finite().then_some(d[t])
}

/// Net coefficient per arc of a facet selection given as one state per facet (0, +1, -1).
fn chain_of(k: &CellComplex, states: &[i8]) -> Vec<i32> {
    let mut net = vec![0i32; k.arcs.len()];
    for (f, &s) in states.iter().enumerate() {
        for &(a, c) in &k.facets[f].arcs {
            net[a] += i32::from(s) * i32::from(c);
        }
    }
    net
}

/// Plain enumeration over all `2^(2F)` orientation-variable vectors. Only for tiny complexes.
pub fn msp_brute_force_full(k: &CellComplex, q: &[i32]) -> Option<f64> {
    let f = k.facets.len();
    assert!(2 * f <= 24, "{f} facets is too many for full enumeration");
    let mut best: Option<f64> = None;
    for mask in 0u64..(1u64 << (2 * f)) {
        let mut net = vec![0i32; k.arcs.len()];
        let mut w = 0.0;
        for fi in 0..f {
            for (bit, s) in [(2 * fi, 1i32), (2 * fi + 1, -1i32)] {
                if mask >> bit & 1 == 1 {
                    w += k.facets[fi].weight;
                    for &(a, c) in &k.facets[fi].arcs {
                        net[a] += s * i32::from(c);
                    }
                }
            }
        }
        if net == q && best.is_none_or(|b| w < b) {
            best = Some(w);
        }
    }
    best
}

/// Exhaustive enumeration of facet states {off, +, -} with feasibility-only pruning.
///
/// Selecting a facet in both orientations adds nothing to the boundary and costs `2w > 0`,
/// so every such vector is dominated by the one with that facet switched off.
pub fn msp_brute_force(k: &CellComplex, q: &[i32]) -> Option<f64> {
    let nf = k.facets.len();
    let mut arc_facets = vec![Vec::new(); k.arcs.len()];
    for (f, fac) in k.facets.iter().enumerate() {
        for &(a, c) in &fac.arcs {
            arc_facets[a].push((f, c));
        }
    }
    // order facets so that arcs close early
    let mut order = Vec::with_capacity(nf);
    let mut placed = vec![false; nf];
    let mut touched = vec![false; k.arcs.len()];
    while order.len() < nf {
        let next = (0..nf)
            .filter(|&f| !placed[f])
            .max_by_key(|&f| (k.facets[f].arcs.iter().filter(|&&(a, _)| touched[a]).count(), std::cmp::Reverse(f)))
            .unwrap();
        placed[next] = true;
        order.push(next);
        for &(a, _) in &k.facets[next].arcs {
            touched[a] = true;
        }
    }
    let mut pos = vec![0; nf];
    for (i, &f) in order.iter().enumerate() {
        pos[f] = i;
    }
    // close[i]: arcs whose last incident facet in the order is order[i]
    let mut close = vec![Vec::new(); nf];
    for (a, fs) in arc_facets.iter().enumerate() {
        match fs.iter().map(|&(f, _)| pos[f]).max() {
            Some(last) => close[last].push(a),
            None => assert_eq!(q[a], 0, "arc {a} has no facet but nonzero demand"),
        }
    }
    let mut remaining: Vec<i32> = arc_facets.iter().map(|fs| fs.len() as i32).collect();
    let mut net = vec![0i32; k.arcs.len()];
    let mut best: Option<f64> = None;
    let mut states = vec![0i8; nf];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        w: f64,
        k: &CellComplex,
        q: &[i32],
        order: &[usize],
        close: &[Vec<usize>],
        remaining: &mut [i32],
        net: &mut [i32],
        states: &mut [i8],
        best: &mut Option<f64>,
    ) {
        if i == order.len() {
            if best.is_none_or(|b| w < b) {
                *best = Some(w);
            }
            return;
        }
        let f = order[i];
        for s in [0i8, 1, -1] {
            let mut ok = true;
            for &(a, c) in &k.facets[f].arcs {
                net[a] += i32::from(s) * i32::from(c);
                remaining[a] -= 1;
                if (q[a] - net[a]).abs() > remaining[a] {
                    ok = false;
                }
            }
            if ok {
                ok = close[i].iter().all(|&a| net[a] == q[a]);
            }
            if ok {
                states[f] = s;
                let add = if s != 0 { k.facets[f].weight } else { 0.0 };
                rec(i + 1, w + add, k, q, order, close, remaining, net, states, best);
                states[f] = 0;
            }
            for &(a, c) in &k.facets[f].arcs {
                net[a] -= i32::from(s) * i32::from(c);
                remaining[a] += 1;
            }
        }
    }
    rec(0, 0.0, k, q, &order, &close, &mut remaining, &mut net, &mut states, &mut best);
    best
}

/// Dense right-hand side from a sparse `(arc, coefficient)` chain.
pub fn dense_chain(n_arcs: usize, chain: &[(usize, i32)]) -> Vec<i32> {
    let mut q = vec![0; n_arcs];
    for &(a, c) in chain {
        q[a] += c;
    }
    q
}

pub fn states_boundary(k: &CellComplex, states: &[i8]) -> Vec<i32> {
    chain_of(k, states)
}

/// Rule-by-rule evaluation over every ordered pair of 26-neighbours.
pub fn naive_surface_raster(labels: &LabelVolume, pairs: &HashSet<(u32, u32)>) -> BinaryVolume {
    let [d1, d2, d3] = labels.dims();
    let mut out = BinaryVolume::new(labels.dims());
    for x in 0..d1 {
        for y in 0..d2 {
            for z in 0..d3 {
                for dx in -1i64..=1 {
                    for dy in -1i64..=1 {
                        for dz in -1i64..=1 {
                            if (dx, dy, dz) == (0, 0, 0) {
                                continue;
                            }
                            let (x2, y2, z2) = (x as i64 + dx, y as i64 + dy, z as i64 + dz);
                            if x2 < 0 || y2 < 0 || z2 < 0 || x2 >= d1 as i64 || y2 >= d2 as i64 || z2 >= d3 as i64 {
                                continue;
                            }
                            let j = labels.get(x, y, z);
                            let k = labels.get(x2 as usize, y2 as usize, z2 as usize);
                            if pairs.contains(&(j, k)) || pairs.contains(&(k, j)) {
                                out.set(x, y, z, 1);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Linear-scan nearest generator (ties to the lowest id) at voxel centres.
pub fn naive_labels(gens: &[DVec3], extent: DVec3, dims: [usize; 3]) -> LabelVolume {
    let mut out = LabelVolume::new(dims);
    for x in 0..dims[0] {
        for y in 0..dims[1] {
            for z in 0..dims[2] {
                let p = DVec3::new(
                    (x as f64 + 0.5) * extent.x / dims[0] as f64,
                    (y as f64 + 0.5) * extent.y / dims[1] as f64,
                    (z as f64 + 0.5) * extent.z / dims[2] as f64,
                );
                let mut best = 0;
                for (i, g) in gens.iter().enumerate() {
                    if g.distance_squared(p) < gens[best].distance_squared(p) {
                        best = i;
                    }
                }
                out.set(x, y, z, best as u32);
            }
        }
    }
    out
}

/// Applies the 2×2 element (offsets {0,1}²) `times` times to slice `x`, one pass at a time.
pub fn naive_dilate_slice(v: &mut BinaryVolume, x: usize, times: usize) {
    let [_, d2, d3] = v.dims();
    for _ in 0..times {
        let snapshot: Vec<(usize, usize)> =
            (0..d2).flat_map(|y| (0..d3).map(move |z| (y, z))).filter(|&(y, z)| v.get(x, y, z) != 0).collect();
        for (y, z) in snapshot {
            for (oy, oz) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                if y + oy < d2 && z + oz < d3 {
                    v.set(x, y + oy, z + oz, 1);
                }
            }
        }
    }
}

/// Per-voxel recount of the zero-padded `(2r+1)³` window.
pub fn naive_median(v: &BinaryVolume, r: usize) -> BinaryVolume {
    let [d1, d2, d3] = v.dims();
    let r = r as i64;
    let window = (2 * r + 1).pow(3);
    let mut out = BinaryVolume::new(v.dims());
    for x in 0..d1 as i64 {
        for y in 0..d2 as i64 {
            for z in 0..d3 as i64 {
                let mut n = 0;
                for a in x - r..=x + r {
                    for b in y - r..=y + r {
                        for c in z - r..=z + r {
                            if a >= 0 && b >= 0 && c >= 0 && a < d1 as i64 && b < d2 as i64 && c < d3 as i64 {
                                n += i64::from(v.get(a as usize, b as usize, c as usize));
                            }
                        }
                    }
                }
                out.set(x as usize, y as usize, z as usize, u8::from(2 * n > window));
            }
        }
    }
    out
}

pub fn random_binary<R: Rng>(rng: &mut R, dims: [usize; 3], density: f64) -> BinaryVolume {
    let data = (0..dims[0] * dims[1] * dims[2]).map(|_| u8::from(rng.random::<f64>() < density)).collect();
    BinaryVolume::from_vec(dims, data).unwrap()
}

/// Crack voxels plus their 26-neighbourhood.
pub fn halo(gt: &BinaryVolume) -> Vec<bool> {
    let mut h = vec![false; gt.len()];
    for i in 0..gt.len() {
        if gt.data()[i] != 0 {
            h[i] = true;
            for n in gt.neighbors26(i) {
                h[n] = true;
            }
        }
    }
    h
}
