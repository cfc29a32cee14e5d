//! Shortest paths on the arc graph of a complex and the four-path boundary cycle.
//!
//! Arcs are traversable in both directions; a stored arc direction only
//! matters for the coherence sign recorded along a path.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Cuboid;
use crate::ip_solver::BinaryProgram;
use crate::voronoi::CellComplex;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("no path from vertex {0} to vertex {1} under the arc filter")]
    Unreachable(usize, usize),
    #[error("start and end vertex coincide ({0})")]
    SameEndpoints(usize),
    #[error("degenerate cycle: {0}")]
    DegenerateCycle(String),
    #[error("no complex vertex on vertical cuboid edge {0}")]
    MissingEdgeVertex(usize),
    #[error("arc {0} has non-positive weight")]
    NonPositiveWeight(usize),
}

/// `v0, a0, v1, …, a_{k-1}, v_k`; `arcs[i]` joins `vertices[i]` to `vertices[i+1]`
/// and carries `+1` when traversed from its tail to its head.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub arcs: Vec<(usize, i8)>,
    pub weight: f64,
}

/// Closed path without repeated vertices. `arcs[i]` joins `vertices[i]` to
/// `vertices[(i+1) % len]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub vertices: Vec<usize>,
    pub arcs: Vec<(usize, i8)>,
}

impl Cycle {
    /// Builds the cycle through `vertices` (not repeating the first at the end).
    pub fn from_vertices(k: &CellComplex, vertices: Vec<usize>) -> Result<Cycle, PathError> {
        if vertices.len() < 3 {
            return Err(PathError::DegenerateCycle(format!("{} vertices", vertices.len())));
        }
        let adj = k.vertex_adjacency();
        let n = vertices.len();
        let arcs = (0..n)
            .map(|i| {
                let (u, v) = (vertices[i], vertices[(i + 1) % n]);
                let a = adj[u]
                    .iter()
                    .find(|&&(w, _)| w == v)
                    .map(|&(_, a)| a)
                    .ok_or_else(|| PathError::DegenerateCycle(format!("vertices {u} and {v} are not adjacent")))?;
                Ok((a, if k.arcs[a].tail == u { 1 } else { -1 }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let c = Cycle { vertices, arcs };
        c.check_simple()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn weight(&self, k: &CellComplex) -> f64 {
        self.arcs.iter().map(|&(a, _)| k.arcs[a].weight).sum()
    }

    /// Signed arc chain of the cycle, ascending by arc id.
    pub fn chain(&self) -> Vec<(usize, i32)> {
        let mut c: Vec<(usize, i32)> = self.arcs.iter().map(|&(a, s)| (a, s as i32)).collect();
        c.sort_unstable();
        c
    }

    /// Every vertex has exactly two incident cycle arcs and no arc repeats.
    pub fn check_simple(&self) -> Result<(), PathError> {
        if self.vertices.len() != self.arcs.len() || self.vertices.len() < 3 {
            return Err(PathError::DegenerateCycle("cycle needs at least three arcs".into()));
        }
        let mut seen = self.vertices.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(PathError::DegenerateCycle("repeated vertex".into()));
        }
        let mut arcs: Vec<usize> = self.arcs.iter().map(|&(a, _)| a).collect();
        arcs.sort_unstable();
        if arcs.windows(2).any(|w| w[0] == w[1]) {
            return Err(PathError::DegenerateCycle("repeated arc".into()));
        }
        Ok(())
    }

    /// Checks that consecutive arcs join consecutive vertices with the recorded sign.
    pub fn is_consistent_with(&self, k: &CellComplex) -> bool {
        let n = self.vertices.len();
        self.arcs.iter().enumerate().all(|(i, &(a, s))| {
            let (u, v) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let arc = &k.arcs[a];
            (s > 0 && arc.tail == u && arc.head == v) || (s < 0 && arc.head == u && arc.tail == v)
        })
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    vertex: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn distances_to(k: &CellComplex, adj: &[Vec<(usize, usize)>], t: usize, filter: &dyn Fn(usize) -> bool) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; k.vertices.len()];
    let mut heap = BinaryHeap::new();
    dist[t] = 0.0;
    heap.push(Entry { dist: 0.0, vertex: t });
    while let Some(Entry { dist: d, vertex: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, a) in &adj[u] {
            if !filter(a) {
                continue;
            }
            let nd = d + k.arcs[a].weight;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Entry { dist: nd, vertex: v });
            }
        }
    }
    dist
}

/// Shortest `s`–`t` path over arcs accepted by `arc_filter`.
///
/// Among equal-weight paths the lexicographically smallest vertex sequence
/// wins: distances to `t` are computed first, then the path is walked from
/// `s`, always stepping to the smallest-id neighbour that stays on a
/// shortest path.
pub fn dijkstra(
    k: &CellComplex,
    s: usize,
    t: usize,
    arc_filter: impl Fn(usize) -> bool,
) -> Result<Path, PathError> {
    let adj = k.vertex_adjacency();
    dijkstra_with_adjacency(k, &adj, s, t, &arc_filter)
}

fn dijkstra_with_adjacency(
    k: &CellComplex,
    adj: &[Vec<(usize, usize)>],
    s: usize,
    t: usize,
    arc_filter: &dyn Fn(usize) -> bool,
) -> Result<Path, PathError> {
    if s == t {
        return Err(PathError::SameEndpoints(s));
    }
    if let Some(a) = (0..k.arcs.len()).find(|&a| arc_filter(a) && !(k.arcs[a].weight > 0.0)) {
        return Err(PathError::NonPositiveWeight(a));
    }
    let dist = distances_to(k, adj, t, arc_filter);
    if !dist[s].is_finite() {
        return Err(PathError::Unreachable(s, t));
    }
    let tol = |d: f64| 1e-12 * d.max(1.0);
    let mut vertices = vec![s];
    let mut arcs = Vec::new();
    let mut u = s;
    while u != t {
        let (v, a) = adj[u]
            .iter()
            .copied()
            .find(|&(v, a)| arc_filter(a) && dist[v] + k.arcs[a].weight <= dist[u] + tol(dist[u]) && dist[v] < dist[u])
            .expect("a finite distance always has a tight predecessor");
        arcs.push((a, if k.arcs[a].tail == u { 1 } else { -1 }));
        vertices.push(v);
        u = v;
    }
    let weight = arcs.iter().map(|&(a, _)| k.arcs[a].weight).sum();
    Ok(Path { vertices, arcs, weight })
}

/// Complex vertices on the four vertical (z-parallel) cuboid edges, in the
/// order (0,0), (d1,0), (d1,d2), (0,d2).
pub fn vertical_edge_vertices(k: &CellComplex, q: &Cuboid) -> [Vec<usize>; 4] {
    let tol = 1e-9 * q.diameter();
    let corners = [(0.0, 0.0), (q.d1, 0.0), (q.d1, q.d2), (0.0, q.d2)];
    corners.map(|(x, y)| {
        (0..k.vertices.len())
            .filter(|&v| (k.vertices[v].x - x).abs() <= tol && (k.vertices[v].y - y).abs() <= tol)
            .collect()
    })
}

/// Chooses one vertex per vertical cuboid edge at the given relative heights and
/// joins them by shortest paths over boundary arcs: u1→u2→u3→u4→u1.
///
/// Where consecutive paths run back over each other the closed walk is reduced
/// by cancelling the backtracks, which keeps its arc chain. Any remaining
/// self-intersection is loop-erased; a residue that is not a simple cycle is
/// rejected. After reduction the cycle need not pass through every `u_i`.
pub fn boundary_cycle(k: &CellComplex, q: &Cuboid, heights: [f64; 4]) -> Result<Cycle, PathError> {
    let (cycle, _) = boundary_cycle_with_paths(k, q, heights)?;
    Ok(cycle)
}

/// As [`boundary_cycle`], also returning the four shortest paths.
pub fn boundary_cycle_with_paths(k: &CellComplex, q: &Cuboid, heights: [f64; 4]) -> Result<(Cycle, Vec<Path>), PathError> {
    let edges = vertical_edge_vertices(k, q);
    let mut u = [0usize; 4];
    for i in 0..4 {
        let target = heights[i].clamp(0.0, 1.0) * q.d3;
        u[i] = *edges[i]
            .iter()
            .min_by(|&&a, &&b| {
                let (za, zb) = (k.vertices[a].z, k.vertices[b].z);
                (za - target).abs().total_cmp(&(zb - target).abs()).then(za.total_cmp(&zb)).then(a.cmp(&b))
            })
            .ok_or(PathError::MissingEdgeVertex(i))?;
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if u[i] == u[j] {
                return Err(PathError::DegenerateCycle(format!("u{} and u{} coincide", i + 1, j + 1)));
            }
        }
    }
    let boundary = k.boundary_arcs();
    let adj = k.vertex_adjacency();
    let filter = |a: usize| boundary[a];
    let paths = (0..4)
        .map(|i| dijkstra_with_adjacency(k, &adj, u[i], u[(i + 1) % 4], &filter))
        .collect::<Result<Vec<_>, _>>()?;

    let mut walk: Vec<usize> = Vec::new();
    for p in &paths {
        walk.extend_from_slice(&p.vertices[..p.vertices.len() - 1]);
    }
    let mut reduced = cancel_backtracks(&walk);
    if reduced.iter().collect::<std::collections::HashSet<_>>().len() != reduced.len() {
        warn!("boundary walk still self-intersects after backtrack cancellation; erasing loops");
        reduced = erase_loops(&reduced);
    }
    let cycle = Cycle::from_vertices(k, reduced)?;
    Ok((cycle, paths))
}

/// Cyclic free reduction of a closed walk: every immediate reversal `v, w, v`
/// is cancelled, including across the closing vertex. The arc chain of the
/// walk is unchanged.
fn cancel_backtracks(walk: &[usize]) -> Vec<usize> {
    let Some(&first) = walk.first() else { return Vec::new() };
    let mut st: Vec<usize> = Vec::with_capacity(walk.len() + 1);
    for &v in walk.iter().chain(std::iter::once(&first)) {
        if st.len() >= 2 && st[st.len() - 2] == v {
            st.pop();
        } else {
            st.push(v);
        }
    }
    // st runs from `first` back to `first`; peel spurs hanging off the base vertex
    let (mut lo, mut hi) = (0, st.len() - 1);
    while hi >= lo + 2 && st[lo + 1] == st[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    st[lo..hi].to_vec()
}

/// Chronological loop erasure of a closed walk (first vertex not repeated at the end).
fn erase_loops(walk: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    let mut pos: HashMap<usize, usize> = HashMap::new();
    for &v in walk {
        if let Some(&i) = pos.get(&v) {
            for w in out.drain(i + 1..) {
                pos.remove(&w);
            }
        } else {
            pos.insert(v, out.len());
            out.push(v);
        }
    }
    out
}

/// Shortest path as a 0/1 program: vertex-arc incidence rows `B x = p`, with one
/// variable per traversal direction of every accepted arc.
///
/// Variable `2i` traverses the `i`-th accepted arc tail→head, `2i+1` head→tail.
/// Vertices without accepted arcs get no row unless they are `s` or `t`.
pub fn spp_as_ip(k: &CellComplex, s: usize, t: usize, arc_filter: impl Fn(usize) -> bool) -> (BinaryProgram, Vec<(usize, i8)>) {
    let accepted: Vec<usize> = (0..k.arcs.len()).filter(|&a| arc_filter(a)).collect();
    let mut rows: Vec<Vec<(usize, i8)>> = vec![Vec::new(); k.vertices.len()];
    let mut prog = BinaryProgram::new();
    let mut var_arcs = Vec::with_capacity(2 * accepted.len());
    for &a in &accepted {
        let arc = &k.arcs[a];
        for (dir, from, to) in [(1i8, arc.tail, arc.head), (-1, arc.head, arc.tail)] {
            let x = prog.add_var(arc.weight, format!("x_{a}{}", if dir > 0 { "f" } else { "r" }));
            rows[from].push((x, 1));
            rows[to].push((x, -1));
            var_arcs.push((a, dir));
        }
    }
    for (v, row) in rows.into_iter().enumerate() {
        let rhs = if v == s { 1 } else if v == t { -1 } else { 0 };
        if !row.is_empty() || rhs != 0 {
            prog.add_row(row, rhs);
        }
    }
    (prog, var_arcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voronoi::{Arc, Facet};
    use glam::DVec3;

    /// Bare graph wrapped in a complex (no facets or cells).
    pub(crate) fn graph(n: usize, edges: &[(usize, usize, f64)]) -> CellComplex {
        CellComplex {
            vertices: (0..n).map(|i| DVec3::new(i as f64, 0.0, 0.0)).collect(),
            arcs: edges.iter().map(|&(tail, head, weight)| Arc { tail, head, weight }).collect(),
            facets: Vec::<Facet>::new(),
            cells: Vec::new(),
        }
    }

    #[test]
    fn single_arc() {
        let k = graph(2, &[(0, 1, 3.0)]);
        let p = dijkstra(&k, 0, 1, |_| true).unwrap();
        assert_eq!(p.weight, 3.0);
        assert_eq!(p.arcs, vec![(0, 1)]);
        let back = dijkstra(&k, 1, 0, |_| true).unwrap();
        assert_eq!(back.arcs, vec![(0, -1)]);
    }

    #[test]
    fn triangle_prefers_two_hops() {
        // s=0, t=1: direct arc weight 3, via vertex 2 weight 1 + 1.
        let k = graph(3, &[(0, 1, 3.0), (0, 2, 1.0), (2, 1, 1.0)]);
        let p = dijkstra(&k, 0, 1, |_| true).unwrap();
        assert_eq!(p.weight, 2.0);
        assert_eq!(p.vertices, vec![0, 2, 1]);
    }

    #[test]
    fn ties_take_the_smallest_vertex_sequence() {
        // Square 0-1-3, 0-2-3 both weight 2.
        let k = graph(4, &[(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)]);
        assert_eq!(dijkstra(&k, 0, 3, |_| true).unwrap().vertices, vec![0, 1, 3]);
    }

    #[test]
    fn filter_can_disconnect() {
        let k = graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(dijkstra(&k, 0, 2, |a| a != 1), Err(PathError::Unreachable(0, 2)));
        assert_eq!(dijkstra(&k, 1, 1, |_| true), Err(PathError::SameEndpoints(1)));
    }

    #[test]
    fn backtrack_cancellation() {
        assert_eq!(cancel_backtracks(&[1, 2, 3, 4]), vec![1, 2, 3, 4]);
        // spur 3-5-3 in the middle
        assert_eq!(cancel_backtracks(&[1, 2, 3, 5, 3, 4]), vec![1, 2, 3, 4]);
        // spur through the base vertex: 0-1 and back at the end
        assert_eq!(cancel_backtracks(&[0, 1, 2, 3, 4, 1]), vec![1, 2, 3, 4]);
        assert!(cancel_backtracks(&[7, 8, 9, 10, 11, 10, 9, 8]).is_empty());
        assert!(cancel_backtracks(&[1, 2]).len() < 3);
    }

    #[test]
    fn loop_erasure() {
        assert_eq!(erase_loops(&[1, 2, 3, 4]), vec![1, 2, 3, 4]);
        assert_eq!(erase_loops(&[1, 2, 3, 2, 4]), vec![1, 2, 4]);
        assert_eq!(erase_loops(&[1, 2, 3, 4, 5, 3, 6]), vec![1, 2, 3, 6]);
    }

    #[test]
    fn spp_program_shape() {
        let k = graph(2, &[(0, 1, 3.0)]);
        let (prog, vars) = spp_as_ip(&k, 0, 1, |_| true);
        assert_eq!(prog.n_vars(), 2);
        assert_eq!(prog.n_rows(), 2);
        assert_eq!(vars, vec![(0, 1), (0, -1)]);
        let sol = crate::ip_solver::solve_binary(&prog, &Default::default()).unwrap();
        assert_eq!(sol.objective, 3.0);
        assert_eq!(sol.assignment, vec![true, false]);
    }
}
