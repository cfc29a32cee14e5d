//! The cellular complex `K = (V, A, F, C)` of a bounded Voronoi diagram.
//!
//! Arcs are stored once with an arbitrary direction (lower vertex id to
//! higher). A facet is a loop of `(arc, coherence)` pairs; coherence is `+1`
//! when the loop runs from the arc's tail to its head. Facets are stored
//! counterclockwise as seen from the incident cell with the smaller
//! generator id (boundary facets: as seen from inside the cuboid), so the
//! stored normal points into that cell.

use std::collections::{BTreeMap, HashMap};

use glam::DVec3;
use serde::{Deserialize, Serialize};

use super::{FaceNeighbor, VoronoiCell, VoronoiError};
use crate::geometry::polygon_area;

#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub arcs: Vec<(usize, i8)>,
    pub weight: f64,
    pub on_boundary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub generator_id: usize,
    /// `(facet, side)`; side is `+1` when the stored facet orientation points out of this cell.
    pub facets: Vec<(usize, i8)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellComplex {
    pub vertices: Vec<DVec3>,
    pub arcs: Vec<Arc>,
    pub facets: Vec<Facet>,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcWeight {
    #[default]
    Unit,
    Length,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FacetWeight {
    #[default]
    Unit,
    Area,
}

impl CellComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.arcs.len() as i64 + self.facets.len() as i64 - self.cells.len() as i64
    }

    /// Vertex sequence of a facet loop, following coherence signs.
    pub fn facet_vertex_loop(&self, f: usize) -> Vec<usize> {
        self.facets[f]
            .arcs
            .iter()
            .map(|&(a, s)| if s > 0 { self.arcs[a].tail } else { self.arcs[a].head })
            .collect()
    }

    pub fn facet_points(&self, f: usize) -> Vec<DVec3> {
        self.facet_vertex_loop(f).into_iter().map(|v| self.vertices[v]).collect()
    }

    pub fn facet_area(&self, f: usize) -> f64 {
        polygon_area(&self.facet_points(f))
    }

    pub fn arc_length(&self, a: usize) -> f64 {
        self.vertices[self.arcs[a].tail].distance(self.vertices[self.arcs[a].head])
    }

    /// Generator ids of the cells incident to each facet (one or two, ascending).
    pub fn facet_cells(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::with_capacity(2); self.facets.len()];
        for cell in &self.cells {
            for &(f, _) in &cell.facets {
                out[f].push(cell.generator_id);
            }
        }
        out.iter_mut().for_each(|c| c.sort_unstable());
        out
    }

    /// `true` for arcs lying on the cuboid boundary (edges of boundary facets).
    pub fn boundary_arcs(&self) -> Vec<bool> {
        let mut out = vec![false; self.arcs.len()];
        for f in self.facets.iter().filter(|f| f.on_boundary) {
            for &(a, _) in &f.arcs {
                out[a] = true;
            }
        }
        out
    }

    /// `(neighbour, arc)` lists per vertex, ascending by neighbour id.
    pub fn vertex_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (i, a) in self.arcs.iter().enumerate() {
            adj[a.tail].push((a.head, i));
            adj[a.head].push((a.tail, i));
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        adj
    }

    pub fn arc_between(&self, u: usize, v: usize) -> Option<(usize, i8)> {
        // Linear scan is fine for one-off lookups; bulk callers use `vertex_adjacency`.
        self.arcs.iter().position(|a| a.tail == u && a.head == v).map(|i| (i, 1)).or_else(|| {
            self.arcs.iter().position(|a| a.tail == v && a.head == u).map(|i| (i, -1))
        })
    }

    /// Structural checks: closed facet loops, facet/cell incidence, positive weights, Euler relation.
    pub fn validate(&self) -> Result<(), VoronoiError> {
        let bad = |m: String| Err(VoronoiError::InconsistentGeometry(m));
        for (i, f) in self.facets.iter().enumerate() {
            if f.arcs.len() < 3 {
                return bad(format!("facet {i} has {} arcs", f.arcs.len()));
            }
            let loop_ = self.facet_vertex_loop(i);
            for (k, &(a, s)) in f.arcs.iter().enumerate() {
                let head = if s > 0 { self.arcs[a].head } else { self.arcs[a].tail };
                if head != loop_[(k + 1) % loop_.len()] {
                    return bad(format!("facet {i} loop is not closed at position {k}"));
                }
            }
            if !(f.weight > 0.0) {
                return Err(VoronoiError::ZeroWeight(format!("facet {i}")));
            }
        }
        if let Some(i) = self.arcs.iter().position(|a| !(a.weight > 0.0)) {
            return Err(VoronoiError::ZeroWeight(format!("arc {i}")));
        }
        for (i, cells) in self.facet_cells().iter().enumerate() {
            let want = if self.facets[i].on_boundary { 1 } else { 2 };
            if cells.len() != want {
                return bad(format!("facet {i} has {} incident cells, expected {want}", cells.len()));
            }
        }
        if self.euler_characteristic() != 1 {
            return bad(format!("Euler characteristic {} != 1", self.euler_characteristic()));
        }
        Ok(())
    }
}

/// Welds vertices closer than `eps` into one id, in insertion order.
struct Welder {
    eps: f64,
    grid: HashMap<(i64, i64, i64), Vec<usize>>,
    points: Vec<DVec3>,
}

impl Welder {
    fn new(eps: f64) -> Self {
        Welder { eps, grid: HashMap::new(), points: Vec::new() }
    }

    fn key(&self, p: DVec3) -> (i64, i64, i64) {
        ((p.x / self.eps).floor() as i64, (p.y / self.eps).floor() as i64, (p.z / self.eps).floor() as i64)
    }

    fn insert(&mut self, p: DVec3) -> usize {
        let (kx, ky, kz) = self.key(p);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.grid.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &i in ids {
                            let d = self.points[i].distance(p);
                            if d <= self.eps && best.is_none_or(|(bd, bi)| (d, i) < (bd, bi)) {
                                best = Some((d, i));
                            }
                        }
                    }
                }
            }
        }
        if let Some((_, i)) = best {
            return i;
        }
        let id = self.points.len();
        self.points.push(p);
        self.grid.entry((kx, ky, kz)).or_default().push(id);
        id
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum FacetKey {
    Interior(usize, usize),
    Boundary(usize, usize),
}

#[derive(Default)]
struct FacetSides {
    canonical: Option<Vec<usize>>,
    other: Option<Vec<usize>>,
}

fn clean_loop(mut l: Vec<usize>) -> Vec<usize> {
    l.dedup();
    while l.len() > 1 && l.first() == l.last() {
        l.pop();
    }
    l
}

/// Builds the complex from bounded Voronoi cells, merging vertices within `eps`.
/// All weights start at one.
pub fn extract_complex(cells: &[VoronoiCell], eps: f64) -> Result<CellComplex, VoronoiError> {
    let inconsistent = |m: String| VoronoiError::InconsistentGeometry(m);
    let mut welder = Welder::new(eps);
    let mut sides: BTreeMap<FacetKey, FacetSides> = BTreeMap::new();

    for cell in cells {
        let i = cell.generator_id;
        let ids: Vec<usize> = cell.vertices.iter().map(|&p| welder.insert(p)).collect();
        for (face, &nb) in cell.faces.iter().zip(&cell.neighbors) {
            let l = clean_loop(face.iter().map(|&v| ids[v]).collect());
            if l.len() < 3 {
                continue;
            }
            let (key, canonical_side) = match nb {
                FaceNeighbor::Cell(j) if j == i => return Err(inconsistent(format!("cell {i} borders itself"))),
                FaceNeighbor::Cell(j) => (FacetKey::Interior(i.min(j), i.max(j)), i < j),
                FaceNeighbor::Boundary(b) => (FacetKey::Boundary(i, b), true),
            };
            let entry = sides.entry(key).or_default();
            let slot = if canonical_side { &mut entry.canonical } else { &mut entry.other };
            if slot.is_some() {
                return Err(inconsistent(format!("duplicate face {key:?}")));
            }
            *slot = Some(if canonical_side { l.into_iter().rev().collect() } else { l });
        }
    }

    let mut arcs: Vec<Arc> = Vec::new();
    let mut arc_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut facets = Vec::with_capacity(sides.len());
    let mut cell_facets: Vec<Vec<(usize, i8)>> = vec![Vec::new(); cells.iter().map(|c| c.generator_id + 1).max().unwrap_or(0)];

    for (key, s) in sides {
        let loop_ = match (key, s.canonical, s.other) {
            (FacetKey::Boundary(..), Some(l), None) => l,
            (FacetKey::Interior(..), Some(l), Some(o)) => {
                let (mut a, mut b) = (l.clone(), o);
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    return Err(inconsistent(format!("facet {key:?} differs between its two cells")));
                }
                l
            }
            _ => return Err(inconsistent(format!("facet {key:?} is missing on one side"))),
        };
        let mut sorted = loop_.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(inconsistent(format!("facet {key:?} loop repeats a vertex")));
        }
        let n = loop_.len();
        let farcs = (0..n)
            .map(|k| {
                let (u, v) = (loop_[k], loop_[(k + 1) % n]);
                let (lo, hi) = (u.min(v), u.max(v));
                let id = *arc_ids.entry((lo, hi)).or_insert_with(|| {
                    arcs.push(Arc { tail: lo, head: hi, weight: 1.0 });
                    arcs.len() - 1
                });
                (id, if u == lo { 1 } else { -1 })
            })
            .collect();
        let fid = facets.len();
        match key {
            FacetKey::Interior(i, j) => {
                cell_facets[i].push((fid, -1));
                cell_facets[j].push((fid, 1));
            }
            FacetKey::Boundary(i, _) => cell_facets[i].push((fid, -1)),
        }
        facets.push(Facet { arcs: farcs, weight: 1.0, on_boundary: matches!(key, FacetKey::Boundary(..)) });
    }

    let complex = CellComplex {
        vertices: welder.points,
        arcs,
        facets,
        cells: cells.iter().map(|c| Cell { generator_id: c.generator_id, facets: cell_facets[c.generator_id].clone() }).collect(),
    };
    complex.validate()?;
    Ok(complex)
}

/// Sets arc weights to one or Euclidean length and facet weights to one or polygon area.
pub fn assign_weights(mut k: CellComplex, arc_mode: ArcWeight, facet_mode: FacetWeight) -> Result<CellComplex, VoronoiError> {
    for a in 0..k.arcs.len() {
        let w = match arc_mode {
            ArcWeight::Unit => 1.0,
            ArcWeight::Length => k.arc_length(a),
        };
        if !(w > 0.0) {
            return Err(VoronoiError::ZeroWeight(format!("arc {a} has length {w}")));
        }
        k.arcs[a].weight = w;
    }
    for f in 0..k.facets.len() {
        let w = match facet_mode {
            FacetWeight::Unit => 1.0,
            FacetWeight::Area => k.facet_area(f),
        };
        if !(w > 0.0) {
            return Err(VoronoiError::ZeroWeight(format!("facet {f} has area {w}")));
        }
        k.facets[f].weight = w;
    }
    Ok(k)
}
