//! Wavefront OBJ export of complexes, cycles and surfaces.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::graph_paths::Cycle;
use crate::minsurf::Surface;
use crate::voronoi::CellComplex;

/// Collects referenced complex vertices and renumbers them from 1 in first-use order.
struct ObjBuilder<'a> {
    k: &'a CellComplex,
    ids: BTreeMap<usize, usize>,
    order: Vec<usize>,
    body: String,
}

impl<'a> ObjBuilder<'a> {
    fn new(k: &'a CellComplex) -> Self {
        ObjBuilder { k, ids: BTreeMap::new(), order: Vec::new(), body: String::new() }
    }

    fn id(&mut self, v: usize) -> usize {
        let next = self.order.len() + 1;
        *self.ids.entry(v).or_insert_with(|| {
            self.order.push(v);
            next
        })
    }

    fn element(&mut self, tag: &str, verts: &[usize]) {
        let ids: Vec<String> = verts.iter().map(|&v| self.id(v).to_string()).collect();
        writeln!(self.body, "{tag} {}", ids.join(" ")).unwrap();
    }

    fn finish(self, header: &str) -> String {
        let mut out = format!("# {header}\n");
        for &v in &self.order {
            let p = self.k.vertices[v];
            writeln!(out, "v {} {} {}", p.x, p.y, p.z).unwrap();
        }
        out + &self.body
    }
}

/// Polygon faces for `(facet, orientation)` pairs; `-1` reverses the stored loop.
pub fn facets_obj(k: &CellComplex, facets: &[(usize, i8)], header: &str) -> String {
    let mut b = ObjBuilder::new(k);
    for &(f, s) in facets {
        let mut l = k.facet_vertex_loop(f);
        if s < 0 {
            l.reverse();
        }
        b.element("f", &l);
    }
    b.finish(header)
}

pub fn surface_obj(k: &CellComplex, s: &Surface) -> String {
    facets_obj(k, &s.facets, &format!("surface: {} facets, weight {}", s.facets.len(), s.weight))
}

/// Every facet of the complex in stored orientation.
pub fn complex_facets_obj(k: &CellComplex) -> String {
    let all: Vec<(usize, i8)> = (0..k.facets.len()).map(|f| (f, 1)).collect();
    facets_obj(k, &all, &format!("complex: {} facets", all.len()))
}

/// One `l` element per arc.
pub fn wireframe_obj(k: &CellComplex) -> String {
    let mut b = ObjBuilder::new(k);
    for a in &k.arcs {
        b.element("l", &[a.tail, a.head]);
    }
    b.finish(&format!("wireframe: {} arcs", k.arcs.len()))
}

/// Closed polyline through the cycle vertices.
pub fn cycle_obj(k: &CellComplex, h: &Cycle) -> String {
    let mut b = ObjBuilder::new(k);
    if !h.vertices.is_empty() {
        let mut l = h.vertices.clone();
        l.push(h.vertices[0]);
        b.element("l", &l);
    }
    b.finish(&format!("cycle: {} arcs", h.arcs.len()))
}
