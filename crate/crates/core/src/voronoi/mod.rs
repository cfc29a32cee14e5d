//! Bounded Voronoi diagrams and the cellular complex they induce.

mod clip;
mod complex;
mod io;

use glam::DVec3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{polygon_area, Cuboid};
use crate::point_process::PointPattern;
use clip::Polytope;

pub use complex::{assign_weights, extract_complex, Arc, ArcWeight, Cell, CellComplex, Facet, FacetWeight};
pub use io::ComplexFormatError;

#[derive(Debug, Error)]
pub enum VoronoiError {
    #[error("empty point pattern")]
    EmptyPattern,
    #[error("generators {0} and {1} coincide within tolerance")]
    DegenerateInput(usize, usize),
    #[error("generator {0} lies outside the cuboid")]
    OutsideCuboid(usize),
    #[error("inconsistent geometry: {0}")]
    InconsistentGeometry(String),
    #[error("zero weight on {0}")]
    ZeroWeight(String),
}

/// What lies across a cell face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaceNeighbor {
    Cell(usize),
    /// Face of the cuboid: 0/1 = x min/max, 2/3 = y, 4/5 = z.
    Boundary(usize),
}

/// One bounded Voronoi cell.
#[derive(Clone, Debug)]
pub struct VoronoiCell {
    pub generator_id: usize,
    pub generator: DVec3,
    pub vertices: Vec<DVec3>,
    /// Vertex loops, counterclockwise seen from outside the cell.
    pub faces: Vec<Vec<usize>>,
    pub neighbors: Vec<FaceNeighbor>,
}

impl VoronoiCell {
    pub fn volume(&self) -> f64 {
        let g = self.generator;
        self.faces
            .iter()
            .map(|f| {
                (1..f.len() - 1)
                    .map(|k| {
                        let (a, b, c) = (self.vertices[f[0]] - g, self.vertices[f[k]] - g, self.vertices[f[k + 1]] - g);
                        a.dot(b.cross(c)) / 6.0
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn face_points(&self, face: usize) -> Vec<DVec3> {
        self.faces[face].iter().map(|&i| self.vertices[i]).collect()
    }

    pub fn face_area(&self, face: usize) -> f64 {
        polygon_area(&self.face_points(face))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VoronoiOptions {
    /// Vertex merge tolerance relative to the cuboid diameter.
    pub eps_rel: f64,
}

impl Default for VoronoiOptions {
    fn default() -> Self {
        VoronoiOptions { eps_rel: 1e-9 }
    }
}

impl VoronoiOptions {
    pub fn eps(&self, q: &Cuboid) -> f64 {
        self.eps_rel * q.diameter()
    }
}

pub fn build_bounded_voronoi(pattern: &PointPattern, q: &Cuboid) -> Result<Vec<VoronoiCell>, VoronoiError> {
    build_bounded_voronoi_with(pattern, q, &VoronoiOptions::default())
}

/// Clips `q` against the bisector planes of each generator's neighbours, nearest first.
/// A neighbour farther than twice the current cell radius cannot cut the cell, which
/// ends the scan for that generator.
pub fn build_bounded_voronoi_with(
    pattern: &PointPattern,
    q: &Cuboid,
    opts: &VoronoiOptions,
) -> Result<Vec<VoronoiCell>, VoronoiError> {
    let pts = &pattern.points;
    if pts.is_empty() {
        return Err(VoronoiError::EmptyPattern);
    }
    if let Some(i) = pts.iter().position(|&p| !(p.cmpge(DVec3::ZERO).all() && p.cmple(q.extent()).all())) {
        return Err(VoronoiError::OutsideCuboid(i));
    }
    let eps = opts.eps(q);
    let clip_tol = eps * 1e-3;
    let order = sorted_by_x(pts);
    check_distinct(pts, &order, eps)?;

    Ok((0..pts.len())
        .into_par_iter()
        .map(|i| {
            let g = pts[i];
            let mut by_dist: Vec<(f64, usize)> =
                (0..pts.len()).filter(|&j| j != i).map(|j| (g.distance_squared(pts[j]), j)).collect();
            by_dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut poly = Polytope::from_cuboid(q);
            let mut radius = poly.max_distance_from(g);
            for (d2, j) in by_dist {
                let d = d2.sqrt();
                if d > 2.0 * radius {
                    break;
                }
                let normal = (pts[j] - g) / d;
                if poly.clip(g, normal, 0.5 * d, clip_tol, FaceNeighbor::Cell(j)) {
                    radius = poly.max_distance_from(g);
                }
            }
            debug_assert!(!poly.is_empty());
            VoronoiCell { generator_id: i, generator: g, vertices: poly.verts, faces: poly.faces, neighbors: poly.tags }
        })
        .collect())
}

fn sorted_by_x(pts: &[DVec3]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x).then(a.cmp(&b)));
    order
}

fn check_distinct(pts: &[DVec3], order: &[usize], eps: f64) -> Result<(), VoronoiError> {
    for (k, &a) in order.iter().enumerate() {
        for &b in &order[k + 1..] {
            if pts[b].x - pts[a].x > eps {
                break;
            }
            if pts[a].distance(pts[b]) <= eps {
                return Err(VoronoiError::DegenerateInput(a.min(b), a.max(b)));
            }
        }
    }
    Ok(())
}
