//! Convex polytope with half-space clipping.
//!
//! Faces are vertex-index loops, counterclockwise seen from outside. Each face
//! carries the tag of the plane that produced it.

use std::collections::HashMap;

use glam::DVec3;

use super::FaceNeighbor;
use crate::geometry::Cuboid;

#[derive(Clone, Debug)]
pub(crate) struct Polytope {
    pub verts: Vec<DVec3>,
    pub faces: Vec<Vec<usize>>,
    pub tags: Vec<FaceNeighbor>,
}

impl Polytope {
    pub fn from_cuboid(q: &Cuboid) -> Self {
        let e = q.extent();
        let verts: Vec<DVec3> = (0..8)
            .map(|i| DVec3::new(if i & 1 == 1 { e.x } else { 0.0 }, if i & 2 == 2 { e.y } else { 0.0 }, if i & 4 == 4 { e.z } else { 0.0 }))
            .collect();
        // Counterclockwise seen from outside; order matches FaceNeighbor::Boundary(0..6).
        let faces = vec![
            vec![0, 4, 6, 2], // x = 0
            vec![1, 3, 7, 5], // x = d1
            vec![0, 1, 5, 4], // y = 0
            vec![2, 6, 7, 3], // y = d2
            vec![0, 2, 3, 1], // z = 0
            vec![4, 5, 7, 6], // z = d3
        ];
        let tags = (0..6).map(FaceNeighbor::Boundary).collect();
        Polytope { verts, faces, tags }
    }

    pub fn max_distance_from(&self, p: DVec3) -> f64 {
        self.verts.iter().map(|v| v.distance(p)).fold(0.0, f64::max)
    }

    /// Keeps the part with `(x - origin)·normal <= offset`, where `normal` is a unit vector.
    /// Returns `false` if the plane does not cut the polytope (nothing changed).
    pub fn clip(&mut self, origin: DVec3, normal: DVec3, offset: f64, tol: f64, tag: FaceNeighbor) -> bool {
        let dist: Vec<f64> = self.verts.iter().map(|&v| (v - origin).dot(normal) - offset).collect();
        if dist.iter().all(|&d| d <= tol) {
            return false;
        }

        let mut edge_points: HashMap<(usize, usize), usize> = HashMap::new();
        let mut verts = self.verts.clone();
        let mut new_faces = Vec::with_capacity(self.faces.len() + 1);
        let mut new_tags = Vec::with_capacity(self.faces.len() + 1);
        for (face, &ftag) in self.faces.iter().zip(&self.tags) {
            let mut out = Vec::with_capacity(face.len() + 1);
            for k in 0..face.len() {
                let a = face[k];
                let b = face[(k + 1) % face.len()];
                if dist[a] <= tol {
                    out.push(a);
                }
                let crosses = (dist[a] < -tol && dist[b] > tol) || (dist[a] > tol && dist[b] < -tol);
                if crosses {
                    let key = (a.min(b), a.max(b));
                    let id = *edge_points.entry(key).or_insert_with(|| {
                        let (lo, hi) = key;
                        let t = dist[lo] / (dist[lo] - dist[hi]);
                        verts.push(self.verts[lo] + t * (self.verts[hi] - self.verts[lo]));
                        verts.len() - 1
                    });
                    out.push(id);
                }
            }
            let on_plane = out.iter().all(|&v| v >= dist.len() || dist[v].abs() <= tol);
            if out.len() >= 3 && !on_plane {
                new_faces.push(out);
                new_tags.push(ftag);
            }
        }

        // Cap polygon: every surviving vertex on the plane.
        let mut used = vec![false; verts.len()];
        for f in &new_faces {
            for &v in f {
                used[v] = true;
            }
        }
        let cap: Vec<usize> = (0..verts.len())
            .filter(|&v| used[v] && (v >= dist.len() || dist[v].abs() <= tol))
            .collect();
        if cap.len() >= 3 {
            let loop_ = order_cap(&verts, &cap, normal);
            if loop_.len() >= 3 {
                new_faces.push(loop_);
                new_tags.push(tag);
            }
        }

        self.verts = verts;
        self.faces = new_faces;
        self.tags = new_tags;
        self.compact();
        true
    }

    /// Drops unreferenced vertices and renumbers.
    fn compact(&mut self) {
        let mut map = vec![usize::MAX; self.verts.len()];
        let mut verts = Vec::new();
        for f in self.faces.iter_mut() {
            for v in f.iter_mut() {
                if map[*v] == usize::MAX {
                    map[*v] = verts.len();
                    verts.push(self.verts[*v]);
                }
                *v = map[*v];
            }
        }
        self.verts = verts;
    }

    pub fn is_empty(&self) -> bool {
        self.faces.len() < 4
    }
}

/// Orders coplanar points counterclockwise around `normal`.
fn order_cap(verts: &[DVec3], ids: &[usize], normal: DVec3) -> Vec<usize> {
    let centroid = ids.iter().map(|&i| verts[i]).sum::<DVec3>() / ids.len() as f64;
    let u = normal.any_orthonormal_vector();
    let w = normal.cross(u);
    let mut keyed: Vec<(f64, usize)> = ids
        .iter()
        .map(|&i| {
            let d = verts[i] - centroid;
            (d.dot(w).atan2(d.dot(u)), i)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, i)| i).collect()
}
