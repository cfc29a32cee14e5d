use glam::DVec3;
use rayon::prelude::*;

use super::LabelVolume;
use crate::geometry::Cuboid;
use crate::voronoi::VoronoiCell;

/// Bucket grid answering nearest-generator queries exactly, ties to the lowest id.
pub struct NearestGenerator {
    points: Vec<DVec3>,
    cell: f64,
    dims: [usize; 3],
    buckets: Vec<Vec<u32>>,
}

impl NearestGenerator {
    pub fn new(points: &[DVec3], extent: DVec3) -> Self {
        assert!(!points.is_empty(), "nearest-generator grid needs at least one point");
        let vol = extent.x * extent.y * extent.z;
        let cell = (vol / points.len() as f64).cbrt().max(extent.max_element() / 256.0);
        let dims = [
            ((extent.x / cell).ceil() as usize).max(1),
            ((extent.y / cell).ceil() as usize).max(1),
            ((extent.z / cell).ceil() as usize).max(1),
        ];
        let mut g = NearestGenerator { points: points.to_vec(), cell, dims, buckets: vec![Vec::new(); dims[0] * dims[1] * dims[2]] };
        for (i, &p) in points.iter().enumerate() {
            let c = g.cell_of(p);
            let b = g.bucket(c);
            g.buckets[b].push(i as u32);
        }
        g
    }

    fn cell_of(&self, p: DVec3) -> [isize; 3] {
        let c = |v: f64, d: usize| ((v / self.cell).floor() as isize).clamp(0, d as isize - 1);
        [c(p.x, self.dims[0]), c(p.y, self.dims[1]), c(p.z, self.dims[2])]
    }

    fn bucket(&self, c: [isize; 3]) -> usize {
        (c[0] as usize * self.dims[1] + c[1] as usize) * self.dims[2] + c[2] as usize
    }

    pub fn nearest(&self, p: DVec3) -> usize {
        let c = self.cell_of(p);
        let max_r = *self.dims.iter().max().unwrap() as isize;
        let mut best: Option<(f64, u32)> = None;
        for r in 0..=max_r {
            for dx in -r..=r {
                for dy in -r..=r {
                    for dz in -r..=r {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != r {
                            continue;
                        }
                        let n = [c[0] + dx, c[1] + dy, c[2] + dz];
                        if (0..3).any(|k| n[k] < 0 || n[k] >= self.dims[k] as isize) {
                            continue;
                        }
                        for &i in &self.buckets[self.bucket(n)] {
                            let d = self.points[i as usize].distance_squared(p);
                            if best.is_none_or(|(bd, bi)| d < bd || (d == bd && i < bi)) {
                                best = Some((d, i));
                            }
                        }
                    }
                }
            }
            if let Some((d, _)) = best {
                let reach = r as f64 * self.cell;
                if d < reach * reach {
                    break;
                }
            }
        }
        best.expect("grid holds at least one point").1 as usize
    }
}

/// World position of the centre of voxel `(x, y, z)` when `q` is sampled at `dims`.
pub fn voxel_center(q: &Cuboid, dims: [usize; 3], x: usize, y: usize, z: usize) -> DVec3 {
    DVec3::new(
        (x as f64 + 0.5) * q.d1 / dims[0] as f64,
        (y as f64 + 0.5) * q.d2 / dims[1] as f64,
        (z as f64 + 0.5) * q.d3 / dims[2] as f64,
    )
}

/// Labels every voxel centre with the id of the nearest generator.
pub fn label_voxels(generators: &[DVec3], q: &Cuboid, dims: [usize; 3]) -> LabelVolume {
    let grid = NearestGenerator::new(generators, q.extent());
    let mut vol = LabelVolume::new(dims);
    let slice = dims[1] * dims[2];
    if slice == 0 {
        return vol;
    }
    vol.data_mut().par_chunks_mut(slice).enumerate().for_each(|(x, s)| {
        for y in 0..dims[1] {
            for z in 0..dims[2] {
                s[y * dims[2] + z] = grid.nearest(voxel_center(q, dims, x, y, z)) as u32;
            }
        }
    });
    vol
}

/// Label image of a bounded Voronoi diagram of `q` sampled at `dims`.
pub fn rasterize_labels(cells: &[VoronoiCell], q: &Cuboid, dims: [usize; 3]) -> LabelVolume {
    let mut gens = vec![DVec3::ZERO; cells.iter().map(|c| c.generator_id + 1).max().unwrap_or(0)];
    for c in cells {
        gens[c.generator_id] = c.generator;
    }
    label_voxels(&gens, q, dims)
}
