//! Force-biased packing of equal spheres.
//!
//! Each sweep pushes apart every pair of centres closer than the current
//! outer diameter; the outer diameter shrinks geometrically towards the
//! hardcore diameter `2·r_hard`. The packing is finished when the minimum
//! pairwise distance reaches the current outer diameter.
//!
//! Only centres are confined to the cuboid; spheres may protrude through its
//! faces.

use glam::DVec3;

use super::{PointModel, PointPattern, SampleError};
use crate::geometry::Cuboid;
use crate::rng::{stream_rng, streams};
use rand::Rng;

#[derive(Clone, Copy, Debug)]
pub struct HardcoreOptions {
    /// Outer diameter multiplier applied after every sweep.
    pub shrink: f64,
    pub max_sweeps: usize,
}

impl Default for HardcoreOptions {
    fn default() -> Self {
        HardcoreOptions { shrink: 0.99, max_sweeps: 100_000 }
    }
}

/// Sphere radius giving `volume_fraction` for `count` equal spheres in `q`.
pub fn hardcore_radius(volume_fraction: f64, q: &Cuboid, count: usize) -> f64 {
    (3.0 * volume_fraction * q.volume() / (4.0 * std::f64::consts::PI * count as f64)).cbrt()
}

pub fn sample_hardcore(lambda: f64, volume_fraction: f64, q: &Cuboid, seed: u64) -> Result<PointPattern, SampleError> {
    sample_hardcore_with(lambda, volume_fraction, q, seed, &HardcoreOptions::default())
}

pub fn sample_hardcore_with(
    lambda: f64,
    volume_fraction: f64,
    q: &Cuboid,
    seed: u64,
    opts: &HardcoreOptions,
) -> Result<PointPattern, SampleError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(SampleError::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    if !(volume_fraction > 0.0 && volume_fraction <= 0.64) {
        return Err(SampleError::InvalidParameter(format!(
            "volume fraction must lie in (0, 0.64], got {volume_fraction}"
        )));
    }
    let model = PointModel::Hardcore { lambda, volume_fraction };
    let count = (lambda * q.volume()).round() as usize;
    let mut rng = stream_rng(seed, streams::HARDCORE_INIT);
    let mut pts: Vec<DVec3> =
        (0..count).map(|_| q.snap_inside(q.extent() * DVec3::new(rng.random(), rng.random(), rng.random()))).collect();
    if count < 2 {
        return Ok(PointPattern { points: pts, cuboid: *q, model, seed });
    }

    let target = 2.0 * hardcore_radius(volume_fraction, q, count);
    // Start from the diameter of a nominal packing density of one.
    let mut outer = target * (1.0 / volume_fraction).cbrt();
    let mut grid = Grid::new(q, target);
    let mut disp = vec![DVec3::ZERO; count];

    for _sweep in 0..opts.max_sweeps {
        grid.rebuild(&pts);
        let mut min_d = f64::INFINITY;
        disp.iter_mut().for_each(|d| *d = DVec3::ZERO);
        // pushes aim slightly past `outer` so rounding cannot leave a pair just short
        let aim = outer * (1.0 + 1e-9);
        grid.for_each_pair_within(&pts, outer, |i, j, dist| {
            min_d = min_d.min(dist);
            let overlap = aim - dist;
            let dir = if dist > 0.0 {
                (pts[j] - pts[i]) / dist
            } else {
                // coincident centres: separate along a fixed, index-dependent axis
                [DVec3::X, DVec3::Y, DVec3::Z][(i + j) % 3]
            };
            disp[i] -= 0.5 * overlap * dir;
            disp[j] += 0.5 * overlap * dir;
        });
        if min_d >= outer {
            debug_assert!(outer >= target);
            return Ok(PointPattern { points: pts, cuboid: *q, model, seed });
        }
        for (p, d) in pts.iter_mut().zip(&disp) {
            *p = q.snap_inside(*p + *d);
        }
        outer = (outer * opts.shrink).max(target);
    }
    grid.rebuild(&pts);
    let mut min_d = f64::INFINITY;
    grid.for_each_pair_within(&pts, target, |_, _, d| min_d = min_d.min(d));
    if min_d >= target {
        return Ok(PointPattern { points: pts, cuboid: *q, model, seed });
    }
    Err(SampleError::NonConvergence { sweeps: opts.max_sweeps, min_distance: min_d, required: target })
}

/// Uniform bucket grid for fixed-radius pair queries.
struct Grid {
    cell: f64,
    dims: [usize; 3],
    heads: Vec<Vec<usize>>,
}

impl Grid {
    fn new(q: &Cuboid, min_cell: f64) -> Self {
        let e = q.extent();
        // Cells at least as wide as the largest query radius used (the initial outer diameter).
        let cell = (min_cell * 2.0).max(e.max_element() / 64.0);
        let dims = [
            ((e.x / cell).ceil() as usize).max(1),
            ((e.y / cell).ceil() as usize).max(1),
            ((e.z / cell).ceil() as usize).max(1),
        ];
        Grid { cell, dims, heads: vec![Vec::new(); dims[0] * dims[1] * dims[2]] }
    }

    fn coord(&self, p: DVec3) -> [usize; 3] {
        let c = |v: f64, d: usize| ((v / self.cell) as usize).min(d - 1);
        [c(p.x, self.dims[0]), c(p.y, self.dims[1]), c(p.z, self.dims[2])]
    }

    fn rebuild(&mut self, pts: &[DVec3]) {
        self.heads.iter_mut().for_each(Vec::clear);
        for (i, &p) in pts.iter().enumerate() {
            let [x, y, z] = self.coord(p);
            self.heads[(x * self.dims[1] + y) * self.dims[2] + z].push(i);
        }
    }

    /// Calls `f(i, j, dist)` for every pair `i < j` with `dist < radius`, in a fixed order.
    fn for_each_pair_within(&self, pts: &[DVec3], radius: f64, mut f: impl FnMut(usize, usize, f64)) {
        let reach = (radius / self.cell).ceil() as isize;
        for (i, &p) in pts.iter().enumerate() {
            let c = self.coord(p);
            for dx in -reach..=reach {
                for dy in -reach..=reach {
                    for dz in -reach..=reach {
                        let (x, y, z) = (c[0] as isize + dx, c[1] as isize + dy, c[2] as isize + dz);
                        if x < 0 || y < 0 || z < 0 {
                            continue;
                        }
                        let (x, y, z) = (x as usize, y as usize, z as usize);
                        if x >= self.dims[0] || y >= self.dims[1] || z >= self.dims[2] {
                            continue;
                        }
                        for &j in &self.heads[(x * self.dims[1] + y) * self.dims[2] + z] {
                            if j > i {
                                let d = p.distance(pts[j]);
                                if d < radius {
                                    f(i, j, d);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}
