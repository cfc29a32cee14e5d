//! Bounding cuboid and small vector helpers.

use glam::DVec3;
use serde::{Deserialize, Serialize};

/// Axis-aligned box `[0,d1] × [0,d2] × [0,d3]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cuboid {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Cuboid {
    pub fn new(d1: f64, d2: f64, d3: f64) -> Option<Self> {
        let ok = |d: f64| d.is_finite() && d > 0.0;
        (ok(d1) && ok(d2) && ok(d3)).then_some(Cuboid { d1, d2, d3 })
    }

    pub fn unit() -> Self {
        Cuboid { d1: 1.0, d2: 1.0, d3: 1.0 }
    }

    pub fn extent(&self) -> DVec3 {
        DVec3::new(self.d1, self.d2, self.d3)
    }

    pub fn volume(&self) -> f64 {
        self.d1 * self.d2 * self.d3
    }

    pub fn diameter(&self) -> f64 {
        self.extent().length()
    }

    /// Half-open containment: `0 <= x_k < d_k`.
    pub fn contains(&self, p: DVec3) -> bool {
        (0.0..self.d1).contains(&p.x) && (0.0..self.d2).contains(&p.y) && (0.0..self.d3).contains(&p.z)
    }

    /// Pulls a point that landed on an upper face (through rounding) back inside.
    pub(crate) fn snap_inside(&self, p: DVec3) -> DVec3 {
        let fix = |v: f64, d: f64| if v >= d { d.next_down() } else { v.max(0.0) };
        DVec3::new(fix(p.x, self.d1), fix(p.y, self.d2), fix(p.z, self.d3))
    }
}

/// Area vector (twice the area, along the normal) of a planar polygon by Newell's method.
pub fn polygon_normal(points: impl IntoIterator<Item = DVec3> + Clone) -> DVec3 {
    let pts: Vec<DVec3> = points.into_iter().collect();
    let n = pts.len();
    let mut acc = DVec3::ZERO;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        acc += a.cross(b);
    }
    acc
}

/// Area of a planar polygon by fan triangulation around its vertex centroid.
pub fn polygon_area(pts: &[DVec3]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    let c = pts.iter().copied().sum::<DVec3>() / pts.len() as f64;
    let n = pts.len();
    (0..n)
        .map(|i| 0.5 * (pts[i] - c).cross(pts[(i + 1) % n] - c).length())
        .sum()
}
