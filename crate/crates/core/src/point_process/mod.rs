//! Generator point patterns for the Voronoi diagram.
//!
//! Three models are supported: homogeneous Poisson, Matérn cluster and a
//! force-biased hardcore packing with equal radii. All samplers are pure
//! functions of `(parameters, cuboid, seed)`.

mod hardcore;

use std::collections::HashMap;
use std::io::{BufRead, Write};

use glam::DVec3;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Cuboid;
use crate::rng::{stream_rng, streams};

pub use hardcore::{hardcore_radius, sample_hardcore, sample_hardcore_with, HardcoreOptions};

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("force-biased packing did not remove all overlaps within {sweeps} sweeps (min distance {min_distance}, required {required})")]
    NonConvergence { sweeps: usize, min_distance: f64, required: f64 },
    #[error("malformed point file at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// The stochastic model that produced a pattern.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PointModel {
    Poisson { lambda: f64 },
    MaternCluster { lambda_parent: f64, mu_daughter: f64, radius: f64 },
    Hardcore { lambda: f64, volume_fraction: f64 },
    /// Points loaded from a file or built by hand.
    Explicit,
}

impl PointModel {
    /// Samples this model. `Explicit` has nothing to sample and is rejected.
    pub fn sample(&self, q: &Cuboid, seed: u64) -> Result<PointPattern, SampleError> {
        match *self {
            PointModel::Poisson { lambda } => sample_poisson(lambda, q, seed),
            PointModel::MaternCluster { lambda_parent, mu_daughter, radius } => {
                sample_matern_cluster(lambda_parent, mu_daughter, radius, q, seed)
            }
            PointModel::Hardcore { lambda, volume_fraction } => sample_hardcore(lambda, volume_fraction, q, seed),
            PointModel::Explicit => Err(SampleError::InvalidParameter("explicit patterns cannot be sampled".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointPattern {
    pub points: Vec<DVec3>,
    pub cuboid: Cuboid,
    pub model: PointModel,
    pub seed: u64,
}

/// JSON sidecar accompanying a CSV point file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSidecar {
    pub cuboid: Cuboid,
    #[serde(flatten)]
    pub model: PointModel,
    pub seed: u64,
    pub count: usize,
}

impl PointPattern {
    pub fn explicit(points: Vec<DVec3>, cuboid: Cuboid) -> Self {
        PointPattern { points, cuboid, model: PointModel::Explicit, seed: 0 }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point dedup tolerance for this cuboid.
    pub fn dedup_tolerance(&self) -> f64 {
        1e-9 * self.cuboid.diameter()
    }

    pub fn sidecar(&self) -> PatternSidecar {
        PatternSidecar { cuboid: self.cuboid, model: self.model.clone(), seed: self.seed, count: self.points.len() }
    }

    /// Writes `x,y,z` lines (shortest round-trip decimal, LF).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for p in &self.points {
            writeln!(w, "{},{},{}", p.x, p.y, p.z)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, sidecar: PatternSidecar) -> Result<Self, SampleError> {
        let mut points = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| SampleError::Parse { line: i + 1, msg: e.to_string() })?;
            if vals.len() != 3 {
                return Err(SampleError::Parse { line: i + 1, msg: format!("expected 3 fields, got {}", vals.len()) });
            }
            points.push(DVec3::new(vals[0], vals[1], vals[2]));
        }
        Ok(PointPattern { points, cuboid: sidecar.cuboid, model: sidecar.model, seed: sidecar.seed })
    }
}

fn check_param(name: &str, v: f64) -> Result<(), SampleError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(SampleError::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")))
    }
}

fn poisson_count<R: Rng>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    // Poisson::new only fails for non-positive or non-finite means.
    Poisson::new(mean).expect("positive finite mean").sample(rng) as usize
}

fn uniform_in<R: Rng>(lo: DVec3, hi: DVec3, rng: &mut R) -> DVec3 {
    let u = DVec3::new(rng.random(), rng.random(), rng.random());
    lo + u * (hi - lo)
}

/// Homogeneous Poisson process of intensity `lambda` per unit volume in `q`.
pub fn sample_poisson(lambda: f64, q: &Cuboid, seed: u64) -> Result<PointPattern, SampleError> {
    check_param("lambda", lambda)?;
    let points = poisson_points(lambda, q, &mut stream_rng(seed, streams::POINTS));
    let mut pattern = PointPattern { points, cuboid: *q, model: PointModel::Poisson { lambda }, seed };
    pattern.points = dedup_points(&pattern.points, pattern.dedup_tolerance());
    Ok(pattern)
}

/// Homogeneous Poisson points in `q` drawn from `rng`, without deduplication.
pub(crate) fn poisson_points<R: Rng>(lambda: f64, q: &Cuboid, rng: &mut R) -> Vec<DVec3> {
    let n = poisson_count(lambda * q.volume(), rng);
    (0..n).map(|_| q.snap_inside(uniform_in(DVec3::ZERO, q.extent(), rng))).collect()
}

/// Matérn cluster process. Parents are simulated on `q` dilated by `radius`
/// so clusters centred just outside the cuboid still contribute daughters.
pub fn sample_matern_cluster(
    lambda_parent: f64,
    mu_daughter: f64,
    radius: f64,
    q: &Cuboid,
    seed: u64,
) -> Result<PointPattern, SampleError> {
    check_param("lambda_parent", lambda_parent)?;
    check_param("mu_daughter", mu_daughter)?;
    check_param("radius", radius)?;
    let lo = DVec3::splat(-radius);
    let hi = q.extent() + DVec3::splat(radius);
    let dilated = (hi - lo).x * (hi - lo).y * (hi - lo).z;

    let mut rng = stream_rng(seed, streams::POINTS);
    let n_parents = poisson_count(lambda_parent * dilated, &mut rng);
    let parents: Vec<DVec3> = (0..n_parents).map(|_| uniform_in(lo, hi, &mut rng)).collect();

    let mut drng = stream_rng(seed, streams::MATERN_DAUGHTERS);
    let mut points = Vec::new();
    for parent in parents {
        let n = poisson_count(mu_daughter, &mut drng);
        for _ in 0..n {
            let p = parent + radius * uniform_in_unit_ball(&mut drng);
            if q.contains(p) {
                points.push(p);
            }
        }
    }
    let mut pattern = PointPattern {
        points,
        cuboid: *q,
        model: PointModel::MaternCluster { lambda_parent, mu_daughter, radius },
        seed,
    };
    pattern.points = dedup_points(&pattern.points, pattern.dedup_tolerance());
    Ok(pattern)
}

fn uniform_in_unit_ball<R: Rng>(rng: &mut R) -> DVec3 {
    loop {
        let p = uniform_in(DVec3::splat(-1.0), DVec3::ONE, rng);
        if p.length_squared() <= 1.0 {
            return p;
        }
    }
}

/// Removes points closer than `eps` to an earlier point, keeping first occurrences.
pub fn dedup_points(points: &[DVec3], eps: f64) -> Vec<DVec3> {
    if eps <= 0.0 {
        return points.to_vec();
    }
    let key = |p: DVec3| ((p.x / eps).floor() as i64, (p.y / eps).floor() as i64, (p.z / eps).floor() as i64);
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut out: Vec<DVec3> = Vec::with_capacity(points.len());
    'points: for &p in points {
        let (kx, ky, kz) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = grid.get(&(kx + dx, ky + dy, kz + dz)) {
                        if ids.iter().any(|&i| out[i].distance(p) <= eps) {
                            continue 'points;
                        }
                    }
                }
            }
        }
        grid.entry((kx, ky, kz)).or_default().push(out.len());
        out.push(p);
    }
    out
}

/// Smallest pairwise distance, by exhaustive scan.
pub fn min_pairwise_distance(points: &[DVec3]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(points[i].distance(points[j]));
        }
    }
    best
}
