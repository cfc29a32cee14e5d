use glam::DVec3;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::labels::label_voxels;
use super::{BinaryVolume, RasterError};
use crate::geometry::Cuboid;
use crate::point_process::poisson_points;
use crate::rng::{indexed_rng, stream_rng, streams};

/// Parameters of the slice-wise random-walk dilation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationSpec {
    pub p: f64,
    pub seed: u64,
}

impl DilationSpec {
    pub fn validate(&self) -> Result<(), RasterError> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(RasterError::InvalidParameter(format!("dilation p = {} not in [0, 1]", self.p)));
        }
        Ok(())
    }
}

/// Iteration counts `W(0..d1)`: `W(0) = 0`, then Bernoulli(p) increments.
/// The increment at `x` comes from its own counter-based stream.
pub fn dilation_walk(d1: usize, spec: &DilationSpec) -> Vec<usize> {
    let mut w = Vec::with_capacity(d1);
    let mut acc = 0;
    for x in 0..d1 {
        if x > 0 {
            let u: f64 = indexed_rng(spec.seed, streams::DILATION_WALK, x as u64).random();
            acc += usize::from(u < spec.p);
        }
        w.push(acc);
    }
    w
}

/// Dilates each x-slice `W(x)` times with the 2×2 element covering offsets `{0,1}²`.
/// `W` applications amount to an OR over the window `[y-W, y] × [z-W, z]`.
pub fn adaptive_dilate(j: &BinaryVolume, spec: &DilationSpec) -> Result<BinaryVolume, RasterError> {
    spec.validate()?;
    let [d1, d2, d3] = j.dims();
    let walk = dilation_walk(d1, spec);
    let mut out = j.clone();
    let slice = j.slice_len();
    if slice == 0 {
        return Ok(out);
    }
    out.data_mut().par_chunks_mut(slice).enumerate().for_each(|(x, s)| {
        let w = walk[x];
        if w == 0 {
            return;
        }
        let src = &j.data()[x * slice..(x + 1) * slice];
        // prefix[(y+1)*(d3+1) + z+1] = count of foreground in [0,y]×[0,z]
        let mut prefix = vec![0u32; (d2 + 1) * (d3 + 1)];
        for y in 0..d2 {
            let mut row = 0u32;
            for z in 0..d3 {
                row += u32::from(src[y * d3 + z] != 0);
                prefix[(y + 1) * (d3 + 1) + z + 1] = prefix[y * (d3 + 1) + z + 1] + row;
            }
        }
        for y in 0..d2 {
            let y0 = y.saturating_sub(w);
            for z in 0..d3 {
                let z0 = z.saturating_sub(w);
                let at = |a: usize, b: usize| prefix[a * (d3 + 1) + b];
                let n = at(y + 1, z + 1) + at(y0, z0) - at(y0, z + 1) - at(y + 1, z0);
                s[y * d3 + z] = u8::from(n > 0);
            }
        }
    });
    Ok(out)
}

/// Roughens the crack with a fine Poisson-Voronoi diagram in a cuboid equal to the voxel dims.
pub fn apply_microstructure(j: &BinaryVolume, fine_lambda: f64, seed: u64) -> Result<BinaryVolume, RasterError> {
    let [d1, d2, d3] = j.dims();
    let q = Cuboid::new(d1 as f64, d2 as f64, d3 as f64)
        .ok_or_else(|| RasterError::InvalidParameter(format!("degenerate dims {:?}", j.dims())))?;
    apply_microstructure_in(j, &q, fine_lambda, seed)
}

/// As [`apply_microstructure`], with the fine diagram living in the world cuboid `q`.
pub fn apply_microstructure_in(j: &BinaryVolume, q: &Cuboid, fine_lambda: f64, seed: u64) -> Result<BinaryVolume, RasterError> {
    if !(fine_lambda > 0.0 && fine_lambda.is_finite()) {
        return Err(RasterError::InvalidParameter(format!("fine intensity {fine_lambda} must be positive")));
    }
    let points = poisson_points(fine_lambda, q, &mut stream_rng(seed, streams::MICROSTRUCTURE));
    Ok(apply_microstructure_with(j, q, &points))
}

/// Union of the cells of `generators` (sampled in `q`) that contain a foreground voxel of `j`.
pub fn apply_microstructure_with(j: &BinaryVolume, q: &Cuboid, generators: &[DVec3]) -> BinaryVolume {
    if generators.is_empty() {
        return j.clone();
    }
    let fine = label_voxels(generators, q, j.dims());
    let mut hit = vec![false; generators.len()];
    for (&v, &l) in j.data().iter().zip(fine.data()) {
        if v != 0 {
            hit[l as usize] = true;
        }
    }
    let data = fine.data().par_iter().map(|&l| u8::from(hit[l as usize])).collect();
    BinaryVolume::from_vec(j.dims(), data).expect("same dims")
}

/// Binary median over the `(2r+1)³` window with zero padding: 1 iff more than half the window is set.
pub fn median_filter_binary(j: &BinaryVolume, radius: usize) -> Result<BinaryVolume, RasterError> {
    if radius == 0 {
        return Err(RasterError::InvalidParameter("median radius must be at least 1".into()));
    }
    let dims = j.dims();
    let mut sums: Vec<u32> = j.data().iter().map(|&v| u32::from(v != 0)).collect();
    for axis in [2, 1, 0] {
        sums = box_sum_axis(&sums, dims, axis, radius);
    }
    let window = (2 * radius + 1).pow(3) as u32;
    let data = sums.par_iter().map(|&n| u8::from(2 * n > window)).collect();
    BinaryVolume::from_vec(dims, data)
}

/// Sliding-window sum of half-width `r` along one axis, zero beyond the borders.
fn box_sum_axis(src: &[u32], dims: [usize; 3], axis: usize, r: usize) -> Vec<u32> {
    let n = dims[axis];
    let stride = match axis {
        0 => dims[1] * dims[2],
        1 => dims[2],
        _ => 1,
    };
    let mut out = vec![0u32; src.len()];
    if src.is_empty() {
        return out;
    }
    // every line along `axis` starts at an index with coordinate 0 on that axis
    let starts: Vec<usize> = (0..src.len()).filter(|&i| (i / stride) % n == 0).collect();
    let lines: Vec<(usize, Vec<u32>)> = starts
        .par_iter()
        .map(|&s| {
            let mut line = vec![0u32; n];
            let mut acc: u32 = src[s..].iter().step_by(stride).take(r.min(n - 1) + 1).sum();
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = acc;
                if k + r + 1 < n {
                    acc += src[s + (k + r + 1) * stride];
                }
                if k >= r {
                    acc -= src[s + (k - r) * stride];
                }
            }
            (s, line)
        })
        .collect();
    for (s, line) in lines {
        for (k, v) in line.into_iter().enumerate() {
            out[s + k * stride] = v;
        }
    }
    out
}

/// Voxelwise OR.
pub fn union_branching(j1: &BinaryVolume, j2: &BinaryVolume) -> Result<BinaryVolume, RasterError> {
    j1.check_same_dims(j2)?;
    let data = j1.data().iter().zip(j2.data()).map(|(&a, &b)| u8::from(a != 0 || b != 0)).collect();
    BinaryVolume::from_vec(j1.dims(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(dims: [usize; 3], at: [usize; 3]) -> BinaryVolume {
        let mut v = BinaryVolume::new(dims);
        v.set(at[0], at[1], at[2], 1);
        v
    }

    #[test]
    fn walk_extremes() {
        assert_eq!(dilation_walk(5, &DilationSpec { p: 0.0, seed: 1 }), vec![0; 5]);
        assert_eq!(dilation_walk(5, &DilationSpec { p: 1.0, seed: 1 }), vec![0, 1, 2, 3, 4]);
        let w = dilation_walk(200, &DilationSpec { p: 0.3, seed: 4 });
        assert!(w.windows(2).all(|p| p[1] - p[0] <= 1));
        assert_eq!(w, dilation_walk(200, &DilationSpec { p: 0.3, seed: 4 }));
    }

    #[test]
    fn one_dilation_gives_two_by_two_block() {
        let j = single([2, 5, 5], [1, 2, 2]);
        let out = adaptive_dilate(&j, &DilationSpec { p: 1.0, seed: 0 }).unwrap();
        assert_eq!(out.foreground(), 4);
        for (y, z) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            assert_eq!(out.get(1, y, z), 1);
        }
    }

    #[test]
    fn dilation_clips_at_slice_border() {
        let j = single([4, 3, 3], [3, 2, 2]);
        let out = adaptive_dilate(&j, &DilationSpec { p: 1.0, seed: 0 }).unwrap();
        assert_eq!(out.foreground(), 1);
        assert!(adaptive_dilate(&j, &DilationSpec { p: 1.5, seed: 0 }).is_err());
    }

    #[test]
    fn microstructure_extremes() {
        let zero = BinaryVolume::new([8, 8, 8]);
        assert_eq!(apply_microstructure(&zero, 0.01, 3).unwrap(), zero);
        let one = BinaryVolume::filled([8, 8, 8], 1);
        assert_eq!(apply_microstructure(&one, 0.01, 3).unwrap(), one);
        let j = single([8, 8, 8], [0, 0, 0]);
        let q = Cuboid::new(8.0, 8.0, 8.0).unwrap();
        assert_eq!(apply_microstructure_with(&j, &q, &[]), j);
    }

    #[test]
    fn median_small_cases() {
        let j = single([5, 5, 5], [2, 2, 2]);
        assert_eq!(median_filter_binary(&j, 1).unwrap().foreground(), 0);
        let full = BinaryVolume::filled([4, 4, 4], 1);
        // corners see 8 of 27 under zero padding
        assert_eq!(median_filter_binary(&full, 1).unwrap().get(0, 0, 0), 0);
        assert_eq!(median_filter_binary(&full, 1).unwrap().get(1, 1, 1), 1);
        let zero = BinaryVolume::new([4, 4, 4]);
        assert_eq!(median_filter_binary(&zero, 2).unwrap(), zero);
        assert!(median_filter_binary(&zero, 0).is_err());
    }

    #[test]
    fn union_rules() {
        let a = single([3, 3, 3], [0, 1, 2]);
        let b = single([3, 3, 3], [2, 1, 0]);
        assert_eq!(union_branching(&a, &BinaryVolume::new([3, 3, 3])).unwrap(), a);
        assert_eq!(union_branching(&a, &a).unwrap(), a);
        assert_eq!(union_branching(&a, &b).unwrap().foreground(), 2);
        assert!(matches!(union_branching(&a, &BinaryVolume::new([3, 3, 2])), Err(RasterError::DimensionMismatch(..))));
    }
}
