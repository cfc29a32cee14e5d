//! Grayvalue embedding of a binary crack into a background patch.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{BinaryVolume, GrayVolume, RasterError};
use crate::rng::{indexed_rng, streams};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("need at least 2 pore voxels, found {0}")]
    InsufficientSamples(usize),
    #[error("dimension mismatch: {0:?} vs {1:?}")]
    DimensionMismatch([usize; 3], [usize; 3]),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl From<RasterError> for EmbedError {
    fn from(e: RasterError) -> Self {
        match e {
            RasterError::DimensionMismatch(a, b) => EmbedError::DimensionMismatch(a, b),
            other => EmbedError::InvalidParameter(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsSource {
    EstimatedFromPores,
    Manual,
}

/// Grayvalue distribution of air voxels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrayStats {
    pub mean: f64,
    pub std: f64,
    pub source: StatsSource,
}

impl GrayStats {
    pub fn manual(mean: f64, std: f64) -> Self {
        GrayStats { mean, std, source: StatsSource::Manual }
    }
}

/// Sample mean and standard deviation (n−1 denominator) of the masked voxels.
pub fn estimate_pore_stats(patch: &GrayVolume, pore_mask: &BinaryVolume) -> Result<GrayStats, EmbedError> {
    patch.check_same_dims(pore_mask)?;
    let vals: Vec<f64> = patch
        .data()
        .iter()
        .zip(pore_mask.data())
        .filter(|(_, &m)| m != 0)
        .map(|(&v, _)| f64::from(v))
        .collect();
    let n = vals.len();
    if n < 2 {
        return Err(EmbedError::InsufficientSamples(n));
    }
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(GrayStats { mean, std: var.sqrt(), source: StatsSource::EstimatedFromPores })
}

/// Voxels with grayvalue strictly below `threshold`.
pub fn threshold_mask(patch: &GrayVolume, threshold: u16) -> BinaryVolume {
    let data = patch.data().iter().map(|&v| u8::from(v < threshold)).collect();
    BinaryVolume::from_vec(patch.dims(), data).expect("same dims")
}

/// Flat background `mean` plus Gaussian white noise of deviation `noise`.
pub fn synthetic_background(dims: [usize; 3], mean: f64, noise: f64, seed: u64) -> Result<GrayVolume, EmbedError> {
    let normal = Normal::new(mean, noise).map_err(|e| EmbedError::InvalidParameter(format!("background noise: {e}")))?;
    let data = (0..dims[0] * dims[1] * dims[2])
        .into_par_iter()
        .map(|i| to_gray(normal.sample(&mut indexed_rng(seed, streams::BACKGROUND, i as u64))))
        .collect();
    Ok(GrayVolume::from_vec(dims, data)?)
}

fn to_gray(v: f64) -> u16 {
    v.round().clamp(0.0, f64::from(u16::MAX)) as u16
}

/// Normalized 1D Gaussian kernel truncated at 3σ. `sigma = 0` gives the identity.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as usize;
    if sigma <= 0.0 || r == 0 {
        return vec![1.0];
    }
    let k: Vec<f64> = (0..=2 * r).map(|i| (-((i as f64 - r as f64).powi(2)) / (2.0 * sigma * sigma)).exp()).collect();
    let s: f64 = k.iter().sum();
    k.into_iter().map(|v| v / s).collect()
}

/// Separable Gaussian over the whole volume, replicate borders.
pub fn gaussian_blur(data: &[f64], dims: [usize; 3], sigma: f64) -> Vec<f64> {
    let k = gaussian_kernel(sigma);
    if k.len() == 1 {
        return data.to_vec();
    }
    let r = (k.len() / 2) as isize;
    let strides = [dims[1] * dims[2], dims[2], 1];
    let mut cur = data.to_vec();
    for axis in 0..3 {
        let n = dims[axis] as isize;
        let st = strides[axis];
        let src = cur;
        cur = (0..src.len())
            .into_par_iter()
            .map(|i| {
                let c = ((i / st) % dims[axis]) as isize;
                let base = i - c as usize * st;
                k.iter()
                    .enumerate()
                    .map(|(t, w)| w * src[base + (c + t as isize - r).clamp(0, n - 1) as usize * st])
                    .sum()
            })
            .collect();
    }
    cur
}

/// Zeroes the crack, refills it with N(mean, std²) draws and smooths crack voxels plus their 26-neighbourhood.
pub fn embed_crack(patch: &GrayVolume, gt: &BinaryVolume, stats: &GrayStats, sigma: f64, seed: u64) -> Result<GrayVolume, EmbedError> {
    patch.check_same_dims(gt)?;
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(EmbedError::InvalidParameter(format!("sigma = {sigma}")));
    }
    if !(stats.std >= 0.0 && stats.mean.is_finite()) {
        return Err(EmbedError::InvalidParameter(format!("gray stats {stats:?}")));
    }
    let dims = patch.dims();
    let mut filled: Vec<u16> = patch
        .data()
        .par_iter()
        .zip(gt.data())
        .enumerate()
        .map(|(i, (&v, &c))| {
            if c == 0 {
                return v;
            }
            let mut rng = indexed_rng(seed, streams::CRACK_VALUES, i as u64);
            let z: f64 = if stats.std > 0.0 { rng.sample(rand_distr::StandardNormal) } else { 0.0 };
            to_gray(stats.mean + stats.std * z)
        })
        .collect();
    if gt.foreground() == 0 || gaussian_kernel(sigma).len() == 1 {
        return Ok(GrayVolume::from_vec(dims, filled)?);
    }
    let mut halo = gt.clone();
    for i in 0..gt.len() {
        if gt.data()[i] != 0 {
            for n in gt.neighbors26(i) {
                halo.data_mut()[n] = 1;
            }
        }
    }
    let as_f: Vec<f64> = filled.iter().map(|&v| f64::from(v)).collect();
    let blurred = gaussian_blur(&as_f, dims, sigma);
    for ((v, &b), &h) in filled.iter_mut().zip(&blurred).zip(halo.data()) {
        if h != 0 {
            *v = to_gray(b);
        }
    }
    Ok(GrayVolume::from_vec(dims, filled)?)
}
