//! Dense voxel volumes and the discretization / crack-shaping operators.
//!
//! Layout is row-major with the first index slowest:
//! `index = (x·d2 + y)·d3 + z`. An "x-slice" is the `d2 × d3` plane at fixed `x`.

mod labels;
mod morphology;
mod surface;

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use labels::{label_voxels, rasterize_labels, voxel_center, NearestGenerator};
pub use morphology::{
    adaptive_dilate, apply_microstructure, apply_microstructure_in, apply_microstructure_with, dilation_walk, median_filter_binary,
    union_branching, DilationSpec,
};
pub use surface::{rasterize_surface, surface_pairs};

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("dimension mismatch: {0:?} vs {1:?}")]
    DimensionMismatch([usize; 3], [usize; 3]),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("volume file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Label,
    Binary,
    Gray,
}

/// Scalar types a volume can hold, with their on-disk encoding.
pub trait Voxel: Copy + Default + PartialEq + Send + Sync + std::fmt::Debug {
    const FLAVOR: Flavor;
    const DTYPE: &'static str;
    const BYTES: usize;
    fn write_le(self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;
}

impl Voxel for u32 {
    const FLAVOR: Flavor = Flavor::Label;
    const DTYPE: &'static str = "uint32";
    const BYTES: usize = 4;
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(b: &[u8]) -> Self {
        u32::from_le_bytes([b[0], b[1], b[2], b[3]])
    }
}

impl Voxel for u8 {
    const FLAVOR: Flavor = Flavor::Binary;
    const DTYPE: &'static str = "uint8";
    const BYTES: usize = 1;
    fn write_le(self, out: &mut Vec<u8>) {
        out.push(self);
    }
    fn read_le(b: &[u8]) -> Self {
        b[0]
    }
}

impl Voxel for u16 {
    const FLAVOR: Flavor = Flavor::Gray;
    const DTYPE: &'static str = "uint16";
    const BYTES: usize = 2;
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(b: &[u8]) -> Self {
        u16::from_le_bytes([b[0], b[1]])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Volume<T> {
    dims: [usize; 3],
    data: Vec<T>,
}

/// Cell id per voxel.
pub type LabelVolume = Volume<u32>;
/// 0/1 per voxel.
pub type BinaryVolume = Volume<u8>;
/// 16-bit grayvalues.
pub type GrayVolume = Volume<u16>;

impl<T: Voxel> Volume<T> {
    pub fn new(dims: [usize; 3]) -> Self {
        Volume { dims, data: vec![T::default(); dims[0] * dims[1] * dims[2]] }
    }

    pub fn filled(dims: [usize; 3], value: T) -> Self {
        Volume { dims, data: vec![value; dims[0] * dims[1] * dims[2]] }
    }

    pub fn from_vec(dims: [usize; 3], data: Vec<T>) -> Result<Self, RasterError> {
        if data.len() != dims[0] * dims[1] * dims[2] {
            return Err(RasterError::Format(format!("{} values for dims {dims:?}", data.len())));
        }
        Ok(Volume { dims, data })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.dims[1] + y) * self.dims[2] + z
    }

    #[inline]
    pub fn coords(&self, i: usize) -> [usize; 3] {
        let z = i % self.dims[2];
        let r = i / self.dims[2];
        [r / self.dims[1], r % self.dims[1], z]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> T {
        self.data[self.index(x, y, z)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, z: usize, v: T) {
        let i = self.index(x, y, z);
        self.data[i] = v;
    }

    pub fn slice_len(&self) -> usize {
        self.dims[1] * self.dims[2]
    }

    /// Indices of the 26-neighbourhood of voxel `i` inside the volume.
    pub fn neighbors26(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let [x, y, z] = self.coords(i);
        let d = self.dims;
        (-1isize..=1)
            .flat_map(|dx| (-1isize..=1).flat_map(move |dy| (-1isize..=1).map(move |dz| (dx, dy, dz))))
            .filter(|&o| o != (0, 0, 0))
            .filter_map(move |(dx, dy, dz)| {
                let (nx, ny, nz) = (x as isize + dx, y as isize + dy, z as isize + dz);
                let inside = nx >= 0 && ny >= 0 && nz >= 0 && (nx as usize) < d[0] && (ny as usize) < d[1] && (nz as usize) < d[2];
                inside.then(|| (nx as usize * d[1] + ny as usize) * d[2] + nz as usize)
            })
    }

    pub fn check_same_dims<U>(&self, other: &Volume<U>) -> Result<(), RasterError> {
        if self.dims != other.dims {
            return Err(RasterError::DimensionMismatch(self.dims, other.dims));
        }
        Ok(())
    }

    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.data.len() * T::BYTES);
        for &v in &self.data {
            v.write_le(&mut out);
        }
        out
    }

    pub fn from_le_bytes(dims: [usize; 3], bytes: &[u8]) -> Result<Self, RasterError> {
        let n = dims[0] * dims[1] * dims[2];
        if bytes.len() != n * T::BYTES {
            return Err(RasterError::Format(format!("expected {} bytes, found {}", n * T::BYTES, bytes.len())));
        }
        Ok(Volume { dims, data: bytes.chunks_exact(T::BYTES).map(T::read_le).collect() })
    }

    pub fn sidecar(&self, voxel_size: f64, provenance: Option<serde_json::Value>) -> VolumeSidecar {
        VolumeSidecar {
            dims: self.dims,
            flavor: T::FLAVOR,
            dtype: T::DTYPE.to_string(),
            byte_order: "little".to_string(),
            layout: LAYOUT.to_string(),
            voxel_size,
            provenance,
        }
    }

    /// Writes `<stem>.raw` and `<stem>.json`.
    pub fn write_files(&self, stem: &Path, voxel_size: f64, provenance: Option<serde_json::Value>) -> Result<(), RasterError> {
        let mut raw = std::fs::File::create(stem.with_extension("raw"))?;
        raw.write_all(&self.to_le_bytes())?;
        let meta = serde_json::to_string_pretty(&self.sidecar(voxel_size, provenance))?;
        std::fs::write(stem.with_extension("json"), meta + "\n")?;
        Ok(())
    }

    pub fn read_files(stem: &Path) -> Result<(Self, VolumeSidecar), RasterError> {
        let meta: VolumeSidecar = serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json"))?)?;
        if meta.flavor != T::FLAVOR || meta.dtype != T::DTYPE {
            return Err(RasterError::Format(format!("expected {:?}/{}, file holds {:?}/{}", T::FLAVOR, T::DTYPE, meta.flavor, meta.dtype)));
        }
        if meta.layout != LAYOUT || meta.byte_order != "little" {
            return Err(RasterError::Format(format!("unsupported layout '{}' ({})", meta.layout, meta.byte_order)));
        }
        let mut bytes = Vec::new();
        std::fs::File::open(stem.with_extension("raw"))?.read_to_end(&mut bytes)?;
        Ok((Self::from_le_bytes(meta.dims, &bytes)?, meta))
    }
}

impl BinaryVolume {
    pub fn foreground(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    /// `true` if every foreground voxel of `self` is foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryVolume) -> bool {
        self.dims == other.dims && self.data.iter().zip(&other.data).all(|(&a, &b)| a == 0 || b != 0)
    }
}

pub const LAYOUT: &str = "row-major, x slowest: index = (x*d2 + y)*d3 + z";

/// JSON metadata stored next to a `.raw` volume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeSidecar {
    pub dims: [usize; 3],
    pub flavor: Flavor,
    pub dtype: String,
    pub byte_order: String,
    pub layout: String,
    pub voxel_size: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_coords_agree() {
        let v = GrayVolume::new([3, 4, 5]);
        for i in 0..v.len() {
            let [x, y, z] = v.coords(i);
            assert_eq!(v.index(x, y, z), i);
        }
        assert_eq!(v.index(1, 0, 0), 20);
    }

    #[test]
    fn neighbourhood_sizes() {
        let v = BinaryVolume::new([3, 3, 3]);
        assert_eq!(v.neighbors26(v.index(1, 1, 1)).count(), 26);
        assert_eq!(v.neighbors26(0).count(), 7);
    }

    #[test]
    fn raw_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("vol");
        let mut v = GrayVolume::new([2, 3, 4]);
        v.data_mut().iter_mut().enumerate().for_each(|(i, x)| *x = (i * 2711) as u16);
        v.write_files(&stem, 1.0, Some(serde_json::json!({"seed": 3}))).unwrap();
        let raw = std::fs::read(stem.with_extension("raw")).unwrap();
        assert_eq!(raw.len(), 48);
        assert_eq!(&raw[2..4], &2711u16.to_le_bytes());
        let (back, meta) = GrayVolume::read_files(&stem).unwrap();
        assert_eq!(back, v);
        assert_eq!(meta.dtype, "uint16");
        assert!(BinaryVolume::read_files(&stem).is_err());
    }
}
